"""Lab-frame dynamic polarizability of field-dressed rotor states.

Two independent routes produce the same 3x3 tensor:

* a closed form: the molecular tensor splits into an isotropic part
  abar = (a_par + 2 a_perp)/3 and an anisotropy da = a_par - a_perp, and
  the state enters only through rank-2 geometry moments of the dressed
  wavefunction (<C_20> on the diagonal, a <C_2,+-2> coherence coupling the
  degenerate +M/-M pair),
* a brute-force sum over intermediate rotational states built from
  transition amplitude factors, weighting Sigma (Lambda = 0) channels by
  a_par and Pi (Lambda = +-1) channels by a_perp.

Route agreement is the package's central correctness check; see the tests.

Degenerate |M| > 0 pairs are treated in the two-dimensional subspace
{|+M>, |-M>}. The light's polarization selects the stationary combinations;
for linear polarization in the x-z plane these are exactly
(|+M> +- |-M>)/sqrt(2), which carry the +/- branch labels.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .angular import c_tensor_element, f_factor, three_j
from .stark import StarkEigensystem, StateLabel, dressed_c20
from .units import AU_POL_TO_MHZ_PER_W_CM2

__all__ = [
    "PolarizationVector",
    "PolarizabilityTensor",
    "IrreducibleParts",
    "StarkShift",
    "alpha_tensor_closed_form",
    "alpha_tensor_branches",
    "alpha_tensor_sos",
    "alpha_eff",
    "stark_shift",
    "irreducible_decompose",
    "alpha_angle_scan",
    "MAGIC_ANGLE_DEG",
]

# arccos(1/sqrt(3)); cos^2 of it is exactly 1/3
MAGIC_ANGLE_DEG = math.degrees(math.acos(1.0 / math.sqrt(3.0)))

# relative threshold below which a 2x2 geometry operator counts as identity
_DEGENERACY_RTOL = 1e-12


@dataclass(frozen=True)
class PolarizationVector:
    """Complex unit polarization vector in the lab frame (DC field along z)."""

    eps: tuple

    def __post_init__(self):
        e = np.asarray(self.eps, dtype=complex)
        if e.shape != (3,):
            raise ValueError("polarization must be a 3-vector")
        norm = float(np.sum(np.abs(e) ** 2))
        if abs(norm - 1.0) > 1e-12:
            raise ValueError(f"polarization must have unit norm, got |eps|^2 = {norm}")

    @property
    def array(self) -> np.ndarray:
        return np.asarray(self.eps, dtype=complex)

    @classmethod
    def linear(cls, theta_rad: float) -> "PolarizationVector":
        """cos(theta) z_hat + sin(theta) x_hat."""
        return cls((math.sin(theta_rad), 0.0, math.cos(theta_rad)))

    @classmethod
    def linear_deg(cls, theta_deg: float) -> "PolarizationVector":
        return cls.linear(math.radians(theta_deg))

    @classmethod
    def z(cls) -> "PolarizationVector":
        return cls((0.0, 0.0, 1.0))

    @classmethod
    def x(cls) -> "PolarizationVector":
        return cls((1.0, 0.0, 0.0))

    @classmethod
    def circular(cls, sense: str) -> "PolarizationVector":
        """sigma+- = -+(x_hat +- i y_hat)/sqrt(2)."""
        if sense == "+":
            return cls((-1 / math.sqrt(2), -1j / math.sqrt(2), 0.0))
        if sense == "-":
            return cls((1 / math.sqrt(2), -1j / math.sqrt(2), 0.0))
        raise ValueError(f"sense must be '+' or '-', got {sense!r}")

    @classmethod
    def from_components(cls, ex, ey, ez) -> "PolarizationVector":
        v = np.array([ex, ey, ez], dtype=complex)
        n = math.sqrt(float(np.sum(np.abs(v) ** 2)))
        if n == 0.0:
            raise ValueError("zero polarization vector")
        return cls(tuple(v / n))

    @classmethod
    def parse(cls, text: str) -> "PolarizationVector":
        """Parse "z", "x", "theta:<deg>", "sigma+" or "sigma-"."""
        t = text.strip().lower()
        if t == "z":
            return cls.z()
        if t == "x":
            return cls.x()
        if t == "sigma+":
            return cls.circular("+")
        if t == "sigma-":
            return cls.circular("-")
        if t.startswith("theta:"):
            try:
                deg = float(t[len("theta:"):])
            except ValueError:
                raise ValueError(f"bad angle in polarization {text!r}") from None
            return cls.linear_deg(deg)
        raise ValueError(
            f"cannot parse polarization {text!r}; expected z, x, theta:<deg>, sigma+ or sigma-"
        )

    def is_linear(self) -> bool:
        e = self.array
        # linear iff some global phase makes all components real
        phase_fixed = e * cmath.exp(-1j * cmath.phase(e[np.argmax(np.abs(e))]))
        return bool(np.max(np.abs(phase_fixed.imag)) < 1e-12)

    def __str__(self):
        e = self.array
        tol = 1e-12
        if np.max(np.abs(e - np.array([0, 0, 1]))) < tol:
            return "z"
        if np.max(np.abs(e - np.array([1, 0, 0]))) < tol:
            return "x"
        for sense in ("+", "-"):
            if np.max(np.abs(e - PolarizationVector.circular(sense).array)) < tol:
                return f"sigma{sense}"
        if self.is_linear() and abs(e[1]) < tol and e[0].real >= 0 and e[2].real >= 0:
            return f"theta:{math.degrees(math.atan2(e[0].real, e[2].real)):.10g}"
        return f"({e[0]:.6g}, {e[1]:.6g}, {e[2]:.6g})"


@dataclass(frozen=True)
class PolarizabilityTensor:
    """3x3 Hermitian lab-frame tensor (a.u.) for one dressed state.

    ``subspace_vector`` records the (c_plus, c_minus) combination of the
    degenerate |+M>, |-M> pair this tensor belongs to (None for M = 0).
    ``degenerate`` is set when the light cannot split the pair, in which
    case the branch assignment is conventional rather than physical.
    """

    matrix: np.ndarray
    state: StateLabel
    beta: float
    alpha_par: float
    alpha_perp: float
    degenerate: bool = False
    subspace_vector: tuple | None = None

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=complex)
        if m.shape != (3, 3):
            raise ValueError("tensor must be 3x3")
        if np.max(np.abs(m - m.conj().T)) > 1e-9 * max(1.0, float(np.max(np.abs(m)))):
            raise ValueError("tensor must be Hermitian")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @property
    def xx(self) -> float:
        return float(self.matrix[0, 0].real)

    @property
    def yy(self) -> float:
        return float(self.matrix[1, 1].real)

    @property
    def zz(self) -> float:
        return float(self.matrix[2, 2].real)

    @property
    def abar(self) -> float:
        return float(np.trace(self.matrix).real) / 3.0


@dataclass(frozen=True)
class StarkShift:
    """AC shift Delta E = -(|E_o|^2/4) sum alpha_ss' eps_s eps*_s'."""

    delta_e_mhz: float
    alpha_eff_au: float
    intensity_w_cm2: float
    polarization: PolarizationVector
    state: StateLabel


def _branch_sign(branch: str) -> int:
    return {"+": 1, "-": -1}[branch]


def dressed_c22_coherence(sys: StarkEigensystem, j_tilde: int) -> float:
    """<J_tilde,+1|C_2,+2|J_tilde,-1>, the rank-2 coherence of an |M|=1 pair.

    Zero for |M| != 1 since C_2q cannot bridge a 2|M| > 2 projection gap.
    """
    if abs(sys.m) != 1:
        return 0.0
    row = sys.amplitudes(j_tilde)
    js = list(sys.j_values)
    total = 0.0
    for i, j in enumerate(js):
        for k, jp in enumerate(js):
            if abs(jp - j) > 2:
                continue
            elem = c_tensor_element(2, 2, j, 1, jp, -1)
            if elem:
                total += row[i] * row[k] * elem
    return total


# quadratic form with <+M|...|-M> structure: (eps_x - i eps_y)(eps*_x - i eps*_y)
_K_COHERENCE = np.array(
    [[1.0, -1.0j, 0.0], [-1.0j, -1.0, 0.0], [0.0, 0.0, 0.0]], dtype=complex
) / math.sqrt(6.0)


def _diagonal_geometry(sys, j_tilde, alpha_par, alpha_perp):
    abar = (alpha_par + 2.0 * alpha_perp) / 3.0
    da = alpha_par - alpha_perp
    c0 = dressed_c20(sys, j_tilde)
    axx = abar - da * c0 / 3.0
    azz = abar + 2.0 * da * c0 / 3.0
    return np.diag([axx, axx, azz]).astype(complex), da


def _resolve_branch_vectors(coupling: complex, scale: float):
    """Stationary combinations of the degenerate pair under the light field.

    The 2x2 geometry operator is g*I + [[0, coupling], [conj, 0]]; its
    eigenvectors are (1, e^{i phi})/sqrt(2). The one overlapping
    (1, 1)/sqrt(2) most strongly is the + branch. Returns
    (v_plus, v_minus, degenerate_flag).
    """
    if abs(coupling) <= _DEGENERACY_RTOL * scale:
        v_plus = np.array([1.0, 1.0], dtype=complex) / math.sqrt(2)
        v_minus = np.array([1.0, -1.0], dtype=complex) / math.sqrt(2)
        return v_plus, v_minus, True
    phase = coupling / abs(coupling)
    v_up = np.array([1.0, np.conj(phase)], dtype=complex) / math.sqrt(2)
    v_down = np.array([1.0, -np.conj(phase)], dtype=complex) / math.sqrt(2)
    # assign +/- by overlap with the conventional symmetric combination
    if abs(v_up[0] + v_up[1]) >= abs(v_down[0] + v_down[1]):
        return v_up, v_down, False
    return v_down, v_up, False


def _branch_tensor(diag, da, t, vec):
    """Subspace tensor for combination vec = (c_plus, c_minus)."""
    cross = np.conj(vec[0]) * vec[1] * da * t * _K_COHERENCE
    return diag + cross + cross.conj().T


def alpha_tensor_closed_form(
    sys: StarkEigensystem,
    label: StateLabel,
    alpha_par: float,
    alpha_perp: float,
    polarization: PolarizationVector | None = None,
) -> PolarizabilityTensor:
    """Tensor from the rank-2 geometry of the dressed state, no state sums.

    For |M| > 0 the label must carry a +/- branch. By default the branch
    states are the conventional (|+M> +- |-M>)/sqrt(2); pass ``polarization``
    to let the light field pick the stationary combinations instead (they
    coincide for linear polarization in the x-z plane).
    """
    if abs(label.m) != abs(sys.m):
        raise ValueError(f"label {label} does not belong to an |M| = {abs(sys.m)} block")
    diag, da = _diagonal_geometry(sys, label.j_tilde, alpha_par, alpha_perp)
    beta = sys.beta
    if label.m == 0:
        return PolarizabilityTensor(
            matrix=diag, state=label, beta=beta,
            alpha_par=alpha_par, alpha_perp=alpha_perp,
        )
    if not label.branch:
        raise ValueError(
            f"state ({label.j_tilde},{label.m}) is one of a degenerate pair; "
            "request a +/- branch (or use alpha_tensor_branches)"
        )
    t = dressed_c22_coherence(sys, label.j_tilde)
    scale = max(abs(alpha_par), abs(alpha_perp), 1e-300)
    if polarization is None:
        vec = np.array([1.0, _branch_sign(label.branch)], dtype=complex) / math.sqrt(2)
        degenerate = abs(da * t) <= _DEGENERACY_RTOL * scale
    else:
        e = polarization.array
        coupling = da * t * np.einsum("ab,a,b->", _K_COHERENCE, e, e.conj())
        v_plus, v_minus, degenerate = _resolve_branch_vectors(coupling, scale)
        vec = v_plus if label.branch == "+" else v_minus
    matrix = _branch_tensor(diag, da, t, vec)
    return PolarizabilityTensor(
        matrix=matrix, state=label, beta=beta,
        alpha_par=alpha_par, alpha_perp=alpha_perp,
        degenerate=degenerate, subspace_vector=(complex(vec[0]), complex(vec[1])),
    )


def alpha_tensor_branches(
    sys: StarkEigensystem,
    j_tilde: int,
    alpha_par: float,
    alpha_perp: float,
    polarization: PolarizationVector | None = None,
):
    """Both +/- branch tensors of a degenerate |M| > 0 pair."""
    if sys.m == 0:
        raise ValueError("branches only exist for |M| > 0")
    plus = StateLabel(j_tilde, abs(sys.m), "+")
    minus = StateLabel(j_tilde, abs(sys.m), "-")
    return (
        alpha_tensor_closed_form(sys, plus, alpha_par, alpha_perp, polarization),
        alpha_tensor_closed_form(sys, minus, alpha_par, alpha_perp, polarization),
    )


@lru_cache(maxsize=None)
def _intermediate_states(j_e_max: int):
    out = []
    for lam in (0, 1, -1):
        for j_e in range(abs(lam), j_e_max + 1):
            for m_e in range(-j_e, j_e + 1):
                out.append((lam, j_e, m_e))
    return tuple(out)


def alpha_tensor_sos(
    sys: StarkEigensystem,
    label: StateLabel,
    alpha_par: float,
    alpha_perp: float,
    j_e_max: int | None = None,
) -> PolarizabilityTensor:
    """Tensor by explicit sum over intermediate rotational states.

    Sigma-channel (Lambda = 0) terms carry weight alpha_par, Pi-channel
    (Lambda = +-1) terms alpha_perp; rotational structure of the energy
    denominators is neglected, so weights factor out of the angular sums.
    Branch states use the conventional (|+M> +- |-M>)/sqrt(2) combinations.
    j_e_max must cover every J in the basis plus one unit of photon recoil
    in angular momentum; default is exactly that, sys.j_max + 1.
    """
    if abs(label.m) != abs(sys.m):
        raise ValueError(f"label {label} does not belong to an |M| = {abs(sys.m)} block")
    if label.m != 0 and not label.branch:
        raise ValueError(
            f"state ({label.j_tilde},{label.m}) is one of a degenerate pair; "
            "request a +/- branch"
        )
    if j_e_max is None:
        j_e_max = sys.j_max + 1
    if j_e_max < sys.j_max + 1:
        raise ValueError(f"j_e_max must be >= j_max + 1 = {sys.j_max + 1}")
    row = sys.amplitudes(label.j_tilde)
    js = list(sys.j_values)
    m = label.m if label.m == 0 else abs(label.m)
    branch = _branch_sign(label.branch) if label.branch else 0
    matrix = np.zeros((3, 3), dtype=complex)
    amp = np.empty(3, dtype=complex)
    for lam, j_e, m_e in _intermediate_states(j_e_max):
        weight = alpha_par if lam == 0 else alpha_perp
        for idx, sigma in enumerate(("x", "y", "z")):
            a = 0.0 + 0.0j
            for i, j in enumerate(js):
                a += row[i] * f_factor(j_e, m_e, lam, j, m, branch=branch, sigma=sigma)
            amp[idx] = a
        if np.max(np.abs(amp)) == 0.0:
            continue
        matrix += weight * np.outer(amp, amp.conj())
    return PolarizabilityTensor(
        matrix=matrix, state=label, beta=sys.beta,
        alpha_par=alpha_par, alpha_perp=alpha_perp,
        subspace_vector=None if label.m == 0 else (
            complex(1 / math.sqrt(2)), complex(branch / math.sqrt(2))
        ),
    )


def alpha_eff(tensor: PolarizabilityTensor, polarization: PolarizationVector) -> float:
    """sum_{ss'} alpha_ss' eps_s eps*_s', real for Hermitian tensors."""
    e = polarization.array
    val = np.einsum("ab,a,b->", tensor.matrix, e, e.conj())
    return float(val.real)


def stark_shift(
    tensor: PolarizabilityTensor,
    polarization: PolarizationVector,
    intensity_w_cm2: float,
) -> StarkShift:
    """AC shift in MHz at the given intensity (W/cm^2)."""
    if intensity_w_cm2 < 0:
        raise ValueError("intensity must be >= 0")
    a_eff = alpha_eff(tensor, polarization)
    return StarkShift(
        delta_e_mhz=-a_eff * intensity_w_cm2 * AU_POL_TO_MHZ_PER_W_CM2,
        alpha_eff_au=a_eff,
        intensity_w_cm2=intensity_w_cm2,
        polarization=polarization,
        state=tensor.state,
    )


def _clebsch_1x1(q1: int, q2: int, k: int, q: int) -> float:
    return ((-1) ** q) * math.sqrt(2 * k + 1) * three_j(1, 1, k, q1, q2, -q)


def _spherical_basis_vectors():
    e_plus = np.array([-1.0, -1.0j, 0.0], dtype=complex) / math.sqrt(2)
    e_zero = np.array([0.0, 0.0, 1.0], dtype=complex)
    e_minus = np.array([1.0, -1.0j, 0.0], dtype=complex) / math.sqrt(2)
    return {1: e_plus, 0: e_zero, -1: e_minus}


@lru_cache(maxsize=1)
def _compound_basis():
    """Orthonormal rank-k basis matrices B_kq built from 1 (x) 1 coupling."""
    e = _spherical_basis_vectors()
    basis = {}
    for k in (0, 1, 2):
        for q in range(-k, k + 1):
            b = np.zeros((3, 3), dtype=complex)
            for q1 in (-1, 0, 1):
                q2 = q - q1
                if abs(q2) > 1:
                    continue
                cg = _clebsch_1x1(q1, q2, k, q)
                if cg:
                    b += cg * np.outer(e[q1], e[q2])
            b.setflags(write=False)
            basis[(k, q)] = b
    return basis


@dataclass(frozen=True)
class IrreducibleParts:
    """Rank-0/1/2 content of a 3x3 tensor.

    ``scalar`` is Tr/3 (the rank-0 part as an isotropic polarizability).
    ``vector`` holds the three rank-1 spherical components (q = -1, 0, +1),
    nonzero only when the tensor has an antisymmetric part. ``tensor``
    holds the five rank-2 components (q = -2 .. +2) of the symmetric
    traceless part.
    """

    scalar: complex
    vector: np.ndarray
    tensor: np.ndarray

    def recompose(self) -> np.ndarray:
        basis = _compound_basis()
        out = self.scalar * (-math.sqrt(3.0)) * basis[(0, 0)]
        for q in (-1, 0, 1):
            out = out + self.vector[q + 1] * basis[(1, q)]
        for q in (-2, -1, 0, 1, 2):
            out = out + self.tensor[q + 2] * basis[(2, q)]
        return out


def irreducible_decompose(tensor) -> IrreducibleParts:
    """Exact expansion over the compound spherical basis; lossless."""
    matrix = tensor.matrix if isinstance(tensor, PolarizabilityTensor) else np.asarray(tensor, dtype=complex)
    basis = _compound_basis()

    def coeff(k, q):
        return complex(np.sum(basis[(k, q)].conj() * matrix))

    # B_00 = -I/sqrt(3), so the trace part converts via -sqrt(3)
    scalar = coeff(0, 0) / (-math.sqrt(3.0))
    vector = np.array([coeff(1, q) for q in (-1, 0, 1)])
    rank2 = np.array([coeff(2, q) for q in (-2, -1, 0, 1, 2)])
    vector.setflags(write=False)
    rank2.setflags(write=False)
    return IrreducibleParts(scalar=scalar, vector=vector, tensor=rank2)


def alpha_angle_scan(
    systems: dict,
    labels,
    alpha_par: float,
    alpha_perp: float,
    theta_deg,
) -> np.ndarray:
    """alpha_eff on a grid of linear-polarization angles, one column per state.

    ``systems`` maps |M| to the diagonalized block at the working DC field.
    Branch resolution uses the conventional x-z combinations, which are the
    stationary ones for every angle in the scan.
    """
    thetas = np.asarray(theta_deg, dtype=float)
    out = np.empty((thetas.size, len(labels)))
    for col, label in enumerate(labels):
        sys = systems[abs(label.m)]
        tens = alpha_tensor_closed_form(sys, label, alpha_par, alpha_perp)
        for i, th in enumerate(thetas):
            out[i, col] = alpha_eff(tens, PolarizationVector.linear_deg(th))
    return out
