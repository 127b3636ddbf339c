"""Rigid-rotor Stark problem, one M block at a time.

A DC field along z couples J to J +/- 1 within fixed M, giving a real
symmetric tridiagonal Hamiltonian in the |JM> basis. Eigenstates are labeled
by J_tilde (the field-free J they connect to adiabatically); within a block
that is simply ascending-energy order, since avoided crossings never close
for this one-parameter family. Energies in MHz, fields in kV/cm throughout.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

import numpy as np

from .angular import c_tensor_element
from .units import DEBYE_KVCM_TO_MHZ, MoleculeSpec

__all__ = [
    "StateLabel",
    "StarkBlock",
    "StarkEigensystem",
    "build_block",
    "diagonalize",
    "solve",
    "alignment",
    "dressed_c20",
    "check_convergence",
]

_LABEL_RE = re.compile(r"^\s*(-?\d+)\s*,\s*(-?\d+)\s*(?:,\s*([+-])\s*)?$")


@dataclass(frozen=True)
class StateLabel:
    """Dressed-state label (J_tilde, M) with an optional +/- branch tag.

    Branch tags name the symmetric/antisymmetric combinations
    (|+M> +/- |-M>)/sqrt(2) of the degenerate pair and are only meaningful
    for |M| > 0; M = 0 states must carry no tag.
    """

    j_tilde: int
    m: int
    branch: str = ""

    def __post_init__(self):
        if self.branch not in ("", "+", "-"):
            raise ValueError(f"branch must be '', '+' or '-', got {self.branch!r}")
        if self.m == 0 and self.branch:
            raise ValueError("M = 0 states carry no +/- branch")
        if self.j_tilde < abs(self.m):
            raise ValueError(f"need J_tilde >= |M|, got ({self.j_tilde}, {self.m})")

    @classmethod
    def parse(cls, text: str) -> "StateLabel":
        """Parse "J,M" or "J,M,+" / "J,M,-" (unicode minus accepted)."""
        match = _LABEL_RE.match(text.replace("−", "-").replace("–", "-"))
        if match is None:
            raise ValueError(f"cannot parse state label {text!r}; expected 'J,M' or 'J,M,+/-'")
        j, m, br = match.groups()
        return cls(int(j), int(m), br or "")

    def __str__(self):
        tail = f",{self.branch}" if self.branch else ""
        return f"{self.j_tilde},{self.m}{tail}"


@dataclass(frozen=True)
class StarkBlock:
    """H for one M block: diag B J(J+1), off-diag -d00 E <J||C_10||J'> terms."""

    m: int
    j_max: int
    b_mhz: float
    de_mhz: float   # d00 * E in MHz, the off-diagonal scale
    h: np.ndarray

    @property
    def j_values(self) -> range:
        return range(abs(self.m), self.j_max + 1)


@dataclass(frozen=True)
class StarkEigensystem:
    """Diagonalized block. Rows of ``u`` are eigenstates ordered by energy.

    Row k is the state J_tilde = |M| + k expanded over the J basis
    (columns J = |M| .. J_max). Sign convention: the largest-magnitude
    entry of each row is positive, which makes u continuous in E and
    reduces to the identity at E = 0.
    """

    m: int
    j_max: int
    b_mhz: float
    de_mhz: float
    energies: np.ndarray
    u: np.ndarray

    @property
    def beta(self) -> float:
        return self.de_mhz / self.b_mhz

    @property
    def j_values(self) -> range:
        return range(abs(self.m), self.j_max + 1)

    def index_of(self, j_tilde: int) -> int:
        if not abs(self.m) <= j_tilde <= self.j_max:
            raise ValueError(f"J_tilde = {j_tilde} outside block |M| = {abs(self.m)}, J_max = {self.j_max}")
        return j_tilde - abs(self.m)

    def energy(self, j_tilde: int) -> float:
        return float(self.energies[self.index_of(j_tilde)])

    def amplitudes(self, j_tilde: int) -> np.ndarray:
        return self.u[self.index_of(j_tilde)]


def build_block(spec: MoleculeSpec, e_dc_kv_cm: float, m: int, j_max: int = 10) -> StarkBlock:
    """Assemble the M-block Hamiltonian at DC field ``e_dc_kv_cm``.

    Entries H_{JJ'} = B J(J+1) delta_{JJ'} - d00 E <C_10 geometry>, in MHz.
    Requires j_max >= |m| + 3 so every retained state has mixing headroom.
    """
    if j_max < abs(m) + 3:
        raise ValueError(f"j_max must be >= |m| + 3 (got j_max = {j_max}, m = {m})")
    if e_dc_kv_cm < 0:
        raise ValueError("E_dc must be >= 0")
    de_mhz = spec.d00_debye * e_dc_kv_cm * DEBYE_KVCM_TO_MHZ
    js = list(range(abs(m), j_max + 1))
    n = len(js)
    h = np.zeros((n, n))
    for i, j in enumerate(js):
        h[i, i] = spec.b_mhz * j * (j + 1)
    for i in range(n - 1):
        v = -de_mhz * c_tensor_element(1, 0, js[i], m, js[i + 1], m)
        h[i, i + 1] = v
        h[i + 1, i] = v
    h.setflags(write=False)
    return StarkBlock(m=m, j_max=j_max, b_mhz=spec.b_mhz, de_mhz=de_mhz, h=h)


def diagonalize(block: StarkBlock) -> StarkEigensystem:
    energies, vecs = np.linalg.eigh(block.h)
    u = vecs.T.copy()
    for row in u:
        if row[np.argmax(np.abs(row))] < 0:
            row *= -1.0
    energies.setflags(write=False)
    u.setflags(write=False)
    return StarkEigensystem(
        m=block.m,
        j_max=block.j_max,
        b_mhz=block.b_mhz,
        de_mhz=block.de_mhz,
        energies=energies,
        u=u,
    )


def solve(spec: MoleculeSpec, e_dc_kv_cm: float, m: int, j_max: int = 10) -> StarkEigensystem:
    """build_block + diagonalize in one step."""
    return diagonalize(build_block(spec, e_dc_kv_cm, m, j_max))


def alignment(sys: StarkEigensystem, j_tilde: int) -> float:
    """<cos^2 theta> of the dressed state, via its rank-2 moment.

    cos^2 theta = (1 + 2 C_20)/3, so the dressed expectation is
    (1 + 2 <C_20>)/3 with <C_20> contracted through the mixing row.
    """
    return (1.0 + 2.0 * dressed_c20(sys, j_tilde)) / 3.0


def dressed_c20(sys: StarkEigensystem, j_tilde: int) -> float:
    """<C_20> in the dressed state: sum_{J J'} u_J u_J' <JM|C_20|J'M>."""
    row = sys.amplitudes(j_tilde)
    js = list(sys.j_values)
    total = 0.0
    for i, j in enumerate(js):
        for k in range(i, len(js)):
            jp = js[k]
            if jp - j > 2:
                break
            elem = c_tensor_element(2, 0, j, sys.m, jp, sys.m)
            if elem == 0.0:
                continue
            weight = row[i] * row[k]
            total += weight * elem if k == i else 2.0 * weight * elem
    return total


def check_convergence(
    spec: MoleculeSpec,
    e_dc_kv_cm: float,
    m: int,
    j_tilde: int,
    j_max: int = 10,
) -> float:
    """Relative energy change for one state between j_max and j_max + 4.

    The reference scale is max(|E at j_max + 4|, B): energies cross zero as
    the field sweeps, and B is the natural floor for the block.
    """
    e_lo = solve(spec, e_dc_kv_cm, m, j_max).energy(j_tilde)
    e_hi = solve(spec, e_dc_kv_cm, m, j_max + 4).energy(j_tilde)
    return abs(e_lo - e_hi) / max(abs(e_hi), spec.b_mhz)
