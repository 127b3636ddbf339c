"""Exact angular-momentum kernels for rotor matrix elements.

Conventions, fixed here once and imported everywhere else:

* Wigner 3-j symbols use Racah's single-sum formula in exact integer and
  rational arithmetic (``math.factorial`` on Python ints, ``Fraction`` for
  the alternating sum), with a single conversion to float at the end.
* Spherical vector components follow the Condon-Shortley phase,

      v_{+1} = -(v_x + i v_y)/sqrt(2)
      v_0    =  v_z
      v_{-1} = +(v_x - i v_y)/sqrt(2)

  so the inverse map is v_x = (v_{-1} - v_{+1})/sqrt(2),
  v_y = i (v_{-1} + v_{+1})/sqrt(2), v_z = v_0.
* C_{lq} denotes the Racah-normalized spherical harmonic
  sqrt(4 pi / (2l+1)) Y_{lq}.

Everything here is a pure function of its integer/float arguments; there is
no shared mutable state beyond a read-only memo table for 3-j values.
"""

from __future__ import annotations

import math
from fractions import Fraction
from functools import lru_cache

import numpy as np

__all__ = [
    "three_j",
    "c_tensor_element",
    "f_factor",
    "cart_to_spherical",
    "spherical_to_cart",
]


def _tri(a, b, c):
    """Triangle coefficient (a+b-c)!(a-b+c)!(-a+b+c)!/(a+b+c+1)! as a Fraction."""
    return Fraction(
        math.factorial(a + b - c) * math.factorial(a - b + c) * math.factorial(-a + b + c),
        math.factorial(a + b + c + 1),
    )


@lru_cache(maxsize=None)
def three_j(j1: int, j2: int, j3: int, m1: int, m2: int, m3: int) -> float:
    """Wigner 3-j symbol (j1 j2 j3; m1 m2 m3) for integer arguments.

    Evaluated with Racah's single-sum formula. The triangle factor, the
    factorial prefactor and the alternating sum are kept exact (integers and
    Fractions); the square root forces the one float rounding at the end.
    Out-of-triangle or m-violating inputs return 0.0 rather than raising.
    """
    if m1 + m2 + m3 != 0:
        return 0.0
    if abs(m1) > j1 or abs(m2) > j2 or abs(m3) > j3:
        return 0.0
    if not (abs(j1 - j2) <= j3 <= j1 + j2):
        return 0.0
    pre = (
        _tri(j1, j2, j3)
        * math.factorial(j1 + m1) * math.factorial(j1 - m1)
        * math.factorial(j2 + m2) * math.factorial(j2 - m2)
        * math.factorial(j3 + m3) * math.factorial(j3 - m3)
    )
    tmin = max(0, j2 - j3 - m1, j1 - j3 + m2)
    tmax = min(j1 + j2 - j3, j1 - m1, j2 + m2)
    total = Fraction(0)
    for t in range(tmin, tmax + 1):
        denom = (
            math.factorial(t)
            * math.factorial(j3 - j2 + t + m1)
            * math.factorial(j3 - j1 + t - m2)
            * math.factorial(j1 + j2 - j3 - t)
            * math.factorial(j1 - t - m1)
            * math.factorial(j2 - t + m2)
        )
        total += Fraction((-1) ** t, denom)
    if total == 0:
        return 0.0
    sign = (-1) ** (j1 - j2 - m3) * (1 if total > 0 else -1)
    # value^2 = pre * total^2 exactly; |value| <= 1 so no overflow on float()
    return sign * math.sqrt(float(pre * total * total))


def c_tensor_element(l: int, q: int, J: int, M: int, Jp: int, Mp: int) -> float:
    """Matrix element <J M| C_{lq} |J' M'> of the Racah-normalized harmonic.

        (-1)^M sqrt((2J+1)(2J'+1)) (J l J'; -M q M') (J l J'; 0 0 0)

    Zero unless M = M' + q, and zero unless J + l + J' is even (the second
    3-j enforces the parity rule). Ranks l = 1, 2 are the supported surface;
    the formula itself is valid for any integer rank.
    """
    if M != Mp + q:
        return 0.0
    return (
        (-1) ** M
        * math.sqrt((2 * J + 1) * (2 * Jp + 1))
        * three_j(J, l, Jp, -M, q, Mp)
        * three_j(J, l, Jp, 0, 0, 0)
    )


# Spherical basis ordering used by this package: index 0, 1, 2 <-> q = -1, 0, +1.
_CART_TO_SPH = np.array(
    [
        [1 / math.sqrt(2), -1j / math.sqrt(2), 0],   # q = -1
        [0, 0, 1],                                   # q =  0
        [-1 / math.sqrt(2), -1j / math.sqrt(2), 0],  # q = +1
    ],
    dtype=complex,
)
_SPH_TO_CART = np.linalg.inv(_CART_TO_SPH)


def cart_to_spherical(v) -> np.ndarray:
    """Spherical components (q = -1, 0, +1) of a Cartesian 3-vector.

    Condon-Shortley phase; the map is unitary, so norms are preserved and
    ``spherical_to_cart`` is its exact inverse.
    """
    return _CART_TO_SPH @ np.asarray(v, dtype=complex)


def spherical_to_cart(v_sph) -> np.ndarray:
    """Inverse of :func:`cart_to_spherical` (input ordered q = -1, 0, +1)."""
    return _SPH_TO_CART @ np.asarray(v_sph, dtype=complex)


def _f_factor_q(J_e: int, M_e: int, Lam: int, J: int, M: int, q: int) -> float:
    # Lab spherical component q of the transition amplitude; the Sigma ground
    # state fixes the body-frame dipole index to -Lam.
    if abs(Lam) > J_e or abs(M_e) > J_e or abs(M) > J:
        return 0.0
    return (
        (-1) ** (q + M_e)
        * math.sqrt((2 * J + 1) * (2 * J_e + 1))
        * three_j(J, 1, J_e, M, -q, -M_e)
        * three_j(J, 1, J_e, 0, Lam, -Lam)
    )


def f_factor(J_e: int, M_e: int, Lam: int, J: int, M: int, branch: int = 0,
             sigma: str = "z") -> complex:
    """Angular factor of <J M (+-)| d_sigma |J_e M_e Lam> for a unit transition moment.

    This is the orientation integral of three Wigner rotation matrices:
    ground rotor state Y_JM, the lab-frame Cartesian dipole component sigma
    re-expressed through body-frame spherical components, and the excited
    symmetric-top state sqrt((2J_e+1)/4pi) D^{J_e*}_{M_e Lam}. Evaluated
    exactly through 3-j contractions.

    branch = +1 or -1 selects the (|J,M> +- |J,-M>)/sqrt(2) combination used
    for the |M|-degenerate pair; branch = 0 means the plain |J M> state (the
    only meaningful choice for M = 0).

    Values are real for sigma in {x, z} and purely imaginary for sigma = y
    under the Condon-Shortley convention; quadratic observables always enter
    as F * conj(F). Zero unless |M_e - (+-M)| <= 1 and |Lam| <= J_e.
    """
    if branch:
        return (
            f_factor(J_e, M_e, Lam, J, M, 0, sigma)
            + branch * f_factor(J_e, M_e, Lam, J, -M, 0, sigma)
        ) / math.sqrt(2)
    if sigma == "z":
        return complex(_f_factor_q(J_e, M_e, Lam, J, M, 0))
    fm = _f_factor_q(J_e, M_e, Lam, J, M, -1)
    fp = _f_factor_q(J_e, M_e, Lam, J, M, +1)
    if sigma == "x":
        return complex((fm - fp) / math.sqrt(2))
    if sigma == "y":
        return 1j * (fm + fp) / math.sqrt(2)
    raise ValueError(f"sigma must be one of 'x', 'y', 'z', got {sigma!r}")
