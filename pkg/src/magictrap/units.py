"""Unit conversions and the molecule parameter registry.

Internal unit system, used by every other module: energies in MHz, DC fields
in kV/cm, dipole moments in Debye, polarizabilities in atomic units. All
conversion constants are defined once here, from CODATA-2018 exact values.

``convert`` handles linear rescales between units of one dimension. The
nm <-> cm^-1 relation for light is reciprocal, not linear, so wavelength and
wavenumber are separate dimensions under ``convert``; use
``nu_from_wavelength_nm`` / ``wavelength_nm_from_nu`` for that map.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import numpy as np

__all__ = [
    "Quantity",
    "MoleculeSpec",
    "FieldConfig",
    "IncompatibleUnitsError",
    "MoleculeFileError",
    "convert",
    "load_molecule",
    "bundled_molecule_names",
    "alpha_lambda_at",
    "nu_from_wavelength_nm",
    "wavelength_nm_from_nu",
    "DEBYE_KVCM_TO_MHZ",
    "AU_POL_TO_MHZ_PER_W_CM2",
    "CM1_TO_MHZ",
]

# CODATA 2018 (h, c, e exact by SI definition)
H_PLANCK = 6.62607015e-34        # J s
C_LIGHT = 299792458.0            # m / s
E_CHARGE = 1.602176634e-19       # C
BOHR_RADIUS = 5.29177210903e-11  # m
HARTREE = 4.3597447222071e-18    # J
EPSILON_0 = 8.8541878128e-12     # F / m

DEBYE_SI = 1e-21 / C_LIGHT                                # C m
AU_DIPOLE_SI = E_CHARGE * BOHR_RADIUS                     # C m
AU_POL_SI = E_CHARGE ** 2 * BOHR_RADIUS ** 2 / HARTREE    # C^2 m^2 / J

CM1_TO_MHZ = C_LIGHT * 100.0 / 1e6          # 29979.2458
CM1_TO_GHZ = CM1_TO_MHZ / 1e3               # 29.9792458

# d * E / h for 1 Debye in a 1 kV/cm field, in MHz (~503.41)
DEBYE_KVCM_TO_MHZ = DEBYE_SI * 1e5 / H_PLANCK / 1e6

# AC shift per intensity for 1 a.u. of polarizability:
# Delta E = -alpha I / (2 eps0 c), expressed in MHz per W/cm^2 (~4.687e-8)
AU_POL_TO_MHZ_PER_W_CM2 = AU_POL_SI / (2 * EPSILON_0 * C_LIGHT * H_PLANCK) * 1e4 / 1e6

AU_DIPOLE_TO_DEBYE = AU_DIPOLE_SI / DEBYE_SI              # ~2.5417


class IncompatibleUnitsError(ValueError):
    """Conversion requested between units of different dimensions."""


class MoleculeFileError(ValueError):
    """Molecule spec file failed to parse or violates an invariant."""


# unit token -> (dimension, factor to the dimension's base unit)
_UNITS = {
    "MHz": ("spectroscopic_energy", 1.0),
    "GHz": ("spectroscopic_energy", 1e3),
    "cm^-1": ("spectroscopic_energy", CM1_TO_MHZ),
    "kV/cm": ("electric_field", 1.0),
    "V/m": ("electric_field", 1e-5),
    "debye": ("dipole", 1.0),
    "au_dipole": ("dipole", AU_DIPOLE_TO_DEBYE),
    "au_polarizability": ("polarizability", 1.0),
    "MHz/(W/cm^2)": ("polarizability", 1.0 / AU_POL_TO_MHZ_PER_W_CM2),
    "nm": ("length", 1.0),
    "W/cm^2": ("intensity", 1.0),
}


@dataclass(frozen=True)
class Quantity:
    value: float
    unit: str

    def __post_init__(self):
        if self.unit not in _UNITS:
            raise IncompatibleUnitsError(f"unknown unit {self.unit!r}")


def convert(q: Quantity, to_unit: str) -> Quantity:
    """Exact linear rescale of ``q`` to ``to_unit`` within one dimension."""
    if to_unit not in _UNITS:
        raise IncompatibleUnitsError(f"unknown unit {to_unit!r}")
    dim_from, f_from = _UNITS[q.unit]
    dim_to, f_to = _UNITS[to_unit]
    if dim_from != dim_to:
        raise IncompatibleUnitsError(
            f"cannot convert {q.unit!r} ({dim_from}) to {to_unit!r} ({dim_to})"
        )
    return Quantity(q.value * (f_from / f_to), to_unit)


def nu_from_wavelength_nm(lambda_nm: float) -> float:
    """Vacuum wavenumber in cm^-1 for a wavelength in nm (reciprocal map)."""
    return 1e7 / lambda_nm


def wavelength_nm_from_nu(nu_cm: float) -> float:
    """Vacuum wavelength in nm for a wavenumber in cm^-1."""
    return 1e7 / nu_cm


@dataclass(frozen=True)
class MoleculeSpec:
    """Per-molecule constants: B, d00, and tabulated alpha_par / alpha_perp(nu).

    Immutable after construction; shared freely across threads.
    """

    name: str
    b_mhz: float
    d00_debye: float
    nu_grid: tuple          # cm^-1, strictly increasing
    alpha_par: tuple        # a.u., same grid
    alpha_perp: tuple       # a.u., same grid

    def __post_init__(self):
        if not self.b_mhz > 0:
            raise MoleculeFileError(f"B_GHz must be > 0 (molecule {self.name!r})")
        if self.d00_debye < 0:
            raise MoleculeFileError(f"d00_debye must be >= 0 (molecule {self.name!r})")
        if len(self.nu_grid) < 2:
            raise MoleculeFileError(f"alpha table needs at least 2 rows (molecule {self.name!r})")
        if not (len(self.nu_grid) == len(self.alpha_par) == len(self.alpha_perp)):
            raise MoleculeFileError(f"alpha table columns have unequal lengths (molecule {self.name!r})")
        diffs = np.diff(self.nu_grid)
        if not np.all(diffs > 0):
            raise MoleculeFileError(
                f"alpha table frequency grid must be strictly increasing (molecule {self.name!r})"
            )

    @property
    def b_ghz(self) -> float:
        return self.b_mhz / 1e3

    def beta(self, e_dc_kv_cm: float) -> float:
        """Dimensionless Stark parameter d*E/B."""
        return self.d00_debye * e_dc_kv_cm * DEBYE_KVCM_TO_MHZ / self.b_mhz

    def field_for_beta(self, beta: float) -> float:
        """DC field in kV/cm at which d*E/B equals ``beta``."""
        return beta * self.b_mhz / (self.d00_debye * DEBYE_KVCM_TO_MHZ)


@dataclass(frozen=True)
class FieldConfig:
    """DC field + laser context. ``polarization`` is a PolarizationVector."""

    e_dc_kv_cm: float
    nu_cm: float
    polarization: object
    intensity_w_cm2: float | None = None

    def __post_init__(self):
        if self.e_dc_kv_cm < 0:
            raise ValueError("E_dc must be >= 0")
        if not self.nu_cm > 0:
            raise ValueError("nu must be > 0")


_BUNDLED = {"krb": "krb.molecule", "rbcs": "rbcs.molecule"}


def bundled_molecule_names() -> list:
    return ["KRb", "RbCs"]


def _parse_molecule_text(text: str, origin: str) -> MoleculeSpec:
    name = None
    b_ghz = None
    d00 = None
    nus, pars, perps = [], [], []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if line.startswith("alpha:"):
            parts = line[len("alpha:"):].split()
            if len(parts) != 3:
                raise MoleculeFileError(
                    f"{origin}:{lineno}: alpha line needs 3 numbers (nu, alpha_par, alpha_perp)"
                )
            try:
                nu, par, perp = (float(p) for p in parts)
            except ValueError:
                raise MoleculeFileError(f"{origin}:{lineno}: alpha line is not numeric") from None
            nus.append(nu)
            pars.append(par)
            perps.append(perp)
            continue
        try:
            key, value = line.split(None, 1)
        except ValueError:
            raise MoleculeFileError(f"{origin}:{lineno}: expected 'key value'") from None
        if key == "name":
            name = value.strip()
        elif key == "B_GHz":
            try:
                b_ghz = float(value)
            except ValueError:
                raise MoleculeFileError(f"{origin}:{lineno}: B_GHz is not numeric") from None
        elif key == "d00_debye":
            try:
                d00 = float(value)
            except ValueError:
                raise MoleculeFileError(f"{origin}:{lineno}: d00_debye is not numeric") from None
        else:
            raise MoleculeFileError(f"{origin}:{lineno}: unknown key {key!r}")
    for field_name, val in (("name", name), ("B_GHz", b_ghz), ("d00_debye", d00)):
        if val is None:
            raise MoleculeFileError(f"{origin}: missing required key {field_name!r}")
    return MoleculeSpec(
        name=name,
        b_mhz=b_ghz * 1e3,
        d00_debye=d00,
        nu_grid=tuple(nus),
        alpha_par=tuple(pars),
        alpha_perp=tuple(perps),
    )


def load_molecule(name_or_path) -> MoleculeSpec:
    """Load a MoleculeSpec from a bundled name ("KRb", "RbCs") or a file path.

    Bundled names are resolved first, case-insensitively; anything else is
    treated as a path. Raises MoleculeFileError on parse or invariant
    failures, FileNotFoundError if the path does not exist.
    """
    key = str(name_or_path).lower()
    if key in _BUNDLED:
        text = resources.files("magictrap").joinpath("data", _BUNDLED[key]).read_text()
        return _parse_molecule_text(text, origin=f"bundled:{key}")
    path = Path(name_or_path)
    return _parse_molecule_text(path.read_text(), origin=str(path))


def alpha_lambda_at(spec: MoleculeSpec, nu_cm: float):
    """(alpha_parallel, alpha_perp) in a.u. at wavenumber ``nu_cm``.

    Linear interpolation on the molecule's table, exact at the nodes. Raises
    ValueError outside the tabulated range (no extrapolation).
    """
    grid = spec.nu_grid
    if not (grid[0] <= nu_cm <= grid[-1]):
        raise ValueError(
            f"nu = {nu_cm} cm^-1 outside the tabulated range "
            f"[{grid[0]}, {grid[-1]}] for molecule {spec.name!r}"
        )
    par = float(np.interp(nu_cm, grid, spec.alpha_par))
    perp = float(np.interp(nu_cm, grid, spec.alpha_perp))
    return par, perp
