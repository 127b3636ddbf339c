"""Magic trapping conditions for polar molecules in DC + laser fields.

Dressed rigid-rotor states, their dynamic polarizability tensors, and the
field strengths / polarization angles at which trap potentials of two
internal states coincide.
"""

__version__ = "0.1.0"

from .angular import c_tensor_element, f_factor, three_j
from .lattice import (
    BeamConfig,
    LatticePlan,
    SeparationOfScalesError,
    plan_paper_lattice,
    plan_to_json,
    validate_plan,
)
from .magic import (
    CrossingReport,
    DegenerateDifferenceError,
    MagicAngleReport,
    NoCrossingError,
    SweepGrid,
    find_magic_field,
    find_magic_fields,
    magic_angle,
    magic_field_polarization_invariance,
    sweep,
)
from .polarizability import (
    MAGIC_ANGLE_DEG,
    IrreducibleParts,
    PolarizabilityTensor,
    PolarizationVector,
    StarkShift,
    alpha_angle_scan,
    alpha_eff,
    alpha_tensor_branches,
    alpha_tensor_closed_form,
    alpha_tensor_sos,
    irreducible_decompose,
    stark_shift,
)
from .stark import (
    StarkBlock,
    StarkEigensystem,
    StateLabel,
    alignment,
    build_block,
    check_convergence,
    diagonalize,
    solve,
)
from .units import (
    AU_POL_TO_MHZ_PER_W_CM2,
    DEBYE_KVCM_TO_MHZ,
    FieldConfig,
    IncompatibleUnitsError,
    MoleculeFileError,
    MoleculeSpec,
    Quantity,
    alpha_lambda_at,
    bundled_molecule_names,
    convert,
    load_molecule,
)

__all__ = [
    "__version__",
    "three_j", "c_tensor_element", "f_factor",
    "Quantity", "convert", "IncompatibleUnitsError",
    "MoleculeSpec", "MoleculeFileError", "FieldConfig",
    "load_molecule", "bundled_molecule_names", "alpha_lambda_at",
    "DEBYE_KVCM_TO_MHZ", "AU_POL_TO_MHZ_PER_W_CM2",
    "StateLabel", "StarkBlock", "StarkEigensystem",
    "build_block", "diagonalize", "solve", "alignment", "check_convergence",
    "PolarizationVector", "PolarizabilityTensor", "IrreducibleParts", "StarkShift",
    "alpha_tensor_closed_form", "alpha_tensor_branches", "alpha_tensor_sos",
    "alpha_eff", "stark_shift", "irreducible_decompose", "alpha_angle_scan",
    "MAGIC_ANGLE_DEG",
    "SweepGrid", "CrossingReport", "MagicAngleReport",
    "NoCrossingError", "DegenerateDifferenceError",
    "sweep", "find_magic_field", "find_magic_fields",
    "magic_field_polarization_invariance", "magic_angle",
    "BeamConfig", "LatticePlan", "SeparationOfScalesError",
    "plan_paper_lattice", "validate_plan", "plan_to_json",
]
