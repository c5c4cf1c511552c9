"""Signature-chamber integrals of Hermitian pencils and Morse-type
spectral density bounds for CR line bundles."""

from __future__ import annotations

from .errors import (
    CalibrationError,
    ChamberBoundaryError,
    CRMorseError,
    DegeneratePencilError,
    InputError,
    ZeroExtremalMassError,
)
from .pencil import (
    IDENTICALLY_ZERO,
    Chamber,
    ChamberDecomposition,
    HermitianMatrix,
    Inertia,
    RealPolynomial,
    chamber_integral,
    chambers,
    inertia,
    pencil_char_poly,
    pencil_signed_integral,
    real_roots,
    signature_set,
)
from .morse import (
    Bigness,
    MorseReport,
    PencilField,
    PencilPoint,
    Positivity,
    XqResult,
    bigness_verdict,
    build_morse_report,
    check_Xq,
    classify_bundle,
    density_q,
    rrh_total,
    strong_sums,
    weak_bound,
)
from .model import (
    BergmanValue,
    EtaChamberSet,
    ExtremalForm,
    ModelData,
    bergman_bruteforce,
    bergman_diag,
    eta_chambers,
    extremal_form,
    m_phi_eta,
    szego_density,
)
from .oracles import (
    HeisenbergSpec,
    LatticeCalibration,
    TorusBundleSpec,
    calibrate,
    calibrate_weight,
    d1_fourier_bruteforce,
    fourier_dimension_sum,
    heisenberg_field,
    levi_flat_field,
    load_calibration,
    save_calibration,
    torus_bundle_field,
    torus_mode_dim,
    verify_calibration,
)
from .cli import parse_field, run, serialize_field

__version__ = "1.0.0"

__all__ = [
    "Bigness",
    "BergmanValue",
    "CalibrationError",
    "Chamber",
    "ChamberBoundaryError",
    "ChamberDecomposition",
    "CRMorseError",
    "DegeneratePencilError",
    "EtaChamberSet",
    "ExtremalForm",
    "HeisenbergSpec",
    "HermitianMatrix",
    "IDENTICALLY_ZERO",
    "Inertia",
    "InputError",
    "LatticeCalibration",
    "ModelData",
    "MorseReport",
    "PencilField",
    "PencilPoint",
    "Positivity",
    "RealPolynomial",
    "TorusBundleSpec",
    "XqResult",
    "ZeroExtremalMassError",
    "bergman_bruteforce",
    "bergman_diag",
    "bigness_verdict",
    "build_morse_report",
    "calibrate",
    "calibrate_weight",
    "chamber_integral",
    "chambers",
    "check_Xq",
    "classify_bundle",
    "d1_fourier_bruteforce",
    "density_q",
    "eta_chambers",
    "extremal_form",
    "fourier_dimension_sum",
    "heisenberg_field",
    "inertia",
    "levi_flat_field",
    "load_calibration",
    "m_phi_eta",
    "parse_field",
    "pencil_char_poly",
    "pencil_signed_integral",
    "real_roots",
    "rrh_total",
    "run",
    "save_calibration",
    "serialize_field",
    "signature_set",
    "strong_sums",
    "szego_density",
    "torus_bundle_field",
    "torus_mode_dim",
    "verify_calibration",
    "weak_bound",
]
