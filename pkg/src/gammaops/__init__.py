"""Operator pairs on the symmetrized bidisc.

Validation, fundamental operators, automorphism transport, characteristic
functions, truncated functional models, and a complete unitary invariant
for pure commuting pairs, plus a JSON command line front end.
"""

__version__ = "0.1.0"

from .exceptions import (
    DimensionMismatch,
    GammaOpsError,
    NotCommuting,
    NotContraction,
    NotHermitian,
    NotIntertwining,
    NotInvertible,
    NotNormal,
    NotPSD,
    NotPure,
    NumericalContractBreach,
    OutsideLambdaP,
    PairFileError,
    ReductionFailure,
    SingularDenominator,
    SingularResolvent,
    TriangularizationFailure,
    TruncationCapExceeded,
)
from .gamma_domain import (
    DiscAutomorphism,
    Region,
    SymPoint,
    classify_point,
    eval_matrix_sym_poly,
    eval_sym_poly,
    mobius_point,
    roots_of_sym_point,
    sup_norm_on_gamma,
    sup_norm_on_gamma_refined,
)
from .gamma_pair import (
    CnuSplit,
    GammaPair,
    PairFlags,
    VnProbeReport,
    cnu_split,
    is_gamma_unitary,
    is_pure,
    random_gamma_unitary,
    random_pure_gamma,
    symmetrized_pair,
    validate,
    vn_probe,
)
from .fundamental import (
    DefectData,
    FundamentalPair,
    check_pf_intertwining,
    defect,
    defect_pair,
    scalar_fundamental,
    solve_fundamental,
)
from .mobius import (
    TransportResult,
    resolvent_condition,
    transport_crosscheck,
    transport_fundamental,
    transport_pair,
)
from .charfn import (
    CharFn,
    CoincidenceResult,
    coincide_check,
    default_coincidence_grid,
    kernel_identity_residual,
    theta_at,
    theta_coeffs,
    theta_series_at,
    toeplitz_mult,
)
from .model import (
    ModelData,
    auto_truncation,
    embed_w,
    fstar_defect_identity_residual,
    model_operators,
    model_space,
    verify_model,
)
from .invariant import (
    EquivalenceReport,
    ScreenResult,
    SearchResult,
    Witness,
    induced_defect_unitary,
    search_witness,
    trace_word_screen,
    unitarity_defect,
    verify_equivalence,
    witness_from_ambient,
)

__all__ = [
    "__version__",
    "GammaOpsError", "DimensionMismatch", "NotHermitian", "NotPSD",
    "NotNormal", "NotCommuting", "NotContraction", "NotPure",
    "SingularDenominator", "SingularResolvent", "NotInvertible",
    "OutsideLambdaP", "ReductionFailure", "TruncationCapExceeded",
    "NotIntertwining", "TriangularizationFailure", "NumericalContractBreach",
    "PairFileError",
    "Region", "SymPoint", "DiscAutomorphism", "roots_of_sym_point",
    "classify_point", "mobius_point", "eval_sym_poly", "eval_matrix_sym_poly",
    "sup_norm_on_gamma", "sup_norm_on_gamma_refined",
    "GammaPair", "PairFlags", "VnProbeReport", "CnuSplit", "validate",
    "symmetrized_pair", "is_pure", "is_gamma_unitary", "vn_probe",
    "cnu_split", "random_pure_gamma", "random_gamma_unitary",
    "DefectData", "FundamentalPair", "defect", "defect_pair",
    "solve_fundamental", "check_pf_intertwining", "scalar_fundamental",
    "TransportResult", "transport_pair", "transport_fundamental",
    "transport_crosscheck", "resolvent_condition",
    "CharFn", "CoincidenceResult", "theta_coeffs", "theta_at",
    "theta_series_at", "toeplitz_mult", "kernel_identity_residual",
    "coincide_check", "default_coincidence_grid",
    "ModelData", "auto_truncation", "embed_w", "model_space",
    "model_operators", "verify_model", "fstar_defect_identity_residual",
    "Witness", "EquivalenceReport", "ScreenResult", "SearchResult",
    "induced_defect_unitary", "witness_from_ambient", "verify_equivalence",
    "trace_word_screen", "search_witness", "unitarity_defect",
]
