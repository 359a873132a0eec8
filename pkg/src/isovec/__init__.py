"""Discrete isotropic vector systems: construction, reduction, selection,
enclosing-ellipsoid extraction, and parallelotope volume statistics."""

from .bounds import (
    LogValue,
    dr_volume_bound,
    gamma,
    gamma_asymptotic_additive,
    gamma_asymptotic_linear,
    gamma_exact,
    m_bar,
    p1_exact,
)
from .linalg import Projector, det, project_out, psd_sqrt, sym_outer
from .montecarlo import (
    DiscreteSampler,
    ExperimentRecord,
    GaussianSampler,
    SphereSampler,
    estimate_expected_det2,
    exact_expected_det2,
    tail_exact,
    tail_probability,
)
from .mvee import ConvergenceError, DegenerateInputError, MveeResult, john_from_points, solve_central_mvee
from .reduction import AffineDependence, affine_dependence, lift_centered, reduce_centered, reduce_isotropic
from .selection import SelectionCertificate, best_subset, dr_select
from .systems import (
    DiscreteMeasure,
    IsotropyReport,
    WeightedVectorSystem,
    check,
    generate,
    load,
    save,
    to_measure,
)

__version__ = "0.1.0"

__all__ = [
    "LogValue",
    "dr_volume_bound",
    "gamma",
    "gamma_asymptotic_additive",
    "gamma_asymptotic_linear",
    "gamma_exact",
    "m_bar",
    "p1_exact",
    "Projector",
    "det",
    "project_out",
    "psd_sqrt",
    "sym_outer",
    "DiscreteSampler",
    "ExperimentRecord",
    "GaussianSampler",
    "SphereSampler",
    "estimate_expected_det2",
    "exact_expected_det2",
    "tail_exact",
    "tail_probability",
    "ConvergenceError",
    "DegenerateInputError",
    "MveeResult",
    "john_from_points",
    "solve_central_mvee",
    "AffineDependence",
    "affine_dependence",
    "lift_centered",
    "reduce_centered",
    "reduce_isotropic",
    "SelectionCertificate",
    "best_subset",
    "dr_select",
    "DiscreteMeasure",
    "IsotropyReport",
    "WeightedVectorSystem",
    "check",
    "generate",
    "load",
    "save",
    "to_measure",
    "__version__",
]
