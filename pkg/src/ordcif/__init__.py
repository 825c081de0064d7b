"""Order-restricted estimation and testing of cumulative incidence functions
for competing risks, with and without right censoring."""

from .core import (
    CifSet,
    Observation,
    Sample,
    StepFunction,
    build_sample,
    step_sup_diff,
    stieltjes_accumulate,
    stieltjes_integral,
)
from .errors import OrdcifError
from .estimators import (
    CumulativeHazard,
    SurvivalCurve,
    censored_cif,
    censoring_km,
    ecdf_cif,
    estimate_cifs,
    kaplan_meier,
    nelson_aalen,
)
from .htest import (
    OrderedTestResult,
    asymptotic_pvalue,
    ordered_test,
    std_normal_cdf,
    subtest_statistic,
)
from .inference import (
    Band,
    CovQuery,
    cov_censored_plugin,
    cov_uncensored,
    pointwise_ci,
    tighten_bands,
)
from .isotonic import (
    isotonic_project,
    kernel_backend,
    maxmin_reference,
    restrict_cifs,
)
from .simulate import (
    McReport,
    SimConfig,
    mc_consistency,
    mc_dominance,
    mc_fixed_t_limit,
    mc_null_distribution,
    simulate_sample,
    truth_cif,
)

__version__ = "0.1.0"

__all__ = [
    "Band",
    "CifSet",
    "CovQuery",
    "CumulativeHazard",
    "McReport",
    "Observation",
    "OrderedTestResult",
    "OrdcifError",
    "Sample",
    "SimConfig",
    "StepFunction",
    "SurvivalCurve",
    "__version__",
    "asymptotic_pvalue",
    "build_sample",
    "censored_cif",
    "censoring_km",
    "cov_censored_plugin",
    "cov_uncensored",
    "ecdf_cif",
    "estimate_cifs",
    "isotonic_project",
    "kaplan_meier",
    "kernel_backend",
    "maxmin_reference",
    "mc_consistency",
    "mc_dominance",
    "mc_fixed_t_limit",
    "mc_null_distribution",
    "nelson_aalen",
    "ordered_test",
    "pointwise_ci",
    "restrict_cifs",
    "simulate_sample",
    "std_normal_cdf",
    "step_sup_diff",
    "stieltjes_accumulate",
    "stieltjes_integral",
    "subtest_statistic",
    "tighten_bands",
    "truth_cif",
]
