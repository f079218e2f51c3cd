"""confreg: confidence-region estimators on a pivot band, and their evaluation.

The package builds region estimators from the uniform pivot U(y; theta) =
F_theta(y), measures their frequentist coverage and expected size (closed
form where available, seeded Monte Carlo everywhere), and demonstrates that
matching the nominal coverage does not pin down a good estimator: a
band-inversion rule on a two-point Gaussian model is dominated by a
disjoint-acceptance-set rule with identical coverage.
"""

from .config import (
    EstimatorSpec,
    ExperimentConfig,
    ModelSpec,
    SweepSpec,
    config_from_mapping,
    load_config_file,
)
from .evaluation import (
    CheckResult,
    CoverageEntry,
    DominanceVerdict,
    MarginEntry,
    RegimeCheck,
    SizeEntry,
    bayes_miscoverage_study,
    coverage,
    cross_acceptance_mass,
    dominance,
    expected_size,
    regime_check,
    reproduce_counterexample,
    sweep_rows,
)
from .exceptions import (
    BracketError,
    ConfigError,
    ConfregError,
    DegenerateEvidenceError,
    DomainError,
    InfeasibleConstructionError,
    ParameterError,
)
from .intervals import RealSet
from .models import (
    FiniteParameterSpace,
    GaussianLocationModel,
    RealLineParameterSpace,
    TwoPointGaussianModel,
)
from .regions import (
    AcceptanceRule,
    BayesCredibleEstimator,
    DegenerateEstimator,
    FiducialEstimator,
    FiducialIntervalEstimator,
    FiniteRegion,
    FlatPriorIntervalEstimator,
    ImprovedEstimator,
    IntervalRegion,
    RegionSpec,
    band_acceptance_sets,
    bayes_credible_region,
    bayes_posterior,
    bayes_posterior_array,
    check_delta,
    degenerate_region,
    fiducial_acceptance_sets,
    fiducial_region,
    flat_prior_location_interval,
    improved_acceptance_sets,
    rule_region,
)
from .specfun import (
    RandomStream,
    find_root,
    gaussian_cdf,
    gaussian_quantile,
    integrate_density,
    open_unit,
)

__version__ = "0.1.0"

__all__ = [
    "AcceptanceRule",
    "BayesCredibleEstimator",
    "BracketError",
    "CheckResult",
    "ConfigError",
    "ConfregError",
    "CoverageEntry",
    "DegenerateEstimator",
    "DegenerateEvidenceError",
    "DominanceVerdict",
    "DomainError",
    "EstimatorSpec",
    "ExperimentConfig",
    "FiducialEstimator",
    "FiducialIntervalEstimator",
    "FiniteParameterSpace",
    "FiniteRegion",
    "FlatPriorIntervalEstimator",
    "GaussianLocationModel",
    "ImprovedEstimator",
    "InfeasibleConstructionError",
    "IntervalRegion",
    "MarginEntry",
    "ModelSpec",
    "ParameterError",
    "RandomStream",
    "RealLineParameterSpace",
    "RealSet",
    "RegimeCheck",
    "RegionSpec",
    "SizeEntry",
    "SweepSpec",
    "TwoPointGaussianModel",
    "band_acceptance_sets",
    "bayes_credible_region",
    "bayes_miscoverage_study",
    "bayes_posterior",
    "bayes_posterior_array",
    "check_delta",
    "config_from_mapping",
    "coverage",
    "cross_acceptance_mass",
    "degenerate_region",
    "dominance",
    "expected_size",
    "fiducial_acceptance_sets",
    "fiducial_region",
    "find_root",
    "flat_prior_location_interval",
    "gaussian_cdf",
    "gaussian_quantile",
    "improved_acceptance_sets",
    "integrate_density",
    "load_config_file",
    "open_unit",
    "regime_check",
    "reproduce_counterexample",
    "rule_region",
    "sweep_rows",
]
