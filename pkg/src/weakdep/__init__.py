"""weakdep: weakly dependent sequences, their dependence coefficients,
closed-form concentration bounds, and a seeded Monte Carlo verification
harness for the associated limit theorems."""

__version__ = "0.1.0"

from .blocks import BlockDecomposition, BlockScheme, TruncationSplit, block_scheme, clip, decompose, truncate_path
from .bounds import (
    BoundEvaluation,
    BoundParams,
    LaplaceCondition,
    RateSchedule,
    laplace_block_bound,
    named_inequalities,
    odd_sum_mgf_bound,
    slln_admissibility_onset,
    slln_schedule,
    tail_bound,
    truncated_second_moment_bound,
    unbounded_schedule,
)
from .coefficients import (
    FiniteGamma,
    GammaSequence,
    GeometricGamma,
    VarianceEstimate,
    cox_grimmett,
    empirical_covariance,
    gamma_from_json,
    gamma_sequence,
    gamma_to_json,
    long_run_variance,
    newman_discrepancy_bound,
    total_dependence,
)
from .models import (
    IID,
    CumSumTransform,
    GaussBumpPlusX,
    Identity,
    InnovationLaw,
    ModelSpec,
    MovingAverage,
    NegExp,
    QuadratureError,
    Rademacher,
    SamplePath,
    Transform,
    TruncatedGaussian,
    UniformOnInterval,
    almost_sure_bound,
    analytic_covariance,
    is_stationary,
    model_from_dict,
    model_from_json,
    model_to_dict,
    model_to_json,
    sample_path,
    transform_moments,
)
from .verify import (
    BOUND_INVALID,
    DOMINATED,
    VIOLATED,
    CltKsReport,
    EmpiricalProcessPath,
    MarginalTransform,
    MCConfig,
    PartialSumPath,
    PiecewiseLinear,
    QuasiAssociationReport,
    SllnRateFit,
    VerificationReport,
    check_lipschitz_cov,
    check_newman,
    check_quasi_association_counterexample,
    check_tail_domination,
    clip_function,
    clt_bias_allowance,
    clt_ks_distance,
    empirical_process_path,
    estimate_gamma_operator,
    fclt_increment_check,
    marginal_transform,
    partial_sum_path,
    slln_rate_fit,
)
