"""High-dimension, low-sample-size PCA laboratory.

Covariance spectrum families with analytic sphericity classification, a
dual (Gram-matrix) PCA with population-angle diagnostics, the asymptotic
regime classifier for spiked spectra, and a seeded Monte Carlo harness that
checks the predictions at finite dimension.
"""

from .errors import (
    BoundaryUnsupportedError,
    ConfigError,
    ExperimentError,
    HdpcaError,
    InsufficientDataError,
    InvalidDimensionError,
    InvalidIndexError,
    InvalidMatrixError,
    RankDeficiencyError,
    UndefinedSphericityError,
    UnsupportedEigenvectorError,
    UnsupportedStructureError,
)
from .spectra import (
    BlockEquicorrelation,
    ConditionVerdict,
    CovarianceModel,
    EigenSpectrum,
    Equicorrelation,
    ExplicitDiagonal,
    ExponentialDecay,
    GrowingSpikes,
    Identity,
    MultiSpikeGroups,
    PolynomialDecay,
    PowerLawRho,
    SingleSpike,
    SphericityReport,
    condition_check,
    model_from_config,
    population_eigvec_inner,
    sphericity,
)
from .sampling import (
    DataMatrix,
    DistanceStats,
    NoiseSpec,
    SeedSpec,
    distance_stats,
    dump_data_matrix,
    load_data_matrix,
    sample_z,
    synthesize_x,
)
from .dual import (
    DualDecomposition,
    InnerProductRows,
    PrimalDirections,
    angle,
    dual_covariance,
    dual_decompose,
    eigendecompose,
    inner_products,
    recover_directions,
    scaled_dual_deviation,
    subspace_angle,
)
from .estimator import DualPCA
from .asymptotics import (
    ChiSqOverN,
    DirectionVerdict,
    EigenvalueLimit,
    RegimeVerdict,
    ScaledWishartEigen,
    SpikeGroup,
    SpikeStructure,
    TailConstant,
    TailSpec,
    classify,
    two_block_regime,
    predict_eigenvalue_limits,
    spike_structure_from_model,
    weyl_check,
)
from .harness import (
    AggregateReport,
    ExperimentPlan,
    KsResult,
    TrendDecision,
    ks_statistic,
    run_experiment,
    trend_verdict,
    verify_prediction,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
