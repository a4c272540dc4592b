"""Compressive classification of Gaussian mixture sources.

Library + CLI covering: measurement kernels (random and diversity
optimized), the MAP classifier on noisy projections, pairwise and union
misclassification bounds with their low- and high-noise asymptotics, and
seeded Monte Carlo SNR sweeps.
"""

from .bounds import (
    ERROR_FLOOR,
    EXPONENTIAL_DECAY,
    POLYNOMIAL_DECAY,
    AsymptoteFit,
    AsymptoticProfile,
    HighNoiseExpansion,
    asymptotic_pair,
    asymptotic_pair_source,
    averaged_high_noise,
    bhattacharyya_exponent,
    fit_asymptote,
    high_noise_pair,
    multiclass_asymptotics,
    pair_upper_bound,
    union_upper_bound,
)
from .classifier import MapClassifier, NoisyObservation, classify, log_posteriors
from .linalg import (
    DEFAULT_TOL,
    SubspaceBasis,
    complement_basis_within,
    effective_rank,
    image_basis,
    independent_row_select,
    null_space_basis,
    pseudo_det,
    psd_sqrt_factor,
    random_orthogonal,
)
from .measurement import (
    DesignImpossibleError,
    DesignProvenance,
    EmptyDesignError,
    ExplicitProvenance,
    MeasurementKernel,
    ProjectedPairGeometry,
    RandomProvenance,
    design_multi_nonzero_mean,
    design_multi_zero_mean,
    design_two_nonzero_mean,
    design_two_zero_mean,
    mean_aligned_kernel,
    projected_pair_geometry,
    random_gaussian_kernel,
)
from .montecarlo import (
    ErrorEstimate,
    SweepRecord,
    SweepResult,
    estimate_perr,
    oracle_perr_two_class,
    snr_sweep,
    wilson_interval,
)
from .scenarios import (
    ClassSpec,
    KernelSpec,
    ScenarioConfig,
    SnrGrid,
    build_kernel,
    build_source,
    built_in_scenarios,
    list_scenarios,
)
from .source import ClassModel, GmmSource, PairGeometry, pair_geometry, sample_labeled

__version__ = "0.1.0"
