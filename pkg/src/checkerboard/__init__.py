"""Spectra of generalized checkerboard random matrices.

Sampling, regime classification, weighted blip measures, exact reference
values and a Monte Carlo experiment harness.
"""

from .blip import (
    AveragedBlipMeasure,
    BlipMeasure,
    WeightFunction,
    average_blip_measures,
    blip_measure,
    eval_weight,
    g_schedule,
    make_weight,
    n_schedule,
)
from .ensemble import (
    EnsembleSpec,
    EntryDist,
    GrowingSpec,
    build_z,
    sample_checkerboard,
    sample_fibonacci_matrix,
    sample_hollow_goe,
    z_spectrum_exact,
)
from .estimators import (
    BlipMomentEstimator,
    BulkMomentEstimator,
    CheckerboardSampler,
    RegimeClassifier,
    SpectrumTransformer,
)
from .exceptions import (
    CombinatorialBlowupError,
    EqualWeightsError,
    ExactModeTooLargeError,
    IncompatibleSpecsError,
    InvalidSpecError,
    MixedSpecsError,
    OverlappingRegimesError,
    ZeroPolynomialError,
    ZeroTargetError,
)
from .experiments import (
    ExperimentConfig,
    run_blip_moments,
    run_bulk,
    run_exact_identities,
    run_fibonacci,
    run_hollow_goe,
    run_independence,
    run_singleton_blip,
    run_split_count,
)
from .polynomials import MultiPoly, RationalPoly
from .reports import Report, Statistic, load_report, persist_report
from .spectral import (
    HistogramTable,
    RegimePartition,
    Spectrum,
    WeightedMeasure,
    bulk_measure,
    centered_moment,
    classify_regimes,
    eigenvalues,
    histogram,
    measure_moment,
    semicircle_moment,
    semicircle_radius,
)

__version__ = "0.1.0"
