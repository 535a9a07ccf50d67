"""Thick-slice CT simulation, degradation baselines, metrics, and pair export."""

from .degrade import (
    DegradationSpec,
    DirectDownsampleSpec,
    GaussianAverageSpec,
    ProposedSpec,
    SimpleAverageSpec,
    degrade,
    simulate_direct_downsample,
    simulate_gaussian_average,
    simulate_simple_average,
    simulate_weighted_thick,
)
from .errors import (
    AllZeroDifferencesError,
    DimensionOverflowError,
    InPlaneMismatchError,
    Int16RangeError,
    NonUniformSpacingError,
    NoOverlapError,
    ParseError,
    ShapeMismatchError,
    ThickSliceError,
    TruncatedDataError,
    VolumeIOError,
    WindowTooLargeError,
    ZeroTotalWeightError,
)
from .geometry import SliceGrid, SliceProfile, slice_locations, triangular_weight
from .io import (
    HuWindow,
    VolumeHeader,
    align_volumes,
    normalize_hu,
    read_volume,
    write_volume,
)
from .metrics import (
    MetricSample,
    MetricSummary,
    WilcoxonMode,
    WilcoxonResult,
    evaluate_pair,
    mse,
    per_slice_metrics,
    psnr,
    psnr_from_rmse,
    rmse,
    summarize,
    wilcoxon_signed_rank,
)
from .phantom import (
    integrate_slice_profile,
    make_fine_phantom,
    make_phantom_acquisitions,
)
from .volume import IntensityDomain, Volume

__version__ = "0.1.0"

__all__ = [
    "AllZeroDifferencesError",
    "DegradationSpec",
    "DimensionOverflowError",
    "DirectDownsampleSpec",
    "GaussianAverageSpec",
    "HuWindow",
    "InPlaneMismatchError",
    "Int16RangeError",
    "IntensityDomain",
    "MetricSample",
    "MetricSummary",
    "NonUniformSpacingError",
    "NoOverlapError",
    "ParseError",
    "ProposedSpec",
    "ShapeMismatchError",
    "SimpleAverageSpec",
    "SliceGrid",
    "SliceProfile",
    "ThickSliceError",
    "TruncatedDataError",
    "Volume",
    "VolumeHeader",
    "VolumeIOError",
    "WilcoxonMode",
    "WilcoxonResult",
    "WindowTooLargeError",
    "ZeroTotalWeightError",
    "align_volumes",
    "degrade",
    "evaluate_pair",
    "integrate_slice_profile",
    "make_fine_phantom",
    "make_phantom_acquisitions",
    "mse",
    "normalize_hu",
    "per_slice_metrics",
    "psnr",
    "psnr_from_rmse",
    "read_volume",
    "rmse",
    "simulate_direct_downsample",
    "simulate_gaussian_average",
    "simulate_simple_average",
    "simulate_weighted_thick",
    "slice_locations",
    "summarize",
    "triangular_weight",
    "wilcoxon_signed_rank",
    "write_volume",
]
