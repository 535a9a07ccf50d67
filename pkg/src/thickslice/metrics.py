"""Image-quality metrics, mean+-std aggregation, and the Wilcoxon signed-rank test.

PSNR/RMSE follow the usual definitions: MSE is the mean of squared
differences over all elements, RMSE its square root, and
PSNR = 20*log10(max_i / RMSE), which is +inf for identical inputs. The
infinity is carried as ``math.inf`` and serialized as the string "inf".

The signed-rank test drops zero differences, ranks |d| with mid-ranks for
ties, and takes W = min(W+, W-). The two-sided p-value comes from exact
enumeration of all sign assignments when at most EXACT_LIMIT nonzero
differences remain, and from a normal approximation with tie and continuity
corrections otherwise.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import AllZeroDifferencesError, ShapeMismatchError
from .volume import Volume

# Largest n for which the exact null distribution is enumerated.
EXACT_LIMIT = 25


@dataclass(frozen=True)
class MetricSample:
    """PSNR/RMSE for one prediction/reference pair."""

    pair_id: str
    psnr_db: float  # math.inf when rmse == 0
    rmse: float

    def __post_init__(self):
        if self.rmse < 0:
            raise ValueError("rmse must be >= 0")
        if (self.rmse == 0) != math.isinf(self.psnr_db):
            raise ValueError("psnr must be finite exactly when rmse > 0")


@dataclass(frozen=True)
class MetricSummary:
    """Mean +- population standard deviation over n finite samples.

    ``n_excluded`` counts non-finite samples (infinite PSNR from perfect
    reconstructions) dropped from the aggregate.
    """

    metric_name: str
    mean: float
    std: float
    n: int
    n_excluded: int = 0


class WilcoxonMode(Enum):
    EXACT = "exact"
    NORMAL_APPROX = "normal_approx"


@dataclass(frozen=True)
class WilcoxonResult:
    w_statistic: float
    p_value: float
    n_effective: int
    mode: WilcoxonMode


def _as_float_arrays(a, b) -> tuple[np.ndarray, np.ndarray]:
    x = np.asarray(a, dtype=np.float64)
    y = np.asarray(b, dtype=np.float64)
    if x.shape != y.shape:
        raise ShapeMismatchError(f"shape {x.shape} vs {y.shape}")
    return x, y


def mse(a, b) -> float:
    """Mean of squared differences over all elements (volumes flatten)."""
    x, y = _as_float_arrays(a, b)
    return float(np.mean((x - y) ** 2))


def rmse(a, b) -> float:
    return math.sqrt(mse(a, b))


def psnr_from_rmse(rmse_value: float, max_i: float) -> float:
    if max_i <= 0:
        raise ValueError(f"max_i must be > 0, got {max_i}")
    if rmse_value == 0:
        return math.inf
    return 20.0 * math.log10(max_i / rmse_value)


def psnr(a, b, max_i: float) -> float:
    """20*log10(max_i / rmse); +inf when the inputs are identical."""
    return psnr_from_rmse(rmse(a, b), max_i)


def summarize(samples, metric_name: str = "") -> MetricSummary:
    """Arithmetic mean and population (1/n) std; non-finite samples excluded."""
    values = [float(s) for s in samples]
    finite = [v for v in values if math.isfinite(v)]
    n_excluded = len(values) - len(finite)
    if not finite:
        raise ValueError("no finite samples to summarize")
    arr = np.asarray(finite, dtype=np.float64)
    return MetricSummary(
        metric_name=metric_name,
        mean=float(arr.mean()),
        std=float(arr.std(ddof=0)),
        n=len(finite),
        n_excluded=n_excluded,
    )


def _midranks(values: np.ndarray) -> np.ndarray:
    """Ranks 1..n with tied values sharing the mean of their rank range."""
    order = np.argsort(values, kind="stable")
    ranks = np.empty(len(values), dtype=np.float64)
    sorted_vals = values[order]
    i = 0
    while i < len(values):
        j = i
        while j + 1 < len(values) and sorted_vals[j + 1] == sorted_vals[i]:
            j += 1
        ranks[order[i : j + 1]] = 0.5 * (i + j) + 1.0
        i = j + 1
    return ranks


def _exact_two_sided_p(ranks: np.ndarray, w: float) -> float:
    """P[W+ <= w] doubled, from the exact sign-flip null distribution.

    Mid-ranks are half-integers, so ranks are doubled to integers and the
    distribution of 2*W+ is built by dynamic programming; counts stay well
    below 2**53 for n <= EXACT_LIMIT, so float64 counting is exact.
    """
    doubled = np.rint(2.0 * ranks).astype(np.int64)
    total = int(doubled.sum())
    counts = np.zeros(total + 1, dtype=np.float64)
    counts[0] = 1.0
    for r in doubled:
        shifted = np.zeros_like(counts)
        shifted[r:] = counts[: total + 1 - r]
        counts += shifted
    w2 = int(math.floor(2.0 * w + 1e-9))
    cdf = counts[: w2 + 1].sum() / 2.0 ** len(ranks)
    return min(1.0, 2.0 * cdf)


def _normal_two_sided_p(ranks: np.ndarray, w: float, n: int) -> float:
    """Normal approximation with tie correction and continuity correction."""
    mean_w = n * (n + 1) / 4.0
    variance = n * (n + 1) * (2 * n + 1) / 24.0
    _, tie_counts = np.unique(ranks, return_counts=True)
    variance -= float(np.sum(tie_counts**3 - tie_counts)) / 48.0
    if variance <= 0:
        return 1.0
    z = (w - mean_w + 0.5) / math.sqrt(variance)
    p = math.erfc(-z / math.sqrt(2.0))  # 2 * Phi(z) for the lower tail
    return min(1.0, p)


def wilcoxon_signed_rank(x, y) -> WilcoxonResult:
    """Two-sided paired signed-rank test of x against y.

    Zero differences are dropped (Wilcoxon's treatment, not Pratt's);
    raises AllZeroDifferencesError when every pair is identical.
    """
    xa = np.asarray(x, dtype=np.float64)
    ya = np.asarray(y, dtype=np.float64)
    if xa.shape != ya.shape or xa.ndim != 1:
        raise ShapeMismatchError(f"paired samples must be equal-length 1-D: {xa.shape} vs {ya.shape}")
    if xa.size < 1:
        raise ValueError("need at least one pair")
    diffs = xa - ya
    diffs = diffs[diffs != 0.0]
    n = diffs.size
    if n == 0:
        raise AllZeroDifferencesError("all paired differences are zero")
    ranks = _midranks(np.abs(diffs))
    w_plus = float(ranks[diffs > 0].sum())
    w_minus = float(ranks[diffs < 0].sum())
    w = min(w_plus, w_minus)
    if n <= EXACT_LIMIT:
        p = _exact_two_sided_p(ranks, w)
        mode = WilcoxonMode.EXACT
    else:
        p = _normal_two_sided_p(ranks, w, n)
        mode = WilcoxonMode.NORMAL_APPROX
    return WilcoxonResult(w_statistic=w, p_value=p, n_effective=n, mode=mode)


def evaluate_pair(pred: Volume, ref: Volume, max_i: float, pair_id: str = "") -> MetricSample:
    """PSNR/RMSE over the full voxel sets of two aligned volumes."""
    if pred.shape != ref.shape:
        raise ShapeMismatchError(f"volume shapes differ: {pred.shape} vs {ref.shape}")
    r = rmse(pred.voxels, ref.voxels)
    return MetricSample(pair_id=pair_id, psnr_db=psnr_from_rmse(r, max_i), rmse=r)


def per_slice_metrics(
    pred: Volume, ref: Volume, max_i: float
) -> list[tuple[float, float]]:
    """(rmse, psnr) per aligned slice pair, in slice order."""
    if pred.shape != ref.shape:
        raise ShapeMismatchError(f"volume shapes differ: {pred.shape} vs {ref.shape}")
    out = []
    for i in range(pred.n_slices):
        r = rmse(pred.voxels[i], ref.voxels[i])
        out.append((r, psnr_from_rmse(r, max_i)))
    return out
