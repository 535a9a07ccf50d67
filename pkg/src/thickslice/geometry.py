"""Slice-grid generation and the triangular slice-sensitivity weight.

These are the two pure geometric primitives everything else builds on:
where the simulated thick slices sit, and how much each thin slice at
location ``l`` contributes to a thick slice centered at ``p``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

# Candidate locations may overshoot the grid end by this much (relative to
# the span) and are still kept; guards against dropping the final slice to
# floating rounding when (end - start) is an exact multiple of the increment.
END_TOLERANCE = 1e-9


@dataclass(frozen=True)
class SliceGrid:
    """Target slice locations: start, end, and a positive increment.

    ``end`` may be smaller than ``start``; direction is inferred.
    """

    start_mm: float
    end_mm: float
    increment_mm: float

    def __post_init__(self):
        if not (math.isfinite(self.start_mm) and math.isfinite(self.end_mm)):
            raise ValueError("grid start/end must be finite")
        if not (math.isfinite(self.increment_mm) and self.increment_mm > 0):
            raise ValueError(f"increment_mm must be > 0, got {self.increment_mm}")


@dataclass(frozen=True)
class SliceProfile:
    """Triangular slice-sensitivity profile of half-width ``thickness_mm``.

    The weight peaks at 1 when a thin slice coincides with the target
    location and falls linearly to 0 at a distance of one thickness.
    """

    thickness_mm: float

    def __post_init__(self):
        if not (math.isfinite(self.thickness_mm) and self.thickness_mm > 0):
            raise ValueError(f"thickness_mm must be > 0, got {self.thickness_mm}")


def slice_locations(grid: SliceGrid) -> list[float]:
    """Locations start, start + d, start + 2d, ... inside [start, end].

    A degenerate grid (start == end) yields the single location ``start``
    even when the increment would overshoot. The end point is included only
    when it is reached exactly (within END_TOLERANCE of the span). Locations
    are generated as start + k*direction*increment from integer k, never by
    repeated addition, so they carry no accumulated rounding.
    """
    s, e, d = grid.start_mm, grid.end_mm, grid.increment_mm
    if s == e:
        return [s]
    direction = 1.0 if e > s else -1.0
    span = abs(e - s)
    tol = END_TOLERANCE * max(1.0, span)
    count = int(math.floor((span + tol) / d)) + 1
    return [s + k * direction * d for k in range(count)]


def triangular_weight(p: float, l: float, profile: SliceProfile) -> float:
    """max(0, 1 - |p - l| / thickness); symmetric in (p, l), in [0, 1]."""
    return max(0.0, 1.0 - abs(p - l) / profile.thickness_mm)


def triangular_weights(
    p: float, locations: np.ndarray, profile: SliceProfile
) -> np.ndarray:
    """Vectorized ``triangular_weight`` over an array of thin locations."""
    w = 1.0 - np.abs(p - np.asarray(locations, dtype=np.float64)) / profile.thickness_mm
    return np.maximum(0.0, w)
