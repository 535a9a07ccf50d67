"""Volume container: a 3-D voxel grid with explicit per-slice z locations.

Slice locations are kept as an explicit list rather than an origin/spacing
pair so that slice thickness != slice increment (e.g. 3 mm slices every
2 mm) and non-uniform grids are first-class.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Any, Mapping, Sequence

import numpy as np

from .errors import NonUniformSpacingError


class IntensityDomain(Enum):
    HU = "hu"
    NORMALIZED01 = "normalized01"


def _readonly_view(a: np.ndarray) -> np.ndarray:
    view = a.view()
    view.setflags(write=False)
    return view


@dataclass(frozen=True)
class Volume:
    """Immutable 3-D scalar volume indexed (slice, row, col).

    Attributes:
        voxels: 3-D array; axis 0 runs along z in the order of
            ``slice_locations_mm``.
        pixel_spacing_mm: in-plane (row, col) spacing, both > 0.
        slice_locations_mm: z location of each slice, strictly monotonic
            (increasing or decreasing, matching acquisition direction).
        intensity_domain: HU or values normalized into [0, 1].
        provenance: optional metadata describing how the volume was produced
            (method, parameters); carried along, never validated.
    """

    voxels: np.ndarray
    pixel_spacing_mm: tuple[float, float]
    slice_locations_mm: tuple[float, ...]
    intensity_domain: IntensityDomain = IntensityDomain.HU
    provenance: Mapping[str, Any] | None = field(default=None, compare=False)

    def __post_init__(self):
        vox = np.asarray(self.voxels)
        if vox.ndim != 3:
            raise ValueError(f"voxels must be 3-D, got ndim={vox.ndim}")
        locs = tuple(float(x) for x in self.slice_locations_mm)
        if len(locs) != vox.shape[0]:
            raise ValueError(
                f"{len(locs)} slice locations for {vox.shape[0]} slices"
            )
        if not all(np.isfinite(locs)):
            raise ValueError("slice locations must be finite")
        if len(locs) > 1:
            diffs = np.diff(locs)
            if not (np.all(diffs > 0) or np.all(diffs < 0)):
                raise ValueError("slice locations must be strictly monotonic")
        spacing = tuple(float(s) for s in self.pixel_spacing_mm)
        if len(spacing) != 2 or spacing[0] <= 0 or spacing[1] <= 0:
            raise ValueError(f"pixel spacing must be two positive reals, got {spacing}")
        if not np.isfinite(vox).all():
            raise ValueError("voxel values must be finite")
        if self.intensity_domain is IntensityDomain.NORMALIZED01:
            lo, hi = float(vox.min(initial=0.0)), float(vox.max(initial=0.0))
            if vox.size and (lo < 0.0 or hi > 1.0):
                raise ValueError(
                    f"normalized volume has values outside [0, 1]: [{lo:g}, {hi:g}]"
                )
        object.__setattr__(self, "voxels", _readonly_view(vox))
        object.__setattr__(self, "pixel_spacing_mm", spacing)
        object.__setattr__(self, "slice_locations_mm", locs)

    @property
    def n_slices(self) -> int:
        return self.voxels.shape[0]

    @property
    def shape(self) -> tuple[int, int, int]:
        return self.voxels.shape

    def uniform_slice_spacing_mm(self, rel_tol: float = 1e-6) -> float:
        """Signed spacing between consecutive slices.

        Raises NonUniformSpacingError when consecutive increments differ by
        more than ``rel_tol`` relative to their mean magnitude, or when the
        volume has a single slice (spacing undefined).
        """
        locs = np.asarray(self.slice_locations_mm)
        if locs.size < 2:
            raise NonUniformSpacingError("spacing undefined for a single slice")
        diffs = np.diff(locs)
        mean = float(diffs.mean())
        if np.max(np.abs(diffs - mean)) > rel_tol * abs(mean):
            raise NonUniformSpacingError(
                f"slice increments vary beyond {rel_tol:g} relative tolerance"
            )
        return mean

    def with_voxels(
        self,
        voxels: np.ndarray,
        slice_locations_mm: Sequence[float] | None = None,
        intensity_domain: IntensityDomain | None = None,
        provenance: Mapping[str, Any] | None = None,
    ) -> "Volume":
        """Derived volume sharing this one's in-plane geometry."""
        return replace(
            self,
            voxels=voxels,
            slice_locations_mm=tuple(
                self.slice_locations_mm if slice_locations_mm is None
                else slice_locations_mm
            ),
            intensity_domain=(
                self.intensity_domain if intensity_domain is None else intensity_domain
            ),
            provenance=provenance,
        )
