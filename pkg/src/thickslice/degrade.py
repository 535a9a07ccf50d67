"""Thick-slice degradation engines.

The weighted-sum simulator models each thick slice as a triangular-profile
weighted average of whole thin slices, normalized by the total weight; the
three baselines reproduce the degradation families found in earlier work
(plain z-window averaging, Gaussian z-smoothing followed by decimation, and
direct slice decimation).

All engines are linear in voxel intensities, map constant volumes to the
same constant, and accumulate in float64 in ascending slice order so output
volumes are bit-reproducible. Output voxels are stored float32 regardless
of input storage.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from typing import Union

import numpy as np

from .errors import (
    NonUniformSpacingError,
    WindowTooLargeError,
    ZeroTotalWeightError,
)
from .geometry import SliceGrid, SliceProfile, slice_locations, triangular_weights
from .volume import Volume

# FWHM = 2*sqrt(2*ln 2) * sigma for a Gaussian, rounded as conventionally quoted.
FWHM_PER_SIGMA = 2.3548

# Gaussian kernel support: integer slice offsets k with |k| <= 4*sigma.
GAUSSIAN_TRUNCATE_SIGMAS = 4.0


@dataclass(frozen=True)
class ProposedSpec:
    """Triangular weighted-sum simulation onto an explicit or derived grid.

    Exactly one of ``grid`` and ``increment_mm`` must be given. With
    ``increment_mm`` the target grid is derived per volume at apply time:
    start/end at the thin volume's first/last slice location.
    """

    thickness_mm: float
    grid: SliceGrid | None = None
    increment_mm: float | None = None

    def __post_init__(self):
        if not (math.isfinite(self.thickness_mm) and self.thickness_mm > 0):
            raise ValueError(f"thickness_mm must be > 0, got {self.thickness_mm}")
        if (self.grid is None) == (self.increment_mm is None):
            raise ValueError("provide exactly one of grid or increment_mm")
        if self.increment_mm is not None and not (
            math.isfinite(self.increment_mm) and self.increment_mm > 0
        ):
            raise ValueError(f"increment_mm must be > 0, got {self.increment_mm}")


@dataclass(frozen=True)
class SimpleAverageSpec:
    """Arithmetic mean over consecutive windows of whole slices."""

    window_slices: int
    stride_slices: int

    def __post_init__(self):
        if self.window_slices < 1:
            raise ValueError(f"window_slices must be >= 1, got {self.window_slices}")
        if self.stride_slices < 1:
            raise ValueError(f"stride_slices must be >= 1, got {self.stride_slices}")


@dataclass(frozen=True)
class GaussianAverageSpec:
    """Gaussian z-blur (sigma from FWHM) followed by slice decimation."""

    fwhm_mm: float
    stride_slices: int

    def __post_init__(self):
        if not (math.isfinite(self.fwhm_mm) and self.fwhm_mm > 0):
            raise ValueError(f"fwhm_mm must be > 0, got {self.fwhm_mm}")
        if self.stride_slices < 1:
            raise ValueError(f"stride_slices must be >= 1, got {self.stride_slices}")


@dataclass(frozen=True)
class DirectDownsampleSpec:
    """Keep every stride-th slice starting at ``offset_slices``."""

    stride_slices: int
    offset_slices: int = 0

    def __post_init__(self):
        if self.stride_slices < 1:
            raise ValueError(f"stride_slices must be >= 1, got {self.stride_slices}")
        if self.offset_slices < 0:
            raise ValueError(f"offset_slices must be >= 0, got {self.offset_slices}")


DegradationSpec = Union[
    ProposedSpec, SimpleAverageSpec, GaussianAverageSpec, DirectDownsampleSpec
]


def simulate_weighted_thick(
    thin: Volume, grid: SliceGrid, profile: SliceProfile
) -> Volume:
    """Weighted sums of whole thin slices on the target grid.

    Each output slice at location p is sum_l w(p, l) * thin[l] / sum_l w(p, l)
    with the triangular weight w; zero-weight slices are skipped. Thin slice
    locations need not be uniform. Raises ZeroTotalWeightError when a target
    location has no thin slice within the profile support.
    """
    targets = slice_locations(grid)
    locs = np.asarray(thin.slice_locations_mm, dtype=np.float64)
    vox = np.asarray(thin.voxels, dtype=np.float64)
    out = np.empty((len(targets),) + thin.shape[1:], dtype=np.float32)
    for j, p in enumerate(targets):
        weights = triangular_weights(p, locs, profile)
        contributing = np.nonzero(weights)[0]
        if contributing.size == 0:
            raise ZeroTotalWeightError(p)
        acc = np.zeros(thin.shape[1:], dtype=np.float64)
        total = 0.0
        for i in contributing:
            w = float(weights[i])
            acc += w * vox[i]
            total += w
        out[j] = (acc / total).astype(np.float32)
    return thin.with_voxels(out, slice_locations_mm=targets)


def simulate_simple_average(thin: Volume, window: int, stride: int) -> Volume:
    """Mean of slices [j*stride, j*stride + window) for every full window.

    Output slice locations are the mean of the contributing locations,
    i.e. the window center (matching the middle-slice pairing convention).
    """
    if window < 1 or stride < 1:
        raise ValueError("window and stride must be >= 1")
    n = thin.n_slices
    if window > n:
        raise WindowTooLargeError(f"window {window} exceeds {n} slices")
    if n > 1:
        thin.uniform_slice_spacing_mm()
    locs = np.asarray(thin.slice_locations_mm, dtype=np.float64)
    vox = np.asarray(thin.voxels, dtype=np.float64)
    n_out = (n - window) // stride + 1
    out = np.empty((n_out,) + thin.shape[1:], dtype=np.float32)
    out_locs = []
    for j in range(n_out):
        lo = j * stride
        out[j] = vox[lo : lo + window].mean(axis=0).astype(np.float32)
        out_locs.append(float(locs[lo : lo + window].mean()))
    return thin.with_voxels(out, slice_locations_mm=out_locs)


def gaussian_kernel(sigma_slices: float) -> np.ndarray:
    """Unit-sum Gaussian sampled at integer slice offsets |k| <= 4*sigma."""
    if sigma_slices <= 0:
        return np.ones(1, dtype=np.float64)
    radius = int(math.floor(GAUSSIAN_TRUNCATE_SIGMAS * sigma_slices + 1e-12))
    k = np.arange(-radius, radius + 1, dtype=np.float64)
    kernel = np.exp(-0.5 * (k / sigma_slices) ** 2)
    return kernel / kernel.sum()


def simulate_gaussian_average(thin: Volume, fwhm_mm: float, stride: int) -> Volume:
    """Gaussian blur along z, then keep every stride-th slice from index 0.

    sigma_slices = (fwhm_mm / 2.3548) / dz; the kernel is truncated at
    +-4 sigma and renormalized. Boundaries mirror about the edge sample
    (no edge duplication). Requires >= 2 uniformly spaced slices.
    """
    if fwhm_mm <= 0:
        raise ValueError(f"fwhm_mm must be > 0, got {fwhm_mm}")
    if stride < 1:
        raise ValueError(f"stride must be >= 1, got {stride}")
    if thin.n_slices < 2:
        raise ValueError("gaussian averaging requires at least 2 slices")
    dz = abs(thin.uniform_slice_spacing_mm())
    sigma_slices = (fwhm_mm / FWHM_PER_SIGMA) / dz
    kernel = gaussian_kernel(sigma_slices)
    radius = (len(kernel) - 1) // 2
    vox = np.asarray(thin.voxels, dtype=np.float64)
    n = thin.n_slices
    if radius > 0:
        padded = _reflect_pad_z(vox, radius)
        blurred = np.zeros_like(vox)
        for j, w in enumerate(kernel):
            blurred += w * padded[j : j + n]
    else:
        blurred = vox
    out = blurred[::stride].astype(np.float32)
    out_locs = list(thin.slice_locations_mm[::stride])
    return thin.with_voxels(out, slice_locations_mm=out_locs)


def _reflect_pad_z(vox: np.ndarray, radius: int) -> np.ndarray:
    """Mirror padding along axis 0, folding as often as needed."""
    n = vox.shape[0]
    if radius < n:
        return np.pad(vox, ((radius, radius), (0, 0), (0, 0)), mode="reflect")
    idx = np.arange(-radius, n + radius)
    period = 2 * (n - 1) if n > 1 else 1
    idx = np.abs(idx) % period
    idx = np.where(idx >= n, period - idx, idx)
    return vox[idx]


def simulate_direct_downsample(thin: Volume, stride: int, offset: int = 0) -> Volume:
    """Slices at indices offset, offset + stride, ...; values unmodified."""
    if stride < 1:
        raise ValueError(f"stride must be >= 1, got {stride}")
    if not (0 <= offset < thin.n_slices):
        raise ValueError(
            f"offset {offset} out of range for {thin.n_slices} slices"
        )
    if thin.n_slices > 1:
        thin.uniform_slice_spacing_mm()
    out = np.asarray(thin.voxels[offset::stride], dtype=np.float32)
    out_locs = list(thin.slice_locations_mm[offset::stride])
    return thin.with_voxels(out, slice_locations_mm=out_locs)


def resolve_proposed_grid(thin: Volume, spec: ProposedSpec) -> SliceGrid:
    """The spec's grid, or one spanning the thin z-range at its increment."""
    if spec.grid is not None:
        return spec.grid
    return SliceGrid(
        start_mm=thin.slice_locations_mm[0],
        end_mm=thin.slice_locations_mm[-1],
        increment_mm=spec.increment_mm,
    )


def method_name(spec: DegradationSpec) -> str:
    return {
        ProposedSpec: "proposed",
        SimpleAverageSpec: "simple",
        GaussianAverageSpec: "gaussian",
        DirectDownsampleSpec: "downsample",
    }[type(spec)]


def degrade(thin: Volume, spec: DegradationSpec) -> Volume:
    """Apply one degradation method, recording provenance on the output."""
    if isinstance(spec, ProposedSpec):
        grid = resolve_proposed_grid(thin, spec)
        out = simulate_weighted_thick(thin, grid, SliceProfile(spec.thickness_mm))
        params = {
            "thickness_mm": spec.thickness_mm,
            "grid": {
                "start_mm": grid.start_mm,
                "end_mm": grid.end_mm,
                "increment_mm": grid.increment_mm,
            },
        }
    elif isinstance(spec, SimpleAverageSpec):
        out = simulate_simple_average(thin, spec.window_slices, spec.stride_slices)
        params = asdict(spec)
    elif isinstance(spec, GaussianAverageSpec):
        out = simulate_gaussian_average(thin, spec.fwhm_mm, spec.stride_slices)
        dz = abs(thin.uniform_slice_spacing_mm())
        params = dict(
            asdict(spec), sigma_slices=(spec.fwhm_mm / FWHM_PER_SIGMA) / dz
        )
    elif isinstance(spec, DirectDownsampleSpec):
        out = simulate_direct_downsample(thin, spec.stride_slices, spec.offset_slices)
        params = asdict(spec)
    else:
        raise TypeError(f"unknown degradation spec {type(spec).__name__}")
    return out.with_voxels(
        out.voxels,
        slice_locations_mm=out.slice_locations_mm,
        provenance={"method": method_name(spec), "params": params},
    )
