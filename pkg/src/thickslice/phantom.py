"""Synthetic fine-grid phantoms and reference slice-profile integration.

A phantom is sampled on a sub-slice z grid (0.1 mm by default) so that
"true" thin and thick acquisitions can both be produced by integrating a
triangular slice profile over the fine grid. That integration is written
as direct quadrature here, independent of the degradation engines, so it
can serve as the reference when ranking simulation methods.
"""

from __future__ import annotations

import numpy as np

from .volume import IntensityDomain, Volume

DEFAULT_FINE_STEP_MM = 0.1

AIR_HU = -1000.0


def make_fine_phantom(
    seed: int,
    shape_yx: tuple[int, int] = (24, 24),
    z_span_mm: float = 40.0,
    fine_step_mm: float = DEFAULT_FINE_STEP_MM,
    pixel_spacing_mm: tuple[float, float] = (1.0, 1.0),
    n_blobs: int = 6,
    n_blocks: int = 4,
    n_laminae: int = 0,
) -> Volume:
    """Random smooth blobs plus sharp-edged blocks on an air background.

    Blobs are anisotropic 3-D Gaussians (smooth in z); blocks are axis-aligned
    boxes with abrupt value steps in all three axes. Optional laminae are
    thin axial plates (0.5 to 2.5 mm) across the whole body section, giving
    the volume sub-slice-thickness z structure (septa/vessel analogue).
    Values are in HU.
    """
    rng = np.random.default_rng(seed)
    nz = int(round(z_span_mm / fine_step_mm)) + 1
    ny, nx = shape_yx
    z = np.arange(nz, dtype=np.float64) * fine_step_mm
    y = np.arange(ny, dtype=np.float64) * pixel_spacing_mm[0]
    x = np.arange(nx, dtype=np.float64) * pixel_spacing_mm[1]
    vol = np.full((nz, ny, nx), AIR_HU, dtype=np.float64)

    # Soft-tissue body: a centered elliptic cylinder at ~0 HU.
    yy, xx = np.meshgrid(y, x, indexing="ij")
    cy, cx = y.mean(), x.mean()
    ry, rx = 0.46 * (y[-1] - y[0] + 1), 0.46 * (x[-1] - x[0] + 1)
    body = ((yy - cy) / ry) ** 2 + ((xx - cx) / rx) ** 2 <= 1.0
    vol[:, body] = 0.0

    zz = z[:, None, None]
    for _ in range(n_blobs):
        c_z = rng.uniform(0.1 * z[-1], 0.9 * z[-1])
        c_y = rng.uniform(0.25 * y[-1], 0.75 * y[-1])
        c_x = rng.uniform(0.25 * x[-1], 0.75 * x[-1])
        s_z = rng.uniform(1.0, 6.0)
        s_y = rng.uniform(2.0, 6.0)
        s_x = rng.uniform(2.0, 6.0)
        amp = rng.uniform(-300.0, 800.0)
        blob = amp * np.exp(
            -0.5
            * (
                ((zz - c_z) / s_z) ** 2
                + ((yy[None] - c_y) / s_y) ** 2
                + ((xx[None] - c_x) / s_x) ** 2
            )
        )
        vol += np.where(body[None], blob, 0.0)

    for _ in range(n_blocks):
        z0 = rng.uniform(0.05 * z[-1], 0.85 * z[-1])
        z1 = z0 + rng.uniform(2.0, 8.0)
        y0 = rng.integers(ny // 4, 3 * ny // 4 - 1)
        y1 = y0 + rng.integers(2, max(3, ny // 4))
        x0 = rng.integers(nx // 4, 3 * nx // 4 - 1)
        x1 = x0 + rng.integers(2, max(3, nx // 4))
        value = rng.uniform(-200.0, 800.0)
        zmask = (z >= z0) & (z <= z1)
        block = np.zeros_like(vol)
        block[np.ix_(zmask, np.arange(y0, y1), np.arange(x0, x1))] = value
        vol += np.where(body[None], block, 0.0)

    for _ in range(n_laminae):
        z0 = rng.uniform(0.02 * z[-1], 0.95 * z[-1])
        z1 = z0 + rng.uniform(0.5, 2.5)
        value = rng.uniform(-400.0, 900.0)
        zmask = (z >= z0) & (z <= z1)
        vol[zmask] += np.where(body, value, 0.0)

    return Volume(
        voxels=vol.astype(np.float32),
        pixel_spacing_mm=pixel_spacing_mm,
        slice_locations_mm=tuple(z),
        intensity_domain=IntensityDomain.HU,
    )


def integrate_slice_profile(
    fine: Volume, locations_mm, thickness_mm: float
) -> Volume:
    """Quadrature of a triangular profile of half-width ``thickness_mm``.

    For each requested location p the output slice is
    sum_k tri((z_k - p)/s) * fine[k] / sum_k tri(...), evaluated on the fine
    grid (the uniform fine step cancels in the normalized quotient). This is
    the reference "scanner" that thin and thick ground truths come from.
    """
    z = np.asarray(fine.slice_locations_mm, dtype=np.float64)
    vox = np.asarray(fine.voxels, dtype=np.float64)
    locations = [float(p) for p in locations_mm]
    out = np.empty((len(locations),) + fine.shape[1:], dtype=np.float32)
    for j, p in enumerate(locations):
        w = np.maximum(0.0, 1.0 - np.abs(z - p) / thickness_mm)
        total = w.sum()
        if total == 0.0:
            raise ValueError(f"location {p} mm is outside the fine grid support")
        out[j] = (np.tensordot(w, vox, axes=1) / total).astype(np.float32)
    return fine.with_voxels(out, slice_locations_mm=locations)


def make_phantom_acquisitions(
    seed: int,
    thin_thickness_mm: float = 1.0,
    thin_increment_mm: float = 0.8,
    thick_thickness_mm: float = 3.0,
    thick_increment_mm: float = 2.0,
    **phantom_kwargs,
) -> tuple[Volume, Volume]:
    """(true thin, true thick) pair integrated from one fine-grid phantom.

    Both acquisitions share the fine grid's z origin, mirroring paired
    clinical reconstructions of the same raw scan.
    """
    fine = make_fine_phantom(seed, **phantom_kwargs)
    z0 = fine.slice_locations_mm[0]
    z1 = fine.slice_locations_mm[-1]
    thin_locs = _grid_locations(z0, z1, thin_increment_mm)
    thick_locs = _grid_locations(z0, z1, thick_increment_mm)
    thin = integrate_slice_profile(fine, thin_locs, thin_thickness_mm)
    thick = integrate_slice_profile(fine, thick_locs, thick_thickness_mm)
    return thin, thick


def _grid_locations(z0: float, z1: float, increment: float) -> list[float]:
    count = int(np.floor((z1 - z0) / increment + 1e-9)) + 1
    return [z0 + k * increment for k in range(count)]
