"""MetaImage-subset volume container, HU normalization, and slice alignment.

The container is the plain-text ``Key = Value`` header plus little-endian
raw voxels (x varies fastest, then y, then z) understood by common medical
imaging viewers. Only uncompressed 3-D MET_SHORT / MET_FLOAT payloads are
supported; ``.mhd`` headers reference a sidecar ``.raw`` file, ``.mha``
files inline the payload after an ``ElementDataFile = LOCAL`` line.

The container stores a uniform z spacing; volumes with non-uniform slice
locations must carry their true locations elsewhere (the pair manifest does).
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass

import numpy as np

from .errors import (
    DimensionOverflowError,
    InPlaneMismatchError,
    Int16RangeError,
    NonUniformSpacingError,
    NoOverlapError,
    ParseError,
    TruncatedDataError,
)
from .volume import IntensityDomain, Volume

ELEMENT_TYPES = {"MET_SHORT": np.dtype("<i2"), "MET_FLOAT": np.dtype("<f4")}
_NUMPY_TO_ELEMENT = {"int16": "MET_SHORT", "float32": "MET_FLOAT"}

# Refuse payloads beyond 16 GiB; anything larger is a corrupt header.
MAX_PAYLOAD_BYTES = 16 << 30

DEFAULT_ALIGN_TOL_MM = 0.1
IN_PLANE_TOL = 1e-6


@dataclass(frozen=True)
class VolumeHeader:
    dims: tuple[int, int, int]  # (nx, ny, nz)
    element_type: str  # MET_SHORT or MET_FLOAT
    element_spacing_mm: tuple[float, float, float]
    offset_mm: tuple[float, float, float]
    data_file: str  # relative path or "LOCAL"


@dataclass(frozen=True)
class HuWindow:
    """Intensity window mapped onto [0, 1]; defaults to the full 12-bit CT range."""

    lo_hu: float = -1024.0
    hi_hu: float = 3071.0

    def __post_init__(self):
        if not (self.lo_hu < self.hi_hu):
            raise ValueError(f"window lo must be < hi, got ({self.lo_hu}, {self.hi_hu})")


def _parse_header(fh, path: str) -> VolumeHeader:
    fields: dict[str, str] = {}
    line_no = 0
    while True:
        raw = fh.readline()
        line_no += 1
        if not raw:
            break
        try:
            line = raw.decode("ascii").strip()
        except UnicodeDecodeError as exc:
            raise ParseError(f"{path}:{line_no}: header is not ASCII") from exc
        if not line:
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise ParseError(f"{path}:{line_no}: expected 'Key = Value', got {line!r}")
        key, value = key.strip(), value.strip()
        fields[key] = value
        if key == "ElementDataFile":
            break
    if "ElementDataFile" not in fields:
        raise ParseError(f"{path}: missing ElementDataFile")

    def require(key: str) -> str:
        if key not in fields:
            raise ParseError(f"{path}: missing required header field {key}")
        return fields[key]

    if fields.get("ObjectType", "Image") != "Image":
        raise ParseError(f"{path}: ObjectType must be Image, got {fields['ObjectType']}")
    if fields.get("NDims", "3") != "3":
        raise ParseError(f"{path}: NDims must be 3, got {fields['NDims']}")
    if fields.get("CompressedData", "False").lower() == "true":
        raise ParseError(f"{path}: compressed payloads are not supported")
    if fields.get("BinaryDataByteOrderMSB", "False").lower() == "true":
        raise ParseError(f"{path}: big-endian payloads are not supported")
    if fields.get("ElementNumberOfChannels", "1") != "1":
        raise ParseError(f"{path}: multi-channel volumes are not supported")

    element_type = require("ElementType")
    if element_type not in ELEMENT_TYPES:
        raise ParseError(
            f"{path}: ElementType must be one of {sorted(ELEMENT_TYPES)}, got {element_type}"
        )

    def parse_triple(key: str, cast, default=None):
        if key not in fields:
            return default
        parts = fields[key].split()
        if len(parts) != 3:
            raise ParseError(f"{path}: {key} must have 3 values, got {fields[key]!r}")
        try:
            return tuple(cast(p) for p in parts)
        except ValueError as exc:
            raise ParseError(f"{path}: bad {key} value {fields[key]!r}") from exc

    dims = parse_triple("DimSize", int)
    if dims is None:
        raise ParseError(f"{path}: missing required header field DimSize")
    if any(d < 1 for d in dims):
        raise DimensionOverflowError(f"{path}: DimSize must be positive, got {dims}")
    n_bytes = dims[0] * dims[1] * dims[2] * ELEMENT_TYPES[element_type].itemsize
    if n_bytes > MAX_PAYLOAD_BYTES:
        raise DimensionOverflowError(
            f"{path}: payload of {n_bytes} bytes exceeds the {MAX_PAYLOAD_BYTES} limit"
        )
    spacing = parse_triple("ElementSpacing", float, default=(1.0, 1.0, 1.0))
    if any(not math.isfinite(s) or s <= 0 for s in spacing):
        raise ParseError(f"{path}: ElementSpacing must be positive, got {spacing}")
    offset = parse_triple("Offset", float, default=(0.0, 0.0, 0.0))
    return VolumeHeader(
        dims=dims,
        element_type=element_type,
        element_spacing_mm=spacing,
        offset_mm=offset,
        data_file=fields["ElementDataFile"],
    )


def read_volume(
    path: str | os.PathLike,
    intensity_domain: IntensityDomain = IntensityDomain.HU,
) -> Volume:
    """Load a volume; voxels keep their stored dtype (int16 reads as HU)."""
    path = os.fspath(path)
    with open(path, "rb") as fh:
        header = _parse_header(fh, path)
        if header.data_file == "LOCAL":
            payload = fh.read()
        else:
            data_path = os.path.join(os.path.dirname(path) or ".", header.data_file)
            try:
                with open(data_path, "rb") as dfh:
                    payload = dfh.read()
            except FileNotFoundError as exc:
                raise ParseError(f"{path}: ElementDataFile {header.data_file} not found") from exc
    dtype = ELEMENT_TYPES[header.element_type]
    nx, ny, nz = header.dims
    expected = nx * ny * nz * dtype.itemsize
    if len(payload) != expected:
        raise TruncatedDataError(expected=expected, actual=len(payload))
    voxels = np.frombuffer(payload, dtype=dtype).reshape(nz, ny, nx)
    sx, sy, sz = header.element_spacing_mm
    oz = header.offset_mm[2]
    locations = [oz + i * sz for i in range(nz)]
    return Volume(
        voxels=voxels,
        pixel_spacing_mm=(sy, sx),
        slice_locations_mm=tuple(locations),
        intensity_domain=intensity_domain,
    )


def write_volume(
    volume: Volume,
    path: str | os.PathLike,
    element_type: str = "float32",
) -> None:
    """Write header + raw payload; ``.mha`` paths inline the payload (LOCAL).

    ``element_type`` is "float32" or "int16". Int16 requires an HU-domain
    volume whose values round into the int16 range. Slice locations must be
    uniformly spaced and increasing (the container has no per-slice table).
    """
    path = os.fspath(path)
    if element_type not in _NUMPY_TO_ELEMENT:
        raise ValueError(f"element_type must be int16 or float32, got {element_type}")
    n = volume.n_slices
    if n > 1:
        sz = volume.uniform_slice_spacing_mm()
        if sz < 0:
            raise ValueError(
                "decreasing slice order cannot be stored in this container; "
                "flip the volume along z first"
            )
    else:
        sz = 1.0
    if element_type == "int16":
        if volume.intensity_domain is not IntensityDomain.HU:
            raise Int16RangeError("int16 storage requires an HU-domain volume")
        rounded = np.rint(np.asarray(volume.voxels, dtype=np.float64))
        if rounded.min() < -32768 or rounded.max() > 32767:
            raise Int16RangeError(
                f"values [{rounded.min():g}, {rounded.max():g}] overflow int16"
            )
        payload_array = rounded.astype("<i2")
    else:
        payload_array = np.asarray(volume.voxels, dtype="<f4")

    nz, ny, nx = volume.shape
    sy, sx = volume.pixel_spacing_mm
    oz = volume.slice_locations_mm[0]
    local = path.endswith(".mha")
    data_file = "LOCAL" if local else os.path.basename(os.path.splitext(path)[0]) + ".raw"
    header_lines = [
        "ObjectType = Image",
        "NDims = 3",
        "BinaryData = True",
        "BinaryDataByteOrderMSB = False",
        "CompressedData = False",
        f"DimSize = {nx} {ny} {nz}",
        f"ElementType = {_NUMPY_TO_ELEMENT[element_type]}",
        f"ElementSpacing = {sx:.17g} {sy:.17g} {sz:.17g}",
        f"Offset = 0 0 {oz:.17g}",
        f"ElementDataFile = {data_file}",
    ]
    header = ("\n".join(header_lines) + "\n").encode("ascii")
    if local:
        with open(path, "wb") as fh:
            fh.write(header)
            fh.write(payload_array.tobytes(order="C"))
    else:
        with open(path, "wb") as fh:
            fh.write(header)
        raw_path = os.path.join(os.path.dirname(path) or ".", data_file)
        with open(raw_path, "wb") as fh:
            fh.write(payload_array.tobytes(order="C"))


def normalize_hu(volume: Volume, window: HuWindow = HuWindow()) -> Volume:
    """clamp((hu - lo) / (hi - lo), 0, 1); output domain Normalized01.

    Idempotent on already-normalized volumes passed with a (0, 1) window.
    """
    vox = np.asarray(volume.voxels, dtype=np.float64)
    scaled = (vox - window.lo_hu) / (window.hi_hu - window.lo_hu)
    out = np.clip(scaled, 0.0, 1.0).astype(np.float32)
    return volume.with_voxels(
        out,
        intensity_domain=IntensityDomain.NORMALIZED01,
        provenance=volume.provenance,
    )


def align_volumes(
    a: Volume, b: Volume, tol_mm: float = DEFAULT_ALIGN_TOL_MM
) -> list[tuple[int, int]]:
    """Greedy nearest-location matching of slices, each used at most once.

    Returns (index_in_a, index_in_b) pairs ordered by increasing location.
    Raises InPlaneMismatchError when in-plane dims or pixel spacing differ,
    NoOverlapError when nothing matches within ``tol_mm``.
    """
    if a.shape[1:] != b.shape[1:]:
        raise InPlaneMismatchError(
            f"in-plane dims differ: {a.shape[1:]} vs {b.shape[1:]}"
        )
    if not np.allclose(
        a.pixel_spacing_mm, b.pixel_spacing_mm, rtol=IN_PLANE_TOL, atol=IN_PLANE_TOL
    ):
        raise InPlaneMismatchError(
            f"pixel spacing differs: {a.pixel_spacing_mm} vs {b.pixel_spacing_mm}"
        )
    locs_a = a.slice_locations_mm
    locs_b = b.slice_locations_mm
    candidates = []
    for i, la in enumerate(locs_a):
        for j, lb in enumerate(locs_b):
            d = abs(la - lb)
            if d <= tol_mm:
                candidates.append((d, i, j))
    candidates.sort()
    used_a: set[int] = set()
    used_b: set[int] = set()
    pairs = []
    for _, i, j in candidates:
        if i in used_a or j in used_b:
            continue
        used_a.add(i)
        used_b.add(j)
        pairs.append((i, j))
    if not pairs:
        raise NoOverlapError(
            f"no slice pairs within {tol_mm:g} mm "
            f"(a spans [{min(locs_a):g}, {max(locs_a):g}], "
            f"b spans [{min(locs_b):g}, {max(locs_b):g}])"
        )
    pairs.sort(key=lambda ij: locs_a[ij[0]])
    return pairs
