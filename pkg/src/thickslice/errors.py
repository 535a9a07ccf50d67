"""Exception types raised by the thickslice library.

Grouping matters for the CLI exit-code contract: ``VolumeIOError`` subclasses
map to exit code 3, every other ``ThickSliceError`` to exit code 4.
"""


class ThickSliceError(Exception):
    """Base class for all library errors."""


class VolumeIOError(ThickSliceError):
    """Base class for container read/write failures."""


class ParseError(VolumeIOError):
    """Malformed or unsupported header content (names the offending line/field)."""


class TruncatedDataError(VolumeIOError):
    """Raw payload byte count does not match the header's DimSize/ElementType."""

    def __init__(self, expected: int, actual: int):
        super().__init__(f"raw payload has {actual} bytes, header implies {expected}")
        self.expected = expected
        self.actual = actual


class DimensionOverflowError(VolumeIOError):
    """Header dimensions are non-positive or imply an absurd payload size."""


class Int16RangeError(ThickSliceError):
    """Voxel values fall outside the representable Int16 range after rounding."""


class NonUniformSpacingError(ThickSliceError):
    """Operation requires uniformly spaced slice locations."""


class ZeroTotalWeightError(ThickSliceError):
    """A target slice location has no thin slice within the profile support."""

    def __init__(self, location_mm: float):
        super().__init__(
            f"no thin slice contributes weight at target location {location_mm:g} mm"
        )
        self.location_mm = location_mm


class WindowTooLargeError(ThickSliceError):
    """Averaging window exceeds the number of available slices."""


class ShapeMismatchError(ThickSliceError):
    """Arrays or volumes being compared do not share a shape."""


class AllZeroDifferencesError(ThickSliceError):
    """Every paired difference is zero; the signed-rank test is undefined."""


class NoOverlapError(ThickSliceError):
    """No slice pairs matched within the alignment tolerance."""


class InPlaneMismatchError(ThickSliceError):
    """Volumes differ in in-plane dimensions or pixel spacing."""
