from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from exceptions import ImageFormatError, ParameterError


@dataclass(frozen=True)
class BoundingBox:
    """Pixel box with inclusive left/top and exclusive right/bottom edges"""
    x_left: int
    y_top: int
    x_right: int
    y_bottom: int

    def __post_init__(self) -> None:
        if self.x_left >= self.x_right or self.y_top >= self.y_bottom:
            raise ParameterError(f"Degenerate bounding box: {self.as_list()}")

    @property
    def w(self) -> int:
        return self.x_right - self.x_left

    @property
    def h(self) -> int:
        return self.y_bottom - self.y_top

    @property
    def area(self) -> int:
        return self.w * self.h

    def as_list(self) -> list[int]:
        return [self.x_left, self.y_top, self.x_right, self.y_bottom]

    @classmethod
    def from_list(cls, values: list[int] | tuple[int, ...]) -> BoundingBox:
        x_left, y_top, x_right, y_bottom = (int(v) for v in values)
        return cls(x_left, y_top, x_right, y_bottom)

    @classmethod
    def full(cls, width: int, height: int) -> BoundingBox:
        return cls(0, 0, width, height)

    def translate(self, dx: int, dy: int) -> BoundingBox:
        return BoundingBox(self.x_left + dx, self.y_top + dy, self.x_right + dx, self.y_bottom + dy)

    def contains(self, other: BoundingBox) -> bool:
        """True when `other` lies entirely inside this box"""
        return (self.x_left <= other.x_left and self.y_top <= other.y_top
                and other.x_right <= self.x_right and other.y_bottom <= self.y_bottom)

    def within(self, width: int, height: int) -> bool:
        return self.x_left >= 0 and self.y_top >= 0 and self.x_right <= width and self.y_bottom <= height


@dataclass(frozen=True, eq=False)
class ScanImage:
    """Decoded 8-bit raster, shape (height, width) or (height, width, 3) in RGB order"""
    data: np.ndarray
    source_id: str = ""

    def __post_init__(self) -> None:
        if self.data.dtype != np.uint8:
            raise ImageFormatError(f"Expected uint8 pixels, got {self.data.dtype}")
        if self.data.ndim == 3 and self.data.shape[2] != 3:
            raise ImageFormatError(f"Unsupported channel count: {self.data.shape[2]}")
        if self.data.ndim not in (2, 3):
            raise ImageFormatError(f"Unsupported raster shape: {self.data.shape}")
        if self.data.shape[0] < 1 or self.data.shape[1] < 1:
            raise ImageFormatError("Raster must have at least one pixel")

    @property
    def width(self) -> int:
        return int(self.data.shape[1])

    @property
    def height(self) -> int:
        return int(self.data.shape[0])

    @property
    def channels(self) -> int:
        return 1 if self.data.ndim == 2 else 3

    def with_data(self, data: np.ndarray) -> ScanImage:
        """Same source, new pixels"""
        return ScanImage(np.ascontiguousarray(data), self.source_id)

    def with_source_id(self, source_id: str) -> ScanImage:
        return ScanImage(self.data, source_id)


@dataclass(frozen=True, eq=False)
class BinaryMask:
    """One boolean flag per pixel, shape (height, width)"""
    bits: np.ndarray

    def __post_init__(self) -> None:
        if self.bits.dtype != np.bool_ or self.bits.ndim != 2:
            raise ImageFormatError("BinaryMask needs a 2-D boolean array")

    @property
    def width(self) -> int:
        return int(self.bits.shape[1])

    @property
    def height(self) -> int:
        return int(self.bits.shape[0])

    @property
    def count(self) -> int:
        return int(np.count_nonzero(self.bits))

    @classmethod
    def empty(cls, width: int, height: int) -> BinaryMask:
        return cls(np.zeros((height, width), dtype=bool))

    def as_uint8(self) -> np.ndarray:
        """0/255 image for OpenCV routines"""
        return self.bits.astype(np.uint8) * 255


@dataclass(frozen=True)
class HsvRange:
    """HSV window; hue in degrees (wraps when hue_lo > hue_hi), saturation and value in [0, 1]"""
    hue_lo: float
    hue_hi: float
    sat_lo: float = 0.0
    sat_hi: float = 1.0
    val_lo: float = 0.0
    val_hi: float = 1.0
    name: str = ""

    def __post_init__(self) -> None:
        if not (0.0 <= self.hue_lo < 360.0 and 0.0 <= self.hue_hi <= 360.0):
            raise ParameterError(f"Hue bounds out of range: {self.hue_lo}, {self.hue_hi}")
        if not (0.0 <= self.sat_lo <= self.sat_hi <= 1.0):
            raise ParameterError(f"Saturation bounds out of order: {self.sat_lo}, {self.sat_hi}")
        if not (0.0 <= self.val_lo <= self.val_hi <= 1.0):
            raise ParameterError(f"Value bounds out of order: {self.val_lo}, {self.val_hi}")

    @property
    def wraps(self) -> bool:
        return self.hue_lo > self.hue_hi

    @classmethod
    def parse(cls, text: str) -> HsvRange:
        """Parse `name:hue_lo-hue_hi:sat_lo-sat_hi:val_lo-val_hi`"""
        parts = [p.strip() for p in text.split(":")]
        if len(parts) != 4:
            raise ParameterError(f"Malformed HSV range: {text!r}")
        name = parts[0]
        try:
            hue_lo, hue_hi = (float(v) for v in parts[1].split("-"))
            sat_lo, sat_hi = (float(v) for v in parts[2].split("-"))
            val_lo, val_hi = (float(v) for v in parts[3].split("-"))
        except ValueError as e:
            raise ParameterError(f"Malformed HSV range: {text!r}") from e
        return cls(hue_lo, hue_hi, sat_lo, sat_hi, val_lo, val_hi, name)

    def format(self) -> str:
        return (f"{self.name}:{self.hue_lo:g}-{self.hue_hi:g}:"
                f"{self.sat_lo:g}-{self.sat_hi:g}:{self.val_lo:g}-{self.val_hi:g}")
