"""
Raster primitives shared by every detector.

All functions are pure: they never modify their inputs and hold no state, so they
can be called from any number of worker processes at once. Masks are boolean numpy
arrays wrapped in BinaryMask; OpenCV routines receive them as 0/255 uint8 images.
"""

from __future__ import annotations

import logging
import math
from typing import NamedTuple

import cv2
import numpy as np
from PIL import Image, UnidentifiedImageError

from exceptions import ImageFormatError, ParameterError, PreconditionError
from models.image_model import BinaryMask, BoundingBox, HsvRange, ScanImage

logger = logging.getLogger(__name__)

# Pillow modes holding more than 8 bits per sample
_WIDE_MODES = ("I;16", "I;16L", "I;16B", "I;16N", "I", "F")

_EDGE_KERNEL = np.array([[-1, -1, -1],
                         [-1, 8, -1],
                         [-1, -1, -1]], dtype=np.float32)


class Component(NamedTuple):
    component_id: int
    pixel_count: int
    bbox: BoundingBox


class Contour(NamedTuple):
    points: np.ndarray
    bbox: BoundingBox


class Segment(NamedTuple):
    x0: int
    y0: int
    x1: int
    y1: int

    @property
    def length(self) -> float:
        return math.hypot(self.x1 - self.x0, self.y1 - self.y0)

    @property
    def angle(self) -> float:
        """Direction in degrees, folded into [0, 180)"""
        return math.degrees(math.atan2(self.y1 - self.y0, self.x1 - self.x0)) % 180.0


def _square(radius: int) -> np.ndarray:
    return np.ones((2 * radius + 1, 2 * radius + 1), dtype=np.uint8)


def _require_gray(img: ScanImage, op: str) -> None:
    if img.channels != 1:
        raise PreconditionError(f"{op} needs a 1-channel image, got {img.channels} channels")


def rescale_to_uint8(data: np.ndarray) -> np.ndarray:
    """Linear min-max mapping of any numeric array onto 0..255; constant input maps to 0"""
    values = data.astype(np.float64)
    lo = float(values.min())
    hi = float(values.max())
    if hi <= lo:
        return np.zeros(data.shape, dtype=np.uint8)
    scaled = np.rint((values - lo) * (255.0 / (hi - lo)))
    return np.clip(scaled, 0, 255).astype(np.uint8)


def decode_image(path: str) -> ScanImage:
    """Read a PNG/JPEG/BMP/TIFF file into a ScanImage"""
    try:
        with Image.open(path) as im:
            im.load()
            if im.mode in _WIDE_MODES:
                data = rescale_to_uint8(np.asarray(im))
            elif im.mode in ("1", "L", "LA"):
                data = np.asarray(im.convert("L"))
            else:
                data = np.asarray(im.convert("RGB"))
    except (UnidentifiedImageError, OSError, ValueError) as e:
        raise ImageFormatError(f"Cannot decode {path}: {e}") from e
    if data.ndim == 3 and data.shape[2] == 1:
        data = data[:, :, 0]
    return ScanImage(np.ascontiguousarray(data, dtype=np.uint8), source_id=path)


def encode_png(img: ScanImage, path: str) -> None:
    Image.fromarray(img.data).save(path, format="PNG")


def crop_image(img: ScanImage, box: BoundingBox) -> ScanImage:
    if not box.within(img.width, img.height):
        raise ParameterError(f"Crop box {box.as_list()} exceeds {img.width}x{img.height} image")
    return img.with_data(img.data[box.y_top:box.y_bottom, box.x_left:box.x_right])


def to_grayscale(img: ScanImage) -> ScanImage:
    """Integer luma (0.299R + 0.587G + 0.114B, rounded half up); gray input is returned as-is"""
    if img.channels == 1:
        return img
    rgb = img.data.astype(np.uint32)
    luma = (299 * rgb[:, :, 0] + 587 * rgb[:, :, 1] + 114 * rgb[:, :, 2] + 500) // 1000
    return img.with_data(luma.astype(np.uint8))


def binarize(img: ScanImage, threshold: int) -> BinaryMask:
    """Pixels strictly above `threshold`"""
    _require_gray(img, "binarize")
    return BinaryMask(img.data > threshold)


def hsv_planes(img: ScanImage) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Hue in degrees [0, 360), saturation and value in [0, 1]"""
    if img.channels != 3:
        raise PreconditionError("HSV conversion needs a 3-channel image")
    rgb = img.data.astype(np.float32) / 255.0
    hsv = cv2.cvtColor(rgb, cv2.COLOR_RGB2HSV)
    return hsv[:, :, 0], hsv[:, :, 1], hsv[:, :, 2]


def hsv_mask(img: ScanImage, ranges: list[HsvRange]) -> BinaryMask:
    """Pixels whose HSV value falls in any of `ranges`; bounds are inclusive"""
    hue, sat, val = hsv_planes(img)
    mask = np.zeros(hue.shape, dtype=bool)
    for r in ranges:
        if r.wraps:
            in_hue = (hue >= r.hue_lo) | (hue <= r.hue_hi)
        else:
            in_hue = (hue >= r.hue_lo) & (hue <= r.hue_hi)
        mask |= in_hue & (sat >= r.sat_lo) & (sat <= r.sat_hi) & (val >= r.val_lo) & (val <= r.val_hi)
    return BinaryMask(mask)


def dilate(mask: BinaryMask, radius: int) -> BinaryMask:
    if radius < 0:
        raise ParameterError(f"radius must be non-negative, got {radius}")
    if radius == 0:
        return mask
    return BinaryMask(cv2.dilate(mask.as_uint8(), _square(radius)) > 0)


def erode(mask: BinaryMask, radius: int) -> BinaryMask:
    if radius < 0:
        raise ParameterError(f"radius must be non-negative, got {radius}")
    if radius == 0:
        return mask
    return BinaryMask(cv2.erode(mask.as_uint8(), _square(radius)) > 0)


def label_components(mask: BinaryMask) -> tuple[np.ndarray, list[Component]]:
    """8-connected labelling; components sorted by pixel count, largest first"""
    if mask.count == 0:
        return np.zeros(mask.bits.shape, dtype=np.int32), []
    n, labels, stats, _ = cv2.connectedComponentsWithStats(mask.as_uint8(), connectivity=8)
    components = []
    for label in range(1, n):
        x, y, w, h, area = (int(v) for v in stats[label])
        components.append(Component(label, area, BoundingBox(x, y, x + w, y + h)))
    components.sort(key=lambda c: (-c.pixel_count, c.component_id))
    return labels, components


def connected_components(mask: BinaryMask) -> list[Component]:
    return label_components(mask)[1]


def find_contours(mask: BinaryMask) -> list[Contour]:
    """External boundaries of the mask's regions, each with its tight bounding box"""
    if mask.count == 0:
        return []
    contours, _ = cv2.findContours(mask.as_uint8(), cv2.RETR_EXTERNAL, cv2.CHAIN_APPROX_NONE)
    result = []
    for points in contours:
        x, y, w, h = cv2.boundingRect(points)
        result.append(Contour(points, BoundingBox(x, y, x + w, y + h)))
    result.sort(key=lambda c: (c.bbox.y_top, c.bbox.x_left, c.bbox.y_bottom, c.bbox.x_right))
    return result


def canny_edges(img: ScanImage, lo: int, hi: int) -> BinaryMask:
    """Canny with a fixed 5x5, sigma 1.4 Gaussian pre-smoothing"""
    _require_gray(img, "canny_edges")
    if not 0 <= lo <= hi <= 255:
        raise ParameterError(f"Canny thresholds must satisfy 0 <= lo <= hi <= 255, got {lo}, {hi}")
    smoothed = cv2.GaussianBlur(img.data, (5, 5), 1.4)
    return BinaryMask(cv2.Canny(smoothed, lo, hi, L2gradient=True) > 0)


def hough_lines(mask: BinaryMask, min_votes: int, min_len: int, max_gap: int) -> list[Segment]:
    """Probabilistic Hough segments at 1 px / 1 degree resolution"""
    if min_votes < 1 or min_len < 1 or max_gap < 1:
        raise ParameterError("Hough parameters must be positive")
    if mask.count == 0:
        return []
    lines = cv2.HoughLinesP(mask.as_uint8(), 1, np.pi / 180, min_votes,
                            minLineLength=min_len, maxLineGap=max_gap)
    if lines is None:
        return []
    # (N, 1, 4) on OpenCV 4, (N, 4) on 5
    return [Segment(*(int(v) for v in line)) for line in np.asarray(lines).reshape(-1, 4)]


def edge_enhance(img: ScanImage) -> ScanImage:
    """8-neighbour Laplacian clamped to 0..255, then a 3x3 maximum filter"""
    _require_gray(img, "edge_enhance")
    response = cv2.filter2D(img.data, cv2.CV_32F, _EDGE_KERNEL, borderType=cv2.BORDER_REPLICATE)
    edges = np.clip(response, 0, 255).astype(np.uint8)
    return img.with_data(cv2.dilate(edges, _square(1), borderType=cv2.BORDER_REPLICATE))
