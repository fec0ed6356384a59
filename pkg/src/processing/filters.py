"""Scan filtering: invalid (mostly black) scans and non-B-mode scans"""

from __future__ import annotations

import logging
import math

import cv2
import numpy as np

from models.config_model import FilterConfig
from models.image_model import BinaryMask, BoundingBox, ScanImage
from models.report_model import FilterTrigger, FilterVerdict
from processing.imgprim import (
    Segment,
    crop_image,
    dilate,
    find_contours,
    hough_lines,
    hsv_mask,
    to_grayscale,
)

logger = logging.getLogger(__name__)

# Segments within this many degrees of horizontal/vertical count as axis-aligned
AXIS_TOLERANCE_DEG = 3.0


def detect_invalid(img: ScanImage, cfg: FilterConfig, scan_area: BoundingBox | None = None) -> FilterVerdict:
    """Flag the scan as invalid when more than `invalid_threshold` of the scan area is black"""
    gray = to_grayscale(img)
    if scan_area is not None:
        gray = crop_image(gray, scan_area)
    black = int(np.count_nonzero(gray.data < cfg.invalid_black_level))
    black_fraction = black / gray.data.size
    return FilterVerdict(invalid=black_fraction > cfg.invalid_threshold, black_fraction=black_fraction)


def is_grayscale(img: ScanImage, cfg: FilterConfig) -> bool:
    """True when nearly every pixel has (almost) equal channels"""
    if img.channels == 1:
        return True
    spread = img.data.max(axis=2).astype(np.int16) - img.data.min(axis=2).astype(np.int16)
    gray_pixels = int(np.count_nonzero(spread <= cfg.grayscale_tolerance))
    return gray_pixels >= cfg.grayscale_pixel_fraction * spread.size


def detect_non_b_mode(img: ScanImage, cfg: FilterConfig) -> FilterVerdict:
    if img.channels == 1:
        return FilterVerdict(non_b_mode=False, trigger=FilterTrigger.NONE)
    if is_grayscale(img, cfg):
        return FilterVerdict(non_b_mode=False, trigger=FilterTrigger.GRAY_PASS)

    doppler = hsv_mask(img, cfg.doppler_ranges)
    indicator = dilate(hsv_mask(img, cfg.indicator_ranges), cfg.indicator_dilate_radius)
    color_fraction = doppler.count / doppler.bits.size

    if detect_indicator_shape(indicator, cfg):
        return FilterVerdict(non_b_mode=True, color_fraction=color_fraction, trigger=FilterTrigger.INDICATOR_SHAPE)
    if color_fraction > cfg.color_area_threshold:
        return FilterVerdict(non_b_mode=True, color_fraction=color_fraction, trigger=FilterTrigger.COLOR_AREA)
    return FilterVerdict(non_b_mode=False, color_fraction=color_fraction, trigger=FilterTrigger.NONE)


def evaluate_scan(img: ScanImage, cfg: FilterConfig, scan_area: BoundingBox | None = None) -> FilterVerdict:
    """Both filters over the scan area (whole image when no area is given)"""
    invalid = detect_invalid(img, cfg, scan_area)
    region = crop_image(img, scan_area) if scan_area is not None else img
    verdict = detect_non_b_mode(region, cfg)
    verdict.invalid = invalid.invalid
    verdict.black_fraction = invalid.black_fraction
    return verdict


def _has_rectangle(mask: BinaryMask, cfg: FilterConfig) -> bool:
    min_w = cfg.rect_min_side_fraction * mask.width
    min_h = cfg.rect_min_side_fraction * mask.height
    for contour in find_contours(mask):
        if contour.bbox.w < min_w or contour.bbox.h < min_h:
            continue
        epsilon = cfg.approx_epsilon * cv2.arcLength(contour.points, True)
        approx = cv2.approxPolyDP(contour.points, epsilon, True)
        if len(approx) == 4 and cv2.isContourConvex(approx):
            logger.debug("Complete rectangle at %s", contour.bbox.as_list())
            return True
    return False


def _axis(segment: Segment) -> str | None:
    angle = segment.angle
    if angle <= AXIS_TOLERANCE_DEG or angle >= 180.0 - AXIS_TOLERANCE_DEG:
        return "h"
    if abs(angle - 90.0) <= AXIS_TOLERANCE_DEG:
        return "v"
    return None


def _endpoint_distances(segment: Segment, corner: tuple[float, float]) -> tuple[float, float]:
    """(near, far) distances from `corner` to the segment's endpoints"""
    d0 = math.hypot(segment.x0 - corner[0], segment.y0 - corner[1])
    d1 = math.hypot(segment.x1 - corner[0], segment.y1 - corner[1])
    return min(d0, d1), max(d0, d1)


def _has_right_angle(horizontal: list[Segment], vertical: list[Segment], cfg: FilterConfig,
                     min_w: float, min_h: float) -> bool:
    for h in horizontal:
        for v in vertical:
            corner = ((v.x0 + v.x1) / 2.0, (h.y0 + h.y1) / 2.0)
            h_near, h_far = _endpoint_distances(h, corner)
            v_near, v_far = _endpoint_distances(v, corner)
            if h_near > cfg.corner_gap or v_near > cfg.corner_gap:
                continue
            if h_far >= max(min_w, 2 * cfg.corner_gap) and v_far >= max(min_h, 2 * cfg.corner_gap):
                logger.debug("Partial rectangle corner at (%.0f, %.0f)", *corner)
                return True
    return False


def detect_indicator_shape(indicator_mask: BinaryMask, cfg: FilterConfig) -> bool:
    """Complete rectangles, partial rectangles and image-spanning lines in an overlay mask"""
    if indicator_mask.count == 0:
        return False
    if _has_rectangle(indicator_mask, cfg):
        return True

    width, height = indicator_mask.width, indicator_mask.height
    min_w = cfg.rect_min_side_fraction * width
    min_h = cfg.rect_min_side_fraction * height
    min_len = max(1, int(min(min_w, min_h)))
    segments = hough_lines(indicator_mask, cfg.indicator_hough_votes, min_len, cfg.indicator_hough_max_gap)

    for s in segments:
        if abs(s.y1 - s.y0) >= cfg.span_fraction * height or abs(s.x1 - s.x0) >= cfg.span_fraction * width:
            logger.debug("Spanning line %s", tuple(s))
            return True

    horizontal = [s for s in segments if _axis(s) == "h" and s.length >= min_w]
    vertical = [s for s in segments if _axis(s) == "v" and s.length >= min_h]
    return _has_right_angle(horizontal, vertical, cfg, min_w, min_h)
