"""Artifact detection: lesion calipers and dual-view scans"""

from __future__ import annotations

import itertools
import logging

import numpy as np

from exceptions import ParameterError
from models.config_model import CaliperConfig, CaliperMethod, DualViewConfig, FilterConfig
from models.image_model import BinaryMask, BoundingBox, ScanImage
from models.report_model import CaliperReport, DualViewReport
from processing.filters import detect_indicator_shape
from processing.imgprim import (
    Segment,
    canny_edges,
    crop_image,
    dilate,
    edge_enhance,
    find_contours,
    hough_lines,
    hsv_mask,
    to_grayscale,
)

logger = logging.getLogger(__name__)


def _line_intersection(a: Segment, b: Segment) -> tuple[float, float] | None:
    """Intersection of the infinite lines through two segments, None when parallel"""
    dxa, dya = a.x1 - a.x0, a.y1 - a.y0
    dxb, dyb = b.x1 - b.x0, b.y1 - b.y0
    denom = dxa * dyb - dya * dxb
    if abs(denom) < 1e-9:
        return None
    t = ((b.x0 - a.x0) * dyb - (b.y0 - a.y0) * dxb) / denom
    return a.x0 + t * dxa, a.y0 + t * dya


def _angle_between(a: Segment, b: Segment) -> float:
    diff = abs(a.angle - b.angle) % 180.0
    return min(diff, 180.0 - diff)


def _caliper_mask(gray: np.ndarray, cfg: CaliperConfig, interior: tuple[int, int, int, int]) -> BinaryMask:
    x0, y0, x1, y1 = interior
    masked = np.zeros_like(gray)
    masked[y0:y1, x0:x1] = gray[y0:y1, x0:x1]
    enhanced = edge_enhance(ScanImage(masked)).data
    binary = enhanced > cfg.edge_threshold
    # the step between the black border and the scan would otherwise show up as an edge
    margin = cfg.dilate_radius + 2
    keep = np.zeros_like(binary)
    keep[y0 + margin:y1 - margin, x0 + margin:x1 - margin] = True
    return dilate(BinaryMask(binary & keep), cfg.dilate_radius)


def _hough_crossing(mask: BinaryMask, cfg: CaliperConfig,
                    interior: tuple[int, int, int, int]) -> BoundingBox | None:
    x0, y0, x1, y1 = interior
    segments = hough_lines(mask, cfg.hough_min_votes, cfg.hough_min_len, cfg.hough_max_gap)
    for a, b in itertools.combinations(segments, 2):
        if _angle_between(a, b) < cfg.intersection_angle_min:
            continue
        point = _line_intersection(a, b)
        if point is None:
            continue
        px, py = int(np.floor(point[0])), int(np.floor(point[1]))
        if x0 <= px < x1 and y0 <= py < y1:
            return BoundingBox(px, py, px + 1, py + 1)
    return None


def detect_calipers(img: ScanImage, cfg: CaliperConfig, scan_area: BoundingBox | None = None) -> CaliperReport:
    """
    Find lesion caliper markers.

    The outer `border_mask_fraction` of every dimension is blacked out, the rest is
    edge-enhanced, thresholded and dilated. Contours whose bounding box is within
    [box_min, box_max] on both sides are calipers. With CONTOUR_PLUS_HOUGH, a scan
    where no contour qualified is still flagged when two non-parallel Hough lines
    cross inside the unmasked region; the crossing is reported as a 1x1 box.

    Boxes are returned in the coordinates of `img`, even when `scan_area` restricts
    the search to a crop.
    """
    gray = to_grayscale(img)
    ox = oy = 0
    if scan_area is not None:
        gray = crop_image(gray, scan_area)
        ox, oy = scan_area.x_left, scan_area.y_top

    h, w = gray.height, gray.width
    bx = int(cfg.border_mask_fraction * w)
    by = int(cfg.border_mask_fraction * h)
    interior = (bx, by, w - bx, h - by)
    if interior[2] - interior[0] <= 0 or interior[3] - interior[1] <= 0:
        return CaliperReport(present=False, method_used=cfg.method)

    mask = _caliper_mask(gray.data, cfg, interior)
    boxes = [c.bbox for c in find_contours(mask)
             if cfg.box_min <= c.bbox.w <= cfg.box_max and cfg.box_min <= c.bbox.h <= cfg.box_max]
    if boxes:
        return CaliperReport(present=True, boxes=[b.translate(ox, oy) for b in boxes],
                             method_used=CaliperMethod.CONTOUR)

    if cfg.method is CaliperMethod.CONTOUR_PLUS_HOUGH:
        crossing = _hough_crossing(mask, cfg, interior)
        if crossing is not None:
            logger.debug("Caliper lines cross at %s", crossing.as_list())
            return CaliperReport(present=True, boxes=[crossing.translate(ox, oy)],
                                 method_used=CaliperMethod.CONTOUR_PLUS_HOUGH)
    return CaliperReport(present=False, method_used=cfg.method)


def _midline_columns(width: int) -> list[int]:
    """Columns nearest to width / 2: two for even widths, one for odd"""
    mid = width // 2
    return [mid - 1, mid] if width % 2 == 0 else [mid]


def detect_dual_view(img: ScanImage, cfg: DualViewConfig,
                     shape_cfg: FilterConfig | None = None) -> DualViewReport:
    """Detect two side-by-side panels separated by a vertical seam at the midline"""
    if img.width < 2 * cfg.neighbor_offset + 1:
        raise ParameterError(
            f"Image width {img.width} is below the {2 * cfg.neighbor_offset + 1} px needed for the midline test")
    shape_cfg = shape_cfg or FilterConfig()

    if img.channels == 3:
        overlay = dilate(hsv_mask(img, cfg.exclusion_ranges), shape_cfg.indicator_dilate_radius)
        if detect_indicator_shape(overlay, shape_cfg):
            return DualViewReport(False)

    if img.width < cfg.width_height_min_ratio * img.height:
        return DualViewReport(False)

    edges = canny_edges(to_grayscale(img), cfg.canny_lo, cfg.canny_hi)
    counts = edges.bits.sum(axis=0)
    center = _midline_columns(img.width)
    c_mid = max(int(counts[c]) for c in center)
    c_left = max(int(counts[c - cfg.neighbor_offset]) for c in center)
    c_right = max(int(counts[c + cfg.neighbor_offset]) for c in center)

    flagged = (c_mid > cfg.midline_edge_min
               and c_mid > cfg.neighbor_margin + c_left
               and c_mid > cfg.neighbor_margin + c_right)
    return DualViewReport(flagged, img.width // 2 if flagged else None)


def split_dual_view(img: ScanImage, split_x: int) -> tuple[ScanImage, ScanImage]:
    if not 0 < split_x < img.width:
        raise ParameterError(f"split_x must be in (0, {img.width}), got {split_x}")
    return (img.with_data(img.data[:, :split_x]), img.with_data(img.data[:, split_x:]))
