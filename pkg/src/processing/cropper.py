"""Scan-area identification: component bounding box, refined by slice medians"""

from __future__ import annotations

import math
import statistics
from typing import NamedTuple

import numpy as np

from exceptions import ParameterError
from models.config_model import CropConfig
from models.image_model import BinaryMask, BoundingBox, ScanImage
from models.report_model import CropResult, ShapeClass
from processing.imgprim import binarize, dilate, erode, label_components, to_grayscale


class Stage1Result(NamedTuple):
    box: BoundingBox
    mask: BinaryMask
    mode_value: int
    component_pixels: int


def mode_gray_value(gray: np.ndarray) -> int:
    """Most frequent value; ties go to the smaller value"""
    return int(np.bincount(gray.ravel(), minlength=256).argmax())


def stage1_crop(img: ScanImage, cfg: CropConfig) -> Stage1Result:
    """Threshold above the background mode, open the mask, keep the largest component's box"""
    gray = to_grayscale(img)
    mode_value = mode_gray_value(gray.data)
    mask = binarize(gray, mode_value + cfg.threshold_offset)
    mask = dilate(erode(mask, cfg.morph_radius), cfg.morph_radius)
    _, components = label_components(mask)
    if not components:
        return Stage1Result(BoundingBox.full(img.width, img.height), mask, mode_value, img.width * img.height)
    largest = components[0]
    return Stage1Result(largest.bbox, mask, mode_value, largest.pixel_count)


def _slice_extrema(bits: np.ndarray, lo: int, hi: int, axis_lo: int) -> list[tuple[int, int]]:
    """Per-slice (first, last) set index along the columns of `bits` for the three slices of rows [lo, hi)"""
    extent = hi - lo
    bounds = [lo + (k * extent) // 3 for k in range(3)] + [hi]
    extrema = []
    for start, stop in zip(bounds[:-1], bounds[1:], strict=True):
        if stop <= start:
            continue
        hits = np.flatnonzero(bits[start:stop].any(axis=0))
        if hits.size:
            extrema.append((axis_lo + int(hits[0]), axis_lo + int(hits[-1])))
    return extrema


def _refined_bounds(extrema: list[tuple[int, int]], lo: int, hi: int) -> tuple[int, int]:
    if not extrema:
        return lo, hi
    new_lo = math.floor(statistics.median(e[0] for e in extrema))
    new_hi = math.ceil(statistics.median(e[1] for e in extrema)) + 1
    new_lo, new_hi = max(new_lo, lo), min(new_hi, hi)
    return (new_lo, new_hi) if new_lo < new_hi else (lo, hi)


def stage2_refine(mask: BinaryMask, stage1_box: BoundingBox) -> BoundingBox:
    """
    Tighten the box to the median extent of three slices.

    x bounds come from the leftmost/rightmost set pixel in each horizontal third of the
    box, y bounds from the top/bottom set pixel in each vertical third. Slices without
    set pixels are dropped from the median.
    """
    if not stage1_box.within(mask.width, mask.height):
        raise ParameterError(f"Box {stage1_box.as_list()} exceeds the {mask.width}x{mask.height} mask")
    region = mask.bits[stage1_box.y_top:stage1_box.y_bottom, stage1_box.x_left:stage1_box.x_right]
    if not region.any():
        return stage1_box

    # rows of `region` are image rows, so slicing rows gives the horizontal slices
    x_extrema = _slice_extrema(region, 0, region.shape[0], stage1_box.x_left)
    y_extrema = _slice_extrema(region.T, 0, region.shape[1], stage1_box.y_top)
    x_left, x_right = _refined_bounds(x_extrema, stage1_box.x_left, stage1_box.x_right)
    y_top, y_bottom = _refined_bounds(y_extrema, stage1_box.y_top, stage1_box.y_bottom)
    return BoundingBox(x_left, y_top, x_right, y_bottom)


def crop_scan(img: ScanImage, cfg: CropConfig) -> CropResult:
    stage1 = stage1_crop(img, cfg)
    if stage1.component_pixels >= cfg.rect_fill_ratio * stage1.box.area or not cfg.enable_stage2:
        return CropResult(stage1.box, stage1.box, ShapeClass.RECTANGULAR, stage1.mode_value)
    final_box = stage2_refine(stage1.mask, stage1.box)
    return CropResult(stage1.box, final_box, ShapeClass.REFINED, stage1.mode_value)
