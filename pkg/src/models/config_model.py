"""Tunable settings for every stage of the curation pipeline"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

from constants import (
    DEFAULT_DOPPLER_RANGES,
    DEFAULT_DUALVIEW_EXCLUSION_RANGES,
    DEFAULT_INDICATOR_RANGES,
)
from exceptions import ParameterError
from models.image_model import HsvRange


def ranges_from_table(table: list[tuple]) -> list[HsvRange]:
    """Build HsvRange objects from (name, hue_lo, hue_hi, sat_lo, sat_hi, val_lo, val_hi) rows"""
    return [HsvRange(h_lo, h_hi, s_lo, s_hi, v_lo, v_hi, name)
            for name, h_lo, h_hi, s_lo, s_hi, v_lo, v_hi in table]


def _check_ratio(name: str, value: float) -> None:
    if not 0.0 <= value <= 1.0:
        raise ParameterError(f"{name} must be in [0, 1], got {value}")


class CaliperMethod(str, Enum):
    CONTOUR = "CONTOUR"
    CONTOUR_PLUS_HOUGH = "CONTOUR_PLUS_HOUGH"


@dataclass
class FilterConfig:
    """Thresholds for the invalid-scan rule and non-B-mode detection"""
    invalid_black_level: int = 5
    invalid_threshold: float = 0.75
    color_area_threshold: float = 0.005
    doppler_ranges: list[HsvRange] = field(default_factory=lambda: ranges_from_table(DEFAULT_DOPPLER_RANGES))
    indicator_ranges: list[HsvRange] = field(default_factory=lambda: ranges_from_table(DEFAULT_INDICATOR_RANGES))
    indicator_dilate_radius: int = 2
    grayscale_tolerance: int = 8
    grayscale_pixel_fraction: float = 0.999
    rect_min_side_fraction: float = 0.05
    span_fraction: float = 0.6
    indicator_hough_votes: int = 40
    indicator_hough_max_gap: int = 10
    corner_gap: int = 15
    approx_epsilon: float = 0.02

    def __post_init__(self) -> None:
        if not 0 <= self.invalid_black_level <= 255:
            raise ParameterError(f"invalid_black_level must be in [0, 255], got {self.invalid_black_level}")
        for name in ("invalid_threshold", "color_area_threshold", "grayscale_pixel_fraction",
                     "rect_min_side_fraction", "span_fraction", "approx_epsilon"):
            _check_ratio(name, getattr(self, name))
        if self.indicator_dilate_radius < 0 or self.corner_gap < 0:
            raise ParameterError("Radii and gaps must be non-negative")
        if self.indicator_hough_votes < 1 or self.indicator_hough_max_gap < 1:
            raise ParameterError("Hough parameters must be positive")


@dataclass
class CaliperConfig:
    """Caliper detector settings; box bounds are inclusive on both ends"""
    border_mask_fraction: float = 0.15
    box_min: int = 10
    box_max: int = 70
    dilate_radius: int = 1
    edge_threshold: int = 64
    method: CaliperMethod = CaliperMethod.CONTOUR
    hough_min_votes: int = 30
    hough_min_len: int = 25
    hough_max_gap: int = 8
    intersection_angle_min: float = 10.0

    def __post_init__(self) -> None:
        self.method = CaliperMethod(self.method)
        if not 0.0 <= self.border_mask_fraction < 0.5:
            raise ParameterError(f"border_mask_fraction must be in [0, 0.5), got {self.border_mask_fraction}")
        if self.box_min <= 0:
            raise ParameterError(f"box_min must be positive, got {self.box_min}")
        if self.dilate_radius < 0:
            raise ParameterError("dilate_radius must be non-negative")
        if min(self.hough_min_votes, self.hough_min_len, self.hough_max_gap) < 1:
            raise ParameterError("Hough parameters must be positive")

    @property
    def box_range_valid(self) -> bool:
        return 0 < self.box_min < self.box_max


@dataclass
class DualViewConfig:
    width_height_min_ratio: float = 0.75
    midline_edge_min: int = 100
    neighbor_margin: int = 10
    neighbor_offset: int = 10
    canny_lo: int = 50
    canny_hi: int = 150
    exclusion_ranges: list[HsvRange] = field(
        default_factory=lambda: ranges_from_table(DEFAULT_DUALVIEW_EXCLUSION_RANGES))
    emit_split: bool = False

    def __post_init__(self) -> None:
        if self.neighbor_offset < 1:
            raise ParameterError(f"neighbor_offset must be at least 1, got {self.neighbor_offset}")
        if not 0 <= self.canny_lo <= self.canny_hi <= 255:
            raise ParameterError(f"Canny thresholds out of order: {self.canny_lo}, {self.canny_hi}")


@dataclass
class CropConfig:
    threshold_offset: int = 10
    morph_radius: int = 2
    rect_fill_ratio: float = 0.98
    enable_stage2: bool = True

    def __post_init__(self) -> None:
        if not 0.0 < self.rect_fill_ratio <= 1.0:
            raise ParameterError(f"rect_fill_ratio must be in (0, 1], got {self.rect_fill_ratio}")
        if self.morph_radius < 0:
            raise ParameterError("morph_radius must be non-negative")


@dataclass
class TextConfig:
    """OCR backend selection and annotation grammar extensions"""
    min_confidence: float = 0.30
    line_tolerance: int = 8
    backend: str = "sidecar"
    backend_command: str = ""
    sidecar_suffix: str = ".ocr.tsv"
    patterns: dict[str, list[str]] = field(default_factory=dict)

    def __post_init__(self) -> None:
        _check_ratio("min_confidence", self.min_confidence)
        if self.backend not in ("sidecar", "subprocess", "none"):
            raise ParameterError(f"Unknown OCR backend: {self.backend}")
        if self.backend == "subprocess" and not self.backend_command.strip():
            raise ParameterError("backend_command is required for the subprocess backend")


@dataclass
class PipelineConfig:
    """Stage toggles, per-stage settings and batch I/O"""
    enable_crop: bool = True
    enable_filters: bool = True
    enable_dualview: bool = True
    enable_calipers: bool = True
    enable_textkx: bool = True
    crop: CropConfig = field(default_factory=CropConfig)
    filters: FilterConfig = field(default_factory=FilterConfig)
    dualview: DualViewConfig = field(default_factory=DualViewConfig)
    calipers: CaliperConfig = field(default_factory=CaliperConfig)
    text: TextConfig = field(default_factory=TextConfig)
    inputs: list[str] = field(default_factory=list)
    manifest: str = "manifest.jsonl"
    emit_crops: str | None = None
    crop_suffix: str = "_crop"
    workers: int = 1
    record_timings: bool = False
    progress_step: int = 100

    def enabled_stages(self) -> list[str]:
        toggles = {
            "crop": self.enable_crop,
            "filters": self.enable_filters,
            "dualview": self.enable_dualview,
            "calipers": self.enable_calipers,
            "textkx": self.enable_textkx,
        }
        return [name for name, on in toggles.items() if on]

    def validate(self) -> None:
        """Raise ParameterError for settings that make a run impossible"""
        if not self.enabled_stages():
            raise ParameterError("At least one stage must be enabled")
        if self.workers < 1:
            raise ParameterError(f"workers must be at least 1, got {self.workers}")
        if self.progress_step < 1:
            raise ParameterError(f"progress_step must be at least 1, got {self.progress_step}")
        if self.enable_textkx and self.text.backend == "none":
            raise ParameterError("Text extraction is enabled but no OCR backend is configured")
        if not self.manifest:
            raise ParameterError("A manifest path is required")
