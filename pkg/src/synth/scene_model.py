"""Scene descriptions and the ground truth a rendered scene carries"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Any

from constants import STATUS_OK
from exceptions import SceneSpecError
from models.config_model import CaliperMethod
from models.image_model import BoundingBox
from models.report_model import (
    CaliperReport,
    CropResult,
    DualViewReport,
    FilterTrigger,
    FilterVerdict,
    OcrToken,
    ScanReport,
    ShapeClass,
    TextAnnotation,
)

# Marker sizes the default caliper detector is guaranteed to find
DETECTABLE_MARKER_SIZES = (12, 66)
# Marker sizes it is guaranteed to miss: bounding box below 10 px or above 70 px
UNDETECTABLE_MARKER_MAX = 5
UNDETECTABLE_MARKER_MIN = 67


class ScanShape(str, Enum):
    RECTANGULAR = "RECTANGULAR"
    CONVEX = "CONVEX"
    TRAPEZOIDAL = "TRAPEZOIDAL"
    IRREGULAR = "IRREGULAR"


class FeatureKind(str, Enum):
    CALIPER_CROSS = "CALIPER_CROSS"
    CALIPER_X = "CALIPER_X"
    CALIPER_DOTTED_LINE = "CALIPER_DOTTED_LINE"
    DOPPLER_PATCH = "DOPPLER_PATCH"
    INDICATOR_RECT = "INDICATOR_RECT"
    SPANNING_LINE = "SPANNING_LINE"
    TEXT_LABEL = "TEXT_LABEL"
    DUAL_SEAM = "DUAL_SEAM"
    BLACKOUT = "BLACKOUT"


MARKER_KINDS = (FeatureKind.CALIPER_CROSS, FeatureKind.CALIPER_X)


@dataclass
class FeatureSpec:
    """
    One painted feature.

    geometry keys by kind:
      CALIPER_CROSS / CALIPER_X: cx, cy, size, optional negative
      CALIPER_DOTTED_LINE: x0, y0, x1, y1 (marker centres), marker_size
      DOPPLER_PATCH: cx, cy, rx, ry
      INDICATOR_RECT: x0, y0, x1, y1 (inclusive corners)
      SPANNING_LINE: x, optional thickness
      TEXT_LABEL: text, x, y (baseline), optional scale
      DUAL_SEAM: optional x, width, value
      BLACKOUT: none
    ground_truth holds the expected annotation fields of a TEXT_LABEL.
    """
    kind: FeatureKind
    geometry: dict[str, Any] = field(default_factory=dict)
    ground_truth: dict[str, Any] | None = None

    def __post_init__(self) -> None:
        self.kind = FeatureKind(self.kind)

    def marker_box(self) -> BoundingBox:
        """Box the caliper detector reports for a cross or X marker"""
        cx, cy, size = (int(self.geometry[k]) for k in ("cx", "cy", "size"))
        x0, y0 = cx - size // 2, cy - size // 2
        return BoundingBox(x0 - 2, y0 - 2, x0 + size + 2, y0 + size + 2)


@dataclass
class SceneSpec:
    seed: int
    canvas: tuple[int, int] = (400, 300)
    scan_shape: ScanShape = ScanShape.RECTANGULAR
    speckle_level: float = 0.08
    features: list[FeatureSpec] = field(default_factory=list)

    def __post_init__(self) -> None:
        self.scan_shape = ScanShape(self.scan_shape)

    @property
    def width(self) -> int:
        return self.canvas[0]

    @property
    def height(self) -> int:
        return self.canvas[1]

    def scan_rect(self) -> BoundingBox:
        """Box of the tissue area; leaves a band above and below for burnt-in text"""
        w, h = self.canvas
        x0 = round(0.1 * w)
        return BoundingBox(x0, round(h / 6), w - x0, h - round(h / 15))

    def validate(self) -> None:
        w, h = self.canvas
        if w < 64 or h < 64:
            raise SceneSpecError(f"Canvas {w}x{h} is below the 64x64 minimum")
        if not 0.0 <= self.speckle_level <= 0.5:
            raise SceneSpecError(f"speckle_level must be in [0, 0.5], got {self.speckle_level}")
        for feature in self.features:
            _validate_feature(feature, w, h)


def _require(geometry: dict[str, Any], kind: FeatureKind, *keys: str) -> None:
    missing = [k for k in keys if k not in geometry]
    if missing:
        raise SceneSpecError(f"{kind.value} geometry is missing {', '.join(missing)}")


def _inside(box: BoundingBox, w: int, h: int, kind: FeatureKind) -> None:
    if not box.within(w, h):
        raise SceneSpecError(f"{kind.value} at {box.as_list()} lies outside the {w}x{h} canvas")


def _validate_feature(feature: FeatureSpec, w: int, h: int) -> None:
    g, kind = feature.geometry, feature.kind
    if kind in MARKER_KINDS:
        _require(g, kind, "cx", "cy", "size")
        size = int(g["size"])
        if size < 1:
            raise SceneSpecError("Marker size must be positive")
        lo, hi = DETECTABLE_MARKER_SIZES
        if g.get("negative"):
            if UNDETECTABLE_MARKER_MAX < size < UNDETECTABLE_MARKER_MIN:
                raise SceneSpecError(f"Negative marker of size {size} would still be detected")
        elif not lo <= size <= hi:
            raise SceneSpecError(f"Marker size {size} is outside the detectable range [{lo}, {hi}]")
        _inside(feature.marker_box(), w, h, kind)
    elif kind is FeatureKind.CALIPER_DOTTED_LINE:
        _require(g, kind, "x0", "y0", "x1", "y1", "marker_size")
        half = int(g["marker_size"]) // 2 + 1
        xs, ys = (int(g["x0"]), int(g["x1"])), (int(g["y0"]), int(g["y1"]))
        _inside(BoundingBox(min(xs) - half, min(ys) - half, max(xs) + half + 1, max(ys) + half + 1), w, h, kind)
    elif kind is FeatureKind.DOPPLER_PATCH:
        _require(g, kind, "cx", "cy", "rx", "ry")
        cx, cy, rx, ry = (int(g[k]) for k in ("cx", "cy", "rx", "ry"))
        if rx < 1 or ry < 1:
            raise SceneSpecError("Doppler patch radii must be positive")
        _inside(BoundingBox(cx - rx, cy - ry, cx + rx + 1, cy + ry + 1), w, h, kind)
    elif kind is FeatureKind.INDICATOR_RECT:
        _require(g, kind, "x0", "y0", "x1", "y1")
        x0, y0, x1, y1 = (int(g[k]) for k in ("x0", "y0", "x1", "y1"))
        if x0 >= x1 or y0 >= y1:
            raise SceneSpecError("Indicator rectangle corners out of order")
        _inside(BoundingBox(x0, y0, x1 + 1, y1 + 1), w, h, kind)
    elif kind is FeatureKind.SPANNING_LINE:
        _require(g, kind, "x")
        x = int(g["x"])
        _inside(BoundingBox(x, 0, x + int(g.get("thickness", 2)), h), w, h, kind)
    elif kind is FeatureKind.TEXT_LABEL:
        _require(g, kind, "text", "x", "y")
        if not str(g["text"]).strip():
            raise SceneSpecError("Text label must not be empty")
        if not (0 <= int(g["x"]) < w and 0 < int(g["y"]) <= h):
            raise SceneSpecError(f"Text origin ({g['x']}, {g['y']}) lies outside the canvas")
    elif kind is FeatureKind.DUAL_SEAM:
        x = int(g.get("x", w // 2))
        _inside(BoundingBox(x, 0, x + int(g.get("width", 2)), h), w, h, kind)


@dataclass
class GroundTruth:
    """Expected detector outcomes for one rendered scene"""
    width: int
    height: int
    scan_box: BoundingBox
    shape: ScanShape
    invalid: bool = False
    black_fraction: float = 0.0
    non_b_mode: bool = False
    trigger: FilterTrigger = FilterTrigger.NONE
    doppler_fraction: float = 0.0
    dual_view: bool = False
    seam_x: int | None = None
    calipers_present: bool = False
    caliper_boxes: list[BoundingBox] = field(default_factory=list)
    dotted_calipers: bool = False
    annotation: TextAnnotation = field(default_factory=TextAnnotation)

    @property
    def tokens(self) -> list[OcrToken]:
        return self.annotation.tokens

    def to_report(self, source_id: str) -> ScanReport:
        """Manifest-shaped record so truth files diff directly against pipeline output"""
        shape_class = ShapeClass.RECTANGULAR if self.shape is ScanShape.RECTANGULAR else ShapeClass.REFINED
        method = CaliperMethod.CONTOUR_PLUS_HOUGH if self.dotted_calipers else CaliperMethod.CONTOUR
        return ScanReport(
            source_id=source_id,
            width=self.width,
            height=self.height,
            status=STATUS_OK,
            crop=CropResult(self.scan_box, self.scan_box, shape_class, 0),
            filter=FilterVerdict(
                invalid=self.invalid,
                non_b_mode=self.non_b_mode,
                black_fraction=self.black_fraction,
                color_fraction=self.doppler_fraction,
                trigger=self.trigger,
            ),
            dual_view=DualViewReport(self.dual_view, self.seam_x),
            calipers=CaliperReport(self.calipers_present, list(self.caliper_boxes), method),
            text=self.annotation,
        )
