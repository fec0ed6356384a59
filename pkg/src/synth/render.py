"""
Deterministic painter for synthetic scans.

A scene is a speckle-textured scan area on a black canvas with features drawn on top
in list order. Drawing uses OpenCV primitives with LINE_8 rasterization only, so a
given SceneSpec always produces the same bytes. Colored overlays are luma-matched to
the tissue underneath so they do not create grayscale edges.
"""

from __future__ import annotations

import logging

import cv2
import numpy as np

from models.image_model import BoundingBox, ScanImage
from models.report_model import FilterTrigger, OcrToken
from synth.scene_model import FeatureKind, FeatureSpec, GroundTruth, ScanShape, SceneSpec
from synth.vocabulary import apply_expected

logger = logging.getLogger(__name__)

TISSUE_MEAN = 90.0
TISSUE_RANGE = (30.0, 160.0)
SPECKLE_SIGMA = 4.0

DOPPLER_RED = (255, 60, 40)
DOPPLER_BLUE = (70, 110, 255)
# Tissue luma under a Doppler patch is clamped here so the overlay keeps its saturation
DOPPLER_LUMA = (60, 110)
INDICATOR_GREEN = (0, 255, 0)
CALIPER_WHITE = (255, 255, 255)
SEAM_VALUE = 225

FONT = cv2.FONT_HERSHEY_SIMPLEX
FONT_SCALE = 0.6
TEXT_COLOR = (255, 255, 255)
TOKEN_CONFIDENCE = 0.99

DASH_LENGTH = 3
DASH_GAP = 4

# Shadow of an IRREGULAR scan, as fractions of the scan rectangle
SHADOW_COLUMNS = (0.75, 0.95)
SHADOW_TOP = 0.5
SHADOW_RAMP = 12
SHADOW_FLOOR = 0.05


def _luma(rgb: np.ndarray) -> np.ndarray:
    rgb = rgb.astype(np.uint32)
    return (299 * rgb[..., 0] + 587 * rgb[..., 1] + 114 * rgb[..., 2] + 500) // 1000


def _speckle(rng: np.random.Generator, width: int, height: int, level: float) -> np.ndarray:
    noise = cv2.GaussianBlur(rng.standard_normal((height, width)), (0, 0), SPECKLE_SIGMA)
    std = float(noise.std())
    if std > 0:
        noise = noise / std
    return np.clip(TISSUE_MEAN * (1.0 + level * noise), *TISSUE_RANGE)


def _ramp(distance: np.ndarray) -> np.ndarray:
    """Smoothstep from 0 at distance 0 to 1 at SHADOW_RAMP px"""
    t = np.clip(distance / SHADOW_RAMP, 0.0, 1.0)
    return t * t * (3.0 - 2.0 * t)


def scan_profile(spec: SceneSpec) -> tuple[np.ndarray, np.ndarray]:
    """(mask of the scan area, multiplicative brightness) for the scene's shape"""
    w, h = spec.canvas
    rect = spec.scan_rect()
    ys, xs = np.mgrid[0:h, 0:w].astype(np.float64)
    inside = (xs >= rect.x_left) & (xs < rect.x_right) & (ys >= rect.y_top) & (ys < rect.y_bottom)
    gain = np.ones((h, w))

    rw, rh = rect.w, rect.h
    t = (ys - rect.y_top) / max(rh - 1, 1)
    if spec.scan_shape in (ScanShape.TRAPEZOIDAL, ScanShape.CONVEX):
        inset = 0.2 * rw * (1.0 - t)
        inside &= (xs >= rect.x_left + inset) & (xs < rect.x_right - inset)
    if spec.scan_shape is ScanShape.CONVEX:
        u = (xs - (rect.x_left + rect.x_right - 1) / 2.0) / (rw / 2.0)
        inside &= ys <= rect.y_bottom - 1 - 0.1 * rh * u * u
    if spec.scan_shape is ScanShape.IRREGULAR:
        x_lo = rect.x_left + SHADOW_COLUMNS[0] * rw
        x_hi = rect.x_left + SHADOW_COLUMNS[1] * rw
        y_lo = rect.y_top + SHADOW_TOP * rh
        across = _ramp(np.minimum(xs - x_lo, x_hi - xs))
        down = _ramp(ys - y_lo)
        depth = np.where((xs >= x_lo) & (xs < x_hi) & (ys >= y_lo), across * down, 0.0)
        gain = 1.0 - (1.0 - SHADOW_FLOOR) * depth
    return inside, gain


def _paint_marker(canvas: np.ndarray, feature: FeatureSpec) -> None:
    g = feature.geometry
    cx, cy, size = int(g["cx"]), int(g["cy"]), int(g["size"])
    x0, y0 = cx - size // 2, cy - size // 2
    x1, y1 = x0 + size - 1, y0 + size - 1
    if feature.kind is FeatureKind.CALIPER_CROSS:
        cv2.line(canvas, (x0, cy), (x1, cy), CALIPER_WHITE, 1, cv2.LINE_8)
        cv2.line(canvas, (cx, y0), (cx, y1), CALIPER_WHITE, 1, cv2.LINE_8)
    else:
        cv2.line(canvas, (x0, y0), (x1, y1), CALIPER_WHITE, 1, cv2.LINE_8)
        cv2.line(canvas, (x0, y1), (x1, y0), CALIPER_WHITE, 1, cv2.LINE_8)


def _paint_dotted(canvas: np.ndarray, feature: FeatureSpec) -> list[BoundingBox]:
    """Two X markers joined by a dashed line through their centres; returns the marker boxes"""
    g = feature.geometry
    ends = [(int(g["x0"]), int(g["y0"])), (int(g["x1"]), int(g["y1"]))]
    size = int(g["marker_size"])
    boxes = []
    for cx, cy in ends:
        marker = FeatureSpec(FeatureKind.CALIPER_X, {"cx": cx, "cy": cy, "size": size})
        _paint_marker(canvas, marker)
        boxes.append(marker.marker_box())

    (ax, ay), (bx, by) = ends
    length = int(np.hypot(bx - ax, by - ay))
    for start in range(0, length, DASH_LENGTH + DASH_GAP):
        stop = min(start + DASH_LENGTH - 1, length)
        p = (round(ax + (bx - ax) * start / length), round(ay + (by - ay) * start / length))
        q = (round(ax + (bx - ax) * stop / length), round(ay + (by - ay) * stop / length))
        cv2.line(canvas, p, q, CALIPER_WHITE, 1, cv2.LINE_8)
    return boxes


def _paint_doppler(canvas: np.ndarray, feature: FeatureSpec) -> int:
    """Two-tone flow patch; returns the number of painted pixels"""
    g = feature.geometry
    cx, cy, rx, ry = (int(g[k]) for k in ("cx", "cy", "rx", "ry"))
    patch = np.zeros(canvas.shape[:2], dtype=np.uint8)
    cv2.ellipse(patch, (cx, cy), (rx, ry), 0, 0, 360, 255, -1, cv2.LINE_8)
    painted = patch > 0

    tissue = np.clip(_luma(canvas), *DOPPLER_LUMA).astype(np.float64)
    rows = np.arange(canvas.shape[0])[:, None]
    for color, region in ((DOPPLER_RED, painted & (rows < cy)), (DOPPLER_BLUE, painted & (rows >= cy))):
        base = np.array(color, dtype=np.float64)
        scale = tissue[region] / float(_luma(base.astype(np.uint8)))
        canvas[region] = np.clip(np.rint(scale[:, None] * base), 0, 255).astype(np.uint8)
    return int(np.count_nonzero(painted))


def _paint_text(canvas: np.ndarray, feature: FeatureSpec) -> list[OcrToken]:
    """Draw each word separately so token boxes are exact; returns one token per word"""
    g = feature.geometry
    x, baseline = int(g["x"]), int(g["y"])
    scale = float(g.get("scale", FONT_SCALE))
    (space_w, _), _ = cv2.getTextSize(" ", FONT, scale, 1)
    tokens = []
    for word in str(g["text"]).split():
        (tw, th), descent = cv2.getTextSize(word, FONT, scale, 1)
        cv2.putText(canvas, word, (x, baseline), FONT, scale, TEXT_COLOR, 1, cv2.LINE_8)
        tokens.append(OcrToken(word, BoundingBox(x, baseline - th, x + tw, baseline + descent), TOKEN_CONFIDENCE))
        x += tw + space_w
    return tokens


def space_width(scale: float = FONT_SCALE) -> int:
    return int(cv2.getTextSize(" ", FONT, scale, 1)[0][0])


def text_width(text: str, scale: float = FONT_SCALE) -> int:
    """Rendered width of a label, word by word as `_paint_text` draws it"""
    space_w = space_width(scale)
    widths = [cv2.getTextSize(word, FONT, scale, 1)[0][0] for word in text.split()]
    return sum(widths) + space_w * max(len(widths) - 1, 0)


def render(spec: SceneSpec) -> tuple[ScanImage, GroundTruth]:
    """Paint a scene and collect what each detector should report for it"""
    spec.validate()
    w, h = spec.canvas
    rng = np.random.default_rng(spec.seed)

    inside, gain = scan_profile(spec)
    tissue = np.where(inside, _speckle(rng, w, h, spec.speckle_level) * gain, 0.0)
    gray = np.clip(np.rint(tissue), 0, 255).astype(np.uint8)
    canvas = np.ascontiguousarray(np.repeat(gray[:, :, None], 3, axis=2))

    rect = spec.scan_rect()
    ys, xs = np.nonzero(inside)
    scan_box = BoundingBox(int(xs.min()), int(ys.min()), int(xs.max()) + 1, int(ys.max()) + 1)
    truth = GroundTruth(width=w, height=h, scan_box=scan_box, shape=spec.scan_shape)
    tokens: list[OcrToken] = []
    painted_doppler = 0

    for feature in spec.features:
        kind = feature.kind
        if kind is FeatureKind.BLACKOUT:
            canvas[rect.y_top:rect.y_bottom, rect.x_left:rect.x_right] = 0
            truth.invalid = True
            truth.scan_box = BoundingBox.full(w, h)
        elif kind in (FeatureKind.CALIPER_CROSS, FeatureKind.CALIPER_X):
            _paint_marker(canvas, feature)
            if not feature.geometry.get("negative"):
                truth.calipers_present = True
                truth.caliper_boxes.append(feature.marker_box())
        elif kind is FeatureKind.CALIPER_DOTTED_LINE:
            truth.caliper_boxes.extend(_paint_dotted(canvas, feature))
            truth.calipers_present = True
            truth.dotted_calipers = True
        elif kind is FeatureKind.DOPPLER_PATCH:
            painted_doppler += _paint_doppler(canvas, feature)
            truth.non_b_mode = True
            if truth.trigger is FilterTrigger.NONE:
                truth.trigger = FilterTrigger.COLOR_AREA
        elif kind is FeatureKind.INDICATOR_RECT:
            g = feature.geometry
            cv2.rectangle(canvas, (int(g["x0"]), int(g["y0"])), (int(g["x1"]), int(g["y1"])),
                          INDICATOR_GREEN, int(g.get("thickness", 2)), cv2.LINE_8)
            truth.non_b_mode = True
            truth.trigger = FilterTrigger.INDICATOR_SHAPE
        elif kind is FeatureKind.SPANNING_LINE:
            x = int(feature.geometry["x"])
            canvas[rect.y_top:rect.y_bottom, x:x + int(feature.geometry.get("thickness", 2))] = INDICATOR_GREEN
            truth.non_b_mode = True
            truth.trigger = FilterTrigger.INDICATOR_SHAPE
        elif kind is FeatureKind.TEXT_LABEL:
            tokens.extend(_paint_text(canvas, feature))
            if feature.ground_truth:
                apply_expected(truth.annotation, feature.ground_truth)
        elif kind is FeatureKind.DUAL_SEAM:
            x = int(feature.geometry.get("x", w // 2))
            value = int(feature.geometry.get("value", SEAM_VALUE))
            canvas[rect.y_top:rect.y_bottom, x:x + int(feature.geometry.get("width", 2))] = value
            truth.dual_view = True
            truth.seam_x = w // 2

    truth.doppler_fraction = painted_doppler / float(w * h)
    crop = _luma(canvas[truth.scan_box.y_top:truth.scan_box.y_bottom,
                        truth.scan_box.x_left:truth.scan_box.x_right])
    truth.black_fraction = float(np.count_nonzero(crop < 5)) / crop.size
    truth.annotation.tokens = tokens
    truth.annotation.raw_concatenation = " ".join(t.text for t in tokens)
    truth.annotation.text_present = any(len(t.text) >= 2 for t in tokens)

    logger.debug("Rendered scene seed=%d shape=%s with %d features", spec.seed,
                 spec.scan_shape.value, len(spec.features))
    if not truth.non_b_mode:
        truth.trigger = FilterTrigger.GRAY_PASS
    return ScanImage(canvas, source_id=f"seed{spec.seed}"), truth
