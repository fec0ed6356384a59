"""
Reproducible labeled corpora of synthetic scans.

Each item's category comes from a low-discrepancy sequence over the mix weights, so
any prefix of a corpus is itself well stratified and corpus(s, k) is exactly the first
k items of corpus(s, n). Item geometry is drawn from a generator seeded with
(seed, index), which makes items independent of each other and of n.
"""

from __future__ import annotations

import logging
import math
import os
from collections.abc import Callable, Iterable, Iterator

import numpy as np

from exceptions import ParameterError
from models.image_model import ScanImage
from models.report_model import ScanReport
from processing.imgprim import encode_png
from processing.ocr_backends import format_token_line
from synth.render import FONT_SCALE, render, space_width, text_width
from synth.scene_model import FeatureKind, FeatureSpec, GroundTruth, ScanShape, SceneSpec
from synth.vocabulary import FIELD_TEMPLATE_CATEGORIES, NEUTRAL, VOCABULARY, LabelTemplate
from utils.manifest_writer import write_manifest

logger = logging.getLogger(__name__)

# Mutually exclusive scan-area categories; the remainder of the unit interval is plain tissue
EXCLUSIVE_CATEGORIES = ["calipers", "dotted_calipers", "invalid", "dual_view", "doppler", "indicator", "spanning"]
# Independent label categories; procedural labels force text on
LABEL_CATEGORIES = ["text", "procedural"]

MIX_PRESETS: dict[str, dict[str, float]] = {
    # proportions of a clinical breast ultrasound archive sample
    "default": {
        "calipers": 0.207, "invalid": 0.0047, "dual_view": 0.0093, "doppler": 0.0232,
        "indicator": 0.006, "spanning": 0.004, "text": 0.926, "procedural": 0.0721,
    },
    # public benchmark proportions: fewer labels, dotted measurement lines common
    "busi": {
        "calipers": 0.06, "dotted_calipers": 0.10, "doppler": 0.02, "indicator": 0.005,
        "text": 0.17,
    },
    "calipers": {"calipers": 1.0, "text": 0.5},
    "dotted": {"dotted_calipers": 0.5},
    "clean": {},
}

_STEP_CATEGORY = (math.sqrt(5.0) - 1.0) / 2.0
_STEP_TEXT = math.sqrt(2.0) - 1.0
_STEP_PROCEDURAL = math.sqrt(3.0) - 1.0

LINE_BASELINES_TOP = (20, 40)
TEXT_MARGIN = 8
# Smallest canvas with room for the central feature region and the text bands
MIN_CORPUS_CANVAS = (300, 270)


def resolve_mix(mix: str | dict[str, float] | None) -> dict[str, float]:
    if mix is None:
        mix = "default"
    if isinstance(mix, str):
        if mix not in MIX_PRESETS:
            raise ParameterError(f"Unknown mix preset: {mix} (choose from {', '.join(MIX_PRESETS)})")
        return dict(MIX_PRESETS[mix])
    unknown = sorted(set(mix) - set(EXCLUSIVE_CATEGORIES) - set(LABEL_CATEGORIES))
    if unknown:
        raise ParameterError(f"Unknown mix categories: {', '.join(unknown)}")
    if any(v < 0 for v in mix.values()):
        raise ParameterError("Mix weights must be non-negative")
    if sum(mix.get(c, 0.0) for c in EXCLUSIVE_CATEGORIES) > 1.0 + 1e-9:
        raise ParameterError("Scan-area category weights add up to more than 1")
    if any(mix.get(c, 0.0) > 1.0 for c in LABEL_CATEGORIES):
        raise ParameterError("Label category weights must be at most 1")
    return dict(mix)


def _phases(seed: int) -> np.ndarray:
    return np.random.default_rng(seed).random(3)


def _sequence(phase: float, step: float, index: int) -> float:
    return (phase + (index + 1) * step) % 1.0


def item_categories(seed: int, index: int, mix: dict[str, float]) -> tuple[str | None, bool, bool]:
    """(exclusive category or None, has text, has procedural label) for corpus item `index`"""
    phases = _phases(seed)
    u = _sequence(phases[0], _STEP_CATEGORY, index)
    category = None
    edge = 0.0
    for name in EXCLUSIVE_CATEGORIES:
        edge += mix.get(name, 0.0)
        if u < edge:
            category = name
            break
    procedural = _sequence(phases[2], _STEP_PROCEDURAL, index) < mix.get("procedural", 0.0)
    text = procedural or _sequence(phases[1], _STEP_TEXT, index) < mix.get("text", 0.0)
    return category, text, procedural


def _marker_features(rng: np.random.Generator, spec: SceneSpec) -> list[FeatureSpec]:
    """One or two solid markers in the central region, at least 20 px apart"""
    w, h = spec.canvas
    x_lo, x_hi = int(0.3 * w) + 4, int(0.7 * w) - 4
    y_lo, y_hi = int(0.3 * h) + 4, int(0.7 * h) - 4
    kind = FeatureKind.CALIPER_CROSS if rng.random() < 0.5 else FeatureKind.CALIPER_X
    size = int(rng.integers(12, 45))
    half = size // 2 + 3
    cx = int(rng.integers(x_lo + half, x_hi - half))
    cy = int(rng.integers(y_lo + half, y_hi - half))
    features = [FeatureSpec(kind, {"cx": cx, "cy": cy, "size": size})]

    spacing = size + 24
    if rng.random() < 0.5:
        # second marker along whichever axis has room
        candidates = [(cx + d, cy) for d in (spacing, -spacing)] + [(cx, cy + d) for d in (spacing, -spacing)]
        fits = [(x, y) for x, y in candidates
                if x_lo + half <= x < x_hi - half and y_lo + half <= y < y_hi - half]
        if fits:
            x, y = fits[int(rng.integers(len(fits)))]
            features.append(FeatureSpec(kind, {"cx": x, "cy": y, "size": size}))
    return features


def _dotted_feature(rng: np.random.Generator, spec: SceneSpec) -> FeatureSpec:
    w, h = spec.canvas
    size = int(rng.integers(30, 41))
    span = int(rng.integers(60, 101))
    half = size // 2 + 3
    x_lo, x_hi = int(0.3 * w) + 4 + half, int(0.7 * w) - 4 - half
    x0 = int(rng.integers(x_lo, max(x_lo + 1, x_hi - span)))
    span = min(span, x_hi - x0)
    cy = int(rng.integers(int(0.3 * h) + 4 + half, int(0.7 * h) - 4 - half))
    return FeatureSpec(FeatureKind.CALIPER_DOTTED_LINE,
                       {"x0": x0, "y0": cy, "x1": x0 + span, "y1": cy, "marker_size": size})


def _doppler_feature(rng: np.random.Generator, spec: SceneSpec) -> FeatureSpec:
    w, h = spec.canvas
    fraction = float(rng.uniform(0.01, 0.03))
    aspect = float(rng.uniform(0.6, 1.0))
    rx = max(2, round(math.sqrt(fraction * w * h / (math.pi * aspect))))
    ry = max(2, round(rx * aspect))
    cx = int(rng.integers(int(0.3 * w) + rx, int(0.7 * w) - rx))
    cy = int(rng.integers(int(0.3 * h) + ry, int(0.7 * h) - ry))
    return FeatureSpec(FeatureKind.DOPPLER_PATCH, {"cx": cx, "cy": cy, "rx": rx, "ry": ry})


def _indicator_feature(rng: np.random.Generator, spec: SceneSpec) -> FeatureSpec:
    w, h = spec.canvas
    rw = int(rng.integers(int(0.225 * w), int(0.275 * w) + 1))
    rh = int(rng.integers(int(0.27 * h), int(0.33 * h) + 1))
    x0 = int(rng.integers(int(0.3 * w), int(0.7 * w) - rw))
    y0 = int(rng.integers(int(0.3 * h), int(0.7 * h) - rh))
    return FeatureSpec(FeatureKind.INDICATOR_RECT, {"x0": x0, "y0": y0, "x1": x0 + rw - 1, "y1": y0 + rh - 1})


def _spanning_feature(rng: np.random.Generator, spec: SceneSpec) -> FeatureSpec:
    w = spec.canvas[0]
    # left of the midline so the line never reads as a dual-view seam
    return FeatureSpec(FeatureKind.SPANNING_LINE, {"x": int(rng.integers(int(0.3 * w), w // 2 - 15))})


def choose_templates(rng: np.random.Generator, procedural: bool) -> list[LabelTemplate]:
    """One template from each of 1-3 field categories, plus procedural and neutral words"""
    count = int(rng.integers(1, 4))
    picked = rng.choice(len(FIELD_TEMPLATE_CATEGORIES), size=count, replace=False)
    categories = [FIELD_TEMPLATE_CATEGORIES[i] for i in sorted(picked)]
    if procedural:
        categories.append("procedural")
    if rng.random() < 0.5:
        categories.append(NEUTRAL)
    order = rng.permutation(len(categories))
    templates = []
    for i in order:
        options = VOCABULARY[categories[i]]
        templates.append(options[int(rng.integers(len(options)))])
    return templates


def layout_labels(templates: list[LabelTemplate], canvas: tuple[int, int]) -> list[FeatureSpec]:
    """
    Pack whole templates into the text bands: two lines above the scan area and one
    below it. Templates that do not fit are dropped and do not count toward the truth.
    """
    w, h = canvas
    baselines = [*LINE_BASELINES_TOP, h - 4]
    max_width = w - 2 * TEXT_MARGIN
    space = space_width()
    features: list[FeatureSpec] = []
    line, x = 0, TEXT_MARGIN
    for template in templates:
        width = text_width(template.text)
        if x > TEXT_MARGIN and x + width > TEXT_MARGIN + max_width:
            line, x = line + 1, TEXT_MARGIN
        if line >= len(baselines) or width > max_width:
            break
        features.append(FeatureSpec(FeatureKind.TEXT_LABEL,
                                    {"text": template.text, "x": x, "y": baselines[line], "scale": FONT_SCALE},
                                    dict(template.expected)))
        x += width + space
    return features


_SCAN_FEATURES: dict[str, Callable[[np.random.Generator, SceneSpec], list[FeatureSpec]]] = {
    "calipers": _marker_features,
    "dotted_calipers": lambda rng, spec: [_dotted_feature(rng, spec)],
    "invalid": lambda rng, spec: [FeatureSpec(FeatureKind.BLACKOUT)],
    "dual_view": lambda rng, spec: [FeatureSpec(FeatureKind.DUAL_SEAM, {"x": spec.canvas[0] // 2})],
    "doppler": lambda rng, spec: [_doppler_feature(rng, spec)],
    "indicator": lambda rng, spec: [_indicator_feature(rng, spec)],
    "spanning": lambda rng, spec: [_spanning_feature(rng, spec)],
}


def scene_spec(seed: int, index: int, mix: str | dict[str, float] | None = None,
               canvas: tuple[int, int] = (400, 300)) -> SceneSpec:
    """Scene description of corpus item `index`"""
    if canvas[0] < MIN_CORPUS_CANVAS[0] or canvas[1] < MIN_CORPUS_CANVAS[1]:
        min_w, min_h = MIN_CORPUS_CANVAS
        raise ParameterError(f"Corpus canvas must be at least {min_w}x{min_h}, got {canvas[0]}x{canvas[1]}")
    weights = resolve_mix(mix)
    category, text, procedural = item_categories(seed, index, weights)
    rng = np.random.default_rng([seed, index])
    shapes = list(ScanShape)
    spec = SceneSpec(
        seed=int(rng.integers(0, 2**31 - 1)),
        canvas=canvas,
        scan_shape=shapes[int(rng.integers(len(shapes)))],
    )
    if category is not None:
        spec.features.extend(_SCAN_FEATURES[category](rng, spec))
    if text:
        spec.features.extend(layout_labels(choose_templates(rng, procedural), canvas))
    return spec


def corpus_id(index: int) -> str:
    return f"scene_{index:05d}.png"


def iter_corpus(seed: int, n: int, mix: str | dict[str, float] | None = None,
                canvas: tuple[int, int] = (400, 300)) -> Iterator[tuple[ScanImage, GroundTruth]]:
    """Render corpus items one at a time; arguments are checked before the first item"""
    if n < 1:
        raise ParameterError(f"Corpus size must be at least 1, got {n}")
    weights = resolve_mix(mix)
    return (_render_item(seed, index, weights, canvas) for index in range(n))


def _render_item(seed: int, index: int, weights: dict[str, float],
                 canvas: tuple[int, int]) -> tuple[ScanImage, GroundTruth]:
    img, truth = render(scene_spec(seed, index, weights, canvas))
    return img.with_source_id(corpus_id(index)), truth


def corpus(seed: int, n: int, mix: str | dict[str, float] | None = None,
           canvas: tuple[int, int] = (400, 300)) -> list[tuple[ScanImage, GroundTruth]]:
    """Render n labeled scenes; the first k items never depend on n"""
    return list(iter_corpus(seed, n, mix, canvas))


def _write_items(items: Iterable[tuple[ScanImage, GroundTruth]], out_dir: str,
                 sidecar_suffix: str) -> Iterator[ScanReport]:
    for img, truth in items:
        name = os.path.basename(img.source_id)
        path = os.path.join(out_dir, name)
        encode_png(img, path)
        sidecar = os.path.splitext(path)[0] + sidecar_suffix
        with open(sidecar, "w", encoding="utf-8", newline="\n") as f:
            for token in truth.tokens:
                f.write(format_token_line(token) + "\n")
        yield truth.to_report(name)


def export_corpus(items: Iterable[tuple[ScanImage, GroundTruth]], out_dir: str,
                  sidecar_suffix: str = ".ocr.tsv", truth_name: str = "truth.jsonl") -> str:
    """
    Write images as PNG, an OCR sidecar of the rendered label tokens next to each
    image, and a truth file with one manifest-shaped record per image.

    Each item is written before the next one is drawn from `items`, so exporting
    iter_corpus() holds one image at a time. Returns the path of the truth file.
    """
    os.makedirs(out_dir, exist_ok=True)
    truth_path = os.path.join(out_dir, truth_name)
    count = write_manifest(_write_items(items, out_dir, sidecar_suffix), truth_path)
    logger.info("Exported %d scenes to %s", count, out_dir)
    return truth_path
