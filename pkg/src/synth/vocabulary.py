"""Burnt-in label templates and the annotation fields each one should produce"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any

from models.report_model import (
    ClockPosition,
    Distance,
    DistanceUnit,
    Laterality,
    Orientation,
    TextAnnotation,
)

NEUTRAL = "neutral"


@dataclass(frozen=True)
class LabelTemplate:
    text: str
    category: str
    expected: dict[str, Any] = field(default_factory=dict)


def _lat(text: str, side: Laterality) -> LabelTemplate:
    return LabelTemplate(text, "laterality", {"laterality": side})


def _orient(text: str, orientation: Orientation) -> LabelTemplate:
    return LabelTemplate(text, "orientation", {"orientation": orientation})


def _clock(text: str, hour: int, minute: int = 0) -> LabelTemplate:
    return LabelTemplate(text, "position", {"clock_position": ClockPosition(hour, minute)})


def _dist(text: str, value: float, unit: DistanceUnit) -> LabelTemplate:
    return LabelTemplate(text, "distance", {"distance_from_nipple": Distance(value, unit)})


def _flag(text: str, category: str) -> LabelTemplate:
    return LabelTemplate(text, category, {category: True})


VOCABULARY: dict[str, list[LabelTemplate]] = {
    "laterality": [
        _lat("RT", Laterality.RIGHT),
        _lat("RIGHT", Laterality.RIGHT),
        _lat("RT BREAST", Laterality.RIGHT),
        _lat("LT", Laterality.LEFT),
        _lat("LEFT", Laterality.LEFT),
        _lat("LEFT BREAST", Laterality.LEFT),
    ],
    "orientation": [
        _orient("RAD", Orientation.RADIAL),
        _orient("RADIAL", Orientation.RADIAL),
        _orient("ARAD", Orientation.ANTIRADIAL),
        _orient("ANTI RAD", Orientation.ANTIRADIAL),
        _orient("ANTIRADIAL", Orientation.ANTIRADIAL),
        _orient("ANTI-RADIAL", Orientation.ANTIRADIAL),
        _orient("TRANS", Orientation.TRANSVERSE),
        _orient("TRV", Orientation.TRANSVERSE),
        _orient("TRANSVERSE", Orientation.TRANSVERSE),
        _orient("SAG", Orientation.SAGITTAL),
        _orient("SAGITTAL", Orientation.SAGITTAL),
        _orient("LONG", Orientation.LONGITUDINAL),
        _orient("LONGITUDINAL", Orientation.LONGITUDINAL),
        _orient("OBL", Orientation.OBLIQUE),
        _orient("OBLIQUE", Orientation.OBLIQUE),
    ],
    "position": [
        _clock("10:00", 10),
        _clock("3:30", 3, 30),
        _clock("12:00", 12),
        _clock("1:15", 1, 15),
        _clock("2 O'CLOCK", 2),
        _clock("9 OCLOCK", 9),
    ],
    "distance": [
        _dist("3 CM FN", 3.0, DistanceUnit.CM),
        _dist("2.5 CM FN", 2.5, DistanceUnit.CM),
        _dist("FN 4 CM", 4.0, DistanceUnit.CM),
        _dist("15 MM FN", 15.0, DistanceUnit.MM),
        _dist("1 CM FROM NIPPLE", 1.0, DistanceUnit.CM),
        _dist("5 CM N", 5.0, DistanceUnit.CM),
    ],
    "axilla": [
        _flag("AX", "axilla"),
        _flag("AXILLA", "axilla"),
        _flag("AXILLARY", "axilla"),
    ],
    "lesion_measurement": [
        _flag("1.2 X 0.8 CM", "lesion_measurement"),
        _flag("12 X 8 MM", "lesion_measurement"),
        _flag("1.1 X 0.9 X 0.7 CM", "lesion_measurement"),
        _flag("2.3*1.4", "lesion_measurement"),
        _flag("0.5 X 0.4", "lesion_measurement"),
    ],
    "procedural": [
        _flag("US GUIDED BIOPSY", "procedural"),
        _flag("CLIP PLACED", "procedural"),
        _flag("CORE BX", "procedural"),
        _flag("FNA", "procedural"),
        _flag("PRE-FIRE", "procedural"),
        _flag("POST-FIRE", "procedural"),
        _flag("WIRE LOC", "procedural"),
        _flag("MARKER", "procedural"),
        _flag("COIL", "procedural"),
        _flag("ASPIRATION", "procedural"),
        _flag("NEEDLE", "procedural"),
    ],
    NEUTRAL: [
        LabelTemplate("CYST", NEUTRAL),
        LabelTemplate("MASS", NEUTRAL),
        LabelTemplate("LESION", NEUTRAL),
        LabelTemplate("NODULE", NEUTRAL),
        LabelTemplate("BREAST", NEUTRAL),
        LabelTemplate("US", NEUTRAL),
    ],
}

# Categories that may be combined freely within one scene, at most one template each
FIELD_TEMPLATE_CATEGORIES = [c for c in VOCABULARY if c not in (NEUTRAL, "procedural")]


def apply_expected(annotation: TextAnnotation, expected: dict[str, Any]) -> None:
    """Set the fields of `expected` on an annotation"""
    for name, value in expected.items():
        setattr(annotation, name, value)


def expected_annotation(templates: list[LabelTemplate]) -> TextAnnotation:
    """Fields a correct classifier reports for these templates, read in the given order"""
    annotation = TextAnnotation(
        text_present=any(len(w) >= 2 for t in templates for w in t.text.split()),
        raw_concatenation=" ".join(t.text for t in templates),
    )
    for template in templates:
        apply_expected(annotation, template.expected)
    return annotation
