"""Per-image detection outcomes and their manifest serialization"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Any

from constants import STATUS_DECODE_ERROR, STATUS_OCR_SKIPPED, STATUS_OK
from exceptions import ParameterError
from models.config_model import CaliperMethod
from models.image_model import BoundingBox


class FilterTrigger(str, Enum):
    GRAY_PASS = "GRAY_PASS"
    INDICATOR_SHAPE = "INDICATOR_SHAPE"
    COLOR_AREA = "COLOR_AREA"
    NONE = "NONE"


class ShapeClass(str, Enum):
    RECTANGULAR = "RECTANGULAR"
    REFINED = "REFINED"


class Laterality(str, Enum):
    LEFT = "LEFT"
    RIGHT = "RIGHT"
    NONE = "NONE"


class Orientation(str, Enum):
    RADIAL = "RADIAL"
    ANTIRADIAL = "ANTIRADIAL"
    TRANSVERSE = "TRANSVERSE"
    SAGITTAL = "SAGITTAL"
    LONGITUDINAL = "LONGITUDINAL"
    OBLIQUE = "OBLIQUE"
    NONE = "NONE"


class DistanceUnit(str, Enum):
    CM = "CM"
    MM = "MM"


@dataclass
class FilterVerdict:
    invalid: bool = False
    non_b_mode: bool = False
    black_fraction: float = 0.0
    color_fraction: float = 0.0
    trigger: FilterTrigger = FilterTrigger.NONE

    def to_dict(self) -> dict[str, Any]:
        return {
            "invalid": self.invalid,
            "non_b_mode": self.non_b_mode,
            "black_fraction": round(self.black_fraction, 6),
            "color_fraction": round(self.color_fraction, 6),
            "trigger": self.trigger.value,
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> FilterVerdict:
        return cls(
            invalid=bool(data.get("invalid", False)),
            non_b_mode=bool(data.get("non_b_mode", False)),
            black_fraction=float(data.get("black_fraction", 0.0)),
            color_fraction=float(data.get("color_fraction", 0.0)),
            trigger=FilterTrigger(data.get("trigger", "NONE")),
        )


@dataclass
class CaliperReport:
    present: bool = False
    boxes: list[BoundingBox] = field(default_factory=list)
    method_used: CaliperMethod = CaliperMethod.CONTOUR

    def to_dict(self) -> dict[str, Any]:
        return {
            "present": self.present,
            "boxes": [b.as_list() for b in self.boxes],
            "method_used": self.method_used.value,
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> CaliperReport:
        return cls(
            present=bool(data.get("present", False)),
            boxes=[BoundingBox.from_list(b) for b in data.get("boxes", [])],
            method_used=CaliperMethod(data.get("method_used", "CONTOUR")),
        )


@dataclass
class DualViewReport:
    flag: bool = False
    split_x: int | None = None

    def to_dict(self) -> dict[str, Any]:
        return {"flag": self.flag, "split_x": self.split_x}

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> DualViewReport:
        split_x = data.get("split_x")
        return cls(flag=bool(data.get("flag", False)), split_x=None if split_x is None else int(split_x))


@dataclass
class CropResult:
    stage1_box: BoundingBox
    final_box: BoundingBox
    shape_class: ShapeClass
    mode_value: int

    def to_dict(self) -> dict[str, Any]:
        return {
            "stage1_box": self.stage1_box.as_list(),
            "final_box": self.final_box.as_list(),
            "shape_class": self.shape_class.value,
            "mode_value": self.mode_value,
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> CropResult:
        return cls(
            stage1_box=BoundingBox.from_list(data["stage1_box"]),
            final_box=BoundingBox.from_list(data["final_box"]),
            shape_class=ShapeClass(data["shape_class"]),
            mode_value=int(data["mode_value"]),
        )


@dataclass(frozen=True)
class OcrToken:
    text: str
    bbox: BoundingBox
    confidence: float

    def __post_init__(self) -> None:
        if not self.text:
            raise ParameterError("OCR token text must not be empty")
        if not 0.0 <= self.confidence <= 1.0:
            raise ParameterError(f"OCR confidence must be in [0, 1], got {self.confidence}")

    def to_dict(self) -> dict[str, Any]:
        return {"text": self.text, "bbox": self.bbox.as_list(), "confidence": round(self.confidence, 4)}

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> OcrToken:
        return cls(str(data["text"]), BoundingBox.from_list(data["bbox"]), float(data["confidence"]))


@dataclass(frozen=True)
class Distance:
    value: float
    unit: DistanceUnit

    def __post_init__(self) -> None:
        if self.value <= 0:
            raise ParameterError(f"Distance must be positive, got {self.value}")

    def to_dict(self) -> dict[str, Any]:
        return {"value": self.value, "unit": self.unit.value}

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> Distance:
        return cls(float(data["value"]), DistanceUnit(data["unit"]))


@dataclass(frozen=True)
class ClockPosition:
    hour: int
    minute: int = 0

    def __post_init__(self) -> None:
        if not 1 <= self.hour <= 12 or not 0 <= self.minute <= 59:
            raise ParameterError(f"Invalid clock position {self.hour}:{self.minute:02d}")

    def to_dict(self) -> dict[str, Any]:
        return {"hour": self.hour, "minute": self.minute}

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> ClockPosition:
        return cls(int(data["hour"]), int(data.get("minute", 0)))


@dataclass
class TextAnnotation:
    """OCR tokens plus the fields the annotation grammar recognized in them"""
    tokens: list[OcrToken] = field(default_factory=list)
    laterality: Laterality = Laterality.NONE
    orientation: Orientation = Orientation.NONE
    distance_from_nipple: Distance | None = None
    clock_position: ClockPosition | None = None
    axilla: bool = False
    lesion_measurement: bool = False
    procedural: bool = False
    text_present: bool = False
    raw_concatenation: str = ""
    # field name -> matched span texts that justify it
    evidence: dict[str, list[str]] = field(default_factory=dict)
    notes: list[str] = field(default_factory=list)

    def positive_fields(self) -> list[str]:
        fields = []
        if self.laterality is not Laterality.NONE:
            fields.append("laterality")
        if self.orientation is not Orientation.NONE:
            fields.append("orientation")
        if self.distance_from_nipple is not None:
            fields.append("distance")
        if self.clock_position is not None:
            fields.append("position")
        if self.axilla:
            fields.append("axilla")
        if self.lesion_measurement:
            fields.append("lesion_measurement")
        if self.procedural:
            fields.append("procedural")
        return fields

    def to_dict(self) -> dict[str, Any]:
        return {
            "tokens": [t.to_dict() for t in self.tokens],
            "laterality": self.laterality.value,
            "orientation": self.orientation.value,
            "distance_from_nipple": self.distance_from_nipple.to_dict() if self.distance_from_nipple else None,
            "clock_position": self.clock_position.to_dict() if self.clock_position else None,
            "axilla": self.axilla,
            "lesion_measurement": self.lesion_measurement,
            "procedural": self.procedural,
            "text_present": self.text_present,
            "raw_concatenation": self.raw_concatenation,
            "evidence": {k: list(v) for k, v in sorted(self.evidence.items())},
            "notes": list(self.notes),
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> TextAnnotation:
        distance = data.get("distance_from_nipple")
        clock = data.get("clock_position")
        return cls(
            tokens=[OcrToken.from_dict(t) for t in data.get("tokens", [])],
            laterality=Laterality(data.get("laterality", "NONE")),
            orientation=Orientation(data.get("orientation", "NONE")),
            distance_from_nipple=Distance.from_dict(distance) if distance else None,
            clock_position=ClockPosition.from_dict(clock) if clock else None,
            axilla=bool(data.get("axilla", False)),
            lesion_measurement=bool(data.get("lesion_measurement", False)),
            procedural=bool(data.get("procedural", False)),
            text_present=bool(data.get("text_present", False)),
            raw_concatenation=str(data.get("raw_concatenation", "")),
            evidence={k: list(v) for k, v in data.get("evidence", {}).items()},
            notes=list(data.get("notes", [])),
        )


@dataclass
class ScanReport:
    """Everything the pipeline learned about one input image"""
    source_id: str
    width: int = 0
    height: int = 0
    status: str = STATUS_OK
    crop: CropResult | None = None
    filter: FilterVerdict | None = None
    dual_view: DualViewReport | None = None
    calipers: CaliperReport | None = None
    text: TextAnnotation | None = None
    timings: dict[str, float] | None = None
    error: str | None = None

    def __post_init__(self) -> None:
        if self.status not in (STATUS_OK, STATUS_DECODE_ERROR, STATUS_OCR_SKIPPED):
            raise ParameterError(f"Unknown record status: {self.status}")

    def to_dict(self) -> dict[str, Any]:
        """Manifest record; stages that did not run are left out entirely"""
        record: dict[str, Any] = {
            "source_id": self.source_id,
            "width": self.width,
            "height": self.height,
            "status": self.status,
        }
        if self.crop is not None:
            record["crop"] = self.crop.to_dict()
        if self.filter is not None:
            record["filter"] = self.filter.to_dict()
        if self.dual_view is not None:
            record["dual_view"] = self.dual_view.to_dict()
        if self.calipers is not None:
            record["calipers"] = self.calipers.to_dict()
        if self.text is not None:
            record["text"] = self.text.to_dict()
        if self.timings is not None:
            record["timings"] = {k: round(v, 3) for k, v in self.timings.items()}
        if self.error is not None:
            record["error"] = self.error
        return record

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> ScanReport:
        return cls(
            source_id=str(data["source_id"]),
            width=int(data.get("width", 0)),
            height=int(data.get("height", 0)),
            status=str(data.get("status", STATUS_OK)),
            crop=CropResult.from_dict(data["crop"]) if "crop" in data else None,
            filter=FilterVerdict.from_dict(data["filter"]) if "filter" in data else None,
            dual_view=DualViewReport.from_dict(data["dual_view"]) if "dual_view" in data else None,
            calipers=CaliperReport.from_dict(data["calipers"]) if "calipers" in data else None,
            text=TextAnnotation.from_dict(data["text"]) if "text" in data else None,
            timings=dict(data["timings"]) if "timings" in data else None,
            error=data.get("error"),
        )
