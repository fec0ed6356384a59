"""
Knowledge extraction from burnt-in annotation text.

Tokens come from an OCR backend, are put in reading order, normalized, joined into one
string and matched against a small regular-expression grammar. Every field that is set
keeps the text span that justified it in `TextAnnotation.evidence`.
"""

from __future__ import annotations

import logging
import re
from dataclasses import dataclass, field
from re import Match, Pattern

from constants import PROCEDURAL_KEYWORDS
from exceptions import ParameterError
from models.image_model import ScanImage
from models.report_model import (
    ClockPosition,
    Distance,
    DistanceUnit,
    Laterality,
    OcrToken,
    Orientation,
    TextAnnotation,
)
from processing.ocr_backends import OcrBackend

logger = logging.getLogger(__name__)

NUMBER = r"\d{1,2}(?:\.\d{1,2})?"
_NOT_AFTER_NUMBER = r"(?<![\d.:])"

# Tokens that are numbers apart from OCR letter/digit confusions, optionally with a unit
_NUMERIC_TOKEN = re.compile(r"^(?=.*\d)[\dOoIl.:]+(?:CM|MM|cm|mm)?$")

_LATERALITY = {
    Laterality.RIGHT: [r"\b(?:RT|RIGHT)\b"],
    Laterality.LEFT: [r"\b(?:LT|LEFT)\b"],
}

# Checked in this order; ANTIRADIAL first so its RAD part is not read as RADIAL
_ORIENTATION = {
    Orientation.ANTIRADIAL: [r"\b(?:ARAD|ANTI[- ]?RAD(?:IAL)?)\b"],
    Orientation.RADIAL: [r"\bRAD(?:IAL)?\b"],
    Orientation.TRANSVERSE: [r"\b(?:TRANS(?:VERSE)?|TRV)\b"],
    Orientation.SAGITTAL: [r"\bSAG(?:ITTAL)?\b"],
    Orientation.LONGITUDINAL: [r"\bLONG(?:ITUDINAL)?\b"],
    Orientation.OBLIQUE: [r"\bOBL(?:IQUE)?\b"],
}

_CLOCK = [
    _NOT_AFTER_NUMBER + r"(1[0-2]|[1-9]):([0-5]\d)(?![\d:])",
    _NOT_AFTER_NUMBER + r"(1[0-2]|[1-9]) ?O'?CLOCK\b",
]

_MEASUREMENT = [
    _NOT_AFTER_NUMBER + rf"{NUMBER} ?[X*×] ?{NUMBER}(?: ?[X*×] ?{NUMBER})?(?: ?(?:CM|MM)\b)?(?![\d.])",
]

_DISTANCE = re.compile(_NOT_AFTER_NUMBER + rf"({NUMBER}) ?(CM|MM)\b")
_NIPPLE_CUE = re.compile(r"\bFN\b|\bN\b|\bFROM NIPPLE\b")

_AXILLA = [r"\bAX(?:ILLA(?:RY)?)?\b"]
_PROCEDURAL = [r"\b(?:" + "|".join(PROCEDURAL_KEYWORDS) + r")\b"]

# [textkx.patterns] keys accepted as grammar extensions
EXTENSION_KEYS = (
    ["laterality_left", "laterality_right", "axilla", "lesion_measurement", "procedural"]
    + [f"orientation_{o.value.lower()}" for o in _ORIENTATION]
)


def _compile(patterns: list[str]) -> list[Pattern[str]]:
    try:
        return [re.compile(p) for p in patterns]
    except re.error as e:
        raise ParameterError(f"Invalid annotation pattern: {e}") from e


@dataclass
class AnnotationGrammar:
    """Compiled classification patterns, optionally extended from configuration"""
    laterality: dict[Laterality, list[Pattern[str]]] = field(default_factory=dict)
    orientation: dict[Orientation, list[Pattern[str]]] = field(default_factory=dict)
    clock: list[Pattern[str]] = field(default_factory=list)
    measurement: list[Pattern[str]] = field(default_factory=list)
    axilla: list[Pattern[str]] = field(default_factory=list)
    procedural: list[Pattern[str]] = field(default_factory=list)

    @classmethod
    def build(cls, extensions: dict[str, list[str]] | None = None) -> AnnotationGrammar:
        extensions = extensions or {}
        unknown = sorted(set(extensions) - set(EXTENSION_KEYS))
        if unknown:
            raise ParameterError(f"Unknown annotation pattern categories: {', '.join(unknown)}")

        def extra(key: str) -> list[str]:
            return list(extensions.get(key, []))

        return cls(
            laterality={
                Laterality.RIGHT: _compile(_LATERALITY[Laterality.RIGHT] + extra("laterality_right")),
                Laterality.LEFT: _compile(_LATERALITY[Laterality.LEFT] + extra("laterality_left")),
            },
            orientation={o: _compile(p + extra(f"orientation_{o.value.lower()}"))
                         for o, p in _ORIENTATION.items()},
            clock=_compile(_CLOCK),
            measurement=_compile(_MEASUREMENT + extra("lesion_measurement")),
            axilla=_compile(_AXILLA + extra("axilla")),
            procedural=_compile(_PROCEDURAL + extra("procedural")),
        )


DEFAULT_GRAMMAR = AnnotationGrammar.build()


def normalize_token(text: str) -> str:
    """Uppercase; inside numeric tokens read O as 0 and I/l as 1"""
    text = " ".join(text.replace("’", "'").split())
    if _NUMERIC_TOKEN.match(text):
        text = text.replace("l", "1").upper().replace("O", "0").replace("I", "1")
    return text.upper()


def reading_order(tokens: list[OcrToken], line_tolerance: int = 8) -> list[OcrToken]:
    """Top-to-bottom lines, left-to-right within a line"""
    ordered = sorted(tokens, key=lambda t: (t.bbox.y_top, t.bbox.x_left, t.text))
    lines: list[list[OcrToken]] = []
    line_top = 0
    for token in ordered:
        if not lines or token.bbox.y_top - line_top > line_tolerance:
            lines.append([])
            line_top = token.bbox.y_top
        lines[-1].append(token)
    return [t for line in lines for t in sorted(line, key=lambda t: (t.bbox.x_left, t.text))]


def recognize_text(img: ScanImage, backend: OcrBackend, min_confidence: float,
                   line_tolerance: int = 8) -> list[OcrToken]:
    """Backend tokens with confidence >= min_confidence, in reading order"""
    tokens = [t for t in backend.recognize(img) if t.confidence >= min_confidence]
    return reading_order(tokens, line_tolerance)


def detect_text_presence(tokens: list[OcrToken]) -> bool:
    """Any token of two or more characters; single characters are usually speckle misreads"""
    return any(len(t.text.strip()) >= 2 for t in tokens)


class _Text:
    """Joined normalized words with a character-to-word index"""

    def __init__(self, tokens: list[OcrToken]):
        self.words = [w for t in tokens for w in normalize_token(t.text).split()]
        self.joined = " ".join(self.words)
        self.word_at: list[int] = []
        for i, word in enumerate(self.words):
            self.word_at.extend([i] * len(word))
            self.word_at.append(i)

    def word_span(self, start: int, end: int) -> tuple[int, int]:
        return self.word_at[start], self.word_at[max(start, end - 1)]

    def words_text(self, first: int, last: int) -> str:
        return " ".join(self.words[first:last + 1])


def _find_all(patterns: list[Pattern[str]], text: str) -> list[Match[str]]:
    matches = [m for p in patterns for m in p.finditer(text)]
    return sorted(matches, key=lambda m: (m.start(), -m.end()))


def _overlaps(match: Match[str], spans: list[tuple[int, int]]) -> bool:
    return any(match.start() < end and start < match.end() for start, end in spans)


def _classify_laterality(text: _Text, grammar: AnnotationGrammar, ann: TextAnnotation) -> None:
    found = {side: _find_all(patterns, text.joined) for side, patterns in grammar.laterality.items()}
    sides = [side for side, matches in found.items() if matches]
    if len(sides) > 1:
        spans = sorted(m.group(0) for matches in found.values() for m in matches)
        ann.notes.append(f"laterality conflict: {' / '.join(spans)}")
    elif sides:
        ann.laterality = sides[0]
        ann.evidence["laterality"] = [m.group(0) for m in found[sides[0]]]


def _classify_orientation(text: _Text, grammar: AnnotationGrammar, ann: TextAnnotation) -> None:
    taken: list[tuple[int, int]] = []
    candidates: list[tuple[int, int, Orientation, str]] = []
    for rank, (orientation, patterns) in enumerate(grammar.orientation.items()):
        for m in _find_all(patterns, text.joined):
            if _overlaps(m, taken):
                continue
            taken.append((m.start(), m.end()))
            candidates.append((m.start(), rank, orientation, m.group(0)))
    if not candidates:
        return
    candidates.sort()
    ann.orientation = candidates[0][2]
    ann.evidence["orientation"] = [candidates[0][3]]
    others = sorted({c[2].value for c in candidates[1:] if c[2] is not ann.orientation})
    if others:
        ann.notes.append(f"additional orientations ignored: {', '.join(others)}")


def _classify_clock(text: _Text, grammar: AnnotationGrammar, ann: TextAnnotation) -> None:
    matches = _find_all(grammar.clock, text.joined)
    if matches:
        m = matches[0]
        minute = int(m.group(2)) if m.lastindex and m.lastindex >= 2 and m.group(2) else 0
        ann.clock_position = ClockPosition(int(m.group(1)), minute)
        ann.evidence["position"] = [m.group(0)]


def _classify_distance(text: _Text, excluded: list[tuple[int, int]], ann: TextAnnotation) -> None:
    cues = [text.word_span(c.start(), c.end()) for c in _NIPPLE_CUE.finditer(text.joined)]
    for m in _DISTANCE.finditer(text.joined):
        if _overlaps(m, excluded):
            continue
        value = float(m.group(1))
        if value <= 0:
            continue
        first, last = text.word_span(m.start(), m.end())
        near = [c for c in cues if first - 2 <= c[1] and c[0] <= last + 2 and not first <= c[0] <= last]
        if not near:
            continue
        cue = near[0]
        ann.distance_from_nipple = Distance(value, DistanceUnit(m.group(2)))
        ann.evidence["distance"] = [text.words_text(min(first, cue[0]), max(last, cue[1]))]
        return


def classify_annotation(tokens: list[OcrToken], grammar: AnnotationGrammar | None = None,
                        line_tolerance: int = 8) -> TextAnnotation:
    """Classify tokens into laterality, orientation, clock position, distance and the extended categories"""
    grammar = grammar or DEFAULT_GRAMMAR
    ordered = reading_order(tokens, line_tolerance)
    text = _Text(ordered)
    ann = TextAnnotation(tokens=ordered, raw_concatenation=text.joined,
                         text_present=detect_text_presence(ordered))
    if not text.joined:
        return ann

    _classify_laterality(text, grammar, ann)
    _classify_orientation(text, grammar, ann)
    _classify_clock(text, grammar, ann)

    measurements = _find_all(grammar.measurement, text.joined)
    if measurements:
        ann.lesion_measurement = True
        ann.evidence["lesion_measurement"] = [m.group(0) for m in measurements]
    clock_spans = [(m.start(), m.end()) for m in _find_all(grammar.clock, text.joined)]
    _classify_distance(text, [(m.start(), m.end()) for m in measurements] + clock_spans, ann)

    axilla = _find_all(grammar.axilla, text.joined)
    if axilla:
        ann.axilla = True
        ann.evidence["axilla"] = [m.group(0) for m in axilla]
    procedural = _find_all(grammar.procedural, text.joined)
    if procedural:
        ann.procedural = True
        ann.evidence["procedural"] = [m.group(0) for m in procedural]

    logger.debug("Classified %r as %s", text.joined, ann.positive_fields())
    return ann
