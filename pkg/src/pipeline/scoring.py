"""Flag counts for manifests and confusion matrices against ground truth"""

from __future__ import annotations

import logging
import os
from collections.abc import Callable, Iterable
from typing import Any

from constants import FIELD_CATEGORIES, FLAG_CATEGORIES
from models.report_model import FilterTrigger, Laterality, Orientation, ScanReport, TextAnnotation
from models.summary_model import ConfusionCounts, RunSummary
from utils.manifest_writer import read_manifest

logger = logging.getLogger(__name__)

# Stage field a category's prediction comes from
CATEGORY_STAGE = {
    "invalid": "filter",
    "non_b_mode": "filter",
    "dual_view": "dual_view",
    "calipers": "calipers",
    **{name: "text" for name in ["text_presence", *FIELD_CATEGORIES]},
}


def report_flags(report: ScanReport) -> dict[str, bool]:
    """Binary outcome of every flag category; stages that did not run count as negative"""
    return {
        "invalid": bool(report.filter and report.filter.invalid),
        "non_b_mode": bool(report.filter and report.filter.non_b_mode),
        "dual_view": bool(report.dual_view and report.dual_view.flag),
        "calipers": bool(report.calipers and report.calipers.present),
        "text_presence": bool(report.text and report.text.text_present),
    }


def field_value(annotation: TextAnnotation | None, category: str) -> Any:
    """Value of an annotation field, None when the field is negative"""
    if annotation is None:
        return None
    value: Any = {
        "laterality": annotation.laterality,
        "orientation": annotation.orientation,
        "distance": annotation.distance_from_nipple,
        "position": annotation.clock_position,
        "axilla": annotation.axilla,
        "lesion_measurement": annotation.lesion_measurement,
        "procedural": annotation.procedural,
    }[category]
    if value in (False, Laterality.NONE, Orientation.NONE):
        return None
    return value


def count_report(summary: RunSummary, report: ScanReport) -> None:
    """Add one record to the sample-characteristics counts"""
    flags = report_flags(report)
    procedural = bool(report.text and report.text.procedural)
    bf_highlighting = bool(report.filter and report.filter.non_b_mode
                           and report.filter.trigger is FilterTrigger.COLOR_AREA)
    non_text = flags["calipers"] or flags["invalid"] or flags["dual_view"] or flags["non_b_mode"]
    counts = summary.counts
    counts["images"] += 1
    counts["calipers"] += flags["calipers"]
    counts["invalid"] += flags["invalid"]
    counts["dual_view"] += flags["dual_view"]
    counts["non_b_mode"] += flags["non_b_mode"]
    counts["bf_highlighting"] += bf_highlighting
    counts["text_annotations"] += flags["text_presence"]
    counts["procedural"] += procedural
    counts["non_text_artifact"] += non_text
    counts["any_artifact"] += non_text or flags["text_presence"] or procedural
    summary.count_status(report.status)


def summarize(reports: Iterable[ScanReport]) -> RunSummary:
    summary = RunSummary()
    for report in reports:
        count_report(summary, report)
    return summary


def _index_by_name(reports: list[ScanReport], label: str,
                   print_fn: Callable[[str], None]) -> dict[str, ScanReport]:
    indexed: dict[str, ScanReport] = {}
    for report in reports:
        key = os.path.basename(report.source_id)
        if key in indexed:
            print_fn(f"Warning: Duplicate {label} record for {key}; keeping the first")
            continue
        indexed[key] = report
    return indexed


def score_reports(predicted: list[ScanReport], truth: list[ScanReport],
                  print_fn: Callable[[str], None] = print) -> RunSummary:
    """
    Confusion matrices of predicted records against truth records matched by file name.

    A truth-positive field predicted with a different value counts as a false negative.
    Categories whose stage is absent from every prediction are not scored.
    """
    by_name = _index_by_name(predicted, "manifest", print_fn)
    truth_by_name = _index_by_name(truth, "truth", print_fn)
    matched = [name for name in by_name if name in truth_by_name]
    unmatched = sorted(set(by_name) ^ set(truth_by_name))

    summary = RunSummary(unmatched=unmatched)
    if unmatched:
        print_fn(f"Warning: {len(unmatched)} record(s) have no counterpart and are excluded: "
                 f"{', '.join(unmatched[:5])}{' ...' if len(unmatched) > 5 else ''}")

    scored = [c for c in FLAG_CATEGORIES + FIELD_CATEGORIES
              if any(getattr(by_name[n], CATEGORY_STAGE[c]) is not None for n in matched)]
    summary.confusion = {c: ConfusionCounts() for c in scored}

    for name in matched:
        pred, true = by_name[name], truth_by_name[name]
        count_report(summary, pred)
        pred_flags, true_flags = report_flags(pred), report_flags(true)
        for category in scored:
            if category in pred_flags:
                summary.confusion[category].add(true_flags[category], pred_flags[category])
                continue
            expected = field_value(true.text, category)
            actual = field_value(pred.text, category)
            summary.confusion[category].add(expected is not None, actual is not None, expected == actual)

    logger.info("Scored %d matched records, %d unmatched", len(matched), len(unmatched))
    return summary


def score(manifest: str, ground_truth: str, print_fn: Callable[[str], None] = print) -> RunSummary:
    """Score a manifest file against a ground-truth file of the same record schema"""
    return score_reports(read_manifest(manifest), read_manifest(ground_truth), print_fn)
