from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any

from constants import CATEGORY_DISPLAY_NAMES, SUMMARY_ROWS


@dataclass
class ConfusionCounts:
    """TP/FP/TN/FN cells for one scored category"""
    tp: int = 0
    fp: int = 0
    tn: int = 0
    fn: int = 0

    @property
    def total(self) -> int:
        return self.tp + self.fp + self.tn + self.fn

    @property
    def sensitivity(self) -> float | None:
        """TP / (TP + FN), or None when there are no positives"""
        denominator = self.tp + self.fn
        return self.tp / denominator if denominator else None

    @property
    def specificity(self) -> float | None:
        """TN / (TN + FP), or None when there are no negatives"""
        denominator = self.tn + self.fp
        return self.tn / denominator if denominator else None

    def add(self, truth: bool, predicted: bool, agree: bool = True) -> None:
        """Count one case; `agree` is False when a positive prediction carries the wrong value"""
        if truth:
            if predicted and agree:
                self.tp += 1
            else:
                self.fn += 1
        elif predicted:
            self.fp += 1
        else:
            self.tn += 1

    def to_dict(self) -> dict[str, Any]:
        return {
            "tp": self.tp, "fp": self.fp, "tn": self.tn, "fn": self.fn,
            "sensitivity": self.sensitivity,
            "specificity": self.specificity,
        }


@dataclass
class RunSummary:
    """Flag counts for a manifest, plus confusion matrices once scored against ground truth"""
    counts: dict[str, int] = field(default_factory=lambda: dict.fromkeys(SUMMARY_ROWS, 0))
    status_counts: dict[str, int] = field(default_factory=dict)
    confusion: dict[str, ConfusionCounts] = field(default_factory=dict)
    unmatched: list[str] = field(default_factory=list)

    @property
    def images(self) -> int:
        return self.counts.get("images", 0)

    def count_status(self, status: str) -> None:
        self.status_counts[status] = self.status_counts.get(status, 0) + 1

    def to_dict(self) -> dict[str, Any]:
        data: dict[str, Any] = {
            "counts": dict(self.counts),
            "status_counts": dict(sorted(self.status_counts.items())),
        }
        if self.confusion:
            data["confusion"] = {name: c.to_dict() for name, c in self.confusion.items()}
        if self.unmatched:
            data["unmatched"] = list(self.unmatched)
        return data

    def format_counts(self) -> list[str]:
        lines = []
        total = self.images
        for row in SUMMARY_ROWS:
            value = self.counts.get(row, 0)
            if row == "images" or total == 0:
                lines.append(f"{row:<20} {value}")
            else:
                lines.append(f"{row:<20} {value} ({100.0 * value / total:.1f}%)")
        for status, value in sorted(self.status_counts.items()):
            lines.append(f"status {status:<13} {value}")
        return lines

    def format_table(self) -> list[str]:
        """Sensitivity/specificity table, one line per scored category"""
        lines = [f"{'Category':<20} {'TP':>5} {'FP':>5} {'TN':>5} {'FN':>5} {'Sens':>7} {'Spec':>7}"]
        for name, c in self.confusion.items():
            sens = "n/a" if c.sensitivity is None else f"{c.sensitivity:.3f}"
            spec = "n/a" if c.specificity is None else f"{c.specificity:.3f}"
            label = CATEGORY_DISPLAY_NAMES.get(name, name)
            lines.append(f"{label:<20} {c.tp:>5} {c.fp:>5} {c.tn:>5} {c.fn:>5} {sens:>7} {spec:>7}")
        return lines
