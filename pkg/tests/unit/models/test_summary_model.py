import pytest

from models.summary_model import ConfusionCounts, RunSummary


def test_rates_are_undefined_without_cases():
    counts = ConfusionCounts()
    assert counts.sensitivity is None
    assert counts.specificity is None


def test_add_routes_each_case_to_one_cell():
    counts = ConfusionCounts()
    counts.add(True, True)
    counts.add(True, False)
    counts.add(False, True)
    counts.add(False, False)
    counts.add(True, True, agree=False)
    assert (counts.tp, counts.fn, counts.fp, counts.tn) == (1, 2, 1, 1)
    assert counts.total == 5


def test_caliper_cells_reproduce_published_rates():
    counts = ConfusionCounts(tp=55, fp=44, tn=609, fn=72)
    assert counts.sensitivity == pytest.approx(0.433, abs=0.001)
    assert counts.specificity == pytest.approx(0.933, abs=0.001)


def test_format_table_marks_undefined_rates():
    summary = RunSummary(confusion={"calipers": ConfusionCounts(tn=3)})
    lines = summary.format_table()
    assert "n/a" in lines[1]
    assert "Caliper presence" in lines[1]


def test_to_dict_includes_confusion_only_when_scored():
    summary = RunSummary()
    assert "confusion" not in summary.to_dict()
    summary.confusion["invalid"] = ConfusionCounts(tp=1)
    assert summary.to_dict()["confusion"]["invalid"]["sensitivity"] == 1.0


def test_format_counts_shows_percentages():
    summary = RunSummary()
    summary.counts["images"] = 4
    summary.counts["calipers"] = 1
    summary.count_status("OK")
    lines = summary.format_counts()
    assert any(line.startswith("calipers") and "(25.0%)" in line for line in lines)
    assert any(line.startswith("status OK") for line in lines)
