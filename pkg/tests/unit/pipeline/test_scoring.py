import pytest

from constants import STATUS_DECODE_ERROR
from models.report_model import (
    CaliperReport,
    ClockPosition,
    FilterTrigger,
    FilterVerdict,
    Laterality,
    ScanReport,
    TextAnnotation,
)
from pipeline import scoring
from utils.manifest_writer import write_manifest


def _paired(cells, make):
    """(predicted, truth) record lists realizing the given confusion cells"""
    predicted, truth = [], []
    index = 0
    for (true_flag, pred_flag), count in cells.items():
        for _ in range(count):
            name = f"img_{index:04d}.png"
            predicted.append(make(name, pred_flag))
            truth.append(make(name, true_flag))
            index += 1
    return predicted, truth


def _cells(tp, fp, tn, fn):
    return {(True, True): tp, (False, True): fp, (False, False): tn, (True, False): fn}


def _with_calipers(name, flag):
    return ScanReport(name, calipers=CaliperReport(present=flag))


def _with_filter(name, flag):
    return ScanReport(name, filter=FilterVerdict(non_b_mode=flag))


def _with_text(name, flag):
    return ScanReport(name, text=TextAnnotation(text_present=flag))


@pytest.mark.parametrize("make, category, cells, sens, spec", [
    (_with_text, "text_presence", _cells(117, 11, 637, 15), 0.886, 0.983),
    (_with_filter, "non_b_mode", _cells(10, 1, 768, 1), 0.909, 0.999),
    (_with_calipers, "calipers", _cells(55, 44, 609, 72), 0.433, 0.933),
])
def test_published_confusion_cells_are_reproduced(make, category, cells, sens, spec):
    predicted, truth = _paired(cells, make)
    summary = scoring.score_reports(predicted, truth, print_fn=lambda _: None)
    counts = summary.confusion[category]
    assert (counts.tp, counts.fp, counts.tn, counts.fn) == (
        cells[(True, True)], cells[(False, True)], cells[(False, False)], cells[(True, False)])
    assert counts.sensitivity == pytest.approx(sens, abs=0.0005)
    assert counts.specificity == pytest.approx(spec, abs=0.0005)


def test_only_stages_present_in_predictions_are_scored():
    predicted, truth = _paired(_cells(1, 0, 1, 0), _with_calipers)
    summary = scoring.score_reports(predicted, truth, print_fn=lambda _: None)
    assert list(summary.confusion) == ["calipers"]


def test_scoring_truth_against_itself_is_perfect(small_corpus):
    _, truth_path, _ = small_corpus(n=10)
    summary = scoring.score(truth_path, truth_path, print_fn=lambda _: None)
    for counts in summary.confusion.values():
        assert counts.fp == 0
        assert counts.fn == 0
        assert counts.sensitivity in (None, 1.0)
        assert counts.specificity in (None, 1.0)


def test_all_negative_category_has_undefined_sensitivity():
    predicted, truth = _paired(_cells(0, 0, 5, 0), _with_calipers)
    counts = scoring.score_reports(predicted, truth, print_fn=lambda _: None).confusion["calipers"]
    assert counts.sensitivity is None
    assert counts.specificity == 1.0


def test_wrong_field_value_is_a_false_negative():
    truth = [ScanReport("a.png", text=TextAnnotation(laterality=Laterality.LEFT)),
             ScanReport("b.png", text=TextAnnotation())]
    predicted = [ScanReport("a.png", text=TextAnnotation(laterality=Laterality.RIGHT)),
                 ScanReport("b.png", text=TextAnnotation(clock_position=ClockPosition(3, 0)))]
    summary = scoring.score_reports(predicted, truth, print_fn=lambda _: None)
    laterality = summary.confusion["laterality"]
    position = summary.confusion["position"]
    assert (laterality.tp, laterality.fn, laterality.fp, laterality.tn) == (0, 1, 0, 1)
    assert (position.fp, position.tn) == (1, 1)


def test_records_are_matched_by_file_name():
    truth = [_with_calipers("scene_00000.png", True)]
    predicted = [_with_calipers("/data/run/scene_00000.png", True)]
    summary = scoring.score_reports(predicted, truth, print_fn=lambda _: None)
    assert summary.confusion["calipers"].tp == 1
    assert summary.unmatched == []


def test_unmatched_records_are_excluded_with_a_warning():
    truth = [_with_calipers("a.png", True), _with_calipers("b.png", False)]
    predicted = [_with_calipers("a.png", True), _with_calipers("c.png", True)]
    messages = []
    summary = scoring.score_reports(predicted, truth, print_fn=messages.append)
    assert summary.unmatched == ["b.png", "c.png"]
    assert summary.confusion["calipers"].total == 1
    assert any(m.startswith("Warning: 2 record(s) have no counterpart") for m in messages)


def test_duplicate_records_keep_the_first():
    truth = [_with_calipers("a.png", True)]
    predicted = [_with_calipers("a.png", True), _with_calipers("a.png", False)]
    messages = []
    summary = scoring.score_reports(predicted, truth, print_fn=messages.append)
    assert summary.confusion["calipers"].tp == 1
    assert any("Duplicate manifest record for a.png" in m for m in messages)


def test_summarize_counts_flags_and_statuses():
    reports = [
        ScanReport("a.png", filter=FilterVerdict(non_b_mode=True, trigger=FilterTrigger.COLOR_AREA)),
        ScanReport("b.png", filter=FilterVerdict(non_b_mode=True, trigger=FilterTrigger.INDICATOR_SHAPE)),
        ScanReport("c.png", text=TextAnnotation(text_present=True, procedural=True)),
        ScanReport("d.png", calipers=CaliperReport(present=True)),
        ScanReport("e.png", status=STATUS_DECODE_ERROR, error="broken"),
    ]
    summary = scoring.summarize(reports)
    counts = summary.counts
    assert counts["images"] == 5
    assert counts["non_b_mode"] == 2
    assert counts["bf_highlighting"] == 1
    assert counts["procedural"] == 1
    assert counts["text_annotations"] == 1
    assert counts["non_text_artifact"] == 3
    assert counts["any_artifact"] == 4
    assert summary.status_counts == {"OK": 4, "DECODE_ERROR": 1}


def test_field_value_treats_unset_as_negative():
    assert scoring.field_value(None, "laterality") is None
    assert scoring.field_value(TextAnnotation(), "axilla") is None
    assert scoring.field_value(TextAnnotation(laterality=Laterality.LEFT), "laterality") is Laterality.LEFT


def test_score_reads_manifest_files(tmp_path):
    manifest = tmp_path / "manifest.jsonl"
    truth = tmp_path / "truth.jsonl"
    write_manifest([_with_calipers("a.png", True), _with_calipers("b.png", True)], str(manifest))
    write_manifest([_with_calipers("a.png", True), _with_calipers("b.png", False)], str(truth))
    counts = scoring.score(str(manifest), str(truth), print_fn=lambda _: None).confusion["calipers"]
    assert (counts.tp, counts.fp) == (1, 1)
