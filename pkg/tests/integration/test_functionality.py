#!/usr/bin/env python3
"""
End-to-end detector quality on generated corpora
Run with: python -m pytest tests/integration -v -m slow
"""

import os
import sys

import pytest

# Add src to path for imports
sys.path.insert(0, os.path.join(os.path.dirname(__file__), '..', '..', 'src'))

from constants import STATUS_DECODE_ERROR  # noqa: E402
from models.config_model import CaliperConfig, CaliperMethod, PipelineConfig  # noqa: E402
from pipeline import runner, scoring  # noqa: E402
from synth.corpus import corpus, export_corpus, iter_corpus  # noqa: E402
from utils.file_utils import get_all_files  # noqa: E402
from utils.manifest_writer import read_manifest, sort_manifest  # noqa: E402

pytestmark = pytest.mark.integration


def _score_in_memory(items, config):
    processor = runner.ImageProcessor(config)
    try:
        predicted = [processor.analyze(img) for img, _ in items]
    finally:
        processor.close()
    truth = [t.to_report(img.source_id) for img, t in items]
    return scoring.score_reports(predicted, truth, print_fn=lambda _: None)


class TestPipelineOnCorpus:
    """A small default corpus through the whole batch path"""

    def test_summary_counts_follow_ground_truth(self, tmp_path):
        items = corpus(7, 50)
        truth_path = export_corpus(items, str(tmp_path / "corpus"))
        config = PipelineConfig(manifest=str(tmp_path / "manifest.jsonl"))
        summary = runner.run(config, get_all_files(str(tmp_path / "corpus")), print_fn=lambda _: None)
        expected = scoring.summarize(read_manifest(truth_path))

        assert summary.images == 50
        for row in ("calipers", "text_annotations", "non_b_mode", "invalid"):
            assert abs(summary.counts[row] - expected.counts[row]) <= 2, row

    def test_truth_file_scores_perfectly_against_itself(self, tmp_path):
        truth_path = export_corpus(corpus(3, 20), str(tmp_path / "corpus"))
        summary = scoring.score(truth_path, truth_path, print_fn=lambda _: None)
        assert summary.unmatched == []
        assert all(c.fp == 0 and c.fn == 0 for c in summary.confusion.values())


@pytest.mark.slow
def test_default_corpus_acceptance(tmp_path):
    folder = tmp_path / "corpus"
    truth_path = export_corpus(corpus(7, 500), str(folder))
    config = PipelineConfig(manifest=str(tmp_path / "manifest.jsonl"))
    runner.run(config, get_all_files(str(folder)), print_fn=lambda _: None)

    summary = scoring.score(config.manifest, truth_path, print_fn=lambda _: None)
    assert summary.unmatched == []
    for category, counts in summary.confusion.items():
        if counts.sensitivity is not None:
            assert counts.sensitivity >= 0.95, (category, counts.to_dict())
        if counts.specificity is not None:
            assert counts.specificity >= 0.95, (category, counts.to_dict())


@pytest.mark.slow
def test_dotted_measurement_lines_need_the_line_search():
    # dotted mix: half the scenes carry X markers joined by a dotted line, the rest are clean
    items = corpus(11, 120, "dotted")
    positives = sum(t.calipers_present for _, t in items)
    assert 55 <= positives <= 65

    def caliper_counts(method):
        config = PipelineConfig(enable_dualview=False, enable_textkx=False,
                                calipers=CaliperConfig(method=method))
        return _score_in_memory(items, config).confusion["calipers"]

    contour = caliper_counts(CaliperMethod.CONTOUR)
    assert contour.sensitivity <= 0.25

    with_lines = caliper_counts(CaliperMethod.CONTOUR_PLUS_HOUGH)
    assert with_lines.sensitivity >= 0.90
    assert with_lines.specificity >= 0.90


@pytest.mark.slow
def test_parallel_batch_survives_truncated_files(tmp_path):
    folder = tmp_path / "corpus"
    export_corpus(iter_corpus(5, 300, "default"), str(folder))
    broken = ["scene_00050.png", "scene_00150.png", "scene_00250.png"]
    for name in broken:
        path = folder / name
        path.write_bytes(path.read_bytes()[:64])
    paths = sorted(get_all_files(str(folder)))

    serial = PipelineConfig(manifest=str(tmp_path / "serial.jsonl"))
    parallel = PipelineConfig(manifest=str(tmp_path / "parallel.jsonl"), workers=3)
    runner.run(serial, paths, print_fn=lambda _: None)
    summary = runner.run(parallel, paths, print_fn=lambda _: None)

    records = read_manifest(parallel.manifest)
    assert summary.images == len(paths) == len(records) == 300
    failed = sorted(os.path.basename(r.source_id) for r in records if r.status == STATUS_DECODE_ERROR)
    assert failed == broken

    sort_manifest(parallel.manifest)
    with open(serial.manifest, "rb") as a, open(parallel.manifest, "rb") as b:
        assert a.read() == b.read()
