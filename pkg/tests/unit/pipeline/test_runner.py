import glob
import os

import numpy as np
import pytest
from PIL import Image

from constants import STATUS_DECODE_ERROR, STATUS_OCR_SKIPPED, STATUS_OK
from exceptions import ConfigError
from models.config_model import PipelineConfig, TextConfig
from models.image_model import BoundingBox
from models.report_model import Laterality, OcrToken
from pipeline import runner
from processing.ocr_backends import StaticOcrBackend
from utils.manifest_writer import read_manifest


def _images(folder):
    return sorted(glob.glob(os.path.join(folder, "*.png")))


def _config(tmp_path, **kwargs):
    return PipelineConfig(manifest=str(tmp_path / "out" / "manifest.jsonl"), **kwargs)


def test_run_writes_one_record_per_image(tmp_path, small_corpus):
    folder, _, items = small_corpus(n=6)
    config = _config(tmp_path, progress_step=4)
    messages = []
    summary = runner.run(config, _images(folder), print_fn=messages.append)

    records = read_manifest(config.manifest)
    assert [os.path.basename(r.source_id) for r in records] == [img.source_id for img, _ in items]
    assert all(r.status == STATUS_OK for r in records)
    assert summary.images == 6
    assert summary.status_counts == {STATUS_OK: 6}
    assert messages == ["Processed 4/6 images", "Processed 6/6 images"]


def test_records_carry_every_enabled_stage(tmp_path, small_corpus):
    folder, _, _ = small_corpus(n=2)
    config = _config(tmp_path)
    runner.run(config, _images(folder), print_fn=lambda _: None)
    for record in read_manifest(config.manifest):
        assert record.crop is not None
        assert record.filter is not None
        assert record.dual_view is not None
        assert record.calipers is not None
        assert record.text is not None
        assert record.timings is None


def test_disabled_stages_are_left_out(tmp_path, small_corpus):
    folder, _, _ = small_corpus(n=2)
    config = _config(tmp_path, enable_textkx=False, enable_dualview=False, record_timings=True)
    runner.run(config, _images(folder), print_fn=lambda _: None)
    for record in read_manifest(config.manifest):
        assert record.text is None
        assert record.dual_view is None
        assert set(record.timings) == {"crop", "filters", "calipers"}


def test_caliper_search_sees_the_crop(tmp_path, small_corpus):
    folder, _, items = small_corpus(n=4, mix="calipers")
    config = _config(tmp_path, enable_textkx=False)
    runner.run(config, _images(folder), print_fn=lambda _: None)
    for record, (_, truth) in zip(read_manifest(config.manifest), items, strict=True):
        assert record.calipers.present == truth.calipers_present
        assert all(record.crop.final_box.contains(box) for box in record.calipers.boxes)


def test_undecodable_file_becomes_an_error_record(tmp_path, small_corpus):
    folder, _, _ = small_corpus(n=2)
    broken = os.path.join(folder, "broken.png")
    with open(broken, "wb") as f:
        f.write(b"\x89PNG but not really")
    config = _config(tmp_path)
    summary = runner.run(config, _images(folder), print_fn=lambda _: None)

    records = {os.path.basename(r.source_id): r for r in read_manifest(config.manifest)}
    assert len(records) == 3
    assert records["broken.png"].status == STATUS_DECODE_ERROR
    assert records["broken.png"].error
    assert records["broken.png"].crop is None
    assert summary.status_counts == {STATUS_OK: 2, STATUS_DECODE_ERROR: 1}


def test_missing_sidecar_skips_only_ocr(tmp_path):
    path = tmp_path / "plain.png"
    data = np.zeros((120, 160), dtype=np.uint8)
    data[20:100, 30:130] = 90
    Image.fromarray(data).save(path)

    report = runner.process_image(str(path), _config(tmp_path))
    assert report.status == STATUS_OCR_SKIPPED
    assert report.text is None
    assert report.crop is not None
    assert report.calipers is not None


def test_narrow_frame_keeps_every_other_stage(tmp_path):
    path = tmp_path / "narrow.png"
    data = np.zeros((200, 16), dtype=np.uint8)
    data[20:180, 2:14] = 90
    Image.fromarray(data).save(path)

    report = runner.process_image(str(path), _config(tmp_path, enable_textkx=False))
    assert report.status == STATUS_OK
    assert report.crop is not None
    assert report.filter is not None
    assert report.calipers is not None
    assert report.dual_view is not None and not report.dual_view.flag
    assert report.error.startswith("dualview:")


def test_stage_failure_is_not_a_decode_error(tmp_path, monkeypatch):
    path = tmp_path / "plain.png"
    Image.fromarray(np.full((60, 80), 90, dtype=np.uint8)).save(path)

    def broken(*args, **kwargs):
        raise RuntimeError("detector crashed")

    monkeypatch.setattr(runner, "detect_calipers", broken)
    report = runner.process_image(str(path), _config(tmp_path, enable_textkx=False))
    assert report.status == STATUS_OK
    assert report.calipers is None
    assert report.crop is not None
    assert "calipers: RuntimeError: detector crashed" in report.error


def test_analyze_uses_the_configured_backend(tmp_path, small_corpus):
    _, _, items = small_corpus(n=1, mix="clean")
    img, _ = items[0]
    processor = runner.ImageProcessor(_config(tmp_path))
    processor._backend = StaticOcrBackend(default=[OcrToken("RT", BoundingBox(5, 5, 30, 20), 0.9)])
    report = processor.analyze(img)
    assert report.text.laterality is Laterality.RIGHT
    assert report.status == STATUS_OK


def test_emit_crops_writes_crop_images(tmp_path, small_corpus):
    folder, _, _ = small_corpus(n=2)
    crops = tmp_path / "crops"
    config = _config(tmp_path, emit_crops=str(crops))
    runner.run(config, _images(folder), print_fn=lambda _: None)
    records = read_manifest(config.manifest)
    for record in records:
        name = os.path.splitext(os.path.basename(record.source_id))[0] + "_crop.png"
        with Image.open(crops / name) as crop:
            assert crop.size == (record.crop.final_box.w, record.crop.final_box.h)


def test_empty_input_writes_an_empty_manifest(tmp_path):
    config = _config(tmp_path)
    summary = runner.run(config, [], print_fn=lambda _: None)
    assert summary.images == 0
    assert read_manifest(config.manifest) == []


@pytest.mark.parametrize("settings", [
    {"workers": 0},
    {"enable_crop": False, "enable_filters": False, "enable_dualview": False,
     "enable_calipers": False, "enable_textkx": False},
    {"text": TextConfig(backend="none")},
])
def test_invalid_settings_fail_before_any_output(tmp_path, settings):
    config = _config(tmp_path, **settings)
    with pytest.raises(ConfigError):
        runner.run(config, [], print_fn=lambda _: None)
    assert not os.path.exists(config.manifest)


def test_manifest_path_that_is_a_directory_is_rejected(tmp_path):
    config = PipelineConfig(manifest=str(tmp_path))
    with pytest.raises(ConfigError):
        runner.run(config, [], print_fn=lambda _: None)


def test_parallel_reports_cover_the_same_images(tmp_path, small_corpus):
    folder, _, _ = small_corpus(n=6)
    paths = _images(folder)
    serial = [r.to_dict() for r in runner.iter_reports(paths, _config(tmp_path))]
    parallel = [r.to_dict() for r in runner.iter_reports(paths, _config(tmp_path, workers=2))]
    key = lambda record: record["source_id"]  # noqa: E731
    assert sorted(parallel, key=key) == sorted(serial, key=key)
