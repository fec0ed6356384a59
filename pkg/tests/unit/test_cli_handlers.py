"""Tests for the run/score/gen command handlers in `src/cli/handlers.py`."""

import argparse
import json
import os

import pytest

import cli.handlers as handlers
import utils.log_utils as log_utils
from constants import EXIT_FATAL_CONFIG, EXIT_OK, EXIT_PARTIAL
from utils.manifest_writer import read_manifest


@pytest.fixture(autouse=True)
def keep_root_logger(monkeypatch):
    """Handlers configure logging per run; tests keep the pytest handlers in place"""
    monkeypatch.setattr(handlers, "setup_logging", lambda *args, **kwargs: None)


def test_parse_canvas():
    assert handlers.parse_canvas("320x240") == (320, 240)
    assert handlers.parse_canvas("320X240") == (320, 240)
    for bad in ("320", "0x10", "axb"):
        with pytest.raises(argparse.ArgumentTypeError):
            handlers.parse_canvas(bad)


def test_gen_writes_corpus(tmp_path, capsys):
    out = tmp_path / "gen"
    code = handlers.run_gen_cli(["--seed", "3", "--n", "4", "--out", str(out), "--mix", "clean"])
    assert code == EXIT_OK
    assert sorted(p.name for p in out.glob("*.png")) == [f"scene_{i:05d}.png" for i in range(4)]
    assert len(read_manifest(str(out / "truth.jsonl"))) == 4
    assert "Generated 4 images" in capsys.readouterr().out


def test_gen_rejects_empty_corpus(tmp_path, capsys):
    code = handlers.run_gen_cli(["--n", "0", "--out", str(tmp_path / "gen")])
    assert code == EXIT_FATAL_CONFIG
    assert capsys.readouterr().out.startswith("Error:")


def test_run_and_score_with_cli_paths(tmp_path, monkeypatch, capsys, small_corpus):
    folder, truth, _ = small_corpus(n=5)
    monkeypatch.chdir(tmp_path)

    code = handlers.run_pipeline_cli(["--input", os.path.relpath(folder, tmp_path),
                                      "--manifest", "out/manifest.jsonl"])
    out = capsys.readouterr().out
    manifest = tmp_path / "out" / "manifest.jsonl"
    assert code == EXIT_OK
    assert f"Manifest saved: {manifest}" in out
    assert len(read_manifest(str(manifest))) == 5

    code = handlers.run_score_cli(["--manifest", "out/manifest.jsonl", "--truth", truth,
                                   "--summary-json", "summary.json"])
    out = capsys.readouterr().out
    assert code == EXIT_OK
    assert "Category" in out
    with open(tmp_path / "summary.json", encoding="utf-8") as f:
        data = json.load(f)
    assert data["counts"]["images"] == 5
    assert "calipers" in data["confusion"]


def test_run_uses_config_relative_inputs(tmp_path, write_config, small_corpus, capsys):
    folder, _, _ = small_corpus(n=2)
    path = write_config({
        "io": {"inputs": os.path.basename(folder), "manifest": "runs/m.jsonl"},
        "pipeline": {"enable_textkx": "false"},
    })
    assert handlers.run_pipeline_cli(["--config", path]) == EXIT_OK
    records = read_manifest(str(tmp_path / "runs" / "m.jsonl"))
    assert len(records) == 2
    assert all(r.text is None for r in records)


def test_run_method_and_workers_override(tmp_path, small_corpus, capsys):
    folder, _, _ = small_corpus(n=2)
    manifest = tmp_path / "m.jsonl"
    code = handlers.run_pipeline_cli(["--input", folder, "--manifest", str(manifest),
                                      "--method", "CONTOUR_PLUS_HOUGH", "--workers", "0"])
    assert code == EXIT_FATAL_CONFIG
    assert "Error: workers must be at least 1" in capsys.readouterr().out
    assert not manifest.exists()


def test_run_reports_undecodable_images(tmp_path, small_corpus, capsys):
    folder, _, _ = small_corpus(n=2)
    with open(os.path.join(folder, "zz_broken.png"), "wb") as f:
        f.write(b"not an image")
    code = handlers.run_pipeline_cli(["--input", folder, "--manifest", str(tmp_path / "m.jsonl")])
    assert code == EXIT_PARTIAL
    assert "Warning: 1 image(s) could not be processed" in capsys.readouterr().out


def test_run_with_bad_config_is_fatal(tmp_path, write_config, capsys):
    path = write_config({"calipers": {"box_min": "80", "box_max": "20"}})
    assert handlers.run_pipeline_cli(["--config", path]) == EXIT_FATAL_CONFIG
    assert capsys.readouterr().out.startswith("Error: [calipers]")


def test_run_without_inputs_warns(tmp_path, capsys):
    code = handlers.run_pipeline_cli(["--input", str(tmp_path / "nothing"),
                                      "--manifest", str(tmp_path / "m.jsonl")])
    out = capsys.readouterr().out
    assert code == EXIT_OK
    assert "Warning: No input images found" in out
    assert read_manifest(str(tmp_path / "m.jsonl")) == []


def test_score_missing_files_is_fatal(tmp_path, capsys):
    code = handlers.run_score_cli(["--manifest", str(tmp_path / "m.jsonl"), "--truth", str(tmp_path / "t.jsonl")])
    assert code == EXIT_FATAL_CONFIG
    assert capsys.readouterr().out.startswith("Error: Manifest not found:")


def test_score_malformed_manifest_is_fatal(tmp_path, capsys):
    manifest = tmp_path / "m.jsonl"
    manifest.write_text("{broken\n", encoding="utf-8")
    code = handlers.run_score_cli(["--manifest", str(manifest), "--truth", str(manifest)])
    assert code == EXIT_FATAL_CONFIG
    assert "malformed record" in capsys.readouterr().out


def test_run_with_unopenable_log_file_is_fatal(tmp_path, monkeypatch, write_config, capsys):
    monkeypatch.setattr(handlers, "setup_logging", log_utils.setup_logging)
    (tmp_path / "logs").mkdir()
    path = write_config({"logging": {"log_file": "logs"}})
    assert handlers.run_pipeline_cli(["--config", path]) == EXIT_FATAL_CONFIG
    assert capsys.readouterr().out.startswith("Error: Cannot open log file")


def test_parallel_run_writes_a_sorted_manifest(tmp_path, small_corpus, capsys):
    folder, _, _ = small_corpus(n=6)
    manifest = tmp_path / "m.jsonl"
    code = handlers.run_pipeline_cli(["--input", folder, "--manifest", str(manifest), "--workers", "2"])
    assert code == EXIT_OK
    ids = [r.source_id for r in read_manifest(str(manifest))]
    assert ids == sorted(ids)
    assert len(ids) == 6
