import os
import sys

import numpy as np
import pytest

# Ensure src is on path for tests
ROOT = os.path.abspath(os.path.dirname(__file__))
SRC = os.path.abspath(os.path.join(ROOT, "..", "src"))
if SRC not in sys.path:
    sys.path.insert(0, SRC)

from models.image_model import ScanImage  # noqa: E402
from synth.corpus import corpus, export_corpus  # noqa: E402


@pytest.fixture
def gray_image():
    """Factory for constant 1-channel images"""
    def make(width=100, height=100, value=128):
        return ScanImage(np.full((height, width), value, dtype=np.uint8), source_id="gray.png")
    return make


@pytest.fixture
def rgb_image():
    """Factory for constant 3-channel images"""
    def make(width=100, height=100, value=(128, 128, 128)):
        data = np.empty((height, width, 3), dtype=np.uint8)
        data[:, :] = value
        return ScanImage(data, source_id="rgb.png")
    return make


@pytest.fixture
def write_config(tmp_path):
    """Write an INI file holding only the given sections; returns its path"""
    def write(sections, name="config.ini"):
        lines = []
        for section, values in sections.items():
            lines.append(f"[{section}]")
            lines.extend(f"{key} = {value}" for key, value in values.items())
            lines.append("")
        path = tmp_path / name
        path.write_text("\n".join(lines), encoding="utf-8")
        return str(path)
    return write


@pytest.fixture
def small_corpus(tmp_path):
    """Export a small default-mix corpus; returns (folder, truth path, items)"""
    def make(n=12, seed=7, mix="default", folder="corpus"):
        items = corpus(seed, n, mix)
        out_dir = tmp_path / folder
        truth = export_corpus(items, str(out_dir))
        return str(out_dir), truth, items
    return make
