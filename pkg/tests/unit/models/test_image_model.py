import numpy as np
import pytest

from exceptions import ImageFormatError, ParameterError
from models.image_model import BinaryMask, BoundingBox, HsvRange, ScanImage


def test_bounding_box_dimensions_and_translation():
    box = BoundingBox(10, 20, 40, 30)
    assert (box.w, box.h, box.area) == (30, 10, 300)
    assert box.translate(5, -5).as_list() == [15, 15, 45, 25]
    assert BoundingBox.from_list([10, 20, 40, 30]) == box


def test_bounding_box_rejects_degenerate_edges():
    with pytest.raises(ParameterError):
        BoundingBox(5, 5, 5, 10)
    with pytest.raises(ParameterError):
        BoundingBox(5, 10, 8, 9)


def test_bounding_box_containment():
    outer = BoundingBox.full(100, 50)
    assert outer.contains(BoundingBox(0, 0, 100, 50))
    assert not outer.contains(BoundingBox(90, 40, 101, 50))
    assert BoundingBox(0, 0, 100, 50).within(100, 50)
    assert not BoundingBox(-1, 0, 10, 10).within(100, 50)


def test_scan_image_accepts_gray_and_rgb():
    gray = ScanImage(np.zeros((4, 6), dtype=np.uint8))
    rgb = ScanImage(np.zeros((4, 6, 3), dtype=np.uint8))
    assert (gray.width, gray.height, gray.channels) == (6, 4, 1)
    assert rgb.channels == 3


@pytest.mark.parametrize("data", [
    np.zeros((4, 6), dtype=np.uint16),
    np.zeros((4, 6, 4), dtype=np.uint8),
    np.zeros((4,), dtype=np.uint8),
    np.zeros((0, 6), dtype=np.uint8),
])
def test_scan_image_rejects_unsupported_rasters(data):
    with pytest.raises(ImageFormatError):
        ScanImage(data)


def test_scan_image_with_source_id_keeps_pixels():
    img = ScanImage(np.ones((2, 2), dtype=np.uint8), "a.png")
    renamed = img.with_source_id("b.png")
    assert renamed.source_id == "b.png"
    assert renamed.data is img.data


def test_binary_mask_requires_boolean_plane():
    with pytest.raises(ImageFormatError):
        BinaryMask(np.zeros((3, 3), dtype=np.uint8))
    mask = BinaryMask(np.eye(3, dtype=bool))
    assert mask.count == 3
    assert mask.as_uint8().max() == 255


def test_hsv_range_parse_and_format():
    r = HsvRange.parse("red:345-15:0.45-1:0.35-1")
    assert r.name == "red"
    assert r.wraps
    assert HsvRange.parse(r.format()) == r


@pytest.mark.parametrize("text", ["red:345-15:0.45-1", "red:a-b:0-1:0-1", "x:10-20:0.9-0.1:0-1"])
def test_hsv_range_parse_rejects_malformed(text):
    with pytest.raises(ParameterError):
        HsvRange.parse(text)
