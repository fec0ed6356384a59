import cv2
import numpy as np
import pytest
from PIL import Image

from exceptions import ImageFormatError, ParameterError, PreconditionError
from models.image_model import BinaryMask, BoundingBox, HsvRange, ScanImage
from processing import imgprim


def test_decode_png_gray_and_rgb(tmp_path):
    gray_path = tmp_path / "gray.png"
    rgb_path = tmp_path / "rgb.png"
    Image.fromarray(np.full((5, 7), 42, dtype=np.uint8)).save(gray_path)
    Image.fromarray(np.full((5, 7, 3), 9, dtype=np.uint8)).save(rgb_path)

    gray = imgprim.decode_image(str(gray_path))
    rgb = imgprim.decode_image(str(rgb_path))
    assert (gray.width, gray.height, gray.channels) == (7, 5, 1)
    assert gray.source_id == str(gray_path)
    assert rgb.channels == 3
    assert int(rgb.data[0, 0, 2]) == 9


def test_decode_rescales_16_bit_sources(tmp_path):
    data = np.array([[1000, 2000], [3000, 5000]], dtype=np.uint16)
    path = tmp_path / "wide.png"
    Image.fromarray(data).save(path)
    img = imgprim.decode_image(str(path))
    assert img.data.dtype == np.uint8
    assert int(img.data.min()) == 0
    assert int(img.data.max()) == 255


def test_decode_flattens_alpha(tmp_path):
    path = tmp_path / "alpha.png"
    Image.fromarray(np.zeros((3, 3, 4), dtype=np.uint8)).save(path)
    assert imgprim.decode_image(str(path)).channels == 3


def test_decode_rejects_non_images(tmp_path):
    path = tmp_path / "broken.png"
    path.write_bytes(b"not an image")
    with pytest.raises(ImageFormatError):
        imgprim.decode_image(str(path))


def test_rescale_constant_input_maps_to_zero():
    assert imgprim.rescale_to_uint8(np.full((2, 2), 7.0)).max() == 0


def test_encode_png_round_trip(tmp_path):
    img = ScanImage(np.arange(12, dtype=np.uint8).reshape(3, 4))
    path = tmp_path / "out.png"
    imgprim.encode_png(img, str(path))
    assert np.array_equal(imgprim.decode_image(str(path)).data, img.data)


def test_to_grayscale_uses_broadcast_luma():
    data = np.zeros((1, 3, 3), dtype=np.uint8)
    data[0, 0] = (255, 0, 0)
    data[0, 1] = (0, 255, 0)
    data[0, 2] = (0, 0, 255)
    gray = imgprim.to_grayscale(ScanImage(data))
    assert gray.data.tolist() == [[76, 150, 29]]


def test_binarize_is_strictly_above_threshold(gray_image):
    img = gray_image(4, 1, 10).with_data(np.array([[9, 10, 11, 255]], dtype=np.uint8))
    assert imgprim.binarize(img, 10).bits.tolist() == [[False, False, True, True]]


def test_binarize_needs_gray(rgb_image):
    with pytest.raises(PreconditionError):
        imgprim.binarize(rgb_image(), 10)


def test_hsv_mask_hue_wraps_and_bounds_are_inclusive():
    data = np.zeros((1, 3, 3), dtype=np.uint8)
    data[0, 0] = (255, 0, 0)    # hue 0
    data[0, 1] = (255, 0, 64)   # hue ~345
    data[0, 2] = (0, 255, 0)    # hue 120
    mask = imgprim.hsv_mask(ScanImage(data), [HsvRange(340.0, 15.0, 0.4, 1.0, 0.3, 1.0)])
    assert mask.bits.tolist() == [[True, True, False]]

    exact = imgprim.hsv_mask(ScanImage(data), [HsvRange(120.0, 120.0, 1.0, 1.0, 1.0, 1.0)])
    assert exact.bits.tolist() == [[False, False, True]]


def test_dilate_and_erode_with_square_element():
    bits = np.zeros((7, 7), dtype=bool)
    bits[3, 3] = True
    grown = imgprim.dilate(BinaryMask(bits), 1)
    assert grown.count == 9
    assert imgprim.erode(grown, 1).count == 1
    single = BinaryMask(bits)
    assert imgprim.dilate(single, 0) is single
    with pytest.raises(ParameterError):
        imgprim.dilate(BinaryMask(bits), -1)


def test_components_sorted_largest_first():
    bits = np.zeros((10, 10), dtype=bool)
    bits[0:2, 0:2] = True
    bits[5:9, 5:9] = True
    bits[9, 0] = True
    components = imgprim.connected_components(BinaryMask(bits))
    assert [c.pixel_count for c in components] == [16, 4, 1]
    assert components[0].bbox == BoundingBox(5, 5, 9, 9)


def test_components_are_8_connected():
    bits = np.eye(5, dtype=bool)
    assert len(imgprim.connected_components(BinaryMask(bits))) == 1


def test_find_contours_reports_tight_boxes():
    bits = np.zeros((20, 20), dtype=bool)
    bits[2:6, 3:13] = True
    contours = imgprim.find_contours(BinaryMask(bits))
    assert [c.bbox.as_list() for c in contours] == [[3, 2, 13, 6]]
    assert imgprim.find_contours(BinaryMask.empty(5, 5)) == []


def test_canny_finds_a_step_edge():
    data = np.zeros((40, 40), dtype=np.uint8)
    data[:, 20:] = 200
    edges = imgprim.canny_edges(ScanImage(data), 50, 150)
    columns = np.flatnonzero(edges.bits.any(axis=0))
    assert columns.size > 0
    assert all(17 <= c <= 22 for c in columns)


def test_canny_rejects_bad_thresholds(gray_image):
    with pytest.raises(ParameterError):
        imgprim.canny_edges(gray_image(), 150, 50)


def test_hough_finds_a_long_line():
    bits = np.zeros((100, 100), dtype=bool)
    bits[50, 10:90] = True
    segments = imgprim.hough_lines(BinaryMask(bits), 30, 40, 5)
    assert segments
    assert any(s.length >= 70 and (s.angle < 1 or s.angle > 179) for s in segments)
    assert imgprim.hough_lines(BinaryMask.empty(10, 10), 30, 40, 5) == []


def test_hough_segments_are_plain_int_tuples():
    bits = np.zeros((60, 120), dtype=bool)
    bits[30, 10:110] = True
    segments = imgprim.hough_lines(BinaryMask(bits), 30, 50, 5)
    assert segments
    for s in segments:
        assert all(type(v) is int for v in s)
    assert any(s.length >= 50 and min(s.angle, 180 - s.angle) <= 2 for s in segments)


def test_hough_bridges_dotted_line():
    bits = np.zeros((40, 100), dtype=bool)
    for x in range(10, 90, 7):
        bits[20, x:x + 3] = True
    segments = imgprim.hough_lines(BinaryMask(bits), 10, 20, 6)
    assert any(s.length >= 60 for s in segments)


def test_canny_edges_lie_on_strong_gradients():
    rng = np.random.default_rng(7)
    noise = rng.integers(0, 256, size=(128, 128), dtype=np.uint8)
    data = cv2.GaussianBlur(noise, (7, 7), 2.0)
    lo, hi = 20, 40
    edges = imgprim.canny_edges(ScanImage(data), lo, hi)

    smoothed = cv2.GaussianBlur(data, (5, 5), 1.4).astype(np.float32)
    gx = cv2.Sobel(smoothed, cv2.CV_32F, 1, 0, ksize=3, borderType=cv2.BORDER_REPLICATE)
    gy = cv2.Sobel(smoothed, cv2.CV_32F, 0, 1, ksize=3, borderType=cv2.BORDER_REPLICATE)
    magnitude = np.hypot(gx, gy)
    inner = (slice(1, -1), slice(1, -1))
    assert edges.bits[inner].any()
    assert not (edges.bits[inner] & (magnitude[inner] < lo - 1e-3)).any()


def test_closing_contains_the_original_mask():
    rng = np.random.default_rng(11)
    for radius in (1, 2):
        for _ in range(5):
            mask = BinaryMask(rng.random((32, 32)) < 0.3)
            closed = imgprim.erode(imgprim.dilate(mask, radius), radius)
            assert not (mask.bits & ~closed.bits).any()


def test_dilate_and_erode_are_monotone():
    rng = np.random.default_rng(5)
    small = rng.random((32, 32)) < 0.2
    large = small | (rng.random((32, 32)) < 0.2)
    for op in (imgprim.dilate, imgprim.erode):
        a = op(BinaryMask(small), 1).bits
        b = op(BinaryMask(large), 1).bits
        assert not (a & ~b).any()


def test_component_sizes_add_up_to_mask_count():
    rng = np.random.default_rng(3)
    mask = BinaryMask(rng.random((48, 48)) < 0.25)
    components = imgprim.connected_components(mask)
    assert sum(c.pixel_count for c in components) == mask.count


def test_hsv_mask_without_ranges_is_empty(rgb_image):
    assert imgprim.hsv_mask(rgb_image(value=200), []).count == 0


def test_edge_enhance_responds_to_isolated_bright_pixel():
    data = np.zeros((9, 9), dtype=np.uint8)
    data[4, 4] = 100
    enhanced = imgprim.edge_enhance(ScanImage(data))
    assert int(enhanced.data[4, 4]) == 255
    assert int(enhanced.data[3, 3]) == 255
    assert int(enhanced.data[0, 0]) == 0


def test_crop_image_checks_bounds(gray_image):
    img = gray_image(10, 10)
    assert imgprim.crop_image(img, BoundingBox(2, 3, 6, 9)).data.shape == (6, 4)
    with pytest.raises(ParameterError):
        imgprim.crop_image(img, BoundingBox(2, 3, 11, 9))
