import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from emrotmatch import shapes
from emrotmatch.raster import (
    GrayImage,
    ImageFormatError,
    RotationSpec,
    circle_mask,
    load_image,
    quantize,
    rotate,
    rotate_image,
    save_image,
)


def smooth_blob(size=48, sigma=6.0, dx=3.0, dy=-2.0):
    c = (size - 1) / 2.0
    y, x = np.mgrid[0:size, 0:size].astype(float)
    g = 200.0 * np.exp(-((x - c - dx) ** 2 + (y - c - dy) ** 2) / (2 * sigma**2))
    g += 40.0 * np.exp(-((x - c + 6) ** 2 + (y - c - 5) ** 2) / (2 * 4.0**2))
    return GrayImage(g)


def test_p2_decode(tmp_path):
    p = tmp_path / "a.pgm"
    p.write_text("P2\n# tiny\n2 2\n255\n0 10\n20 30\n")
    img = load_image(p)
    assert img == GrayImage.from_list(2, 2, [0, 10, 20, 30])


def test_ppm_white_is_255(tmp_path):
    p = tmp_path / "w.ppm"
    p.write_bytes(b"P6\n1 1\n255\n" + bytes([255, 255, 255]))
    assert load_image(p).pixels[0, 0] == pytest.approx(255.0, abs=1e-9)
    q = tmp_path / "w3.ppm"
    q.write_text("P3 1 1 255 255 255 255\n")
    assert load_image(q).pixels[0, 0] == pytest.approx(255.0, abs=1e-9)


def test_maxval_rescaled(tmp_path):
    p = tmp_path / "m.pgm"
    p.write_text("P2 3 1 15 0 15 5\n")
    np.testing.assert_allclose(load_image(p).pixels[0], [0, 255, 85])


def test_single_pixel_save(tmp_path):
    p = tmp_path / "one.pgm"
    save_image(GrayImage.from_list(1, 1, [128]), p)
    assert p.read_bytes() == b"P5\n1 1\n255\n" + bytes([128])
    assert load_image(p).pixels[0, 0] == 128


def test_round_half_up():
    np.testing.assert_array_equal(quantize(np.array([127.6, 127.5, 127.4, -3.0, 300.0])), [128, 128, 127, 0, 255])


def test_bad_files(tmp_path):
    p = tmp_path / "x.pgm"
    p.write_bytes(b"P9\n1 1\n255\n\x00")
    with pytest.raises(ImageFormatError):
        load_image(p)
    q = tmp_path / "short.pgm"
    q.write_bytes(b"P5\n4 4\n255\n\x00\x00")
    with pytest.raises(ImageFormatError):
        load_image(q)


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 9), st.integers(1, 9), st.data(), st.booleans())
def test_roundtrip_lossless(tmp_path_factory, w, h, data, plain):
    vals = data.draw(st.lists(st.integers(0, 255), min_size=w * h, max_size=w * h))
    img = GrayImage.from_list(w, h, vals)
    p = tmp_path_factory.mktemp("rt") / "r.pgm"
    save_image(img, p, plain=plain)
    assert load_image(p) == img


def test_rotate_zero_and_360(centered_rect):
    assert rotate(centered_rect, 0.0) == centered_rect
    assert rotate(centered_rect, 360.0) == rotate(centered_rect, 0.0)
    assert RotationSpec(-90).angle == 270.0


@pytest.mark.parametrize("size", [32, 33])
def test_rotate_90_matches_permutation(size):
    img = shapes.rectangle(size, 9.5, 4.5, offset=(2.0, 1.0))
    # independent oracle: clockwise quarter turn as a pure index permutation
    h = w = size
    oracle = np.empty_like(img.pixels)
    for y in range(h):
        for x in range(w):
            # output (x, y) takes source (y, h-1-x) under a clockwise turn
            oracle[y, x] = img.pixels[h - 1 - x, y]
    out = rotate(img, 90.0)
    np.testing.assert_allclose(out.pixels, oracle, atol=1e-9)
    # the wide rectangle is now tall
    cols = np.nonzero(out.pixels.max(axis=0) > 128)[0]
    rows = np.nonzero(out.pixels.max(axis=1) > 128)[0]
    assert len(rows) > len(cols)


def test_rotate_180_is_exact_permutation():
    img = shapes.ellipse(31, 9.0, 4.0, offset=(3.0, -2.0))
    np.testing.assert_allclose(rotate(img, 180.0).pixels, img.pixels[::-1, ::-1], atol=1e-9)


@settings(max_examples=25, deadline=None)
@given(st.floats(1.0, 359.0))
def test_rotate_there_and_back(theta):
    img = smooth_blob()
    back = rotate(rotate(img, theta), 360.0 - theta)
    mask = circle_mask(img.width, img.height)
    assert np.abs(back.pixels - img.pixels)[mask].mean() < 2.0


@settings(max_examples=25, deadline=None)
@given(st.floats(0.0, 360.0))
def test_rotate_preserves_intensity_in_circle(theta):
    img = smooth_blob(sigma=4.0, dx=2.0, dy=1.0)
    mask = circle_mask(img.width, img.height)
    base = img.pixels[mask].sum()
    assert abs(rotate(img, theta).pixels[mask].sum() - base) <= 0.01 * base


def test_rotation_is_clockwise_on_screen():
    # a bright dot right of center moves below center under a clockwise quarter turn
    p = np.zeros((11, 11))
    p[5, 8] = 255.0
    out = rotate(GrayImage(p), 90.0).pixels
    assert out[8, 5] == pytest.approx(255.0)


def test_rotation_fill_and_center():
    img = GrayImage(np.full((9, 9), 100.0))
    out = rotate_image(img, RotationSpec(45.0, fill=7.0))
    assert out.pixels[0, 0] == 7.0 and out.pixels[4, 4] == 100.0
    # turning about a corner pushes most of the frame outside
    moved = rotate_image(img, RotationSpec(90.0, center=(0.0, 0.0)))
    assert moved.pixels[0, 0] == 100.0 and moved.pixels[8, 8] == 0.0
