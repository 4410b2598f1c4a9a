from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from PIL import Image

from seamless import robustness
from seamless.colorspace import srgb_to_lab_array
from seamless.contrast import analyze_image
from seamless.errors import InvalidTarget, OutOfRange
from seamless.nullmodels import make_rng, shuffle_pixels
from seamless.robustness import (
    BLACKBODY_TABLE,
    DEFAULT_KELVINS,
    KELVIN_MIN,
    KELVIN_STEP,
    apply_temperature,
    blackbody_rgb,
    resample_weights,
    resize_bicubic,
    size_sweep,
    target_shape,
    temperature_factors,
    temperature_sweep,
)
from seamless.synth import _mosaic_base, _quantize, checkerboard, solid


def test_anchor_1500k():
    assert tuple(blackbody_rgb(1500)) == (255, 109, 0)
    white = np.full((2, 3, 3), 255, np.uint8)
    assert apply_temperature(white, 1500)[0, 0].tolist() == [255, 109, 0]


def test_6500k_is_near_white():
    assert min(blackbody_rgb(6500)) >= 249


def test_table_rows_returned_exactly():
    for i, row in enumerate(BLACKBODY_TABLE):
        assert list(blackbody_rgb(KELVIN_MIN + i * KELVIN_STEP)) == row.tolist()


def test_interpolation_between_rows():
    lo, hi = np.array(blackbody_rgb(1500)), np.array(blackbody_rgb(1600))
    mid = np.array(blackbody_rgb(1550))
    assert np.all(np.minimum(lo, hi) <= mid) and np.all(mid <= np.maximum(lo, hi))


@pytest.mark.parametrize("k", [999, 10001, -5])
def test_out_of_range(k):
    with pytest.raises(OutOfRange):
        blackbody_rgb(k)
    with pytest.raises(OutOfRange):
        apply_temperature(np.zeros((1, 1, 3), np.uint8), k)


def test_blue_factor_nondecreasing_when_warm():
    b = [temperature_factors(k)[2] for k in range(1000, 6601, 25)]
    assert all(x <= y for x, y in zip(b, b[1:]))


def test_black_stays_black():
    for k in DEFAULT_KELVINS:
        assert not apply_temperature(np.zeros((2, 2, 3), np.uint8), k).any()


def test_unit_factors_are_identity(monkeypatch):
    # no table row is pure white, so pin the lookup to one
    monkeypatch.setattr(robustness, "blackbody_rgb", lambda k: (255, 255, 255))
    img = np.random.default_rng(0).integers(0, 256, (7, 5, 3), dtype=np.uint8)
    assert np.array_equal(robustness.apply_temperature(img, 6500), img)


def test_checkerboard_sweep_keeps_minus_one():
    img = checkerboard(20, 20, 1, (240, 200, 160), (30, 60, 90))
    for k, stats in temperature_sweep(img, [1500, 4000, 6500, 10000]):
        assert stats.s == -1.0, k


def test_solid_sweep_is_degenerate():
    assert all(st.degenerate for _, st in temperature_sweep(solid(8, 8), [1500, 6500, 10000]))
    assert all(st.degenerate for _, st in size_sweep(solid(80, 60), [20, 100, 300]))


def test_mosaic_temperature_sweep_golden():
    img = _quantize(_mosaic_base(make_rng(99), 64, 48, 8))
    frozen = {
        1500: (0.5412123300773324, 4.213803295870413),
        4000: (0.5203689193338839, 6.240282694254938),
        6500: (0.5200967076010027, 7.230980783413553),
        10000: (0.5219144124729448, 6.589532106680772),
    }
    for k, stats in temperature_sweep(img, list(frozen)):
        assert stats.s == pytest.approx(frozen[k][0], abs=1e-9)
        assert stats.d_mean == pytest.approx(frozen[k][1], abs=1e-9)
    s0 = analyze_image(srgb_to_lab_array(img)).s
    worst = max(abs(st.s - s0) for _, st in temperature_sweep(img))
    assert worst == pytest.approx(0.020741403601496455, abs=1e-9)


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2**31), st.sampled_from(DEFAULT_KELVINS))
def test_temperature_commutes_with_shuffle(seed, k):
    img = np.random.default_rng(seed).integers(0, 256, (6, 9, 3), dtype=np.uint8)
    a = shuffle_pixels(apply_temperature(img, k), seed)
    b = apply_temperature(shuffle_pixels(img, seed), k)
    assert np.array_equal(a, b)


# ---------------------------------------------------------------- resize


def _keys(x: Fraction) -> Fraction:
    a = Fraction(-1, 2)
    x = abs(x)
    if x < 1:
        return (a + 2) * x**3 - (a + 3) * x**2 + 1
    if x < 2:
        return a * x**3 - 5 * a * x**2 + 8 * a * x - 4 * a
    return Fraction(0)


def _exact_axis(values, out_size):
    n = len(values)
    scale = Fraction(n, out_size)
    fscale = max(scale, Fraction(1))
    out = []
    for i in range(out_size):
        center = (i + Fraction(1, 2)) * scale
        w = [_keys((j + Fraction(1, 2) - center) / fscale) for j in range(n)]
        out.append(sum(wj * v for wj, v in zip(w, values)) / sum(w))
    return out


def test_gradient_4x4_to_2x2_against_exact_kernel():
    grad = np.array([[10 * x + 40 * y for x in range(4)] for y in range(4)], dtype=np.uint8)
    img = np.repeat(grad[..., None], 3, axis=2)
    rows = [_exact_axis([Fraction(int(v)) for v in r], 2) for r in grad]
    cols = [_exact_axis([rows[y][x] for y in range(4)], 2) for x in range(2)]
    want = [[int(cols[x][y] + Fraction(1, 2)) for x in range(2)] for y in range(2)]
    got = resize_bicubic(img, 2)
    assert got[..., 0].tolist() == want
    assert want == [[29, 48], [102, 121]]


@pytest.mark.parametrize("n_in, n_out", [(7, 3), (5, 9), (12, 12 - 1)])
def test_weights_match_exact_kernel(n_in, n_out):
    idx, w = resample_weights(n_in, n_out)
    dense = np.zeros((n_out, n_in))
    for i in range(n_out):
        np.add.at(dense[i], idx[i], w[i])
    for k in range(n_in):
        unit = [Fraction(int(j == k)) for j in range(n_in)]
        exact = [float(v) for v in _exact_axis(unit, n_out)]
        assert dense[:, k] == pytest.approx(exact, abs=1e-12)


def test_identity_width_returns_copy():
    img = np.random.default_rng(1).integers(0, 256, (30, 40, 3), dtype=np.uint8)
    out = resize_bicubic(img, 40)
    assert np.array_equal(out, img) and out is not img


def test_shape_follows_longer_side():
    assert target_shape(30, 40, 20) == (15, 20)
    assert target_shape(40, 30, 20) == (20, 15)
    assert resize_bicubic(np.zeros((30, 40, 3), np.uint8), 20).shape == (15, 20, 3)


@pytest.mark.parametrize("width", [2, 17, 64, 333])
def test_solid_stays_solid(width):
    out = resize_bicubic(solid(100, 70, (12, 200, 99)), width)
    assert np.all(out == np.array([12, 200, 99], np.uint8))


@pytest.mark.parametrize("width", [150, 450])
def test_mean_channel_preserved(width):
    img = np.random.default_rng(2).integers(0, 256, (200, 300, 3), dtype=np.uint8)
    out = resize_bicubic(img, width)
    diff = np.abs(out.reshape(-1, 3).mean(0) - img.reshape(-1, 3).mean(0))
    assert np.all(diff <= 2.0)


def test_close_to_pillow_on_smooth_image():
    y, x = np.mgrid[0:240, 0:320]
    img = np.stack([x * 0.7, y * 0.9, 128 + 60 * np.sin(x / 25.0) * np.cos(y / 30.0)], -1)
    img = np.clip(img, 0, 255).astype(np.uint8)
    for width in (100, 160, 250):
        ours = resize_bicubic(img, width).astype(int)
        h, w = target_shape(240, 320, width)
        ref = np.asarray(Image.fromarray(img).resize((w, h), Image.BICUBIC), dtype=int)
        assert np.abs(ours - ref).max() <= 3


def test_checkerboard_identity_width_is_minus_one():
    img = checkerboard(500, 400, 1, (255, 255, 255), (0, 0, 0))
    [(w, stats)] = size_sweep(img, [500])
    assert stats.s == -1.0


def test_width_one_rejected():
    with pytest.raises(InvalidTarget):
        size_sweep(solid(10, 10), [50, 1])
    with pytest.raises(InvalidTarget):
        resize_bicubic(solid(10, 10), 1)


def test_sweep_reads_files(tmp_path):
    img = np.random.default_rng(4).integers(0, 256, (20, 30, 3), dtype=np.uint8)
    Image.fromarray(img).save(tmp_path / "p.png")
    assert size_sweep(tmp_path / "p.png", [15]) == size_sweep(img, [15])
    assert temperature_sweep(tmp_path / "p.png", [2000]) == temperature_sweep(img, [2000])
