import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from seamless.colorspace import srgb_to_lab_array
from seamless.contrast import (
    HIST_LEN,
    StreamingMoments,
    adjacent_distances,
    analyze_image,
    expected_pair_count,
    seamlessness,
)
from seamless.errors import EmptyImage, EmptyStream
from seamless.synth import checkerboard, solid


def _lab(srgb):
    return srgb_to_lab_array(np.asarray(srgb, dtype=np.uint8))


def test_one_by_two_equal_pixels():
    img = np.full((1, 2, 3), 42.0)
    assert adjacent_distances(img).tolist() == [0.0]


def test_single_pixel_has_no_pairs():
    with pytest.raises(EmptyImage):
        adjacent_distances(np.zeros((1, 1, 3)))


@pytest.mark.parametrize("h, w", [(2, 2), (1, 5), (7, 1), (3, 4), (10, 13)])
def test_pair_count(h, w):
    assert adjacent_distances(np.zeros((h, w, 3))).size == expected_pair_count(w, h)
    assert expected_pair_count(2, 2) == 4


def test_three_by_three_against_enumeration():
    lab = np.array(
        [
            [[10, 0, 0], [20, 5, -5], [30, 0, 10]],
            [[40, -20, 0], [50, 0, 0], [60, 10, 10]],
            [[70, 3, 4], [80, 0, -30], [90, 25, 0]],
        ],
        dtype=np.float64,
    )
    want = []
    for y in range(3):
        for x in range(3):
            for dy, dx in ((0, 1), (1, 0)):
                if y + dy < 3 and x + dx < 3:
                    want.append(math.dist(lab[y, x], lab[y + dy, x + dx]))
    got = adjacent_distances(lab)
    assert got.size == 12
    assert sorted(got) == pytest.approx(sorted(want), abs=1e-12)
    assert got[0] == pytest.approx(math.sqrt(150))  # (10,0,0) to (20,5,-5)


@pytest.mark.parametrize("c", [5.0, 0.1, 142.1068062753979, 1e-7])
def test_constant_distance_stream(c):
    stats = seamlessness(np.full(200_000, c))
    assert stats.d_std == 0.0
    assert stats.s == -1.0


def test_zero_distances_are_degenerate():
    stats = seamlessness([0.0, 0.0, 0.0])
    assert stats.degenerate and stats.s is None
    assert stats.to_dict()["degenerate"] is True


def test_empty_stream():
    with pytest.raises(EmptyStream):
        seamlessness([])


def test_exponential_distances_give_zero_s():
    d = np.random.default_rng(7).exponential(5.0, 1_000_000)
    stats = seamlessness(d)
    assert abs(stats.s) <= 0.01
    assert stats.d_mean == pytest.approx(d.mean(), rel=1e-12)
    assert stats.d_std == pytest.approx(d.std(), rel=1e-9)


def test_stream_forms_agree():
    d = np.random.default_rng(3).gamma(2.0, 3.0, 200_003)
    whole = seamlessness(d)
    chunked = seamlessness(np.array_split(d, 17))
    scalars = seamlessness(iter(d[:5000].tolist()))
    assert chunked.d_mean == pytest.approx(whole.d_mean, abs=1e-9)
    assert chunked.d_std == pytest.approx(whole.d_std, abs=1e-9)
    assert np.array_equal(chunked.histogram, whole.histogram)
    assert scalars.d_std == pytest.approx(d[:5000].std(), abs=1e-9)


def test_streaming_push_matches_two_pass():
    x = np.random.default_rng(1).normal(1e6, 3.0, 10_000)
    m = StreamingMoments()
    for v in x:
        m.push(float(v))
    assert m.mean == pytest.approx(x.mean(), rel=1e-14)
    assert m.std == pytest.approx(x.std(), rel=1e-9)


def test_histogram_bins_and_overflow():
    stats = seamlessness([0.0, 0.5, 1.0, 399.9, 400.0, 1000.0])
    assert len(stats.histogram) == HIST_LEN
    assert stats.histogram[0] == 2 and stats.histogram[1] == 1
    assert stats.histogram[399] == 1 and stats.histogram[-1] == 2
    assert stats.histogram.sum() == stats.n_pairs


@pytest.mark.parametrize("cell", [1, 3])
def test_checkerboard_is_minus_one(cell):
    img = _lab(checkerboard(12, 9, cell, (200, 10, 10), (10, 10, 200)))
    stats = analyze_image(img)
    if cell == 1:
        assert stats.s == -1.0
    else:
        assert stats.s > -1.0  # like-colour neighbours inside cells


def test_solid_image_is_degenerate():
    assert analyze_image(_lab(solid(9, 4))).degenerate


images = arrays(
    np.uint8,
    st.tuples(st.integers(1, 12), st.integers(2, 12), st.just(3)),
)


@settings(max_examples=60, deadline=None)
@given(images)
def test_s_bounded_and_symmetric(srgb):
    lab = _lab(srgb)
    base = analyze_image(lab)
    if base.s is not None:
        assert -1.0 <= base.s <= 1.0
    for t in (np.rot90(lab), np.flipud(lab), np.fliplr(lab), np.rot90(lab, 2)):
        assert analyze_image(np.ascontiguousarray(t)) == base


@settings(max_examples=40, deadline=None)
@given(arrays(np.float64, st.integers(1, 300), elements=st.floats(0, 500)))
def test_s_scale_invariant(d):
    a = seamlessness(d)
    b = seamlessness(d * 4.0)
    if a.s is None:
        assert b.s is None
    else:
        assert b.s == pytest.approx(a.s, abs=1e-9)
