from fractions import Fraction as F

import pytest
from hypothesis import given
from hypothesis import strategies as st

from tverberg import exact
from tverberg.frame import (FrameError, SimplexFrame, from_coefficients, nonneg_representation,
                            standard_frame, support)

coord = st.fractions(min_value=-10, max_value=10, max_denominator=5)


def point(d):
    return st.lists(coord, min_size=d, max_size=d).map(tuple)


def test_standard_frames():
    assert standard_frame(2).vertices == ((1, 0), (0, 1), (-1, -1))
    assert standard_frame(1).vertices == ((1,), (-1,))
    f3 = standard_frame(3)
    assert exact.combine([1] * 4, f3.vertices, 3) == (0, 0, 0)
    assert all(exact.rank([f3.vertices[j] for j in range(4) if j != i]) == 3 for i in range(4))


def test_frame_validation():
    with pytest.raises(FrameError):
        SimplexFrame(2, ((F(1), F(0)), (F(0), F(1)), (F(-1), F(0))))
    with pytest.raises(FrameError):
        SimplexFrame(2, ((F(1), F(1)), (F(-1), F(-1)), (F(0), F(0))))


def test_frame_json_round_trip():
    f = SimplexFrame(2, ((F(2), F(0)), (F(0), F(1, 2)), (F(-2), F(-1, 2))))
    assert SimplexFrame.from_json(f.to_json()) == f
    assert not f.is_standard() and standard_frame(2).is_standard()


def test_representation_examples():
    f = standard_frame(3)
    assert nonneg_representation(f, f.vertices[0]) == (1, 0, 0, 0)
    assert nonneg_representation(f, (0, 0, 0)) == (0, 0, 0, 0)
    minus_p0 = exact.scale(-1, f.vertices[0])
    assert nonneg_representation(f, minus_p0) == (0, 1, 1, 1)
    with pytest.raises(exact.DimensionError):
        nonneg_representation(f, (1, 2))


def test_support_examples():
    f = standard_frame(4)
    for i, p in enumerate(f.vertices):
        assert support(f, p) == {i}
    assert support(f, (0,) * 4) == frozenset()


@pytest.mark.parametrize("d", [1, 2, 3, 5])
def test_property_1_and_uniqueness(d):
    f = standard_frame(d)

    @given(point(d))
    def check(x):
        xi = nonneg_representation(f, x)
        assert min(xi) == 0 and all(c >= 0 for c in xi)
        assert from_coefficients(f, xi) == x
        assert support(f, x) != frozenset(range(d + 1))
        # shifting all coefficients by a common nonzero amount keeps the point
        # (the vertices sum to zero) but loses the min-zero normal form
        for lam in (F(1), F(-1, 3)):
            shifted = [c + lam for c in xi]
            assert from_coefficients(f, shifted) == x
            assert min(shifted) != 0 or any(c < 0 for c in shifted)

    check()


@given(point(3), st.fractions(min_value=F(1, 7), max_value=10, max_denominator=7))
def test_property_2_and_4(x, lam):
    f = standard_frame(3)
    assert (support(f, x) == frozenset()) == (x == (0, 0, 0))
    assert support(f, exact.scale(lam, x)) == support(f, x)


@given(point(3), point(3))
def test_property_5(x, y):
    f = standard_frame(3)
    both = support(f, x) | support(f, y)
    sxy = support(f, exact.add(x, y))
    assert sxy <= both
    assert (sxy == both) == (both != frozenset(range(4)))


@given(point(4))
def test_property_6(x):
    f = standard_frame(4)
    if any(x):
        assert support(f, x) | support(f, exact.scale(-1, x)) == frozenset(range(5))


def test_nonstandard_frame_representation():
    f = SimplexFrame(2, ((F(2), F(0)), (F(1), F(3)), (F(-3), F(-3))))
    x = (F(1, 2), F(7, 3))
    xi = nonneg_representation(f, x)
    assert min(xi) == 0
    assert from_coefficients(f, xi) == x
