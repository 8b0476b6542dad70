import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sbmlab.errors import SbmLabError
from sbmlab.grid import GridFunction, derivative


def make(f, n=101, a=-1.0, b=1.0):
    return GridFunction.from_callable(f, a, b, n)


def test_spacing_and_axis():
    g = make(np.sin, n=51)
    assert g.h == pytest.approx(2.0 / 50)
    assert g.x[0] == -1.0 and g.x[-1] == 1.0


def test_rejects_nonfinite():
    with pytest.raises(SbmLabError):
        GridFunction(0.0, 1.0, 3, np.array([0.0, np.nan, 1.0]))


def test_rejects_size_mismatch():
    with pytest.raises(SbmLabError):
        GridFunction(0.0, 1.0, 4, np.zeros(3))


def test_clip_nonnegative():
    g = GridFunction(0.0, 1.0, 3, np.array([1.0, -5e-13, 2.0]))
    clipped = g.clipped_nonnegative()
    assert clipped.values.min() == 0.0
    bad = GridFunction(0.0, 1.0, 3, np.array([1.0, -1e-9, 2.0]))
    with pytest.raises(SbmLabError):
        bad.clipped_nonnegative()


def test_right_cumulative_uniform_block():
    g = make(lambda x: np.ones_like(x), n=401, a=0.0, b=1.0)
    R = g.right_cumulative()
    assert R[0] == pytest.approx(1.0, abs=1e-12)
    assert np.allclose(R, 1.0 - g.x, atol=1e-12)


def test_derivative_exact_for_cubics():
    g = make(lambda x: x ** 3 - 2 * x ** 2 + x, n=41)
    d = derivative(g)
    expected = 3 * g.x ** 2 - 4 * g.x + 1
    assert np.max(np.abs(d.values - expected)) < 1e-10


def test_derivative_square_law():
    g = make(lambda x: x ** 2, n=81)
    assert np.max(np.abs(derivative(g).values - 2 * g.x)) < 1e-10


def test_derivative_constant_is_zero():
    g = make(lambda x: np.full_like(x, 3.7), n=21)
    assert np.max(np.abs(derivative(g).values)) < 1e-12


def test_derivative_needs_five_points():
    with pytest.raises(SbmLabError):
        derivative(GridFunction(0.0, 1.0, 4, np.zeros(4)))


@given(st.lists(st.floats(-10, 10), min_size=5, max_size=40))
@settings(max_examples=50, deadline=None)
def test_right_cumulative_monotone(vals):
    g = GridFunction(0.0, 1.0, len(vals), np.abs(np.asarray(vals)))
    R = g.right_cumulative()
    assert np.all(np.diff(R) <= 1e-12)
