import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from emsched import (
    AffineReciprocal,
    BudgetUnachievable,
    Constant,
    InstanceError,
    PiecewiseLinear,
    PowerLaw,
    evaluate_energy,
    invert_energy,
)
from emsched.energy import D_MIN, duration_floor, energy_from_dict, shape_violation


@pytest.mark.parametrize(
    "f, d, expected",
    [
        (PowerLaw(1, 3), 1.0, 1.0),
        (PowerLaw(2, 3), 2.0, 2.0),  # 2**3 / 2**2
        (PowerLaw(2, 3), 1.0, 8.0),
        (Constant(5), 100.0, 5.0),
        (AffineReciprocal(1.0, 2.0), 4.0, 1.5),
    ],
)
def test_evaluate(f, d, expected):
    assert evaluate_energy(f, d) == pytest.approx(expected, rel=1e-15)


@pytest.mark.parametrize("d", [0.0, -1.0])
def test_evaluate_rejects_nonpositive_duration(d):
    with pytest.raises(ValueError):
        evaluate_energy(PowerLaw(1, 3), d)


def test_invert_examples():
    assert invert_energy(PowerLaw(1, 3), 1.0) == pytest.approx(1.0)
    assert invert_energy(PowerLaw(1, 3), 4.0) == pytest.approx(0.5)
    with pytest.raises(BudgetUnachievable):
        invert_energy(Constant(5), 4.0)


def test_invert_at_infimum():
    # a constant curve reaches its infimum everywhere; a power law never does
    assert invert_energy(Constant(5), 5.0) > 0
    with pytest.raises(BudgetUnachievable):
        invert_energy(PowerLaw(1, 3), 0.0)
    with pytest.raises(BudgetUnachievable):
        invert_energy(AffineReciprocal(2.0, 1.0), 2.0)


def test_piecewise_table():
    f = PiecewiseLinear([(1, 10), (2, 4), (4, 2)])
    assert f.value(0.5) == math.inf
    assert f.value(1.5) == pytest.approx(7.0)
    assert f.value(10.0) == pytest.approx(2.0)
    assert f.infimum == 2.0
    assert invert_energy(f, 7.0) == pytest.approx(1.5)
    assert invert_energy(f, 2.0) == pytest.approx(4.0)
    assert invert_energy(f, 50.0) == pytest.approx(1.0)
    assert duration_floor(f) == 1.0
    # the epigraph pieces reproduce the curve on its domain
    for d in np.linspace(1, 6, 23):
        assert max(s * d + b for s, b in f.epigraph()) == pytest.approx(f.value(d))


def test_piecewise_increasing_rejected():
    with pytest.raises(InstanceError, match="energy function not non-increasing"):
        PiecewiseLinear([(1, 5), (2, 7)])


def test_piecewise_nonconvex_rejected():
    with pytest.raises(InstanceError, match="not convex"):
        PiecewiseLinear([(1, 10), (2, 9), (3, 2)])


@pytest.mark.parametrize(
    "spec",
    [
        {"kind": "powerlaw", "work": 1.0, "alpha": 3.0},
        {"kind": "affine_reciprocal", "a": 0.5, "b": 2.0},
        {"kind": "piecewise", "points": [[1.0, 4.0], [2.0, 1.0]]},
        {"kind": "constant", "c": 3.0},
    ],
)
def test_dict_round_trip(spec):
    f = energy_from_dict(spec)
    assert f.to_dict() == spec
    assert shape_violation(f) is None


@pytest.mark.parametrize(
    "spec",
    [
        {"kind": "cubic"},
        {"kind": "powerlaw", "work": 1.0},
        {"kind": "powerlaw", "work": -1.0, "alpha": 3.0},
        {"kind": "powerlaw", "work": 1.0, "alpha": 1.0},
    ],
)
def test_bad_specs(spec):
    with pytest.raises(InstanceError):
        energy_from_dict(spec)


def test_powerlaw_scaling_keeps_energy():
    f = PowerLaw(1.3, 2.5)
    g = f.scaled(3.0)
    for d in (0.2, 1.0, 7.0):
        assert g.value(3.0 * d) == pytest.approx(f.value(d), rel=1e-12)


# -- properties --------------------------------------------------------------

curves = st.one_of(
    st.builds(PowerLaw, st.floats(0.1, 5.0), st.floats(1.1, 4.0)),
    st.builds(AffineReciprocal, st.floats(0.0, 5.0), st.floats(0.0, 5.0)),
    st.builds(Constant, st.floats(0.0, 10.0)),
)


@settings(max_examples=200, deadline=None)
@given(curves, st.floats(1e-3, 1e3), st.floats(1e-3, 1e3))
def test_monotone_and_midpoint_convex(f, a, b):
    d1, d2 = min(a, b), max(a, b)
    e1, e2 = evaluate_energy(f, d1), evaluate_energy(f, d2)
    assert e1 >= e2 * (1 - 1e-12)
    mid = evaluate_energy(f, 0.5 * (d1 + d2))
    assert mid <= 0.5 * (e1 + e2) * (1 + 1e-12) + 1e-300


@settings(max_examples=200, deadline=None)
@given(
    st.one_of(
        st.builds(PowerLaw, st.floats(0.1, 5.0), st.floats(1.1, 4.0)),
        st.builds(AffineReciprocal, st.floats(0.0, 5.0), st.floats(0.01, 5.0)),
    ),
    st.floats(1e-2, 1e2),
)
def test_inverse_of_evaluate_is_identity(f, d):
    assert invert_energy(f, evaluate_energy(f, d)) == pytest.approx(d, rel=1e-9)


@settings(max_examples=100, deadline=None)
@given(st.lists(st.floats(0.05, 3.0), min_size=1, max_size=5), st.floats(0.1, 20.0), st.data())
def test_piecewise_inverse_is_shortest(widths, e0, data):
    # build a convex decreasing table from decreasing negative slopes
    slopes = sorted(data.draw(st.lists(st.floats(-5.0, -0.01), min_size=len(widths), max_size=len(widths))))
    pts = [(1.0, e0 + sum(-s * w for s, w in zip(slopes, widths)))]
    for s, w in zip(slopes, widths):
        d, e = pts[-1]
        pts.append((d + w, e + s * w))
    f = PiecewiseLinear(pts)
    e = data.draw(st.floats(f.infimum, pts[0][1]))
    d = invert_energy(f, e)
    assert f.value(d) <= e + 1e-9
    if d > pts[0][0] + 1e-9:
        assert f.value(d - 1e-6) > e - 1e-9


def test_floor_constant():
    assert D_MIN == 1e-9
    assert duration_floor(PowerLaw(1, 2)) == D_MIN
