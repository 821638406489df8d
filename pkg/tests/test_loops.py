import json

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from loopcont.errors import PreconditionError
from loopcont.loops import (Loop, LoopCurve, loop_analyze, loop_distance, loop_exhaustion,
                            loop_retract, smooth_curve)
from loopcont.quadric import retract_ambient
from loopcont.monodromy import circle_point, random_null_loop


def great_circle(n_loop=8):
    return Loop.from_function(lambda s: circle_point(0.0, s), n_loop)


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2 ** 32 - 1), st.integers(1, 12))
def test_samples_roundtrip_through_coefficients(seed, n_loop):
    rng = np.random.default_rng(seed)
    c = rng.normal(size=(2 * n_loop + 1, 3)) + 1j * rng.normal(size=(2 * n_loop + 1, 3))
    x = Loop(c)
    y = Loop.from_samples(x.samples(), n_loop)
    assert np.abs(y.coeffs - c).max() < 1e-12
    s = rng.uniform(0, 2 * np.pi, 5)
    direct = np.array([sum(c[k + n_loop] * np.exp(1j * k * t) for k in range(-n_loop, n_loop + 1))
                       for t in s])
    assert np.abs(x(s) - direct).max() < 1e-10


def test_derivative_samples_of_a_circle():
    x = great_circle()
    n = x.n_eval
    s = 2 * np.pi * np.arange(n) / n
    expected = (circle_point(0.0, s + 1e-6) - circle_point(0.0, s - 1e-6)) / 2e-6
    assert np.abs(x.derivative_samples() - expected).max() < 1e-8


def test_padding_and_arithmetic():
    x = great_circle(4)
    y = x.padded(10)
    assert y.n_loop == 10 and loop_distance(x, y) < 1e-14
    assert loop_distance(x + x, x.scaled(2.0)) < 1e-14
    assert loop_distance(x - x, Loop.constant(np.zeros(3), 4)) < 1e-14
    assert y.truncated(4).n_loop == 4


def test_record_roundtrip():
    x = random_null_loop(np.random.default_rng(0), n_loop=8, tol=_loose())
    y = Loop.from_record(json.loads(json.dumps(x.to_record())))
    assert np.array_equal(x.coeffs, y.coeffs) and y.n_eval == x.n_eval
    with pytest.raises(ValueError):
        Loop.from_record({"kind": "disc", "scheme_version": 1})


def _loose():
    from loopcont.config import DEFAULT
    return DEFAULT.updated(manifold=1e-4)


def test_analyze_reports_real_loop():
    r = loop_analyze(great_circle())
    assert r.quadric_defect < 1e-12 and r.kappa_min < 1e-12
    assert abs(r.u_min - 1) < 1e-12 and abs(r.u_max - 1) < 1e-12


def test_retract_of_scaled_circle():
    x = great_circle().scaled(1.5)
    y = loop_retract(x)
    assert loop_distance(y, great_circle()) < 1e-12
    assert abs(loop_exhaustion(x) - 1) < 1e-12


def test_curve_validation_and_interpolation():
    x, y = great_circle(), great_circle().scaled(1.1)
    c = LoopCurve([0.0, 1.0], [x, y])
    assert loop_distance(c.at(0.5), x.scaled(1.05)) < 1e-14
    assert not c.is_closed()
    with pytest.raises(PreconditionError):
        LoopCurve([0.0, 0.5], [x, y])
    with pytest.raises(PreconditionError):
        LoopCurve([0.0, 1.0], [x, x.scaled(3.0)])


def test_curve_record_roundtrip():
    x = great_circle()
    c = LoopCurve([0.0, 0.5, 1.0], [x, x.scaled(1.1), x])
    back = LoopCurve.from_record(json.loads(c.dumps()))
    assert back.is_closed() and np.array_equal(back.times, c.times)
    assert c.reversed().times[-1] == 1.0


def test_smooth_curve_fits_polynomial_path():
    t = np.linspace(0, 1, 9)
    pts = retract_ambient(np.stack([np.array([1.0, 0.3j * tt, 0.1 * tt ** 2]) for tt in t]))
    curve, err = smooth_curve(pts, degree=4)
    assert err < 1e-3
    assert np.abs(np.sum(curve(t) ** 2, axis=-1) - 1).max() < 1e-12
