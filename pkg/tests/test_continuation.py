import csv
import io

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from loopcont.continuation import (LoopDisc, build_regular_lift, disc_distance_loops,
                                   imaginary_push, mean_value_audit, phase_pattern, ramp,
                                   safety_radius, slide)
from loopcont.errors import LiftFailure, PreconditionError, StepFailure
from loopcont.loops import Loop, LoopCurve, loop_distance
from loopcont.monodromy import (circle_point, f_eval, null_class_curve, random_null_loop,
                                small_loop_disc)
from loopcont.quadric import bilinear, quadric_defect


def f_value(y):
    return f_eval(y, n_r=32).value


@pytest.fixture(scope="module")
def still_curve():
    x = random_null_loop(np.random.default_rng(11))
    return LoopCurve([0.0, 0.5, 1.0], [x, x, x])


def test_ramp_shape():
    t = np.linspace(0, 1, 11)
    assert np.all(ramp(t, 0.0) == 1)
    r = ramp(t, 0.5)
    assert r[0] == 0 and np.all(r[5:] == 1) and np.all(np.diff(r) >= 0)


@settings(max_examples=20)
@given(st.integers(0, 2 ** 31), st.integers(0, 5))
def test_phase_pattern_is_unimodular_and_reproducible(seed, attempt):
    s = np.linspace(0, 2 * np.pi, 17)
    p = phase_pattern(seed, attempt, s)
    assert np.allclose(np.abs(p), 1) and np.array_equal(p, phase_pattern(seed, attempt, s))
    assert abs(p[0] - p[-1]) < 1e-12


def test_imaginary_push_is_a_unit_tangent_field():
    x = random_null_loop(np.random.default_rng(2))
    xs = x.samples()
    v = imaginary_push(xs, None)
    assert np.allclose(np.linalg.norm(v, axis=-1), 1)
    assert np.abs(bilinear(xs, v)).max() < 1e-12
    with pytest.raises(LiftFailure):
        imaginary_push(circle_point(0.0, np.linspace(0, 1, 4)), None)


def test_loop_disc_roundtrip_and_translation():
    rng = np.random.default_rng(3)
    c = rng.normal(size=(4, 9, 3)) + 1j * rng.normal(size=(4, 9, 3))
    d = LoopDisc(c)
    back = LoopDisc.from_samples(d.boundary_values(16), 3, 4)
    assert np.abs(back.coeffs - c).max() < 1e-12 and back.holomorphy_defect < 1e-12
    shift = Loop(rng.normal(size=(9, 3)) + 0j)
    moved = d.translated(shift)
    assert loop_distance(moved.center(), d.center() + shift) < 1e-12
    assert disc_distance_loops(moved, d) == pytest.approx(
        float(np.linalg.norm(shift.samples(d.n_eval), axis=-1).max()), rel=1e-12)


def test_regular_lift_of_a_still_curve(still_curve):
    lift = build_regular_lift(still_curve, push_scale=0.1, seed=1)
    rep = lift.report()
    assert rep["center_residual"] <= 1e-10 and rep["boundary_null_homotopic"]
    assert rep["initial_disc_in_m_prime"] and lift.boundary_margin > 0
    for disc in lift.discs:
        vals = disc.values(np.array([0.0, 0.5, 1.0, -1j]))
        assert quadric_defect(vals).max() < 1e-9
    sr = safety_radius(lift)
    assert sr.eps > 0 and sr.eps <= min(sr.cut_margin, sr.k_margin) / 3 + 1e-15


def test_slide_along_a_still_curve_is_constant(still_curve):
    lift = build_regular_lift(still_curve, push_scale=0.1, seed=1)
    chain = slide(f_value, still_curve, lift, n_phi=8)
    direct = f_value(still_curve.loops[0])
    assert abs(chain.increment()) < 1e-12
    assert np.abs(chain.values - direct).max() < 1e-8
    assert chain.report["overlap_ok"]
    rows = list(csv.reader(io.StringIO(chain.to_csv({"kappa_margin": lift.boundary_kappa}))))
    assert rows[0] == ["t", "re_f", "im_f", "delta1", "overlap_residual", "kappa_margin"]
    assert len(rows) == 4 and all("e" in v for v in rows[1])
    assert [r["t"] for r in chain.to_records()] == [0.0, 0.5, 1.0]


def test_coarse_grid_is_rejected():
    curve = null_class_curve(np.random.default_rng(0), n_t=4, sweep=0.05)
    lift = build_regular_lift(curve, push_scale=0.1, seed=0)
    with pytest.raises(StepFailure):
        slide(f_value, curve, lift, n_phi=8)


def test_mean_value_audit_is_small_inside_m_prime():
    rng = np.random.default_rng(5)
    x = random_null_loop(rng)
    disc = small_loop_disc(rng, x)
    assert mean_value_audit(f_value, disc, n_phi=8) < 1e-8


def test_mean_value_audit_requires_m_prime():
    x = Loop.from_function(lambda s: circle_point(0.0, s), 8)
    c = np.zeros((2, 17, 3), dtype=complex)
    c[0] = x.coeffs
    with pytest.raises(PreconditionError):
        mean_value_audit(f_value, LoopDisc(c), n_phi=8)
