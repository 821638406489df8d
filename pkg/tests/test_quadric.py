from contextlib import nullcontext

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from loopcont.config import DEFAULT
from loopcont.errors import BranchCut, CriticalPoint, ZeroPoint
from loopcont.quadric import (Region, bilinear, classify, cover_lift, cover_preimage, cover_push,
                              cover_push_jet, cut_margin, e_basis, exhaustion, kappa, omega_eval,
                              project_tangent, quadric_defect, retract_ambient, retract_derivative)

finite = st.floats(-3, 3, allow_nan=False)
vec3 = st.tuples(*[finite] * 6).map(lambda a: np.array(a[:3]) + 1j * np.array(a[3:]))
vec2 = st.tuples(*[finite] * 4).map(lambda a: np.array(a[:2]) + 1j * np.array(a[2:]))


@given(vec3)
def test_retraction_lands_on_quadric_and_is_idempotent(w):
    if cut_margin(w) < 1e-2:
        with pytest.raises(BranchCut) if cut_margin(w) <= DEFAULT.cut else nullcontext():
            retract_ambient(w)
        return
    z = retract_ambient(w)
    assert quadric_defect(z) < 1e-12
    assert np.abs(retract_ambient(z) - z).max() < 1e-12 * max(1, np.abs(z).max())


def test_retraction_rejects_cut():
    with pytest.raises(BranchCut):
        retract_ambient(np.array([1j, 0, 0]))


def test_retraction_derivative_matches_difference_quotient():
    rng = np.random.default_rng(4)
    w = rng.normal(size=3) + 1j * rng.normal(size=3)
    h = rng.normal(size=3) + 1j * rng.normal(size=3)
    eps = 1e-6
    fd = (retract_ambient(w + eps * h) - retract_ambient(w - eps * h)) / (2 * eps)
    assert np.abs(fd - retract_derivative(w, h)).max() < 1e-8


def test_kappa_identity_on_quadric():
    rng = np.random.default_rng(0)
    z = retract_ambient(rng.normal(size=(50, 3)) + 1j * rng.normal(size=(50, 3)))
    # |z|^2 = 1 + 2 |Im z|^2 on M
    assert np.allclose(exhaustion(z), 1 + 2 * kappa(z) ** 2, atol=1e-12)


@given(vec3)
def test_e_basis_spans_kernel_of_du(w):
    if cut_margin(w) < 1e-2:
        return
    z = retract_ambient(w)
    if kappa(z) < 1e-3:
        with pytest.raises(CriticalPoint) if kappa(z) <= DEFAULT.real_locus else nullcontext():
            e_basis(z)
        return
    e = e_basis(z)
    assert np.all(np.isreal(e)) and abs(np.linalg.norm(e) - 1) < 1e-12
    assert abs(bilinear(z, e)) < 1e-10          # tangent
    assert abs(np.vdot(z, e)) < 1e-10           # du(e) = 0


def test_e_basis_on_real_sphere_raises():
    with pytest.raises(CriticalPoint):
        e_basis(np.array([1.0, 0, 0]))


@given(vec2)
def test_cover_push_is_even_and_lands_in_m_prime(w):
    if np.linalg.norm(w) < 1e-3:
        return
    z = cover_push(w)
    assert quadric_defect(z) < 1e-9 * max(1, exhaustion(z))
    assert kappa(z) > 0
    assert np.allclose(cover_push(-w), z)
    back = cover_preimage(z)
    assert min(np.abs(back - w).max(), np.abs(back + w).max()) < 1e-8 * max(1, np.abs(w).max())


def test_cover_push_rejects_origin():
    with pytest.raises(ZeroPoint):
        cover_push(np.zeros(2))


def test_cover_push_jet_matches_difference_quotient():
    rng = np.random.default_rng(1)
    w = rng.normal(size=2) + 1j * rng.normal(size=2)
    h = rng.normal(size=2) + 1j * rng.normal(size=2)
    z, dz = cover_push_jet(w, h)
    eps = 1e-6
    fd = (cover_push(w + eps * h) - cover_push(w - eps * h)) / (2 * eps)
    assert np.allclose(z, cover_push(w))
    assert np.abs(fd - dz).max() < 1e-7


def test_cover_lift_detects_nontrivial_loop():
    s = 2 * np.pi * np.arange(256) / 256
    w0 = np.array([1.0, 0.3 + 0.2j])
    half_turn = cover_push(np.exp(0.5j * s)[:, None] * w0)
    full_turn = cover_push(np.exp(1j * s)[:, None] * w0)
    assert not cover_lift(half_turn).closed
    assert cover_lift(full_turn).closed


def test_omega_is_the_determinant():
    rng = np.random.default_rng(2)
    z, v, w = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
    assert np.isclose(omega_eval(z, v, w), np.linalg.det(np.array([z, v, w])))


def test_project_tangent_is_exact():
    rng = np.random.default_rng(3)
    z = retract_ambient(rng.normal(size=(20, 3)) + 1j * rng.normal(size=(20, 3)))
    v = project_tangent(z, rng.normal(size=(20, 3)) + 1j * rng.normal(size=(20, 3)))
    assert np.abs(bilinear(z, v)).max() < 1e-12


def test_classify_region_levels():
    z = np.array([np.sqrt(2), 1j, 0])
    c = classify(z, Region(2.0, 4.0, 3.0))
    assert abs(c.u - 3) < 1e-12 and c.in_M_prime and not c.in_K
    assert c.in_M_ab and c.in_M_closed_ab and not c.in_M_a
    assert classify(np.array([1.0, 0, 0])).in_K


def test_region_validation():
    with pytest.raises(ValueError):
        Region(1.0, 3.0, 2.0)
    with pytest.raises(ValueError):
        Region(2.0, 3.0, 4.0)


@settings(max_examples=50)
@given(vec3)
def test_cut_margin_is_distance_to_the_cut(w):
    g = np.sum(w * w)
    m = cut_margin(w)
    assert m >= 0
    if g.real > 0:
        assert np.isclose(m, abs(g))
    else:
        assert np.isclose(m, abs(g.imag))
