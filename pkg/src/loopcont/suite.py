"""Fast deterministic invariant checks run by ``loopcont verify``.

Each check returns a dict with a ``passed`` flag and the measured quantities;
nothing here depends on wall-clock time, so two runs with the same seed give
identical reports.
"""
import json

import numpy as np

from .config import DEFAULT
from .deformation import constant_problem, fiber_line_scan, push_disc
from .harmonic import BoundaryArcSet, HarmonicCertificate, arc_measure, certificate_build, certificate_verify
from .monodromy import (df_eval, f_eval, period_K, random_null_loop, random_tangent,
                        small_loop_disc)
from .continuation import mean_value_audit
from .quadric import quadric_defect, retract_ambient

FOUR_PI = 4 * np.pi


def check_retraction(rng, tol, n=200):
    w = rng.normal(size=(n, 3)) + 1j * rng.normal(size=(n, 3))
    z = retract_ambient(w, tol)
    defect = float(quadric_defect(z).max())
    again = float(np.abs(retract_ambient(z, tol) - z).max())
    return {"max_defect": defect, "idempotence": again,
            "passed": defect <= tol.manifold and again <= 1e-12}


def check_period(rng, tol):
    p = period_K()
    err = abs(abs(p) - FOUR_PI)
    return {"period": p, "error": err, "passed": err <= 1e-10}


def check_extensions(rng, tol, n_loops=3):
    worst = 0.0
    for _ in range(n_loops):
        x = random_null_loop(rng, tol=tol)
        vals = [f_eval(x, schedule=(kind,), margin_min=0.0, tol=tol).value
                for kind in ("harmonic-0", "harmonic-1", "harmonic-3")]
        worst = max(worst, max(abs(v - vals[0]) for v in vals))
    return {"max_disagreement": worst, "passed": worst <= 1e-10}


def check_df_linearity(rng, tol, n_loops=3):
    worst = 0.0
    for _ in range(n_loops):
        x = random_null_loop(rng, tol=tol)
        v1, v2 = random_tangent(rng, x), random_tangent(rng, x)
        a, b = complex(*rng.normal(size=2)), complex(*rng.normal(size=2))
        lhs = df_eval(x, a * v1 + b * v2, tol)
        rhs = a * df_eval(x, v1, tol) + b * df_eval(x, v2, tol)
        worst = max(worst, abs(lhs - rhs) / max(1.0, abs(rhs)))
    return {"max_relative_defect": worst, "passed": worst <= 1e-12}


def check_certificate_roundtrip(rng, tol):
    start = rng.uniform(0, 2 * np.pi)
    arcs = BoundaryArcSet([(start, start + rng.uniform(0.5, 2.5))])
    delta = 0.5 * arc_measure(arcs)
    cert = certificate_build(arcs, delta)
    rec = json.loads(json.dumps(cert.to_record()))
    back = HarmonicCertificate(np.array([complex(re, im) for re, im in rec["coefficients"]]),
                               rec["delta"], rec["build_grid"])
    coeff_err = float(np.abs(back.coeffs - cert.coeffs).max())
    rep = certificate_verify(back, arcs)
    return {"degree": cert.degree, "coefficient_error": coeff_err, "verify_passed": rep["passed"],
            "passed": coeff_err == 0.0 and rep["passed"]}


def check_line_scans(rng, tol, n_points=20, n_dirs=4):
    failures = 0
    for _ in range(n_points):
        w = rng.normal(size=3) + 1j * rng.uniform(0.05, 1.0) * rng.normal(size=3)
        z = retract_ambient(w, tol)
        for beta in np.pi * np.arange(n_dirs) / n_dirs:
            failures += not fiber_line_scan(z, beta, tol=tol).passed
    return {"scans": n_points * n_dirs, "failures": failures, "passed": failures == 0}


def check_push_constant(rng, tol):
    rep = push_disc(constant_problem(), tol).report
    keys = ("J", "check_i", "check_ii", "check_iii_margin", "check_iv_margin", "passed")
    return {k: rep[k] for k in keys}


def check_mean_value(rng, tol, n_discs=2, n_phi=8):
    worst = 0.0
    for _ in range(n_discs):
        x = random_null_loop(rng, tol=tol)
        disc = small_loop_disc(rng, x, tol=tol)
        worst = max(worst, mean_value_audit(lambda y: f_eval(y, n_r=32, tol=tol).value, disc,
                                            n_phi, tol))
    return {"max_residual": worst, "passed": worst <= 1e-8}


CHECKS = {
    "retraction": check_retraction,
    "period": check_period,
    "extension_agreement": check_extensions,
    "df_linearity": check_df_linearity,
    "certificate_roundtrip": check_certificate_roundtrip,
    "line_scans": check_line_scans,
    "push_disc_constant": check_push_constant,
    "mean_value": check_mean_value,
}

def run_suite(seed=0, tol=DEFAULT):
    """Run every check with its own counter-based generator."""
    return {name: check(np.random.default_rng([seed, i]), tol)
            for i, (name, check) in enumerate(CHECKS.items())}
