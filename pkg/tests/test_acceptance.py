"""Acceptance gate: one test (and one printed PASS/FAIL line) per criterion.

Run with ``pytest tests/test_acceptance.py -v``; the lines are repeated in the
"acceptance criteria" section of the terminal summary.
"""
import json
import time

import numpy as np
import pytest

from loopcont.cli import main as cli_main
from loopcont.continuation import imaginary_push, mean_value_audit
from loopcont.deformation import fiber_line_scan, line_problem, push_disc
from loopcont.errors import DegreeExhausted
from loopcont.harmonic import (BoundaryArcSet, HarmonicCertificate, arc_measure, certificate_build,
                               certificate_verify, lemma53_kernel)
from loopcont.loops import Loop
from loopcont.monodromy import (SCHEDULE, demo_curve, df_eval, f_eval, monodromy_increment,
                                null_class_curve, period_K, random_null_loop, random_tangent,
                                small_loop_disc)
from loopcont.quadric import cover_push, cut_margin, retract_ambient, retract_derivative

FOUR_PI = 4 * np.pi
DEMO_SEEDS = range(5)


def rng_for(criterion_number, seed):
    return np.random.default_rng([criterion_number, seed])


def fmt(x):
    return "%.2e" % x


@pytest.fixture(scope="module")
def demo_runs(tmp_path_factory):
    """``loopcont demo-monodromy`` with the default config for five seeds."""
    runs = {}
    for seed in DEMO_SEEDS:
        out = tmp_path_factory.mktemp("demo%d" % seed)
        start = time.perf_counter()
        status = cli_main(["demo-monodromy", "--seed", str(seed), "--out", str(out)])
        elapsed = time.perf_counter() - start
        summary = json.loads((out / "summary.json").read_text())
        runs[seed] = (status, summary, elapsed, (out / "trace.csv").read_text())
    return runs


def test_criterion_01_retraction(criterion):
    start = time.perf_counter()
    rng = rng_for(1, 0)
    w = rng.normal(size=(20000, 3)) + 1j * rng.normal(size=(20000, 3))
    w = w[cut_margin(w) > 0.05][:10000]
    z = retract_ambient(w)
    scale = np.maximum(1.0, np.abs(z).max(axis=-1))
    idem = float((np.abs(retract_ambient(z) - z).max(axis=-1) / scale).max())
    on_m = cover_push(rng.normal(size=(10000, 2)) + 1j * rng.normal(size=(10000, 2)))
    fixed = float((np.abs(retract_ambient(on_m) - on_m).max(axis=-1)
                   / np.maximum(1.0, np.abs(on_m).max(axis=-1))).max())
    h = rng.normal(size=w.shape) + 1j * rng.normal(size=w.shape)
    h /= np.linalg.norm(h, axis=-1, keepdims=True)
    lin = retract_derivative(w, h)
    res = {}
    for eps in (1e-3, 1e-4):
        res[eps] = float(np.abs(retract_ambient(w + eps * h) - z - eps * lin).max())
    ratio = res[1e-3] / res[1e-4]
    elapsed = time.perf_counter() - start
    ok = len(w) == 10000 and idem <= 1e-12 and fixed <= 1e-12 and ratio >= 50 and elapsed < 5
    assert criterion(1, "retraction suite", ok,
                     "idempotence %s, fixed point %s, linearisation %s / %s (ratio %.1f), %.2fs"
                     % (fmt(idem), fmt(fixed), fmt(res[1e-3]), fmt(res[1e-4]), ratio, elapsed))


def test_criterion_02_period(criterion):
    start = time.perf_counter()
    err = abs(period_K() - FOUR_PI)
    coarse, fine = abs(period_K(4) - FOUR_PI), abs(period_K(8) - FOUR_PI)
    elapsed = time.perf_counter() - start
    ratio = coarse / max(fine, np.finfo(float).tiny)
    ok = err <= 1e-8 and ratio >= 10 and elapsed < 1
    assert criterion(2, "period of omega over K", ok,
                     "|period - 4 pi| = %s at default resolution, errors %s -> %s at 4 -> 8, %.3fs"
                     % (fmt(err), fmt(coarse), fmt(fine), elapsed))


def test_criterion_03_monodromy_reproduction(criterion, demo_runs):
    details, ok, signs = [], True, set()
    for seed, (status, summary, elapsed, trace) in demo_runs.items():
        res = summary["result"]
        inc = complex(res["increment"]["re"], res["increment"]["im"])
        err = res["increment_error"]
        grids = summary["config"]["grids"]
        ok &= (status == 0 and err <= 1e-3 and elapsed < 300 and grids["n_t"] >= 64
               and grids["n_loop"] >= 32 and grids["m_deg"] >= 32 and res["sign"] != 0)
        ok &= trace.splitlines()[0] == "t,re_f,im_f,delta1,overlap_residual,kappa_margin"
        signs.add(res["sign"])
        details.append("seed %d: %+.12f (err %s, %.0fs)" % (seed, inc.real, fmt(err), elapsed))
    ok &= len(signs) == 1
    assert criterion(3, "demo monodromy increment = +-4 pi", ok,
                     "sign %s; " % sorted(signs) + "; ".join(details))


def null_class_push(times):
    def field(i, s, x):
        t = times[i]
        return imaginary_push(x, s) * (1 - 0.5 * t) * np.exp(1j * np.pi * t / 3)
    return field


def test_criterion_04_single_valued_on_m_prime_classes(criterion):
    worst_inc, worst_direct, ok = 0.0, 0.0, True
    for seed in range(10):
        curve = null_class_curve(rng_for(4, seed), n_t=192, sweep=0.03)
        res = monodromy_increment(curve, push_field=null_class_push(curve.times), push_scale=0.1,
                                  n_phi=8, f_kwargs={"n_r": 32})
        direct = np.array([f_eval(x).value for x in curve.loops])
        worst_inc = max(worst_inc, abs(res.increment))
        worst_direct = max(worst_direct, float(np.abs(res.chain.values - direct).max()))
        ok &= res.chain.report["overlap_ok"]
    ok &= worst_inc <= 1e-6 and worst_direct <= 1e-6
    assert criterion(4, "single-valuedness along M'-loop curves", ok,
                     "10 curves, max |increment| %s, max |chain - f_eval| %s"
                     % (fmt(worst_inc), fmt(worst_direct)))


def test_criterion_05_holomorphy(criterion):
    orders, lin = [], []
    for seed in range(100):
        rng = rng_for(5, seed)
        x = random_null_loop(rng)
        v = random_tangent(rng, x)
        xs = x.samples()
        d = df_eval(x, v)

        def f_at(h):
            return f_eval(Loop.from_samples(retract_ambient(xs + h * v), n_eval=x.n_eval)).value

        errs = [abs((f_at(h) - f_at(-h)) / (2 * h) - d) for h in (4e-3, 2e-3)]
        orders.append(np.log2(errs[0] / errs[1]))
        lin.append(abs(df_eval(x, 1j * v) - 1j * d))
    orders = np.array(orders)
    ok = bool(np.all(np.abs(orders - 2.0) <= 0.2)) and max(lin) <= 1e-12
    assert criterion(5, "holomorphy of f", ok,
                     "100 pairs, convergence order in [%.3f, %.3f], max |df(iv) - i df(v)| %s"
                     % (orders.min(), orders.max(), fmt(max(lin))))


def test_criterion_06_mean_value_identity(criterion):
    f = lambda y: f_eval(y, n_r=32).value
    worst, halving, floor = 0.0, True, 1e-13
    for seed in range(20):
        rng = rng_for(6, seed)
        disc = small_loop_disc(rng, random_null_loop(rng))
        coarse, fine = mean_value_audit(f, disc, 8), mean_value_audit(f, disc, 16)
        worst = max(worst, coarse)
        halving &= fine <= max(coarse / 2, floor)
    ok = worst <= 1e-6 and halving
    assert criterion(6, "mean-value identity", ok,
                     "20 discs, max residual %s at 8 circle points, halves under doubling: %s"
                     % (fmt(worst), halving))


def test_criterion_07_extension_independence(criterion):
    other = ("cone",) + tuple(k for k in reversed(SCHEDULE) if k != "cone")
    worst, kinds = 0.0, set()
    for seed in range(50):
        x = random_null_loop(rng_for(7, seed))
        a, b = f_eval(x), f_eval(x, schedule=other)
        kinds.add((a.extension, b.extension))
        worst = max(worst, abs(a.value - b.value))
    ok = worst <= 1e-6 and any(p != q for p, q in kinds)
    assert criterion(7, "extension independence", ok,
                     "50 loops, max disagreement %s, extension pairs %s" % (fmt(worst), sorted(kinds)))


def test_criterion_08_fiber_line_scans(criterion):
    rng = rng_for(8, 0)
    failures = 0
    for _ in range(50):
        z = retract_ambient(rng.normal(size=3) + 1j * rng.uniform(0.05, 1.0) * rng.normal(size=3))
        for beta in np.pi * np.arange(8) / 8:
            failures += not fiber_line_scan(z, beta).passed
    assert criterion(8, "unique fiber minimum", failures == 0,
                     "400 scans (50 points x 8 phases), %d failures" % failures)


def test_criterion_09_single_disc_push(criterion):
    rows, ok = [], True
    for seed in range(10):
        start = time.perf_counter()
        rep = push_disc(line_problem(rng_for(9, seed))).report
        elapsed = time.perf_counter() - start
        ok &= (rep["check_i"] <= 1e-10 and rep["check_ii"] <= 1e-10 and rep["check_iii_margin"] > 0
               and rep["check_iv_margin"] > 0 and rep["passed"] and elapsed < 120)
        rows.append((rep["check_i"], rep["check_iii_margin"], rep["check_iv_margin"], elapsed))
    rows = np.array(rows)
    assert criterion(9, "single-disc push", ok,
                     "10 problems, max (i) %s, min (iii) margin %s, min (iv) margin %s, max %.0fs"
                     % (fmt(rows[:, 0].max()), fmt(rows[:, 1].min()), fmt(rows[:, 2].min()),
                        rows[:, 3].max()))


def test_criterion_10_harmonic_suite(criterion):
    rng = rng_for(10, 0)
    exact = (arc_measure(BoundaryArcSet([(0, np.pi)])) == 0.5
             and arc_measure(BoundaryArcSet.full_circle()) == 1.0)
    additivity = 0.0
    for _ in range(100):
        a, l1, l2 = rng.uniform(0, 2 * np.pi), rng.uniform(0.01, 3), rng.uniform(0.01, 3)
        union = arc_measure(BoundaryArcSet([(a, a + l1), (a + l1, a + l1 + l2)]))
        parts = arc_measure(BoundaryArcSet([(a, a + l1)])) + arc_measure(BoundaryArcSet([(a + l1, a + l1 + l2)]))
        additivity = max(additivity, abs(union - parts))
    roundtrips = 0
    for _ in range(100):
        starts = rng.uniform(0, 2 * np.pi, rng.integers(1, 4))
        arcs = BoundaryArcSet([(s, s + rng.uniform(0.2, 2.0)) for s in starts])
        cert = certificate_build(arcs, rng.uniform(0.1, 0.9) * arc_measure(arcs))
        rec = json.loads(json.dumps(cert.to_record()))
        back = HarmonicCertificate(np.array([complex(*c) for c in rec["coefficients"]]),
                                   rec["delta"], rec["build_grid"])
        roundtrips += certificate_verify(back, arcs)["passed"] and np.array_equal(back.coeffs, cert.coeffs)
    lemma = {}
    for eps in (0.3, 0.5, 0.8):
        try:
            delta, _, rep = lemma53_kernel(eps)
            lemma[eps] = "delta %s" % fmt(delta) if delta > 0 and rep["passed"] else "failed"
        except DegreeExhausted as exc:
            lemma[eps] = "no witness up to degree %d (needs sup Re theta >= %s)" % (
                exc.details["max_degree"], fmt(exc.details["required_range"]))
    lemma_ok = all(v.startswith("delta") for v in lemma.values())
    ok = exact and additivity <= 1e-14 and roundtrips == 100 and lemma_ok
    assert criterion(10, "harmonic suite", ok,
                     "additivity %s, %d/100 certificate round trips, lemma53: %s"
                     % (fmt(additivity), roundtrips,
                        "; ".join("eps %.1f %s" % (e, lemma[e]) for e in sorted(lemma))))


def test_criterion_11_homotopy_invariance(criterion, demo_runs):
    base = demo_runs[0][1]["result"]["increment"]
    base = complex(base["re"], base["im"])
    res = monodromy_increment(demo_curve(256, tilt=0.6, warp=0.4), seed=1, n_phi=8,
                              f_kwargs={"n_r": 32})
    gap = abs(res.increment - base)
    ok = gap <= 2e-3 and res.chain.report["overlap_ok"]
    assert criterion(11, "homotopy invariance", ok,
                     "demo %.12f vs tilted/warped %.12f, difference %s, overlap residual %s"
                     % (base.real, res.increment.real, fmt(gap),
                        fmt(res.chain.report["max_overlap_residual"])))


def test_criterion_12_determinism(criterion, tmp_path):
    texts = []
    for _ in range(2):
        status = cli_main(["verify", "--seed", "7", "--out", str(tmp_path)])
        texts.append((status, (tmp_path / "summary.json").read_text()))
    ok = texts[0] == texts[1] and texts[0][0] == 0
    assert criterion(12, "determinism gate", ok,
                     "verify twice: exit %d/%d, summaries byte-identical: %s"
                     % (texts[0][0], texts[1][0], texts[0][1] == texts[1][1]))
