"""Sliding-disc analytic continuation over the loop space of the quadric.

A regular lift of a curve of loops t -> x_t is a curve of discs of loops
t -> xi_t, holomorphic in the disc variable, centred at x_t, whose boundary
circles consist of loops in M' that are null-homotopic there.  The continued
value at x_t is the mean of f over the boundary circle of xi_t.
"""
import csv
import io
from dataclasses import dataclass, field

import numpy as np

from .config import DEFAULT
from .errors import DegenerateLift, LiftFailure, PreconditionError, StepFailure
from .loops import Loop, loop_distance
from .quadric import cover_lift, kappa, project_tangent, retract_ambient


class LoopDisc:
    """Xi(sigma, s) = sum_{m, n} A[m, n] sigma^m e^{ins}, holomorphic in sigma.

    ``coeffs`` has shape (M + 1, 2N + 1, 3), Fourier index n stored at n + N.
    """

    def __init__(self, coeffs, n_eval=None, holomorphy_defect=0.0):
        self.coeffs = np.asarray(coeffs, dtype=complex)
        self.n_eval = n_eval or max(8, 4 * self.n_loop)
        self.holomorphy_defect = holomorphy_defect

    @property
    def m_deg(self):
        return self.coeffs.shape[0] - 1

    @property
    def n_loop(self):
        return self.coeffs.shape[1] // 2

    @classmethod
    def from_function(cls, func, m_deg, n_loop, n_sigma=None, n_s=None):
        """Sample func(sigma, s) -> (n_sigma, n_s, 3) on the boundary torus and expand."""
        n_sigma = n_sigma or max(8, 4 * m_deg)
        n_s = n_s or max(8, 4 * n_loop)
        sig = np.exp(2j * np.pi * np.arange(n_sigma) / n_sigma)
        s = 2 * np.pi * np.arange(n_s) / n_s
        values = func(sig, s)
        return cls.from_samples(values, m_deg, n_loop)

    @classmethod
    def from_samples(cls, values, m_deg, n_loop):
        n_sigma, n_s = values.shape[:2]
        spec = np.fft.fft2(values, axes=(0, 1)) / (n_sigma * n_s)
        half = n_sigma // 2
        defect = float(np.sqrt(np.sum(np.abs(spec[half:]) ** 2)))
        m = min(m_deg, half - 1)
        n_loop = min(n_loop, (n_s - 1) // 2)
        idx = np.arange(-n_loop, n_loop + 1) % n_s
        return cls(spec[: m + 1][:, idx], n_s, defect)

    def center(self):
        return Loop(self.coeffs[0].copy(), n_eval=self.n_eval)

    def circle_loops(self, n_phi, radius=1.0):
        """Loops Xi(radius e^{i phi_k}, .) for phi_k = 2 pi k / n_phi."""
        phi = 2 * np.pi * np.arange(n_phi) / n_phi
        powers = (radius * np.exp(1j * phi))[:, None] ** np.arange(self.m_deg + 1)
        c = np.einsum("km,mnd->knd", powers, self.coeffs)
        return [Loop(ck, n_eval=self.n_eval) for ck in c]

    def values(self, sigma, n_s=None):
        """Grid values, shape (len(sigma), n_s, 3)."""
        n_s = n_s or self.n_eval
        sigma = np.atleast_1d(np.asarray(sigma, dtype=complex))
        powers = sigma[:, None] ** np.arange(self.m_deg + 1)
        c = np.einsum("km,mnd->knd", powers, self.coeffs)
        buf = np.zeros((len(sigma), n_s, 3), dtype=complex)
        modes = np.arange(-self.n_loop, self.n_loop + 1)
        buf[:, modes % n_s] = c
        return np.fft.ifft(buf, axis=1) * n_s

    def boundary_values(self, n_phi=None, n_s=None):
        n_phi = n_phi or max(8, 4 * self.m_deg)
        return self.values(np.exp(2j * np.pi * np.arange(n_phi) / n_phi), n_s)

    def translated(self, delta):
        """Xi + delta for a loop delta (added to the sigma^0 coefficient)."""
        c = self.coeffs.copy()
        d = delta.padded(self.n_loop).coeffs if delta.n_loop <= self.n_loop else delta.truncated(self.n_loop).coeffs
        c[0] += d
        return LoopDisc(c, self.n_eval)

    def retracted(self, tol=DEFAULT, n_phi=None):
        n_phi = n_phi or max(8, 4 * self.m_deg)
        vals = retract_ambient(self.boundary_values(n_phi), tol)
        return LoopDisc.from_samples(vals, self.m_deg, self.n_loop)


def disc_distance_loops(a, b, n_phi=None):
    """sup over the closed disc and the circle of |a - b| (boundary torus by the maximum principle)."""
    n_phi = n_phi or max(8, 4 * max(a.m_deg, b.m_deg))
    n_s = max(a.n_eval, b.n_eval)
    d = a.boundary_values(n_phi, n_s) - b.boundary_values(n_phi, n_s)
    return float(np.max(np.linalg.norm(d, axis=-1)))


# -- push fields and regular lifts ------------------------------------------

def imaginary_push(x, s):
    """Unit field pushing a loop in M' further away from the real sphere."""
    y = x.imag
    n = np.linalg.norm(y, axis=-1, keepdims=True)
    if np.any(n <= 0):
        raise LiftFailure("imaginary push undefined on the real sphere; supply a push field")
    v = project_tangent(x, 1j * y / n)
    return v / np.linalg.norm(v, axis=-1, keepdims=True)


def phase_pattern(seed, attempt, s, amplitude=0.3, modes=2):
    """exp(i alpha(s)) for a seeded smooth zero-winding phase alpha."""
    rng = np.random.default_rng([int(seed), int(attempt)])
    a = rng.normal(scale=amplitude, size=(modes, 2))
    alpha = sum(a[k, 0] * np.cos((k + 1) * s) + a[k, 1] * np.sin((k + 1) * s) for k in range(modes))
    return np.exp(1j * alpha)


def ramp(t, width):
    """Smooth 0 -> 1 ramp on [0, width], identically 1 afterwards."""
    if width <= 0:
        return np.ones_like(np.asarray(t, dtype=float))
    u = np.clip(np.asarray(t, dtype=float) / width, 0.0, 1.0)
    return u * u * (3 - 2 * u)


@dataclass
class RegularLift:
    times: np.ndarray
    discs: list
    centers: list
    push_scale: float
    boundary_kappa: np.ndarray       # min kappa over each boundary torus
    initial_kappa: float             # min kappa over the whole t = 0 disc
    center_residual: float
    null_homotopic: bool
    attempt: int
    seed: int

    @property
    def boundary_margin(self):
        return float(self.boundary_kappa.min())

    @property
    def initial_in_m_prime(self):
        return bool(self.initial_kappa > DEFAULT.real_locus)

    def report(self):
        worst = int(np.argmin(self.boundary_kappa))
        return {
            "boundary_kappa_min": self.boundary_margin,
            "boundary_kappa_argmin_t": float(self.times[worst]),
            "initial_disc_kappa_min": float(self.initial_kappa),
            "initial_disc_in_m_prime": self.initial_in_m_prime,
            "center_residual": float(self.center_residual),
            "boundary_null_homotopic": bool(self.null_homotopic),
            "push_scale": float(self.push_scale),
            "attempt": int(self.attempt),
            "seed": int(self.seed),
        }


def build_regular_lift(curve, push_scale=0.5, max_retries=4, seed=0, push_field=None,
                       ramp_width=None, m_deg=32, n_phi=32, tol=DEFAULT):
    """Construct Xi(t, s, sigma) = rho(x_t(s) + chi(t) sigma eps v(t, s)) and verify it.

    ``push_field(i, s, x)`` returns the push vectors for the i-th loop on the
    grid s (x are the loop values there); the default pushes along the
    imaginary direction, which needs every loop off the real sphere.  chi is 1
    unless ``ramp_width`` > 0, in which case it ramps up from chi(0) = 0.  When
    the first loop lies in M' the whole t = 0 disc must stay in M'.  Retries
    use a new phase pattern and a smaller push.
    """
    if push_field is None:
        push_field = lambda i, s, x: imaginary_push(x, s)
    first = curve.loops[0]
    start_in_m_prime = kappa(first.samples()).min() > tol.real_locus
    chi = ramp(curve.times, ramp_width or 0.0)
    last_error = None
    for attempt in range(max_retries + 1):
        eps = push_scale * 0.7 ** attempt
        try:
            return _try_lift(curve, eps, chi, push_field, seed, attempt, m_deg, n_phi,
                             start_in_m_prime, tol)
        except LiftFailure as exc:
            last_error = exc
    raise LiftFailure("no regular lift after %d retries" % max_retries, **last_error.details)


def _try_lift(curve, eps, chi, push_field, seed, attempt, m_deg, n_phi, start_in_m_prime, tol):
    discs, kap, centers = [], [], []
    n_loop = curve.loops[0].n_loop
    n_s = max(8, 4 * n_loop)
    s = 2 * np.pi * np.arange(n_s) / n_s
    pattern = phase_pattern(seed, attempt, s)
    center_res = 0.0
    null_ok = True
    for i, (t, x) in enumerate(zip(curve.times, curve.loops)):
        xs = x.samples(n_s)
        v = push_field(i, s, xs) * pattern[:, None]
        scale = chi[i] * eps

        def func(sig, s_, xs=xs, v=v, scale=scale):
            return retract_ambient(xs[None] + scale * sig[:, None, None] * v[None], tol)

        disc = LoopDisc.from_function(func, m_deg, n_loop, n_sigma=n_phi, n_s=n_s)
        bvals = disc.boundary_values(n_phi, n_s)
        k = float(kappa(bvals).min())
        kap.append(k)
        if k <= tol.real_locus:
            raise LiftFailure("boundary circle meets the real sphere", t=float(t), kappa=k,
                              attempt=attempt)
        if i == 0 or i == len(curve.times) - 1 or i % 8 == 0:
            if not cover_lift(bvals[0], tol).closed:
                null_ok = False
                raise LiftFailure("boundary loop not null-homotopic in M'", t=float(t), attempt=attempt)
        center_res = max(center_res, loop_distance(disc.center(), x, n_s))
        discs.append(disc)
        centers.append(x)
    radii = np.linspace(0.0, 1.0, 9)
    sig = (radii[:, None] * np.exp(2j * np.pi * np.arange(n_phi) / n_phi)).ravel()
    initial = float(kappa(discs[0].values(sig, n_s)).min())
    if start_in_m_prime and initial <= tol.real_locus:
        raise LiftFailure("initial disc meets the real sphere", kappa=initial, attempt=attempt)
    if center_res > max(tol.lift, discs[0].holomorphy_defect * 10):
        raise LiftFailure("lift centres do not reproduce the curve", residual=center_res,
                          attempt=attempt)
    return RegularLift(np.array(curve.times), discs, centers, eps, np.array(kap), initial,
                       center_res, null_ok, attempt, seed)


# -- safety radius -----------------------------------------------------------

@dataclass(frozen=True)
class SafetyRadius:
    eps: float
    cut_margin: float
    k_margin: float
    lipschitz: float


def _cut_ball(z):
    """Radius r such that g(z + y) stays off the cut for |y| < r (z on M)."""
    a = np.linalg.norm(z, axis=-1)
    return np.sqrt(a * a + 1.0) - a


def safety_radius(lift, n_dirs=8, h=1e-4, seed=0, tol=DEFAULT):
    """eps = min(cut margin, calibrated K margin) / 3 over the sampled lift."""
    rng = np.random.default_rng(seed)
    cut = np.inf
    kmar = np.inf
    lip_max = 0.0
    n_phi = 16
    for disc in lift.discs:
        radii = np.linspace(0.0, 1.0, 5)
        sig = (radii[:, None] * np.exp(2j * np.pi * np.arange(n_phi) / n_phi)).ravel()
        vals = disc.values(sig)
        cut = min(cut, float(_cut_ball(vals).min()))
        bnd = disc.boundary_values(n_phi).reshape(-1, 3)
        k0 = kappa(bnd)
        d = rng.normal(size=(n_dirs, 3)) + 1j * rng.normal(size=(n_dirs, 3))
        d /= np.linalg.norm(d, axis=-1, keepdims=True)
        moved = retract_ambient(bnd[None] + h * d[:, None], tol)
        lip = float(np.max(np.abs(kappa(moved) - k0[None])) / h)
        lip = max(lip, 1.0)
        lip_max = max(lip_max, lip)
        kmar = min(kmar, float(k0.min()) / lip)
    if cut <= tol.real_locus or kmar <= tol.real_locus:
        raise DegenerateLift("lift margins underflow", cut_margin=cut, k_margin=kmar)
    return SafetyRadius(min(cut, kmar) / 3.0, cut, kmar, lip_max)


# -- sliding ------------------------------------------------------------------

@dataclass
class ChainRecord:
    t: float
    center: Loop
    value: complex
    delta1: float
    residual: float      # overlap residual with the next record (0 for the last)


@dataclass
class ContinuationChain:
    records: list
    eps: float
    delta: float
    lipschitz: float
    n_phi: int
    report: dict = field(default_factory=dict)

    @property
    def values(self):
        return np.array([r.value for r in self.records])

    @property
    def times(self):
        return np.array([r.t for r in self.records])

    @property
    def max_residual(self):
        return float(max(r.residual for r in self.records))

    def increment(self):
        return self.records[-1].value - self.records[0].value

    def to_csv(self, extra=None):
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        cols = ["t", "re_f", "im_f", "delta1", "overlap_residual"]
        extra = extra or {}
        cols += sorted(extra)
        w.writerow(cols)
        for i, r in enumerate(self.records):
            row = [r.t, r.value.real, r.value.imag, r.delta1, r.residual]
            row += [extra[k][i] for k in sorted(extra)]
            w.writerow(["%.17e" % x for x in row])
        return buf.getvalue()

    def to_records(self):
        return [{"t": r.t, "re": r.value.real, "im": r.value.imag,
                 "delta1": r.delta1, "residual": r.residual} for r in self.records]


def _circle_mean(f_eval, disc, n_phi):
    return complex(np.mean([complex(f_eval(x)) for x in disc.circle_loops(n_phi)]))


def _shifted(disc, old_center, new_center, tol):
    return disc.translated(new_center - old_center).retracted(tol)


def _lipschitz_33(lift, n_probe=3, h=1e-3, seed=0, tol=DEFAULT):
    """Sampled Lipschitz bound of y -> rho(xi_u - x_t + y) in the disc norm."""
    rng = np.random.default_rng(seed)
    idx = np.linspace(0, len(lift.discs) - 1, n_probe).astype(int)
    best = 1.0
    for i in idx:
        disc, x = lift.discs[i], lift.centers[i]
        n = x.n_loop
        d = rng.normal(size=(2 * n + 1, 3)) + 1j * rng.normal(size=(2 * n + 1, 3))
        d[np.abs(np.arange(-n, n + 1)) > 2] = 0
        y = Loop(x.coeffs + h * d / np.linalg.norm(Loop(d).samples(), axis=-1).max(), n_eval=x.n_eval)
        eta = _shifted(disc, x, y, tol)
        ratio = disc_distance_loops(eta, disc) / loop_distance(y, x)
        best = max(best, ratio)
    return best


def slide(f_eval, curve, lift, n_phi=16, tol=DEFAULT, check_steps=True):
    """Analytic continuation of f along the curve by boundary means over the lift.

    Records f_t(x_t) at every grid time and the overlap residual
    |f_{t_i}(y*) - f_{t_{i+1}}(y*)| at the retracted midpoint loop y*.
    """
    sr = safety_radius(lift, tol=tol)
    eps = sr.eps
    n = len(lift.times)
    # (3.4): grid neighbours must be closer than eps / 2 in the disc norm
    dist = np.array([disc_distance_loops(a, b) for a, b in zip(lift.discs[:-1], lift.discs[1:])])
    if check_steps and np.any(dist >= eps / 2):
        i = int(np.argmax(dist))
        raise StepFailure("t-grid too coarse for the sliding step", t=float(lift.times[i]),
                          distance=float(dist[i]), bound=eps / 2)
    delta = _window(lift, eps)
    lip = _lipschitz_33(lift, tol=tol)
    delta1 = eps / (2 * lip)
    records = []
    values = [_circle_mean(f_eval, d, n_phi) for d in lift.discs]
    for i in range(n):
        res = 0.0
        if i + 1 < n:
            x0, x1 = lift.centers[i], lift.centers[i + 1]
            mid = Loop.from_samples(retract_ambient((x0.samples() + x1.samples()) / 2, tol),
                                    x0.n_loop, x0.k, x0.n_eval)
            a = _circle_mean(f_eval, _shifted(lift.discs[i], x0, mid, tol), n_phi)
            b = _circle_mean(f_eval, _shifted(lift.discs[i + 1], x1, mid, tol), n_phi)
            res = abs(a - b)
        records.append(ChainRecord(float(lift.times[i]), lift.centers[i], values[i], delta1, res))
    chain = ContinuationChain(records, eps, delta, lip, n_phi)
    chain.report = {
        "eps": eps, "delta": delta, "delta1": delta1, "lipschitz": lip,
        "max_step_distance": float(dist.max()) if len(dist) else 0.0,
        "max_overlap_residual": chain.max_residual,
        "overlap_ok": chain.max_residual <= tol.overlap,
        "lift": lift.report(),
    }
    return chain


def _window(lift, eps):
    """Largest delta with |t - s| < delta  =>  disc distance < eps / 2 on the grid."""
    t = lift.times
    n = len(t)
    best = np.inf
    for i in range(n):
        for j in range(i + 1, n):
            if disc_distance_loops(lift.discs[i], lift.discs[j]) >= eps / 2:
                best = min(best, t[j] - t[i])
                break
    return float(best if np.isfinite(best) else 1.0)


def mean_value_audit(f_eval, disc, n_phi=16, tol=DEFAULT):
    """|boundary mean of f - f(centre)| for a loop disc inside M'."""
    radii = np.linspace(0.0, 1.0, 9)
    sig = (radii[:, None] * np.exp(2j * np.pi * np.arange(32) / 32)).ravel()
    k = float(kappa(disc.values(sig)).min())
    if k <= tol.real_locus:
        raise PreconditionError("disc leaves M'", kappa=k)
    return abs(_circle_mean(f_eval, disc, n_phi) - complex(f_eval(disc.center())))
