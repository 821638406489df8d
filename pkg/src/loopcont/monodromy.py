"""The multivalued loop function f(x) = int_Delta xi^* omega and its monodromy.

For a loop x in M' that is null-homotopic there, f integrates the 2-form
omega over any disc bounding x inside M'.  The disc is built in the double
cover C^2 minus 0: lift x to a closed loop w, extend w over the unit disc
avoiding the origin, then push the extension down.  Different extensions give
the same value because M' has no 2-spheres to detect.
"""
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .config import DEFAULT
from .continuation import (LoopDisc, build_regular_lift, imaginary_push, phase_pattern,
                           slide)
from .errors import (ExtensionHitsZero, NotNullHomotopic, PreconditionError,
                     TangencyViolation)
from .loops import Loop, LoopCurve, loop_distance
from .quadric import (bilinear, cover_lift, cover_push, cover_push_jet, kappa, omega_eval, quadric_defect,
                      project_tangent, retract_ambient)

SCHEDULE = ("harmonic-0", "harmonic-1", "harmonic-2", "harmonic-3", "cone")


@dataclass(frozen=True)
class LoopFunctionValue:
    value: complex
    extension: str
    margin: float          # min |W| over the disc grid relative to max |w| on the boundary
    n_r: int
    n_theta: int
    tried: tuple = ()
    radial_defect: float = float("nan")

    def __complex__(self):
        return complex(self.value)


def _cone_candidates():
    """Fixed spread of unit vectors in C^2 = R^4 used as cone apexes."""
    k = np.arange(24)
    a = np.arccos(np.sqrt((k + 0.5) / 24))
    b = 2 * np.pi * k * 0.6180339887498949
    c = 2 * np.pi * k * 0.7548776662466927
    return np.stack([np.cos(a) * np.exp(1j * b), np.sin(a) * np.exp(1j * c)], axis=-1)


_CANDIDATES = _cone_candidates()


def _segment_clearance(p, w):
    """min over r in [0, 1] and theta of |(1 - r) p + r w(theta)|, for each apex p."""
    d = w[None] - p[:, None]                                  # (P, n, 2)
    num = -np.real(np.sum(np.conj(p[:, None]) * d, axis=-1))
    den = np.sum(np.abs(d) ** 2, axis=-1)
    r = np.clip(num / np.where(den > 0, den, 1.0), 0.0, 1.0)
    pt = p[:, None] + r[..., None] * d
    return np.linalg.norm(pt, axis=-1).min(axis=1)


def cone_apex(w):
    """Apex for the cone extension: the candidate maximising the clearance."""
    scale = np.sqrt(np.mean(np.sum(np.abs(w) ** 2, axis=-1)))
    mean = w.mean(axis=0)
    cands = _CANDIDATES
    if np.linalg.norm(mean) > 0:
        cands = np.vstack([mean / np.linalg.norm(mean), cands])
    p = scale * cands
    return p[int(np.argmax(_segment_clearance(p, w)))]


def _synth(c, modes, n):
    """sum_m c[..., m, :] e^{i m theta_j} on the uniform grid of n points."""
    buf = np.zeros(c.shape[:-2] + (n, c.shape[-1]), dtype=complex)
    buf[..., modes % n, :] = c
    return np.fft.ifft(buf, axis=-2) * n


def _extension(wc, modes, r, n, kind, apex=None):
    """W, dW/dr, dW/dtheta on the (r, theta) grid for the chosen extension."""
    if kind.startswith("harmonic"):
        q = int(kind.split("-")[1])
        expo = np.abs(modes) + 2 * q * (modes != 0)
        R = r[:, None] ** expo[None]
        dR = np.where(expo[None] > 0, expo[None] * r[:, None] ** np.maximum(expo[None] - 1, 0), 0.0)
        W = _synth(R[..., None] * wc, modes, n)
        Wr = _synth(dR[..., None] * wc, modes, n)
        Wt = _synth(R[..., None] * (1j * modes[:, None] * wc), modes, n)
    elif kind == "cone":
        w = _synth(wc[None], modes, n)[0]
        wd = _synth((1j * modes[:, None] * wc)[None], modes, n)[0]
        W = (1 - r)[:, None, None] * apex + r[:, None, None] * w[None]
        Wr = np.broadcast_to(w[None] - apex, W.shape)
        Wt = r[:, None, None] * wd[None]
    else:
        raise ValueError("unknown extension %r" % kind)
    return W, Wr, Wt


@lru_cache(maxsize=16)
def _radial_rule(n_r):
    return np.polynomial.legendre.leggauss(n_r)


def _integrate(wc, modes, n_r, n, kind, apex):
    x, wts = _radial_rule(n_r)
    r = (x + 1) / 2
    W, Wr, Wt = _extension(wc, modes, r, n, kind, apex)
    xi, xr, xt = cover_push_jet(W, Wr, Wt)
    integrand = omega_eval(xi, xr, xt)
    val = complex(np.sum(wts[:, None] / 2 * integrand) * 2 * np.pi / n)
    return val, float(np.linalg.norm(W, axis=-1).min())


def lift_loop(x, n_theta=None, tol=DEFAULT):
    """Closed cover lift of a loop as (coefficients, modes); NotNullHomotopic otherwise."""
    n = n_theta or max(128, x.n_eval)
    lift = cover_lift(x.samples(n), tol)
    if not lift.closed:
        raise NotNullHomotopic("cover lift of the loop does not close")
    wl = Loop.from_samples(lift.path)
    return wl.coeffs, wl.modes, lift.path


def f_eval(x, schedule=SCHEDULE, n_r=48, n_theta=None, margin_min=0.2, estimate=False,
           margin_safe=0.5, defect_max=1e-6, tol=DEFAULT):
    """Value of the loop function at a null-homotopic loop x in M'.

    Extensions are tried in ``schedule`` order; the first whose clearance from
    the origin (relative to the boundary size of the lift) reaches
    ``margin_min`` is integrated.  Clearance is only sampled on the quadrature
    grid, so below ``margin_safe`` the value is also integrated at half the
    radial resolution and the extension is skipped when the two differ by more
    than ``defect_max``.  A degenerate clearance raises ExtensionHitsZero.
    ``estimate`` stores that difference for every accepted extension.
    """
    n = n_theta or max(128, x.n_eval)
    wc, modes, path = lift_loop(x, n, tol)
    size = float(np.linalg.norm(path, axis=-1).max())
    tried = []
    for kind in schedule:
        apex = cone_apex(path) if kind == "cone" else None
        val, clear = _integrate(wc, modes, n_r, n, kind, apex)
        margin = clear / size
        tried.append((kind, margin))
        if margin < margin_min:
            continue
        defect = float("nan")
        if estimate or margin < margin_safe:
            defect = abs(val - _integrate(wc, modes, n_r // 2, n, kind, apex)[0])
            if margin < margin_safe and defect > defect_max * max(1.0, abs(val)):
                continue
        return LoopFunctionValue(val, kind, margin, n_r, n, tuple(tried), defect)
    raise ExtensionHitsZero("every extension in the schedule comes close to the origin",
                            tried=tried)


def df_eval(x, v, tol=DEFAULT):
    """int_0^{2pi} omega_{x(s)}(v(s), x'(s)) ds by the trapezoid rule.

    ``v`` is a Loop or an array of samples on the uniform grid of x.
    """
    if isinstance(v, Loop):
        n = max(x.n_eval, v.n_eval)
        vs = v.samples(n)
    else:
        vs = np.asarray(v, dtype=complex)
        n = len(vs)
    xs = x.samples(n)
    dx = x.derivative_samples(n)
    pair = np.abs(bilinear(xs, vs))
    bound = tol.manifold * np.maximum(1.0, np.linalg.norm(vs, axis=-1))
    if np.any(pair > bound):
        raise TangencyViolation("field not tangent to the quadric", defect=float(pair.max()))
    return complex(np.sum(omega_eval(xs, vs, dx)) * 2 * np.pi / n)


def period_K(resolution=16, orientation=1):
    """int_K omega over the unit sphere (outward orientation when orientation=+1).

    Gauss-Legendre in the polar angle, trapezoid rule in the azimuth.
    """
    if resolution < 2:
        raise ValueError("resolution must be at least 2")
    x, wts = np.polynomial.legendre.leggauss(resolution)
    th = np.pi * (x + 1) / 2
    wts = wts * np.pi / 2
    n_ph = 2 * resolution
    ph = 2 * np.pi * np.arange(n_ph) / n_ph
    T, P = np.meshgrid(th, ph, indexing="ij")
    st, ct, sp, cp = np.sin(T), np.cos(T), np.sin(P), np.cos(P)
    pt = np.stack([st * cp, st * sp, ct], axis=-1)
    d_th = np.stack([ct * cp, ct * sp, -st], axis=-1)
    d_ph = np.stack([-st * sp, st * cp, np.zeros_like(st)], axis=-1)
    vals = omega_eval(pt, d_th, d_ph).real
    total = float(np.sum(wts[:, None] * vals) * 2 * np.pi / n_ph)
    return orientation * total


# -- demo curve --------------------------------------------------------------

NORTH = np.array([0.0, 0.0, 1.0])


def _rotation(axis, angle):
    axis = np.asarray(axis, dtype=float)
    axis = axis / np.linalg.norm(axis)
    k = np.array([[0, -axis[2], axis[1]], [axis[2], 0, -axis[0]], [-axis[1], axis[0], 0]])
    return np.eye(3) + np.sin(angle) * k + (1 - np.cos(angle)) * k @ k


def circle_point(beta, s):
    """Point at parameter s of the circle through the north pole with parameter beta.

    The circles for beta in (-pi/2, pi/2) are tangent to (1, 0, 0) at the pole
    and foliate the sphere minus the pole; beta = +-pi/2 gives the pole.
    """
    cb, sb = np.cos(beta), np.sin(beta)
    s = np.asarray(s, dtype=float)
    return np.stack([cb * np.sin(s), sb * cb * (1 - np.cos(s)), sb * sb + cb * cb * np.cos(s)], axis=-1)


def circle_push(beta, s):
    """Isotropic tangent field e^{is}(T + i x cross T) along the circle (T its unit tangent)."""
    x = circle_point(beta, s)
    u = np.array([0.0, -np.sin(beta), np.cos(beta)])
    T = -np.sin(s)[:, None] * u + np.cos(s)[:, None] * np.array([1.0, 0.0, 0.0])
    return (T + 1j * np.cross(x, T)) * np.exp(1j * s)[:, None]


@dataclass
class DemoCurve:
    """Loops x_t = xi_t|boundary for the collapse xi of the closed disc onto the sphere.

    xi sends the circle |sigma - (1 - t)| = t to the circle with parameter
    beta(t) = pi/2 - pi p(t); xi_t(sigma) = xi(1 - t + sigma t).  A tilt rotates
    the loops by R(t) with R(0) = R(1) = I and a warp reparametrises time,
    giving a homotopic deformation with the same endpoints.
    """
    times: np.ndarray
    n_loop: int = 32
    profile: str = "linear"
    tilt: float = 0.0
    warp: float = 0.0
    axis: tuple = (1.0, 1.0, 1.0)
    loops: list = field(default_factory=list)

    def __post_init__(self):
        self.times = np.asarray(self.times, dtype=float)
        self.loops = [Loop.from_function(lambda s, t=t: self.point(t, s), self.n_loop)
                      for t in self.times]

    def tau(self, t):
        return t - self.warp * np.sin(2 * np.pi * t) / (2 * np.pi)

    def beta(self, t):
        u = self.tau(t)
        if self.profile == "linear":
            p = u
        elif self.profile == "smooth":
            p = u * u * (3 - 2 * u)
        else:
            raise ValueError("unknown profile %r" % self.profile)
        return np.pi / 2 - np.pi * p

    def rotation(self, t):
        return _rotation(self.axis, self.tilt * np.sin(np.pi * t) ** 2)

    def point(self, t, s):
        return circle_point(self.beta(t), s) @ self.rotation(t).T

    def push(self, i, s, x=None):
        t = self.times[i]
        return circle_push(self.beta(t), s) @ self.rotation(t).T

    def curve(self, tol=DEFAULT):
        return LoopCurve(self.times, self.loops, tol)

    def xi(self, sigma):
        """The collapse map on the closed unit disc (untilted, unwarped)."""
        sigma = np.asarray(sigma, dtype=complex)
        d = 1.0 - sigma.real
        with np.errstate(divide="ignore", invalid="ignore"):
            t = np.where(d > 0, np.abs(sigma - 1) ** 2 / (2 * np.where(d > 0, d, 1.0)), 0.0)
            s = np.angle((sigma - 1 + t) / np.where(t > 0, t, 1.0))
        u = np.clip(t, 0.0, 1.0)
        p = u if self.profile == "linear" else u * u * (3 - 2 * u)
        return circle_point(np.pi / 2 - np.pi * p, s)

    def xi_t(self, t, sigma):
        return self.xi(1 - t + np.asarray(sigma) * t)


def demo_curve(n_t=256, profile="linear", n_loop=32, tilt=0.0, warp=0.0):
    if n_t < 2:
        raise PreconditionError("demo curve needs at least two grid times")
    return DemoCurve(np.linspace(0.0, 1.0, n_t), n_loop, profile, tilt, warp)


# -- monodromy ---------------------------------------------------------------

@dataclass
class MonodromyResult:
    increment: complex
    chain: object
    lift: object

    @property
    def sign(self):
        return int(np.sign(self.increment.real)) if abs(self.increment) > 1e-3 else 0


def monodromy_increment(curve, push_field=None, seed=0, push_scale=0.5, n_phi=16, m_deg=32,
                        f_kwargs=None, tol=DEFAULT):
    """f_end - f_start after sliding along a closed curve of loops."""
    if isinstance(curve, DemoCurve):
        push_field = push_field or curve.push
        curve = curve.curve(tol)
    if not curve.is_closed(tol):
        raise PreconditionError("curve is not closed",
                                gap=loop_distance(curve.loops[0], curve.loops[-1]))
    f_kwargs = f_kwargs or {}
    lift = build_regular_lift(curve, push_scale=push_scale, seed=seed, push_field=push_field,
                              m_deg=m_deg, tol=tol)
    chain = slide(lambda x: f_eval(x, tol=tol, **f_kwargs).value, curve, lift, n_phi=n_phi, tol=tol)
    return MonodromyResult(chain.increment(), chain, lift)


# -- seeded samplers of loops in M' ------------------------------------------

def random_w_coeffs(rng, degree=3, amplitude=0.3):
    """Fourier coefficients (2 degree + 1, 2) of a closed loop in C^2 kept away from 0."""
    while True:
        c = np.zeros((2 * degree + 1, 2), dtype=complex)
        c0 = rng.normal(size=2) + 1j * rng.normal(size=2)
        c[degree] = c0 / np.linalg.norm(c0)
        for k in range(1, degree + 1):
            for j in (degree + k, degree - k):
                c[j] = (rng.normal(size=2) + 1j * rng.normal(size=2)) * amplitude / (1 + k)
        w = Loop(c).samples(256)
        if np.linalg.norm(w, axis=-1).min() > 0.5:
            return c


def _pushed_loop(c, n_loop, tol):
    """Band-limited cover_push of the w-loop with coefficients c, or None if it leaves M."""
    x = Loop.from_function(lambda s: cover_push(Loop(c)(s), tol), n_loop)
    if quadric_defect(x.samples(4 * x.n_eval)).max() > tol.manifold:
        return None
    return x


def random_null_loop(rng, n_loop=32, degree=2, amplitude=0.2, tol=DEFAULT):
    """cover_push of a random closed w-loop: a loop in M' with closed cover lift.

    Draws whose truncation to n_loop modes leaves the quadric by more than
    tol.manifold are rejected.
    """
    while True:
        x = _pushed_loop(random_w_coeffs(rng, degree, amplitude), n_loop, tol)
        if x is not None:
            return x


def random_tangent(rng, x, degree=3):
    """Samples on the grid of x of a smooth field tangent to the quadric along x."""
    c = np.zeros((2 * degree + 1, 3), dtype=complex)
    c[:] = rng.normal(size=c.shape) + 1j * rng.normal(size=c.shape)
    c /= (1 + np.abs(np.arange(-degree, degree + 1)))[:, None] ** 2
    s = 2 * np.pi * np.arange(x.n_eval) / x.n_eval
    return project_tangent(x.samples(), Loop(c)(s))


def null_class_curve(rng, n_t=64, n_loop=32, degree=2, amplitude=0.2, sweep=0.05, tol=DEFAULT):
    """Closed curve of loops in M' whose cover lifts form a closed family of w-loops.

    w_t = w_0 + sweep (cos 2 pi t - 1) a + sweep sin 2 pi t b, so x_0 = x_1
    exactly and every x_t is null-homotopic in M'.
    """
    while True:
        c0 = random_w_coeffs(rng, degree, amplitude)
        a = random_w_coeffs(rng, degree, amplitude) * sweep
        b = random_w_coeffs(rng, degree, amplitude) * sweep
        times = np.linspace(0.0, 1.0, n_t)
        coeffs = [c0 + (np.cos(2 * np.pi * t) - 1) * a + np.sin(2 * np.pi * t) * b for t in times]
        coeffs[-1] = c0
        s = 2 * np.pi * np.arange(256) / 256
        if min(np.linalg.norm(Loop(c)(s), axis=-1).min() for c in coeffs) <= 0.5:
            continue
        loops = [_pushed_loop(c, n_loop, tol) for c in coeffs]
        if all(x is not None for x in loops):
            return LoopCurve(times, loops, tol)


def small_loop_disc(rng, x, m_deg=8, scale=0.1, n_sigma=32, tol=DEFAULT):
    """Xi(sigma, s) = rho(x(s) + scale kappa_min sigma v(s)) with a seeded phase on the push."""
    n_s = x.n_eval
    s = 2 * np.pi * np.arange(n_s) / n_s
    xs = x.samples(n_s)
    v = imaginary_push(xs, s) * phase_pattern(int(rng.integers(2 ** 31)), 0, s)[:, None]
    c = scale * float(kappa(xs).min())

    def func(sig, s_):
        return retract_ambient(xs[None] + c * sig[:, None, None] * v[None], tol)

    return LoopDisc.from_function(func, m_deg, x.n_loop, n_sigma=n_sigma, n_s=n_s)
