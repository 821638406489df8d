"""Loops S^1 -> C^3 as truncated Fourier series, and curves of loops.

A loop stores coefficients c_n for |n| <= n_loop (row n + n_loop) so that
x(s) = sum_n c_n e^{ins}.  Grid evaluation uses an FFT on at least
4 * n_loop points.
"""
import json
from dataclasses import dataclass

import numpy as np

from .config import DEFAULT
from .errors import BranchCut, PreconditionError, SpectralOverflow
from .quadric import (cut_margin, exhaustion, kappa, quadric_defect,
                      retract_ambient)

SCHEME_VERSION = 1


def _grid_size(n_loop):
    n = 8
    while n < 4 * max(n_loop, 1):
        n *= 2
    return n


class Loop:
    def __init__(self, coeffs, k=1, n_eval=None):
        self.coeffs = np.asarray(coeffs, dtype=complex)
        if self.coeffs.ndim != 2 or len(self.coeffs) % 2 != 1:
            raise ValueError("loop coefficients must have shape (2N+1, d)")
        self.k = int(k)
        self.n_eval = n_eval or _grid_size(self.n_loop)

    @property
    def n_loop(self):
        return len(self.coeffs) // 2

    @property
    def modes(self):
        return np.arange(-self.n_loop, self.n_loop + 1)

    @classmethod
    def constant(cls, point, n_loop=0, k=1, n_eval=None):
        point = np.asarray(point, dtype=complex)
        c = np.zeros((2 * n_loop + 1, len(point)), dtype=complex)
        c[n_loop] = point
        return cls(c, k, n_eval)

    @classmethod
    def from_samples(cls, samples, n_loop=None, k=1, n_eval=None):
        """Fourier coefficients of samples on the uniform grid s_j = 2 pi j / n."""
        samples = np.asarray(samples, dtype=complex)
        n = len(samples)
        top = (n - 1) // 2
        n_loop = top if n_loop is None else min(n_loop, top)
        spec = np.fft.fft(samples, axis=0) / n
        idx = np.arange(-n_loop, n_loop + 1) % n
        return cls(spec[idx], k, n_eval)

    @classmethod
    def from_function(cls, func, n_loop, k=1, n_eval=None, oversample=4):
        """Interpolate s -> func(s) (vectorised over s) on a fine grid."""
        n = _grid_size(oversample * max(n_loop, 2))
        s = 2 * np.pi * np.arange(n) / n
        return cls.from_samples(func(s), n_loop, k, n_eval)

    def grid(self, n=None):
        n = n or self.n_eval
        return 2 * np.pi * np.arange(n) / n

    def samples(self, n=None):
        n = n or self.n_eval
        if n < 2 * self.n_loop + 1:
            raise ValueError("grid too coarse for the loop spectrum")
        buf = np.zeros((n, self.coeffs.shape[1]), dtype=complex)
        buf[self.modes % n] = self.coeffs
        return np.fft.ifft(buf, axis=0) * n

    def derivative_samples(self, n=None):
        d = Loop(1j * self.modes[:, None] * self.coeffs, self.k, self.n_eval)
        return d.samples(n)

    def __call__(self, s):
        s = np.asarray(s, dtype=float)
        return np.exp(1j * s[..., None] * self.modes) @ self.coeffs

    def sobolev_norm(self, k=None):
        k = self.k if k is None else k
        weights = (1.0 + self.modes.astype(float) ** 2) ** k
        return float(np.sqrt(np.sum(weights * np.sum(np.abs(self.coeffs) ** 2, axis=1))))

    def truncated(self, n_loop):
        n_loop = min(n_loop, self.n_loop)
        mid = self.n_loop
        return Loop(self.coeffs[mid - n_loop: mid + n_loop + 1].copy(), self.k, self.n_eval)

    def padded(self, n_loop):
        if n_loop <= self.n_loop:
            return self.truncated(n_loop)
        c = np.zeros((2 * n_loop + 1, self.coeffs.shape[1]), dtype=complex)
        c[n_loop - self.n_loop: n_loop + self.n_loop + 1] = self.coeffs
        return Loop(c, self.k, max(self.n_eval, _grid_size(n_loop)))

    def __add__(self, other):
        n = max(self.n_loop, other.n_loop)
        return Loop(self.padded(n).coeffs + other.padded(n).coeffs, self.k,
                    max(self.n_eval, other.n_eval))

    def __sub__(self, other):
        return self + other.scaled(-1.0)

    def scaled(self, factor):
        return Loop(self.coeffs * factor, self.k, self.n_eval)

    def to_record(self):
        return {
            "scheme_version": SCHEME_VERSION,
            "kind": "loop",
            "n_loop": self.n_loop,
            "sobolev_k": self.k,
            "n_eval": self.n_eval,
            "coefficients": [[[float(x.real), float(x.imag)] for x in row] for row in self.coeffs],
        }

    @classmethod
    def from_record(cls, rec):
        if rec.get("scheme_version") != SCHEME_VERSION or rec.get("kind") != "loop":
            raise ValueError("not a version-%d loop record" % SCHEME_VERSION)
        c = np.array([[complex(re, im) for re, im in row] for row in rec["coefficients"]])
        return cls(c, rec.get("sobolev_k", 1), rec.get("n_eval"))


def loop_distance(x, y, n=None):
    """Sup over the evaluation grid of |x(s) - y(s)|."""
    n = n or max(x.n_eval, y.n_eval)
    return float(np.max(np.linalg.norm(x.samples(n) - y.samples(n), axis=-1)))


@dataclass(frozen=True)
class LoopReport:
    quadric_defect: float
    kappa_min: float
    sobolev_norm: float
    u_min: float
    u_max: float


def loop_analyze(x):
    z = x.samples()
    u = exhaustion(z)
    return LoopReport(float(quadric_defect(z).max()), float(kappa(z).min()),
                      x.sobolev_norm(), float(u.min()), float(u.max()))


def loop_retract(x, tol=DEFAULT):
    """Pointwise retraction onto the quadric, re-expanded at the same truncation."""
    values = retract_ambient(x.samples(), tol)
    y = Loop.from_samples(values, x.n_loop, x.k, x.n_eval)
    defect = float(np.max(np.linalg.norm(y.samples() - values, axis=-1)))
    if defect > tol.spec:
        raise SpectralOverflow("retracted loop does not fit its truncation",
                               defect=defect, n_loop=x.n_loop)
    return y


def loop_exhaustion(x, tol=DEFAULT):
    """max_s u(rho(x(s))) over the evaluation grid."""
    return float(exhaustion(retract_ambient(x.samples(), tol)).max())


class LoopCurve:
    """Loops sampled at increasing times 0 = t_0 < ... < t_last = 1.

    Between samples the Fourier coefficients are interpolated linearly.
    """

    interpolation = "linear-coefficients"

    def __init__(self, times, loops, tol=DEFAULT, check=True):
        self.times = np.asarray(times, dtype=float)
        self.loops = list(loops)
        if len(self.times) != len(self.loops) or len(self.times) < 2:
            raise PreconditionError("need at least two (time, loop) samples")
        if self.times[0] != 0.0 or self.times[-1] != 1.0 or np.any(np.diff(self.times) <= 0):
            raise PreconditionError("times must increase strictly from 0 to 1")
        n = max(x.n_loop for x in self.loops)
        self.loops = [x.padded(n) for x in self.loops]
        if check:
            gaps = self.gaps()
            if gaps.max() > tol.cont:
                raise PreconditionError("consecutive loops further apart than the continuity bound",
                                        gap=float(gaps.max()))

    def __len__(self):
        return len(self.times)

    def gaps(self):
        return np.array([loop_distance(a, b) for a, b in zip(self.loops[:-1], self.loops[1:])])

    def at(self, t):
        i = int(np.clip(np.searchsorted(self.times, t, side="right") - 1, 0, len(self) - 2))
        t0, t1 = self.times[i], self.times[i + 1]
        lam = (t - t0) / (t1 - t0)
        a, b = self.loops[i], self.loops[i + 1]
        return Loop((1 - lam) * a.coeffs + lam * b.coeffs, a.k, a.n_eval)

    def is_closed(self, tol=DEFAULT):
        return loop_distance(self.loops[0], self.loops[-1]) <= max(tol.manifold, 1e-12)

    def reversed(self):
        return LoopCurve(1.0 - self.times[::-1], self.loops[::-1], check=False)

    def to_record(self):
        return {
            "scheme_version": SCHEME_VERSION,
            "kind": "loop_curve",
            "interpolation": self.interpolation,
            "times": [float(t) for t in self.times],
            "loops": [x.to_record() for x in self.loops],
        }

    @classmethod
    def from_record(cls, rec, tol=DEFAULT):
        if rec.get("scheme_version") != SCHEME_VERSION or rec.get("kind") != "loop_curve":
            raise ValueError("not a version-%d loop curve record" % SCHEME_VERSION)
        return cls(rec["times"], [Loop.from_record(r) for r in rec["loops"]], tol)

    def dumps(self):
        return json.dumps(self.to_record(), sort_keys=True)


class SmoothedCurve:
    """t -> rho(P(t)) for a polynomial P fitted to ambient values."""

    def __init__(self, poly, value_shape, tol):
        self.poly = poly
        self.value_shape = value_shape
        self.tol = tol

    def ambient(self, t):
        t = np.atleast_1d(np.asarray(t, dtype=float))
        return self.poly(t).T.reshape((len(t),) + self.value_shape)

    def __call__(self, t):
        return retract_ambient(self.ambient(t), self.tol)


def smooth_curve(values, times=None, degree=4, tol=DEFAULT):
    """Least-squares polynomial fit in t followed by the retraction.

    ``values`` is either a LoopCurve (fitted through its grid samples) or an
    array of points with shape (n_t, ..., 3).  Returns the analytic curve and
    the sup distance to the input on the sample times.
    """
    if isinstance(values, LoopCurve):
        times = values.times
        data = np.stack([x.samples() for x in values.loops])
    else:
        data = np.asarray(values, dtype=complex)
        times = np.linspace(0.0, 1.0, len(data)) if times is None else np.asarray(times, float)
    shape = data.shape[1:]
    flat = data.reshape(len(data), -1)
    cheb = np.polynomial.chebyshev.Chebyshev
    fits = [cheb.fit(times, flat[:, j], degree, domain=[0.0, 1.0]) for j in range(flat.shape[1])]

    def poly(t):
        return np.stack([f(t) for f in fits])

    curve = SmoothedCurve(poly, shape, tol)
    ambient = curve.ambient(times)
    if np.any(cut_margin(ambient) <= tol.cut):
        raise BranchCut("fitted polynomial leaves the retraction domain")
    fitted = curve(times)
    err = float(np.max(np.linalg.norm(fitted - data, axis=-1)))
    return curve, err
