"""Analytic discs: truncated Taylor series sigma -> sum a_m sigma^m.

A disc carries its coefficients and the size of the boundary grid on which it
is sampled.  Coefficients may be scalars or vectors in C^3 (trailing axes).
"""
import json

import numpy as np

from .config import DEFAULT
from .errors import GridMismatch, SpectralOverflow
from .quadric import retract_ambient

SCHEME_VERSION = 1


def _default_grid(m_deg):
    n = 4
    while n < 4 * max(m_deg, 1):
        n *= 2
    return n


class AnalyticDisc:
    def __init__(self, coeffs, n_grid=None):
        self.coeffs = np.asarray(coeffs, dtype=complex)
        if self.coeffs.ndim == 0:
            self.coeffs = self.coeffs[None]
        self.n_grid = n_grid or _default_grid(self.m_deg)

    @property
    def m_deg(self):
        return len(self.coeffs) - 1

    @classmethod
    def constant(cls, value, m_deg=0, n_grid=None):
        value = np.asarray(value, dtype=complex)
        c = np.zeros((m_deg + 1,) + value.shape, dtype=complex)
        c[0] = value
        return cls(c, n_grid)

    def __call__(self, sigma):
        sigma = np.asarray(sigma, dtype=complex)
        powers = sigma[..., None] ** np.arange(self.m_deg + 1)
        return np.tensordot(powers, self.coeffs, axes=([-1], [0]))

    def boundary_points(self):
        return np.exp(2j * np.pi * np.arange(self.n_grid) / self.n_grid)

    def boundary_samples(self):
        """Values on the boundary grid, computed with an inverse FFT."""
        n = self.n_grid
        m = min(self.m_deg + 1, n)
        padded = np.zeros((n,) + self.coeffs.shape[1:], dtype=complex)
        padded[:m] = self.coeffs[:m]
        return np.fft.ifft(padded, axis=0) * n

    def tail(self):
        """Modulus of the top coefficient, a cheap spectral-decay indicator."""
        return float(np.linalg.norm(np.atleast_1d(self.coeffs[-1])))

    def to_record(self):
        c = self.coeffs.reshape(len(self.coeffs), -1)
        return {
            "scheme_version": SCHEME_VERSION,
            "kind": "analytic_disc",
            "m_deg": self.m_deg,
            "n_grid": self.n_grid,
            "value_shape": list(self.coeffs.shape[1:]),
            "coefficients": [[[float(x.real), float(x.imag)] for x in row] for row in c],
        }

    @classmethod
    def from_record(cls, rec):
        if rec.get("scheme_version") != SCHEME_VERSION or rec.get("kind") != "analytic_disc":
            raise ValueError("not a version-%d analytic disc record" % SCHEME_VERSION)
        c = np.array([[complex(re, im) for re, im in row] for row in rec["coefficients"]])
        return cls(c.reshape((len(c),) + tuple(rec["value_shape"])), rec["n_grid"])

    def dumps(self):
        return json.dumps(self.to_record(), sort_keys=True)


def analytic_project(samples, m_deg=None):
    """Holomorphic part of boundary samples on a uniform grid of the circle.

    Returns the disc built from the nonnegative frequencies (up to ``m_deg``)
    and the l2 energy of the negative ones, which measures how far the data is
    from being the boundary trace of a holomorphic function.
    """
    samples = np.asarray(samples, dtype=complex)
    n = len(samples)
    spec = np.fft.fft(samples, axis=0) / n
    half = n // 2
    m = half - 1 if m_deg is None else min(m_deg, half - 1)
    neg = spec[half:]
    residual = float(np.sqrt(np.sum(np.abs(neg) ** 2)))
    return AnalyticDisc(spec[: m + 1].copy(), n), residual


def truncation_tail(samples, m_deg):
    """l2 energy of positive frequencies above m_deg (dropped by truncation)."""
    samples = np.asarray(samples, dtype=complex)
    n = len(samples)
    spec = np.fft.fft(samples, axis=0) / n
    return float(np.sqrt(np.sum(np.abs(spec[m_deg + 1: n // 2]) ** 2)))


def disc_retract(x, tol=DEFAULT):
    """rho o x re-expanded as a disc into the quadric."""
    values = retract_ambient(x.boundary_samples(), tol)
    disc, residual = analytic_project(values, x.m_deg)
    defect = float(np.hypot(residual, truncation_tail(values, x.m_deg)))
    if defect > tol.spec:
        raise SpectralOverflow("retracted disc under-resolved on its grid",
                               defect=defect, n_grid=x.n_grid, m_deg=x.m_deg)
    disc.n_grid = x.n_grid
    return disc


def boundary_mean(f, x, n_grid=None):
    """Trapezoidal mean of f over the boundary circle x(e^{2 pi i tau})."""
    if n_grid is None or n_grid == x.n_grid:
        values = x.boundary_samples()
    else:
        values = x(np.exp(2j * np.pi * np.arange(n_grid) / n_grid))
    return complex(np.mean(np.asarray(f(values), dtype=complex), axis=0))


def disc_distance(x, y):
    """sup over the closed disc of |x - y|, taken on the boundary grid."""
    if x.n_grid != y.n_grid:
        raise GridMismatch("discs sampled on different grids", left=x.n_grid, right=y.n_grid)
    d = x.boundary_samples() - y.boundary_samples()
    if d.ndim > 1:
        d = np.linalg.norm(d.reshape(len(d), -1), axis=-1)
    return float(np.max(np.abs(d)))
