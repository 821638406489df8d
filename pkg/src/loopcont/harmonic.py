"""Harmonic measure of boundary arcs of the unit disc and polynomial witnesses.

A witness for "the harmonic measure of the open set Gamma of the unit circle
exceeds delta" is a polynomial theta with theta(0) = delta, Re theta < 1 on
the closed disc and Re theta < 0 on the circle minus Gamma.  Witnesses come
from Fejer means of the indicator of a slightly shrunk Gamma.
"""
from dataclasses import dataclass, field

import numpy as np

from .errors import DegreeExhausted, Infeasible, PreconditionError

TWO_PI = 2 * np.pi


# -- arc sets ----------------------------------------------------------------

class BoundaryArcSet:
    """Finite union of open arcs (a, b) of the unit circle, angles in radians.

    Arcs are normalised so that 0 <= a < 2 pi, a < b <= a + 2 pi, sorted and
    merged when they overlap.  An arc of length >= 2 pi is the full circle.
    """

    def __init__(self, arcs=()):
        self.full = False
        norm = []
        for a, b in arcs:
            a, b = float(a), float(b)
            if b < a:
                raise PreconditionError("arc end precedes its start", arc=(a, b))
            if b - a >= TWO_PI:
                self.full = True
                continue
            if b == a:
                continue
            shift = np.floor(a / TWO_PI) * TWO_PI
            norm.append((a - shift, b - shift))
        merged = [] if self.full else _merge(norm)
        self.full = self.full or merged is None
        self.arcs = [] if self.full else merged

    @classmethod
    def full_circle(cls):
        return cls([(0.0, TWO_PI)])

    def __len__(self):
        return len(self.arcs)

    def __repr__(self):
        return "BoundaryArcSet(full)" if self.full else "BoundaryArcSet(%r)" % (self.arcs,)

    def measure(self):
        return arc_measure(self)

    def rotated(self, angle):
        if self.full:
            return BoundaryArcSet.full_circle()
        return BoundaryArcSet([(a + angle, b + angle) for a, b in self.arcs])

    def shrunk(self, fraction=0.01):
        """Each arc shortened by ``fraction`` of its length, half at each end."""
        if self.full:
            return BoundaryArcSet.full_circle()
        out = []
        for a, b in self.arcs:
            h = 0.5 * fraction * (b - a)
            out.append((a + h, b - h))
        return BoundaryArcSet(out)

    def contains(self, phi):
        """Membership of angles in the open arcs."""
        phi = np.mod(np.asarray(phi, dtype=float), TWO_PI)
        if self.full:
            return np.ones(phi.shape, dtype=bool)
        inside = np.zeros(phi.shape, dtype=bool)
        for a, b in self.arcs:
            d = np.mod(phi - a, TWO_PI)
            inside |= (d > 0) & (d < b - a)
        return inside

    def endpoints(self):
        return np.array([x for arc in self.arcs for x in arc]) % TWO_PI

    def indicator_coeffs(self, n_max):
        """Fourier coefficients c_n, 0 <= n < n_max, of the indicator function."""
        n = np.arange(n_max)
        c = np.zeros(n_max, dtype=complex)
        if self.full:
            c[0] = 1.0
            return c
        for a, b in self.arcs:
            c[0] += (b - a) / TWO_PI
            k = n[1:]
            c[1:] += (np.exp(-1j * k * a) - np.exp(-1j * k * b)) / (TWO_PI * 1j * k)
        return c

    def to_record(self):
        return {"full": self.full, "arcs": [[a, b] for a, b in self.arcs]}


def _merge(arcs):
    """Union of normalised arcs; None when they cover the whole circle."""
    if not arcs:
        return []
    # split at 2 pi, merge on [0, 2 pi], then rejoin across the seam
    pieces = []
    for a, b in arcs:
        if b > TWO_PI:
            pieces += [(a, TWO_PI), (0.0, b - TWO_PI)]
        else:
            pieces.append((a, b))
    out = []
    for a, b in sorted(pieces):
        if out and a <= out[-1][1]:
            out[-1][1] = max(out[-1][1], b)
        else:
            out.append([a, b])
    if out[0][0] <= 0.0 and out[-1][1] >= TWO_PI:
        if len(out) == 1:
            return None
        head = out.pop(0)
        out[-1][1] = head[1] + TWO_PI
    return [(a, b) for a, b in out]


def arc_measure(arcs):
    """Harmonic measure at the centre: total length / (2 pi)."""
    if arcs.full:
        return 1.0
    return float(sum(b - a for a, b in arcs.arcs) / TWO_PI)


# -- certificates --------------------------------------------------------------

@dataclass
class HarmonicCertificate:
    coeffs: np.ndarray      # theta(sigma) = sum coeffs[n] sigma^n
    delta: float
    build_grid: int
    report: dict = field(default_factory=dict)

    @property
    def degree(self):
        return len(self.coeffs) - 1

    def __call__(self, sigma):
        sigma = np.asarray(sigma, dtype=complex)
        return np.polynomial.polynomial.polyval(sigma, self.coeffs)

    def circle_values(self, n, radius=1.0):
        """theta(radius e^{2 pi i j / n}) by FFT."""
        m = len(self.coeffs)
        size = max(n, m)
        buf = np.zeros(size, dtype=complex)
        buf[:m] = self.coeffs * radius ** np.arange(m)
        vals = np.fft.ifft(buf) * size
        return vals[:: size // n] if size != n else vals

    def to_record(self):
        return {
            "kind": "harmonic_certificate",
            "scheme_version": 1,
            "delta": self.delta,
            "degree": self.degree,
            "build_grid": self.build_grid,
            "coefficients": [[float(c.real), float(c.imag)] for c in self.coeffs],
            "report": self.report,
        }


def _grid_for(degree, minimum=1024):
    n = minimum
    while n < 4 * (degree + 1):
        n *= 2
    return n


def fejer_polynomial(arcs, delta, degree):
    """delta + 2 sum_{n=1}^{D-1} (1 - n/D) c_n sigma^n for the indicator coefficients c_n."""
    c = arcs.indicator_coeffs(max(degree, 1))
    n = np.arange(len(c))
    coeffs = 2 * (1 - n / max(degree, 1)) * c
    coeffs[0] = delta
    return coeffs


def certificate_build(arcs, delta, shrink=0.01, degree=8, max_degree=65536, grid=None):
    """Fejer-mean witness for harmonic measure > delta.

    The degree doubles from ``degree`` up to ``max_degree``; at each degree the
    shrink fraction starts at ``shrink`` and doubles while delta stays below
    the measure of the shrunk arcs (short arcs need a wider gap between the
    shrunk arc and the ends of Gamma).
    """
    if arcs.full:
        if delta >= 1:
            raise Infeasible("theta(0) = delta must stay below 1", delta=delta)
        cert = HarmonicCertificate(np.array([delta], dtype=complex), float(delta), grid or 1024)
        cert.report = certificate_verify(cert, arcs, 4 * cert.build_grid)
        cert.report.update(degree=0, shrink=0.0)
        return cert
    m = arc_measure(arcs)
    if delta >= m:
        raise Infeasible("delta is not below the harmonic measure", delta=delta, measure=m)
    if delta >= arc_measure(arcs.shrunk(shrink)):
        raise Infeasible("delta is not below the measure of the shrunk arcs", delta=delta,
                         shrunk_measure=arc_measure(arcs.shrunk(shrink)), shrink=shrink)
    d = max(int(degree), 1)
    best = np.inf
    while d <= max_degree:
        n = grid or _grid_for(d)
        frac = shrink
        while frac < 1 and delta < arc_measure(arcs.shrunk(frac)):
            cert = HarmonicCertificate(fejer_polynomial(arcs.shrunk(frac), delta, d), float(delta), n)
            rep = certificate_verify(cert, arcs, 4 * n)
            if rep["passed"]:
                rep.update(degree=d, shrink=frac)
                cert.report = rep
                return cert
            best = min(best, rep["max_re_off_gamma"])
            frac *= 2
        d *= 2
    raise DegreeExhausted("no certificate up to the maximal degree", max_degree=max_degree,
                          best_off_gamma=best)


def certificate_verify(cert, arcs, grid=4096, radii=None):
    """Check theta(0) = delta, Re theta < 1 on the closed disc, Re theta < 0 off Gamma."""
    grid = int(grid)
    theta0 = complex(cert.coeffs[0])
    err0 = abs(theta0 - cert.delta)
    radii = np.linspace(0.0, 1.0, 11) if radii is None else np.asarray(radii, dtype=float)
    disc_max = max(float(np.max(cert.circle_values(grid, r).real)) for r in radii)
    phi = TWO_PI * np.arange(grid) / grid
    bvals = cert.circle_values(grid).real
    off = ~arcs.contains(phi)
    ends = arcs.endpoints() if not arcs.full else np.array([])
    end_vals = cert(np.exp(1j * ends)).real if len(ends) else np.array([])
    off_vals = np.concatenate([bvals[off], end_vals])
    off_max = float(off_vals.max()) if off_vals.size else -np.inf
    rep = {
        "theta0_error": err0,
        "theta0_ok": bool(err0 <= 1e-12),
        "max_re_disc": disc_max,
        "disc_ok": bool(disc_max < 1.0),
        "max_re_off_gamma": off_max,
        "off_gamma_ok": bool(off_max < 0.0),
        "boundary_grid": grid,
        "radial_grid": len(radii),
        "off_gamma_points": int(off_vals.size),
    }
    rep["passed"] = rep["theta0_ok"] and rep["disc_ok"] and rep["off_gamma_ok"]
    return rep


# -- the model region of the harmonic-measure lemma -------------------------------

def branch_g(s):
    """g(s) = 1 - sqrt(1 - s), principal branch, g(0) = 0."""
    return 1 - np.sqrt(1 - np.asarray(s, dtype=complex))


def g_sigma(s, sigma):
    """g(s / sigma) = 1 - sqrt(1 - s / sigma)."""
    return branch_g(np.asarray(s, dtype=complex) / sigma)


def psi(t, sigma=1.0):
    """Inverse of g_sigma: sigma t (2 - t)."""
    t = np.asarray(t, dtype=complex)
    return sigma * t * (2 - t)


def in_U(s, eps):
    """s in the disc of radius eps or in the open sector 0 < arg s < eps."""
    s = np.asarray(s, dtype=complex)
    a = np.angle(s)
    return (np.abs(s) < eps) | ((a > 0) & (a < eps))


def in_V(t, eps):
    """t in g(U): Re t < 1 and t (2 - t) in U."""
    t = np.asarray(t, dtype=complex)
    return (t.real < 1) & in_U(psi(t), eps)


def _sqrt_from_below(x):
    # boundary values of sqrt(1 - s) for s > 1 approached from Im s > 0
    return np.sqrt(np.asarray(x, dtype=float) + 0j) * -1j


def region_boundary(eps, radius, n=2000):
    """Sample points of the boundary of V inside the closed disc of the given radius."""
    ang = np.linspace(eps, TWO_PI, n)
    arc = branch_g(eps * np.exp(1j * ang))
    rho = np.geomspace(eps, 4 * (radius + 1) ** 2, n)
    below = rho < 1
    ray0 = np.where(below, 1 - np.sqrt(np.abs(1 - rho) + 0j), 1 - _sqrt_from_below(rho - 1))
    ray1 = branch_g(rho * np.exp(1j * eps))
    b = np.concatenate([arc, ray0, ray1])
    return b[np.abs(b) <= radius]


def region_samples(eps, radius, n_r=40, n_a=192, n_b=2000):
    """Points of the closed disc minus V: polar grid, the circle and the boundary of V."""
    r = np.linspace(0.0, radius, n_r + 1)[1:]
    a = TWO_PI * np.arange(n_a) / n_a
    grid = (r[:, None] * np.exp(1j * a)).ravel()
    pts = np.concatenate([grid, region_boundary(eps, radius, n_b)])
    return pts[~in_V(pts, eps)]


def _arnoldi(z, degree, weights):
    """Vandermonde-with-Arnoldi basis orthonormal for the weighted discrete product."""
    m = len(z)
    Q = np.zeros((m, degree + 1), dtype=complex)
    H = np.zeros((degree + 1, degree), dtype=complex)
    w = weights / weights.sum()
    Q[:, 0] = 1.0
    for k in range(degree):
        q = z * Q[:, k]
        for _ in range(2):
            h = (np.conj(Q[:, : k + 1]) * w[:, None]).T @ q
            H[: k + 1, k] += h
            q = q - Q[:, : k + 1] @ h
        H[k + 1, k] = np.sqrt(np.sum(w * np.abs(q) ** 2))
        Q[:, k + 1] = q / H[k + 1, k]
    return Q, H


def _arnoldi_eval(H, z):
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    n = H.shape[1]
    W = np.zeros((len(z), n + 1), dtype=complex)
    W[:, 0] = 1.0
    for k in range(n):
        w = z * W[:, k] - W[:, : k + 1] @ H[: k + 1, k]
        W[:, k + 1] = w / H[k + 1, k]
    return W


@dataclass
class RegionPolynomial:
    """theta(t) = sum_k a_k p_k(t / scale) in an Arnoldi basis."""
    H: np.ndarray
    coeffs: np.ndarray
    scale: float

    @property
    def degree(self):
        return self.H.shape[1]

    def __call__(self, t):
        return _arnoldi_eval(self.H, np.asarray(t, dtype=complex) / self.scale) @ self.coeffs

    def monomial_coeffs(self):
        """Coefficients in powers of t (ill-conditioned for high degree; for export)."""
        n = self.degree
        P = np.zeros((n + 1, n + 1), dtype=complex)
        P[0, 0] = 1.0
        for k in range(n):
            p = np.roll(P[k], 1)
            p[0] = 0
            p = p - P[: k + 1].T @ self.H[: k + 1, k]
            P[k + 1] = p / self.H[k + 1, k]
        c = P.T @ self.coeffs
        return c / self.scale ** np.arange(n + 1)


def _constrained_lsq(Q, q0, weights):
    """min sum w_j (Re theta_j + 1)^2  subject to Re theta(0) = 1 (real unknowns).

    The constraint is eliminated with a null-space basis so the weighted
    design matrix is never squared.
    """
    A = np.hstack([Q.real, -Q.imag]) * np.sqrt(weights)[:, None]
    b = -np.sqrt(weights)
    c = np.concatenate([q0.real, -q0.imag])
    n = A.shape[1]
    xp = c / (c @ c)
    basis = np.linalg.qr(np.column_stack([c, np.eye(n)[:, : n - 1]]))[0][:, 1:]
    y = np.linalg.lstsq(A @ basis, b - A @ xp, rcond=None)[0]
    x = xp + basis @ y
    half = n // 2
    return x[:half] + 1j * x[half:]


def lemma53_kernel(eps, degree=16, max_degree=256, n_r=40, n_a=192, reweight=20, verify_factor=2):
    """Polynomial theta with theta(0) = 1 and Re theta < 0 on the sampled closed disc
    of radius 3/eps minus V, found by reweighted constrained least squares with
    degree doubling.  Returns (delta, theta, report) with delta = 0.9 / max Re theta
    over the sampled disc.
    """
    if not (0 < eps < 1):
        raise PreconditionError("eps must lie in (0, 1)", eps=eps)
    radius = 3.0 / eps
    pts = region_samples(eps, radius, n_r, n_a)
    z = np.concatenate([[0j], pts]) / radius
    best = (-np.inf, None)
    d = degree
    while d <= max_degree:
        w = np.ones(len(z))
        w[0] = len(z)
        Q, H = _arnoldi(z, d, w)
        q0 = Q[0]
        wts = np.ones(len(pts))
        worst = np.inf
        for _ in range(reweight):
            try:
                a = _constrained_lsq(Q[1:], q0, wts)
            except np.linalg.LinAlgError:
                break
            a = a - 1j * float(np.imag(q0 @ a)) * _unit_constant(H)
            vals = (Q[1:] @ a).real
            t0 = complex(q0 @ a)
            worst = float(vals.max()) if abs(t0 - 1) <= 1e-10 else np.inf
            if worst < 0:
                break
            wts = wts * np.where(vals > -0.5, 4.0, 1.0)
            wts /= wts.max()
        margin = -worst
        if margin > best[0]:
            best = (margin, d)
        if worst < 0:
            theta = RegionPolynomial(H, a, radius)
            report = _lemma53_report(theta, eps, radius, n_r * verify_factor, n_a * verify_factor)
            if report["passed"]:
                report["degree"] = d
                report["build_samples"] = int(len(pts))
                delta = 0.9 / report["max_re_disc"]
                report["delta"] = delta
                return delta, theta, report
        d *= 2
    omega = exit_harmonic_measure(eps)
    raise DegreeExhausted("no polynomial with Re theta < 0 on the sampled region",
                          eps=eps, max_degree=max_degree, best_margin=best[0], best_degree=best[1],
                          exit_measure=omega, required_range=1.0 / omega)


def exit_harmonic_measure(eps, h=0.02):
    """Harmonic measure at 0 of the part of the circle |t| = 3/eps inside V,
    relative to V cut by that disc (five-point finite differences, spacing h).

    Any admissible theta has Re theta(0) = 1 <= omega * sup Re theta, since
    Re theta < 0 on the rest of the boundary; 1 / omega therefore bounds
    from below the range a witness polynomial has to span.
    """
    from scipy.sparse import csr_matrix
    from scipy.sparse.linalg import spsolve

    radius = 3.0 / eps
    xs = np.arange(-radius - 4 * h, radius + 4 * h, h)
    T = xs[None, :] + 1j * xs[:, None]
    inside = in_V(T, eps) & (np.abs(T) < radius)
    exit_ = in_V(T, eps) & (np.abs(T) >= radius)
    idx = -np.ones(T.shape, dtype=int)
    idx[inside] = np.arange(int(inside.sum()))
    n = int(inside.sum())
    I, Jc = np.nonzero(inside)
    rows = [idx[I, Jc]]
    cols = [idx[I, Jc]]
    vals = [np.full(n, 4.0)]
    b = np.zeros(n)
    for di, dj in ((1, 0), (-1, 0), (0, 1), (0, -1)):
        a, c = I + di, Jc + dj
        nb = inside[a, c]
        rows.append(idx[I, Jc][nb])
        cols.append(idx[a, c][nb])
        vals.append(-np.ones(int(nb.sum())))
        np.add.at(b, idx[I, Jc], exit_[a, c].astype(float))
    A = csr_matrix((np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))), shape=(n, n))
    u = spsolve(A.tocsc(), b)
    i0 = np.unravel_index(np.argmin(np.abs(T)), T.shape)
    return float(u[idx[i0]])


def _unit_constant(H):
    # coefficient vector of the constant polynomial 1 in the Arnoldi basis
    e = np.zeros(H.shape[1] + 1, dtype=complex)
    e[0] = 1.0
    return e


def _lemma53_report(theta, eps, radius, n_r, n_a):
    pts = region_samples(eps, radius, n_r, n_a, n_b=4000)
    vals = theta(pts).real
    r = np.linspace(0.0, radius, n_r + 1)
    a = TWO_PI * np.arange(n_a) / n_a
    disc = theta((r[:, None] * np.exp(1j * a)).ravel()).real
    t0 = complex(theta(np.array([0j]))[0])
    rep = {
        "eps": eps,
        "radius": radius,
        "theta0": [t0.real, t0.imag],
        "theta0_ok": bool(abs(t0 - 1) <= 1e-10),
        "max_re_off_V": float(vals.max()),
        "off_V_ok": bool(vals.max() < 0),
        "max_re_disc": float(disc.max()),
        "verify_samples": int(len(pts)),
    }
    rep["passed"] = rep["theta0_ok"] and rep["off_V_ok"] and rep["max_re_disc"] > 0
    return rep
