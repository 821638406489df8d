"""Fiber charts along the kernel of du, and the boundary-pushing deformation of a disc.

For z on M with Im z != 0, the complex line E_z = ker du in T_z M is spanned
by the real unit vector e_basis(z).  The chart phi(z, tau) solves

    sum zeta_j^2 = 1,   q(zeta, z) = 0,   e . (zeta - z) = tau

where q is the holomorphic second-order Taylor polynomial of v = u o rho at z.
Along every real line through 0 in the tau-plane, u o phi has its only
critical point at tau = 0, a minimum.

push_disc deforms an analytic disc kappa through discs lambda(t, .) with the
same centre whose boundary values climb by alpha in u (a single disc; no
parameter cube).
"""
from dataclasses import dataclass, field

import numpy as np

from .config import DEFAULT
from .discs import AnalyticDisc, analytic_project
from .errors import (BranchCut, ConformalStall, FejerBudget, LevelCurveNotFound,
                     NewtonDivergence, OutOfChart, PreconditionError)
from .quadric import (Region, cut_margin, e_basis, exhaustion, kappa,
                      quadric_defect, retract_ambient)

# chart radius r_V = CHART_FACTOR * kappa / u; line scans stay monotone up to
# about twice this radius on random samples of M'
CHART_FACTOR = 0.6


def v_gradient(z):
    """Holomorphic gradient of v = u o rho at points of M: conj(z) - |z|^2 z."""
    z = np.asarray(z, dtype=complex)
    u = exhaustion(z)[..., None]
    return np.conj(z) - u * z


def v_hessian(z):
    """Holomorphic Hessian d^2 v / dz_i dz_j at points of M."""
    z = np.asarray(z, dtype=complex)
    u = exhaustion(z)[..., None, None]
    zb = np.conj(z)
    outer = zb[..., :, None] * z[..., None, :]
    return -outer - np.swapaxes(outer, -1, -2) - u * np.eye(3) + 3 * u * z[..., :, None] * z[..., None, :]


def q_form(zeta, z):
    """q(zeta, z) = 2 grad v . d + d^T Hess v d with d = zeta - z."""
    d = np.asarray(zeta, dtype=complex) - z
    g = v_gradient(z)
    H = v_hessian(z)
    return 2 * np.sum(g * d, axis=-1) + np.einsum("...i,...ij,...j->...", d, H, d)


def chart_radius(z):
    """Radius r_V(z) of the fiber chart: CHART_FACTOR * kappa(z) / u(z)."""
    return CHART_FACTOR * kappa(z) / exhaustion(z)


@dataclass
class FiberChart:
    base: np.ndarray
    tau: complex = 0.0
    radius: float = None

    def __post_init__(self):
        self.base = np.asarray(self.base, dtype=complex)
        if self.radius is None:
            self.radius = float(chart_radius(self.base))


def phi_solve(z, tau, e=None, tol=DEFAULT, max_iter=40, residual_tol=1e-14):
    """Batched Newton solve of the chart equations.

    z has shape (..., 3) and tau broadcasts against z[..., 0].  Returns
    (zeta, residual).  ``e`` defaults to e_basis(z).
    """
    z = np.asarray(z, dtype=complex)
    tau = np.asarray(tau, dtype=complex)
    shape = np.broadcast_shapes(z.shape[:-1], tau.shape)
    z = np.broadcast_to(z, shape + (3,))
    tau = np.broadcast_to(tau, shape)
    e = e_basis(z, tol) if e is None else np.broadcast_to(np.asarray(e, dtype=complex), shape + (3,))
    g = v_gradient(z)
    H = v_hessian(z)
    # residuals are measured relative to the size of q's coefficients
    scale = np.maximum(exhaustion(z), 1.0)[..., None] ** 1.5
    zeta = z + tau[..., None] * e
    res = np.inf
    for it in range(max_iter + 1):
        d = zeta - z
        F = np.stack([np.sum(zeta * zeta, axis=-1) - 1.0,
                      2 * np.sum(g * d, axis=-1) + np.einsum("...i,...ij,...j->...", d, H, d),
                      np.sum(e * d, axis=-1) - tau], axis=-1)
        res_new = float(np.max(np.abs(F) / scale)) if F.size else 0.0
        if not np.isfinite(res_new) or res_new > 1e3 * max(res, 1.0):
            raise NewtonDivergence("chart Newton iteration diverged", residual=res_new, iteration=it)
        if res_new <= residual_tol or (res_new <= 1e-11 and res_new >= 0.5 * res):
            return zeta, res_new
        res = res_new
        if it == max_iter:
            break
        Jm = np.stack([2 * zeta, 2 * g + 2 * np.einsum("...ij,...j->...i", H, d), e], axis=-2)
        zeta = zeta - np.linalg.solve(Jm, F[..., None])[..., 0]
    raise NewtonDivergence("chart Newton iteration did not converge", residual=res)


def phi_map(chart, tol=DEFAULT):
    """The point phi(z, tau) of M for a fiber chart."""
    z = chart.base
    if kappa(z) <= tol.real_locus:
        e_basis(z, tol)          # raises CriticalPoint
    if abs(chart.tau) >= chart.radius:
        raise OutOfChart("fiber coordinate outside the chart", tau=complex(chart.tau), radius=chart.radius)
    if chart.tau == 0:
        return z.copy()
    zeta, _ = phi_solve(z, chart.tau, tol=tol)
    return zeta


def chart_residuals(zeta, z, tau, e=None):
    """Max residual of the defining equations at a computed chart point."""
    z = np.asarray(z, dtype=complex)
    e = e_basis(z) if e is None else e
    return float(max(np.max(quadric_defect(zeta)), np.max(np.abs(q_form(zeta, z))),
                     np.max(np.abs(np.sum(e * (zeta - z), axis=-1) - tau))))


@dataclass
class LineScan:
    t: np.ndarray
    u: np.ndarray
    argmin: int
    min_at_zero: bool
    left_monotone: bool
    right_monotone: bool

    @property
    def passed(self):
        return self.min_at_zero and self.left_monotone and self.right_monotone


def fiber_line_scan(z, beta, steps=32, extent=0.95, tol=DEFAULT):
    """Profile of u o phi along tau = t e^{i beta}, |t| <= extent * r_V(z)."""
    z = np.asarray(z, dtype=complex)
    e = e_basis(z, tol)
    r = extent * float(chart_radius(z))
    t = np.linspace(-r, r, 2 * steps + 1)
    zeta, _ = phi_solve(z, t * np.exp(1j * beta), e, tol)
    u = exhaustion(zeta)
    u[steps] = exhaustion(z)
    i = int(np.argmin(u))
    left = bool(np.all(np.diff(u[: steps + 1]) < 0))
    right = bool(np.all(np.diff(u[steps:]) > 0))
    return LineScan(t, u, i, i == steps, left, right)


@dataclass
class PushProblem:
    """Data for pushing the boundary of one disc upward in u.

    ``alpha`` is a float, a callable of the boundary angle, or None (then
    delta0 / 2); ``eta`` defaults to delta0 / 10.  ``J`` is the starting
    substitution exponent, doubled up to ``max_J`` until the Fejer means are
    accurate enough.
    """
    kappa_disc: AnalyticDisc
    region: Region
    alpha: object = None
    eta: float = None
    J: int = 4
    max_J: int = 256
    delta0: float = None
    n_s: int = 64
    n_sigma: int = 64
    n_t: int = 11
    radii: tuple = (0.0, 0.25, 0.5, 0.75, 0.9, 1.0)

    def to_record(self):
        if callable(self.alpha):
            raise ValueError("only constant alpha can be serialised")
        return {
            "scheme_version": 1,
            "kind": "push_problem",
            "kappa_disc": self.kappa_disc.to_record(),
            "region": {"a": self.region.a, "b": self.region.b, "c": self.region.c},
            "alpha": self.alpha, "eta": self.eta, "delta0": self.delta0,
            "J": self.J, "max_J": self.max_J,
            "n_s": self.n_s, "n_sigma": self.n_sigma, "n_t": self.n_t,
            "radii": list(self.radii),
        }

    @classmethod
    def from_record(cls, rec):
        if rec.get("scheme_version") != 1 or rec.get("kind") != "push_problem":
            raise ValueError("not a version-1 push problem record")
        keys = {"alpha", "eta", "delta0", "J", "max_J", "n_s", "n_sigma", "n_t", "radii"}
        unknown = set(rec) - keys - {"scheme_version", "kind", "kappa_disc", "region"}
        if unknown:
            raise ValueError("unknown push problem keys: %s" % ", ".join(sorted(unknown)))
        kw = {k: rec[k] for k in keys if rec.get(k) is not None}
        if "radii" in kw:
            kw["radii"] = tuple(kw["radii"])
        return cls(AnalyticDisc.from_record(rec["kappa_disc"]), Region(**rec["region"]), **kw)

    def boundary_angles(self, n=None):
        n = n or self.n_s
        return 2 * np.pi * np.arange(n) / n

    def boundary_values(self, n=None):
        return self.kappa_disc(np.exp(1j * self.boundary_angles(n)))

    def alpha_values(self, theta):
        theta = np.asarray(theta, dtype=float)
        if self.alpha is None:
            return np.full(theta.shape, 0.5 * self.delta0)
        if callable(self.alpha):
            return np.asarray(self.alpha(theta), dtype=float) * np.ones(theta.shape)
        return np.full(theta.shape, float(self.alpha))

    def validate(self, tol=DEFAULT):
        z = self.boundary_values(4 * self.n_s)
        u = exhaustion(z)
        if np.max(quadric_defect(z)) > tol.manifold:
            raise PreconditionError("disc does not lie on the quadric",
                                    defect=float(np.max(quadric_defect(z))))
        if not (np.all(u > self.region.a) and np.all(u < self.region.b)):
            raise PreconditionError("disc boundary leaves M(a, b)", u_min=float(u.min()), u_max=float(u.max()))
        if np.any(kappa(z) <= tol.real_locus):
            raise PreconditionError("disc boundary meets the real sphere")
        if self.delta0 is None:
            self.delta0 = scan_delta0(self.kappa_disc, self.n_s, tol=tol)
        a = self.alpha_values(self.boundary_angles(4 * self.n_s))
        if np.any(a <= 0) or np.any(a > self.delta0 * (1 + 1e-12)):
            raise PreconditionError("alpha must take values in (0, delta0]",
                                    alpha_min=float(a.min()), alpha_max=float(a.max()), delta0=self.delta0)
        if self.eta is None:
            self.eta = self.delta0 / 10
        if self.eta <= 0:
            raise PreconditionError("eta must be positive")
        return self


def scan_delta0(kappa_disc, n_s=64, n_dirs=32, extent=0.9, tol=DEFAULT):
    """Half the smallest rise of u o phi over the circles |tau| = extent * r_V.

    Along rays u o phi increases, so the sublevel sets below this rise stay
    inside the chosen circles.
    """
    z = kappa_disc(np.exp(2j * np.pi * np.arange(n_s) / n_s))
    e = e_basis(z, tol)
    r = extent * chart_radius(z)
    tau = r[:, None] * np.exp(2j * np.pi * np.arange(n_dirs) / n_dirs)
    zeta, _ = phi_solve(z[:, None], tau, e[:, None], tol)
    rise = exhaustion(zeta) - exhaustion(z)[:, None]
    return 0.5 * float(rise.min())


def aligned_section(z, tol=DEFAULT):
    """e_basis along a sampled closed curve, made continuous.

    Returns (g, phase, twist): g = phase * e_basis(z).  Signs are aligned
    sample to sample; a sign change around the circle is absorbed by the
    phase exp(i pi k / n), reported as twist = 1.
    """
    e = e_basis(z, tol)
    n = len(e)
    sign = np.ones(n)
    for k in range(1, n):
        sign[k] = sign[k - 1] * (1.0 if np.real(np.sum(e[k] * e[k - 1])) >= 0 else -1.0)
    closing = np.real(np.sum(e[0] * e[-1])) * sign[-1]
    twist = int(closing < 0)
    phase = sign * np.exp(1j * np.pi * twist * np.arange(n) / n)
    return phase[:, None] * e, phase, twist


def level_radii(z, e, phase, theta, target, r_max, tol=DEFAULT, iters=56):
    """Radii R[k, m] with u(phi(z_k, R e^{i theta_m} phase_k)) - u(z_k) = target_k.

    Bisection on each ray; the profile is increasing along rays inside the chart.
    """
    direction = np.exp(1j * theta)[None, :] * phase[:, None]
    zk, ek = z[:, None], e[:, None]
    u0 = exhaustion(z)[:, None]
    tgt = np.asarray(target, dtype=float)[:, None]

    def rise(r):
        zeta, _ = phi_solve(zk, r * direction, ek, tol)
        return exhaustion(zeta) - u0

    top = np.broadcast_to(r_max[:, None], direction.shape).copy()
    if np.any(rise(top) <= tgt):
        k, m = np.argwhere(rise(top) <= tgt)[0]
        raise LevelCurveNotFound("level not reached inside the chart; alpha too large for delta0",
                                 sample=int(k), angle=float(theta[m]), target=float(tgt[k, 0]))
    lo = np.zeros_like(top)
    hi = top
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        up = rise(mid) > tgt
        hi = np.where(up, mid, hi)
        lo = np.where(up, lo, mid)
    return 0.5 * (lo + hi)


def _conjugate(f):
    """Harmonic conjugate on the circle (zero mean) of samples along the last axis."""
    n = f.shape[-1]
    k = np.fft.fftfreq(n, 1.0 / n)
    spec = np.fft.fft(f, axis=-1)
    spec = spec * (-1j * np.sign(k))
    if n % 2 == 0:
        spec[..., n // 2] = 0
    return np.real(np.fft.ifft(spec, axis=-1))


def _trig_eval(values, x):
    """Trigonometric interpolant of uniform samples (last axis) evaluated at x."""
    n = values.shape[-1]
    spec = np.fft.fft(values, axis=-1) / n
    k = np.fft.fftfreq(n, 1.0 / n)
    if n % 2 == 0:
        spec = spec.copy()
        spec[..., n // 2] *= 0.5
        spec = np.concatenate([spec, spec[..., n // 2: n // 2 + 1]], axis=-1)
        k = np.concatenate([k, [n // 2]])
    return np.real(np.einsum("...k,...mk->...m", spec, np.exp(1j * x[..., None] * k)))


def theodorsen(log_r, max_iter=200, tol=1e-13):
    """Boundary correspondence of the Riemann map of a star-shaped domain.

    ``log_r`` holds log R(theta) on a uniform grid (last axis).  Returns
    (theta_of_phi, coeffs, iterations) where f(sigma) = sigma exp(h(sigma)),
    h = c_0 + 2 sum_{n>=1} c_n sigma^n, maps the unit disc onto the domain with
    f(0) = 0 and f'(0) = exp(c_0) > 0.
    """
    n = log_r.shape[-1]
    phi = 2 * np.pi * np.arange(n) / n
    theta = np.broadcast_to(phi, log_r.shape).copy()
    prev = None
    stalls = 0
    for it in range(1, max_iter + 1):
        new = phi + _conjugate(_trig_eval(log_r, theta))
        step = float(np.max(np.abs(new - theta)))
        theta = new
        if step < tol:
            break
        if prev is not None and step > 0.95 * prev:
            stalls += 1
            if stalls > 5:
                raise ConformalStall("Theodorsen iteration does not contract", step=step, iteration=it)
        prev = step
    else:
        raise ConformalStall("Theodorsen iteration did not converge", step=step, iteration=max_iter)
    boundary_log = _trig_eval(log_r, theta)
    c = np.fft.fft(boundary_log, axis=-1) / n
    return theta, c, it


def riemann_eval(c, sigma):
    """f(sigma) = sigma exp(c_0 + 2 sum_{n>=1} c_n sigma^n) for coefficient rows c.

    sigma has shape (m,); the result has shape c.shape[:-1] + (m,).
    """
    n = c.shape[-1]
    half = n // 2
    h = np.zeros(c.shape, dtype=complex)
    h[..., 0] = c[..., 0]
    h[..., 1:half] = 2 * c[..., 1:half]
    powers = sigma[:, None] ** np.arange(n)
    return sigma * np.exp(np.einsum("...k,mk->...m", h, powers))


def _pow2_at_least(n):
    m = 8
    while m < n:
        m *= 2
    return m


def fejer_coefficients(spec, J):
    """Fejer-weighted coefficients a[i + J - 1, j - 1] for |i| < J, 1 <= j <= J.

    ``spec`` is the 2-d FFT (normalised) of samples over (arg s, arg sigma);
    frequencies beyond the grid are treated as zero.
    """
    n_s, n_sig = spec.shape[:2]
    i = np.arange(-J + 1, J)
    j = np.arange(1, J + 1)
    w = (1 - np.abs(i) / J)[:, None] * (1 - j / (J + 1))[None, :]
    keep = (np.abs(i) < n_s // 2)[:, None] & (j < n_sig // 2)[None, :]
    a = spec[np.ix_(i % n_s, j % n_sig)] * (w * keep)[..., None]
    return a


def _chi_offsets(a, J, theta_s, sigma):
    """sum a_ij s^i sigma^j on the grid s = e^{i theta_s} (rows) by sigma (any shape)."""
    i = np.arange(-J + 1, J)
    j = np.arange(1, J + 1)
    es = np.exp(1j * np.outer(theta_s, i))
    sig = np.asarray(sigma, dtype=complex)
    pj = sig.reshape(-1)[:, None] ** j
    out = np.einsum("ki,ijc,mj->kmc", es, a, pj)
    return out.reshape((len(theta_s),) + sig.shape + (a.shape[-1],))


@dataclass
class PushResult:
    """The family t -> lambda(t, .) = rho(P_t) with P_t a polynomial in s."""
    problem: PushProblem
    J: int
    a: np.ndarray
    times: np.ndarray
    n_verify: int
    report: dict = field(default_factory=dict)

    @property
    def degree(self):
        return max(self.problem.kappa_disc.m_deg, self.J - 1 + self.J * self.J)

    def exponents(self):
        i = np.arange(-self.J + 1, self.J)
        j = np.arange(1, self.J + 1)
        return i[:, None] + self.J * j[None, :]

    def ambient_coeffs(self, t):
        """Coefficients of P_t(s) = kappa(s) + sum a_ij t^{jJ} s^{i + jJ}."""
        D = self.degree
        c = np.zeros((D + 1, 3), dtype=complex)
        k = self.problem.kappa_disc.coeffs
        c[: len(k)] += k
        tw = float(t) ** (self.J * np.arange(1, self.J + 1))
        np.add.at(c, self.exponents().ravel(), (self.a * tw[None, :, None]).reshape(-1, 3))
        return c

    def ambient_values(self, t, radius=1.0, n=None):
        n = n or self.n_verify
        c = self.ambient_coeffs(t)
        c = c * (radius ** np.arange(len(c)))[:, None]
        buf = np.zeros((n, 3), dtype=complex)
        np.add.at(buf, np.arange(len(c)) % n, c)     # aliasing is exact on the grid
        return np.fft.ifft(buf, axis=0) * n

    def values(self, t, radius=1.0, n=None, tol=DEFAULT):
        return retract_ambient(self.ambient_values(t, radius, n), tol)

    def disc(self, t, tol=DEFAULT):
        """lambda(t, .) re-expanded as an AnalyticDisc on the verification grid."""
        disc, _ = analytic_project(self.values(t, tol=tol))
        return disc

    def discs(self, tol=DEFAULT):
        return [self.disc(t, tol) for t in self.times]


def push_disc(problem, tol=DEFAULT, fejer_safety=0.5):
    """Deform a disc into M through discs with fixed centre whose boundary rises by alpha.

    Returns a PushResult whose report carries the checks (i)-(iv) with margins.
    """
    p = problem.validate(tol)
    theta_s = p.boundary_angles()
    z = p.boundary_values()
    alpha = p.alpha_values(theta_s)
    g, phase, twist = aligned_section(z, tol)
    e = e_basis(z, tol)
    r_max = 0.9 * chart_radius(z)

    # level curves and their Riemann maps
    phi_grid = 2 * np.pi * np.arange(p.n_sigma) / p.n_sigma
    R = level_radii(z, e, phase, phi_grid, alpha, r_max, tol)
    _, c, iterations = theodorsen(np.log(R))

    # psi on circles of radius r in sigma
    radii = np.asarray(p.radii, dtype=float)
    sigma = radii[:, None] * np.exp(1j * phi_grid)[None, :]
    f = riemann_eval(c, sigma.ravel()).reshape((len(z),) + sigma.shape)
    tau = f * phase[:, None, None]
    psi, newton_res = phi_solve(z[:, None, None], tau, e[:, None, None], tol)
    if np.any(np.abs(tau) >= chart_radius(z)[:, None, None]):
        raise OutOfChart("Riemann map image leaves the chart")
    u_psi = exhaustion(psi)
    rim = int(np.argmin(np.abs(radii - 1.0)))
    level_err = float(np.max(np.abs(u_psi[:, rim] - exhaustion(z)[:, None] - alpha[:, None])))
    spec = np.fft.fft2(psi[:, rim] - z[:, None], axes=(0, 1)) / (p.n_s * p.n_sigma)
    neg = spec[:, p.n_sigma // 2 + 1:]
    sigma_defect = float(np.sqrt(np.sum(np.abs(neg) ** 2)))
    tail = float(max(np.abs(spec[p.n_s // 2 - 2: p.n_s // 2 + 3]).max(),
                     np.abs(spec[:, p.n_sigma // 2 - 3: p.n_sigma // 2 + 1]).max()))

    # Fejer means with J escalation
    J = max(2, int(p.J))
    history = []
    while True:
        a = fejer_coefficients(spec, J)
        chi = z[:, None, None] + _chi_offsets(a, J, theta_s, sigma)
        margin = cut_margin(chi)
        if np.any(margin <= tol.cut):
            raise BranchCut("Fejer approximation meets the branch cut", J=J)
        err = float(np.max(np.abs(u_psi - exhaustion(retract_ambient(chi, tol)))))
        history.append([J, err])
        if err < fejer_safety * p.eta:
            break
        if 2 * J > p.max_J:
            raise FejerBudget("Fejer approximation not within eta at the largest J",
                              J=J, error=err, eta=p.eta)
        J *= 2

    times = np.linspace(0.0, 1.0, p.n_t)
    result = PushResult(p, J, a, times, 0)
    D = result.degree
    result.n_verify = _pow2_at_least(max(4 * (D + 1), 4 * p.n_s))
    result.report = _push_report(result, tol)
    result.report.update({
        "J": J, "fejer_history": history, "fejer_error": err, "delta0": p.delta0,
        "eta": p.eta, "alpha_min": float(alpha.min()), "alpha_max": float(alpha.max()),
        "section_twist": twist, "theodorsen_iterations": int(iterations),
        "level_radius_min": float(R.min()), "level_radius_max": float(R.max()),
        "level_error": level_err, "psi_sigma_defect": sigma_defect, "psi_spectral_tail": tail,
        "newton_residual": float(newton_res), "n_s": p.n_s, "n_sigma": p.n_sigma,
        "n_t": p.n_t, "degree": D,
    })
    return result


def _push_report(result, tol):
    p = result.problem
    n = result.n_verify
    theta = 2 * np.pi * np.arange(n) / n
    alpha = p.alpha_values(theta)
    eta = p.eta
    radii = sorted({float(r) for r in p.radii if r > 0} | {1.0})
    kap = {r: p.kappa_disc(r * np.exp(1j * theta)) for r in radii}
    u_k = exhaustion(kap[1.0])
    centre = p.kappa_disc(0.0)
    cut_min = np.inf
    iv = np.inf
    ii = 0.0
    i_err = 0.0
    for t in result.times:
        for r in radii:
            w = result.ambient_values(t, r)
            m = cut_margin(w)
            cut_min = min(cut_min, float(m.min()))
            if np.any(m <= tol.cut):
                raise BranchCut("deformation leaves the retraction domain", t=float(t), radius=r)
            lam = retract_ambient(w, tol)
            if t == 0.0:
                i_err = max(i_err, float(np.max(np.linalg.norm(lam - kap[r], axis=-1))))
            if r == 1.0:
                d = exhaustion(lam) - u_k
                iv = min(iv, float(np.min(d + eta)), float(np.min(alpha + eta - d)))
                if t == 1.0:
                    iii = min(float(np.min(d - alpha + eta)), float(np.min(alpha + eta - d)))
        c0 = result.ambient_coeffs(t)[0]
        ii = max(ii, float(np.linalg.norm(retract_ambient(c0, tol) - centre)))
    ex = result.exponents()
    support_ok = bool(np.all(ex >= 1))
    return {
        "check_i": i_err, "check_i_ok": i_err <= 1e-10,
        "check_ii": ii, "check_ii_ok": ii <= 1e-10,
        "check_iii_margin": iii, "check_iii_ok": iii > 0,
        "check_iv_margin": iv, "check_iv_ok": iv > 0,
        "cut_margin_min": cut_min, "support_ok": support_ok,
        "n_verify": n, "radii": [float(r) for r in radii],
        "passed": bool(i_err <= 1e-10 and ii <= 1e-10 and iii > 0 and iv > 0 and support_ok),
    }


# -- sample problems ---------------------------------------------------------

def isotropic_direction(z0, phase=0):
    """Unit v with z0 . v = 0 and v . v = 0; z0 + c s v then lies on M for every s."""
    _, _, vh = np.linalg.svd(np.asarray(z0, dtype=complex)[None, :])
    a, b = vh[1].conj(), vh[2].conj()
    lam = np.roots([b @ b, 2 * (a @ b), a @ a])[phase]
    v = a + lam * b
    return v / np.linalg.norm(v)


def line_problem(rng, scale=0.15):
    """Seeded push problem on an isotropic line disc through a random point of M'.

    The disc is z0 + c s v with c = scale kappa(z0) / u(z0); the region is
    a = 1 + (u_min - 1) / 2 below and b = u_max + 1 above the boundary.
    """
    z0 = retract_ambient(rng.normal(size=3) + 1j * rng.uniform(0.4, 1.2) * rng.normal(size=3))
    v = isotropic_direction(z0)
    c = scale * kappa(z0) / exhaustion(z0)
    disc = AnalyticDisc(np.array([z0, c * rng.choice([1, 1j]) * v]))
    u = exhaustion(disc(np.exp(2j * np.pi * np.arange(256) / 256)))
    a, b = 1 + 0.5 * (u.min() - 1), u.max() + 1
    return PushProblem(disc, Region(float(a), float(b), float(0.5 * (a + b))))


def constant_problem():
    """The constant disc at (sqrt 2, i, 0) in M(2, 4)."""
    z = np.array([np.sqrt(2), 1j, 0])
    return PushProblem(AnalyticDisc.constant(z), Region(2.0, 4.0, 3.0))
