"""Geometry of the complex quadric M = {z in C^3 : z1^2 + z2^2 + z3^2 = 1}.

Points are numpy arrays whose last axis has length 3 (length 2 for points of
the double cover C^2 minus 0).  Every function broadcasts over leading axes.

The real sphere K = M cap R^3 is the compact set removed from M; its
complement M' is diffeomorphic to (C^2 minus 0)/{+-1} through
:func:`cover_push`.
"""
from dataclasses import dataclass

import numpy as np

from .config import DEFAULT
from .errors import BranchCut, CriticalPoint, TrackingLoss, ZeroPoint


def quadric_defect(z):
    """|sum z_j^2 - 1| for each point."""
    z = np.asarray(z, dtype=complex)
    return np.abs(np.sum(z * z, axis=-1) - 1.0)


def exhaustion(z):
    """u(z) = |z|^2."""
    z = np.asarray(z, dtype=complex)
    return np.sum(np.abs(z) ** 2, axis=-1)


def kappa(z):
    """Distance proxy to K: the euclidean norm of Im z."""
    z = np.asarray(z, dtype=complex)
    return np.linalg.norm(z.imag, axis=-1)


def cut_margin(w):
    """How far g(w) = sum w_j^2 is from the closed negative real axis.

    Positive real part gives |g| (distance to the origin); otherwise the
    distance is |Im g|.
    """
    g = np.sum(np.asarray(w, dtype=complex) ** 2, axis=-1)
    return np.where(g.real > 0, np.abs(g), np.abs(g.imag))


def retract_ambient(w, tol=DEFAULT):
    """Holomorphic retraction rho(w) = w / sqrt(sum w_j^2), principal branch.

    Raises BranchCut when g(w) lies within ``tol.cut`` of (-inf, 0].
    """
    w = np.asarray(w, dtype=complex)
    g = np.sum(w * w, axis=-1)
    bad = cut_margin(w) <= tol.cut
    if np.any(bad):
        idx = np.argwhere(np.atleast_1d(bad))[0].tolist()
        raise BranchCut("retraction undefined: sum w^2 on the branch cut",
                        index=idx, g=complex(np.atleast_1d(g)[tuple(idx)]))
    return w / np.sqrt(g)[..., None]


def retract_derivative(w, h):
    """Complex derivative of the retraction at w applied to h."""
    w = np.asarray(w, dtype=complex)
    h = np.asarray(h, dtype=complex)
    g = np.sum(w * w, axis=-1)[..., None]
    gh = np.sum(w * h, axis=-1)[..., None]
    sg = np.sqrt(g)
    return h / sg - w * gh / (g * sg)


@dataclass(frozen=True)
class Region:
    """Levels a < c < b of the exhaustion u = |z|^2 with a > 1."""
    a: float
    b: float
    c: float

    def __post_init__(self):
        if not (self.a < self.c < self.b):
            raise ValueError("region levels must satisfy a < c < b")
        if self.a <= 1.0:
            raise ValueError("region level a must exceed 1 so that K lies in M(a)")


@dataclass(frozen=True)
class Classification:
    u: float
    kappa: float
    in_K: bool
    in_M_prime: bool
    in_M_a: bool
    in_M_ab: bool
    in_M_closed_ab: bool


def classify(z, region=None, tol=DEFAULT):
    z = np.asarray(z, dtype=complex)
    u = float(exhaustion(z))
    k = float(kappa(z))
    in_K = k <= tol.real_locus
    if region is None:
        flags = (False, False, False)
    else:
        flags = (u < region.a, region.a < u < region.b, region.a <= u <= region.b)
    return Classification(u, k, in_K, not in_K, *flags)


def bilinear(v, w):
    """Complex bilinear pairing sum v_j w_j (no conjugation)."""
    return np.sum(np.asarray(v) * np.asarray(w), axis=-1)


def project_tangent(z, v):
    """Holomorphic projection of an ambient vector onto T_z M: v - (z.v) z.

    Divided by z.z so the result is exactly orthogonal to z even for points a
    rounding error off the quadric.
    """
    z = np.asarray(z, dtype=complex)
    v = np.asarray(v, dtype=complex)
    return v - (bilinear(z, v) / bilinear(z, z))[..., None] * z


def e_basis(z, tol=DEFAULT):
    """Unit vector spanning E_z = {v : z.v = 0, conj(z).v = 0}.

    E_z is spanned by z x conj(z) = -2i Re z x Im z.  After normalising, the
    phase is fixed by making the largest-modulus component (lowest index on
    ties) real and positive, so the result is a real unit vector.
    """
    z = np.asarray(z, dtype=complex)
    if np.any(kappa(z) <= tol.real_locus):
        raise CriticalPoint("du vanishes on T_z M: point lies on the real sphere",
                            kappa=float(np.min(kappa(z))))
    v = np.cross(z.real, z.imag).astype(complex)
    v /= np.linalg.norm(v, axis=-1, keepdims=True)
    mod = np.abs(v)
    # argmax returns the first maximal index; tiny tolerance keeps ties stable
    pivot = np.argmax(mod >= mod.max(axis=-1, keepdims=True) - 1e-14, axis=-1)
    ref = np.take_along_axis(v, pivot[..., None], axis=-1)
    return v * (np.abs(ref) / ref)


def omega_eval(z, v, w):
    """The holomorphic 2-form z1 dz2^dz3 - z2 dz1^dz3 + z3 dz1^dz2 at z on (v, w).

    Equal to the determinant with rows z, v, w.
    """
    z = np.asarray(z, dtype=complex)
    return bilinear(z, np.cross(np.asarray(v, dtype=complex), np.asarray(w, dtype=complex)))


# -- double cover of M' ------------------------------------------------------

def null_cone_map(w):
    """w -> (i(w1^2+w2^2), w1^2-w2^2, 2 w1 w2), onto the null quadric W0."""
    w = np.asarray(w, dtype=complex)
    w1, w2 = w[..., 0], w[..., 1]
    return np.stack([1j * (w1 * w1 + w2 * w2), w1 * w1 - w2 * w2, 2 * w1 * w2], axis=-1)


def _null_to_quadric(z0):
    x, y = z0.real, z0.imag
    q = np.sum(x * x, axis=-1, keepdims=True)
    return np.sqrt(1.0 + 1.0 / q) * x + 1j * y


def cover_push(w, tol=DEFAULT):
    """Map a point of C^2 minus 0 to M' (even in w)."""
    w = np.asarray(w, dtype=complex)
    if np.any(np.linalg.norm(w, axis=-1) < tol.zero):
        raise ZeroPoint("cover point too close to the origin")
    return _null_to_quadric(null_cone_map(w))


def cover_push_jet(w, *tangents):
    """cover_push(w) together with its real differential applied to each tangent."""
    w = np.asarray(w, dtype=complex)
    w1, w2 = w[..., 0], w[..., 1]
    z0 = null_cone_map(w)
    x, y = z0.real, z0.imag
    q = np.sum(x * x, axis=-1, keepdims=True)
    alpha = np.sqrt(1.0 + 1.0 / q)
    z = alpha * x + 1j * y
    out = [z]
    for h in tangents:
        h = np.asarray(h, dtype=complex)
        h1, h2 = h[..., 0], h[..., 1]
        dz0 = np.stack([2j * (w1 * h1 + w2 * h2),
                        2 * (w1 * h1 - w2 * h2),
                        2 * (w1 * h2 + w2 * h1)], axis=-1)
        dx, dy = dz0.real, dz0.imag
        dalpha = -np.sum(x * dx, axis=-1, keepdims=True) / (alpha * q * q)
        out.append(alpha * dx + dalpha * x + 1j * dy)
    return out


def cover_preimage(z):
    """One of the two preimages +-w of a point of M' under cover_push."""
    z = np.asarray(z, dtype=complex)
    y = z.imag
    re = z.real
    scale = np.linalg.norm(y, axis=-1, keepdims=True) / np.linalg.norm(re, axis=-1, keepdims=True)
    z0 = scale * re + 1j * y
    a = (-1j * z0[..., 0] + z0[..., 1]) / 2      # w1^2
    b = (-1j * z0[..., 0] - z0[..., 1]) / 2      # w2^2
    use_a = np.abs(a) >= np.abs(b)
    w1 = np.where(use_a, np.sqrt(a), 0)
    w2 = np.where(use_a, 0, np.sqrt(b))
    with np.errstate(divide="ignore", invalid="ignore"):
        w2 = np.where(use_a, z0[..., 2] / (2 * w1), w2)
        w1 = np.where(use_a, w1, z0[..., 2] / (2 * w2))
    return np.stack([w1, w2], axis=-1)


@dataclass
class CoverLift:
    path: np.ndarray       # (n, 2) lifted samples, periodic grid
    closed: bool
    endpoint: np.ndarray   # lift of the first sample after one full turn
    min_norm: float


def cover_lift(samples, tol=DEFAULT):
    """Branch-tracked lift of a sampled closed loop in M' to C^2 minus 0.

    ``samples`` is an (n, 3) array on a uniform periodic grid.  Each step picks
    the preimage nearest to the previous lift; the step must stay below half
    the distance between the two candidate preimages, else TrackingLoss.
    """
    samples = np.asarray(samples, dtype=complex)
    if np.any(kappa(samples) <= tol.real_locus):
        raise CriticalPoint("loop meets the real sphere; no cover lift", kappa=float(kappa(samples).min()))
    pre = cover_preimage(samples)
    nxt = np.roll(pre, -1, axis=0)
    # nearest-preimage tracking: |a - b|^2 - |a + b|^2 = -4 Re <a, b>
    inner = np.real(np.sum(np.conj(pre) * nxt, axis=-1))
    step = np.sqrt(np.maximum(np.sum(np.abs(pre) ** 2 + np.abs(nxt) ** 2, axis=-1) - 2 * np.abs(inner), 0.0))
    bound = np.linalg.norm(nxt, axis=-1)
    bad = step >= bound                   # half of the separation 2|w|
    if np.any(bad):
        j = int(np.argmax(bad)) + 1
        raise TrackingLoss("loop samples too far apart to follow the double cover",
                           index=j, step=float(step[j - 1]), bound=float(bound[j - 1]))
    signs = np.cumprod(np.where(inner < 0, -1.0, 1.0))
    path = pre.copy()
    path[1:] *= signs[:-1, None]
    endpoint = pre[0] * signs[-1]
    closed = bool(signs[-1] > 0)
    return CoverLift(path, closed, endpoint, float(np.linalg.norm(path, axis=-1).min()))
