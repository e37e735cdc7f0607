"""Directional boundary distances, greedy minimal bases, and disc-hull checks.

The central quantities:

* ``directional_distance(D, z, X)`` -- radius of the largest complex disc
  centered at z in direction X that fits inside D.
* ``boundary_distance(D, z)`` -- Euclidean distance to the boundary with a
  nearest boundary point.
* ``minimal_basis(D, z)`` -- the greedy orthonormal frame: nearest boundary
  direction first, then nearest boundary of the slice through z orthogonal
  to it, and so on.  Slice membership is evaluated functionally through an
  isometric embedding of the subspace; no per-variant slice algebra.

Everything reduces to first-exit times along rays.  A ray inside a slice is
a ray in the ambient domain, so one vectorized per-variant ray solver backs
all searches: exact quadratics for balls and polydiscs, a safeguarded
vectorized Newton for diamonds and ellipsoids, recursion for products and
linear images, and membership bisection as the generic fallback.  Searches
only ever overestimate a distance (they return exact exits along sampled
directions), and every boundary distance is certified by probing a slightly
shrunken ball.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .domains import (Ball, ComplexEllipsoid, Domain, KoebeSlitPlane, LinearImage,
                      Polydisc, Product, WeightedDiamond, require_inside)
from .errors import NumericalFailure, PreconditionViolated
from .linalg import as_vector, complete_to_unitary, complex_sphere, unitary_defect

PHASE_GRID = 256          # bracketing angles for directional-distance searches
ANGLE_GRID_1D = 1024      # boundary-direction scan for 1-D (sub)domains
SPHERE_GRID = 2048        # coarse direction mesh for k >= 2 searches
N_STARTS = 48             # polished multi-starts kept from the coarse mesh
BISECT_ITERS = 60
CERT_DIRECTIONS = 1000


# ---------------------------------------------------------------------------
# functional slice of a domain through a point along an orthonormal embedding


@dataclass(frozen=True, eq=False)
class SliceDomain:
    """w in C^k belongs iff origin + embed @ w is in the ambient domain."""

    ambient: Domain
    origin: np.ndarray   # (n,)
    embed: np.ndarray    # (n, k), orthonormal columns

    @property
    def dim(self) -> int:
        return self.embed.shape[1]

    @property
    def is_convex(self) -> bool:
        return self.ambient.is_convex

    def contains_batch(self, w: np.ndarray) -> np.ndarray:
        return self.ambient.contains_batch(self.origin + w @ self.embed.T)

    def enclosing_radius(self, w) -> float:
        # the embedding is isometric, so the ambient radius bounds slice exits
        w = as_vector(w, dim=self.dim)
        return self.ambient.enclosing_radius(self.origin + self.embed @ w)


# ---------------------------------------------------------------------------
# vectorized first-exit times along rays


def _positive_quadratic_root(a, b, c):
    """Smallest t > 0 with a t^2 + 2 b t + c = 0, given c < 0 (inside).

    With c < 0 each quadratic has exactly one positive root; a == 0 rows
    degenerate to the linear crossing, and rows with a == b == 0 never exit.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    c = np.asarray(c, dtype=float)
    disc = np.sqrt(np.maximum(b * b - a * c, 0.0))
    with np.errstate(divide="ignore", invalid="ignore"):
        # stable form of the positive root for either sign of b; a == 0
        # forces b == 0 here (a zero coordinate never moves), hence inf
        t = np.where(a > 0.0, c / (-b - disc), np.inf)
    return t


def _bisect_newton_root(f, fp, t_hi, bisect_iters: int = 30, newton_iters: int = 5):
    """Vectorized root of an increasing crossing f on (0, t_hi], f(0) < 0."""
    m = t_hi.shape[0]
    lo = np.zeros(m)
    hi = t_hi.copy()
    for _ in range(bisect_iters):
        mid = 0.5 * (lo + hi)
        below = f(mid) < 0.0
        lo = np.where(below, mid, lo)
        hi = np.where(below, hi, mid)
    t = 0.5 * (lo + hi)
    for _ in range(newton_iters):
        val = f(t)
        slope = fp(t)
        step = np.where(slope > 0.0, val / np.where(slope > 0.0, slope, 1.0), 0.0)
        t = np.clip(t - step, lo, hi)
    return t


def _exit_times_membership(member, z: np.ndarray, dirs: np.ndarray, t_hi: float,
                           iters: int = BISECT_ITERS) -> np.ndarray:
    """Bisection on membership: the generic fallback for convex domains."""
    m = dirs.shape[0]
    lo = np.zeros(m)
    hi = np.full(m, t_hi)
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        inside = member(z + mid[:, None] * dirs)
        lo = np.where(inside, mid, lo)
        hi = np.where(inside, hi, mid)
    return 0.5 * (lo + hi)


def ray_exit_times(domain, z: np.ndarray, dirs: np.ndarray) -> np.ndarray:
    """First boundary crossing along z + t * dirs[i], t > 0, for unit rows.

    Exact closed forms where the variant allows, vectorized over the rays;
    entries are inf when the ray never leaves the domain.
    """
    if isinstance(domain, SliceDomain):
        return ray_exit_times(domain.ambient, domain.origin + domain.embed @ z,
                              dirs @ domain.embed.T)

    if isinstance(domain, Ball):
        w = z - domain.center
        a = np.sum(np.abs(dirs) ** 2, axis=1)
        b = np.real(dirs @ np.conj(w))
        c = float(np.vdot(w, w).real) - domain.radius ** 2
        return _positive_quadratic_root(a, b, np.full(dirs.shape[0], c))

    if isinstance(domain, Polydisc):
        w = z - domain.center
        a = np.abs(dirs) ** 2
        b = np.real(dirs * np.conj(w))
        c = np.abs(w) ** 2 - domain.radii ** 2
        t = _positive_quadratic_root(a, b, np.broadcast_to(c, a.shape))
        return np.min(t, axis=1)

    if isinstance(domain, WeightedDiamond):
        r = domain.radii

        def f(t):
            return np.sum(np.abs(z + t[:, None] * dirs) / r, axis=1) - 1.0

        def fp(t):
            pts = z + t[:, None] * dirs
            mags = np.abs(pts)
            safe = np.where(mags > 0, mags, 1.0)
            return np.sum(np.real(np.conj(pts) * dirs) / (safe * r), axis=1)

        t_hi = np.full(dirs.shape[0], domain.enclosing_radius(z) * (1 + 1e-9) + 1e-12)
        return _bisect_newton_root(f, fp, t_hi)

    if isinstance(domain, ComplexEllipsoid):
        m_exp = np.asarray(domain.exponents, dtype=float)

        def f(t):
            return np.sum(np.abs(z + t[:, None] * dirs) ** (2 * m_exp), axis=1) - 1.0

        def fp(t):
            pts = z + t[:, None] * dirs
            mags = np.abs(pts)
            safe = np.where(mags > 0, mags, 1.0)
            return np.sum(2 * m_exp * safe ** (2 * m_exp - 2)
                          * np.real(np.conj(pts) * dirs), axis=1)

        t_hi = np.full(dirs.shape[0], domain.enclosing_radius(z) * (1 + 1e-9) + 1e-12)
        return _bisect_newton_root(f, fp, t_hi)

    if isinstance(domain, KoebeSlitPlane):
        u = dirs[:, 0]
        zz = complex(z[0])
        t = np.full(dirs.shape[0], np.inf)
        # rays crossing the real axis can hit the slit exactly once
        crossing = np.abs(u.imag) > 0
        with np.errstate(divide="ignore", invalid="ignore"):
            t_axis = np.where(crossing, -zz.imag / u.imag, np.inf)
        hit = crossing & (t_axis > 0) & (zz.real + t_axis * u.real >= 0.25)
        t[hit] = t_axis[hit]
        if abs(zz.imag) == 0.0:
            # the base point is on the real axis left of the slit
            along = (np.abs(u.imag) == 0.0) & (u.real > 0)
            t[along] = (0.25 - zz.real) / u.real[along]
        return t

    if isinstance(domain, Product):
        out = np.full(dirs.shape[0], np.inf)
        off = 0
        for fdom in domain.factors:
            k = fdom.dim
            sub = dirs[:, off:off + k]
            norms = np.linalg.norm(sub, axis=1)
            active = norms > 0
            if np.any(active):
                unit = sub[active] / norms[active][:, None]
                t_f = ray_exit_times(fdom, z[off:off + k], unit) / norms[active]
                out[active] = np.minimum(out[active], t_f)
            off += k
        return out

    if isinstance(domain, LinearImage):
        w = domain.pullback(z)
        v = dirs @ domain._inv.T
        norms = np.linalg.norm(v, axis=1)
        unit = v / norms[:, None]
        return ray_exit_times(domain.base, w, unit) / norms

    # generic fallback: membership bisection (convex domains only)
    if not getattr(domain, "is_convex", False):
        raise NumericalFailure("no ray solver for a non-convex domain without closed form")
    t_hi = domain.enclosing_radius(z) * (1.0 + 1e-9) + 1e-12
    return _exit_times_membership(domain.contains_batch, z, dirs, t_hi)


_DIRECTION_CACHE: dict[tuple[int, int], np.ndarray] = {}


def _directions(k: int, count: int) -> np.ndarray:
    """Deterministic cached unit directions in C^k (rows)."""
    key = (k, count)
    if key not in _DIRECTION_CACHE:
        if k == 1:
            theta = np.arange(count) * (2.0 * np.pi / count)
            _DIRECTION_CACHE[key] = np.exp(1j * theta).reshape(-1, 1)
        else:
            _DIRECTION_CACHE[key] = complex_sphere(k, count)
    return _DIRECTION_CACHE[key]


def _zoom_min(exit_of_angles, theta0: float, width: float,
              rounds: int = 14, pts: int = 17) -> tuple[float, float]:
    """Shrinking-grid minimum of a periodic angle -> exit-time profile.

    Each round evaluates a batched grid and zooms on the best node, so the
    bracket shrinks by (pts-1)/2 per round.
    """
    lo, hi = theta0 - width, theta0 + width
    best_theta, best_val = theta0, math.inf
    for _ in range(rounds):
        thetas = np.linspace(lo, hi, pts)
        vals = exit_of_angles(thetas)
        j = int(np.argmin(vals))
        if vals[j] < best_val:
            best_val, best_theta = float(vals[j]), float(thetas[j])
        step = (hi - lo) / (pts - 1)
        lo, hi = thetas[j] - step, thetas[j] + step
    return best_theta, best_val


# ---------------------------------------------------------------------------
# directional distance


@dataclass(frozen=True)
class DirectionalDistance:
    """Largest safe disc radius in a complex direction, with the touching phase."""

    value: float                      # in (0, inf]
    contact_phase: complex | None    # unit lambda-phase where the boundary is met

    def __float__(self) -> float:
        return self.value


def _ball_directional(dom: Ball, z, x) -> DirectionalDistance:
    w = z - dom.center
    a = float(np.vdot(x, x).real)
    ip = complex(np.sum(x * np.conj(w)))  # <X, w>
    b = abs(ip)
    c = float(np.vdot(w, w).real) - dom.radius ** 2
    d = (-b + math.sqrt(b * b - a * c)) / a
    phase = complex(np.exp(-1j * np.angle(ip))) if b > 0 else 1.0 + 0j
    return DirectionalDistance(d, phase)


def _polydisc_directional(dom: Polydisc, z, x) -> DirectionalDistance:
    w = z - dom.center
    with np.errstate(divide="ignore"):
        t = np.where(np.abs(x) > 0, (dom.radii - np.abs(w)) / np.abs(x), np.inf)
    j = int(np.argmin(t))
    if not np.isfinite(t[j]):
        return DirectionalDistance(math.inf, None)
    if abs(w[j]) > 0:
        phase = complex(np.exp(1j * (np.angle(w[j]) - np.angle(x[j]))))
    else:
        phase = 1.0 + 0j
    return DirectionalDistance(float(t[j]), phase)


def _koebe_directional(dom: KoebeSlitPlane, z, x) -> DirectionalDistance:
    zz = complex(z[0])
    dist = float(dom.slit_distance_batch(np.array([[zz]]))[0])
    nearest = complex(zz.real, 0.0) if zz.real >= 0.25 else 0.25 + 0j
    lam = (nearest - zz) / complex(x[0])
    phase = lam / abs(lam)
    return DirectionalDistance(dist / abs(complex(x[0])), complex(phase))


def _scan_directional(domain, z: np.ndarray, x: np.ndarray,
                      n_phase: int = PHASE_GRID) -> DirectionalDistance:
    """Phase grid plus zoom for a convex lambda-slice (the generic path).

    The slice {lam : z + lam X inside} is convex, so the disc radius is the
    minimum over phases of the exact exit time along each ray.
    """
    norm_x = float(np.linalg.norm(x))
    xu = x / norm_x

    def exits(thetas: np.ndarray) -> np.ndarray:
        dirs = np.exp(1j * thetas)[:, None] * xu[None, :]
        return ray_exit_times(domain, z, dirs)

    grid = np.arange(n_phase) * (2.0 * np.pi / n_phase)
    vals = exits(grid)
    j = int(np.argmin(vals))
    theta, t = _zoom_min(exits, float(grid[j]), 2.0 * np.pi / n_phase)
    if vals[j] < t:
        theta, t = float(grid[j]), float(vals[j])
    return DirectionalDistance(t / norm_x, complex(np.exp(1j * theta)))


def _circle_directional(member, z: np.ndarray, x: np.ndarray, t_hi: float,
                        n_phase: int = PHASE_GRID) -> DirectionalDistance:
    """Fallback for non-convex membership: bisect on the disc radius r,
    testing the whole circle |lam| = r at sampled angles.

    Valid for C-convex domains because the lambda-slice is simply connected,
    so a circle inside implies its disc inside.
    """
    phases = np.exp(1j * np.arange(n_phase) * (2.0 * np.pi / n_phase))
    norm_x = float(np.linalg.norm(x))
    dirs = phases[:, None] * x[None, :] / norm_x

    def circle_inside(r: float) -> bool:
        return bool(np.all(member(z + r * dirs)))

    lo, hi = 0.0, t_hi
    for _ in range(BISECT_ITERS):
        mid = 0.5 * (lo + hi)
        if circle_inside(mid):
            lo = mid
        else:
            hi = mid
    probe = member(z + hi * dirs)
    j = int(np.argmin(probe)) if not np.all(probe) else 0
    return DirectionalDistance(lo / norm_x, complex(phases[j]))


def directional_distance(domain, z, x) -> DirectionalDistance:
    """Distance from z to the boundary in the complex direction X.

    This is sup{r > 0 : z + lam*X in D whenever |lam| < r}; the returned
    ``contact_phase`` is the unit lambda where the boundary is attained.
    """
    z = require_inside(domain, z)
    x = as_vector(x, dim=domain.dim)
    if np.linalg.norm(x) == 0.0:
        raise ValueError("direction X must be nonzero")

    if isinstance(domain, Ball):
        return _ball_directional(domain, z, x)
    if isinstance(domain, Polydisc):
        return _polydisc_directional(domain, z, x)
    if isinstance(domain, KoebeSlitPlane):
        return _koebe_directional(domain, z, x)
    if isinstance(domain, Product):
        best = DirectionalDistance(math.inf, None)
        off = 0
        for f in domain.factors:
            k = f.dim
            xb = x[off:off + k]
            if np.linalg.norm(xb) > 0:
                cand = directional_distance(f, z[off:off + k], xb)
                if cand.value < best.value:
                    best = cand
            off += k
        return best
    if isinstance(domain, LinearImage):
        return directional_distance(domain.base, domain.pullback(z),
                                    np.linalg.solve(domain.map, x))

    if getattr(domain, "is_convex", False):
        return _scan_directional(domain, z, x)
    t_hi = domain.enclosing_radius(z) * (1.0 + 1e-9) + 1e-12
    return _circle_directional(domain.contains_batch, z, x, t_hi)


def slice_directional_distance(sl: SliceDomain, w, u) -> DirectionalDistance:
    """Directional distance inside a functional slice (always convex here)."""
    w = as_vector(w, dim=sl.dim)
    u = as_vector(u, dim=sl.dim)
    return _scan_directional(sl, w, u)


# ---------------------------------------------------------------------------
# boundary distance


def _certify_ball_inside(member, z: np.ndarray, d: float, k: int) -> bool:
    """Probe that the ball of radius just under d around z stays inside."""
    slack = max(d * 1e-6, 3e-12)
    r = d - slack
    if r <= 0:
        return True
    dirs = _directions(k, CERT_DIRECTIONS)
    return bool(np.all(member(z + r * dirs)))


def _search_nearest_boundary(domain, z: np.ndarray, k: int
                             ) -> tuple[float, np.ndarray]:
    """Min over unit directions of the ray exit time, for convex domains.

    Returns (distance, offset of a nearest boundary point from z).
    Deterministic: a fixed quasi-random coarse mesh followed by a batched
    pattern search on the direction sphere.
    """
    if k == 1:
        def exits(thetas: np.ndarray) -> np.ndarray:
            return ray_exit_times(domain, z, np.exp(1j * thetas)[:, None])

        grid = np.arange(ANGLE_GRID_1D) * (2.0 * np.pi / ANGLE_GRID_1D)
        vals = exits(grid)
        j = int(np.argmin(vals))
        theta, t = _zoom_min(exits, float(grid[j]), 2.0 * np.pi / ANGLE_GRID_1D)
        if vals[j] < t:
            theta, t = float(grid[j]), float(vals[j])
        u = np.exp(1j * theta) * np.ones(1)
        return t, t * u

    coarse = _directions(k, SPHERE_GRID)
    exits = ray_exit_times(domain, z, coarse)
    order = np.argsort(exits, kind="stable")

    # keep the best starts but force angular diversity (as real 2k-vectors)
    # so several basins of the direction sphere get polished
    coarse_r = np.concatenate([coarse.real, coarse.imag], axis=1)
    starts: list[int] = []
    for idx in order:
        cand = coarse_r[idx]
        if all(float(coarse_r[s] @ cand) < 0.995 for s in starts):
            starts.append(int(idx))
        if len(starts) >= N_STARTS:
            break
    P = coarse[starts].copy()               # (s, k) complex unit rows
    t_cur = exits[starts].copy()

    h = 0.25
    dim_r = 2 * k
    axes = np.eye(dim_r)
    rounds = 0
    # the step floor governs accuracy at nonsmooth (edge/corner) minima,
    # where convergence is linear in h rather than quadratic
    while h >= 1e-9 and rounds < 600:
        rounds += 1
        s = P.shape[0]
        pr = np.concatenate([P.real, P.imag], axis=1)  # (s, 2k)
        cand = np.concatenate([pr[:, None, :] + h * axes[None, :, :],
                               pr[:, None, :] - h * axes[None, :, :]], axis=1)
        cand = cand.reshape(s * 2 * dim_r, dim_r)
        cand /= np.linalg.norm(cand, axis=1)[:, None]
        cu = cand[:, :k] + 1j * cand[:, k:]
        ct = ray_exit_times(domain, z, cu).reshape(s, 2 * dim_r)
        best = np.argmin(ct, axis=1)
        ct_best = ct[np.arange(s), best]
        prev = t_cur.copy()
        improved = ct_best < t_cur
        if np.any(improved):
            rows = np.arange(s)[improved]
            P[rows] = cu.reshape(s, 2 * dim_r, k)[rows, best[improved]]
            t_cur[rows] = ct_best[improved]
        # shrink the step unless some start improved by a step-sized amount,
        # so float-noise creep cannot stall the schedule
        thresh = 1e-3 * h * h * np.maximum(prev, 1e-12)
        if not np.any(prev - t_cur > thresh):
            h *= 0.5
        # prune to the promising starts as the step shrinks
        if h < 3e-2 and P.shape[0] > 8:
            keep = np.argsort(t_cur, kind="stable")[:8]
            P, t_cur = P[keep], t_cur[keep]
        if h < 1e-4 and P.shape[0] > 2:
            keep = np.argsort(t_cur, kind="stable")[:2]
            P, t_cur = P[keep], t_cur[keep]
    j = int(np.argmin(t_cur))
    return float(t_cur[j]), t_cur[j] * P[j]


def _diamond_nearest(dom: WeightedDiamond, z: np.ndarray) -> tuple[float, np.ndarray]:
    # Nearest boundary point has moduli obtained by projecting the modulus
    # vector onto the hyperplane sum s_j/r_j = 1 (feasible because the
    # multiplier is positive for interior points), phases aligned with z.
    r = dom.radii
    x = np.abs(z)
    mu = (1.0 - float(np.sum(x / r))) / float(np.sum(1.0 / r ** 2))
    s = x + mu / r
    phases = np.where(x > 0, z / np.where(x > 0, x, 1.0), 1.0 + 0j)
    a = s * phases
    return float(np.linalg.norm(s - x)), a


def _ellipsoid_nearest(dom: ComplexEllipsoid, z: np.ndarray
                       ) -> tuple[float, np.ndarray] | None:
    """Stationarity system in modulus space, solved by a 1-D multiplier search.

    Returns None when the increasing branch folds before reaching the
    boundary (then the generic direction search takes over).
    """
    m = np.asarray(dom.exponents, dtype=float)
    x = np.abs(z)

    def s_of_nu(nu: float) -> np.ndarray | None:
        s = np.empty_like(x)
        for j, (mj, xj) in enumerate(zip(m, x)):
            if mj == 1.0:
                if nu >= 1.0:
                    return None
                s[j] = xj / (1.0 - nu)
                continue
            if xj == 0.0:
                s[j] = 0.0
                continue
            # increasing-branch root of  s - nu*m*s^(2m-1) = x
            crit = (nu * mj * (2 * mj - 1)) ** (-1.0 / (2 * mj - 2)) if nu > 0 else np.inf
            lo_s, hi_s = xj, min(crit, 2.0)
            if hi_s - nu * mj * hi_s ** (2 * mj - 1) - xj < 0:
                return None
            for _ in range(80):
                mid = 0.5 * (lo_s + hi_s)
                if mid - nu * mj * mid ** (2 * mj - 1) - xj < 0:
                    lo_s = mid
                else:
                    hi_s = mid
            s[j] = 0.5 * (lo_s + hi_s)
        return s

    def surplus(nu: float) -> float | None:
        s = s_of_nu(nu)
        if s is None:
            return None
        return float(np.sum(s ** (2 * m))) - 1.0

    # bracket the multiplier; a folded/invalid branch counts as "too far"
    lo, hi = 0.0, 1e-6
    while True:
        f_hi = surplus(hi)
        if f_hi is None or f_hi >= 0.0:
            break
        lo, hi = hi, hi * 2.0
        if hi > 1e9:
            return None
    for _ in range(100):
        mid = 0.5 * (lo + hi)
        f_mid = surplus(mid)
        if f_mid is None or f_mid > 0.0:
            hi = mid
        else:
            lo = mid
    s = s_of_nu(hi)
    if s is None:
        s = s_of_nu(lo)
    if s is None:
        return None
    if abs(float(np.sum(s ** (2 * m))) - 1.0) > 1e-9:
        return None
    phases = np.where(x > 0, z / np.where(x > 0, x, 1.0), 1.0 + 0j)
    return float(np.linalg.norm(s - x)), s * phases


def boundary_distance(domain, z) -> tuple[float, np.ndarray]:
    """Euclidean distance from z to the boundary and a nearest boundary point."""
    z = require_inside(domain, z)

    if isinstance(domain, Ball):
        w = z - domain.center
        nw = float(np.linalg.norm(w))
        if nw == 0.0:
            u = np.zeros(domain.dim, dtype=np.complex128)
            u[0] = 1.0
        else:
            u = w / nw
        return domain.radius - nw, domain.center + domain.radius * u
    if isinstance(domain, Polydisc):
        w = z - domain.center
        t = domain.radii - np.abs(w)
        j = int(np.argmin(t))
        a = z.copy()
        phase = w[j] / abs(w[j]) if abs(w[j]) > 0 else 1.0 + 0j
        a[j] = domain.center[j] + domain.radii[j] * phase
        return float(t[j]), a
    if isinstance(domain, WeightedDiamond):
        return _diamond_nearest(domain, z)
    if isinstance(domain, KoebeSlitPlane):
        zz = complex(z[0])
        d = float(domain.slit_distance_batch(z.reshape(1, 1))[0])
        a = complex(zz.real, 0.0) if zz.real >= 0.25 else 0.25 + 0j
        return d, np.array([a])
    if isinstance(domain, Product):
        best_d, best_i, best_a, best_off = math.inf, 0, None, 0
        off = 0
        for i, f in enumerate(domain.factors):
            k = f.dim
            d, a = boundary_distance(f, z[off:off + k])
            if d < best_d:
                best_d, best_i, best_a, best_off = d, i, a, off
            off += k
        a_full = z.copy()
        a_full[best_off:best_off + domain.factors[best_i].dim] = best_a
        return best_d, a_full
    if isinstance(domain, LinearImage) and domain.dim == 1:
        scale = abs(complex(domain.map[0, 0]))
        d, a = boundary_distance(domain.base, domain.pullback(z))
        return scale * d, domain.map @ a + domain.shift
    if isinstance(domain, ComplexEllipsoid):
        res = _ellipsoid_nearest(domain, z)
        if res is not None:
            d, a = res
            if _certify_ball_inside(domain.contains_batch, z, d, domain.dim):
                return d, a
        # fold or failed certificate: fall through to the generic search

    d, offset = _search_nearest_boundary(domain, z, domain.dim)
    if not _certify_ball_inside(domain.contains_batch, z, d, domain.dim):
        raise NumericalFailure("nearest-boundary search failed its ball certificate")
    return d, z + offset


# ---------------------------------------------------------------------------
# minimal basis


@dataclass(frozen=True, eq=False)
class MinimalBasisFrame:
    """Greedy orthonormal frame of nearest-boundary directions at a point.

    ``basis`` holds the directions as columns; ``distances`` are the
    slice-by-slice boundary distances (nondecreasing); ``contacts[j]`` is
    the touching boundary point of the j-th slice; ``p`` is the product of
    the distances.
    """

    base_point: np.ndarray
    basis: np.ndarray        # (n, n) unitary, column j = j-th direction
    distances: np.ndarray    # (n,) nondecreasing positive
    contacts: np.ndarray     # (n, n), row j = contact point a^j
    p: float

    @property
    def dim(self) -> int:
        return self.basis.shape[0]

    def validate(self, tol_unitary: float = 1e-10, tol_contact: float = 1e-8) -> None:
        if unitary_defect(self.basis) >= tol_unitary:
            raise NumericalFailure("frame basis is not unitary to tolerance")
        gaps = np.diff(self.distances)
        scale = float(self.distances[-1])
        if np.any(gaps < -1e-9 * max(scale, 1.0)):
            raise NumericalFailure("frame distances are not nondecreasing")
        for j in range(self.dim):
            err = abs(np.linalg.norm(self.contacts[j] - self.base_point) - self.distances[j])
            if err > tol_contact * max(1.0, self.distances[j]):
                raise NumericalFailure("contact point does not realize its distance")


def minimal_basis(domain, z) -> MinimalBasisFrame:
    """Greedy minimal-basis construction at an interior point.

    Step j finds the nearest boundary point of the current slice of the
    domain through z, records its distance and direction, and recurses on
    the orthogonal complement within the slice.  Ties are broken by the
    deterministic search order, so the frame is reproducible but not
    canonical; the distances and their product are the stable outputs.
    """
    z = require_inside(domain, z)
    n = domain.dim
    cols = []
    dists = np.empty(n)
    contacts = np.empty((n, n), dtype=np.complex128)
    embed = np.eye(n, dtype=np.complex128)

    for j in range(n):
        k = n - j
        if j == 0:
            d, a = boundary_distance(domain, z)
            w_star = a - z
        else:
            sl = SliceDomain(domain, z, embed)
            w0 = np.zeros(k, dtype=np.complex128)
            d, offset = _search_nearest_boundary(sl, w0, k)
            if not _certify_ball_inside(sl.contains_batch, w0, d, k):
                raise NumericalFailure("slice boundary search failed its certificate")
            w_star = offset
            a = z + embed @ offset
        u = w_star / np.linalg.norm(w_star)
        cols.append(embed @ u)
        dists[j] = d
        contacts[j] = a
        if k > 1:
            comp = complete_to_unitary(u)
            embed = embed @ comp[:, 1:]

    basis = np.column_stack(cols)
    frame = MinimalBasisFrame(base_point=z, basis=basis, distances=dists,
                              contacts=contacts, p=float(np.prod(dists)))
    frame.validate()
    return frame


def decompose(x, frame: MinimalBasisFrame) -> np.ndarray:
    """Components of X in the frame: X_j = <X, b_j>; sum X_j b_j == X."""
    x = as_vector(x, dim=frame.dim)
    return frame.basis.conj().T @ x


def comparison_sum(frame: MinimalBasisFrame, x) -> float:
    """sum_j |X_j| / d_j, the anisotropic size of X seen by the frame."""
    comp = decompose(x, frame)
    return float(np.sum(np.abs(comp) / frame.distances))


# ---------------------------------------------------------------------------
# diamond hull inclusion


@dataclass(frozen=True)
class InclusionResult:
    ok: bool
    samples_checked: int
    witness: np.ndarray | None = None


def diamond_inclusion_check(domain, z, radii, samples: int, seed: int,
                            basis: np.ndarray | None = None,
                            shrink: float = 1e-6) -> InclusionResult:
    """Test that the diamond hull of safe discs around z lies in the domain.

    Given orthonormal directions b_j (columns of ``basis``, default the
    coordinate axes) and radii r_j such that the disc of radius r_j in
    direction b_j around z is inside, samples the scaled-open diamond
    { z + sum w_j b_j : sum |w_j|/r_j < 1 - shrink } and asserts membership.
    Fails with a witness point otherwise.
    """
    z = require_inside(domain, z)
    n = domain.dim
    radii = np.asarray(radii, dtype=float)
    if radii.shape != (n,) or np.any(radii <= 0):
        raise ValueError("need one positive radius per dimension")
    if basis is None:
        basis = np.eye(n, dtype=np.complex128)
    for j in range(n):
        dd = directional_distance(domain, z, basis[:, j])
        if dd.value < radii[j] * (1.0 - 1e-9):
            raise PreconditionViolated(
                f"disc {j} of radius {radii[j]:.6g} exceeds the directional "
                f"distance {dd.value:.6g}")

    accepted = 0
    chunk = 0
    limit = 1.0 - shrink
    while accepted < samples:
        rng = np.random.Generator(np.random.PCG64(
            np.random.SeedSequence(entropy=int(seed), spawn_key=(int(chunk),))))
        m = 1 << 14
        u = rng.random((m, n))
        theta = rng.random((m, n)) * (2.0 * np.pi)
        w = radii * np.sqrt(u) * np.exp(1j * theta)
        keep = np.sum(np.abs(w) / radii, axis=1) < limit
        w = w[keep]
        if len(w) == 0:
            chunk += 1
            continue
        w = w[: samples - accepted]
        pts = z + w @ basis.T
        inside = domain.contains_batch(pts)
        if not np.all(inside):
            bad = int(np.argmin(inside))
            return InclusionResult(False, accepted + bad + 1, witness=pts[bad])
        accepted += len(w)
        chunk += 1
    return InclusionResult(True, accepted)
