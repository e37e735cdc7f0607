"""Closed-form ground truth for the invariant metrics on model domains.

Supported where classical formulas exist: discs and balls (any center and
radius), polydiscs, finite products, the Koebe slit plane (transported
through the Koebe map), and invertible linear images of all of these.  The
weighted diamond is covered for the Bergman kernel at its center and for
the Bergman metric at the center in coordinate directions.

On every supported variant the Carate[h]odory and Kobayashi metrics agree
(convexity, or simple connectivity in the plane), so one value is returned
for both.  Values carry an exactness tag: ``closed_form``, or
``transported`` when a numerical map inversion enters the evaluation.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .domains import (Ball, ComplexEllipsoid, Domain, KoebeSlitPlane, LinearImage,
                      Polydisc, Product, WeightedDiamond, require_inside)
from .errors import UnsupportedVariant
from .linalg import as_vector

CLOSED_FORM = "closed_form"
TRANSPORTED = "transported"


@dataclass(frozen=True)
class MetricValue:
    kind: str          # caratheodory | kobayashi | bergman_kernel | bergman_M | bergman_metric
    value: float
    exactness: str     # closed_form | transported

    def __post_init__(self):
        if not (self.value >= 0.0 and math.isfinite(self.value)):
            raise ValueError(f"metric value must be finite and nonnegative, got {self.value}")


# ---------------------------------------------------------------------------
# the Koebe map and its inverse


def koebe_map(zeta: complex) -> complex:
    """k(zeta) = zeta / (1 + zeta)^2, the disc onto the slit plane."""
    zeta = complex(zeta)
    return zeta / (1.0 + zeta) ** 2


def koebe_map_derivative(zeta: complex) -> complex:
    zeta = complex(zeta)
    return (1.0 - zeta) / (1.0 + zeta) ** 3


def koebe_map_inverse(w: complex) -> complex:
    """The inverse disc point of w in C \\ [1/4, inf).

    The quadratic w*zeta^2 + (2w - 1)*zeta + w = 0 has root product 1, and
    the principal branch of sqrt(1 - 4w) is analytic exactly off the slit;
    a Newton polish brings the round trip below 1e-12.
    """
    w = complex(w)
    if w.imag == 0.0 and w.real >= 0.25:
        raise ValueError("point lies on the slit [1/4, inf)")
    if w == 0.0:
        return 0.0 + 0.0j
    s = cmath.sqrt(1.0 - 4.0 * w)
    zeta = (1.0 - 2.0 * w - s) / (2.0 * w)
    for _ in range(3):
        err = koebe_map(zeta) - w
        if abs(err) < 1e-16:
            break
        zeta -= err / koebe_map_derivative(zeta)
    return zeta


# ---------------------------------------------------------------------------
# Caratheodory / Kobayashi


def _ball_kappa(dom: Ball, z: np.ndarray, x: np.ndarray) -> float:
    w = (z - dom.center) / dom.radius
    y = x / dom.radius
    nw2 = float(np.vdot(w, w).real)
    ny2 = float(np.vdot(y, y).real)
    ip = complex(np.sum(y * np.conj(w)))
    return math.sqrt((1.0 - nw2) * ny2 + abs(ip) ** 2) / (1.0 - nw2)


def _kappa(domain: Domain, z: np.ndarray, x: np.ndarray) -> tuple[float, str]:
    if isinstance(domain, Ball):
        return _ball_kappa(domain, z, x), CLOSED_FORM
    if isinstance(domain, Polydisc):
        w = z - domain.center
        vals = domain.radii * np.abs(x) / (domain.radii ** 2 - np.abs(w) ** 2)
        return float(np.max(vals)), CLOSED_FORM
    if isinstance(domain, Product):
        best, tag = 0.0, CLOSED_FORM
        off = 0
        for f in domain.factors:
            k = f.dim
            xb = x[off:off + k]
            if np.linalg.norm(xb) > 0:
                v, t = _kappa(f, z[off:off + k], xb)
                if v > best:
                    best = v
                if t == TRANSPORTED:
                    tag = TRANSPORTED
            off += k
        return best, tag
    if isinstance(domain, KoebeSlitPlane):
        zeta = koebe_map_inverse(complex(z[0]))
        w = complex(x[0]) / koebe_map_derivative(zeta)
        return abs(w) / (1.0 - abs(zeta) ** 2), TRANSPORTED
    if isinstance(domain, LinearImage):
        return _kappa(domain.base, domain.pullback(z), np.linalg.solve(domain.map, x))
    raise UnsupportedVariant(
        f"no closed-form invariant metric for variant {domain.variant!r}")


def gamma_kappa_oracle(domain: Domain, z, x) -> tuple[MetricValue, MetricValue]:
    """Closed-form Caratheodory and Kobayashi metric values at (z, X).

    They coincide on every supported variant, so the two returned values
    differ only in their kind tag.
    """
    z = require_inside(domain, z)
    x = as_vector(x, dim=domain.dim)
    if np.linalg.norm(x) == 0.0:
        raise ValueError("direction X must be nonzero")
    value, tag = _kappa(domain, z, x)
    return (MetricValue("caratheodory", value, tag),
            MetricValue("kobayashi", value, tag))


# ---------------------------------------------------------------------------
# Bergman kernel and metric


def diamond_kernel_center(n: int) -> float:
    """Kernel of the model diamond at its center: (2n)!/(2 pi)^n."""
    return math.factorial(2 * n) / (2.0 * math.pi) ** n


def diamond_metric_constant(n: int) -> float:
    """M at the center of the model diamond in a coordinate direction."""
    return math.sqrt(math.factorial(2 * (n + 1)) / (6.0 * (2.0 * math.pi) ** n))


def _kernel(domain: Domain, z: np.ndarray) -> tuple[float, str]:
    if isinstance(domain, Ball):
        n = domain.dim
        w2 = float(np.vdot(z - domain.center, z - domain.center).real) / domain.radius ** 2
        k_unit = math.factorial(n) / (math.pi ** n * (1.0 - w2) ** (n + 1))
        return k_unit / domain.radius ** (2 * n), CLOSED_FORM
    if isinstance(domain, Polydisc):
        w = np.abs(z - domain.center)
        vals = domain.radii ** 2 / (math.pi * (domain.radii ** 2 - w ** 2) ** 2)
        return float(np.prod(vals)), CLOSED_FORM
    if isinstance(domain, Product):
        total, tag = 1.0, CLOSED_FORM
        off = 0
        for f in domain.factors:
            k = f.dim
            v, t = _kernel(f, z[off:off + k])
            total *= v
            if t == TRANSPORTED:
                tag = TRANSPORTED
            off += k
        return total, tag
    if isinstance(domain, WeightedDiamond):
        if np.any(z != 0):
            raise UnsupportedVariant("diamond kernel oracle is available at the center only")
        n = domain.dim
        return diamond_kernel_center(n) / float(np.prod(domain.radii ** 2)), CLOSED_FORM
    if isinstance(domain, LinearImage):
        v, t = _kernel(domain.base, domain.pullback(z))
        return v / domain.abs_det ** 2, t
    raise UnsupportedVariant(
        f"no closed-form Bergman kernel for variant {domain.variant!r}")


def bergman_oracle(domain: Domain, z) -> MetricValue:
    """Closed-form Bergman kernel on the diagonal."""
    z = require_inside(domain, z)
    value, tag = _kernel(domain, z)
    return MetricValue("bergman_kernel", value, tag)


def _bergman_metric(domain: Domain, z: np.ndarray, x: np.ndarray) -> tuple[float, str]:
    if isinstance(domain, Ball):
        n = domain.dim
        return math.sqrt(n + 1.0) * _ball_kappa(domain, z, x), CLOSED_FORM
    if isinstance(domain, Polydisc):
        w = z - domain.center
        terms = 2.0 * (domain.radii * np.abs(x) / (domain.radii ** 2 - np.abs(w) ** 2)) ** 2
        return math.sqrt(float(np.sum(terms))), CLOSED_FORM
    if isinstance(domain, Product):
        total, tag = 0.0, CLOSED_FORM
        off = 0
        for f in domain.factors:
            k = f.dim
            xb = x[off:off + k]
            if np.linalg.norm(xb) > 0:
                v, t = _bergman_metric(f, z[off:off + k], xb)
                total += v * v
                if t == TRANSPORTED:
                    tag = TRANSPORTED
            off += k
        return math.sqrt(total), tag
    if isinstance(domain, WeightedDiamond):
        if np.any(z != 0):
            raise UnsupportedVariant("diamond metric oracle is available at the center only")
        nz = np.nonzero(np.abs(x) > 0)[0]
        if len(nz) != 1:
            raise UnsupportedVariant(
                "diamond metric oracle covers coordinate directions only")
        j = int(nz[0])
        n = domain.dim
        k0 = diamond_kernel_center(n) / float(np.prod(domain.radii ** 2))
        m = abs(x[j]) * diamond_metric_constant(n) / (domain.radii[j]
                                                      * float(np.prod(domain.radii)))
        return m / math.sqrt(k0), CLOSED_FORM
    if isinstance(domain, LinearImage):
        return _bergman_metric(domain.base, domain.pullback(z),
                               np.linalg.solve(domain.map, x))
    raise UnsupportedVariant(
        f"no closed-form Bergman metric for variant {domain.variant!r}")


def bergman_metric_oracle(domain: Domain, z, x) -> MetricValue:
    """Closed-form Bergman metric B = M / sqrt(K)."""
    z = require_inside(domain, z)
    x = as_vector(x, dim=domain.dim)
    if np.linalg.norm(x) == 0.0:
        raise ValueError("direction X must be nonzero")
    value, tag = _bergman_metric(domain, z, x)
    return MetricValue("bergman_metric", value, tag)


def oracle_supports_metric(domain: Domain) -> bool:
    """True when gamma/kappa closed forms exist for the variant."""
    if isinstance(domain, (Ball, Polydisc, KoebeSlitPlane)):
        return True
    if isinstance(domain, Product):
        return all(oracle_supports_metric(f) for f in domain.factors)
    if isinstance(domain, LinearImage):
        return oracle_supports_metric(domain.base)
    return False


def oracle_supports_bergman_metric(domain: Domain) -> bool:
    """True when the Bergman metric closed form exists at every (z, X)."""
    if isinstance(domain, (Ball, Polydisc)):
        return True
    if isinstance(domain, Product):
        return all(oracle_supports_bergman_metric(f) for f in domain.factors)
    if isinstance(domain, LinearImage):
        return oracle_supports_bergman_metric(domain.base)
    return False


def oracle_supports_kernel(domain: Domain, z=None) -> bool:
    """True when the Bergman kernel closed form exists at z (None: anywhere)."""
    if isinstance(domain, (Ball, Polydisc)):
        return True
    if isinstance(domain, WeightedDiamond):
        return z is not None and bool(np.all(as_vector(z, domain.dim) == 0))
    if isinstance(domain, Product):
        off = 0
        for f in domain.factors:
            zb = None if z is None else as_vector(z, domain.dim)[off:off + f.dim]
            if not oracle_supports_kernel(f, zb):
                return False
            off += f.dim
        return True
    if isinstance(domain, LinearImage):
        zb = None if z is None else domain.pullback(as_vector(z, domain.dim))
        return oracle_supports_kernel(domain.base, zb)
    return False
