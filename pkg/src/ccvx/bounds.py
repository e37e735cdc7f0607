"""Explicit two-sided estimates tying metrics to distances and frames.

All estimates are packaged as closable intervals around a measured value:

* metric sandwich: 1/(4d) <= gamma <= kappa <= 1/d for the directional
  distance d (lower end sharp on the Koebe slit plane, upper end on the
  disc);
* kernel product: (16 pi)^-n <= K(z) p(z)^2 <= (2n)!/(2 pi)^n with p the
  product of the minimal-basis distances;
* Bergman distance bound: B(z;X) d(z,X) <= c(n), refined per frame
  component to c'(n) d_k / (|X_k| d^2);
* frame comparison: any invariant metric is within [1/(16 c(n)), c(n)] of
  sum_j |X_j|/d_j, whose own two-sided distance bounds carry the factor 4.

The dimensional constants derive from the model diamond: c'(n) equals
(4 sqrt(pi))^n times the diamond's central derivative supremum, and
c(n) = n c'(n).  Factorials are evaluated in log space.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .domains import ComplexEllipsoid, Domain
from .errors import DimensionMismatch
from .geometry import (MinimalBasisFrame, boundary_distance, comparison_sum,
                       decompose, directional_distance, minimal_basis)
from .linalg import as_vector

MAX_CONSTANT_DIM = 8


@dataclass(frozen=True)
class EstimateConstants:
    """The explicit dimensional constants of the two-sided estimates."""

    dim: int
    diamond_center_metric: float   # derivative supremum at the diamond center
    refined_factor: float          # (4 sqrt(pi))^dim times the above
    comparison_factor: float       # dim times the refined factor
    kernel_product_lower: float    # (16 pi)^-dim
    kernel_product_upper: float    # (2 dim)!/(2 pi)^dim

    def identity_defect(self) -> float:
        """Relative gap between the two printed forms of the refined factor.

        The second form is 2^n sqrt(2^(n-1) (2(n+1))! / 3); agreement is an
        internal consistency check of the constant derivation.
        """
        n = self.dim
        log_alt = (n * math.log(2.0)
                   + 0.5 * ((n - 1) * math.log(2.0)
                            + math.lgamma(2 * (n + 1) + 1) - math.log(3.0)))
        alt = math.exp(log_alt)
        return abs(self.refined_factor - alt) / alt


def estimate_constants(n: int) -> EstimateConstants:
    if not 1 <= n <= MAX_CONSTANT_DIM:
        raise ValueError(f"constants are provided for 1 <= n <= {MAX_CONSTANT_DIM}")
    log_c = 0.5 * (math.lgamma(2 * (n + 1) + 1) - math.log(6.0)
                   - n * math.log(2.0 * math.pi))
    c_diamond = math.exp(log_c)
    refined = math.exp(n * math.log(4.0 * math.sqrt(math.pi)) + log_c)
    upper = math.exp(math.lgamma(2 * n + 1) - n * math.log(2.0 * math.pi))
    return EstimateConstants(
        dim=n,
        diamond_center_metric=c_diamond,
        refined_factor=refined,
        comparison_factor=n * refined,
        kernel_product_lower=(16.0 * math.pi) ** (-n),
        kernel_product_upper=upper,
    )


@dataclass(frozen=True)
class MetricBound:
    """One two-sided estimate instance: lower <= value <= upper expected."""

    quantity: str                 # gamma | kappa | bergman_metric | kernel_times_p2 | comparison_sum
    lower: float
    upper: float
    value: float | None = None
    details: dict = field(default_factory=dict)

    def holds(self, tol: float = 0.0) -> bool | None:
        if self.value is None:
            return None
        return self.lower - tol <= self.value <= self.upper + tol


def metric_sandwich_bounds(domain: Domain, z, x) -> MetricBound:
    """[1/(4d), 1/d] bracketing gamma and kappa at (z, X).

    The lower end applies to gamma (hence to kappa and the Bergman metric),
    the upper end to kappa (hence to gamma).
    """
    dd = directional_distance(domain, z, x)
    if not math.isfinite(dd.value):
        raise ValueError("the complex line through z in direction X lies in the domain")
    return MetricBound("gamma", lower=0.25 / dd.value, upper=1.0 / dd.value,
                       details={"directional_distance": dd.value})


def kernel_product_bounds(domain: Domain, z, kernel_value: float | None = None,
                          frame: MinimalBasisFrame | None = None) -> MetricBound:
    """Constant interval for K(z) * p(z)^2, evaluated when K is supplied."""
    if frame is None:
        frame = minimal_basis(domain, z)
    consts = estimate_constants(domain.dim)
    value = None if kernel_value is None else kernel_value * frame.p ** 2
    return MetricBound("kernel_times_p2", lower=consts.kernel_product_lower,
                       upper=consts.kernel_product_upper, value=value,
                       details={"p": frame.p, "kernel": kernel_value})


def bergman_distance_bound(domain: Domain, z, x,
                           metric_value: float | None = None,
                           frame: MinimalBasisFrame | None = None) -> MetricBound:
    """Upper bound on the Bergman metric from the directional distance.

    Coarse form c(n)/d, refined over the frame components k with X_k != 0
    to c'(n) d_k / (|X_k| d^2); the lower end 1/(4d) holds because the
    Bergman metric dominates gamma.
    """
    if frame is None:
        frame = minimal_basis(domain, z)
    z = frame.base_point
    x = as_vector(x, dim=domain.dim)
    consts = estimate_constants(domain.dim)
    dd = directional_distance(domain, z, x)
    d = dd.value
    comp = np.abs(decompose(x, frame))
    active = comp > 1e-15 * float(np.max(comp))
    refined = float(np.min(consts.refined_factor * frame.distances[active]
                           / (comp[active] * d * d)))
    upper = min(consts.comparison_factor / d, refined)
    return MetricBound("bergman_metric", lower=0.25 / d, upper=upper,
                       value=metric_value,
                       details={"directional_distance": d,
                                "coarse_upper": consts.comparison_factor / d,
                                "refined_upper": refined})


def frame_sum_bounds(domain: Domain, z, x,
                     frame: MinimalBasisFrame | None = None) -> MetricBound:
    """Two-sided distance bounds on S = sum_j |X_j|/d_j.

    1/d <= S always (the safe discs span a diamond reaching distance d),
    and S <= 4 c(n)/d with the explicit comparison constant.
    """
    if frame is None:
        frame = minimal_basis(domain, z)
    x = as_vector(x, dim=domain.dim)
    consts = estimate_constants(domain.dim)
    dd = directional_distance(domain, frame.base_point, x)
    s = comparison_sum(frame, x)
    return MetricBound("comparison_sum", lower=1.0 / dd.value,
                       upper=4.0 * consts.comparison_factor / dd.value, value=s,
                       details={"directional_distance": dd.value})


def frame_comparison_check(domain: Domain, z, x, metric_value: float,
                           metric_kind: str,
                           frame: MinimalBasisFrame | None = None) -> MetricBound:
    """Ratio of an invariant metric to sum_j |X_j|/d_j against its interval.

    The interval is the asymmetric [1/(16 c(n)), c(n)]: those are the ends
    the chain of estimates actually yields.
    """
    if metric_kind not in ("caratheodory", "kobayashi", "bergman_metric"):
        raise ValueError(f"not an invariant-metric kind: {metric_kind!r}")
    if frame is None:
        frame = minimal_basis(domain, z)
    consts = estimate_constants(domain.dim)
    s = comparison_sum(frame, x)
    ratio = metric_value / s
    return MetricBound(metric_kind, lower=1.0 / (16.0 * consts.comparison_factor),
                       upper=consts.comparison_factor, value=ratio,
                       details={"comparison_sum": s, "metric_value": metric_value})


# ---------------------------------------------------------------------------
# boundary-exponent experiment


@dataclass(frozen=True)
class ExponentFit:
    """Least-squares slope of log d(z, X) against log d(z) near a contact point."""

    exponent: int                    # coordinate contact order parameter m
    slope: float
    expected_slope: float            # 1/(2m)
    deltas: np.ndarray
    isotropic: np.ndarray            # d(z_delta)
    directional: np.ndarray          # d(z_delta, X)
    sandwich_lower: np.ndarray       # 1/(4 d_dir) per delta
    sandwich_upper: np.ndarray       # 1/d_dir per delta


def exponent_experiment(m: int, deltas) -> ExponentFit:
    """Boundary approach (1-delta, 0) in the domain |z1|^2 + |z2|^(2m) < 1.

    The line in the second coordinate direction meets the boundary at
    (1, 0) with contact order 2m, so the directional distance scales like
    the 2m-th root of the isotropic one; the fitted log-log slope should be
    1/(2m).  Deltas must stay in (0, 0.1] to remain in the local regime.
    """
    if m < 1:
        raise ValueError("contact parameter m must be a positive integer")
    deltas = np.asarray(deltas, dtype=float)
    if np.any(deltas <= 0) or np.any(deltas > 0.1):
        raise ValueError("deltas must lie in (0, 0.1]")
    domain = ComplexEllipsoid(exponents=(1, int(m)))
    x = np.array([0.0, 1.0], dtype=np.complex128)
    iso = np.empty(len(deltas))
    dire = np.empty(len(deltas))
    for i, delta in enumerate(np.sort(deltas)[::-1]):
        z = np.array([1.0 - delta, 0.0], dtype=np.complex128)
        iso[i], _ = boundary_distance(domain, z)
        dire[i] = directional_distance(domain, z, x).value
    slope, _ = np.polyfit(np.log(iso), np.log(dire), 1)
    return ExponentFit(exponent=int(m), slope=float(slope),
                       expected_slope=0.5 / m, deltas=np.sort(deltas)[::-1],
                       isotropic=iso, directional=dire,
                       sandwich_lower=0.25 / dire, sandwich_upper=1.0 / dire)
