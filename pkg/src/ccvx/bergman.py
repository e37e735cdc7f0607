"""Numerical Bergman kernel and metric by polynomial orthonormalization.

The square-integrable holomorphic functions on a bounded catalog domain are
approximated from below by the span of monomials up to a total degree N.
The Gram matrix of that span is assembled either from exact moments
(centered Reinhardt variants, where monomials are orthogonal and the
diagonal entries reduce to Gamma-function expressions) or by seeded
Monte-Carlo integration over the bounding box.  One Cholesky factorization
then yields, at any interior point,

    K_N(z)      the subspace kernel, increasing to K_D(z) with N,
    M_N(z; X)   the constrained derivative supremum,
    B_N = M_N / sqrt(K_N).

Monomials are pre-scaled per coordinate by the bounding-box radius, which
is a diagonal change of basis: it leaves every reported value unchanged in
exact arithmetic and keeps the Gram conditioned at high degree.
"""

from __future__ import annotations

import hashlib
import json
import math
import os
from dataclasses import dataclass, replace

import numpy as np
from scipy.linalg import cholesky, solve_triangular

from .domains import (Ball, ComplexEllipsoid, Domain, LinearImage, Polydisc, Product,
                      WeightedDiamond, from_json, require_inside, sample_chunk, _CHUNK)
from .errors import GramIndefinite, UnboundedDomain, UnsupportedVariant
from .linalg import as_vector, graded_multi_indices

MAX_DEGREE = 12
DEFAULT_MC_SAMPLES = 2_000_000
JITTER_SCALE = 1e-13

MOMENT_MODE = "moment"
MC_MODE = "monte_carlo"


def default_degree(n: int) -> int:
    return {1: 10, 2: 8, 3: 5}.get(n, 4)


# ---------------------------------------------------------------------------
# exact moments of centered Reinhardt variants


def moment_supported(domain: Domain) -> bool:
    if isinstance(domain, (WeightedDiamond, ComplexEllipsoid)):
        return True
    if isinstance(domain, (Ball, Polydisc)):
        return bool(np.all(domain.center == 0))
    if isinstance(domain, Product):
        return all(moment_supported(f) for f in domain.factors)
    return False


def monomial_moment(domain: Domain, alpha: tuple[int, ...]) -> float:
    """Integral of prod |z_j|^(2 alpha_j) over the domain, in closed form."""
    if isinstance(domain, Polydisc):
        r = domain.radii
        return float(np.prod([math.pi * rj ** (2 * a + 2) / (a + 1)
                              for a, rj in zip(alpha, r)]))
    if isinstance(domain, Ball):
        n = domain.dim
        total = sum(alpha)
        num = math.pi ** n
        for a in alpha:
            num *= math.factorial(a)
        return num / math.factorial(n + total) * domain.radius ** (2 * (n + total))
    if isinstance(domain, WeightedDiamond):
        n = domain.dim
        total = sum(alpha)
        num = (2.0 * math.pi) ** n
        for a in alpha:
            num *= math.factorial(2 * a + 1)
        scale = float(np.prod([rj ** (2 * a + 2) for a, rj in zip(alpha, domain.radii)]))
        return num / math.factorial(2 * n + 2 * total) * scale
    if isinstance(domain, ComplexEllipsoid):
        n = domain.dim
        num = (2.0 * math.pi) ** n
        s = 0.0
        for a, m in zip(alpha, domain.exponents):
            num *= math.gamma((a + 1.0) / m) / (2.0 * m)
            s += (a + 1.0) / m
        return num / math.gamma(1.0 + s)
    if isinstance(domain, Product):
        out = 1.0
        off = 0
        for f in domain.factors:
            out *= monomial_moment(f, tuple(alpha[off:off + f.dim]))
            off += f.dim
        return out
    raise UnsupportedVariant(f"no closed-form moments for variant {domain.variant!r}")


def _polynomials_dense(domain: Domain) -> bool:
    # centered Reinhardt variants are complete circular; the remaining
    # bounded catalog variants are convex -- both give polynomial density
    if moment_supported(domain):
        return True
    return domain.is_bounded and domain.is_convex


# ---------------------------------------------------------------------------
# monomial evaluation


def _coordinate_scales(domain: Domain) -> np.ndarray:
    lo, hi = domain.bounding_box()
    n = domain.dim
    half = np.maximum(np.abs(lo), np.abs(hi))
    return np.hypot(half[:n], half[n:])


def monomial_values(z: np.ndarray, indices: np.ndarray, scale: np.ndarray) -> np.ndarray:
    """(m, p) values of the scaled monomials at the points z (m, n)."""
    z = np.atleast_2d(z)
    m, n = z.shape
    max_deg = int(indices.max()) if indices.size else 0
    out = np.ones((m, indices.shape[0]), dtype=np.complex128)
    for j in range(n):
        powers = (z[:, j] / scale[j])[:, None] ** np.arange(max_deg + 1)
        out *= powers[:, indices[:, j]]
    return out


def monomial_derivatives(z: np.ndarray, x: np.ndarray, indices: np.ndarray,
                         scale: np.ndarray) -> np.ndarray:
    """(p,) values of sum_j X_j d/dz_j applied to the scaled monomials."""
    n = z.size
    max_deg = int(indices.max()) if indices.size else 0
    w = z / scale
    powers = np.empty((n, max_deg + 1), dtype=np.complex128)
    for j in range(n):
        powers[j] = w[j] ** np.arange(max_deg + 1)
    out = np.zeros(indices.shape[0], dtype=np.complex128)
    for j in range(n):
        a = indices[:, j]
        active = a > 0
        if not np.any(active):
            continue
        term = np.ones(indices.shape[0], dtype=np.complex128)
        for i in range(n):
            ai = indices[:, i]
            if i == j:
                term *= np.where(active, ai / scale[i]
                                 * powers[i][np.maximum(ai - 1, 0)], 0.0)
            else:
                term *= powers[i][ai]
        out += x[j] * term
    return out


# ---------------------------------------------------------------------------
# the Gram model


@dataclass(frozen=True, eq=False)
class GramModel:
    domain: Domain
    degree: int
    multi_indices: np.ndarray        # (p, n) int
    gram: np.ndarray                 # (p, p) Hermitian positive definite
    scale: np.ndarray                # (n,) coordinate pre-scaling
    volume: float
    mode: str
    samples: int
    seed: int | None
    stderr: np.ndarray | None        # (p, p) per-entry standard errors (MC)
    chunk_sums: np.ndarray | None    # (J, p, p) per-chunk partial sums (MC)
    chunk_candidates: int            # candidates per chunk (MC)
    box_volume: float
    jitter: float
    chol: np.ndarray                 # upper R with gram + jitter*I = R^H R
    min_eigenvalue: float

    @property
    def basis_size(self) -> int:
        return self.multi_indices.shape[0]


@dataclass(frozen=True)
class BergmanEstimate:
    """Subspace kernel/metric values at one point (and direction)."""

    kernel: float                # K_N(z)
    m_value: float | None        # M_N(z; X), None for kernel-only queries
    metric: float | None         # B_N = M_N / sqrt(K_N)
    degree: int
    mode: str
    error_bar: float             # jackknife sigma for K (0 in moment mode)
    error_bar_metric: float      # jackknife sigma for B (0 in moment mode)
    truncated: bool              # moment mode: value is a lower approximant
    jitter: float


def _factor(h: np.ndarray) -> tuple[np.ndarray, float]:
    jitter = 0.0
    scale = float(np.trace(h).real) / h.shape[0]
    for attempt in range(4):
        try:
            r = cholesky(h + (jitter * np.eye(h.shape[0]) if jitter else 0.0),
                         lower=False)
            return r, jitter
        except np.linalg.LinAlgError:
            jitter = JITTER_SCALE * scale * 10 ** attempt
    raise GramIndefinite("Gram matrix is not positive definite even after jitter")


def build_gram(domain: Domain, degree: int | None = None, mode: str = "auto",
               samples: int = DEFAULT_MC_SAMPLES, seed: int = 0,
               cache_dir: str | None = None) -> GramModel:
    """Assemble the monomial Gram matrix of a bounded domain.

    ``mode`` is "moment" (exact, centered Reinhardt variants), "monte_carlo"
    (any bounded variant; ``samples`` counts bounding-box draws), or "auto".
    Deterministic for fixed (degree, mode, samples, seed).
    """
    if not domain.is_bounded:
        raise UnboundedDomain("Bergman models need a bounded domain")
    if not _polynomials_dense(domain):
        raise UnsupportedVariant(
            "no polynomial-density argument for this variant; refusing a "
            "silently biased kernel")
    n = domain.dim
    if degree is None:
        degree = default_degree(n)
    if degree > MAX_DEGREE:
        raise ValueError(f"degree {degree} exceeds the guard {MAX_DEGREE}")
    if mode == "auto":
        mode = MOMENT_MODE if moment_supported(domain) else MC_MODE
    if mode == MOMENT_MODE and not moment_supported(domain):
        raise UnsupportedVariant("moment mode needs a centered Reinhardt variant")

    cache_dir = cache_dir or os.environ.get("CCVX_CACHE_DIR")
    key = None
    if cache_dir:
        key = _cache_key(domain, degree, mode, samples, seed)
        cached = _cache_load(cache_dir, key, domain)
        if cached is not None:
            return cached

    indices = np.array(graded_multi_indices(n, degree), dtype=int)
    scale = _coordinate_scales(domain)

    if mode == MOMENT_MODE:
        diag = np.array([monomial_moment(domain, tuple(a)) for a in indices])
        diag = diag / np.prod(scale[None, :] ** (2 * indices), axis=1)
        gram = np.diag(diag).astype(np.complex128)
        volume = monomial_moment(domain, (0,) * n)
        stderr = None
        chunk_sums = None
        chunk_candidates = 0
        box_volume = math.nan
        used_samples = 0
    else:
        lo, hi = domain.bounding_box()
        box_volume = float(np.prod(hi - lo))
        n_chunks = max(1, math.ceil(samples / _CHUNK))
        p = indices.shape[0]
        chunk_sums = np.zeros((n_chunks, p, p), dtype=np.complex128)
        sq_sum = np.zeros((p, p))
        accepted = 0
        for kch in range(n_chunks):
            pts, _ = sample_chunk(domain, seed, kch, _CHUNK)
            accepted += len(pts)
            if len(pts) == 0:
                continue
            phi = monomial_values(pts, indices, scale)
            chunk_sums[kch] = phi.conj().T @ phi
            mag = (phi.real ** 2 + phi.imag ** 2)
            sq_sum += mag.T @ mag
        candidates = n_chunks * _CHUNK
        s1 = chunk_sums.sum(axis=0)
        gram = box_volume * s1 / candidates
        gram = 0.5 * (gram + gram.conj().T)
        mean_sq = np.abs(s1 / candidates) ** 2
        var = np.maximum(sq_sum / candidates - mean_sq, 0.0) / candidates
        stderr = box_volume * np.sqrt(var)
        volume = box_volume * accepted / candidates
        chunk_candidates = _CHUNK
        used_samples = candidates

    r, jitter = _factor(gram)
    min_eig = float(np.min(np.abs(np.diag(r))) ** 2)
    model = GramModel(domain=domain, degree=degree, multi_indices=indices,
                      gram=gram, scale=scale, volume=volume, mode=mode,
                      samples=used_samples, seed=(seed if mode == MC_MODE else None),
                      stderr=stderr, chunk_sums=chunk_sums,
                      chunk_candidates=chunk_candidates, box_volume=box_volume,
                      jitter=jitter, chol=r, min_eigenvalue=min_eig)
    if cache_dir and key is not None:
        _cache_store(cache_dir, key, model)
    return model


def truncated(model: GramModel, degree: int) -> GramModel:
    """The sub-model of total degree <= degree (a leading principal block)."""
    if degree > model.degree:
        raise ValueError("can only truncate to a lower degree")
    keep = model.multi_indices.sum(axis=1) <= degree
    p = int(np.sum(keep))
    gram = model.gram[:p, :p]
    r, jitter = _factor(gram)
    return replace(model, degree=degree, multi_indices=model.multi_indices[:p],
                   gram=gram, stderr=None if model.stderr is None else model.stderr[:p, :p],
                   chunk_sums=None if model.chunk_sums is None else model.chunk_sums[:, :p, :p],
                   jitter=jitter, chol=r,
                   min_eigenvalue=float(np.min(np.abs(np.diag(r))) ** 2))


def _kernel_from_factor(r: np.ndarray, phi: np.ndarray) -> float:
    y = solve_triangular(r, phi, trans="T", lower=False)
    return float(np.real(np.vdot(y, y)))


def _metric_from_factor(r: np.ndarray, phi: np.ndarray, c: np.ndarray
                        ) -> tuple[float, float, float]:
    y = solve_triangular(r, phi, trans="T", lower=False)
    yc = solve_triangular(r, c, trans="T", lower=False)
    k = float(np.real(np.vdot(y, y)))
    cross = complex(np.vdot(y, yc))
    m2 = float(np.real(np.vdot(yc, yc))) - abs(cross) ** 2 / k
    m2 = max(m2, 0.0)
    return k, math.sqrt(m2), math.sqrt(m2 / k)


def _jackknife(model: GramModel, stat) -> tuple[float, float]:
    """Delete-one-chunk jackknife (value, sigma) of stat(gram_matrix)."""
    sums = model.chunk_sums
    j = sums.shape[0]
    full = sums.sum(axis=0)
    total = j * model.chunk_candidates
    vals = np.empty(j)
    for k in range(j):
        h = model.box_volume * (full - sums[k]) / (total - model.chunk_candidates)
        h = 0.5 * (h + h.conj().T)
        r, _ = _factor(h)
        vals[k] = stat(r)
    mean = float(vals.mean())
    sigma = math.sqrt((j - 1) / j * float(np.sum((vals - mean) ** 2)))
    return mean, sigma


def kernel_at(model: GramModel, z) -> BergmanEstimate:
    """Subspace Bergman kernel K_N(z) = b(z)* G^-1 b(z)."""
    z = require_inside(model.domain, z)
    phi = monomial_values(z.reshape(1, -1), model.multi_indices, model.scale)[0]
    k = _kernel_from_factor(model.chol, phi)
    err = 0.0
    if model.mode == MC_MODE and model.chunk_sums is not None and model.chunk_sums.shape[0] > 1:
        _, err = _jackknife(model, lambda r: _kernel_from_factor(r, phi))
    return BergmanEstimate(kernel=k, m_value=None, metric=None, degree=model.degree,
                           mode=model.mode, error_bar=err, error_bar_metric=0.0,
                           truncated=model.mode == MOMENT_MODE, jitter=model.jitter)


def metric_at(model: GramModel, z, x) -> BergmanEstimate:
    """Subspace kernel, derivative supremum and Bergman metric at (z, X).

    Within the span, the constrained supremum defining M has the closed
    solution of a rank-one-deflated least-squares problem; everything runs
    through the one cached Cholesky factor.
    """
    z = require_inside(model.domain, z)
    x = as_vector(x, dim=model.domain.dim)
    if np.linalg.norm(x) == 0.0:
        raise ValueError("direction X must be nonzero")
    phi = monomial_values(z.reshape(1, -1), model.multi_indices, model.scale)[0]
    c = monomial_derivatives(z, x, model.multi_indices, model.scale)
    k, m, b = _metric_from_factor(model.chol, phi, c)
    err_k = 0.0
    err_b = 0.0
    if model.mode == MC_MODE and model.chunk_sums is not None and model.chunk_sums.shape[0] > 1:
        _, err_k = _jackknife(model, lambda r: _kernel_from_factor(r, phi))
        _, err_b = _jackknife(model, lambda r: _metric_from_factor(r, phi, c)[2])
    return BergmanEstimate(kernel=k, m_value=m, metric=b, degree=model.degree,
                           mode=model.mode, error_bar=err_k, error_bar_metric=err_b,
                           truncated=model.mode == MOMENT_MODE, jitter=model.jitter)


# ---------------------------------------------------------------------------
# on-disk cache (an optimization only; results are bit-identical either way)

_CACHE_MAGIC = b"CCVXGRM"
_CACHE_VERSION = 1


def _cache_key(domain: Domain, degree: int, mode: str, samples: int, seed: int) -> str:
    blob = json.dumps({"domain": domain.to_json(), "degree": degree, "mode": mode,
                       "samples": samples, "seed": seed}, sort_keys=True)
    return hashlib.sha256(blob.encode()).hexdigest()[:24]


def _cache_store(cache_dir: str, key: str, model: GramModel) -> None:
    os.makedirs(cache_dir, exist_ok=True)
    path = os.path.join(cache_dir, f"gram-{key}.npz")
    arrays = {
        "multi_indices": model.multi_indices,
        "gram": model.gram,
        "scale": model.scale,
        "chol": model.chol,
    }
    if model.stderr is not None:
        arrays["stderr"] = model.stderr
    if model.chunk_sums is not None:
        arrays["chunk_sums"] = model.chunk_sums
    header = json.dumps({
        "version": _CACHE_VERSION,
        "domain": model.domain.to_json(),
        "degree": model.degree,
        "mode": model.mode,
        "samples": model.samples,
        "seed": model.seed,
        "volume": model.volume.hex(),
        "box_volume": (0.0 if math.isnan(model.box_volume) else model.box_volume).hex(),
        "box_volume_nan": math.isnan(model.box_volume),
        "chunk_candidates": model.chunk_candidates,
        "jitter": model.jitter.hex(),
        "min_eigenvalue": model.min_eigenvalue.hex(),
    })
    tmp = path + ".tmp"
    with open(tmp, "wb") as fh:
        fh.write(_CACHE_MAGIC)
        fh.write(bytes([_CACHE_VERSION]))
        hb = header.encode()
        fh.write(len(hb).to_bytes(8, "little"))
        fh.write(hb)
        np.savez(fh, **arrays)
    os.replace(tmp, path)


def _cache_load(cache_dir: str, key: str, domain: Domain) -> GramModel | None:
    path = os.path.join(cache_dir, f"gram-{key}.npz")
    if not os.path.exists(path):
        return None
    with open(path, "rb") as fh:
        if fh.read(len(_CACHE_MAGIC)) != _CACHE_MAGIC:
            return None
        if fh.read(1) != bytes([_CACHE_VERSION]):
            return None
        hlen = int.from_bytes(fh.read(8), "little")
        header = json.loads(fh.read(hlen).decode())
        data = np.load(fh)
        arrays = {k: data[k] for k in data.files}
    if from_json(header["domain"]).canonical_json() != domain.canonical_json():
        return None
    box_volume = math.nan if header["box_volume_nan"] else float.fromhex(header["box_volume"])
    return GramModel(domain=domain, degree=int(header["degree"]),
                     multi_indices=arrays["multi_indices"],
                     gram=arrays["gram"], scale=arrays["scale"],
                     volume=float.fromhex(header["volume"]), mode=header["mode"],
                     samples=int(header["samples"]), seed=header["seed"],
                     stderr=arrays.get("stderr"), chunk_sums=arrays.get("chunk_sums"),
                     chunk_candidates=int(header["chunk_candidates"]),
                     box_volume=box_volume, jitter=float.fromhex(header["jitter"]),
                     chol=arrays["chol"],
                     min_eigenvalue=float.fromhex(header["min_eigenvalue"]))
