"""Complex linear algebra for points, directions and frames in C^n.

Vectors are 1-D complex128 ndarrays, matrices are 2-D complex128 ndarrays
whose *columns* are basis vectors.  Everything here is a pure function of
its inputs.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch

UNITARY_TOL = 1e-12


def as_vector(v, dim: int | None = None) -> np.ndarray:
    """Validate and convert to a finite 1-D complex128 array."""
    arr = np.asarray(v, dtype=np.complex128)
    if arr.ndim != 1 or arr.size == 0:
        raise DimensionMismatch(f"expected a nonempty 1-D vector, got shape {arr.shape}")
    if not (np.all(np.isfinite(arr.real)) and np.all(np.isfinite(arr.imag))):
        raise ValueError("vector has non-finite entries")
    if dim is not None and arr.size != dim:
        raise DimensionMismatch(f"expected dimension {dim}, got {arr.size}")
    return arr


def hermitian_inner(u, v) -> complex:
    """Hermitian inner product sum_j u_j * conj(v_j).

    Conjugate-linear in the second argument, so <u, v> = conj(<v, u>).
    """
    u = as_vector(u)
    v = as_vector(v, dim=u.size)
    return complex(np.sum(u * np.conj(v)))


def unitary_defect(m: np.ndarray) -> float:
    """Max-norm of M*M - I; zero for exactly unitary M."""
    m = np.asarray(m, dtype=np.complex128)
    eye = np.eye(m.shape[1])
    return float(np.max(np.abs(m.conj().T @ m - eye)))


def check_unitary(m: np.ndarray, tol: float = UNITARY_TOL) -> np.ndarray:
    m = np.asarray(m, dtype=np.complex128)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise DimensionMismatch(f"expected a square matrix, got shape {m.shape}")
    defect = unitary_defect(m)
    if defect >= tol:
        raise ValueError(f"matrix is not unitary: defect {defect:.3e} >= {tol:.3e}")
    return m


def complete_to_unitary(v) -> np.ndarray:
    """Unitary matrix whose first column is v/||v||.

    The remaining columns span the orthogonal complement of v; their
    phases are not pinned down (callers must compare spans, not entries).
    """
    v = as_vector(v)
    norm = np.linalg.norm(v)
    if norm == 0.0:
        raise ValueError("cannot complete the zero vector to a basis")
    x = v / norm
    n = x.size
    if n == 1:
        return x.reshape(1, 1).copy()
    q, _ = np.linalg.qr(x.reshape(n, 1), mode="complete")
    # QR yields the right column spans; re-plant x itself in column 0 so the
    # first column reproduces v/||v|| exactly.
    q[:, 0] = x
    return q


def graded_multi_indices(n: int, max_degree: int) -> list[tuple[int, ...]]:
    """All multi-indices alpha in N^n with |alpha| <= max_degree, graded lex.

    The graded order makes the first len(indices, N-1) entries of the
    degree-N list a prefix, so truncating a Gram matrix to a lower degree
    is taking a leading principal block.
    """
    out: list[tuple[int, ...]] = []
    for total in range(max_degree + 1):
        for alpha in itertools.product(range(total + 1), repeat=n):
            if sum(alpha) == total:
                out.append(alpha)
    return out


def sphere_directions(dim_real: int, count: int, *, seed: int | None = None) -> np.ndarray:
    """Deterministic set of `count` unit vectors in R^dim_real.

    Uses an unscrambled Sobol sequence pushed through the inverse normal
    CDF; `seed` only shifts the sequence start so distinct calls can get
    distinct but reproducible sets.
    """
    from scipy.stats import norm, qmc

    sob = qmc.Sobol(d=dim_real, scramble=False)
    # skip the all-zero first point and the all-0.5 second one (its normal
    # image is the zero vector, which has no direction)
    skip = 2 + (0 if seed is None else (seed % 1024) * count)
    sob.fast_forward(skip)
    u = sob.random(count)
    g = norm.ppf(np.clip(u, 1e-12, 1 - 1e-12))
    norms = np.linalg.norm(g, axis=1)
    degenerate = norms < 1e-9
    if np.any(degenerate):
        g[degenerate] = 0.0
        g[degenerate, 0] = 1.0
        norms[degenerate] = 1.0
    return g / norms[:, None]


def complex_sphere(n: int, count: int, *, seed: int | None = None) -> np.ndarray:
    """Deterministic unit vectors in C^n (rows), via the real 2n-sphere."""
    g = sphere_directions(2 * n, count, seed=seed)
    return g[:, :n] + 1j * g[:, n:]


@dataclass(frozen=True)
class ComparabilityResult:
    """Outcome of the two-basis weighted-sum comparability check."""

    ok: bool
    status: str  # "ok", "hypothesis_violated", or "claim_failed"
    permutation: tuple[int, ...]
    permutation_product: float
    ratio_range: tuple[float, float]
    witness: np.ndarray | None = None


def basis_comparability_check(
    p_basis: np.ndarray,
    q_basis: np.ndarray,
    a,
    b,
    c: float,
    *,
    samples: int = 4096,
    seed: int = 7,
    tol: float = 1e-9,
) -> ComparabilityResult:
    """Check the comparability lemma for two orthonormal bases.

    Finds a permutation sigma with prod_j |<p_j, q_sigma(j)>| >= 1/n!
    (always exists because the transition matrix is unitary, so the
    permanent-style expansion of its determinant has a large term).  Then
    samples unit vectors X and tests the hypothesis

        1/c <= sum_j a_j |<X, p_j>| / sum_j b_j |<X, q_j>| <= c.

    If the hypothesis survives sampling, asserts the conclusion
    a_j/b_j in [1/(n! c), n! c] for every j.

    Columns of `p_basis`/`q_basis` are the basis vectors; `a`, `b` must be
    increasing positive sequences and c > 1 is the comparability constant.
    """
    p = check_unitary(p_basis, tol=1e-10)
    q = check_unitary(q_basis, tol=1e-10)
    n = p.shape[0]
    if q.shape[0] != n:
        raise DimensionMismatch("bases have different dimensions")
    if n > 8:
        raise ValueError("exhaustive permutation search is limited to n <= 8")
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape != (n,) or b.shape != (n,):
        raise DimensionMismatch("weight sequences must have length n")
    if np.any(a <= 0) or np.any(b <= 0) or np.any(np.diff(a) < 0) or np.any(np.diff(b) < 0):
        raise ValueError("weight sequences must be positive and increasing")
    if c <= 1:
        raise ValueError("comparability constant must exceed 1")

    # |<p_j, q_k>| for columns p_j, q_k.
    overlap = np.abs(p.conj().T @ q).T  # overlap[j, k] = |<p_j, q_k>|
    best_perm: tuple[int, ...] = tuple(range(n))
    best_prod = -1.0
    for perm in itertools.permutations(range(n)):
        prod = float(np.prod(overlap[range(n), perm]))
        if prod > best_prod:
            best_prod = prod
            best_perm = perm
    fact = float(math.factorial(n))
    if best_prod < 1.0 / fact - 1e-12:
        raise AssertionError(
            f"no permutation reached 1/n! = {1/fact:.3e}; unitarity must be broken"
        )

    xs = complex_sphere(n, samples, seed=seed)
    xs = np.vstack([xs, p.T.conj(), q.T.conj()])  # include the basis directions themselves
    num = np.abs(xs @ np.conj(p)) @ a  # sum_j a_j |<X, p_j>|
    den = np.abs(xs @ np.conj(q)) @ b
    ratios = num / den
    lo, hi = float(ratios.min()), float(ratios.max())
    if lo < 1.0 / c - tol or hi > c + tol:
        idx = int(np.argmin(ratios)) if lo < 1.0 / c - tol else int(np.argmax(ratios))
        return ComparabilityResult(False, "hypothesis_violated", best_perm, best_prod,
                                   (lo, hi), witness=xs[idx])

    bound = fact * c
    ratio_ab = a / b
    if np.any(ratio_ab > bound + tol) or np.any(ratio_ab < 1.0 / bound - tol):
        return ComparabilityResult(False, "claim_failed", best_perm, best_prod, (lo, hi))
    return ComparabilityResult(True, "ok", best_perm, best_prod, (lo, hi))
