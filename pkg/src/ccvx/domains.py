"""Catalog of concrete domain models in C^n.

Every variant is C-convex: balls, polydiscs, weighted diamonds
(sum |z_j|/r_j < 1), complex ellipsoids (sum |z_j|^(2 m_j) < 1), the
Koebe slit plane C \\ [1/4, inf), finite products, and invertible linear
images.  Domains are open; membership treats points within
``BOUNDARY_EPS`` of the defining equality as outside, since every
construction downstream uses strict inequalities.

The JSON interchange format is ``{"variant": <tag>, "params": {...}}``
with complex numbers encoded as ``[re, im]`` pairs; see
``docs/formats.md`` for the full schema.  ``from_json(to_json(d))``
round-trips losslessly.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionMismatch, OutsideDomain, SamplingError, UnboundedDomain
from .linalg import as_vector

BOUNDARY_EPS = 1e-12
# Numeric representation of the measure-zero slit of the Koebe domain.
SLIT_IM_EPS = 1e-14
SLIT_RE_EPS = 1e-14

_CHUNK = 1 << 16


@dataclass(frozen=True)
class SymmetryInfo:
    """Fast-path metadata: which simplifications are sound for a variant."""

    is_reinhardt: bool
    is_circular: bool
    is_convex: bool
    is_bounded: bool


class Domain:
    """Common interface of all catalog variants."""

    variant: str = "abstract"

    @property
    def dim(self) -> int:
        raise NotImplementedError

    @property
    def is_bounded(self) -> bool:
        return self.symmetry().is_bounded

    @property
    def is_convex(self) -> bool:
        return self.symmetry().is_convex

    def symmetry(self) -> SymmetryInfo:
        raise NotImplementedError

    def contains_batch(self, z: np.ndarray) -> np.ndarray:
        """Vectorized membership for an (m, dim) array of points."""
        raise NotImplementedError

    def contains(self, z) -> bool:
        z = as_vector(z, dim=self.dim)
        return bool(self.contains_batch(z.reshape(1, -1))[0])

    def bounding_box(self) -> tuple[np.ndarray, np.ndarray]:
        """(lo, hi) in R^(2n), coordinates ordered [Re z_1..Re z_n, Im z_1..Im z_n].

        Contains the closure of the domain; tight within a factor 2 per axis
        for catalog variants.
        """
        raise NotImplementedError

    def params(self) -> dict:
        raise NotImplementedError

    # -- derived helpers ---------------------------------------------------

    def enclosing_radius(self, z) -> float:
        """Radius of a ball around z containing the whole (bounded) domain."""
        lo, hi = self.bounding_box()
        n = self.dim
        z = as_vector(z, dim=n)
        x = np.concatenate([z.real, z.imag])
        reach = np.maximum(np.abs(lo - x), np.abs(hi - x))
        return float(np.linalg.norm(reach))

    def to_json(self) -> dict:
        return {"variant": self.variant, "params": self.params()}

    def canonical_json(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True, separators=(",", ":"))

    def domain_hash(self) -> str:
        return hashlib.sha256(self.canonical_json().encode()).hexdigest()[:16]

    def __repr__(self) -> str:  # pragma: no cover - debugging aid
        return f"{type(self).__name__}({self.params()})"


def _cplx(pair) -> complex:
    return complex(float(pair[0]), float(pair[1]))


def _cplx_out(z: complex) -> list[float]:
    return [float(np.real(z)), float(np.imag(z))]


def _vec_out(v: np.ndarray) -> list[list[float]]:
    return [_cplx_out(z) for z in v]


@dataclass(frozen=True, eq=False)
class Ball(Domain):
    center: np.ndarray
    radius: float
    variant = "ball"

    def __post_init__(self):
        object.__setattr__(self, "center", as_vector(self.center))
        if not self.radius > 0:
            raise ValueError("ball radius must be positive")

    @property
    def dim(self) -> int:
        return self.center.size

    def symmetry(self) -> SymmetryInfo:
        centered = bool(np.all(self.center == 0))
        return SymmetryInfo(is_reinhardt=centered, is_circular=centered,
                            is_convex=True, is_bounded=True)

    def contains_batch(self, z: np.ndarray) -> np.ndarray:
        return np.linalg.norm(z - self.center, axis=1) - self.radius <= -BOUNDARY_EPS

    def bounding_box(self):
        x = np.concatenate([self.center.real, self.center.imag])
        return x - self.radius, x + self.radius

    def params(self) -> dict:
        return {"center": _vec_out(self.center), "radius": float(self.radius)}


@dataclass(frozen=True, eq=False)
class Polydisc(Domain):
    center: np.ndarray
    radii: np.ndarray
    variant = "polydisc"

    def __post_init__(self):
        object.__setattr__(self, "center", as_vector(self.center))
        object.__setattr__(self, "radii", np.asarray(self.radii, dtype=float))
        if self.radii.shape != (self.center.size,):
            raise DimensionMismatch("polydisc radii/center dimension mismatch")
        if np.any(self.radii <= 0):
            raise ValueError("polydisc radii must be positive")

    @property
    def dim(self) -> int:
        return self.center.size

    def symmetry(self) -> SymmetryInfo:
        centered = bool(np.all(self.center == 0))
        return SymmetryInfo(is_reinhardt=centered, is_circular=centered,
                            is_convex=True, is_bounded=True)

    def contains_batch(self, z: np.ndarray) -> np.ndarray:
        margins = np.abs(z - self.center) - self.radii
        return np.max(margins, axis=1) <= -BOUNDARY_EPS

    def bounding_box(self):
        x = np.concatenate([self.center.real, self.center.imag])
        r = np.concatenate([self.radii, self.radii])
        return x - r, x + r

    def params(self) -> dict:
        return {"center": _vec_out(self.center), "radii": [float(r) for r in self.radii]}


@dataclass(frozen=True, eq=False)
class WeightedDiamond(Domain):
    """The set sum_j |z_j| / r_j < 1; all radii 1 gives the model diamond."""

    radii: np.ndarray
    variant = "weighted_diamond"

    def __post_init__(self):
        object.__setattr__(self, "radii", np.atleast_1d(np.asarray(self.radii, dtype=float)))
        if np.any(self.radii <= 0):
            raise ValueError("diamond radii must be positive")

    @property
    def dim(self) -> int:
        return self.radii.size

    def symmetry(self) -> SymmetryInfo:
        return SymmetryInfo(True, True, True, True)

    def contains_batch(self, z: np.ndarray) -> np.ndarray:
        return np.sum(np.abs(z) / self.radii, axis=1) - 1.0 <= -BOUNDARY_EPS

    def bounding_box(self):
        r = np.concatenate([self.radii, self.radii])
        return -r, r

    def params(self) -> dict:
        return {"radii": [float(r) for r in self.radii]}


@dataclass(frozen=True, eq=False)
class ComplexEllipsoid(Domain):
    """The set sum_j |z_j|^(2 m_j) < 1 for positive integer exponents m_j."""

    exponents: tuple[int, ...]
    variant = "complex_ellipsoid"

    def __post_init__(self):
        exps = tuple(int(m) for m in np.atleast_1d(self.exponents))
        if any(m < 1 for m in exps):
            raise ValueError("ellipsoid exponents must be positive integers")
        object.__setattr__(self, "exponents", exps)

    @property
    def dim(self) -> int:
        return len(self.exponents)

    def symmetry(self) -> SymmetryInfo:
        return SymmetryInfo(True, True, True, True)

    def contains_batch(self, z: np.ndarray) -> np.ndarray:
        m = np.asarray(self.exponents, dtype=float)
        return np.sum(np.abs(z) ** (2 * m), axis=1) - 1.0 <= -BOUNDARY_EPS

    def bounding_box(self):
        n = self.dim
        ones = np.ones(2 * n)
        return -ones, ones

    def params(self) -> dict:
        return {"exponents": [int(m) for m in self.exponents]}


@dataclass(frozen=True, eq=False)
class KoebeSlitPlane(Domain):
    """C with the ray [1/4, inf) removed; the Koebe image of the unit disc."""

    variant = "koebe_slit_plane"

    @property
    def dim(self) -> int:
        return 1

    def symmetry(self) -> SymmetryInfo:
        return SymmetryInfo(False, False, False, False)

    def contains_batch(self, z: np.ndarray) -> np.ndarray:
        w = z[:, 0]
        on_slit = (np.abs(w.imag) < SLIT_IM_EPS) & (w.real >= 0.25 - SLIT_RE_EPS)
        return ~on_slit

    def bounding_box(self):
        raise UnboundedDomain("the Koebe slit plane has no bounding box")

    def params(self) -> dict:
        return {}

    def slit_distance_batch(self, z: np.ndarray) -> np.ndarray:
        """Euclidean distance from each point to the slit [1/4, inf)."""
        w = z[:, 0]
        d_right = np.abs(w.imag)
        d_left = np.abs(w - 0.25)
        return np.where(w.real >= 0.25, d_right, d_left)


@dataclass(frozen=True, eq=False)
class Product(Domain):
    factors: tuple[Domain, ...]
    variant = "product"

    def __post_init__(self):
        factors = tuple(self.factors)
        if len(factors) < 2:
            raise ValueError("a product needs at least two factors")
        object.__setattr__(self, "factors", factors)
        offsets = np.cumsum([0] + [f.dim for f in factors])
        object.__setattr__(self, "_offsets", offsets)

    @property
    def dim(self) -> int:
        return int(self._offsets[-1])

    def blocks(self, z: np.ndarray) -> list[np.ndarray]:
        return [z[:, self._offsets[i]:self._offsets[i + 1]] for i in range(len(self.factors))]

    def symmetry(self) -> SymmetryInfo:
        syms = [f.symmetry() for f in self.factors]
        return SymmetryInfo(all(s.is_reinhardt for s in syms),
                            all(s.is_circular for s in syms),
                            all(s.is_convex for s in syms),
                            all(s.is_bounded for s in syms))

    def contains_batch(self, z: np.ndarray) -> np.ndarray:
        ok = np.ones(z.shape[0], dtype=bool)
        for f, blk in zip(self.factors, self.blocks(z)):
            ok &= f.contains_batch(blk)
        return ok

    def bounding_box(self):
        los, his = zip(*(f.bounding_box() for f in self.factors))
        n_each = [f.dim for f in self.factors]
        lo_re = np.concatenate([lo[:k] for lo, k in zip(los, n_each)])
        lo_im = np.concatenate([lo[k:] for lo, k in zip(los, n_each)])
        hi_re = np.concatenate([hi[:k] for hi, k in zip(his, n_each)])
        hi_im = np.concatenate([hi[k:] for hi, k in zip(his, n_each)])
        return np.concatenate([lo_re, lo_im]), np.concatenate([hi_re, hi_im])

    def params(self) -> dict:
        return {"factors": [f.to_json() for f in self.factors]}


@dataclass(frozen=True, eq=False)
class LinearImage(Domain):
    """The image A(base) + shift of a catalog domain under an invertible map."""

    base: Domain
    map: np.ndarray
    shift: np.ndarray
    variant = "linear_image"

    def __post_init__(self):
        a = np.asarray(self.map, dtype=np.complex128)
        n = self.base.dim
        if a.shape != (n, n):
            raise DimensionMismatch(f"map must be {n}x{n}, got {a.shape}")
        det = np.linalg.det(a)
        if abs(det) <= 1e-12:
            raise ValueError(f"linear image map is not invertible (|det| = {abs(det):.3e})")
        object.__setattr__(self, "map", a)
        object.__setattr__(self, "shift", as_vector(self.shift, dim=n))
        object.__setattr__(self, "_inv", np.linalg.inv(a))
        object.__setattr__(self, "_abs_det", float(abs(det)))
        if not self.base.is_bounded and n > 1:
            # n = 1 linear maps are conformal scalings, so every metric
            # quantity transports exactly; higher dimensions would need a
            # bracketing radius the unbounded base cannot provide.
            raise UnboundedDomain("linear images of unbounded bases are supported only for n = 1")

    @property
    def dim(self) -> int:
        return self.base.dim

    @property
    def abs_det(self) -> float:
        return self._abs_det

    def pullback_batch(self, z: np.ndarray) -> np.ndarray:
        return (z - self.shift) @ self._inv.T

    def pullback(self, z: np.ndarray) -> np.ndarray:
        return self._inv @ (as_vector(z, dim=self.dim) - self.shift)

    def pushforward(self, w) -> np.ndarray:
        return self.map @ as_vector(w, dim=self.dim) + self.shift

    def symmetry(self) -> SymmetryInfo:
        s = self.base.symmetry()
        circ = s.is_circular and bool(np.all(self.shift == 0))
        return SymmetryInfo(False, circ, s.is_convex, s.is_bounded)

    def contains_batch(self, z: np.ndarray) -> np.ndarray:
        return self.base.contains_batch(self.pullback_batch(z))

    def bounding_box(self):
        lo, hi = self.base.bounding_box()
        n = self.dim
        c = (lo + hi) / 2.0
        h = (hi - lo) / 2.0
        # real 2n x 2n representation of multiplication by the complex matrix
        a = self.map
        m = np.block([[a.real, -a.imag], [a.imag, a.real]])
        center = m @ c + np.concatenate([self.shift.real, self.shift.imag])
        half = np.abs(m) @ h
        return center - half, center + half

    def params(self) -> dict:
        return {
            "base": self.base.to_json(),
            "map": [_vec_out(row) for row in self.map],
            "shift": _vec_out(self.shift),
        }


_VARIANTS = {
    "ball": Ball,
    "polydisc": Polydisc,
    "weighted_diamond": WeightedDiamond,
    "complex_ellipsoid": ComplexEllipsoid,
    "koebe_slit_plane": KoebeSlitPlane,
    "product": Product,
    "linear_image": LinearImage,
}


def from_json(obj: dict) -> Domain:
    """Parse a domain from its JSON object form."""
    if not isinstance(obj, dict) or "variant" not in obj:
        raise ValueError("domain JSON must be an object with a 'variant' key")
    tag = obj["variant"]
    params = obj.get("params", {})
    if tag == "ball":
        return Ball(center=np.array([_cplx(p) for p in params["center"]]),
                    radius=float(params["radius"]))
    if tag == "polydisc":
        return Polydisc(center=np.array([_cplx(p) for p in params["center"]]),
                        radii=np.array([float(r) for r in params["radii"]]))
    if tag == "weighted_diamond":
        return WeightedDiamond(radii=np.array([float(r) for r in params["radii"]]))
    if tag == "complex_ellipsoid":
        return ComplexEllipsoid(exponents=tuple(int(m) for m in params["exponents"]))
    if tag == "koebe_slit_plane":
        return KoebeSlitPlane()
    if tag == "product":
        return Product(factors=tuple(from_json(f) for f in params["factors"]))
    if tag == "linear_image":
        return LinearImage(base=from_json(params["base"]),
                           map=np.array([[_cplx(e) for e in row] for row in params["map"]]),
                           shift=np.array([_cplx(p) for p in params["shift"]]))
    raise ValueError(f"unknown domain variant {tag!r}")


def unit_disc() -> Ball:
    return Ball(center=np.zeros(1, dtype=np.complex128), radius=1.0)


@dataclass(frozen=True)
class VolumeEstimate:
    volume: float
    stderr: float
    accepted: int
    candidates: int
    box_volume: float


def _chunk_rng(seed: int, chunk_index: int) -> np.random.Generator:
    # Chunk streams are independent of how many chunks preceding callers
    # consumed, so parallel chunked sampling merged by index reproduces the
    # serial stream.
    return np.random.Generator(np.random.PCG64(
        np.random.SeedSequence(entropy=int(seed), spawn_key=(int(chunk_index),))))


def sample_chunk(domain: Domain, seed: int, chunk_index: int,
                 chunk_size: int = _CHUNK) -> tuple[np.ndarray, int]:
    """Accepted points and candidate count for one deterministic chunk."""
    lo, hi = domain.bounding_box()
    n = domain.dim
    rng = _chunk_rng(seed, chunk_index)
    u = rng.random((chunk_size, 2 * n))
    x = lo + u * (hi - lo)
    z = x[:, :n] + 1j * x[:, n:]
    keep = domain.contains_batch(z)
    return z[keep], chunk_size


def sample_uniform(domain: Domain, count: int, seed: int,
                   chunk_size: int = _CHUNK,
                   min_acceptance: float = 1e-4) -> tuple[np.ndarray, VolumeEstimate]:
    """Uniform points in a bounded domain by rejection from its bounding box.

    Deterministic for fixed seed regardless of chunking or parallel chunk
    evaluation.  Also returns the Monte-Carlo volume estimate
    box_volume * acceptance_ratio with its standard error.
    """
    if count < 1:
        raise ValueError("count must be at least 1")
    if not domain.is_bounded:
        raise UnboundedDomain("sample_uniform requires a bounded domain")
    lo, hi = domain.bounding_box()
    box_vol = float(np.prod(hi - lo))

    pieces = []
    accepted = 0
    candidates = 0
    chunk = 0
    while accepted < count:
        pts, drawn = sample_chunk(domain, seed, chunk, chunk_size)
        pieces.append(pts)
        accepted += len(pts)
        candidates += drawn
        chunk += 1
        if candidates >= max(10 * chunk_size, 2 * count) and accepted < min_acceptance * candidates:
            raise SamplingError(
                f"acceptance ratio {accepted}/{candidates} below {min_acceptance}; "
                "bounding box too loose for rejection sampling")
        if chunk > 65536:
            raise SamplingError("sampling did not converge (chunk limit reached)")

    p = accepted / candidates
    est = VolumeEstimate(volume=box_vol * p,
                         stderr=box_vol * float(np.sqrt(p * (1.0 - p) / candidates)),
                         accepted=accepted, candidates=candidates, box_volume=box_vol)
    return np.concatenate(pieces, axis=0)[:count], est


def require_inside(domain: Domain, z) -> np.ndarray:
    z = as_vector(z, dim=domain.dim)
    if not domain.contains(z):
        raise OutsideDomain(f"point {z} is not in the domain")
    return z
