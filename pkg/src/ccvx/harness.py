"""Scenario runner: load a config, run check suites, emit deterministic reports.

A scenario is one domain, a set of base points and directions, a list of
checks, and numerical settings.  Each check instance becomes one
``CheckRecord`` with an interval, an optional measured value, a pass flag
and a tolerance.  Reports are emitted as JSON (full fidelity) and CSV
(flat summary); for a fixed seed they are byte-identical across runs and
across worker counts, so wall-clock timings are kept out of the canonical
serialization and live in an optional sidecar.

Check identifiers (with their accepted aliases):

    metric_sandwich (prop1)   1/(4d) <= gamma <= kappa <= 1/d
    metric_ratio    (cor2)    kappa <= 4 gamma
    bergman_distance (thm8)   B*d bounded by the dimensional constant
    kernel_product  (thm9)    K*p^2 inside its constant interval
    frame_ratio     (prop10)  metric vs sum |X_j|/d_j ratio interval
    frame_sum       (eq16, eq19)  1/d <= sum |X_j|/d_j <= 4c/d
    diamond_hull    (lemma11) sampled diamond of safe discs lies inside
    contact_exponent (exponent)  log-log slope of the two distances
"""

from __future__ import annotations

import csv
import io
import json
import math
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import bergman, bounds, domains, geometry, oracles
from .errors import CcvxError, ConfigError, UnsupportedVariant

SCHEMA_VERSION = 1

CHECK_ALIASES = {
    "prop1": "metric_sandwich",
    "cor2": "metric_ratio",
    "thm8": "bergman_distance",
    "thm9": "kernel_product",
    "prop10": "frame_ratio",
    "eq16": "frame_sum",
    "eq19": "frame_sum",
    "lemma11": "diamond_hull",
    "exponent": "contact_exponent",
}

CHECK_NAMES = ("metric_sandwich", "metric_ratio", "bergman_distance",
               "kernel_product", "kernel_reference", "frame_ratio", "frame_sum",
               "diamond_hull", "contact_exponent")

_POINT_CHECKS = {"kernel_product", "kernel_reference", "diamond_hull"}  # need z only
_VECTOR_CHECKS = {"metric_sandwich", "metric_ratio", "bergman_distance",
                  "frame_ratio", "frame_sum"}               # need (z, X)

DEFAULT_TOLERANCES = {
    "closed_form": 1e-9,
    "stochastic_sigma": 3.0,
    "stochastic_rel": 0.03,
}


@dataclass(frozen=True)
class Numerics:
    degree: int | None = None
    samples: int = bergman.DEFAULT_MC_SAMPLES
    seed: int = 0
    tolerances: dict = field(default_factory=lambda: dict(DEFAULT_TOLERANCES))
    inclusion_samples: int = 100_000
    prefer_numerical: bool = False   # skip oracles for kernel/metric values
    exponent: dict = field(default_factory=lambda: {
        "ms": [1, 2, 3],
        "deltas": list(np.geomspace(1e-6, 1e-2, 9)),
        "rel_tol": 0.05,
    })


@dataclass(frozen=True)
class Scenario:
    name: str
    domain: domains.Domain
    points: list[np.ndarray]
    vectors: list[np.ndarray]
    checks: list[str]
    numerics: Numerics


@dataclass
class CheckRecord:
    check: str
    index: int
    domain_hash: str
    z: np.ndarray | None
    x: np.ndarray | None
    lower: float
    value: float | None
    upper: float
    tolerance: float
    passed: bool
    error_bar: float = 0.0
    source: str = "geometry"
    details: dict = field(default_factory=dict)
    wall_time: float = 0.0  # timing only; excluded from canonical reports


@dataclass
class Report:
    scenario: str
    seed: int
    passed: bool
    records: list[CheckRecord]
    counts: dict
    errors: list = field(default_factory=list)

    def to_obj(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "scenario": self.scenario,
            "seed": self.seed,
            "pass": self.passed,
            "counts": self.counts,
            "errors": self.errors,
            "records": [_record_obj(r) for r in self.records],
        }


def _vec_obj(v: np.ndarray | None):
    if v is None:
        return None
    return [[float(c.real), float(c.imag)] for c in v]


def _record_obj(r: CheckRecord) -> dict:
    return {
        "check": r.check,
        "index": r.index,
        "domain": r.domain_hash,
        "z": _vec_obj(r.z),
        "x": _vec_obj(r.x),
        "lower": r.lower,
        "value": r.value,
        "upper": r.upper,
        "tolerance": r.tolerance,
        "pass": r.passed,
        "error_bar": r.error_bar,
        "source": r.source,
        "details": r.details,
    }


# ---------------------------------------------------------------------------
# canonical serialization: sorted keys, round-trip float repr, inf as strings


def _canon(obj, out: list) -> None:
    if obj is None:
        out.append("null")
    elif obj is True:
        out.append("true")
    elif obj is False:
        out.append("false")
    elif isinstance(obj, str):
        out.append(json.dumps(obj))
    elif isinstance(obj, (int, np.integer)):
        out.append(str(int(obj)))
    elif isinstance(obj, (float, np.floating)):
        out.append(format_float(float(obj)))
    elif isinstance(obj, dict):
        out.append("{")
        for i, key in enumerate(sorted(obj)):
            if i:
                out.append(",")
            out.append(json.dumps(str(key)))
            out.append(":")
            _canon(obj[key], out)
        out.append("}")
    elif isinstance(obj, (list, tuple)):
        out.append("[")
        for i, item in enumerate(obj):
            if i:
                out.append(",")
            _canon(item, out)
        out.append("]")
    else:
        raise TypeError(f"cannot serialize {type(obj)!r}")


def format_float(x: float) -> str:
    if math.isnan(x):
        return '"nan"'
    if math.isinf(x):
        return '"inf"' if x > 0 else '"-inf"'
    return repr(x)


def canonical_json(obj) -> str:
    out: list = []
    _canon(obj, out)
    return "".join(out)


# ---------------------------------------------------------------------------
# config loading


def _strip_comments(text: str) -> str:
    lines = []
    for line in text.splitlines():
        stripped = line.lstrip()
        if stripped.startswith("//") or stripped.startswith("#"):
            continue
        lines.append(line)
    return "\n".join(lines)


def _parse_vector(obj, dim: int) -> np.ndarray:
    v = np.array([complex(p[0], p[1]) for p in obj])
    if v.size != dim:
        raise ConfigError(f"vector has dimension {v.size}, domain has {dim}")
    return v


def load_scenario(source, seed_override: int | None = None) -> Scenario:
    """Parse and validate a scenario from a path, JSON text, or dict."""
    if isinstance(source, dict):
        cfg = source
    else:
        text = str(source)
        looks_like_path = len(text) < 4000 and not text.lstrip().startswith("{")
        if looks_like_path:
            if not os.path.exists(text):
                raise ConfigError(f"scenario file not found: {text}")
            with open(text, "r", encoding="utf-8") as fh:
                text = fh.read()
        try:
            cfg = json.loads(_strip_comments(text))
        except json.JSONDecodeError as exc:
            raise ConfigError(f"scenario is not valid JSON: {exc}") from exc

    for key in ("name", "domain", "checks"):
        if key not in cfg:
            raise ConfigError(f"scenario is missing the {key!r} key")
    try:
        domain = domains.from_json(cfg["domain"])
    except (CcvxError, ValueError, KeyError, TypeError) as exc:
        raise ConfigError(f"bad domain spec: {exc}") from exc

    checks = []
    for c in cfg["checks"]:
        name = CHECK_ALIASES.get(c, c)
        if name not in CHECK_NAMES:
            raise ConfigError(f"unknown check {c!r}")
        if name not in checks:
            checks.append(name)

    num_cfg = dict(cfg.get("numerics", {}))
    tol = dict(DEFAULT_TOLERANCES)
    tol.update(num_cfg.get("tolerances", {}))
    exponent = dict(Numerics().exponent)
    exponent.update(num_cfg.get("exponent", {}))
    numerics = Numerics(degree=num_cfg.get("degree"),
                        samples=int(num_cfg.get("samples", bergman.DEFAULT_MC_SAMPLES)),
                        seed=int(seed_override if seed_override is not None
                                 else num_cfg.get("seed", 0)),
                        tolerances=tol,
                        inclusion_samples=int(num_cfg.get("inclusion_samples", 100_000)),
                        prefer_numerical=bool(num_cfg.get("prefer_numerical", False)),
                        exponent=exponent)

    points = _load_points(cfg.get("points", []), domain, numerics)
    vectors = _load_vectors(cfg.get("vectors", []), domain, numerics)

    needs_points = [c for c in checks if c in _POINT_CHECKS | _VECTOR_CHECKS]
    if needs_points and not points:
        raise ConfigError(f"checks {needs_points} need base points")
    needs_vectors = [c for c in checks if c in _VECTOR_CHECKS]
    if needs_vectors and not vectors:
        raise ConfigError(f"checks {needs_vectors} need direction vectors")
    for c in checks:
        if c in ("kernel_product", "bergman_distance") and not (
                domain.is_bounded or oracles.oracle_supports_kernel(domain)):
            raise ConfigError(f"check {c!r} needs a bounded domain or kernel oracle")
    return Scenario(name=str(cfg["name"]), domain=domain, points=points,
                    vectors=vectors, checks=checks, numerics=numerics)


def _load_points(obj, domain: domains.Domain, numerics: Numerics) -> list[np.ndarray]:
    n = domain.dim
    if isinstance(obj, dict):
        if "sample_count" in obj:
            pts, _ = domains.sample_uniform(domain, int(obj["sample_count"]),
                                            seed=numerics.seed)
            return [pts[i] for i in range(pts.shape[0])]
        if "boundary_approach" in obj:
            spec = obj["boundary_approach"]
            anchor = _parse_vector(spec["anchor"], n)
            inward = _parse_vector(spec["inward"], n)
            return [anchor + float(d) * inward for d in spec["deltas"]]
        raise ConfigError("points object must have sample_count or boundary_approach")
    return [_parse_vector(p, n) for p in obj]


def _load_vectors(obj, domain: domains.Domain, numerics: Numerics) -> list[np.ndarray]:
    n = domain.dim
    if isinstance(obj, dict):
        if "sphere_count" in obj:
            from .linalg import complex_sphere
            arr = complex_sphere(n, int(obj["sphere_count"]), seed=numerics.seed + 1)
            return [arr[i] for i in range(arr.shape[0])]
        raise ConfigError("vectors object must have sphere_count")
    return [_parse_vector(v, n) for v in obj]


# ---------------------------------------------------------------------------
# metric sourcing


class _ValueSources:
    """Resolve gamma/kappa/Bergman values for a scenario, building the
    numerical model lazily and at most once."""

    def __init__(self, scenario: Scenario):
        self.scenario = scenario
        self.domain = scenario.domain
        self._model = None
        self._model_failed: str | None = None

    def model(self):
        if self._model is None and self._model_failed is None:
            num = self.scenario.numerics
            try:
                self._model = bergman.build_gram(
                    self.domain, degree=num.degree, mode="auto",
                    samples=num.samples, seed=num.seed)
            except (CcvxError, ValueError) as exc:
                self._model_failed = str(exc)
        return self._model

    def gamma_kappa(self, z, x):
        try:
            g, k = oracles.gamma_kappa_oracle(self.domain, z, x)
            return g, k
        except UnsupportedVariant:
            return None, None

    def bergman_metric(self, z, x):
        """(value, source, error_bar) for B, oracle first, else numerical."""
        if not self.scenario.numerics.prefer_numerical:
            try:
                mv = oracles.bergman_metric_oracle(self.domain, z, x)
                return mv.value, "oracle_" + mv.exactness, 0.0
            except UnsupportedVariant:
                pass
        model = self.model()
        if model is None:
            return None, None, 0.0
        est = bergman.metric_at(model, z, x)
        return est.metric, model.mode, est.error_bar_metric

    def kernel(self, z):
        if not self.scenario.numerics.prefer_numerical:
            try:
                kv = oracles.bergman_oracle(self.domain, z)
                return kv.value, "oracle_" + kv.exactness, 0.0
            except UnsupportedVariant:
                pass
        model = self.model()
        if model is None:
            return None, None, 0.0
        est = bergman.kernel_at(model, z)
        return est.kernel, model.mode, est.error_bar


def _tolerance(numerics: Numerics, source: str | None, value: float | None,
               error_bar: float) -> float:
    tol = numerics.tolerances
    if source in (None, "geometry", "oracle_closed_form", "moment"):
        return float(tol["closed_form"])
    if source == "oracle_transported":
        return max(float(tol["closed_form"]), 1e-11 * (abs(value) if value else 1.0))
    return max(float(tol["stochastic_sigma"]) * error_bar,
               float(tol["stochastic_rel"]) * (abs(value) if value else 1.0))


# ---------------------------------------------------------------------------
# the individual checks


def _passes(lower: float, value: float | None, upper: float, tol: float) -> bool:
    if value is None:
        return lower <= upper
    return (lower - tol) <= value <= (upper + tol)


def _check_metric_sandwich(sc: Scenario, src: _ValueSources, idx, z, x) -> list[CheckRecord]:
    b = bounds.metric_sandwich_bounds(sc.domain, z, x)
    g, k = src.gamma_kappa(z, x)
    out = []
    h = sc.domain.domain_hash()
    if g is None:
        tol = _tolerance(sc.numerics, "geometry", None, 0.0)
        out.append(CheckRecord("metric_sandwich", idx, h, z, x, b.lower, None,
                               b.upper, tol, _passes(b.lower, None, b.upper, tol),
                               source="geometry", details=b.details))
        return out
    for mv in (g, k):
        tol = _tolerance(sc.numerics, "oracle_" + mv.exactness, mv.value, 0.0)
        out.append(CheckRecord("metric_sandwich", idx, h, z, x, b.lower, mv.value,
                               b.upper, tol, _passes(b.lower, mv.value, b.upper, tol),
                               source="oracle_" + mv.exactness,
                               details={**b.details, "kind": mv.kind}))
    return out


def _check_metric_ratio(sc: Scenario, src: _ValueSources, idx, z, x) -> list[CheckRecord]:
    g, k = src.gamma_kappa(z, x)
    if g is None:
        return []
    ratio = k.value / g.value
    tol = _tolerance(sc.numerics, "oracle_" + g.exactness, ratio, 0.0)
    return [CheckRecord("metric_ratio", idx, sc.domain.domain_hash(), z, x,
                        0.0, ratio, 4.0, tol, _passes(0.0, ratio, 4.0, tol),
                        source="oracle_" + g.exactness)]


def _check_bergman_distance(sc: Scenario, src: _ValueSources, idx, z, x,
                            frame) -> list[CheckRecord]:
    value, source, err = src.bergman_metric(z, x)
    b = bounds.bergman_distance_bound(sc.domain, z, x, metric_value=value, frame=frame)
    tol = _tolerance(sc.numerics, source, value, err)
    return [CheckRecord("bergman_distance", idx, sc.domain.domain_hash(), z, x,
                        b.lower, value, b.upper, tol,
                        _passes(b.lower, value, b.upper, tol),
                        error_bar=err, source=source or "unavailable",
                        details=b.details)]


def _check_kernel_product(sc: Scenario, src: _ValueSources, idx, z,
                          frame) -> list[CheckRecord]:
    value, source, err = src.kernel(z)
    b = bounds.kernel_product_bounds(sc.domain, z, kernel_value=value, frame=frame)
    scaled_err = err * (frame.p ** 2)
    tol = _tolerance(sc.numerics, source, b.value, scaled_err)
    return [CheckRecord("kernel_product", idx, sc.domain.domain_hash(), z, None,
                        b.lower, b.value, b.upper, tol,
                        _passes(b.lower, b.value, b.upper, tol),
                        error_bar=scaled_err, source=source or "unavailable",
                        details=b.details)]


def _check_kernel_reference(sc: Scenario, src: _ValueSources, idx, z
                            ) -> list[CheckRecord]:
    """Numerical-engine validation: the subspace kernel against the oracle."""
    try:
        ref = oracles.bergman_oracle(sc.domain, z)
    except UnsupportedVariant:
        return []
    model = src.model()
    if model is None:
        return []
    est = bergman.kernel_at(model, z)
    ratio = est.kernel / ref.value
    rel = float(sc.numerics.tolerances.get("kernel_rel",
                                           sc.numerics.tolerances["stochastic_rel"]))
    sigma = float(sc.numerics.tolerances["stochastic_sigma"])
    tol = sigma * est.error_bar / ref.value
    return [CheckRecord("kernel_reference", idx, sc.domain.domain_hash(), z, None,
                        1.0 - rel, ratio, 1.0 + rel, tol,
                        _passes(1.0 - rel, ratio, 1.0 + rel, tol),
                        error_bar=est.error_bar, source=model.mode,
                        details={"numerical": est.kernel, "oracle": ref.value,
                                 "oracle_exactness": ref.exactness})]


def _check_frame_ratio(sc: Scenario, src: _ValueSources, idx, z, x,
                       frame) -> list[CheckRecord]:
    out = []
    h = sc.domain.domain_hash()
    g, k = src.gamma_kappa(z, x)
    candidates = []
    if g is not None:
        candidates.append((g.value, "caratheodory", "oracle_" + g.exactness, 0.0))
        candidates.append((k.value, "kobayashi", "oracle_" + k.exactness, 0.0))
    bval, bsource, berr = src.bergman_metric(z, x)
    if bval is not None:
        candidates.append((bval, "bergman_metric", bsource, berr))
    for value, kind, source, err in candidates:
        b = bounds.frame_comparison_check(sc.domain, z, x, value, kind, frame=frame)
        rel_err = err / b.details["comparison_sum"] if err else 0.0
        tol = _tolerance(sc.numerics, source, b.value, rel_err)
        out.append(CheckRecord("frame_ratio", idx, h, z, x, b.lower, b.value,
                               b.upper, tol, _passes(b.lower, b.value, b.upper, tol),
                               error_bar=rel_err, source=source,
                               details={**b.details, "kind": kind}))
    return out


def _check_frame_sum(sc: Scenario, src: _ValueSources, idx, z, x,
                     frame) -> list[CheckRecord]:
    b = bounds.frame_sum_bounds(sc.domain, z, x, frame=frame)
    tol = _tolerance(sc.numerics, "geometry", b.value, 0.0)
    scale_tol = tol * max(1.0, abs(b.lower))
    return [CheckRecord("frame_sum", idx, sc.domain.domain_hash(), z, x,
                        b.lower, b.value, b.upper, scale_tol,
                        _passes(b.lower, b.value, b.upper, scale_tol),
                        details=b.details)]


def _check_diamond_hull(sc: Scenario, src: _ValueSources, idx, z,
                        frame) -> list[CheckRecord]:
    radii = np.array([geometry.directional_distance(sc.domain, z, frame.basis[:, j]).value
                      for j in range(sc.domain.dim)])
    radii = radii * (1.0 - 1e-6)
    res = geometry.diamond_inclusion_check(sc.domain, z, radii,
                                           samples=sc.numerics.inclusion_samples,
                                           seed=sc.numerics.seed + 17 * idx,
                                           basis=frame.basis)
    details = {"radii": [float(r) for r in radii],
               "samples": res.samples_checked}
    if res.witness is not None:
        details["witness"] = _vec_obj(res.witness)
    return [CheckRecord("diamond_hull", idx, sc.domain.domain_hash(), z, None,
                        0.0, 1.0 if res.ok else 0.0, 1.0, 0.0, res.ok,
                        details=details)]


def _check_contact_exponent(sc: Scenario, src: _ValueSources) -> list[CheckRecord]:
    cfg = sc.numerics.exponent
    out = []
    for i, m in enumerate(cfg["ms"]):
        fit = bounds.exponent_experiment(int(m), cfg["deltas"])
        rel = float(cfg.get("rel_tol", 0.05))
        lo = fit.expected_slope * (1 - rel)
        hi = fit.expected_slope * (1 + rel)
        out.append(CheckRecord("contact_exponent", i, sc.domain.domain_hash(),
                               None, None, lo, fit.slope, hi, 0.0,
                               _passes(lo, fit.slope, hi, 0.0),
                               details={"m": int(m),
                                        "expected_slope": fit.expected_slope,
                                        "deltas": [float(d) for d in fit.deltas],
                                        "isotropic": [float(v) for v in fit.isotropic],
                                        "directional": [float(v) for v in fit.directional]}))
    return out


# ---------------------------------------------------------------------------
# the runner


def _needs_frame(checks: list[str]) -> bool:
    return any(c in ("bergman_distance", "kernel_product", "frame_ratio",
                     "frame_sum", "diamond_hull") for c in checks)


def _run_point(sc: Scenario, src: _ValueSources, pi: int, z: np.ndarray
               ) -> list[CheckRecord]:
    t0 = time.perf_counter()
    records: list[CheckRecord] = []
    frame = geometry.minimal_basis(sc.domain, z) if _needs_frame(sc.checks) else None
    n_vec = len(sc.vectors)
    for check in sc.checks:
        if check == "contact_exponent":
            continue
        if check in _POINT_CHECKS:
            idx = pi
            if check == "kernel_product":
                records.extend(_check_kernel_product(sc, src, idx, z, frame))
            elif check == "diamond_hull":
                records.extend(_check_diamond_hull(sc, src, idx, z, frame))
            continue
        for vi, x in enumerate(sc.vectors):
            idx = pi * n_vec + vi
            if check == "metric_sandwich":
                records.extend(_check_metric_sandwich(sc, src, idx, z, x))
            elif check == "metric_ratio":
                records.extend(_check_metric_ratio(sc, src, idx, z, x))
            elif check == "bergman_distance":
                records.extend(_check_bergman_distance(sc, src, idx, z, x, frame))
            elif check == "frame_ratio":
                records.extend(_check_frame_ratio(sc, src, idx, z, x, frame))
            elif check == "frame_sum":
                records.extend(_check_frame_sum(sc, src, idx, z, x, frame))
    dt = time.perf_counter() - t0
    for r in records:
        r.wall_time = dt / max(len(records), 1)
    return records


def run_scenario(source, seed_override: int | None = None,
                 threads: int = 1) -> Report:
    """Execute every requested check; deterministic for a fixed seed.

    Worker count changes scheduling only: records are produced per point,
    merged by point index, and sorted, so the report bytes never depend on
    ``threads``.
    """
    sc = load_scenario(source, seed_override=seed_override)
    src = _ValueSources(sc)

    model_fallthrough = (
        ("kernel_product" in sc.checks
         and not oracles.oracle_supports_kernel(sc.domain))
        or (any(c in ("bergman_distance", "frame_ratio") for c in sc.checks)
            and not oracles.oracle_supports_bergman_metric(sc.domain)))
    if model_fallthrough and sc.domain.is_bounded:
        src.model()  # build eagerly, once, outside the worker pool

    records: list[CheckRecord] = []
    errors: list[dict] = []

    def run_point(pi: int, z: np.ndarray) -> list[CheckRecord]:
        try:
            return _run_point(sc, src, pi, z)
        except CcvxError as exc:
            errors.append({"point_index": pi, "error": str(exc)})
            return []

    if threads > 1 and len(sc.points) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            futures = [pool.submit(run_point, pi, z)
                       for pi, z in enumerate(sc.points)]
            for fut in futures:
                records.extend(fut.result())
    else:
        for pi, z in enumerate(sc.points):
            records.extend(run_point(pi, z))
    if "contact_exponent" in sc.checks:
        try:
            records.extend(_check_contact_exponent(sc, src))
        except CcvxError as exc:
            errors.append({"point_index": -1, "error": str(exc)})

    order = {name: i for i, name in enumerate(CHECK_NAMES)}
    records.sort(key=lambda r: (order[r.check], r.index,
                                r.details.get("kind", ""), r.source))
    errors.sort(key=lambda e: e["point_index"])
    counts = {
        "total": len(records),
        "passed": sum(1 for r in records if r.passed),
        "failed": sum(1 for r in records if not r.passed),
    }
    return Report(scenario=sc.name, seed=sc.numerics.seed,
                  passed=counts["failed"] == 0 and not errors,
                  records=records, counts=counts, errors=errors)


# ---------------------------------------------------------------------------
# emission


def _csv_complex(v: np.ndarray | None) -> str:
    if v is None:
        return ""
    parts = []
    for c in v:
        sign = "+" if c.imag >= 0 else "-"
        parts.append(f"{c.real!r}{sign}{abs(c.imag)!r}j")
    return ";".join(parts)


def report_emit(report: Report, out_dir: str, base_name: str | None = None,
                timing_sidecar: bool = False) -> dict[str, str]:
    """Write the JSON and CSV reports side by side; returns the paths.

    JSON is canonical: sorted keys, shortest round-trip float repr (17
    significant digits suffice to reparse exactly), infinities as the
    strings "inf"/"-inf".  Re-running the same scenario and seed reproduces
    the files byte for byte.
    """
    if not report.records:
        raise ValueError("refusing to emit an empty report")
    os.makedirs(out_dir, exist_ok=True)
    base = base_name or report.scenario
    json_path = os.path.join(out_dir, f"{base}.json")
    csv_path = os.path.join(out_dir, f"{base}.csv")

    with open(json_path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(canonical_json(report.to_obj()))
        fh.write("\n")

    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["check", "index", "domain", "z", "x", "lower", "value",
                     "upper", "tolerance", "pass", "error_bar", "source"])
    for r in report.records:
        writer.writerow([
            r.check, r.index, r.domain_hash, _csv_complex(r.z), _csv_complex(r.x),
            format_float(r.lower).strip('"'),
            "" if r.value is None else format_float(r.value).strip('"'),
            format_float(r.upper).strip('"'),
            format_float(r.tolerance).strip('"'),
            int(r.passed),
            format_float(r.error_bar).strip('"'),
            r.source,
        ])
    with open(csv_path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(buf.getvalue())

    paths = {"json": json_path, "csv": csv_path}
    if timing_sidecar:
        timing_path = os.path.join(out_dir, f"{base}.timing.json")
        with open(timing_path, "w", encoding="utf-8") as fh:
            json.dump({"records": [
                {"check": r.check, "index": r.index, "wall_time": r.wall_time}
                for r in report.records]}, fh, indent=1)
        paths["timing"] = timing_path
    return paths
