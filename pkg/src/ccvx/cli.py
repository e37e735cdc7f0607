"""Command-line interface.

Subcommands: ``verify`` runs a scenario file and writes reports; the
one-shot queries ``distance``, ``basis``, ``kernel``, ``bounds`` and
``exponent`` print a single result (and can write it as JSON with --out).

Exit codes: 0 all checks passed, 1 some check failed, 2 config/usage
error, 3 runtime numerical failure (a partial report is still written).
"""

from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from . import bergman, bounds, domains, geometry, harness, oracles
from .errors import CcvxError, ConfigError


def _parse_domain(text: str) -> domains.Domain:
    raw = text
    if not text.lstrip().startswith("{"):
        if not os.path.exists(text):
            raise ConfigError(f"domain file not found: {text}")
        with open(text, "r", encoding="utf-8") as fh:
            raw = fh.read()
    try:
        return domains.from_json(json.loads(raw))
    except (ValueError, KeyError, TypeError) as exc:
        raise ConfigError(f"bad domain spec: {exc}") from exc


def _parse_cvector(text: str) -> np.ndarray:
    try:
        return np.array([complex(part.strip().replace(" ", ""))
                         for part in text.split(",")])
    except ValueError as exc:
        raise ConfigError(f"cannot parse complex vector {text!r}: {exc}") from exc


def _emit(obj: dict, out: str | None, name: str) -> None:
    if out:
        os.makedirs(out, exist_ok=True)
        path = os.path.join(out, f"{name}.json")
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(harness.canonical_json(obj))
            fh.write("\n")
        print(f"wrote {path}")


def _cvec_list(v: np.ndarray) -> list:
    return [[float(c.real), float(c.imag)] for c in v]


def cmd_verify(args) -> int:
    report = harness.run_scenario(args.scenario, seed_override=args.seed,
                                  threads=args.threads)
    out_dir = args.out or "."
    paths = harness.report_emit(report, out_dir, timing_sidecar=args.timing)
    print(f"scenario {report.scenario}: {report.counts['passed']}/"
          f"{report.counts['total']} checks passed"
          + (f", {len(report.errors)} runtime errors" if report.errors else ""))
    print(f"report: {paths['json']}")
    if report.errors:
        return 3
    return 0 if report.passed else 1


def cmd_distance(args) -> int:
    dom = _parse_domain(args.domain)
    z = _parse_cvector(args.z)
    d_iso, contact = geometry.boundary_distance(dom, z)
    result = {"boundary_distance": d_iso, "nearest_point": _cvec_list(contact)}
    print(f"d(z) = {d_iso!r}")
    if args.X is not None:
        x = _parse_cvector(args.X)
        dd = geometry.directional_distance(dom, z, x)
        result["directional_distance"] = dd.value
        result["contact_phase"] = [dd.contact_phase.real, dd.contact_phase.imag] \
            if dd.contact_phase is not None else None
        print(f"d(z, X) = {dd.value!r}")
    _emit(result, args.out, "distance")
    return 0


def cmd_basis(args) -> int:
    dom = _parse_domain(args.domain)
    z = _parse_cvector(args.z)
    frame = geometry.minimal_basis(dom, z)
    result = {
        "distances": [float(d) for d in frame.distances],
        "p": frame.p,
        "basis_columns": [_cvec_list(frame.basis[:, j]) for j in range(frame.dim)],
        "contacts": [_cvec_list(frame.contacts[j]) for j in range(frame.dim)],
    }
    print("distances:", " ".join(repr(float(d)) for d in frame.distances))
    print("p =", repr(frame.p))
    _emit(result, args.out, "basis")
    return 0


def cmd_kernel(args) -> int:
    dom = _parse_domain(args.domain)
    z = _parse_cvector(args.z)
    model = bergman.build_gram(dom, degree=args.degree, mode=args.mode,
                               samples=args.samples, seed=args.seed or 0)
    if args.X is not None:
        est = bergman.metric_at(model, z, _parse_cvector(args.X))
        print(f"K_N(z) = {est.kernel!r}   M_N = {est.m_value!r}   B_N = {est.metric!r}"
              f"   [N={est.degree}, {est.mode}]")
        result = {"kernel": est.kernel, "m_value": est.m_value, "metric": est.metric}
    else:
        est = bergman.kernel_at(model, z)
        print(f"K_N(z) = {est.kernel!r}   [N={est.degree}, {est.mode}]")
        result = {"kernel": est.kernel}
    result.update({"degree": est.degree, "mode": est.mode,
                   "error_bar": est.error_bar, "jitter": est.jitter})
    _emit(result, args.out, "kernel")
    return 0


def cmd_bounds(args) -> int:
    dom = _parse_domain(args.domain)
    z = _parse_cvector(args.z)
    x = _parse_cvector(args.X)
    frame = geometry.minimal_basis(dom, z)
    sandwich = bounds.metric_sandwich_bounds(dom, z, x)
    ksq = bounds.kernel_product_bounds(dom, z, frame=frame)
    bdist = bounds.bergman_distance_bound(dom, z, x, frame=frame)
    fsum = bounds.frame_sum_bounds(dom, z, x, frame=frame)
    result = {
        "metric_sandwich": {"lower": sandwich.lower, "upper": sandwich.upper,
                            "directional_distance": sandwich.details["directional_distance"]},
        "kernel_product_interval": {"lower": ksq.lower, "upper": ksq.upper,
                                    "p": frame.p},
        "bergman_upper": {"coarse": bdist.details["coarse_upper"],
                          "refined": bdist.details["refined_upper"]},
        "frame_sum": {"lower": fsum.lower, "value": fsum.value, "upper": fsum.upper},
    }
    try:
        g, k = oracles.gamma_kappa_oracle(dom, z, x)
        result["gamma"] = g.value
        result["kappa"] = k.value
    except CcvxError:
        pass
    for key, val in result.items():
        print(f"{key}: {val}")
    _emit(result, args.out, "bounds")
    return 0


def cmd_exponent(args) -> int:
    deltas = np.geomspace(args.delta_min, args.delta_max, args.delta_count)
    fit = bounds.exponent_experiment(args.m, deltas)
    print(f"m={fit.exponent}: slope {fit.slope!r} (expected {fit.expected_slope!r})")
    result = {"m": fit.exponent, "slope": fit.slope,
              "expected_slope": fit.expected_slope,
              "deltas": [float(d) for d in fit.deltas],
              "isotropic": [float(v) for v in fit.isotropic],
              "directional": [float(v) for v in fit.directional]}
    _emit(result, args.out, "exponent")
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="ccvx",
                                description="distances, frames and verified "
                                            "metric estimates on C-convex domains")
    sub = p.add_subparsers(dest="command", required=True)

    v = sub.add_parser("verify", help="run a scenario file and emit reports")
    v.add_argument("scenario", help="path to the scenario JSON")
    v.add_argument("--seed", type=int, default=None,
                   help="override the scenario seed")
    v.add_argument("--out", default=None, help="report directory (default: cwd)")
    v.add_argument("--threads", type=int, default=1,
                   help="worker threads over base points (results identical)")
    v.add_argument("--timing", action="store_true",
                   help="also write a non-canonical timing sidecar")
    v.set_defaults(func=cmd_verify)

    common_dom = argparse.ArgumentParser(add_help=False)
    common_dom.add_argument("--domain", required=True,
                            help="domain JSON (inline or a file path)")
    common_dom.add_argument("--out", default=None, help="write result JSON here")

    d = sub.add_parser("distance", parents=[common_dom],
                       help="boundary and directional distances at a point")
    d.add_argument("--z", required=True, help="base point, comma-separated complex")
    d.add_argument("--X", default=None, help="direction, comma-separated complex")
    d.set_defaults(func=cmd_distance)

    b = sub.add_parser("basis", parents=[common_dom],
                       help="greedy minimal basis at a point")
    b.add_argument("--z", required=True)
    b.set_defaults(func=cmd_basis)

    k = sub.add_parser("kernel", parents=[common_dom],
                       help="numerical Bergman kernel/metric at a point")
    k.add_argument("--z", required=True)
    k.add_argument("--X", default=None)
    k.add_argument("--degree", type=int, default=None,
                   help="polynomial degree (default depends on the dimension)")
    k.add_argument("--samples", type=int, default=bergman.DEFAULT_MC_SAMPLES,
                   help="Monte-Carlo box draws (monte_carlo mode)")
    k.add_argument("--seed", type=int, default=0)
    k.add_argument("--mode", choices=["auto", "moment", "monte_carlo"],
                   default="auto")
    k.set_defaults(func=cmd_kernel)

    bo = sub.add_parser("bounds", parents=[common_dom],
                        help="two-sided estimate intervals at (z, X)")
    bo.add_argument("--z", required=True)
    bo.add_argument("--X", required=True)
    bo.set_defaults(func=cmd_bounds)

    e = sub.add_parser("exponent", help="boundary contact-order slope experiment")
    e.add_argument("--m", type=int, required=True, help="contact parameter")
    e.add_argument("--delta-min", type=float, default=1e-6)
    e.add_argument("--delta-max", type=float, default=1e-2)
    e.add_argument("--delta-count", type=int, default=9)
    e.add_argument("--out", default=None)
    e.set_defaults(func=cmd_exponent)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except CcvxError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
