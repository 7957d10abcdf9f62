"""Command-line entry points: run-flow, verify, property-suite.

Exit codes:
  0  run completed (including a flow that stopped on CurvatureDegenerate;
     that is a reported outcome, not a process failure)
  1  property-suite found a violated invariant
  2  unreadable or invalid configuration / profile
  3  initial data rejected by the convexity certificate

run-flow writes a CSV trace of every recorded functional, a JSON report and
optional profile snapshots; reruns of the same configuration are
byte-identical.  All floats are written with repr-faithful %.17g.
"""

import argparse
import json
import math
import os
import sys

import numpy as np

from . import flow, functionals, props, sphere_geom, stereo
from .errors import ConfigurationError, DomainError, ProfileFormatError
from .symfunc import CurvatureSpec

FLOW_KEYS = (
    "cfl",
    "stop_eps_equator",
    "stop_F_min",
    "max_steps",
    "record_every",
    "record_dt",
    "t_end",
    "snapshot_every",
    "dt_fixed",
)


def _fail(msg, code):
    print(f"error: {msg}", file=sys.stderr)
    return code


def _g17(x):
    return "%.17g" % x


def _sanitize(obj):
    """Replace non-finite floats so the report stays strict JSON."""
    if isinstance(obj, dict):
        return {k: _sanitize(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_sanitize(v) for v in obj]
    if isinstance(obj, (np.floating, float)):
        x = float(obj)
        return x if math.isfinite(x) else None
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, np.ndarray):
        return [_sanitize(v) for v in obj.tolist()]
    return obj


def build_field(doc):
    """GraphField from the config's geometry section."""
    chart = doc.get("chart", "axisym")
    n = doc.get("n")
    if n is None:
        raise ConfigurationError("config needs the dimension 'n'")
    nodes = int(doc.get("nodes", 256))
    init = doc.get("initial")
    if not isinstance(init, dict) or "type" not in init:
        raise ConfigurationError("config needs initial: {type: ...}")
    kind = init["type"]
    if kind == "ball":
        return sphere_geom.ball_profile(chart, int(n), nodes, float(init["rho"]))
    if kind == "cosine":
        amps = init.get("amplitudes", {})
        if not isinstance(amps, dict):
            raise ConfigurationError("cosine amplitudes must be a mode -> value map")
        return sphere_geom.cosine_profile(
            chart, int(n), nodes, float(init["base"]), amps
        )
    if kind == "file":
        field = sphere_geom.read_profile(init["path"])
        if field.chart != chart or field.n != int(n):
            raise ConfigurationError(
                "profile header does not match the configured chart/dimension"
            )
        return field
    raise ConfigurationError(f"unknown initial type {kind!r}")


def build_spec(doc, n):
    cur = doc.get("curvature")
    if not isinstance(cur, dict) or "family" not in cur:
        raise ConfigurationError("config needs curvature: {family: ...}")
    try:
        return CurvatureSpec.from_dict(cur, int(n))
    except (ValueError, KeyError, TypeError) as exc:
        raise ConfigurationError(f"bad curvature section: {exc}") from exc


def build_config(doc, field, spec):
    kw = {}
    fl = doc.get("flow", {})
    if not isinstance(fl, dict):
        raise ConfigurationError("flow section must be a mapping")
    unknown = set(fl) - set(FLOW_KEYS)
    if unknown:
        raise ConfigurationError(f"unknown flow keys: {sorted(unknown)}")
    for key in FLOW_KEYS:
        if key in fl and fl[key] is not None:
            if key in ("max_steps", "record_every", "snapshot_every"):
                kw[key] = int(fl[key])
            else:
                kw[key] = float(fl[key])
    try:
        return flow.FlowConfig(spec=spec, initial=field, **kw)
    except ConfigurationError:
        raise
    except (TypeError, ValueError) as exc:
        raise ConfigurationError(str(exc)) from exc


def _phi3_keys(n):
    return list(range(1, (n - 1) // 2 + 1))


def write_trace_csv(trace, path):
    """Fixed per-dimension schema; every value %.17g."""
    n = trace.records[0].n
    cols = ["t"]
    cols += [f"V{k}" for k in range(n + 1)]
    cols += [f"W{k}" for k in range(n + 2)]
    if n >= 2:
        cols += ["phi1", "phi2"]
    cols += [f"phi3_k{k}" for k in _phi3_keys(n)]
    cols += ["Hmax", "Fmin", "pinch", "decay_q1", "decay_q2"]
    with open(path, "w") as fh:
        fh.write(",".join(cols) + "\n")
        for rec in trace.records:
            vals = [rec.t]
            vals += list(rec.V)
            vals += list(rec.W)
            if n >= 2:
                vals += [rec.phi1, rec.phi2]
            vals += [rec.phi3[k] for k in _phi3_keys(n)]
            vals += [rec.Hmax, rec.Fmin, rec.pinch, rec.decay[1], rec.decay[2]]
            fh.write(",".join(_g17(v) for v in vals) + "\n")


def build_report(trace, certificate, config_doc):
    rec = trace.final_record
    n = rec.n
    slacks = {}
    if n >= 2:
        for which in ("I", "II"):
            s = functionals.af_slack(rec, which)
            slacks[which] = {"value": s.value, "equality": s.equality, "scale": s.scale}
        third = {}
        for k in _phi3_keys(n):
            s = functionals.af_slack(rec, "III", k=k)
            third[str(k)] = {"value": s.value, "equality": s.equality, "scale": s.scale}
        if third:
            slacks["III"] = third
    report = {
        "status": trace.termination,
        "detail": trace.detail,
        "t_stop": trace.t_stop,
        "t_star_estimate": trace.t_star_estimate,
        "steps": trace.steps,
        "u_max": rec.u_max,
        "u_min": rec.u_min,
        "grad_max": rec.grad_max,
        "certificate": certificate.to_dict(),
        "V": list(rec.V),
        "W": list(rec.W),
        "phi1": rec.phi1,
        "phi2": rec.phi2,
        "phi3": {str(k): v for k, v in rec.phi3.items()},
        "slacks": slacks,
        "decay": {f"q{q}": v for q, v in rec.decay.items()},
        "config": config_doc,
    }
    return _sanitize(report)


def cmd_run_flow(args):
    path = args.config
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        return _fail(f"cannot read config {path}: {exc}", 2)
    try:
        field = build_field(doc)
        spec = build_spec(doc, doc.get("n"))
        config = build_config(doc, field, spec)
    except (ConfigurationError, DomainError, ProfileFormatError, ValueError) as exc:
        return _fail(str(exc), 2)

    cert = stereo.certify(field)
    if not cert.strictly_convex:
        print(
            f"initial data rejected: kappa_min = {cert.kappa_min:.6e} "
            f"at node {cert.violating_node}",
            file=sys.stderr,
        )
        return 3

    trace = flow.run(config)

    prefix = doc.get("out_prefix")
    if prefix is None:
        prefix = os.path.splitext(path)[0]
    csv_path = prefix + ".csv"
    report_path = prefix + "_report.json"
    write_trace_csv(trace, csv_path)
    with open(report_path, "w") as fh:
        json.dump(build_report(trace, cert, doc), fh, indent=2, allow_nan=False)
        fh.write("\n")
    snap_paths = []
    for i, (t, fld) in enumerate(trace.snapshots):
        snap_path = f"{prefix}_snap{i:04d}.txt"
        sphere_geom.write_profile(fld, snap_path)
        snap_paths.append(snap_path)
    print(
        f"status={trace.termination} t_stop={_g17(trace.t_stop)} "
        f"steps={trace.steps} records={len(trace.records)}"
    )
    print(f"wrote {csv_path}, {report_path}, {len(snap_paths)} snapshots")
    return 0


def cmd_verify(args):
    try:
        field = sphere_geom.read_profile(args.profile)
    except ProfileFormatError as exc:
        return _fail(str(exc), 2)
    if args.n is not None and field.n != args.n:
        return _fail(f"profile has n={field.n}, expected n={args.n}", 2)
    if args.chart is not None and field.chart != args.chart:
        return _fail(f"profile has chart={field.chart}, expected {args.chart}", 2)
    cert = stereo.certify(field)
    # report convention: curvature-dependent entries use F = mean curvature
    spec = CurvatureSpec("mean", field.n)
    rec = functionals.make_record(0.0, field, spec)
    doc = {
        "chart": field.chart,
        "n": field.n,
        "nodes": field.nodes,
        "certificate": cert.to_dict(),
        "transfer_residual": stereo.curvature_transfer_residual(field),
        "V": list(rec.V),
        "W": list(rec.W),
        "phi1": rec.phi1,
        "phi2": rec.phi2,
        "phi3": {str(k): v for k, v in rec.phi3.items()},
        "decay": {f"q{q}": v for q, v in rec.decay.items()},
    }
    if field.n >= 2:
        doc["slacks"] = {
            which: functionals.af_slack(rec, which).value for which in ("I", "II")
        }
        doc["slacks"].update(
            {
                f"III_k{k}": functionals.af_slack(rec, "III", k=k).value
                for k in _phi3_keys(field.n)
            }
        )
    json.dump(_sanitize(doc), sys.stdout, indent=2, allow_nan=False)
    print()
    return 0


def cmd_property_suite(args):
    if args.samples < 1:
        return _fail("samples must be >= 1", 2)
    report = props.run_suite(seed=args.seed, samples=args.samples)
    for res in report.results:
        verdict = "PASS" if res.ok else "FAIL"
        print(
            f"{res.name}: samples={res.samples} failures={res.failures} "
            f"worst_margin={res.worst_margin:.3e} {verdict}"
        )
        if res.first_failure:
            print(f"  first failure: {res.first_failure}")
    ok = report.ok
    print(f"suite: seed={report.seed} {'PASS' if ok else 'FAIL'}")
    return 0 if ok else 1


def main(argv=None):
    parser = argparse.ArgumentParser(
        prog="sphereflow",
        description="Inverse curvature flows of convex graphs in the round sphere.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run-flow", help="integrate a flow from a JSON config")
    p_run.add_argument("config", help="path to the JSON run configuration")
    p_run.set_defaults(fn=cmd_run_flow)

    p_ver = sub.add_parser("verify", help="certificate and functionals of a profile")
    p_ver.add_argument("profile", help="path to a profile file")
    p_ver.add_argument("--n", type=int, default=None, help="expected dimension")
    p_ver.add_argument(
        "--chart", choices=sphere_geom.CHARTS, default=None, help="expected chart"
    )
    p_ver.set_defaults(fn=cmd_verify)

    p_prop = sub.add_parser("property-suite", help="randomized invariant checks")
    p_prop.add_argument("--seed", type=int, default=42)
    p_prop.add_argument("--samples", type=int, default=1000)
    p_prop.set_defaults(fn=cmd_property_suite)

    args = parser.parse_args(argv)
    return args.fn(args)


if __name__ == "__main__":
    sys.exit(main())
