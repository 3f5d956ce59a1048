"""Command-line front end: ``constwidth volume|verify|mc|trend|mesh``.

Single reports are JSON documents, tables are CSV and meshes are OBJ or
PLY.  Every JSON document carries the tool version, the full run
configuration and a timestamp; floats are written with 17 significant
digits.  Exit codes: 0 success, 1 property or estimator failure, 2 usage
error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import datetime as _dt
import io
import json
import math
import os
import sys

from . import __version__
from . import bodies, mesh, montecarlo, verify, volume
from .quadrature import QuadratureError

EXIT_OK, EXIT_FAILED, EXIT_USAGE, EXIT_NUMERICAL = 0, 1, 2, 3
THREADS_ENV = "CONSTWIDTH_THREADS"


# --------------------------------------------------------------------------
# serialization


def _fmt_float(x: float) -> str:
    if math.isnan(x):
        return "NaN"
    if math.isinf(x):
        return "Infinity" if x > 0 else "-Infinity"
    s = format(x, ".17g")
    return s if any(ch in s for ch in ".en") else s + ".0"


def to_json(obj, indent: int = 2, _level: int = 0) -> str:
    """JSON text with every float written to 17 significant digits."""
    pad = " " * (indent * (_level + 1))
    end = " " * (indent * _level)
    if isinstance(obj, bool) or obj is None:
        return json.dumps(obj)
    if isinstance(obj, float):
        return _fmt_float(obj)
    if isinstance(obj, int):
        return str(obj)
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {to_json(v, indent, _level + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        items = [pad + to_json(v, indent, _level + 1) for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + end + "]"
    if hasattr(obj, "item"):
        return to_json(obj.item(), indent, _level)
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def _timestamp() -> str:
    return _dt.datetime.now(_dt.timezone.utc).isoformat(timespec="seconds")


def _document(command: str, config: dict, **payload) -> dict:
    doc = {"tool": "constwidth", "version": __version__, "command": command, "config": config}
    doc.update(payload)
    doc["timestamp"] = _timestamp()
    return doc


def _emit(text: str, out):
    if out in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)


def _emit_json(doc: dict, out):
    _emit(to_json(doc) + "\n", out)


def _config(args) -> dict:
    skip = {"func", "parser"}
    return {k: v for k, v in sorted(vars(args).items()) if k not in skip}


def _error_doc(args, exc, kind: str) -> dict:
    err = {"type": kind, "message": str(exc)}
    best = getattr(exc, "best", None)
    if best is not None:
        err["best_value"] = float(best.value)
        err["best_error_estimate"] = float(best.abs_error_estimate)
    return _document(args.command, _config(args), error=err)


# --------------------------------------------------------------------------
# argument types


def _count(text: str) -> int:
    """Positive sample counts, accepting forms such as ``1e7``."""
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not value.is_integer() or value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text!r}")
    return int(value)


def _default_threads() -> int:
    env = os.environ.get(THREADS_ENV)
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            pass
    return os.cpu_count() or 1


# --------------------------------------------------------------------------
# commands

VOLUME_METHODS = {
    "u3": ("cases", "theorem", "generic"),
    "meissner": ("closed", "generic"),
    "meissner-avg": ("cases", "generic"),
}

VERIFY_BODIES = ("m", "u", "u3", "meissner-a", "meissner-b", "meissner-avg", "ball", "corrupted-demo")
MESH_BODIES = {
    "u3": bodies.u3,
    "meissner-a": bodies.meissner_a,
    "meissner-b": bodies.meissner_b,
    "meissner-avg": bodies.meissner_average,
    "ball": lambda: bodies.ball(3),
}


def cmd_volume(args) -> int:
    method = args.method or VOLUME_METHODS[args.body][0]
    if method not in VOLUME_METHODS[args.body]:
        args.parser.error(f"method {method!r} is not available for {args.body}")
    args.method = method
    if args.body == "u3":
        report = volume.volume_u3(method, args.rel_tol)
    elif args.body == "meissner":
        if method == "closed":
            report = volume.volume_meissner_closed()
        else:
            tol = volume.GENERIC_REL_TOL if args.rel_tol is None else args.rel_tol
            r = volume.ag_volume_generic(bodies.support_meissner_a, rel_tol=tol)
            report = volume.VolumeReport.from_volume(
                bodies.meissner_a(), r.volume, "generic", r.error_estimate, r.evaluations
            )
    else:
        report = volume.volume_meissner_average(method, args.rel_tol)
    _emit_json(_document("volume", _config(args), result=report.to_dict()), args.out)
    return EXIT_OK


def _verify_body(args):
    name = args.body
    if name == "m":
        return bodies.BodySpec(bodies.BodyKind.M, args.dim or 3)
    if name == "u":
        return bodies.BodySpec(bodies.BodyKind.U, args.dim or 3)
    if name == "corrupted-demo":
        return verify.corrupted_u3()
    return {
        "u3": bodies.u3,
        "meissner-a": bodies.meissner_a,
        "meissner-b": bodies.meissner_b,
        "meissner-avg": bodies.meissner_average,
        "ball": lambda: bodies.ball(args.dim or 3),
    }[name]()


def cmd_verify(args) -> int:
    body = _verify_body(args)
    samples = args.samples
    if samples is None:
        samples = {"curvature": 2000, "sandwich": 10**6}.get(args.suite, 10**5)
        args.samples = samples
    reports = verify.run_suite(args.suite, body, samples, args.seed, args.region, args.threads)
    passed = all(r.passed for r in reports)
    doc = _document("verify", _config(args), passed=passed, reports=[r.to_dict() for r in reports])
    _emit_json(doc, args.out)
    return EXIT_OK if passed else EXIT_FAILED


def cmd_mc(args) -> int:
    est_fn = {
        "m": montecarlo.estimate_volume_M,
        "u": montecarlo.estimate_volume_U,
        "ball": montecarlo.estimate_volume_ball,
    }[args.body]
    est = est_fn(args.dim, args.samples, args.seed, args.threads)
    lo, hi = est.ratio_root_interval(3.0)
    result = est.to_dict()
    result["ratio_root_lo"] = lo
    result["ratio_root_hi"] = hi
    _emit_json(_document("mc", _config(args), result=result), args.out)
    return EXIT_OK


TREND_COLUMNS = ("n", "volume", "std_error", "ratio_root", "ratio_root_lo", "ratio_root_hi", "hits")


def trend_csv(rows) -> str:
    buf = io.StringIO()
    buf.write(",".join(TREND_COLUMNS) + "\n")
    for row in rows:
        cells = [_fmt_float(row[c]) if isinstance(row[c], float) else str(row[c]) for c in TREND_COLUMNS]
        buf.write(",".join(cells) + "\n")
    return buf.getvalue()


def cmd_trend(args) -> int:
    rows = montecarlo.ratio_trend(args.lo, args.hi, args.samples, args.seed, args.threads)
    _emit(trend_csv(rows), args.out)
    return EXIT_OK


def cmd_mesh(args) -> int:
    body = MESH_BODIES[args.body]()
    m = mesh.generate_mesh(body, args.subdiv)
    summary = mesh.mesh_summary(m)
    summary["body"] = str(body)
    summary["subdivisions"] = args.subdiv
    if args.out:
        mesh.export_mesh(m, args.format, args.out)
        summary["file"] = args.out
        summary["format"] = args.format
    _emit_json(_document("mesh", _config(args), result=summary), args.summary_out)
    return EXIT_OK


# --------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="constwidth", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"constwidth {__version__}")
    parser.add_argument(
        "--threads",
        type=int,
        default=_default_threads(),
        help=f"worker threads (default: ${THREADS_ENV} or the CPU count); results do not depend on it",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("volume", help="volume of U_3, the Meissner bodies or their average")
    p.add_argument("--body", choices=sorted(VOLUME_METHODS), required=True)
    p.add_argument("--method", choices=("cases", "theorem", "generic", "closed"))
    p.add_argument("--rel-tol", type=float, default=None)
    p.add_argument("--out", default=None, help="output file (default stdout)")
    p.set_defaults(func=cmd_volume, parser=p)

    p = sub.add_parser("verify", help="run a property suite")
    p.add_argument("--suite", required=True, choices=("width", "symmetry", "convexity", "curvature", "sandwich", "meissner-swap"))
    p.add_argument("--body", choices=VERIFY_BODIES, default="u3")
    p.add_argument("--dim", type=int, default=None, help="dimension for m, u and ball")
    p.add_argument("--samples", type=_count, default=None)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--region", default="I", help="I, IIa, IIb, III, or face/rounded for Meissner bodies")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_verify, parser=p)

    p = sub.add_parser("mc", help="Monte Carlo volume estimate")
    p.add_argument("--body", choices=("m", "u", "ball"), required=True)
    p.add_argument("--dim", type=int, required=True)
    p.add_argument("--samples", type=_count, default=10**6)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_mc, parser=p)

    p = sub.add_parser("trend", help="CSV table of n-th root volume ratios of M_n")
    p.add_argument("--lo", type=int, required=True)
    p.add_argument("--hi", type=int, required=True)
    p.add_argument("--samples", type=_count, default=10**6)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_trend, parser=p)

    p = sub.add_parser("mesh", help="labelled boundary mesh and summary")
    p.add_argument("--body", choices=sorted(MESH_BODIES), required=True)
    p.add_argument("--subdiv", type=int, default=6)
    p.add_argument("--format", choices=("obj", "ply"), default="obj")
    p.add_argument("--out", default=None, help="mesh file; omitted means summary only")
    p.add_argument("--summary-out", default=None, help="JSON summary file (default stdout)")
    p.set_defaults(func=cmd_mesh, parser=p)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except QuadratureError as exc:
        _emit_json(_error_doc(args, exc, "numerical"), None)
        return EXIT_NUMERICAL
    except OSError as exc:
        _emit_json(_error_doc(args, exc, "io"), None)
        return EXIT_FAILED
    except ValueError as exc:
        _emit_json(_error_doc(args, exc, "failure"), None)
        return EXIT_FAILED


if __name__ == "__main__":
    sys.exit(main())
