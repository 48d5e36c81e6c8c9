"""Command-line front end.

Every subcommand prints exactly one JSON document on stdout.  Elapsed time goes
to stderr so that stdout is byte-identical across runs and thread counts.

Exit codes: 0 success, 1 golden failures, 2 invalid input (error JSON on
stderr), 3 unsupported request or exhausted budget, 64 usage error.
"""

from __future__ import annotations

import argparse
import json
import sys
import time

from .audit import audit
from .bundle import (
    anticanonical,
    bundle_validate,
    discriminant,
    multidegree,
    restrict_to_line,
    slice_bundle,
    volume,
)
from .certify import SearchBudget, certify
from .count import count_bundle, count_rational_height, count_points_fq
from .enumerate import ProductPoint
from .errors import InfiniteField, QBundleError, ValidationError
from .fields import make_field
from .goldens import run_goldens
from .io import as_bundle, as_divisor, input_kind, parse_input, read_json
from .transform import (
    QuadricSystem,
    build_M,
    fiber_X,
    is_cone,
    polys_and_layout,
    project_from_point,
    psi_apply,
    smoothness_check,
    strict_transform,
)

EX_OK, EX_GOLDEN_FAIL, EX_INVALID, EX_UNSUPPORTED, EX_USAGE = 0, 1, 2, 3, 64


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _vector(text):
    return [c.strip() for c in text.split(",") if c.strip()]


def _point(text):
    return [_vector(block) for block in text.split(";")]


def _common(p):
    p.add_argument("--field", help="field override: Q, F:p, F:p^a or F:p^a:[c0,...,1]")
    p.add_argument("--threads", type=int, default=None)
    p.add_argument("--height-budget", type=int, default=2)
    p.add_argument("--time-cap-ms", type=int, default=None)
    p.add_argument("--convention", choices=["max", "product"], default="max")
    p.add_argument("--check-level", type=int, choices=[1, 2], default=1)


def build_parser():
    parser = _Parser(prog="qbundle", description="Quadric bundle toolkit")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def cmd(name, **kw):
        p = sub.add_parser(name, **kw)
        _common(p)
        return p

    for name in ("validate", "discriminant", "volume", "certify"):
        cmd(name).add_argument("input")
    sub.choices["certify"].add_argument("--audit", action="store_true", help="attach the independent audit")
    p = cmd("slice")
    p.add_argument("input")
    p.add_argument("--j", type=int, required=True)
    p = cmd("restrict-line")
    p.add_argument("input")
    p.add_argument("--alpha", type=_vector, required=True)
    p.add_argument("--beta", type=_vector, required=True)
    p = cmd("transform")
    p.add_argument("op", choices=["matrix", "fiber-x", "psi", "strict", "cone", "project"])
    p.add_argument("input")
    p.add_argument("--zbar", type=_vector)
    p.add_argument("--point", type=_point, help="blocks separated by ';', e.g. '0,1;0,0,0,0,1'")
    p.add_argument("--center", type=_vector)
    p = cmd("count")
    p.add_argument("input")
    p.add_argument("--method", choices=["brute", "fiberwise", "hybrid"], default="brute")
    p = cmd("count-height")
    p.add_argument("input")
    p.add_argument("--chart", type=_vector, default=[], help="variables required to be nonzero, e.g. x0,y0")
    p = cmd("goldens")
    p.add_argument("--only", action="append", default=None, help="run just the named item (repeatable)")
    p = cmd("smoothness")
    p.add_argument("input")
    return parser


def _load(args):
    return parse_input(read_json(args.input), args.field)


def _require(value, flag):
    if value is None:
        raise UsageError(f"{flag} is required for this operation")
    return value


def _system_for(args, obj):
    if isinstance(obj, QuadricSystem):
        return obj
    return fiber_X(as_divisor(obj), _require(args.zbar, "--zbar"))


def _validate(args):
    raw = read_json(args.input)
    kind = input_kind(raw)
    obj = parse_input(raw, args.field)
    out = {"valid": True, "kind": kind, "field": obj.field.spec}
    if kind == "system":
        out["n"] = obj.n
        return out
    b, md = bundle_validate(as_bundle(obj))
    out["multidegree"] = md.to_json()
    return out


def _discriminant(args):
    det, delta = discriminant(as_bundle(_load(args)))
    return {"discriminant": det.to_text(), "delta": delta}


def _volume(args):
    b = as_bundle(_load(args))
    bundle_validate(b)
    out = anticanonical(b).to_json()
    out["volume"] = str(volume(b))
    out["delta"] = multidegree(b).delta
    return out


def _slice(args):
    return slice_bundle(as_bundle(_load(args)), args.j).to_json()


def _restrict(args):
    return restrict_to_line(as_bundle(_load(args)), args.alpha, args.beta).to_json()


def _transform(args):
    obj = _load(args)
    F = obj.field
    if args.op == "matrix":
        return {"matrix": build_M(as_divisor(obj)).to_text()}
    if args.op == "fiber-x":
        return fiber_X(as_divisor(obj), _require(args.zbar, "--zbar")).to_json()
    if args.op == "psi":
        blocks = _require(args.point, "--point")
        p = ProductPoint.make(F, *blocks)
        return {"image": psi_apply(as_divisor(obj), p).to_json(F)}
    if args.op == "strict":
        eqs = strict_transform(as_divisor(obj), _require(args.zbar, "--zbar"))
        return {"chart": "x1 != 0", "equations": [e.to_text() for e in eqs]}
    if args.op == "cone":
        sys_ = _system_for(args, obj)
        return is_cone(sys_).to_json(sys_.field)
    sys_ = _system_for(args, obj)
    return project_from_point(sys_, _require(args.center, "--center")).to_json()


def _budget(args):
    return SearchBudget(
        height=args.height_budget,
        time_cap_ms=args.time_cap_ms,
        threads=args.threads,
        check_level=args.check_level,
    )


def _certify(args):
    cert = certify(_load(args), _budget(args)).to_json()
    if args.audit:
        cert["audit"] = audit(json.loads(json.dumps(cert))).to_json()
    return cert


def _count(args):
    obj = _load(args)
    if not obj.field.is_finite:
        raise InfiniteField("point counting needs a finite field; pass --field F:q")
    if isinstance(obj, QuadricSystem):
        polys, layout = polys_and_layout(obj)
        report = count_points_fq(polys, layout, obj.field, args.threads)
    else:
        report = count_bundle(as_bundle(obj), method=args.method, threads=args.threads)
    return report.to_json(timing=False)


def _count_height(args):
    obj = _load(args)
    polys, layout = polys_and_layout(obj)
    vs = polys[0].vs
    chart = tuple(vs.index(v) for v in args.chart)
    report = count_rational_height(polys, layout, chart, args.height_budget, args.convention,
                                   args.threads, args.time_cap_ms)
    out = report.to_json(timing=False)
    out["chart"] = list(args.chart)
    return out


def _smoothness(args):
    return smoothness_check(_load(args), level=args.check_level, threads=args.threads).to_json()


def _goldens(args):
    return run_goldens(threads=args.threads, names=args.only)


HANDLERS = {
    "validate": _validate,
    "discriminant": _discriminant,
    "volume": _volume,
    "slice": _slice,
    "restrict-line": _restrict,
    "transform": _transform,
    "certify": _certify,
    "count": _count,
    "count-height": _count_height,
    "smoothness": _smoothness,
    "goldens": _goldens,
}


def _emit_error(payload, stream):
    print(json.dumps(payload, indent=2), file=stream)


def run(argv=None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    try:
        args = build_parser().parse_args(argv)
    except UsageError as exc:
        _emit_error({"error": "UsageError", "message": str(exc)}, stderr)
        return EX_USAGE
    start = time.perf_counter()
    try:
        if args.field:
            make_field(args.field)
        out = HANDLERS[args.command](args)
    except UsageError as exc:
        _emit_error({"error": "UsageError", "message": str(exc)}, stderr)
        return EX_USAGE
    except ValidationError as exc:
        _emit_error(exc.to_json(), stderr)
        return EX_INVALID
    except QBundleError as exc:
        _emit_error(exc.to_json(), stderr)
        return EX_UNSUPPORTED
    except FileNotFoundError as exc:
        _emit_error({"error": "FileNotFound", "message": str(exc)}, stderr)
        return EX_INVALID
    except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
        _emit_error({"error": "BadInput", "message": f"{type(exc).__name__}: {exc}"}, stderr)
        return EX_INVALID
    print(json.dumps(out, indent=2), file=stdout)
    print(json.dumps({"command": args.command, "elapsed_ms": int((time.perf_counter() - start) * 1000)}),
          file=stderr)
    if args.command == "goldens" and out["failed"]:
        return EX_GOLDEN_FAIL
    return EX_OK


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
