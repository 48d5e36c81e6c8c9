"""Golden corpus: reference numbers for the shipped examples, with a runner.

Each item recomputes one value and compares it with the expected one.  The
runner returns plain JSON data so that repeated runs can be compared byte for
byte.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Callable

from .audit import audit
from .bundle import bundle_validate, discriminant, volume
from .certify import SearchBudget, certify
from .count import brute_count, bundle_layout, count_bundle, count_rational_height, fiber_layout
from .enumerate import ProductPoint
from .errors import QBundleError
from .fields import make_field
from .io import as_bundle, load
from .parser import parse_poly
from .transform import QuadricSystem, fiber_X, is_cone, polys_and_layout, psi_apply, strict_transform

# the displayed strict transform of the ex1 divisor at z = (1,1,1)
EX1_STRICT = [
    "x1*(y0^2+y1^2+y2^2+y3^2+y0*y4+y3*y4) + x0*(y1*y3 - y3^2 - 2*y0*y4 - y3*y4 + y4^2)",
    "y0^2+y1^2-y1*y2+y0*y3+y1*y3-y3^2-y0*y4-y1*y4",
    "y0^2+y1^2+y2^2+2*y3^2+2*y0*y4+y2*y4+y3*y4",
]
EX2_S112 = ["y0^2 - y1^2 + y3^2 + y4^2", "y2^2 - y3^2 + y4^2"]
EX_IN_DISCRIMINANT = "-x0^24*x1^7*(x1 - x0)"
HEIGHT_COUNTS = {1: 6, 2: 104, 3: 391}


@dataclass
class Golden:
    name: str
    expected: object
    compute: Callable  # threads -> observed


def _count(name, field, method, threads):
    b = as_bundle(load(f"examples/{name}.json", field))
    return count_bundle(b, method=method, threads=threads).count


def _same_set(a, b, layout, field, threads, chart=None):
    """Point-set equality of two systems, optionally on the complement of ``chart = 0``."""

    def n(polys):
        total = brute_count(polys, layout, field, threads)
        if chart is not None:
            total -= brute_count(polys + [chart], layout, field, threads)
        return total

    na, nb, nab = n(a), n(b), n(a + b)
    return {"left": na, "right": nb, "both": nab, "equal": na == nb == nab}


def _fiber_x_ex_in(threads):
    F = make_field("F:5")
    X = fiber_X(load("examples/ex_in_Q3.json", F), [1, 1, 1])
    shown = load("examples/ex_in_X111.json", F)
    return _same_set(list(X.quadrics), list(shown.quadrics), fiber_layout(X.vs), F, threads)["equal"]


def _fiber_x_ex2(threads):
    F = make_field("F:3")
    X = fiber_X(load("examples/ex2.json"), [1, 1, 2])
    shown = QuadricSystem.from_json({"n": 4, "quadrics": EX2_S112}, F)
    return _same_set(list(X.quadrics), list(shown.quadrics), fiber_layout(X.vs), F, threads)["equal"]


def _strict_ex1(threads):
    F = make_field("F:5")
    div = load("examples/ex1.json", F)
    ours = strict_transform(div, [1, 1, 1])
    shown = [parse_poly(t, div.vs, F) for t in EX1_STRICT]
    x1 = parse_poly("x1", div.vs, F)
    return _same_set(ours, shown, bundle_layout(div.vs), F, threads, chart=x1)["equal"]


def _psi_ex1(threads):
    div = load("examples/ex1.json")
    p = ProductPoint.make(div.field, [0, 1], [0, 0, 0, 0, 1])
    return psi_apply(div, p).to_json(div.field)


def _cone(name, threads):
    return is_cone(load(f"examples/{name}.json")).is_cone


def _rank_two_cone(threads):
    return is_cone(QuadricSystem.from_json({"n": 3, "quadrics": ["y0^2 - y1^2"]})).is_cone


def _certify(name, threads, want_anchor=None):
    cert = certify(load(f"examples/{name}.json"), SearchBudget(height=2, threads=threads)).to_json()
    out = {"verdict": cert["verdict"], "audit": audit(json.loads(json.dumps(cert))).ok}
    if want_anchor:
        out["has_anchor"] = want_anchor in cert["theorem_path"]
    return out


def _op_ball(threads):
    cert = certify(load("examples/op_ball.json"), SearchBudget(height=2, threads=threads)).to_json()
    sampling = next(c for c in cert["checklist"] if c["hypothesis"] == "real discriminant sampling")
    return {"verdict": cert["verdict"], "delta_negative_everywhere": not sampling["evidence"]["found_nonneg"]}


def _discriminant_ex_in(threads):
    b = as_bundle(load("examples/ex_in_Q4.json"))
    det, delta = discriminant(b)
    ref = parse_poly(EX_IN_DISCRIMINANT, det.vs, det.field).monic()
    return {"delta": delta, "matches": det == ref}


def _volume_ex_in(threads):
    return str(volume(as_bundle(load("examples/ex_in_Q4.json"))))


def _validate_bad(threads):
    try:
        bundle_validate(as_bundle(load("examples/bad_degrees.json")))
    except QBundleError as exc:
        return exc.code
    return "valid"


def _height(bound, threads):
    div = load("examples/ex1.json")
    polys, layout = polys_and_layout(div)
    chart = (div.vs.index("x0"), div.vs.index("y0"))
    return count_rational_height(polys, layout, chart, bound, "max", threads).count


def corpus():
    items = []
    for p, n in [(5, 961), (7, 3151), (11, 17447), (13, 33489), (17, 94249)]:
        items.append(Golden(f"count ex_in_Q3 F:{p}", n, lambda t, p=p: _count("ex_in_Q3", f"F:{p}", "brute", t)))
    items.append(Golden("count ex_in_Q3 F:5 hybrid", 961, lambda t: _count("ex_in_Q3", "F:5", "hybrid", t)))
    items.append(Golden("count ex2 F:3", 187, lambda t: _count("ex2", None, "brute", t)))
    for a, n in [(1, 13), (2, 109), (3, 757), (4, 6805)]:
        method = "hybrid" if a <= 2 else "fiberwise"
        items.append(Golden(f"count ptsff F:3^{a}", n, lambda t, a=a, m=method: _count("ptsff", f"F:3^{a}", m, t)))
    items.append(Golden("psi ex1", [["1", "1", "1"], ["0", "0", "0", "0", "1"]], _psi_ex1))
    items.append(Golden("fiber_X ex_in (1,1,1) over F:5", True, _fiber_x_ex_in))
    items.append(Golden("fiber_X ex2 (1,1,2) over F:3", True, _fiber_x_ex2))
    items.append(Golden("strict transform ex1 over F:5", True, _strict_ex1))
    items.append(Golden("cone ex_in_X111", False, lambda t: _cone("ex_in_X111", t)))
    items.append(Golden("cone rank-2 quadric", True, _rank_two_cone))
    items.append(Golden("discriminant ex_in_Q4", {"delta": 32, "matches": True}, _discriminant_ex_in))
    items.append(Golden("volume ex_in_Q4", "-3072", _volume_ex_in))
    items.append(Golden("validate bad_degrees", "DegreeIncompatible", _validate_bad))
    items.append(Golden("certify not0", {"verdict": "Rational", "audit": True}, lambda t: _certify("not0", t)))
    items.append(Golden("certify bideg12", {"verdict": "Rational", "audit": True}, lambda t: _certify("bideg12", t)))
    items.append(Golden("certify ex1", {"verdict": "Unirational", "audit": True, "has_anchor": True},
                        lambda t: _certify("ex1", t, "Prop 333P1")))
    items.append(Golden("certify ex_in_Q4", {"verdict": "Unirational", "audit": True},
                        lambda t: _certify("ex_in_Q4", t)))
    items.append(Golden("certify op_ball", {"verdict": "Unknown", "delta_negative_everywhere": True}, _op_ball))
    for bound, n in HEIGHT_COUNTS.items():
        items.append(Golden(f"height ex1 U B={bound}", n, lambda t, b=bound: _height(b, t)))
    return items


def run_goldens(threads=None, names=None) -> dict:
    results = []
    for g in corpus():
        if names and g.name not in names:
            continue
        try:
            observed = g.compute(threads)
        except QBundleError as exc:
            observed = {"error": exc.code}
        results.append({"name": g.name, "expected": g.expected, "observed": observed, "pass": observed == g.expected})
    passed = sum(r["pass"] for r in results)
    return {
        "schema": "qbundle.goldens/1",
        "passed": passed,
        "failed": len(results) - passed,
        "items": results,
    }
