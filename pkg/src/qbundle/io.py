"""Reading inputs: bundles, (d,2) divisors and quadric systems from JSON.

A path of the form ``examples/NAME.json`` that does not exist on disk is looked
up among the example files shipped inside the package.
"""

from __future__ import annotations

import json
from importlib import resources
from pathlib import Path

from .bundle import QuadricBundle, load_bundle
from .errors import BadShape
from .transform import BidegreeDivisor, QuadricSystem


def example_names():
    root = resources.files("qbundle") / "data"
    return sorted(p.name[:-5] for p in root.iterdir() if p.name.endswith(".json") and not p.name.startswith("_"))


def read_json(path) -> dict:
    p = Path(path)
    if not p.exists():
        name = p.name if p.suffix == ".json" else p.name + ".json"
        packaged = resources.files("qbundle") / "data" / name
        if p.parent.name in ("examples", "") and packaged.is_file():
            return json.loads(packaged.read_text())
        raise FileNotFoundError(f"no such input: {path}")
    return json.loads(p.read_text())


def input_kind(raw: dict) -> str:
    if "sigma" in raw:
        return "bundle"
    if "f" in raw:
        return "divisor"
    if "quadrics" in raw:
        return "system"
    raise BadShape("input is neither a bundle, a divisor nor a quadric system")


def parse_input(raw: dict, field=None):
    kind = input_kind(raw)
    if kind == "bundle":
        return load_bundle(raw, field)
    if kind == "divisor":
        return BidegreeDivisor.from_json(raw, field)
    return QuadricSystem.from_json(raw, field)


def load(path, field=None):
    return parse_input(read_json(path), field)


def as_bundle(obj) -> QuadricBundle:
    if isinstance(obj, QuadricBundle):
        return obj
    if isinstance(obj, BidegreeDivisor):
        return obj.to_bundle()
    raise BadShape("expected a bundle or a (d,2) divisor")


def as_divisor(obj) -> BidegreeDivisor:
    if isinstance(obj, BidegreeDivisor):
        return obj
    if isinstance(obj, QuadricBundle):
        return BidegreeDivisor.from_bundle(obj)
    raise BadShape("expected a (d,2) divisor")
