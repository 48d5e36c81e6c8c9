"""Compare the numba kernels with the pure-numpy fallback.

    python benchmarks/bench_kernels.py [--repeat 3]

Each case runs once to warm up (JIT compile), then ``--repeat`` times per
backend; the best wall time is reported together with the count so that the
two backends can be checked for agreement.
"""

import argparse
import json
import time

from qbundle import kernels
from qbundle._jit import JIT_ENABLED
from qbundle.count import count_bundle, count_rational_height
from qbundle.io import as_bundle, load
from qbundle.transform import polys_and_layout


def finite_count(field):
    b = as_bundle(load("examples/ex_in_Q3.json", field))
    return lambda backend: count_bundle(b, method="brute", threads=1, backend=backend).count


def height(bound):
    div = load("examples/ex1.json")
    polys, layout = polys_and_layout(div)
    chart = (div.vs.index("x0"), div.vs.index("y0"))
    return lambda backend: count_rational_height(polys, layout, chart, bound, "max", 1, backend=backend).count


def gate(p, nvars):
    return lambda backend: list(kernels.quadric_gate(p, nvars, backend))


CASES = [
    ("ex_in_Q3 over F:11", finite_count("F:11")),
    ("ex_in_Q3 over F:17", finite_count("F:17")),
    ("ex1 height B=5", height(5)),
    ("quadric gate F:5, 3 vars", gate(5, 3)),
]


def best_time(fn, backend, repeat):
    value = fn(backend)
    best = float("inf")
    for _ in range(repeat):
        t = time.perf_counter()
        fn(backend)
        best = min(best, time.perf_counter() - t)
    return value, best


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    backends = ["numba", "numpy"] if JIT_ENABLED else ["numpy"]
    rows = []
    for name, fn in CASES:
        row = {"case": name}
        for be in backends:
            value, secs = best_time(fn, be, args.repeat)
            row[be] = {"value": value, "seconds": round(secs, 4)}
        if len(backends) == 2:
            row["agree"] = row["numba"]["value"] == row["numpy"]["value"]
            row["speedup"] = round(row["numpy"]["seconds"] / max(row["numba"]["seconds"], 1e-9), 1)
        rows.append(row)
        print(json.dumps(row))


if __name__ == "__main__":
    main()
