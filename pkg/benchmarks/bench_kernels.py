"""Compare the compiled and pure-Python kernel backends.

    python benchmarks/bench_kernels.py [--repeat 5] [--json out.json]

Both backends are run on identical inputs; the script also checks that they
return identical results before timing them.
"""

from __future__ import annotations

import argparse
import json
import sys
import timeit

import numpy as np

from diarbench import kernels


def assignment_cases(rng):
    # DER mapping sizes, window permutation sizes, and a larger stress case
    yield "lsa 4x4 x1000", [rng.integers(0, 10_000, (4, 4)) for _ in range(1000)]
    yield "lsa 3x3 ties x1000", [rng.integers(0, 3, (3, 3)) for _ in range(1000)]
    yield "lsa 12x9 x200", [rng.integers(0, 10**6, (12, 9)) for _ in range(200)]
    yield "lsa 60x60 x5", [rng.integers(0, 10**6, (60, 60)) for _ in range(5)]


def hysteresis_cases(rng):
    yield "hysteresis 6000 frames x50", [rng.random(6_000) for _ in range(50)]
    yield "hysteresis 360000 frames x2", [rng.random(360_000) for _ in range(2)]


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=5)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--json", help="also write results to this file")
    args = parser.parse_args(argv)

    found = kernels.backends()
    if "cython" not in found:
        print("compiled backend not built; only the Python fallback is available", file=sys.stderr)
    rng = np.random.default_rng(args.seed)
    rows = []
    cases = [("lsa_lexmin", name, [np.ascontiguousarray(c, dtype=np.int64) for c in data])
             for name, data in assignment_cases(rng)]
    cases += [("hysteresis", name, data) for name, data in hysteresis_cases(rng)]

    for fn_name, name, data in cases:
        calls = {b: getattr(mod, fn_name) for b, mod in found.items()}

        def run(fn):
            if fn_name == "lsa_lexmin":
                return [fn(c) for c in data]
            return [fn(x, 0.5, 0.4) for x in data]

        outputs = {b: run(fn) for b, fn in calls.items()}
        base = outputs["python"]
        for b, out in outputs.items():
            for x, y in zip(base, out):
                pair_x = x if isinstance(x, tuple) else (x,)
                pair_y = y if isinstance(y, tuple) else (y,)
                if any(not np.array_equal(p, q) for p, q in zip(pair_x, pair_y)):
                    raise SystemExit(f"{b} disagrees with python on {name}")
        row = {"case": name}
        for b, fn in calls.items():
            row[b] = min(timeit.repeat(lambda fn=fn: run(fn), number=1, repeat=args.repeat))
        if "cython" in row:
            row["speedup"] = row["python"] / row["cython"]
        rows.append(row)

    width = max(len(r["case"]) for r in rows)
    header = f"{'case':<{width}}  {'python s':>10}  {'cython s':>10}  {'speedup':>8}"
    print(header)
    print("-" * len(header))
    for r in rows:
        cy = f"{r['cython']:10.4f}" if "cython" in r else f"{'-':>10}"
        sp = f"{r['speedup']:7.1f}x" if "speedup" in r else f"{'-':>8}"
        print(f"{r['case']:<{width}}  {r['python']:10.4f}  {cy}  {sp}")
    if args.json:
        with open(args.json, "w") as f:
            json.dump(rows, f, indent=2)
    return 0


if __name__ == "__main__":
    sys.exit(main())
