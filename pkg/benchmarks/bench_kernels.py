"""Compare the compiled and pure-Python elimination kernels.

    python3 benchmarks/bench_kernels.py [--repeat N] [--json PATH]

Each workload runs once with the kernels instrumented, recording every matrix
handed to them.  The recorded calls are then replayed against both backends,
so the timings reflect the matrix shapes and entry sizes the library actually
produces.  One end-to-end run per backend in a subprocess is added at the end,
since the backend is chosen at import.
"""
from __future__ import annotations

import argparse
import copy
import json
import os
import subprocess
import sys
import time

from mellingamma import _pykernels, derham, kernels

try:
    from mellingamma import _ckernels
except ImportError:  # extension not built
    _ckernels = None


def _tor_workload():
    from mellingamma.mellin import tor, unipotent_module

    tor(unipotent_module((0, 0), 4), unipotent_module((0, 0), 3))


def _tower_workload():
    from mellingamma.gamma import check_unipotent_tower, gamma_data
    from mellingamma.rootdata import TorusPoint, build_root_datum

    rd = build_root_datum({"preset": "GL", "rank": 3})
    gd = gamma_data(rd, [(1, 0, 0), (0, 1, 0), (0, 0, 1)])
    check_unipotent_tower(gd, TorusPoint((0, 0, 0)), 3)


def _gm1_workload():
    for s in ("1/3", "-5/2", "7", "-12"):
        derham.gm_exp_kummer_cohomology(1, s, window=40)


def _gm2_workload():
    derham.gm2_koszul_check(1, 6, -4)
    derham.gm2_koszul_check("1/2", "1/3", "-2/5", middle=True)


WORKLOADS = {
    "Tor of unipotent modules (rank 2)": _tor_workload,
    "GL(3) unipotent tower n<=3": _tower_workload,
    "1-variable de Rham windows": _gm1_workload,
    "2-variable Koszul windows": _gm2_workload,
}


def record(workload) -> dict[str, list]:
    """Run workload with the active kernels wrapped; return the calls seen."""
    calls: dict[str, list] = {"rref_int": [], "sparse_rank_int": []}
    rref, sparse = kernels.rref_int, derham.sparse_rank_int

    def rec_rref(rows, ncols):
        calls["rref_int"].append((copy.deepcopy(rows), ncols))
        return rref(rows, ncols)

    def rec_sparse(rows):
        calls["sparse_rank_int"].append((copy.deepcopy(rows),))
        return sparse(rows)

    kernels.rref_int, derham.sparse_rank_int = rec_rref, rec_sparse
    try:
        workload()
    finally:
        kernels.rref_int, derham.sparse_rank_int = rref, sparse
    return calls


def replay(fn, calls) -> float:
    t = time.perf_counter()
    for args in calls:
        fn(*args)
    return time.perf_counter() - t


def best_of(fn, calls, repeat: int) -> float:
    return min(replay(fn, calls) for _ in range(repeat))


END_TO_END = (
    "import time;"
    "t = time.perf_counter();"
    "from mellingamma.suite import run_suite;"
    "run_suite('smoke', 'unsigned', 1, None);"
    "print(time.perf_counter() - t)"
)


def end_to_end(pure: bool) -> float:
    env = dict(os.environ)
    if pure:
        env["MELLINGAMMA_PURE_PYTHON"] = "1"
    else:
        env.pop("MELLINGAMMA_PURE_PYTHON", None)
    out = subprocess.run([sys.executable, "-c", END_TO_END], env=env, capture_output=True, text=True, check=True)
    return float(out.stdout.strip().splitlines()[-1])


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--json", metavar="PATH")
    ap.add_argument("--no-end-to-end", action="store_true")
    args = ap.parse_args()
    if _ckernels is None:
        sys.exit("compiled kernels are not built; run `pip install -e . --no-build-isolation`")

    rows = []
    for name, workload in WORKLOADS.items():
        calls = record(workload)
        for kernel, seen in calls.items():
            if not seen:
                continue
            py_fn, cy_fn = getattr(_pykernels, kernel), getattr(_ckernels, kernel)
            for a in seen:
                assert py_fn(*a) == cy_fn(*a), f"{kernel} disagrees on a recorded call"
            rows.append({
                "workload": name,
                "kernel": kernel,
                "calls": len(seen),
                "python_s": best_of(py_fn, seen, args.repeat),
                "cython_s": best_of(cy_fn, seen, args.repeat),
            })
    if not args.no_end_to_end:
        rows.append({"workload": "smoke suite, end to end", "kernel": "all", "calls": 1,
                     "python_s": end_to_end(True), "cython_s": end_to_end(False)})

    print(f"{'workload':<36} {'kernel':<16} {'calls':>6} {'python':>10} {'cython':>10} {'speedup':>8}")
    for row in rows:
        row["speedup"] = row["python_s"] / row["cython_s"] if row["cython_s"] else float("inf")
        print(f"{row['workload']:<36} {row['kernel']:<16} {row['calls']:>6} {row['python_s']*1e3:>8.1f}ms "
              f"{row['cython_s']*1e3:>8.1f}ms {row['speedup']:>7.1f}x")
    if args.json:
        with open(args.json, "w") as fh:
            json.dump(rows, fh, indent=2)


if __name__ == "__main__":
    main()
