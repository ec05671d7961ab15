"""Compare the compiled and pure-Python search kernels.

    python3 benchmarks/bench_kernel.py [--repeat N]

Each row runs the same search on both backends, checks that the node counts
agree, and reports the best wall time of N runs.
"""
import argparse
import time

from afpp import kernel
from afpp.lattice import make_box, make_graph, make_path
from afpp.search import decide_afpp, enumerate_continuous_self_maps

CASES = [
    ("decide [0,2]x[0,1] c_1", lambda b: decide_afpp(make_box([(0, 2), (0, 1)], 1), backend=b).nodes_explored),
    ("decide path12", lambda b: decide_afpp(make_path(12), backend=b).nodes_explored),
    ("decide [0,13] c_1", lambda b: decide_afpp(make_box([(0, 13)], 1), backend=b).nodes_explored),
    ("decide [0,6]x[0,1] c_2", lambda b: decide_afpp(make_box([(0, 6), (0, 1)], 2), backend=b).nodes_explored),
    ("enumerate path7", lambda b: enumerate_continuous_self_maps(make_path(7), backend=b)),
    ("enumerate star7", lambda b: enumerate_continuous_self_maps(
        make_graph(range(7), [(0, i) for i in range(1, 7)]), backend=b)),
]


def best_of(fn, backend, repeat):
    best, result = float("inf"), None
    for _ in range(repeat):
        t0 = time.perf_counter()
        result = fn(backend)
        best = min(best, time.perf_counter() - t0)
    return best, result


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    if not kernel.COMPILED:
        print("compiled kernel not built; run `python3 setup.py build_ext --inplace` first")
        return 1
    print(f"{'case':<26} {'python s':>10} {'cython s':>10} {'speedup':>8}  result")
    for name, fn in CASES:
        tp, rp = best_of(fn, "python", args.repeat)
        tc, rc = best_of(fn, "cython", args.repeat)
        if rp != rc:
            raise SystemExit(f"{name}: backends disagree ({rp} vs {rc})")
        print(f"{name:<26} {tp:10.4f} {tc:10.4f} {tp / tc:7.1f}x  {rc}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
