"""Desk-scale check battery behind ``afpp verify-suite``.

Each check returns a JSON-able record; wall-clock times go to stderr only so
that the bundle itself stays byte-reproducible.
"""
from __future__ import annotations

import io
import itertools
import random
import sys
import time
from contextlib import redirect_stderr, redirect_stdout

from . import constructive, search
from .corpus import box_shapes, has_unit_square, nonisomorphic_trees, random_image
from .lattice import make_box, make_graph, make_interval, make_path, make_star, tree_structure
from .maps import DigitalMap, approximate_fixed_points, is_continuous
from .products import cube_product, np_assoc_check, np_equals_cu


def _witness_ok(verdict) -> bool:
    w = verdict.witness
    return w is not None and is_continuous(w) and not approximate_fixed_points(w)


def check_intervals(scale, budget, seed):
    top = 9 if scale == "default" else 5
    bad = [d for d in range(top + 1) if not search.decide_afpp(make_interval(0, d), budget).holds]
    return not bad, {"lengths": top + 1, "failures": bad}


def check_unit_square(scale, budget, seed):
    X = make_box([(0, 1), (0, 1)], 1)
    v = search.decide_afpp(X, budget)
    antipodal = DigitalMap(X, X, {(0, 0): (1, 1), (1, 1): (0, 0), (1, 0): (0, 1), (0, 1): (1, 0)})
    found = []
    # all 256 maps, continuity tested afterwards
    for imgs in itertools.product(range(4), repeat=4):
        f = DigitalMap.from_indices(X, X, imgs)
        if is_continuous(f) and not approximate_fixed_points(f):
            found.append(f)
    ok = v.holds is False and _witness_ok(v) and antipodal in found
    return ok, {"verdict": v.status, "witnesses_by_brute_force": len(found),
                "antipodal_among_them": antipodal in found}


def check_square_c2_c1(scale, budget, seed):
    if scale == "tiny":
        return True, {"skipped": "needs 9 vertices"}
    b = [(-1, 1), (-1, 1)]
    v2 = search.decide_afpp(make_box(b, 2), budget)
    v1 = search.decide_afpp(make_box(b, 1), budget)
    ok = v2.holds is True and v2.exhaustive and v1.holds is False and _witness_ok(v1)
    return ok, {"c2": v2.status, "c1": v1.status}


def _box_cases(scale, seed):
    rng = random.Random(seed)
    cap = 14 if scale == "default" else 6
    for sides in box_shapes(cap, 4):
        lo = [rng.randint(-2, 2) for _ in sides]
        bounds = [(a, a + d) for a, d in zip(lo, sides)]
        for u in range(1, len(sides) + 1):
            yield sides, bounds, u


def check_boxes_as_stated(scale, budget, seed):
    """u = v gives holds; u < v with two unit sides available gives fails."""
    bad_holds, bad_fails, bad_witness, n = [], [], [], 0
    for sides, bounds, u in _box_cases(scale, seed):
        n += 1
        v = search.decide_afpp(make_box(bounds, u), budget)
        if v.holds is False and not _witness_ok(v):
            bad_witness.append({"bounds": [list(b) for b in bounds], "u": u})
        if u == len(sides) and not v.holds:
            bad_holds.append({"bounds": [list(b) for b in bounds], "u": u})
        if u < len(sides) and has_unit_square(sides) and v.holds:
            bad_fails.append({"bounds": [list(b) for b in bounds], "u": u})
    return not (bad_holds or bad_fails or bad_witness), {
        "cases": n,
        "invalid_witnesses": bad_witness[:5],
        "u_eq_v_not_holding": bad_holds[:5],
        "fails_claim_violations": len(bad_fails),
        "first_violations": bad_fails[:5],
    }


def check_box_boundary(scale, budget, seed):
    """With m non-trivial sides, c_u fails exactly when m >= 2 and u < m."""
    bad, n = [], 0
    for sides, bounds, u in _box_cases(scale, seed):
        n += 1
        m = sum(1 for d in sides if d >= 1)
        expect = not (m >= 2 and u < m)
        v = search.decide_afpp(make_box(bounds, u), budget)
        if v.holds != expect or (v.holds is False and not _witness_ok(v)):
            bad.append({"bounds": [list(b) for b in bounds], "u": u})
    return not bad, {"cases": n, "mismatches": bad[:5]}


def check_trees(scale, budget, seed):
    top = 7 if scale == "default" else 6
    counts, maps_checked, bad = [], 0, []
    for nv in range(1, top + 1):
        trees = nonisomorphic_trees(nv)
        counts.append(len(trees))
        for k, edges in enumerate(trees):
            X = make_graph(range(nv), edges, name=f"tree{nv}.{k}")
            if not search.decide_afpp(X, budget).holds:
                bad.append(X.name)
                continue
            T = tree_structure(X)
            seen = [0]

            def visit(f, T=T):
                x = constructive.tree_afp(T, f)
                if not (X.closed_masks[X.index[x]] >> f.images[X.index[x]]) & 1:
                    bad.append(X.name)
                seen[0] += 1

            search.enumerate_continuous_self_maps(X, budget, visit)
            maps_checked += seen[0]
    expected = [1, 1, 1, 2, 3, 6, 11][:top]
    return counts == expected and not bad, {"trees_per_size": counts, "maps_checked": maps_checked,
                                            "failures": bad[:5]}


def check_np_identity(scale, budget, seed):
    rng = random.Random(seed)
    pairs = 50 if scale == "default" else 10
    cap = 200 if scale == "default" else 6
    bad, done = [], 0
    while done < pairs:
        def rand_box():
            dim = rng.randint(1, 3)
            return [(a, a + rng.randint(0, 3)) for a in (rng.randint(-3, 3) for _ in range(dim))]
        bx, by = rand_box(), rand_box()
        X, Y = make_box(bx, len(bx)), make_box(by, len(by))
        if len(X) * len(Y) > cap:
            continue
        done += 1
        ok, _ = np_equals_cu(X, Y)
        if not ok:
            bad.append([bx, by])
    return not bad, {"pairs": pairs, "failures": bad}


def check_np_assoc(scale, budget, seed):
    bases = {"path3": make_path(3), "star4": make_star(4), "square_c2": make_box([(0, 1), (0, 1)], 2)}
    if scale == "tiny":
        bases = {"path3": make_path(3)}
    cap = 500 if scale == "default" else 6
    results, ok = [], True
    for name, X in bases.items():
        for k in (1, 2):
            for n in (1, 2):
                if len(X) * (n + 1) ** (k + 1) > cap:
                    continue
                r = np_assoc_check(X, k, n)
                ok &= r
                results.append([name, k, n, r])
    return ok, {"cases": results}


def check_product_extension(scale, budget, seed):
    count = 500 if scale == "default" else 100
    n = 2 if scale == "default" else 1
    bases = {"path3": make_path(3), "star4": make_star(4)}
    if scale == "tiny":
        bases = {"path3": make_path(3)}
    failures = 0
    for name, X in bases.items():
        T = tree_structure(X)
        P = cube_product(X, 1, n)
        for s in range(count):
            f = search.random_continuous_self_map(P, seed * 1_000_003 + s)
            try:
                x = constructive.product_afp(X, 1, n, f, constructive.tree_finder(T))
            except Exception:
                failures += 1
                continue
            if x not in approximate_fixed_points(f):
                failures += 1
    return failures == 0, {"maps_per_base": count, "bases": list(bases), "failures": failures}


def check_oracle_agreement(scale, budget, seed):
    rng = random.Random(seed)
    count = 100 if scale == "default" else 30
    bad = []
    for i in range(count):
        X = random_image(rng, 6)
        v = search.decide_afpp(X, budget)
        brute, _ = search.brute_force_verdict(X)
        if v.holds != brute:
            bad.append(i)
    return not bad, {"images": count, "disagreements": bad}


def check_counts(scale, budget, seed):
    a = search.enumerate_continuous_self_maps(make_path(3), budget)
    b = search.enumerate_continuous_self_maps(make_box([(0, 1)], 1), budget)
    return a == 17 and b == 4, {"path3": a, "interval01": b}


def _cli_bytes(argv):
    from .cli import main
    out, err = io.StringIO(), io.StringIO()
    with redirect_stdout(out), redirect_stderr(err):
        code = main(argv)
    return code, out.getvalue()


DETERMINISM_COMMANDS = [
    ["decide-afpp", '{"kind":"box","bounds":[[0,2]],"u":1}'],
    ["decide-afpp", '{"kind":"box","bounds":[[0,1],[0,1]],"u":1}'],
    ["decide-afpp", '{"kind":"box","bounds":[[-1,1],[-1,1]],"u":2}'],
    ["enumerate", '{"kind":"tree","edges":[[0,1],[1,2]],"root":0}'],
    ["find-afp", '{"kind":"box","bounds":[[0,4]],"u":1}',
     '{"pairs":[[[0],[4]],[[1],[3]],[[2],[2]],[[3],[1]],[[4],[0]]]}'],
    ["check", '{"kind":"tree","edges":[[0,1],[1,2]],"root":0}',
     '{"pairs":[[0,1],[1,0],[2,2]]}'],
    ["np-check", '{"kind":"box","bounds":[[0,1]],"u":1}', '{"kind":"box","bounds":[[0,1]],"u":1}'],
]


def check_determinism(scale, budget, seed):
    bad = []
    for argv in DETERMINISM_COMMANDS:
        a, b = _cli_bytes(argv), _cli_bytes(argv)
        if a != b:
            bad.append(argv[0])
    return not bad, {"commands": len(DETERMINISM_COMMANDS), "differences": bad}


CHECKS = [
    ("1", "interval AFPP", check_intervals, 1.0),
    ("2", "unit square fails", check_unit_square, 1.0),
    ("3", "[-1,1]^2: c_2 holds, c_1 fails", check_square_c2_c1, 5.0),
    ("4", "boxes: u=v holds, unit-square u<v fails", check_boxes_as_stated, 60.0),
    ("4b", "boxes: verdict by non-trivial sides", check_box_boundary, 60.0),
    ("5", "tree AFPP + tree finder", check_trees, 120.0),
    ("6", "NP(c_m,c_n) = c_(m+n)", check_np_identity, 10.0),
    ("7", "NP re-association", check_np_assoc, 10.0),
    ("8", "product extension finder", check_product_extension, 30.0),
    ("9", "oracle agreement", check_oracle_agreement, 60.0),
    ("10", "enumeration counts", check_counts, None),
    ("11", "determinism", check_determinism, None),
]


def run_suite(scale: str = "default", seed: int = 0, budget=None, checks=None):
    budget = budget or search.SearchBudget()
    records = []
    for cid, name, fn, limit in checks or CHECKS:
        t0 = time.perf_counter()
        try:
            passed, details = fn(scale, budget, seed)
        except Exception as e:  # a crashing check is reported, never aborts the bundle
            passed, details = False, {"error": f"{type(e).__name__}: {e}"}
        elapsed = time.perf_counter() - t0
        in_time = limit is None or elapsed <= limit
        records.append({"id": cid, "name": name, "passed": bool(passed and in_time),
                        "time_limit_s": limit, "details": details})
        mark = "PASS" if passed and in_time else "FAIL"
        note = "" if in_time else f" (over {limit}s)"
        print(f"{mark}  [{cid:>3}] {name:<42} {elapsed:7.2f}s{note}", file=sys.stderr)
    ok = all(r["passed"] for r in records)
    bundle = {"command": {"name": "verify-suite", "scale": scale, "seed": seed},
              "checks": records, "passed": ok}
    print(f"{'ALL PASS' if ok else 'FAILURES'}: {sum(r['passed'] for r in records)}/{len(records)}",
          file=sys.stderr)
    return bundle, 0 if ok else 1
