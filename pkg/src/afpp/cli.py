"""Command-line front end.

Every command prints one JSON certificate to stdout (or ``--output``) and a
short human summary to stderr.  Exit codes: 0 success / holds, 1 a checked
property is false, 2 parse error, 3 discontinuous map, 10 AFPP fails,
11 no approximate fixed point, 20 undecided (budget).
"""
from __future__ import annotations

import argparse
import json
import sys
from . import constructive, search
from .errors import DigitalTopologyError, NoApproximateFixedPoint
from .lattice import Cu, cu_adjacent, is_tree, tree_structure
from .maps import (
    approximate_fixed_points,
    continuity_violation,
    is_retraction,
)
from .products import adjacency_discrepancy, np_assoc_check, np_cu_discrepancy, np_product
from .specfmt import (
    BoxSpec,
    ProductSpec,
    SpecError,
    TreeSpec,
    build_image,
    dumps,
    fingerprint,
    load_json,
    load_spec,
    map_json,
    parse_map,
    parse_spec,
    point_json,
)

EXIT_OK = 0
EXIT_FALSE = 1
EXIT_PARSE = 2
EXIT_DISCONTINUOUS = 3
EXIT_FAILS = 10
EXIT_NO_AFP = 11
EXIT_UNDECIDED = 20


def image_block(X) -> dict:
    return {"fingerprint": fingerprint(X), "vertices": len(X), "edges": X.edge_count()}


def _violation_json(bad):
    if bad is None:
        return None
    x, x2, fx, fx2 = bad
    return {"x": point_json(x), "x_prime": point_json(x2), "fx": point_json(fx), "fx_prime": point_json(fx2)}


def _budget(args) -> search.SearchBudget:
    return search.SearchBudget(max_vertices=args.max_vertices, max_nodes=args.budget_nodes, seed=args.seed)


# -- commands ----------------------------------------------------------------


def decide_certificate(spec, budget: search.SearchBudget, workers: int = 1) -> tuple[dict, int]:
    X = build_image(spec)
    cert = {
        "command": {
            "name": "decide-afpp",
            "image": spec.to_json(),
            "budget": {"max_nodes": budget.max_nodes, "max_vertices": budget.max_vertices},
        },
        "image": image_block(X),
    }
    try:
        verdict = search.decide_afpp(X, budget, workers=workers)
    except search.Undecided as e:
        cert["result"] = {"verdict": "undecided", "nodes_explored": e.verdict.nodes_explored,
                          "exhaustive": False, "reason": str(e)}
        cert["transcript"] = []
        return cert, EXIT_UNDECIDED
    cert["result"] = {"verdict": verdict.status, "nodes_explored": verdict.nodes_explored,
                      "exhaustive": verdict.exhaustive}
    if verdict.holds:
        blocking = [point_json(X.vertices[i]) for i, m in enumerate(X.closed_masks)
                    if m == (1 << len(X)) - 1]
        cert["result"]["blocking_vertices"] = blocking
        cert["transcript"] = [
            {"claim": "vertex with closed neighborhood equal to the whole image", "ok": bool(blocking)},
        ]
        return cert, EXIT_OK
    w = verdict.witness
    cert["witness"] = map_json(w)
    cert["transcript"] = [
        {"claim": "witness is continuous", "ok": continuity_violation(w) is None},
        {"claim": "witness has no approximate fixed point", "ok": not approximate_fixed_points(w)},
    ]
    return cert, EXIT_FAILS


def _tree_of(spec, X):
    if isinstance(spec, TreeSpec):
        return spec.structure_of(X)
    return tree_structure(X)


def _product_parts(spec):
    """(X spec, v, n) when spec is X x [0,n]^v with a full c_v box on the right."""
    if not isinstance(spec, ProductSpec) or not isinstance(spec.right, BoxSpec):
        return None
    box = spec.right
    if not box.full or any(a != 0 for a, _ in box.bounds):
        return None
    sides = {b for _, b in box.bounds}
    if len(sides) != 1:
        return None
    return spec.left, len(box.bounds), sides.pop()


def _finder_for(spec, X):
    if isinstance(spec, BoxSpec) and spec.full:
        return "box", constructive.box_finder(spec.bounds)
    if is_tree(X):
        return "tree", constructive.tree_finder(_tree_of(spec, X))
    return "search", constructive.scan_afp


def find_afp_certificate(spec, map_obj, finder: str = "auto") -> tuple[dict, int]:
    X = build_image(spec)
    f = parse_map(map_obj, X, X)
    cert = {
        "command": {"name": "find-afp", "image": spec.to_json(), "map": map_json(f), "finder": finder},
        "image": image_block(X),
    }
    bad = continuity_violation(f)
    if bad is not None:
        cert["result"] = {"vertex": None, "error": "discontinuous map", "violation": _violation_json(bad)}
        cert["transcript"] = [{"claim": "map is continuous", "ok": False}]
        return cert, EXIT_DISCONTINUOUS

    used = finder
    if finder == "auto":
        if isinstance(spec, BoxSpec) and spec.full:
            used = "box"
        elif is_tree(X):
            used = "tree"
        else:
            used = "search"
    try:
        if used == "tree":
            if not is_tree(X):
                raise SpecError("tree finder needs a tree image")
            x = constructive.tree_afp(_tree_of(spec, X), f)
        elif used == "box":
            if not (isinstance(spec, BoxSpec) and spec.full):
                raise SpecError("box finder needs a box spec with u equal to its dimension")
            x = constructive.box_afp(spec.bounds, f)
        elif used == "product":
            parts = _product_parts(spec)
            if parts is None:
                raise SpecError("product finder needs a product X x [0,n]^v with c_v on the cube")
            xspec, v, n = parts
            Xb = build_image(xspec)
            _, base = _finder_for(xspec, Xb)
            x = constructive.product_afp(Xb, v, n, f, base)
        elif used == "search":
            x = constructive.scan_afp(f)
        else:
            raise SpecError(f"unknown finder {finder!r}")
    except NoApproximateFixedPoint:
        cert["result"] = {"vertex": None, "finder_used": used, "afp_count": 0}
        cert["transcript"] = [
            {"claim": "map is continuous", "ok": True},
            {"claim": "map has no approximate fixed point", "ok": not approximate_fixed_points(f)},
        ]
        return cert, EXIT_NO_AFP
    fx = f(x)
    cert["result"] = {"vertex": point_json(x), "image_of_vertex": point_json(fx), "finder_used": used}
    cert["transcript"] = [
        {"claim": "map is continuous", "ok": True},
        {"claim": "f(vertex) equals or is adjacent to vertex", "ok": X.adjacent_or_equal(x, fx)},
    ]
    return cert, EXIT_OK


def check_certificate(spec, map_obj, what: str, codomain_spec=None) -> tuple[dict, int]:
    X = build_image(spec)
    if codomain_spec is None:
        Y = X
    else:
        Yb = build_image(codomain_spec)
        if not set(Yb.vertices) <= set(X.vertices):
            if what == "retraction":
                raise SpecError("retraction codomain is not a subset of the domain")
            Y = Yb
        else:
            Y = X.subimage(Yb.vertices)
            if adjacency_discrepancy(Y, Yb) is not None:
                if what == "retraction":
                    raise SpecError("codomain adjacency differs from the inherited adjacency")
                Y = Yb
    f = parse_map(map_obj, X, Y)
    cert = {
        "command": {
            "name": "check",
            "what": what,
            "image": spec.to_json(),
            "codomain": None if codomain_spec is None else codomain_spec.to_json(),
            "map": map_json(f),
        },
        "image": image_block(X),
    }
    bad = continuity_violation(f)
    if what == "continuity":
        ok = bad is None
        cert["result"] = {"holds": ok, "violation": _violation_json(bad)}
        cert["transcript"] = [{"claim": "map is continuous", "ok": ok}]
    elif what == "retraction":
        moved = [y for y in Y.vertices if f(y) != y]
        ok = is_retraction(f)
        cert["result"] = {
            "holds": ok,
            "violation": _violation_json(bad),
            "moved_points": [point_json(y) for y in moved[:1]],
        }
        cert["transcript"] = [
            {"claim": "map is continuous", "ok": bad is None},
            {"claim": "map fixes the codomain pointwise", "ok": not moved},
        ]
    else:
        raise SpecError(f"unknown check {what!r}")
    return cert, EXIT_OK if ok else EXIT_FALSE


def enumerate_certificate(spec, budget: search.SearchBudget) -> tuple[dict, int]:
    X = build_image(spec)
    cert = {
        "command": {"name": "enumerate", "image": spec.to_json(),
                    "budget": {"max_nodes": budget.max_nodes, "max_vertices": budget.max_vertices}},
        "image": image_block(X),
    }
    try:
        count = search.enumerate_continuous_self_maps(X, budget)
    except search.Undecided as e:
        cert["result"] = {"count": None, "reason": str(e)}
        cert["transcript"] = []
        return cert, EXIT_UNDECIDED
    cert["result"] = {"count": count}
    cert["transcript"] = []
    return cert, EXIT_OK


def np_check_certificate(left=None, right=None, assoc=None, k=1, n=1) -> tuple[dict, int]:
    if assoc is not None:
        X = build_image(assoc)
        ok = np_assoc_check(X, k, n)
        cert = {
            "command": {"name": "np-check", "mode": "assoc", "image": assoc.to_json(), "k": k, "n": n},
            "image": image_block(X),
            "result": {"equal": ok},
            "transcript": [],
        }
        return cert, EXIT_OK if ok else EXIT_FALSE
    Xl, Xr = build_image(left), build_image(right)
    for side, img in (("left", Xl), ("right", Xr)):
        if not isinstance(img.rule, Cu):
            raise SpecError(f"{side} image must use a c_u rule")
    d = np_cu_discrepancy(Xl, Xr)
    full = Xl.rule.u == Xl.dim and Xr.rule.u == Xr.dim
    P = np_product(Xl, Xr).image
    cert = {
        "command": {"name": "np-check", "mode": "cu", "left": left.to_json(), "right": right.to_json()},
        "image": image_block(P),
        "result": {
            "equal": d is None,
            "full_rules": full,
            "discrepancy": None if d is None else {
                "p": point_json(d[0]), "q": point_json(d[1]), "np_adjacent": d[2], "cu_adjacent": d[3],
            },
        },
        "transcript": [],
    }
    return cert, EXIT_OK if d is None else EXIT_FALSE


# -- certificate verification ------------------------------------------------


def verify_certificate(cert: dict) -> list[dict]:
    """Re-check every claim in a certificate from its own payload."""
    checks = []

    def claim(text, ok):
        checks.append({"claim": text, "ok": bool(ok)})

    cmd = cert.get("command", {})
    name = cmd.get("name")
    if name in ("decide-afpp", "find-afp", "check", "enumerate") or (name == "np-check" and cmd.get("mode") == "assoc"):
        spec = parse_spec(cmd["image"])
        X = build_image(spec)
        claim("image fingerprint matches", fingerprint(X) == cert["image"]["fingerprint"])
    res = cert.get("result", {})
    if name == "decide-afpp":
        verdict = res.get("verdict")
        if verdict == "fails":
            w = parse_map(cert["witness"], X, X)
            claim("witness is continuous", continuity_violation(w) is None)
            claim("witness has no approximate fixed point", not approximate_fixed_points(w))
        elif verdict == "holds":
            claim("holds verdict is marked exhaustive", res.get("exhaustive") is True)
            for b in res.get("blocking_vertices", []):
                i = X.index[tuple(b)]
                claim(f"closed neighborhood of {b} is the whole image", X.closed_masks[i] == (1 << len(X)) - 1)
        else:
            claim("undecided verdict is not exhaustive", res.get("exhaustive") is False)
    elif name == "find-afp":
        f = parse_map(cmd["map"], X, X)
        if res.get("vertex") is not None:
            x = tuple(res["vertex"])
            claim("map is continuous", continuity_violation(f) is None)
            claim("f(vertex) matches the recorded image", list(f(x)) == res["image_of_vertex"])
            claim("f(vertex) equals or is adjacent to vertex", X.adjacent_or_equal(x, f(x)))
        elif res.get("afp_count") == 0:
            claim("map is continuous", continuity_violation(f) is None)
            claim("map has no approximate fixed point", not approximate_fixed_points(f))
        else:
            claim("map is discontinuous", continuity_violation(f) is not None)
    elif name == "check":
        cspec = cmd.get("codomain")
        Y = X if cspec is None else build_image(parse_spec(cspec))
        if cspec is not None and set(Y.vertices) <= set(X.vertices) and adjacency_discrepancy(X.subimage(Y.vertices), Y) is None:
            Y = X.subimage(Y.vertices)
        f = parse_map(cmd["map"], X, Y)
        if cmd["what"] == "continuity":
            claim("recorded continuity result", (continuity_violation(f) is None) == res["holds"])
        else:
            claim("recorded retraction result", is_retraction(f) == res["holds"])
    elif name == "enumerate":
        claim("count is a nonnegative integer or null", res.get("count") is None or res["count"] >= 0)
    elif name == "np-check":
        if cmd.get("mode") == "assoc":
            claim("re-association result", np_assoc_check(X, cmd["k"], cmd["n"]) == res["equal"])
        else:
            Xl, Xr = build_image(parse_spec(cmd["left"])), build_image(parse_spec(cmd["right"]))
            d = res.get("discrepancy")
            if d is None:
                claim("NP and c_u agree on every pair", np_cu_discrepancy(Xl, Xr) is None)
            else:
                s = Xl.dim
                p, q = tuple(d["p"]), tuple(d["q"])
                np_adj = (p[:s] == q[:s] or Xl.rule.adjacent(p[:s], q[:s])) and \
                         (p[s:] == q[s:] or Xr.rule.adjacent(p[s:], q[s:])) and p != q
                claim("recorded NP adjacency", np_adj == d["np_adjacent"])
                claim("recorded c_u adjacency", cu_adjacent(p, q, Xl.rule.u + Xr.rule.u) == d["cu_adjacent"])
                claim("the two adjacencies differ", np_adj != cu_adjacent(p, q, Xl.rule.u + Xr.rule.u))
    elif name == "verify-suite":
        claim("bundle verdict matches its checks", cert.get("passed") == all(c["passed"] for c in cert["checks"]))
    else:
        claim(f"known command {name!r}", False)
    return checks


# -- argument parsing --------------------------------------------------------


def _add_budget(p):
    p.add_argument("--budget-nodes", type=int, default=10**8)
    p.add_argument("--max-vertices", type=int, default=14)
    p.add_argument("--seed", type=int, default=0)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="afpp", description=__doc__.split("\n")[0])
    parser.add_argument("--output", help="write the certificate here instead of stdout")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("decide-afpp", help="decide the AFPP by exhaustive search")
    p.add_argument("image", help="image spec file or inline JSON")
    p.add_argument("--workers", type=int, default=1)
    _add_budget(p)

    p = sub.add_parser("find-afp", help="find an approximate fixed point of a map")
    p.add_argument("image")
    p.add_argument("map", help="map file or inline JSON")
    p.add_argument("--finder", choices=["auto", "tree", "box", "product", "search"], default="auto")

    p = sub.add_parser("check", help="check continuity or retraction")
    p.add_argument("image")
    p.add_argument("map")
    p.add_argument("--what", choices=["continuity", "retraction"], default="continuity")
    p.add_argument("--codomain", help="codomain image spec (defaults to the domain)")

    p = sub.add_parser("enumerate", help="count continuous self-maps")
    p.add_argument("image")
    _add_budget(p)

    p = sub.add_parser("np-check", help="normal product identities")
    p.add_argument("left", nargs="?")
    p.add_argument("right", nargs="?")
    p.add_argument("--assoc", help="image X for the re-association check")
    p.add_argument("--k", type=int, default=1)
    p.add_argument("--n", type=int, default=1)

    p = sub.add_parser("verify-suite", help="run the check battery")
    p.add_argument("--scale", choices=["tiny", "default"], default="default")
    _add_budget(p)

    p = sub.add_parser("verify-certificate", help="re-check a certificate")
    p.add_argument("certificate")

    for p in sub.choices.values():
        p.add_argument("--output", default=argparse.SUPPRESS)
    return parser


def _map_source(src: str):
    if src.lstrip().startswith(("{", "[")):
        try:
            return json.loads(src)
        except json.JSONDecodeError as e:
            raise SpecError(f"bad inline map: {e}") from None
    return load_json(src)


def _dispatch(args) -> tuple[dict, int]:
    cmd = args.command
    if cmd == "decide-afpp":
        return decide_certificate(load_spec(args.image), _budget(args), args.workers)
    if cmd == "find-afp":
        return find_afp_certificate(load_spec(args.image), _map_source(args.map), args.finder)
    if cmd == "check":
        obj = _map_source(args.map)
        cod = load_spec(args.codomain) if args.codomain else None
        return check_certificate(load_spec(args.image), obj, args.what, cod)
    if cmd == "enumerate":
        return enumerate_certificate(load_spec(args.image), _budget(args))
    if cmd == "np-check":
        if args.assoc:
            return np_check_certificate(assoc=load_spec(args.assoc), k=args.k, n=args.n)
        if not (args.left and args.right):
            raise SpecError("np-check needs LEFT and RIGHT specs, or --assoc")
        return np_check_certificate(load_spec(args.left), load_spec(args.right))
    if cmd == "verify-suite":
        from .suite import run_suite
        return run_suite(args.scale, seed=args.seed, budget=_budget(args))
    if cmd == "verify-certificate":
        cert = load_json(args.certificate)
        checks = verify_certificate(cert)
        ok = all(c["ok"] for c in checks)
        return {"command": {"name": "verify-certificate"}, "verified": ok, "checks": checks}, (
            EXIT_OK if ok else EXIT_FALSE)
    raise SpecError(f"unknown command {cmd}")


def _summary(cert: dict, code: int) -> str:
    name = cert.get("command", {}).get("name", "?")
    res = cert.get("result")
    if res is None:
        res = {k: cert[k] for k in ("verified", "passed") if k in cert}
    return f"{name}: exit {code} {res}"


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cert, code = _dispatch(args)
    except SpecError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_PARSE
    except DigitalTopologyError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_PARSE
    text = dumps(cert)
    if getattr(args, "output", None):
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    if args.command != "verify-suite":
        print(_summary(cert, code)[:400], file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
