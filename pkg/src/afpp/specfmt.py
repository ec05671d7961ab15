"""JSON image specifications, map files, fingerprints and certificates.

Image specification nodes::

    {"kind": "box", "bounds": [[a1, b1], ...], "u": u}
    {"kind": "graph", "vertices": [v, ...], "edges": [[v, w], ...]}
    {"kind": "tree", "edges": [[v, w], ...], "root": v}     # "vertices" optional
    {"kind": "product", "left": <node>, "right": <node>}

A vertex is an integer or a list of integers; integers become 1-tuples.
Map files are ``{"pairs": [[x, f(x)], ...]}`` (a bare list of pairs is also
accepted).

Fingerprint byte layout (UTF-8, hashed with SHA-256)::

    "V:" + ";".join(vertex) + "\\nE:" + ";".join(p + "|" + q) + "\\n"

where a vertex is its coordinates joined by "," and edges (p < q) are in
canonical order.
"""
from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass
from typing import Optional, Union

from .errors import DigitalTopologyError
from .lattice import (
    DigitalImage,
    Point,
    TreeStructure,
    as_point,
    make_box,
    make_graph,
    tree_structure,
)
from .maps import DigitalMap
from .products import np_product


class SpecError(DigitalTopologyError):
    """Malformed specification or map file."""


@dataclass(frozen=True)
class BoxSpec:
    bounds: tuple[tuple[int, int], ...]
    u: int

    def build(self) -> DigitalImage:
        return make_box(self.bounds, self.u)

    def to_json(self) -> dict:
        return {"kind": "box", "bounds": [list(b) for b in self.bounds], "u": self.u}

    @property
    def full(self) -> bool:
        return self.u == len(self.bounds)


@dataclass(frozen=True)
class GraphSpec:
    vertices: tuple[Point, ...]
    edges: tuple[tuple[Point, Point], ...]

    def build(self) -> DigitalImage:
        return make_graph(self.vertices, self.edges)

    def to_json(self) -> dict:
        return {
            "kind": "graph",
            "vertices": [point_json(v) for v in self.vertices],
            "edges": [[point_json(a), point_json(b)] for a, b in self.edges],
        }


@dataclass(frozen=True)
class TreeSpec:
    vertices: tuple[Point, ...]
    edges: tuple[tuple[Point, Point], ...]
    root: Point

    def build(self) -> DigitalImage:
        X = make_graph(self.vertices, self.edges)
        self.structure_of(X)
        return X

    def structure_of(self, X: DigitalImage) -> TreeStructure:
        return tree_structure(X, self.root)

    def to_json(self) -> dict:
        return {
            "kind": "tree",
            "vertices": [point_json(v) for v in self.vertices],
            "edges": [[point_json(a), point_json(b)] for a, b in self.edges],
            "root": point_json(self.root),
        }


@dataclass(frozen=True)
class ProductSpec:
    left: "ImageSpec"
    right: "ImageSpec"

    def build(self) -> DigitalImage:
        return np_product(self.left.build(), self.right.build()).image

    def to_json(self) -> dict:
        return {"kind": "product", "left": self.left.to_json(), "right": self.right.to_json()}


ImageSpec = Union[BoxSpec, GraphSpec, TreeSpec, ProductSpec]


def point_json(p: Point):
    return list(p)


def _point(v) -> Point:
    try:
        return as_point(v)
    except (DigitalTopologyError, TypeError) as e:
        raise SpecError(str(e)) from None


def _edges(raw) -> tuple:
    if not isinstance(raw, list):
        raise SpecError("edges must be a list")
    out = []
    for e in raw:
        if not isinstance(e, list) or len(e) != 2:
            raise SpecError(f"bad edge {e!r}")
        out.append((_point(e[0]), _point(e[1])))
    return tuple(out)


def parse_spec(obj) -> ImageSpec:
    if not isinstance(obj, dict) or "kind" not in obj:
        raise SpecError("image spec must be an object with a 'kind'")
    kind = obj["kind"]
    if kind == "box":
        try:
            bounds = tuple((int(a), int(b)) for a, b in obj["bounds"])
            u = int(obj["u"])
        except (KeyError, TypeError, ValueError) as e:
            raise SpecError(f"bad box spec: {e}") from None
        return BoxSpec(bounds, u)
    if kind == "graph":
        edges = _edges(obj.get("edges", []))
        verts = tuple(_point(v) for v in obj.get("vertices", []))
        return GraphSpec(verts, edges)
    if kind == "tree":
        edges = _edges(obj.get("edges", []))
        verts = {_point(v) for v in obj.get("vertices", [])}
        for a, b in edges:
            verts.update((a, b))
        if "root" not in obj:
            raise SpecError("tree spec needs a root")
        root = _point(obj["root"])
        return TreeSpec(tuple(sorted(verts | {root})), edges, root)
    if kind == "product":
        try:
            return ProductSpec(parse_spec(obj["left"]), parse_spec(obj["right"]))
        except KeyError as e:
            raise SpecError(f"product spec needs {e}") from None
    raise SpecError(f"unknown image kind {kind!r}")


def build_image(spec: ImageSpec) -> DigitalImage:
    try:
        return spec.build()
    except SpecError:
        raise
    except DigitalTopologyError as e:
        raise SpecError(str(e)) from None


def load_json(path: str):
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as e:
        raise SpecError(f"cannot read {path}: {e}") from None


def load_spec(source: str) -> ImageSpec:
    """Parse a spec from a file path, or from inline JSON text starting with '{'."""
    if source.lstrip().startswith("{"):
        try:
            return parse_spec(json.loads(source))
        except json.JSONDecodeError as e:
            raise SpecError(f"bad inline spec: {e}") from None
    return parse_spec(load_json(source))


def parse_map(obj, domain: DigitalImage, codomain: DigitalImage) -> DigitalMap:
    pairs = obj.get("pairs") if isinstance(obj, dict) else obj
    if not isinstance(pairs, list):
        raise SpecError("map file must hold a list of pairs")
    try:
        return DigitalMap.from_pairs(domain, codomain, ((_point(a), _point(b)) for a, b in pairs))
    except (ValueError, TypeError) as e:
        raise SpecError(f"bad map: {e}") from None


def load_map(source: str, domain: DigitalImage, codomain: Optional[DigitalImage] = None) -> DigitalMap:
    codomain = domain if codomain is None else codomain
    if source.lstrip().startswith(("{", "[")):
        try:
            obj = json.loads(source)
        except json.JSONDecodeError as e:
            raise SpecError(f"bad inline map: {e}") from None
    else:
        obj = load_json(source)
    return parse_map(obj, domain, codomain)


def map_json(f: DigitalMap) -> dict:
    return {"pairs": [[point_json(a), point_json(b)] for a, b in f.pairs()]}


def _pt_text(p: Point) -> str:
    return ",".join(str(c) for c in p)


def fingerprint(X: DigitalImage) -> str:
    vs = ";".join(_pt_text(p) for p in X.vertices)
    es = ";".join(f"{_pt_text(a)}|{_pt_text(b)}" for a, b in X.edges())
    return hashlib.sha256(f"V:{vs}\nE:{es}\n".encode("utf-8")).hexdigest()


def is_full_box(spec: ImageSpec) -> bool:
    return isinstance(spec, BoxSpec) and spec.full


def dumps(obj) -> str:
    """Canonical JSON text used for every certificate."""
    return json.dumps(obj, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


__all__ = [
    "BoxSpec", "GraphSpec", "TreeSpec", "ProductSpec", "ImageSpec", "SpecError",
    "parse_spec", "build_image", "load_spec", "load_map", "parse_map", "map_json",
    "fingerprint", "dumps",
]
