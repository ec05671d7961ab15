"""Points, adjacency rules, finite digital images, paths and trees.

Vertices are integer tuples.  Every image keeps its vertices in lexicographic
order; that order drives every search, tie-break and witness choice in the
package, which is what makes certificates reproducible.
"""
from __future__ import annotations

import heapq
import itertools
from collections import deque
from dataclasses import dataclass, field
from functools import cached_property, lru_cache
from typing import Iterable, Iterator, Optional, Sequence, Union

from .errors import DigitalTopologyError, DimensionMismatch, NotATree

Point = tuple[int, ...]


def as_point(p) -> Point:
    """Coerce an int or integer sequence to a Point."""
    if isinstance(p, bool):
        raise DigitalTopologyError(f"not an integer point: {p!r}")
    if isinstance(p, int):
        return (p,)
    pt = tuple(p)
    if not pt or not all(isinstance(c, int) and not isinstance(c, bool) for c in pt):
        raise DigitalTopologyError(f"not an integer point: {p!r}")
    return pt


def cu_adjacent(x: Point, y: Point, u: int) -> bool:
    n = len(x)
    if len(y) != n:
        raise DimensionMismatch(f"points {x} and {y} have different dimensions")
    if not 1 <= u <= n:
        raise DigitalTopologyError(f"c_u needs 1 <= u <= {n}, got u={u}")
    differing = 0
    for a, b in zip(x, y):
        if a != b:
            if a - b not in (1, -1):
                return False
            differing += 1
    return 0 < differing <= u


@lru_cache(maxsize=None)
def _cu_offsets(n: int, u: int) -> tuple[Point, ...]:
    return tuple(
        d
        for d in itertools.product((-1, 0, 1), repeat=n)
        if 0 < sum(1 for c in d if c) <= u
    )


# -- adjacency rules ---------------------------------------------------------


@dataclass(frozen=True)
class Cu:
    u: int

    def __post_init__(self):
        if self.u < 1:
            raise DigitalTopologyError(f"c_u needs u >= 1, got {self.u}")

    def adjacent(self, p: Point, q: Point) -> bool:
        return cu_adjacent(p, q, self.u)

    def candidates(self, p: Point) -> Iterator[Point]:
        if self.u > len(p):
            raise DigitalTopologyError(f"c_{self.u} applied in dimension {len(p)}")
        for d in _cu_offsets(len(p), self.u):
            yield tuple(a + b for a, b in zip(p, d))

    def check_dimension(self, n: int) -> None:
        if self.u > n:
            raise DigitalTopologyError(f"c_{self.u} applied in dimension {n}")


@dataclass(frozen=True)
class Explicit:
    """Adjacency given by an edge list; edges are stored as sorted pairs."""

    edges: frozenset

    def __init__(self, edges: Iterable):
        norm = set()
        for a, b in edges:
            a, b = as_point(a), as_point(b)
            if a == b:
                raise DigitalTopologyError(f"self-loop at {a}")
            norm.add((a, b) if a < b else (b, a))
        object.__setattr__(self, "edges", frozenset(norm))

    def __repr__(self):
        return f"Explicit({len(self.edges)} edges)"

    @cached_property
    def _adj(self) -> dict:
        adj: dict = {}
        for a, b in self.edges:
            adj.setdefault(a, []).append(b)
            adj.setdefault(b, []).append(a)
        return {k: tuple(sorted(v)) for k, v in adj.items()}

    def adjacent(self, p: Point, q: Point) -> bool:
        return ((p, q) if p < q else (q, p)) in self.edges

    def candidates(self, p: Point) -> Iterator[Point]:
        return iter(self._adj.get(p, ()))

    def check_dimension(self, n: int) -> None:
        for a, b in self.edges:
            if len(a) != n or len(b) != n:
                raise DimensionMismatch(f"edge {a}-{b} is not in dimension {n}")

    def sorted_edges(self) -> list[tuple[Point, Point]]:
        return sorted(self.edges)


@dataclass(frozen=True)
class NP:
    """Normal product adjacency on concatenated tuples split at ``split``."""

    left: "Rule"
    right: "Rule"
    split: int

    def adjacent(self, p: Point, q: Point) -> bool:
        if p == q:
            return False
        s = self.split
        x, x2, y, y2 = p[:s], q[:s], p[s:], q[s:]
        return (x == x2 or self.left.adjacent(x, x2)) and (y == y2 or self.right.adjacent(y, y2))

    def candidates(self, p: Point) -> Iterator[Point]:
        s = self.split
        x, y = p[:s], p[s:]
        xs = [x, *self.left.candidates(x)]
        ys = [y, *self.right.candidates(y)]
        for a in xs:
            for b in ys:
                q = a + b
                if q != p:
                    yield q

    def check_dimension(self, n: int) -> None:
        if not 1 <= self.split < n:
            raise DimensionMismatch(f"split {self.split} does not partition dimension {n}")
        self.left.check_dimension(self.split)
        self.right.check_dimension(n - self.split)


Rule = Union[Cu, Explicit, NP]


# -- images ------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class DigitalImage:
    """A finite nonempty set of lattice points with an adjacency rule.

    Equality and hashing are extensional on (vertices, rule); ``name`` is a
    label only.
    """

    vertices: tuple[Point, ...]
    rule: Rule
    name: Optional[str] = field(default=None)

    def __init__(self, vertices: Iterable, rule: Rule, name: Optional[str] = None):
        pts = sorted({as_point(v) for v in vertices})
        if not pts:
            raise DigitalTopologyError("digital images must be nonempty")
        n = len(pts[0])
        if any(len(p) != n for p in pts):
            raise DimensionMismatch("all vertices of an image must share one dimension")
        rule.check_dimension(n)
        object.__setattr__(self, "vertices", tuple(pts))
        object.__setattr__(self, "rule", rule)
        object.__setattr__(self, "name", name)
        if isinstance(rule, Explicit):
            vs = set(pts)
            for a, b in rule.edges:
                if a not in vs or b not in vs:
                    raise DigitalTopologyError(f"edge {a}-{b} has an endpoint outside the image")

    def __eq__(self, other):
        if self is other:
            return True
        if not isinstance(other, DigitalImage):
            return NotImplemented
        return self.vertices == other.vertices and self.rule == other.rule

    def __hash__(self):
        return hash((self.vertices, self.rule))

    def __len__(self):
        return len(self.vertices)

    def __iter__(self):
        return iter(self.vertices)

    def __contains__(self, p):
        return p in self.index

    def __repr__(self):
        label = f" {self.name!r}" if self.name else ""
        return f"<DigitalImage{label} |V|={len(self.vertices)} rule={self.rule!r}>"

    @property
    def dim(self) -> int:
        return len(self.vertices[0])

    @cached_property
    def index(self) -> dict[Point, int]:
        return {p: i for i, p in enumerate(self.vertices)}

    @cached_property
    def neighbor_indices(self) -> tuple[tuple[int, ...], ...]:
        """Open neighborhoods as sorted index tuples."""
        idx = self.index
        out = []
        for p in self.vertices:
            nb = {idx[q] for q in self.rule.candidates(p) if q in idx}
            out.append(tuple(sorted(nb)))
        return tuple(out)

    @cached_property
    def closed_masks(self) -> tuple[int, ...]:
        """Closed neighborhoods as bitmasks over vertex indices."""
        masks = []
        for i, nb in enumerate(self.neighbor_indices):
            m = 1 << i
            for j in nb:
                m |= 1 << j
            masks.append(m)
        return tuple(masks)

    def adjacent(self, p: Point, q: Point) -> bool:
        """Adjacency of two vertices of this image."""
        i, j = self.index[p], self.index[q]
        return i != j and (self.closed_masks[i] >> j) & 1 == 1

    def adjacent_or_equal(self, p: Point, q: Point) -> bool:
        return (self.closed_masks[self.index[p]] >> self.index[q]) & 1 == 1

    def edges(self) -> list[tuple[Point, Point]]:
        """All adjacent pairs (p, q) with p < q, in canonical order."""
        vs = self.vertices
        return [(vs[i], vs[j]) for i, nb in enumerate(self.neighbor_indices) for j in nb if j > i]

    def edge_count(self) -> int:
        return sum(len(nb) for nb in self.neighbor_indices) // 2

    def subimage(self, subset: Iterable, name: Optional[str] = None) -> "DigitalImage":
        """The induced sub-image on ``subset``, keeping this image's rule."""
        sub = {as_point(p) for p in subset}
        missing = sub - set(self.index)
        if missing:
            raise DigitalTopologyError(f"not vertices of the image: {sorted(missing)[:3]}")
        rule = self.rule
        if isinstance(rule, Explicit):
            rule = Explicit(e for e in rule.edges if e[0] in sub and e[1] in sub)
        return DigitalImage(sub, rule, name=name)

    def _require(self, p) -> Point:
        pt = as_point(p)
        if pt not in self.index:
            raise DigitalTopologyError(f"{pt} is not a vertex of the image")
        return pt


# -- constructors ------------------------------------------------------------


def make_box(bounds: Sequence[Sequence[int]], u: int, name: Optional[str] = None) -> DigitalImage:
    """All integer points of the box prod [a_i, b_i] under c_u."""
    bounds = [tuple(b) for b in bounds]
    if not bounds:
        raise DigitalTopologyError("a box needs at least one interval")
    for a, b in bounds:
        if a > b:
            raise DigitalTopologyError(f"empty interval [{a},{b}]")
    if not 1 <= u <= len(bounds):
        raise DigitalTopologyError(f"c_u needs 1 <= u <= {len(bounds)}, got u={u}")
    pts = itertools.product(*(range(a, b + 1) for a, b in bounds))
    return DigitalImage(pts, Cu(u), name=name)


def make_interval(a: int, b: int) -> DigitalImage:
    return make_box([(a, b)], 1)


def make_graph(vertices: Iterable, edges: Iterable, name: Optional[str] = None) -> DigitalImage:
    """An abstract image given by an explicit edge list.

    Integer vertex labels are promoted to 1-tuples.
    """
    return DigitalImage(vertices, Explicit(edges), name=name)


def make_path(k: int) -> DigitalImage:
    """Explicit path graph 0-1-...-(k-1)."""
    return make_graph(range(k), [(i, i + 1) for i in range(k - 1)], name=f"path{k}")


def make_star(k: int) -> DigitalImage:
    """Explicit star: vertex 0 joined to leaves 1..k-1."""
    return make_graph(range(k), [(0, i) for i in range(1, k)], name=f"star{k}")


# -- queries -----------------------------------------------------------------


def neighborhood(X: DigitalImage, x, closed: bool = False) -> frozenset:
    x = X._require(x)
    i = X.index[x]
    nb = {X.vertices[j] for j in X.neighbor_indices[i]}
    if closed:
        nb.add(x)
    return frozenset(nb)


def _components(X: DigitalImage) -> list[list[int]]:
    seen = [False] * len(X)
    comps = []
    for s in range(len(X)):
        if seen[s]:
            continue
        seen[s] = True
        comp, stack = [], [s]
        while stack:
            i = stack.pop()
            comp.append(i)
            for j in X.neighbor_indices[i]:
                if not seen[j]:
                    seen[j] = True
                    stack.append(j)
        comps.append(comp)
    return comps


def is_connected(X: DigitalImage) -> bool:
    return len(_components(X)) == 1


def _bfs_dist(X: DigitalImage, source: int) -> list[int]:
    dist = [-1] * len(X)
    dist[source] = 0
    q = deque([source])
    while q:
        i = q.popleft()
        for j in X.neighbor_indices[i]:
            if dist[j] < 0:
                dist[j] = dist[i] + 1
                q.append(j)
    return dist


def find_path(X: DigitalImage, a, b) -> Optional[list[Point]]:
    """Lexicographically least shortest path from a to b, or None.

    Distances are measured from b; walking forward from a, each step takes
    the least neighbor one step closer to b.
    """
    a, b = X._require(a), X._require(b)
    ia, ib = X.index[a], X.index[b]
    dist = _bfs_dist(X, ib)
    if dist[ia] < 0:
        return None
    path = [ia]
    i = ia
    while i != ib:
        i = min(j for j in X.neighbor_indices[i] if dist[j] == dist[i] - 1)
        path.append(i)
    return [X.vertices[i] for i in path]


def is_tree(X: DigitalImage) -> bool:
    return is_connected(X) and X.edge_count() == len(X) - 1


@dataclass(frozen=True, eq=False)
class TreeStructure:
    image: DigitalImage
    root: Point
    parent: dict
    leaves: tuple
    pruning_order: tuple

    def children(self, x: Point) -> list[Point]:
        return [y for y, p in self.parent.items() if p == x]

    def depth(self, x: Point) -> int:
        d = 0
        while x != self.root:
            x = self.parent[x]
            d += 1
        return d


def tree_structure(X: DigitalImage, root=None) -> TreeStructure:
    """Root a tree image.

    Parents come from breadth-first search out of the root.  The pruning
    order repeatedly deletes the least remaining leaf other than the root;
    the root comes last.  ``root`` defaults to the least vertex.
    """
    if not is_tree(X):
        raise NotATree("image is not a connected acyclic graph")
    root = X.vertices[0] if root is None else X._require(root)
    r = X.index[root]
    parent_idx = {r: None}
    q = deque([r])
    while q:
        i = q.popleft()
        for j in X.neighbor_indices[i]:
            if j not in parent_idx:
                parent_idx[j] = i
                q.append(j)
    vs = X.vertices
    parent = {vs[j]: vs[i] for j, i in parent_idx.items() if i is not None}
    has_child = set(parent.values())
    leaves = tuple(v for v in vs if v != root and v not in has_child)

    degree = [len(nb) for nb in X.neighbor_indices]
    removed = [False] * len(vs)
    heap = [i for i in range(len(vs)) if i != r and degree[i] <= 1]
    heapq.heapify(heap)
    order = []
    while heap:
        i = heapq.heappop(heap)
        removed[i] = True
        order.append(vs[i])
        for j in X.neighbor_indices[i]:
            if not removed[j]:
                degree[j] -= 1
                if j != r and degree[j] == 1:
                    heapq.heappush(heap, j)
    order.append(root)
    return TreeStructure(X, root, parent, leaves, tuple(order))
