"""Approximate fixed points found by construction rather than search.

Each finder takes a continuous self-map and returns a vertex x with f(x)
equal or adjacent to x.  The recursions follow the one-point extension
argument (trees), the interval-clamping induction (X x [0,n]), the
dimension induction (X x [0,n]^v), and the retract-of-a-cube argument
(arbitrary boxes).  Every returned vertex is re-checked before it leaves
this module.
"""
from __future__ import annotations

import weakref
from dataclasses import dataclass
from functools import cached_property, lru_cache
from typing import Callable, Sequence

from .errors import (
    BrokenFinder,
    DigitalTopologyError,
    DiscontinuousMap,
    NoApproximateFixedPoint,
    NotASelfMap,
    PreconditionViolation,
)
from .lattice import Cu, DigitalImage, Point, TreeStructure, as_point, make_box, make_interval
from .maps import (
    DigitalMap,
    approximate_fixed_points,
    continuity_violation,
    is_approximate_fixed_point,
    is_retraction,
)
from .products import cube_product, np_product

AfpFinder = Callable[[DigitalMap], Point]


def _require_continuous_self_map(f: DigitalMap, X: DigitalImage) -> None:
    if f.domain != X or f.codomain != X:
        raise NotASelfMap("map is not a self-map of the expected image")
    bad = continuity_violation(f)
    if bad is not None:
        raise DiscontinuousMap(f"{bad[0]}~{bad[1]} maps to {bad[2]}, {bad[3]}")


def _certify(f: DigitalMap, x: Point, what: str) -> Point:
    if not is_approximate_fixed_point(f, x):
        raise BrokenFinder(f"{what} returned {x}, which is not an approximate fixed point")
    return x


# -- one-point extension -----------------------------------------------------


@dataclass(frozen=True, eq=False)
class BuilderInstance:
    """X' = X + {x0} with a retraction r: X' -> X such that N*(x0) lies in N*(r(x0))."""

    extended: DigitalImage
    removed: Point
    retraction: DigitalMap

    def __post_init__(self):
        X = self.retraction.codomain
        if self.retraction.domain != self.extended:
            raise PreconditionViolation("retraction must be defined on the extended image")
        if set(X.vertices) != set(self.extended.vertices) - {self.removed}:
            raise PreconditionViolation("retraction must land on X' minus x0")
        if not is_retraction(self.retraction):
            raise PreconditionViolation("r is not a retraction")
        Xp = self.extended
        i0 = Xp.index[self.removed]
        ir = Xp.index[self.retraction(self.removed)]
        m0, mr = Xp.closed_masks[i0], Xp.closed_masks[ir]
        if m0 & ~mr:
            raise PreconditionViolation("N*(x0) is not contained in N*(r(x0))")

    @property
    def base(self) -> DigitalImage:
        return self.retraction.codomain

    @cached_property
    def _positions(self) -> tuple[int, ...]:
        idx = self.extended.index
        return tuple(idx[p] for p in self.base.vertices)

    def reduce(self, f: DigitalMap) -> DigitalMap:
        """g = r . f restricted to X, built as an explicit table."""
        if f.domain is not self.extended and f.domain != self.extended:
            raise NotASelfMap("map is not defined on the extended image")
        ri, fi = self.retraction.images, f.images
        return DigitalMap.from_indices(self.base, self.base, [ri[fi[k]] for k in self._positions])


def builder_step(inst: BuilderInstance, f: DigitalMap, y, g: DigitalMap = None) -> Point:
    """Lift an approximate fixed point y of g = r.f|X to one of f.

    If f(y) stays in X the same y works; otherwise f(y) = x0 and g(y) = r(x0)
    is an approximate fixed point of f.  ``g`` may be passed in when the
    caller already built it.
    """
    y = as_point(y)
    if g is None:
        g = inst.reduce(f)
    if y not in g.domain.index or not is_approximate_fixed_point(g, y):
        raise PreconditionViolation(f"{y} is not an approximate fixed point of r.f|X")
    out = y if f(y) != inst.removed else g(y)
    return _certify(f, out, "builder_step")


# -- trees -------------------------------------------------------------------

_chains: "weakref.WeakKeyDictionary[TreeStructure, list]" = weakref.WeakKeyDictionary()


def tree_builder_chain(T: TreeStructure) -> list[BuilderInstance]:
    """Builder instances peeling leaves in pruning order: instance j removes
    the j-th leaf from the tree left by instances 0..j-1."""
    chain = _chains.get(T)
    if chain is None:
        chain = []
        current = T.image
        for leaf in T.pruning_order[:-1]:
            rest = current.subimage([v for v in current.vertices if v != leaf])
            par = T.parent[leaf]
            table = {v: v for v in rest.vertices}
            table[leaf] = par
            chain.append(BuilderInstance(current, leaf, DigitalMap(current, rest, table)))
            current = rest
        _chains[T] = chain
    return chain


def tree_afp(T: TreeStructure, f: DigitalMap) -> Point:
    """Approximate fixed point of a continuous self-map of a tree."""
    _require_continuous_self_map(f, T.image)
    chain = tree_builder_chain(T)
    maps = [f]
    for inst in chain:
        maps.append(inst.reduce(maps[-1]))
    y = T.root
    for level in range(len(chain) - 1, -1, -1):
        y = builder_step(chain[level], maps[level], y, g=maps[level + 1])
    return _certify(f, y, "tree_afp")


def tree_finder(T: TreeStructure) -> AfpFinder:
    return lambda f: tree_afp(T, f)


# -- base finders ------------------------------------------------------------


def interval_afp(f: DigitalMap) -> Point:
    """First t (scanning upward) with |f(t) - t| <= 1 on an interval under c_1."""
    X = f.domain
    if X.dim != 1 or X.rule != Cu(1):
        raise DigitalTopologyError("interval finder needs a 1-D image under c_1")
    for t in X.vertices:
        if abs(f(t)[0] - t[0]) <= 1:
            return _certify(f, t, "interval_afp")
    raise NoApproximateFixedPoint("no approximate fixed point on the interval")


def scan_afp(f: DigitalMap) -> Point:
    """Least approximate fixed point by direct scan."""
    afps = approximate_fixed_points(f)
    if not afps:
        raise NoApproximateFixedPoint("map has no approximate fixed point")
    return afps[0]


# -- products with a cube ----------------------------------------------------


@lru_cache(maxsize=256)
def _layers(Z: DigitalImage, k: int) -> DigitalImage:
    return np_product(Z, make_interval(0, k)).image


def _slice_afp(Z: DigitalImage, k: int, f: DigitalMap, base: AfpFinder) -> Point:
    """Approximate fixed point of a self-map of Z x [0,k] under NP(rule_Z, c_1)."""
    s = Z.dim
    if k == 0:
        # Z x {0} is a copy of Z
        h = DigitalMap.from_indices(Z, Z, [Z.index[f(z + (0,))[:s]] for z in Z.vertices])
        z = base(h)
        if not is_approximate_fixed_point(h, z):
            raise BrokenFinder(f"base finder returned {z}, not an approximate fixed point")
        return _certify(f, z + (0,), "product_afp")
    lower = _layers(Z, k - 1)
    # g = r . f . I with r clamping the top layer t = k down to k - 1
    li = lower.index
    g = DigitalMap.from_indices(
        lower, lower,
        [li[q if q[s] < k else q[:s] + (k - 1,)] for q in (f(p) for p in lower.vertices)],
    )
    p = _slice_afp(Z, k - 1, g, base)
    out = p if f(p)[s] < k else g(p)
    return _certify(f, out, "product_afp")


def product_afp(X: DigitalImage, v: int, n: int, f: DigitalMap, base: AfpFinder) -> Point:
    """Approximate fixed point of a self-map of X x [0,n]^v under NP(rule_X, c_v).

    Outer recursion peels one interval factor off the cube, viewing
    X x [0,n]^v as (X x [0,n]^(v-1)) x [0,n]; inner recursion shrinks that
    interval one layer at a time down to a copy of X x [0,n]^(v-1).
    ``base`` finds approximate fixed points for self-maps of X.
    """
    if v < 0 or n < 0:
        raise DigitalTopologyError("need v >= 0 and n >= 0")
    P = cube_product(X, v, n)
    _require_continuous_self_map(f, P)
    return _product_afp(X, v, n, f, base)


def _product_afp(X, v, n, f, base):
    if v == 0:
        x = base(f)
        if not is_approximate_fixed_point(f, x):
            raise BrokenFinder(f"base finder returned {x}, not an approximate fixed point")
        return x
    Z = cube_product(X, v - 1, n)
    # the nested product has the same vertices and (extensionally) the same adjacency
    nested = _layers(Z, n)
    fn = DigitalMap.from_indices(nested, nested, f.images)

    def base_z(h):
        return _product_afp(X, v - 1, n, h, base)

    p = _slice_afp(Z, n, fn, base_z)
    return _certify(f, p, "product_afp")


# -- boxes -------------------------------------------------------------------


def box_afp(bounds: Sequence[Sequence[int]], f: DigitalMap) -> Point:
    """Approximate fixed point of a self-map of prod [a_i, b_i] under c_v.

    The box is translated to the origin, split as [0,d_1] x (the rest),
    the rest is padded to the cube [0,n]^(v-1) with n = max side, the map is
    conjugated through the clamping retraction, and :func:`product_afp`
    runs with the interval finder as its base.
    """
    bounds = [tuple(b) for b in bounds]
    v = len(bounds)
    B = make_box(bounds, v)
    _require_continuous_self_map(f, B)
    lo = tuple(a for a, _ in bounds)
    sides = [b - a for a, b in bounds]
    n = max(sides)

    def to_origin(p):
        return tuple(c - a for c, a in zip(p, lo))

    def from_origin(p):
        return tuple(c + a for c, a in zip(p, lo))

    def clamp(p):
        return tuple(min(c, d) for c, d in zip(p, sides))

    base_img = make_interval(0, sides[0])
    big = cube_product(base_img, v - 1, n)
    bi = big.index
    F = DigitalMap.from_indices(
        big, big, [bi[to_origin(f(from_origin(clamp(p))))] for p in big.vertices]
    )
    q = product_afp(base_img, v - 1, n, F, interval_afp)
    return _certify(f, from_origin(clamp(q)), "box_afp")


def box_finder(bounds) -> AfpFinder:
    return lambda f: box_afp(bounds, f)
