"""Normal products of digital images and extensional adjacency identities."""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Optional

from .errors import DigitalTopologyError
from .lattice import NP, Cu, DigitalImage, Point, make_box


@dataclass(frozen=True, eq=False)
class ProductImage:
    base: DigitalImage
    fiber: DigitalImage
    image: DigitalImage

    @property
    def split(self) -> int:
        return self.base.dim


def np_product(X: DigitalImage, Y: DigitalImage, name: Optional[str] = None) -> ProductImage:
    """X x Y under the normal product adjacency NP(rule_X, rule_Y).

    Product vertices are the flat concatenations x + y, so lexicographic
    order on them is the (x, y) order.
    """
    pts = [x + y for x in X.vertices for y in Y.vertices]
    image = DigitalImage(pts, NP(X.rule, Y.rule, X.dim), name=name)
    return ProductImage(X, Y, image)


@lru_cache(maxsize=64)
def cube(n: int, v: int) -> DigitalImage:
    return make_box([(0, n)] * v, v, name=f"[0,{n}]^{v}")


@lru_cache(maxsize=256)
def cube_product(X: DigitalImage, v: int, n: int) -> DigitalImage:
    """X x [0,n]^v under NP(rule_X, c_v); X itself when v = 0."""
    if v == 0:
        return X
    return np_product(X, cube(n, v)).image


def adjacency_discrepancy(A: DigitalImage, B: DigitalImage) -> Optional[tuple[Point, Point, bool, bool]]:
    """First vertex pair on which two images over the same vertex set disagree.

    Returns ``(p, q, adjacent_in_A, adjacent_in_B)`` or None.  Both rules are
    evaluated pairwise, so this is an extensional comparison.
    """
    if A.vertices != B.vertices:
        raise DigitalTopologyError("images have different vertex sets")
    vs = A.vertices
    ra, rb = A.rule, B.rule
    for i, p in enumerate(vs):
        for q in vs[i + 1:]:
            a, b = ra.adjacent(p, q), rb.adjacent(p, q)
            if a != b:
                return p, q, a, b
    return None


def _full_u(X: DigitalImage) -> int:
    if not isinstance(X.rule, Cu):
        raise DigitalTopologyError("image is not under a c_u rule")
    return X.rule.u


def np_cu_discrepancy(X: DigitalImage, Y: DigitalImage):
    """Compare NP(c_u, c_w) on X x Y with c_{u+w} on concatenated coordinates.

    Works for any c_u rules, full or not; returns the first disagreeing pair
    as in :func:`adjacency_discrepancy`.
    """
    u, w = _full_u(X), _full_u(Y)
    prod = np_product(X, Y).image
    flat = DigitalImage(prod.vertices, Cu(u + w))
    return adjacency_discrepancy(prod, flat)


def np_equals_cu(X: DigitalImage, Y: DigitalImage):
    """Check NP(c_m, c_n) = c_{m+n} on X x Y for X in Z^m, Y in Z^n.

    Both images must carry their full-dimension rule.  Returns
    ``(equal, first_discrepancy)``.
    """
    if _full_u(X) != X.dim:
        raise DigitalTopologyError(f"left image uses c_{X.rule.u} in dimension {X.dim}")
    if _full_u(Y) != Y.dim:
        raise DigitalTopologyError(f"right image uses c_{Y.rule.u} in dimension {Y.dim}")
    d = np_cu_discrepancy(X, Y)
    return d is None, d


def np_assoc_check(X: DigitalImage, k: int, n: int) -> bool:
    """(X x [0,n]^k) x [0,n] under NP(NP(rule, c_k), c_1) versus
    X x [0,n]^(k+1) under NP(rule, c_(k+1)), compared pair by pair."""
    if k < 1 or n < 0:
        raise DigitalTopologyError("need k >= 1 and n >= 0")
    nested = np_product(np_product(X, cube(n, k)).image, cube(n, 1)).image
    flat = np_product(X, cube(n, k + 1)).image
    return adjacency_discrepancy(nested, flat) is None


def brute_force_np_adjacent(X: DigitalImage, Y: DigitalImage, p: Point, q: Point) -> bool:
    """The three-clause normal product definition, evaluated literally."""
    s = X.dim
    x, y, x2, y2 = p[:s], p[s:], q[:s], q[s:]
    ax = X.rule.adjacent(x, x2) if x != x2 else False
    ay = Y.rule.adjacent(y, y2) if y != y2 else False
    return (ax and y == y2) or (x == x2 and ay) or (ax and ay)
