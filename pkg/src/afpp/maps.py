"""Digital maps between images, stored as explicit total tables."""
from __future__ import annotations

from typing import Iterable, Mapping, Optional, Sequence

from .errors import DigitalTopologyError, NotASelfMap
from .lattice import DigitalImage, Point, as_point


class DigitalMap:
    """A total function ``domain -> codomain``.

    Internally the table is a tuple of codomain indices listed in the
    domain's canonical vertex order, so two maps are equal exactly when
    their tables agree.  Continuity is never enforced here; ask
    :func:`is_continuous`.
    """

    __slots__ = ("domain", "codomain", "images")

    def __init__(self, domain: DigitalImage, codomain: DigitalImage, table: Mapping):
        table = {as_point(k): v for k, v in table.items()}
        cidx = codomain.index
        images = []
        for p in domain.vertices:
            try:
                q = as_point(table[p])
            except KeyError:
                raise DigitalTopologyError(f"map is undefined at {p}") from None
            if q not in cidx:
                raise DigitalTopologyError(f"image {q} of {p} is not in the codomain")
            images.append(cidx[q])
        if len(table) != len(domain.vertices):
            extra = [p for p in table if p not in domain.index]
            raise DigitalTopologyError(f"map defined outside its domain: {extra[:3]}")
        self.domain = domain
        self.codomain = codomain
        self.images = tuple(images)

    @classmethod
    def from_indices(cls, domain: DigitalImage, codomain: DigitalImage, images: Sequence[int]) -> "DigitalMap":
        f = object.__new__(cls)
        f.domain = domain
        f.codomain = codomain
        f.images = tuple(images)
        return f

    @classmethod
    def from_pairs(cls, domain: DigitalImage, codomain: DigitalImage, pairs: Iterable) -> "DigitalMap":
        table = {}
        for a, b in pairs:
            a = as_point(a)
            if a in table:
                raise DigitalTopologyError(f"map lists {a} twice")
            table[a] = as_point(b)
        return cls(domain, codomain, table)

    def __call__(self, p) -> Point:
        return self.codomain.vertices[self.images[self.domain.index[as_point(p)]]]

    @property
    def table(self) -> dict[Point, Point]:
        cv = self.codomain.vertices
        return {p: cv[i] for p, i in zip(self.domain.vertices, self.images)}

    def pairs(self) -> list[tuple[Point, Point]]:
        cv = self.codomain.vertices
        return [(p, cv[i]) for p, i in zip(self.domain.vertices, self.images)]

    def is_self_map(self) -> bool:
        return self.domain == self.codomain

    def __eq__(self, other):
        if not isinstance(other, DigitalMap):
            return NotImplemented
        return (
            self.images == other.images
            and self.domain == other.domain
            and self.codomain == other.codomain
        )

    def __hash__(self):
        return hash((self.domain.vertices, self.images))

    def __repr__(self):
        body = ", ".join(f"{p}->{q}" for p, q in self.pairs()[:6])
        more = ", ..." if len(self.images) > 6 else ""
        return f"DigitalMap({body}{more})"


def identity(X: DigitalImage) -> DigitalMap:
    return DigitalMap.from_indices(X, X, range(len(X)))


def constant(X: DigitalImage, Y: DigitalImage, c) -> DigitalMap:
    c = Y._require(c)
    return DigitalMap.from_indices(X, Y, [Y.index[c]] * len(X))


def continuity_violation(f: DigitalMap) -> Optional[tuple[Point, Point, Point, Point]]:
    """First adjacent pair (x, x') whose images are neither equal nor adjacent.

    Returns ``(x, x', f(x), f(x'))`` or None when f is continuous.
    """
    img = f.images
    cm = f.codomain.closed_masks
    for i, nb in enumerate(f.domain.neighbor_indices):
        a = img[i]
        for j in nb:
            if j > i and not (cm[a] >> img[j]) & 1:
                dv, cv = f.domain.vertices, f.codomain.vertices
                return dv[i], dv[j], cv[a], cv[img[j]]
    return None


def is_continuous(f: DigitalMap) -> bool:
    return continuity_violation(f) is None


def compose(g: DigitalMap, f: DigitalMap) -> DigitalMap:
    """g after f."""
    if f.codomain is not g.domain and f.codomain != g.domain:
        raise DigitalTopologyError("codomain of f differs from domain of g")
    gi = g.images
    return DigitalMap.from_indices(f.domain, g.codomain, [gi[i] for i in f.images])


def restrict(f: DigitalMap, A: Iterable) -> DigitalMap:
    sub = f.domain.subimage(A)
    idx = f.domain.index
    return DigitalMap.from_indices(sub, f.codomain, [f.images[idx[p]] for p in sub.vertices])


def corestrict(f: DigitalMap, Y: DigitalImage) -> DigitalMap:
    """Reinterpret f with the smaller codomain ``Y`` containing its image."""
    cv = f.codomain.vertices
    try:
        return DigitalMap.from_indices(f.domain, Y, [Y.index[cv[i]] for i in f.images])
    except KeyError as e:
        raise DigitalTopologyError(f"map leaves the codomain at {e.args[0]}") from None


def inclusion(A: DigitalImage, X: DigitalImage) -> DigitalMap:
    return DigitalMap.from_indices(A, X, [X.index[p] for p in A.vertices])


def is_retraction(r: DigitalMap) -> bool:
    X, Y = r.domain, r.codomain
    if not _is_subimage(Y, X):
        raise DigitalTopologyError("codomain is not a sub-image of the domain")
    for y in Y.vertices:
        if r(y) != y:
            return False
    return is_continuous(r)


def _is_subimage(Y: DigitalImage, X: DigitalImage) -> bool:
    if not set(Y.vertices) <= set(X.index):
        return False
    if Y.rule == X.rule:
        return True
    return Y == X.subimage(Y.vertices)


def approximate_fixed_points(f: DigitalMap) -> tuple[Point, ...]:
    """Vertices x with f(x) equal or adjacent to x, in canonical order."""
    if not f.is_self_map():
        raise NotASelfMap("approximate fixed points need a self-map")
    cm = f.domain.closed_masks
    vs = f.domain.vertices
    return tuple(vs[i] for i, a in enumerate(f.images) if (cm[i] >> a) & 1)


def is_approximate_fixed_point(f: DigitalMap, x) -> bool:
    if not f.is_self_map():
        raise NotASelfMap("approximate fixed points need a self-map")
    X = f.domain
    i = X.index[as_point(x)]
    return (X.closed_masks[i] >> f.images[i]) & 1 == 1


def is_bijection(phi: DigitalMap) -> bool:
    return len(phi.domain) == len(phi.codomain) and len(set(phi.images)) == len(phi.images)


def inverse(phi: DigitalMap) -> DigitalMap:
    if not is_bijection(phi):
        raise DigitalTopologyError("map is not a bijection")
    inv = [0] * len(phi.images)
    for i, j in enumerate(phi.images):
        inv[j] = i
    return DigitalMap.from_indices(phi.codomain, phi.domain, inv)


def is_isomorphism(phi: DigitalMap) -> bool:
    return is_bijection(phi) and is_continuous(phi) and is_continuous(inverse(phi))


def conjugate(f: DigitalMap, phi: DigitalMap) -> DigitalMap:
    """phi . f . phi^-1, transporting a self-map of X to one of phi's codomain."""
    return compose(phi, compose(f, inverse(phi)))


def projection(P, i: int) -> DigitalMap:
    """Projection of a product image onto factor ``i`` (0 = base, 1 = fiber).

    ``P`` is a :class:`afpp.products.ProductImage`.
    """
    try:
        factors = (P.base, P.fiber)
        image = P.image
    except AttributeError:
        raise DigitalTopologyError("projection needs a product image") from None
    if i not in (0, 1):
        raise DigitalTopologyError(f"factor index must be 0 or 1, got {i}")
    target = factors[i]
    s = P.split
    tidx = target.index
    cut = (lambda p: p[:s]) if i == 0 else (lambda p: p[s:])
    return DigitalMap.from_indices(image, target, [tidx[cut(p)] for p in image.vertices])
