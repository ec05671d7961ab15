"""Small-instance generators: trees up to isomorphism, random images, box shapes."""
from __future__ import annotations

import itertools
import random
from typing import Iterator

from .lattice import Cu, DigitalImage, Explicit, make_graph


def _prufer_edges(seq: tuple[int, ...], n: int) -> list[tuple[int, int]]:
    degree = [1] * n
    for x in seq:
        degree[x] += 1
    edges = []
    for x in seq:
        leaf = min(i for i in range(n) if degree[i] == 1)
        edges.append((leaf, x))
        degree[leaf] -= 1
        degree[x] -= 1
    u, w = [i for i in range(n) if degree[i] == 1]
    edges.append((u, w))
    return edges


def _canonical(n: int, edges) -> str:
    adj = {i: [] for i in range(n)}
    for a, b in edges:
        adj[a].append(b)
        adj[b].append(a)
    # centers: strip leaves layer by layer
    remaining = set(range(n))
    deg = {i: len(adj[i]) for i in range(n)}
    layer = [i for i in range(n) if deg[i] <= 1]
    while len(remaining) > 2:
        nxt = []
        for leaf in layer:
            remaining.discard(leaf)
            for j in adj[leaf]:
                if j in remaining:
                    deg[j] -= 1
                    if deg[j] == 1:
                        nxt.append(j)
        layer = nxt

    def encode(v, parent):
        return "(" + "".join(sorted(encode(c, v) for c in adj[v] if c != parent)) + ")"

    return min(encode(c, None) for c in remaining)


def nonisomorphic_trees(n: int) -> list[list[tuple[int, int]]]:
    """One edge list on vertices 0..n-1 per isomorphism class of n-vertex trees."""
    if n == 1:
        return [[]]
    if n == 2:
        return [[(0, 1)]]
    seen = {}
    for seq in itertools.product(range(n), repeat=n - 2):
        edges = _prufer_edges(seq, n)
        key = _canonical(n, edges)
        if key not in seen:
            seen[key] = sorted(tuple(sorted(e)) for e in edges)
    return [seen[k] for k in sorted(seen)]


def tree_images(max_n: int) -> Iterator[DigitalImage]:
    for n in range(1, max_n + 1):
        for k, edges in enumerate(nonisomorphic_trees(n)):
            yield make_graph(range(n), edges, name=f"tree{n}.{k}")


def random_image(rng: random.Random, max_vertices: int) -> DigitalImage:
    """A small image: either a point set under some c_u, or an explicit graph."""
    size = rng.randint(1, max_vertices)
    if rng.random() < 0.5:
        dim = rng.randint(1, 3)
        side = {1: 7, 2: 3, 3: 2}[dim]
        cells = list(itertools.product(range(side), repeat=dim))
        pts = rng.sample(cells, min(size, len(cells)))
        return DigitalImage(pts, Cu(rng.randint(1, dim)))
    p = rng.choice([0.3, 0.5, 0.7])
    edges = [(i, j) for i in range(size) for j in range(i + 1, size) if rng.random() < p]
    return DigitalImage([(i,) for i in range(size)], Explicit(((i,), (j,)) for i, j in edges))


def box_shapes(max_points: int, max_dim: int) -> Iterator[tuple[int, ...]]:
    """Side lengths (b_i - a_i) of every box with at most ``max_points`` points."""
    for v in range(1, max_dim + 1):
        def rec(prefix, budget):
            if len(prefix) == v:
                yield tuple(prefix)
                return
            for d in range(budget):
                yield from rec(prefix + [d], budget // (d + 1))
        yield from rec([], max_points)


def has_unit_square(sides) -> bool:
    """True when the box contains a sub-box with at least two unit sides."""
    return sum(1 for d in sides if d >= 1) >= 2
