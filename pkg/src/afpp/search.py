"""Exhaustive search over continuous self-maps.

``decide_afpp`` looks directly for a continuous self-map with no
approximate fixed point: each vertex x starts with the candidate set
X minus N*(x), and assigning f(x) = c shrinks the candidates of every later
neighbor of x to N*(c).  A witness is the first map found in canonical
depth-first order; "holds" is only reported after the tree is exhausted.
"""
from __future__ import annotations

import itertools
import random
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Callable, Optional

from . import kernel
from .errors import DigitalTopologyError
from .lattice import DigitalImage
from .maps import DigitalMap, approximate_fixed_points, is_continuous


@dataclass(frozen=True)
class SearchBudget:
    max_vertices: int = 14
    max_nodes: int = 10**8
    seed: int = 0

    def __post_init__(self):
        if self.max_vertices < 1 or self.max_nodes < 1:
            raise DigitalTopologyError("search limits must be positive")


@dataclass(frozen=True)
class AfppVerdict:
    """Outcome of :func:`decide_afpp`.

    ``holds`` is True, False, or None (undecided, only ever carried by an
    :class:`Undecided` exception).
    """

    holds: Optional[bool]
    witness: Optional[DigitalMap]
    nodes_explored: int
    exhaustive: bool

    @property
    def status(self) -> str:
        return {True: "holds", False: "fails", None: "undecided"}[self.holds]


class Undecided(RuntimeError):
    """The search budget ran out before a verdict was reached."""

    def __init__(self, message: str, verdict: AfppVerdict):
        super().__init__(message)
        self.verdict = verdict


def _later_neighbors(X: DigitalImage) -> list[tuple[int, ...]]:
    return [tuple(j for j in nb if j > i) for i, nb in enumerate(X.neighbor_indices)]


def _check_size(X: DigitalImage, budget: SearchBudget) -> None:
    if len(X) > budget.max_vertices:
        raise Undecided(
            f"image has {len(X)} vertices, budget allows {budget.max_vertices}",
            AfppVerdict(None, None, 0, False),
        )


def no_afp_domains(X: DigitalImage) -> list[int]:
    full = (1 << len(X)) - 1
    return [full & ~m for m in X.closed_masks]


def decide_afpp(
    X: DigitalImage,
    budget: SearchBudget = SearchBudget(),
    workers: int = 1,
    backend: Optional[str] = None,
) -> AfppVerdict:
    """Decide whether every continuous self-map of X has an approximate fixed point.

    Raises :class:`Undecided` if the node budget runs out.  With
    ``workers > 1`` the top-level branches run in separate processes; the
    verdict, witness and node count are the same as the sequential run.
    """
    _check_size(X, budget)
    n = len(X)
    later = _later_neighbors(X)
    closed = X.closed_masks
    domains = no_afp_domains(X)
    if workers > 1 and n > 1 and all(domains):
        status, nodes, assign = _parallel_first(n, later, closed, domains, budget.max_nodes, workers, backend)
    else:
        status, nodes, _, assign = kernel.run(n, later, closed, domains, budget.max_nodes, True, backend=backend)
    if status == kernel.BUDGET:
        raise Undecided(
            f"node budget {budget.max_nodes} exhausted",
            AfppVerdict(None, None, nodes, False),
        )
    if status == kernel.STOPPED:
        w = DigitalMap.from_indices(X, X, assign)
        if not is_continuous(w) or approximate_fixed_points(w):
            raise AssertionError("search produced an invalid witness")
        return AfppVerdict(False, w, nodes, True)
    return AfppVerdict(True, None, nodes, True)


def _branch(args):
    n, later, closed, domains, max_nodes, backend = args
    return kernel.run(n, later, closed, domains, max_nodes, True, backend=backend)


def _parallel_first(n, later, closed, domains, max_nodes, workers, backend):
    # One job per value of f(vertex 0); replaying them in value order gives
    # exactly the sequential search's prefix.
    values = [c for c in range(n) if (domains[0] >> c) & 1]
    jobs = []
    for c in values:
        d = list(domains)
        d[0] = 1 << c
        jobs.append((n, later, closed, d, max_nodes, backend))
    with ProcessPoolExecutor(max_workers=workers) as ex:
        results = list(ex.map(_branch, jobs))
    total = 0
    for status, nodes, _, assign in results:
        total += nodes
        if status == kernel.BUDGET or total > max_nodes:
            return kernel.BUDGET, min(total, max_nodes), None
        if status == kernel.STOPPED:
            return kernel.STOPPED, total, assign
    return kernel.EXHAUSTED, total, None


def enumerate_continuous_self_maps(
    X: DigitalImage,
    budget: SearchBudget = SearchBudget(),
    consumer: Optional[Callable[[DigitalMap], object]] = None,
    backend: Optional[str] = None,
) -> int:
    """Visit every continuous self-map of X once, in canonical order.

    ``consumer`` receives each map; a truthy return value stops the
    enumeration.  Returns the number of maps visited.
    """
    _check_size(X, budget)
    n = len(X)
    full = (1 << n) - 1

    def cb(assign):
        return consumer(DigitalMap.from_indices(X, X, assign))
    status, nodes, count, _ = kernel.run(
        n, _later_neighbors(X), X.closed_masks, [full] * n, budget.max_nodes, False,
        cb if consumer is not None else None, backend=backend
    )
    if status == kernel.BUDGET:
        raise Undecided(f"node budget {budget.max_nodes} exhausted after {count} maps",
                        AfppVerdict(None, None, nodes, False))
    return count


def count_search_nodes(X: DigitalImage, constrained: bool, budget: SearchBudget = SearchBudget()) -> int:
    """Search-tree size of the AFP-avoiding search or of plain enumeration."""
    n = len(X)
    domains = no_afp_domains(X) if constrained else [(1 << n) - 1] * n
    _, nodes, _, _ = kernel.run(n, _later_neighbors(X), X.closed_masks, domains, budget.max_nodes, constrained)
    return nodes


def random_continuous_self_map(X: DigitalImage, seed: int, max_nodes: int = 10_000) -> DigitalMap:
    """A continuous self-map built by randomized backtracking.

    Deterministic for a fixed seed.  If backtracking exceeds ``max_nodes``
    a seeded constant map is returned instead.
    """
    rng = random.Random(seed)
    n = len(X)
    later = _later_neighbors(X)
    closed = X.closed_masks
    full = (1 << n) - 1
    assign = [0] * n
    nodes = 0

    def extend(depth, dom):
        nonlocal nodes
        if depth == n:
            return True
        cands = [c for c in range(n) if (dom[depth] >> c) & 1]
        rng.shuffle(cands)
        for c in cands:
            nodes += 1
            if nodes > max_nodes:
                return False
            nxt = list(dom)
            ok = True
            for j in later[depth]:
                nxt[j] &= closed[c]
                if not nxt[j]:
                    ok = False
                    break
            if ok:
                assign[depth] = c
                if extend(depth + 1, nxt):
                    return True
        return False

    if extend(0, [full] * n):
        return DigitalMap.from_indices(X, X, assign)
    return DigitalMap.from_indices(X, X, [rng.randrange(n)] * n)


def brute_force_verdict(X: DigitalImage) -> tuple[bool, Optional[DigitalMap]]:
    """Unpruned oracle: scan all |X|^|X| maps, keep the continuous ones,
    and look for one without approximate fixed points."""
    n = len(X)
    edges = [(i, j) for i, nb in enumerate(X.neighbor_indices) for j in nb if j > i]
    cm = X.closed_masks
    for f in itertools.product(range(n), repeat=n):
        if any(not (cm[f[i]] >> f[j]) & 1 for i, j in edges):
            continue
        if all(not (cm[i] >> f[i]) & 1 for i in range(n)):
            return False, DigitalMap.from_indices(X, X, f)
    return True, None
