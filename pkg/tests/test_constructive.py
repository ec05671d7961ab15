import random

import pytest
from hypothesis import given, settings, strategies as st

from afpp.constructive import (
    BuilderInstance,
    box_afp,
    builder_step,
    interval_afp,
    product_afp,
    scan_afp,
    tree_afp,
    tree_builder_chain,
    tree_finder,
)
from afpp.corpus import tree_images
from afpp.errors import (
    BrokenFinder,
    DigitalTopologyError,
    DiscontinuousMap,
    NoApproximateFixedPoint,
    NotASelfMap,
    PreconditionViolation,
)
from afpp.lattice import make_box, make_graph, make_interval, make_path, make_star, tree_structure
from afpp.maps import (
    DigitalMap,
    approximate_fixed_points,
    compose,
    conjugate,
    constant,
    identity,
    is_approximate_fixed_point,
    restrict,
)
from afpp.products import cube_product
from afpp.search import enumerate_continuous_self_maps, random_continuous_self_map

P3 = make_path(3)
P3_REST = P3.subimage([(0,), (1,)])
P3_INST = BuilderInstance(P3, (2,), DigitalMap(P3, P3_REST, {0: 0, 1: 1, 2: 1}))


def test_builder_step_examples():
    f = constant(P3, P3, 2)
    g = P3_INST.reduce(f)
    assert g == constant(P3_REST, P3_REST, 1)
    assert builder_step(P3_INST, f, (1,)) == (1,)
    h = DigitalMap(P3, P3, {0: 2, 1: 1, 2: 0})
    assert P3_INST.reduce(h).table == {(0,): (1,), (1,): (1,)}
    assert builder_step(P3_INST, h, 1) == (1,) and h(1) == (1,)


def test_builder_step_takes_retracted_branch():
    f = DigitalMap(P3, P3, {0: 1, 1: 2, 2: 2})
    # g(0) = 1, g(1) = 1; y = 0 is an AFP of g and f(0) = 1 stays in X
    assert builder_step(P3_INST, f, 0) == (0,)
    # y = 1: f(1) = 2 is the removed point, so the answer is g(1) = r(2) = 1
    assert builder_step(P3_INST, f, 1) == (1,)


def test_builder_step_keeps_y_when_f_stays_inside():
    for seed in range(30):
        f = random_continuous_self_map(P3, seed)
        if (2,) in {f(0), f(1)}:
            continue
        g = P3_INST.reduce(f)
        for y in approximate_fixed_points(g):
            assert builder_step(P3_INST, f, y) == y


def test_builder_detects_non_afp():
    f = DigitalMap(make_path(4), make_path(4), {0: 2, 1: 3, 2: 3, 3: 3})
    X = make_path(4)
    rest = X.subimage([(0,), (1,), (2,)])
    inst = BuilderInstance(X, (3,), DigitalMap(X, rest, {0: 0, 1: 1, 2: 2, 3: 2}))
    g = inst.reduce(f)
    bad = [y for y in g.domain.vertices if not is_approximate_fixed_point(g, y)]
    assert bad
    for y in bad:
        with pytest.raises(PreconditionViolation):
            builder_step(inst, f, y)
    with pytest.raises(PreconditionViolation):
        builder_step(inst, f, (9,))


@pytest.mark.parametrize("X", [make_path(4), make_star(5), make_box([(0, 2), (0, 1)], 2)], ids=repr)
def test_reduce_equals_compose_restrict(X):
    T = tree_structure(X) if X.rule.__class__.__name__ == "Explicit" else None
    if T is not None:
        insts = tree_builder_chain(T)
    else:
        rest = X.subimage([p for p in X.vertices if p != (2, 1)])
        insts = [BuilderInstance(X, (2, 1), DigitalMap(X, rest, {p: p if p != (2, 1) else (1, 1) for p in X.vertices}))]
    for inst in insts[:2]:
        for seed in range(20):
            f = random_continuous_self_map(inst.extended, seed)
            ref = compose(inst.retraction, restrict(f, inst.base.vertices))
            assert inst.reduce(f).table == ref.table


def test_builder_rejects_bad_instances():
    # retraction that moves a point of X
    with pytest.raises(PreconditionViolation):
        BuilderInstance(P3, (2,), DigitalMap(P3, P3_REST, {0: 1, 1: 1, 2: 1}))
    # neighborhood condition fails: removing the middle of a path
    rest = P3.subimage([(0,), (2,)])
    with pytest.raises((PreconditionViolation, DigitalTopologyError)):
        BuilderInstance(P3, (1,), DigitalMap(P3, rest, {0: 0, 1: 0, 2: 2}))
    # N*(x0) not inside N*(r(x0)): a 4-cycle leaf-like removal
    C4 = make_graph(range(4), [(0, 1), (1, 2), (2, 3), (3, 0)])
    rest = C4.subimage([(0,), (1,), (2,)])
    with pytest.raises(PreconditionViolation):
        BuilderInstance(C4, (3,), DigitalMap(C4, rest, {0: 0, 1: 1, 2: 2, 3: 0}))


def test_tree_examples():
    refl = DigitalMap(P3, P3, {0: 2, 1: 1, 2: 0})
    assert tree_afp(tree_structure(P3), refl) == (1,)
    single = make_graph([5], [])
    assert tree_afp(tree_structure(single), identity(single)) == (5,)
    S = make_star(4)
    a = (1,)
    x = tree_afp(tree_structure(S), constant(S, S, a))
    assert x in {(0,), (1,)}


def test_tree_errors():
    T = tree_structure(P3)
    with pytest.raises(DiscontinuousMap):
        tree_afp(T, DigitalMap(P3, P3, {0: 0, 1: 2, 2: 0}))
    with pytest.raises(NotASelfMap):
        tree_afp(T, identity(make_path(4)))


@pytest.mark.parametrize("X", [X for X in tree_images(6)], ids=lambda X: X.name)
def test_tree_afp_every_map_every_root(X):
    for root in X.vertices:
        T = tree_structure(X, root)
        bad = []

        def visit(f):
            if not is_approximate_fixed_point(f, tree_afp(T, f)):
                bad.append(f)

        enumerate_continuous_self_maps(X, consumer=visit)
        assert not bad


def test_tree_chain_follows_pruning_order():
    T = tree_structure(make_star(5))
    chain = tree_builder_chain(T)
    assert [c.removed for c in chain] == list(T.pruning_order[:-1])
    assert len(chain[-1].base) == 1


def test_interval_finder():
    X = make_interval(0, 4)
    f = DigitalMap(X, X, {t: 4 - t for t in range(5)})
    assert interval_afp(f) == (2,)
    shift = DigitalMap(X, X, {t: min(t + 2, 4) for t in range(5)})
    assert interval_afp(shift) == (3,)
    with pytest.raises(DigitalTopologyError):
        interval_afp(identity(make_path(3)))


def test_scan_finder():
    X = make_box([(0, 1), (0, 1)], 1)
    anti = DigitalMap(X, X, {(0, 0): (1, 1), (1, 1): (0, 0), (1, 0): (0, 1), (0, 1): (1, 0)})
    with pytest.raises(NoApproximateFixedPoint):
        scan_afp(anti)
    assert scan_afp(identity(X)) == (0, 0)


def test_product_examples():
    pt = make_graph([0], [])
    P = cube_product(pt, 1, 2)
    f = DigitalMap(P, P, {(0, t): (0, min(t + 1, 2)) for t in range(3)})
    x = product_afp(pt, 1, 2, f, scan_afp)
    assert is_approximate_fixed_point(f, x)
    Q = cube_product(P3, 1, 1)
    x = product_afp(P3, 1, 1, identity(Q), tree_finder(tree_structure(P3)))
    assert identity(Q)(x) == x


@pytest.mark.parametrize("X", [make_path(3), make_star(4), make_graph([0], [])], ids=repr)
@pytest.mark.parametrize("v,n", [(1, 1), (1, 2), (2, 1), (1, 3)])
def test_product_afp_sampled(X, v, n):
    P = cube_product(X, v, n)
    finder = tree_finder(tree_structure(X))
    for seed in range(60):
        f = random_continuous_self_map(P, seed)
        assert is_approximate_fixed_point(f, product_afp(X, v, n, f, finder))


def test_product_afp_exhaustive_small():
    X = make_path(2)
    P = cube_product(X, 1, 1)
    finder = tree_finder(tree_structure(X))
    count = enumerate_continuous_self_maps(
        P, consumer=lambda f: not is_approximate_fixed_point(f, product_afp(X, 1, 1, f, finder)))
    # every map of this complete 4-vertex image is continuous and none stopped the run
    assert count == 4 ** 4


def test_product_v0_is_base_finder():
    X = make_star(4)
    finder = tree_finder(tree_structure(X))
    for seed in range(20):
        f = random_continuous_self_map(X, seed)
        assert product_afp(X, 0, 3, f, finder) == finder(f)


def test_product_detects_broken_base():
    X = make_path(3)
    P = cube_product(X, 1, 1)
    f = constant(P, P, (2, 1))

    def liar(h):
        return h.domain.vertices[0]

    with pytest.raises(BrokenFinder):
        product_afp(X, 1, 1, f, liar)
    with pytest.raises(DiscontinuousMap):
        product_afp(X, 1, 1, DigitalMap(P, P, {p: (0, 0) if p == (2, 1) else (2, 1) for p in P.vertices}), scan_afp)


def test_box_examples():
    X = make_interval(0, 4)
    assert box_afp([(0, 4)], DigitalMap(X, X, {t: 4 - t for t in range(5)})) == (2,)
    B = make_box([(-1, 1), (-1, 1)], 2)
    x = box_afp([(-1, 1), (-1, 1)], identity(B))
    assert identity(B)(x) == x


@pytest.mark.parametrize("bounds", [
    [(0, 1), (0, 2)],
    [(-2, 0), (3, 4), (0, 1)],
    [(0, 3), (0, 1)],
    [(5, 5), (0, 2)],
    [(0, 0)],
    [(-1, 2)],
    [(0, 1), (0, 1), (0, 1)],
])
def test_box_afp_sampled(bounds):
    B = make_box(bounds, len(bounds))
    count = 500 if bounds == [(0, 1), (0, 2)] else 80
    for seed in range(count):
        f = random_continuous_self_map(B, seed)
        assert is_approximate_fixed_point(f, box_afp(bounds, f))


@given(st.integers(0, 2**32))
@settings(max_examples=25)
def test_box_conjugation_coherence(seed):
    rng = random.Random(seed)
    v = rng.randint(1, 3)
    bounds = [(a, a + rng.randint(0, 2)) for a in (rng.randint(-3, 3) for _ in range(v))]
    B = make_box(bounds, v)
    shifted = [(0, b - a) for a, b in bounds]
    Z = make_box(shifted, v)
    lo = [a for a, _ in bounds]
    phi = DigitalMap(B, Z, {p: tuple(c - a for c, a in zip(p, lo)) for p in B.vertices})
    f = random_continuous_self_map(B, seed)
    x = box_afp(bounds, f)
    assert is_approximate_fixed_point(f, x)
    assert is_approximate_fixed_point(conjugate(f, phi), phi(x))


def test_box_rejects_discontinuous():
    X = make_interval(0, 2)
    with pytest.raises(DiscontinuousMap):
        box_afp([(0, 2)], DigitalMap(X, X, {0: 0, 1: 2, 2: 0}))
