import itertools
import random

import pytest
from hypothesis import given, settings, strategies as st

import oracles
from afpp import kernel
from afpp.corpus import random_image, tree_images
from afpp.lattice import Cu, DigitalImage, make_box, make_graph, make_interval, make_path, make_star
from afpp.maps import DigitalMap, approximate_fixed_points, is_continuous, is_retraction
from afpp.search import (
    SearchBudget,
    Undecided,
    brute_force_verdict,
    count_search_nodes,
    decide_afpp,
    enumerate_continuous_self_maps,
    random_continuous_self_map,
)
from afpp.errors import DigitalTopologyError

BACKENDS = ["python"] + (["cython"] if kernel.COMPILED else [])


def _corpus(count, max_vertices, seed=7):
    rng = random.Random(seed)
    return [random_image(rng, max_vertices) for _ in range(count)]


def _sound(v):
    if v.holds is False:
        assert v.witness is not None
        assert is_continuous(v.witness)
        assert approximate_fixed_points(v.witness) == ()
    else:
        assert v.holds is True and v.witness is None and v.exhaustive


@pytest.mark.parametrize("backend", BACKENDS)
def test_decide_examples(backend):
    assert decide_afpp(make_interval(0, 2), backend=backend).holds
    sq = decide_afpp(make_box([(0, 1), (0, 1)], 1), backend=backend)
    assert sq.holds is False
    _sound(sq)
    assert decide_afpp(make_box([(-1, 1), (-1, 1)], 2), backend=backend).holds
    assert decide_afpp(make_box([(-1, 1), (-1, 1)], 1), backend=backend).holds is False


def test_square_witness_is_canonical_first():
    X = make_box([(0, 1), (0, 1)], 1)
    v = decide_afpp(X)
    # the search tries values in increasing vertex order, so the first witness
    # is the lexicographically least no-AFP continuous map by index table
    ref = None
    for imgs in itertools.product(range(4), repeat=4):
        t = {X.vertices[i]: X.vertices[c] for i, c in enumerate(imgs)}
        if oracles.continuous(X, X, t) and not oracles.afps(X, t):
            ref = t
            break
    assert v.witness.table == ref


def test_centre_blocks_search_immediately():
    v = decide_afpp(make_box([(-1, 1), (-1, 1)], 2))
    assert v.holds and v.nodes_explored == 0


@pytest.mark.parametrize("X", list(tree_images(8)), ids=lambda X: X.name)
def test_trees_hold(X):
    assert decide_afpp(X).holds


@pytest.mark.parametrize("X", _corpus(80, 6), ids=repr)
def test_oracle_agreement(X):
    v = decide_afpp(X)
    _sound(v)
    assert v.holds == oracles.afpp_holds(X)


@pytest.mark.parametrize("X", [
    make_path(7),
    make_graph(range(7), [(i, (i + 1) % 7) for i in range(7)]),
    make_box([(0, 6)], 1),
    DigitalImage([(0, 0), (0, 1), (1, 0), (1, 1), (2, 0), (2, 1), (0, 2)], Cu(2)),
], ids=repr)
def test_oracle_agreement_seven_vertices(X):
    assert decide_afpp(X).holds == brute_force_verdict(X)[0]


@pytest.mark.parametrize("X", _corpus(30, 6, seed=11), ids=repr)
def test_verdict_invariant_under_relabeling(X):
    n = len(X)
    perm = list(range(n))
    random.Random(n).shuffle(perm)
    idx = X.index
    Y = make_graph(range(n), [(perm[idx[a]], perm[idx[b]]) for a, b in X.edges()])
    assert decide_afpp(X).holds == decide_afpp(Y).holds


def _retracts(X):
    # every sub-image Y that admits a retraction X -> Y, found by brute force
    vs = X.vertices
    for r in range(1, len(vs)):
        for sub in itertools.combinations(vs, r):
            Y = X.subimage(sub)
            rest = [p for p in vs if p not in Y.index]
            for imgs in itertools.product(Y.vertices, repeat=len(rest)):
                t = {y: y for y in Y.vertices}
                t.update(zip(rest, imgs))
                if is_retraction(DigitalMap(X, Y, t)):
                    yield Y
                    break


@pytest.mark.parametrize("X", [X for X in _corpus(40, 5, seed=3) if len(X) >= 2][:15], ids=repr)
def test_retracts_inherit_afpp(X):
    if not decide_afpp(X).holds:
        return
    for Y in _retracts(X):
        assert decide_afpp(Y).holds


def test_retracts_of_holding_images_are_exercised():
    # make sure the property above is not vacuous
    X = make_box([(0, 2), (0, 1)], 2)
    assert decide_afpp(X).holds
    assert sum(1 for _ in _retracts(X)) > 5


@given(st.integers(0, 2**32))
@settings(max_examples=40)
def test_unit_square_forces_failure(seed):
    rng = random.Random(seed)
    ax, ay = rng.randint(0, 2), rng.randint(0, 2)
    square = {(ax, ay), (ax + 1, ay), (ax, ay + 1), (ax + 1, ay + 1)}
    cells = [p for p in itertools.product(range(4), repeat=2) if p not in square]
    extra = rng.sample(cells, rng.randint(0, 8))
    X = DigitalImage(square | set(extra), Cu(1))
    v = decide_afpp(X)
    assert v.holds is False
    _sound(v)


def test_enumeration_counts():
    assert enumerate_continuous_self_maps(make_path(3)) == 17
    assert enumerate_continuous_self_maps(make_interval(0, 1)) == 4
    assert enumerate_continuous_self_maps(make_graph([0], [])) == 1


@pytest.mark.parametrize("X", _corpus(30, 5, seed=5), ids=repr)
def test_enumeration_matches_oracle(X):
    seen = []
    n = enumerate_continuous_self_maps(X, consumer=seen.append)
    ref = [t for t in oracles.continuous_self_maps(X)]
    assert n == len(seen) == len(ref)
    assert len(set(seen)) == n
    assert {tuple(sorted(m.table.items())) for m in seen} == {tuple(sorted(t.items())) for t in ref}


def test_enumeration_early_stop():
    seen = []
    n = enumerate_continuous_self_maps(make_path(3), consumer=lambda f: seen.append(f) or len(seen) == 5)
    assert n == 5 and len(seen) == 5


@pytest.mark.parametrize("X", [
    make_box([(-1, 1), (-1, 1)], 2),
    make_star(5),
    make_box([(0, 1), (0, 1), (0, 1)], 3),
    make_graph(range(4), [(0, 1), (0, 2), (0, 3), (1, 2)]),
], ids=repr)
def test_blocking_vertex_prunes(X):
    full = (1 << len(X)) - 1
    assert any(m == full for m in X.closed_masks)
    assert count_search_nodes(X, True) < count_search_nodes(X, False)


@pytest.mark.skipif(not kernel.COMPILED, reason="compiled kernel not built")
@pytest.mark.parametrize("X", _corpus(40, 8, seed=13) + [make_box([(0, 2), (0, 2)], 1)], ids=repr)
def test_backends_agree_node_for_node(X):
    a = decide_afpp(X, backend="python")
    b = decide_afpp(X, backend="cython")
    assert (a.holds, a.witness, a.nodes_explored) == (b.holds, b.witness, b.nodes_explored)
    sa, sb = [], []
    na = enumerate_continuous_self_maps(X, consumer=sa.append, backend="python")
    nb = enumerate_continuous_self_maps(X, consumer=sb.append, backend="cython")
    assert na == nb and sa == sb


@pytest.mark.parametrize("X", [
    make_box([(0, 2), (0, 2)], 1),
    make_box([(0, 1), (0, 1), (0, 1)], 2),
    make_path(6),
    make_box([(0, 1), (0, 2)], 1),
], ids=repr)
def test_parallel_matches_sequential(X):
    a = decide_afpp(X)
    b = decide_afpp(X, workers=2)
    assert (a.holds, a.witness, a.nodes_explored) == (b.holds, b.witness, b.nodes_explored)


@pytest.mark.parametrize("backend", BACKENDS)
def test_budget_gives_undecided(backend):
    X = make_path(8)
    with pytest.raises(Undecided) as e:
        decide_afpp(X, SearchBudget(max_nodes=3), backend=backend)
    assert e.value.verdict.holds is None and not e.value.verdict.exhaustive
    with pytest.raises(Undecided):
        enumerate_continuous_self_maps(X, SearchBudget(max_nodes=3), backend=backend)
    with pytest.raises(Undecided):
        decide_afpp(make_path(15))
    with pytest.raises(Undecided):
        decide_afpp(make_path(5), SearchBudget(max_vertices=4))


def test_budget_validation():
    with pytest.raises(DigitalTopologyError):
        SearchBudget(max_nodes=0)


@pytest.mark.parametrize("X", _corpus(20, 10, seed=17) + [make_graph([0], [])], ids=repr)
def test_sampler(X):
    for seed in range(10):
        f = random_continuous_self_map(X, seed)
        assert is_continuous(f)
        assert f == random_continuous_self_map(X, seed)


def test_sampler_varies_with_seed():
    X = make_box([(0, 2), (0, 1)], 1)
    assert len({random_continuous_self_map(X, s) for s in range(30)}) > 5


def test_sampler_falls_back_to_constant():
    X = make_path(6)
    f = random_continuous_self_map(X, 3, max_nodes=1)
    assert len(set(f.images)) == 1


def test_brute_force_verdict_witness():
    holds, w = brute_force_verdict(make_box([(0, 1), (0, 1)], 1))
    assert holds is False and is_continuous(w) and not approximate_fixed_points(w)


def test_box_verdict_boundary():
    # with m sides of positive length, c_u fails exactly when m >= 2 and u < m
    from afpp.corpus import box_shapes
    cases = 0
    for sides in box_shapes(14, 4):
        bounds = [(0, d) for d in sides]
        m = sum(1 for d in sides if d >= 1)
        for u in range(1, len(sides) + 1):
            v = decide_afpp(make_box(bounds, u))
            _sound(v)
            assert v.holds == (not (m >= 2 and u < m)), (bounds, u)
            cases += 1
    assert cases == 966


def test_degenerate_box_instance():
    # [0,1]^2 x {0} under c_2 is a complete graph on four points
    X = make_box([(0, 1), (0, 1), (0, 0)], 2)
    assert X.edge_count() == 6
    assert decide_afpp(X).holds is True
    assert oracles.afpp_holds(X)


def test_pure_python_fallback_selected_by_env():
    import os
    import subprocess
    import sys
    code = ("from afpp import kernel; from afpp.search import decide_afpp; "
            "from afpp.lattice import make_box; "
            "print(kernel.backend_name(), decide_afpp(make_box([(0, 1), (0, 1)], 1)).nodes_explored)")
    env = dict(os.environ, AFPP_PURE_PYTHON="1")
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
    assert out.stdout.split() == ["python", str(decide_afpp(make_box([(0, 1), (0, 1)], 1)).nodes_explored)]
