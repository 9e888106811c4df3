import random

import numpy as np
import pytest

from lzdg.domination import (DominationInstance, brute_force_domination, check_dominating_set,
                             composite_dominating_set, exact_domination, expand_witness,
                             expected_composite_size, is_dominating, paper_dominating_set)
from lzdg.matrix import Mat2
from lzdg.modular import InvalidInput, Unsupported
from lzdg.rings import ResourceLimit, Ring
from lzdg.verify import random_graph
from lzdg.zdg import build_graph, compressed_graph


def _gamma(ring):
    return exact_domination(DominationInstance.from_compressed(compressed_graph(ring)))


def test_explicit_set_at_3():
    D = paper_dominating_set(3, 1)
    assert sorted(m.entries for m in D) == sorted(
        [(1, 0, 0, 0), (1, 1, 1, 1), (1, 2, 2, 1), (0, 0, 0, 1)])


@pytest.mark.parametrize("p,s", [(3, 1), (3, 2), (5, 1)])
def test_explicit_set_dominates(p, s):
    D = paper_dominating_set(p, s)
    assert len(D) == len(set(D)) == p + 1
    assert all(not m.is_zero() and not m.is_unit() for m in D)
    assert check_dominating_set(Ring("mat", p**s), D)


def test_explicit_set_needs_odd_prime():
    with pytest.raises(Unsupported):
        paper_dominating_set(2, 2)


@pytest.mark.parametrize("n,size", [(2, 1), (4, 1), (8, 1), (6, 5), (10, 7), (12, 5)])
def test_composite_set(n, size):
    S = composite_dominating_set(n)
    assert len(S) == expected_composite_size(n) == size
    assert check_dominating_set(Ring("quat", n), S)


def test_composite_set_odd_n():
    S = composite_dominating_set(15)
    assert len(S) == expected_composite_size(15) == 10
    assert check_dominating_set(Ring("quat", 15), S)


def test_check_rejects_non_dominating():
    assert not check_dominating_set(Ring("mat", 3), [Mat2(1, 0, 0, 0, 3)])
    assert not check_dominating_set(Ring("mat", 3), [Mat2(1, 0, 0, 1, 3)])  # a unit


@pytest.mark.parametrize("kind,n,gamma", [("mat", 3, 4), ("mat", 5, 6), ("quat", 2, 1),
                                          ("quat", 4, 1), ("quat", 6, 5), ("quat", 12, 5)])
def test_exact_gamma(kind, n, gamma):
    res = _gamma(Ring(kind, n))
    assert res.gamma == gamma and res.optimal
    assert sum(k for _, k in res.witness) == gamma


def test_witness_expands_to_dominating_set():
    ring = Ring("mat", 3)
    g = build_graph(ring)
    cg = compressed_graph(ring)
    res = exact_domination(DominationInstance.from_compressed(cg))
    chosen = expand_witness(res, cg.members)
    assert len(chosen) == res.gamma
    assert is_dominating(g.undirected(), chosen)


@pytest.mark.parametrize("ring", [Ring("mat", 3), Ring("quat", 2)])
def test_oracle_on_ring_graphs(ring):
    adj = build_graph(ring).undirected()
    inst, _ = DominationInstance.from_graph(adj)
    assert exact_domination(inst).gamma == brute_force_domination(adj)


@pytest.mark.parametrize("seed", range(50))
def test_oracle_on_random_graphs(seed):
    adj = random_graph(random.Random(seed))
    inst, members = DominationInstance.from_graph(adj)
    res = exact_domination(inst)
    assert res.gamma == brute_force_domination(adj)
    assert is_dominating(adj, expand_witness(res, members))


def test_complete_graph_and_universal_vertex():
    K5 = ~np.eye(5, dtype=bool)
    assert brute_force_domination(K5) == 1
    adj = random_graph(random.Random(7))
    n = len(adj)
    big = np.zeros((n + 1, n + 1), dtype=bool)
    big[:n, :n] = adj
    big[n, :n] = big[:n, n] = True
    inst, _ = DominationInstance.from_graph(big)
    assert exact_domination(inst).gamma == 1


def test_caps():
    with pytest.raises(ResourceLimit):
        brute_force_domination(np.zeros((49, 49), dtype=bool))
    cg = compressed_graph(Ring("quat", 15))
    with pytest.raises(ResourceLimit):
        exact_domination(DominationInstance.from_compressed(cg))


def test_time_limit_marks_result_non_optimal():
    cg = compressed_graph(Ring("quat", 15))
    res = exact_domination(DominationInstance.from_compressed(cg), cap=1000, time_limit=0.01)
    assert not res.optimal
    assert res.gamma <= res.certificate["greedy_upper_bound"]


def test_instance_validation():
    with pytest.raises(InvalidInput):
        DominationInstance([0], np.zeros((1, 1), dtype=bool), [False], ["a"])
    adj = np.array([[0, 1], [0, 0]], dtype=bool)
    with pytest.raises(InvalidInput):
        DominationInstance([1, 1], adj, [False, False], ["a", "b"])


def test_deterministic_result():
    ring = Ring("quat", 6)
    a, b = _gamma(ring), _gamma(ring)
    assert a.witness == b.witness and a.certificate == b.certificate


def test_result_json_schema():
    res = _gamma(Ring("mat", 3))
    doc = res.to_json(n=3, ring="M_2(Z_3)")
    assert set(doc) >= {"n", "ring", "gamma", "witness", "elapsed_ms", "optimal"}
    assert doc["gamma"] == 4 and doc["optimal"] is True
