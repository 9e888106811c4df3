import math

import numpy as np
import pytest

from lzdg import automorphism as aut
from lzdg.rings import ResourceLimit, Ring
from lzdg.zdg import build_graph, compress, twin_partition


@pytest.fixture(scope="module")
def groups():
    out = {}
    for s in (2, 3, 4):
        g = aut.labeled_graph(s)
        out[s] = (g, aut.find_automorphisms(g))
    return out


def test_predicted_order():
    assert [aut.predicted_order(s) for s in (1, 2, 3, 4, 5)] == [1, 12, 36, 432, 1296]


@pytest.mark.parametrize("s,order", [(2, 12), (3, 36), (4, 432)])
def test_orders(groups, s, order):
    g, summary = groups[s]
    assert summary.order == order == summary.predicted


@pytest.mark.parametrize("s", [2, 3, 4])
def test_every_automorphism_passes_structure_checks(groups, s):
    g, summary = groups[s]
    assert summary.stabilization_pass and summary.pairing_pass
    assert not summary.failures
    for f in summary.automorphisms:
        assert aut.is_automorphism(g.adjacency, f)


@pytest.mark.parametrize("s", [2, 3, 4])
def test_found_set_is_a_group(groups, s):
    _, summary = groups[s]
    group = set(summary.automorphisms)
    ident = tuple(range(len(summary.automorphisms[0])))
    assert ident in group
    for f in group:
        assert aut.invert(f) in group
        for h in summary.generators:
            assert aut.compose(f, h) in group


def test_generators_generate(groups):
    _, summary = groups[3]
    span = {tuple(range(len(summary.automorphisms[0])))}
    frontier = list(span)
    while frontier:
        nxt = []
        for f in frontier:
            for g in summary.generators:
                h = aut.compose(g, f)
                if h not in span:
                    span.add(h)
                    nxt.append(h)
        frontier = nxt
    assert span == set(summary.automorphisms)


def test_identity_passes_checks(groups):
    g, _ = groups[2]
    ident = tuple(range(len(g)))
    assert all(aut.check_stabilization(ident, g).values())
    assert all(aut.check_pairing(ident, g).values())


def test_fixed_points_at_s2(groups):
    g, summary = groups[2]
    two = g.vertex(1, "1")
    top = g.vertex(1, "1+i+j+k")
    for f in summary.automorphisms:
        assert f[two] == two and f[top] == top


def test_triple_fused_at_s3(groups):
    g, summary = groups[3]
    mid = set(g.P(1))
    assert len(mid) == 1
    (v,) = mid
    assert all(f[v] == v for f in summary.automorphisms)


def test_pairing_violation_is_not_an_automorphism(groups):
    g, summary = groups[2]
    # permute P_0 by a 3-cycle but leave its partner P_1 fixed
    f = list(range(len(g)))
    a, b, c = g.P(0)
    f[a], f[b], f[c] = b, c, a
    assert not all(aut.check_pairing(f, g).values())
    assert tuple(f) not in set(summary.automorphisms)
    assert not aut.is_automorphism(g.adjacency, f)


def test_single_vertex_graph():
    assert aut.enumerate_automorphisms(np.zeros((1, 1), dtype=bool)) == [(0,)]


def test_search_cap():
    with pytest.raises(ResourceLimit):
        aut.enumerate_automorphisms(np.zeros((65, 65), dtype=bool))


def test_small_graph_counts():
    # the 4-cycle has the dihedral group of order 8
    C4 = np.zeros((4, 4), dtype=bool)
    for u in range(4):
        C4[u, (u + 1) % 4] = C4[(u + 1) % 4, u] = True
    assert len(aut.enumerate_automorphisms(C4)) == 8
    assert len(aut.enumerate_automorphisms(~np.eye(4, dtype=bool))) == 24


def test_reg_order():
    assert aut.reg_order([1, 1, 1]) == 1
    assert aut.reg_order([3, 2]) == 12
    t = twin_partition(build_graph(Ring("quat", 4)))
    assert aut.reg_order(t) == math.prod(math.factorial(k) for k in t.sizes)
    assert aut.reg_order_log10(t.sizes) == pytest.approx(math.log10(aut.reg_order(t)))


def test_regular_permutations_preserve_adjacency():
    g = build_graph(Ring("quat", 4))
    t = twin_partition(g)
    report = aut.sample_regular_automorphisms(g, t, 100, seed=3)
    assert report == {"trials": 100, "passed": 100}
    assert aut.preserves_adjacency(g, np.arange(len(g)))


def test_cross_class_transposition_fails():
    g = build_graph(Ring("quat", 4))
    t = twin_partition(g)
    perm = np.arange(len(g))
    a, b = t.classes[0][0], t.classes[1][0]
    perm[a], perm[b] = b, a
    assert not aut.preserves_adjacency(g, perm)


def test_lift_at_s2():
    g = build_graph(Ring("quat", 4))
    cg = compress(g, twin_partition(g))
    group = aut.weighted_quotient_automorphisms(cg)
    assert len(group) == 12
    for f in group:
        assert aut.preserves_adjacency(g, aut.lift(f, cg, len(g)))


def test_weighted_quotient_at_s3_is_larger():
    # the fused triple can be permuted by whole-class swaps
    g = aut.labeled_graph(3)
    summary = aut.find_automorphisms(g)
    assert summary.weighted_order == 6 * summary.order


def test_big_int_field():
    assert aut.big_int_field(120, 2.08) == 120
    assert aut.big_int_field(0, 512.25) == "~1e512.250"
