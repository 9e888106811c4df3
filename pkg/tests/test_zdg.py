import json

import numpy as np
import pytest

from lzdg.matrix import Mat2
from lzdg.rings import ResourceLimit, Ring
from lzdg.zdg import (annihilators, build_graph, class_table_csv, compress, compressed_graph,
                      expected_degree_table, measured_degree_table, neighbor_formula_check,
                      open_twin_quotient, class_quotient_graph, to_dot, to_json,
                      twin_partition, zero_divisors, ZdGraph)


@pytest.mark.parametrize("kind,n,count", [("quat", 2, 7), ("mat", 3, 32), ("quat", 4, 127),
                                          ("mat", 9, 2672), ("mat", 5, 144)])
def test_vertex_counts(kind, n, count):
    ring = Ring(kind, n)
    assert ring.zero_divisor_count() == count
    assert len(zero_divisors(ring)) == count


def test_graph_has_no_loops_and_lexicographic_order():
    g = build_graph(Ring("quat", 4))
    assert not np.diag(g.out_adjacency).any()
    codes = [tuple(v) for v in g.vertices.tolist()]
    assert codes == sorted(codes)


def test_annihilators():
    ring = Ring("mat", 3)
    left, right = annihilators(ring, (0, 0, 0, 0))
    assert len(left) == len(right) == 81
    left, right = annihilators(ring, (1, 0, 0, 1))
    assert len(right) == 1 and not right.any()
    _, right = annihilators(ring, Mat2.E(1, 1, 3).entries, restrict=True)
    assert len(right) == 8
    assert (right[:, :2] == 0).all()  # zero first row


@pytest.mark.parametrize("s", [1, 2])
def test_reversible_for_powers_of_two(s):
    g = build_graph(Ring("quat", 2**s))
    assert (g.out_adjacency == g.in_adjacency).all()


def test_matrix_ring_not_reversible():
    g = build_graph(Ring("mat", 3))
    a, b = g.index(Mat2.E(1, 2, 3).entries), g.index(Mat2.E(1, 1, 3).entries)
    assert g.out_adjacency[a, b] and not g.out_adjacency[b, a]


def test_twin_partition_s2():
    t = twin_partition(build_graph(Ring("quat", 4)))
    assert len(t) == 10
    assert sum(t.sizes) == 127


def test_open_quotient_merges_triple_at_s3():
    exact = compressed_graph(Ring("quat", 8))
    assert len(exact) == 16
    pg = open_twin_quotient(exact)
    assert len(pg) == 14
    merged = [sorted(k) for k in pg.keys if len(k) > 1]
    assert merged == [[(1, "1+i"), (1, "1+j"), (1, "1+k")]]


def test_twin_free_graph_compresses_to_itself():
    # path on 4 vertices: no two vertices share neighbourhoods
    adj = np.zeros((4, 4), dtype=bool)
    for u in range(3):
        adj[u, u + 1] = adj[u + 1, u] = True
    g = ZdGraph(Ring("quat", 2), np.arange(16).reshape(4, 4), adj)
    t = twin_partition(g)
    assert t.sizes == [1, 1, 1, 1]
    assert (compress(g, t).arcs == adj).all()


def test_class_graph_matches_element_graph():
    # s = 3 fits under the cap both ways
    a = compressed_graph(Ring("quat", 8))
    from lzdg.zdg import quat2_class_graph
    b = quat2_class_graph(3)
    key = lambda cg: sorted((tuple(sorted(k)), size) for k, size in zip(cg.keys, cg.sizes))
    assert key(a) == key(b)


def test_crt_class_graph_matches_element_graph():
    ring = Ring("quat", 6)
    direct = compressed_graph(ring)
    from lzdg.zdg import crt_class_graph
    via_crt = crt_class_graph(ring)
    assert sorted(direct.sizes) == sorted(via_crt.sizes)
    assert sorted(direct.degrees()) == sorted(via_crt.degrees())


def test_degree_table_examples():
    assert expected_degree_table(2)[(1, "1")] == 4
    assert expected_degree_table(2)[(0, "1+i")] == 2
    assert expected_degree_table(3)[(0, "1+i+j+k")] == 5


@pytest.mark.parametrize("s", [2, 3, 4, 5])
def test_degrees_match_table(s):
    measured = measured_degree_table(s)
    for key, value in expected_degree_table(s).items():
        assert measured[key] == value, key


@pytest.mark.parametrize("s", [2, 3, 4])
def test_neighbor_formulas(s):
    assert all(not m.missing and not m.extra for m in neighbor_formula_check(s, amended=True))
    literal = [m for m in neighbor_formula_check(s) if m.missing or m.extra]
    # the unamended last case misses exactly the classes [2^l]
    assert [m.part for m in literal] == ["vi"]
    assert literal[0].extra == [(l, "1") for l in range(1, s)]


def test_neighbor_example_s2():
    from lzdg.zdg import predicted_neighbors
    part, nb = predicted_neighbors(2, (0, "1+i"))
    assert part == "ii"
    assert nb == {(1, "1+i"), (1, "1+i+j+k")}


def test_resource_limit():
    with pytest.raises(ResourceLimit, match="compressed"):
        build_graph(Ring("quat", 16))
    with pytest.raises(ResourceLimit):
        compressed_graph(Ring("mat", 27))


def test_threads_give_identical_graph():
    ring = Ring("mat", 5)
    assert (build_graph(ring, threads=1).zero == build_graph(ring, threads=3).zero).all()


def test_exports():
    g = build_graph(Ring("quat", 2))
    doc = json.loads(to_json(g))
    assert len(doc["vertices"]) == 7
    assert all(u < v for u, v in doc["edges"])
    dot = to_dot(g)
    assert dot.startswith("graph") and dot.count("--") == len(doc["edges"])
    csv_text = class_table_csv(compressed_graph(Ring("quat", 4)))
    lines = csv_text.strip().splitlines()
    assert lines[0] == "label,size,degree,self_adjacent"
    assert len(lines) == 11


def test_class_quotient_graph_sizes():
    assert [len(class_quotient_graph(s)) for s in (2, 3, 4, 5)] == [10, 14, 22, 26]
