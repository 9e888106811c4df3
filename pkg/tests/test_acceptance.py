"""Acceptance gate: one PASS/FAIL line per criterion.

Run with ``pytest tests/test_acceptance.py -v`` (the lines are printed even
when output is captured) or directly with ``python tests/test_acceptance.py``.
"""

import random
import sys
import time
from collections import Counter

import numpy as np
import pytest

from lzdg import automorphism as aut
from lzdg.domination import (DominationInstance, brute_force_domination, check_dominating_set,
                             composite_dominating_set, exact_domination, expected_composite_size,
                             paper_dominating_set)
from lzdg.matrix import Mat2, QuatMatIso, canonical_factorize, enumerate_m1, orthogonal_partner
from lzdg.modular import factorize
from lzdg.quaternion import (PI_TAGS, Quaternion, all_elements, equivalence_classes,
                             factorize_2adic, hamilton, unit_solutions)
from lzdg.rings import Ring, _matmul_coeffs
from lzdg.verify import random_graph
from lzdg.zdg import (build_graph, canonical_key, compressed_graph, expected_degree_table,
                      open_twin_quotient, quat2_label, zero_divisors)

_printer = print


@pytest.fixture(autouse=True)
def _uncaptured(capsys):
    global _printer

    def emit(line):
        with capsys.disabled():
            print(line)
    _printer = emit
    yield
    _printer = print


def gate(name: str, ok: bool, detail: str):
    _printer(f"{'PASS' if ok else 'FAIL'}  {name}: {detail}")
    assert ok, detail


def _timed_gamma(ring):
    t0 = time.perf_counter()
    cg = compressed_graph(ring)
    res = exact_domination(DominationInstance.from_compressed(cg))
    return res, time.perf_counter() - t0


def test_domination_odd_prime():
    parts, ok = [], True
    for q, want, limit in ((3, 4, 1), (5, 6, 30), (9, 4, 120)):
        res, dt = _timed_gamma(Ring("mat", q))
        ok &= res.gamma == want and res.optimal and dt < limit
        parts.append(f"M2(Z{q})={res.gamma} (want {want}, {dt:.2f}s < {limit}s)")
    gate("domination, odd p", ok, "; ".join(parts))


def test_domination_composite():
    parts, ok = [], True
    for n, want in ((2, 1), (4, 1), (8, 1), (6, 5), (12, 5), (10, 7)):
        res, dt = _timed_gamma(Ring("quat", n))
        ok &= res.gamma == want and res.optimal and dt < 600
        parts.append(f"n={n}: {res.gamma} (want {want}, {dt:.1f}s)")
    gate("domination, composite n", ok, "; ".join(parts))


def test_constructive_sets():
    parts, ok = [], True
    for p, s in ((3, 1), (5, 1), (3, 2)):
        D = paper_dominating_set(p, s)
        good = len(D) == p + 1 and check_dominating_set(Ring("mat", p**s), D)
        ok &= good
        parts.append(f"M2(Z{p**s}) size {len(D)}{'' if good else ' BAD'}")
    for n in (2, 4, 8, 6, 12, 10):
        S = composite_dominating_set(n)
        good = len(S) == expected_composite_size(n) and check_dominating_set(Ring("quat", n), S)
        ok &= good
        parts.append(f"n={n} size {len(S)}{'' if good else ' BAD'}")
    gate("constructive dominating sets", ok, "; ".join(parts))


@pytest.fixture(scope="module")
def aut_groups():
    out = {}
    for s in (2, 3, 4):
        t0 = time.perf_counter()
        g = aut.labeled_graph(s)
        summary = aut.find_automorphisms(g, with_reg=False)
        out[s] = (g, summary, time.perf_counter() - t0)
    return out


def test_automorphism_orders(aut_groups):
    parts, ok = [], True
    for s, want in ((2, 12), (3, 36), (4, 432)):
        _, summary, dt = aut_groups[s]
        ok &= summary.order == want == aut.predicted_order(s) and dt < 10
        parts.append(f"s={s}: {summary.order} (want {want}, {dt:.2f}s)")
    gate("automorphism orders", ok, "; ".join(parts))


def test_structural_checks(aut_groups):
    parts, ok = [], True
    for s in (2, 3, 4):
        g, summary, _ = aut_groups[s]
        passed = sum(all(aut.check_stabilization(f, g).values())
                     and all(aut.check_pairing(f, g).values()) for f in summary.automorphisms)
        ok &= passed == summary.order
        parts.append(f"s={s}: {passed}/{summary.order}")
    gate("stabilization and pairing", ok, "; ".join(parts))


def test_degree_tables():
    parts, ok = [], True
    for s in (2, 3, 4, 5):
        pg = open_twin_quotient(compressed_graph(Ring("quat", 2**s)))
        degs = pg.degrees()
        measured = {k: degs[c] for c, keys in enumerate(pg.keys) for k in keys}
        table = expected_degree_table(s)
        bad = sum(measured.get(k) != v for k, v in table.items())
        ok &= bad == 0
        parts.append(f"s={s}: {len(table)} classes, {bad} mismatches")
    gate("compressed degree tables", ok, "; ".join(parts))


def test_factorizations():
    parts, ok = [], True
    bad = 0
    for q in (3, 9, 5, 4, 8):
        p, s = factorize(q).factorization[0]
        m1 = enumerate_m1(p, s)
        bad += sum([b for b in m1 if a.dot(b) == 0] != [orthogonal_partner(a)] for a in m1)
    ok &= bad == 0
    parts.append(f"partners {bad} failures")

    V = zero_divisors(Ring("mat", 9))
    bad = sum(canonical_factorize(Mat2(*e, 9)).reconstruct() != Mat2(*e, 9) for e in V)
    ok &= bad == 0 and len(V) == 2672
    parts.append(f"matrix round trip {len(V)} zero divisors, {bad} failures")

    for s in (1, 2, 3):
        n = 2**s
        bad_round = bad_unique = 0
        for e in zero_divisors(Ring("quat", n)):
            x = Quaternion.from_coeffs(e, n)
            if factorize_2adic(x).reconstruct() != x:
                bad_round += 1
            tags = {canonical_key((l, _tag(pi)), s) for l in range(s) for pi in PI_TAGS
                    if unit_solutions(x, l, pi)[0] is not None}
            bad_unique += len(tags) != 1
        ok &= bad_round == 0 and bad_unique == 0
        parts.append(f"2-adic s={s}: {bad_round} round-trip, {bad_unique} uniqueness failures")
    gate("factorizations", ok, "; ".join(parts))


def _tag(pi):
    return {"(1+i)(1+j)": "1+i+j+k", "(1+i)(1-k)": "1+i+j-k"}.get(pi, pi)


def test_twin_characterization():
    parts, ok = [], True
    for s in (2, 3, 4):
        # classes xU from orbit enumeration, independent of the graph code
        orbit_keys = sorted(canonical_key(quat2_label(c.representative), s)
                            for c in equivalence_classes(s)[1:])
        pg = open_twin_quotient(compressed_graph(Ring("quat", 2**s)))
        merged = [sorted(k) for k in pg.keys if len(k) > 1]
        singles = sorted(k[0] for k in pg.keys if len(k) == 1)
        if s % 2 == 0:
            want_merged = []
        else:
            h = (s - 1) // 2
            want_merged = [sorted((h, t) for t in ("1+i", "1+j", "1+k"))]
        flat = sorted(singles + [k for m in merged for k in m])
        good = merged == want_merged and flat == orbit_keys
        ok &= good
        parts.append(f"s={s}: {len(pg)} twin classes, {len(orbit_keys)} orbits, "
                     f"merged {len(merged)} group(s)")
    gate("twin characterization", ok, "; ".join(parts))


def test_oracle_equivalence():
    parts, ok = [], True
    for ring in (Ring("mat", 3), Ring("quat", 2)):
        adj = build_graph(ring).undirected()
        a = exact_domination(DominationInstance.from_compressed(compressed_graph(ring))).gamma
        b = brute_force_domination(adj)
        ok &= a == b
        parts.append(f"{ring.name}: {a} vs {b}")
    rng = random.Random(0)
    mism = 0
    for _ in range(50):
        adj = random_graph(rng)
        inst, _ = DominationInstance.from_graph(adj)
        mism += exact_domination(inst).gamma != brute_force_domination(adj)
    ok &= mism == 0
    parts.append(f"50 random graphs, {mism} mismatches")
    gate("oracle equivalence", ok, "; ".join(parts))


def _phi(iso, X):
    return (X @ np.array(iso.matrix(), dtype=np.int64).T) % iso.q


def test_isomorphism():
    parts, ok = [], True
    iso = QuatMatIso.build(3, 1)
    E = all_elements(3)
    P = _phi(iso, E)
    lhs = _phi(iso, hamilton(E[:, None, :], E[None, :, :]) % 3)
    rhs = _matmul_coeffs(P[:, None, :], P[None, :, :]) % 3
    bad = int((lhs != rhs).any(axis=-1).sum())
    image = len({tuple(r) for r in P.tolist()})
    ok &= bad == 0 and image == 81
    parts.append(f"q=3 exhaustive {bad} failures, image size {image}")
    for q in (9, 25):
        p, s = factorize(q).factorization[0]
        iso = QuatMatIso.build(p, s)
        rng = np.random.default_rng(q)
        X, Y = rng.integers(0, q, (100_000, 4)), rng.integers(0, q, (100_000, 4))
        bad = int((_phi(iso, hamilton(X, Y) % q)
                   != _matmul_coeffs(_phi(iso, X), _phi(iso, Y)) % q).any(axis=1).sum())
        ok &= bad == 0
        parts.append(f"q={q} 100000 pairs, {bad} failures")
    gate("quaternion-matrix isomorphism", ok, "; ".join(parts))


def test_reversibility():
    parts, ok = [], True
    for s in (1, 2):
        ring = Ring("quat", 2**s)
        E = ring.elements()
        Z = ~ring.mul(E[:, None, :], E[None, :, :]).any(axis=-1)
        asym = int((Z != Z.T).sum())
        ok &= asym == 0
        parts.append(f"s={s}: {asym} one-sided pairs")
    e11, e12 = Mat2.E(1, 1, 3), Mat2.E(1, 2, 3)
    found = (e12 * e11).is_zero() and not (e11 * e12).is_zero()
    ok &= found
    parts.append(f"M2(Z3) counterexample {'found' if found else 'missing'}")
    gate("reversibility", ok, "; ".join(parts))


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q"]))
