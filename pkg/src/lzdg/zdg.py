"""Zero-divisor graphs, twin partitions and compressed graphs.

Two compressions are kept apart on purpose:

* ``twin_partition`` / ``compress`` use the exact twin relation
  (N_r(a), N_l(a)) = (N_r(b), N_l(b)), where N_r(a) = {b in V : ab = 0} and may
  contain a itself. Swapping twins is always a graph automorphism, so this is
  the quotient used for domination and for Reg(Gamma).
* ``open_twin_quotient`` drops self-loops of the compressed graph and merges
  compressed vertices whose neighbour sets agree. On Z_{2^s}[i,j,k] this is the
  class-level compressed graph whose degrees and automorphisms follow the
  closed formulas (for odd s it fuses the three classes 2^((s-1)/2)(1+i|j|k)).
"""

from __future__ import annotations

import csv
import io
import itertools
import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .modular import InvalidInput, Residue, crt_join, factorize
from .quaternion import (PI_TAGS, Quaternion, class_size, factorize_2adic,
                         PI_COEFFS, same_class)
from .rings import ResourceLimit, Ring

DEFAULT_ELEMENT_CAP = 20_000


@dataclass
class ZdGraph:
    """Directed zero-divisor graph on Z*(R); ``zero[a, b]`` is v_a v_b == 0."""

    ring: Ring
    vertices: np.ndarray
    zero: np.ndarray
    directed: bool = True

    def __len__(self):
        return len(self.vertices)

    @property
    def out_adjacency(self) -> np.ndarray:
        out = self.zero.copy()
        np.fill_diagonal(out, False)
        return out

    @property
    def in_adjacency(self) -> np.ndarray:
        return self.out_adjacency.T

    def undirected(self) -> np.ndarray:
        out = self.out_adjacency
        return out | out.T

    def index(self, coeffs) -> int:
        hits = np.flatnonzero((self.vertices == np.asarray(coeffs) % self.ring.n).all(axis=1))
        if not len(hits):
            raise KeyError(f"{coeffs} is not a vertex")
        return int(hits[0])

    def bitset(self, i: int, undirected: bool = True) -> int:
        row = self.undirected()[i] if undirected else self.out_adjacency[i]
        return sum(1 << int(v) for v in np.flatnonzero(row))


def zero_divisors(ring: Ring) -> np.ndarray:
    elems = ring.elements()
    keep = ~ring.unit_mask(elems) & elems.any(axis=1)
    return elems[keep]


def zero_product_matrix(ring: Ring, X: np.ndarray, Y: np.ndarray, chunk: int = 128,
                        threads: int = 1) -> np.ndarray:
    """out[a, b] = (X[a] Y[b] == 0). Row blocks are independent, so any thread
    count fills the same matrix."""
    out = np.empty((len(X), len(Y)), dtype=bool)

    def fill(start: int):
        L = np.stack([ring.left_matrix(x) for x in X[start:start + chunk]])
        prod = np.einsum("bij,nj->bni", L, Y) % ring.n
        out[start:start + chunk] = ~prod.any(axis=-1)

    starts = range(0, len(X), chunk)
    if threads > 1:
        with ThreadPoolExecutor(threads) as pool:
            list(pool.map(fill, starts))
    else:
        for start in starts:
            fill(start)
    return out


def build_graph(ring: Ring, cap: int = DEFAULT_ELEMENT_CAP, threads: int = 1) -> ZdGraph:
    if ring.size > cap:
        raise ResourceLimit(
            f"{ring.name} has {ring.size} elements (cap {cap}); "
            "use the compressed pipeline (compressed_graph) instead")
    V = zero_divisors(ring)
    return ZdGraph(ring, V, zero_product_matrix(ring, V, V, threads=threads))


def annihilators(ring: Ring, x, restrict: bool = False):
    """(left, right) annihilators of x as coefficient arrays.

    With ``restrict`` the sets are cut down to Z*(R) for graph use.
    """
    elems = zero_divisors(ring) if restrict else ring.elements()
    x = np.asarray(x, dtype=np.int64)
    right = ~ring.mul(x[None, :], elems).any(axis=1)
    left = ~ring.mul(elems, x[None, :]).any(axis=1)
    return elems[left], elems[right]


@dataclass
class TwinPartition:
    classes: list[np.ndarray]
    self_adjacent: list[bool]
    class_of: np.ndarray

    def __len__(self):
        return len(self.classes)

    @property
    def sizes(self) -> list[int]:
        return [len(c) for c in self.classes]


def twin_partition(g: ZdGraph) -> TwinPartition:
    rows = np.packbits(g.zero, axis=1)
    cols = np.packbits(g.zero.T, axis=1)
    groups: dict[bytes, list[int]] = {}
    for v in range(len(g)):
        groups.setdefault(rows[v].tobytes() + cols[v].tobytes(), []).append(v)
    classes = sorted((np.array(m) for m in groups.values()), key=lambda m: m[0])
    class_of = np.empty(len(g), dtype=np.int64)
    for c, members in enumerate(classes):
        class_of[members] = c
    return TwinPartition(classes, [bool(g.zero[m[0], m[0]]) for m in classes], class_of)


@dataclass
class CompressedGraph:
    """Quotient graph on twin classes.

    ``arcs[c, d]`` is True when members of c times members of d vanish (the
    diagonal is the self-adjacency flag). For plain graphs ``arcs`` is simply
    the symmetric class adjacency.
    """

    sizes: list[int]
    arcs: np.ndarray
    labels: list[str]
    reps: Optional[np.ndarray] = None
    ring: Optional[Ring] = None
    keys: Optional[list] = None
    parts: Optional[list[list[int]]] = None
    members: Optional[list[np.ndarray]] = None

    def __len__(self):
        return len(self.sizes)

    @property
    def adjacency(self) -> np.ndarray:
        adj = self.arcs | self.arcs.T
        np.fill_diagonal(adj, False)
        return adj

    @property
    def self_adjacent(self) -> list[bool]:
        return [bool(x) for x in np.diag(self.arcs)]

    def degrees(self) -> list[int]:
        return [int(d) for d in self.adjacency.sum(axis=1)]

    def vertex_count(self) -> int:
        return int(sum(self.sizes))

    def find(self, key) -> int:
        for c, keys in enumerate(self.keys or []):
            if key in keys:
                return c
        raise KeyError(key)


def quat2_label(rep: Quaternion) -> tuple[int, str]:
    """(l, tag) for a nonzero non-unit of Z_{2^s}[i,j,k]; tag names the D-element."""
    f = factorize_2adic(rep)
    tag = {"(1+i)(1+j)": "1+i+j+k", "(1+i)(1-k)": "1+i+j-k"}.get(f.pi, f.pi)
    return (f.l, tag)


def format_key(key: tuple[int, str]) -> str:
    l, tag = key
    power = "" if l == 0 else ("2" if l == 1 else f"2^{l}")
    if tag == "1":
        return f"[{power or '1'}]"
    return f"[{power}({tag})]" if power else f"[{tag}]"


def _is_two_power(n: int) -> bool:
    return n & (n - 1) == 0


def _attach_labels(cg: CompressedGraph) -> CompressedGraph:
    ring = cg.ring
    if ring.kind == "quat" and _is_two_power(ring.n) and cg.reps is not None:
        keys = [[quat2_label(Quaternion.from_coeffs(r, ring.n))] for r in cg.reps]
        cg.keys = keys
        cg.labels = [format_key(k[0]) for k in keys]
    return cg


def compress(g: ZdGraph, t: TwinPartition) -> CompressedGraph:
    reps = np.array([m[0] for m in t.classes])
    arcs = g.zero[np.ix_(reps, reps)]
    # Quotient is well defined iff every row agrees with its class row.
    assert (g.zero[reps] == arcs[:, t.class_of]).all(), "twin classes do not respect adjacency"
    cg = CompressedGraph(
        sizes=t.sizes,
        arcs=arcs,
        labels=[g.ring.format(g.vertices[r]) for r in reps],
        reps=g.vertices[reps],
        ring=g.ring,
        members=list(t.classes),
    )
    return _attach_labels(cg)


def merge_identical(cg: CompressedGraph) -> CompressedGraph:
    """Merge classes with identical (row, column) of ``arcs`` (exact twins)."""
    groups: dict[bytes, list[int]] = {}
    for c in range(len(cg)):
        groups.setdefault(cg.arcs[c].tobytes() + cg.arcs[:, c].tobytes(), []).append(c)
    parts = sorted(groups.values())
    if len(parts) == len(cg):
        return cg
    return _quotient(cg, parts, keep_loops=True)


def _quotient(cg: CompressedGraph, parts: list[list[int]], keep_loops: bool) -> CompressedGraph:
    heads = [p[0] for p in parts]
    arcs = cg.arcs[np.ix_(heads, heads)].copy()
    if not keep_loops:
        adj = cg.adjacency
        arcs = np.array([[bool(adj[np.ix_(p, q)].any()) if i != j else False
                          for j, q in enumerate(parts)] for i, p in enumerate(parts)],
                        dtype=bool).reshape(len(parts), len(parts))
    keys = [sum((cg.keys[c] for c in p), []) for p in parts] if cg.keys else None
    members = ([np.concatenate([cg.members[c] for c in p]) for p in parts]
               if cg.members is not None else None)
    return CompressedGraph(
        sizes=[sum(cg.sizes[c] for c in p) for p in parts],
        arcs=arcs,
        labels=["|".join(cg.labels[c] for c in p) for p in parts],
        reps=cg.reps[heads] if cg.reps is not None else None,
        ring=cg.ring,
        keys=keys,
        parts=[list(p) for p in parts],
        members=members,
    )


def open_twin_quotient(cg: CompressedGraph) -> CompressedGraph:
    """Loop-free quotient merging vertices with equal open neighbourhoods,
    repeated until nothing merges. ``parts`` refers to classes of ``cg``."""
    current = cg
    base_parts = [[c] for c in range(len(cg))]
    while True:
        adj = current.adjacency
        groups: dict[bytes, list[int]] = {}
        for c in range(len(current)):
            groups.setdefault(adj[c].tobytes(), []).append(c)
        parts = sorted(groups.values())
        nxt = _quotient(current, parts, keep_loops=False)
        base_parts = [sum((base_parts[c] for c in p), []) for p in parts]
        if len(parts) == len(current):
            nxt.parts = [sorted(p) for p in base_parts]
            return nxt
        current = nxt


# -- compressed construction without the element graph ------------------------

def quat2_class_graph(s: int) -> CompressedGraph:
    """Compressed graph of Z_{2^s}[i,j,k] built from the class representatives
    2^l * pi (one product per pair of classes).

    Adjacency is constant on classes xU because the ring is reversible; the
    representatives are checked to cover all of Z*(R) by summing class sizes.
    """
    n = 2**s
    reps: list[Quaternion] = []
    for l in range(s):
        for pi in PI_TAGS:
            if l == 0 and pi == "1":
                continue
            x = Quaternion(*PI_COEFFS[pi], n) * (2**l)
            if x.is_zero() or any(same_class(r, x) for r in reps):
                continue
            reps.append(x)
    sizes = [class_size(r) for r in reps]
    ring = Ring("quat", n)
    if sum(sizes) != ring.zero_divisor_count():
        raise AssertionError("class representatives do not cover Z*(R)")
    R = np.array([r.coeffs for r in reps], dtype=np.int64)
    arcs = zero_product_matrix(ring, R, R)
    if not (arcs == arcs.T).all():
        raise AssertionError("class adjacency is not symmetric; ring not reversible?")
    cg = CompressedGraph(sizes, arcs, [str(r) for r in reps], reps=R, ring=ring)
    return merge_identical(_attach_labels(cg))


def _extended(cg: CompressedGraph) -> CompressedGraph:
    """Add the zero class and the unit class (indices 0 and 1)."""
    ring = cg.ring
    C = len(cg)
    arcs = np.zeros((C + 2, C + 2), dtype=bool)
    arcs[0, :] = True
    arcs[:, 0] = True
    arcs[2:, 2:] = cg.arcs
    reps = np.vstack([[0, 0, 0, 0], [1, 0, 0, 1] if ring.kind == "mat" else [1, 0, 0, 0],
                      cg.reps])
    return CompressedGraph([1, ring.unit_count()] + list(cg.sizes), arcs,
                           ["0", "U"] + list(cg.labels), reps=reps, ring=ring)


def crt_class_graph(ring: Ring, cap: int = DEFAULT_ELEMENT_CAP) -> CompressedGraph:
    """Compressed graph of a ring with several prime-power components.

    x y = 0 iff every CRT component vanishes, and twins are exactly the tuples
    of component annihilator classes (zero and units included).
    """
    comps = [_extended(compressed_graph(ring.component(q), cap))
             for q in factorize(ring.n).prime_powers]
    arcs = np.ones((1, 1), dtype=bool)
    for comp in comps:
        arcs = (arcs[:, None, :, None] & comp.arcs[None, :, None, :]).reshape(
            arcs.shape[0] * len(comp), arcs.shape[1] * len(comp))
    tuples = list(itertools.product(*(range(len(c)) for c in comps)))
    keep = [t for t, tup in enumerate(tuples)
            if not all(x == 0 for x in tup) and not all(x == 1 for x in tup)]
    sizes, labels, reps = [], [], []
    for t in keep:
        tup = tuples[t]
        sizes.append(int(np.prod([c.sizes[x] for c, x in zip(comps, tup)], dtype=object)))
        labels.append("(" + ", ".join(c.labels[x] for c, x in zip(comps, tup)) + ")")
        reps.append([crt_join([Residue(int(c.reps[x][k]), c.ring.n) for c, x in zip(comps, tup)]).value
                     for k in range(4)])
    cg = CompressedGraph(sizes, arcs[np.ix_(keep, keep)], labels,
                         reps=np.array(reps, dtype=np.int64), ring=ring)
    if sum(sizes) != ring.zero_divisor_count():
        raise AssertionError("CRT classes do not cover Z*(R)")
    merged = merge_identical(cg)
    assert len(merged) == len(cg), "CRT class tuples are not twin-distinct"
    return cg


def compressed_graph(ring: Ring, cap: int = DEFAULT_ELEMENT_CAP,
                     threads: int = 1) -> CompressedGraph:
    """Exact twin-compressed graph, by whichever route fits under the cap."""
    fac = factorize(ring.n).factorization
    if ring.size <= cap:
        g = build_graph(ring, cap, threads)
        return compress(g, twin_partition(g))
    if len(fac) > 1:
        return crt_class_graph(ring, cap)
    if ring.kind == "quat" and fac[0][0] == 2:
        return quat2_class_graph(fac[0][1])
    raise ResourceLimit(f"{ring.name} has {ring.size} elements (cap {cap})")


def class_quotient_graph(s: int, cap: int = DEFAULT_ELEMENT_CAP) -> CompressedGraph:
    """Loop-free class-level compressed graph of Z_{2^s}[i,j,k]."""
    return open_twin_quotient(compressed_graph(Ring("quat", 2**s), cap))


# -- closed formulas for Z_{2^s}[i,j,k] -----------------------------------------

D1 = ("1+i", "1+j", "1+k")
D2 = ("1+i+j+k", "1+i+j-k")
D = D1 + D2


def canonical_key(key, s):
    l, tag = key
    if l == s - 1 and tag == "1+i+j-k":
        return (l, "1+i+j+k")
    return key


def class_keys(s: int) -> list[tuple[int, str]]:
    out = []
    for l in range(s):
        for tag in ("1",) + D:
            key = canonical_key((l, tag), s)
            if (l, tag) != (0, "1") and key not in out:
                out.append(key)
    return out


def expected_degree(s: int, key) -> Optional[int]:
    """Compressed degree from the closed table, or None where it is silent.

    Thresholds such as m < (s-1)/2 are compared exactly (2m < s-1).
    """
    m, tag = key
    even = s % 2 == 0
    if tag == "1":
        if not 1 <= m <= s - 1:
            return None
        if 2 * m < s:
            return 6 * m - 1
        return 6 * m - 2 if even else 6 * m - 4
    if tag in D1:
        if 2 * m < s - 1:
            return 6 * m + 2
        if even or 2 * m == s - 1:
            return 6 * m + 1
        return 6 * m - 1
    if m >= s - 1:
        return None
    if 2 * m < s - 1:
        return 6 * m + 5
    return 6 * m + 4 if even else 6 * m + 2


def expected_degree_table(s: int) -> dict[tuple[int, str], int]:
    table = {}
    for key in class_keys(s):
        e = expected_degree(s, key)
        if e is not None:
            table[key] = e
    return table


def measured_degree_table(s: int, cap: int = DEFAULT_ELEMENT_CAP) -> dict[tuple[int, str], int]:
    pg = class_quotient_graph(s, cap)
    degs = pg.degrees()
    return {key: degs[c] for c, keys in enumerate(pg.keys) for key in keys}


def predicted_neighbors(s: int, key, amended: bool = False,
                    drop_top_iii: bool = False) -> tuple[str, set]:
    """Neighbour classes predicted by the class-level formulas (self removed).

    Returns (formula part, set of class keys); part '' when no formula applies.
    ``amended`` adds the classes [2^l], 1 <= l <= s-1, to part (vi), which the
    literal formula leaves out although 2^(s-1)(1+i+j+k) * 2^l = 0 there.
    ``drop_top_iii`` is the alternative reading of part (iii) at m = s-1 that
    omits the l = 0 term.
    """
    m, tag = key
    every = lambda lo, tags: {canonical_key((l, t), s) for l in range(max(lo, 0), s)
                              for t in tags if (l, t) != (0, "1")}
    if tag == "1" and 1 <= m <= s - 1:
        part, out = "i", every(s - m, ("1",) + D)
    elif tag in D1 and m == 0:
        part, out = "ii", {(s - 1, tag), canonical_key((s - 1, "1+i+j+k"), s)}
    elif tag in D1 and 1 <= m <= s - 1:
        part = "iii"
        out = every(s - m, ("1",) + D)
        if not (drop_top_iii and m == s - 1):
            out |= {canonical_key((s - 1 - m, b), s) for b in D2 + (tag,)}
    elif tag in D2 and m == s - 1:
        part, out = "vi", every(0, D)
        if amended:
            out |= {(l, "1") for l in range(1, s)}
    elif tag in D2 and m == 0:
        other = [b for b in D2 if b != tag]
        part = "iv"
        out = {canonical_key((s - 1, b), s) for b in D} | {canonical_key((s - 2, b), s) for b in other}
    elif tag in D2:
        other = [b for b in D2 if b != tag]
        part = "v"
        out = ({(l, "1") for l in range(s - m, s)}
               | every(s - 1 - m, D)
               | {canonical_key((s - 2 - m, b), s) for b in other})
    else:
        return "", set()
    out.discard(canonical_key(key, s))
    return part, {k for k in out if k[0] >= 0}


@dataclass
class NeighborMismatch:
    key: tuple[int, str]
    part: str
    missing: list  # predicted but not measured
    extra: list  # measured but not predicted


def neighbor_formula_check(s: int, cap: int = DEFAULT_ELEMENT_CAP, amended: bool = False,
                           drop_top_iii: bool = False) -> list[NeighborMismatch]:
    """Compare class-level neighbour sets (loops dropped) with the formulas.

    One entry per class key; an entry with empty ``missing`` and ``extra``
    is a match.
    """
    cg = compressed_graph(Ring("quat", 2**s), cap)
    adj = cg.adjacency
    out = []
    for c, keys in enumerate(cg.keys):
        measured = {k for d in np.flatnonzero(adj[c]) for k in cg.keys[d]}
        for key in keys:
            part, predicted = predicted_neighbors(s, key, amended, drop_top_iii)
            if not part:
                continue
            out.append(NeighborMismatch(key, part, sorted(predicted - measured),
                                        sorted(measured - predicted)))
    return out


# -- exports -------------------------------------------------------------------

def to_dot(g: ZdGraph) -> str:
    adj = g.undirected()
    lines = [f'graph "{g.ring.name}" {{']
    for v, coeffs in enumerate(g.vertices):
        lines.append(f'  {v} [label="{g.ring.format(coeffs)}"];')
    for u, v in zip(*np.nonzero(np.triu(adj))):
        lines.append(f"  {u} -- {v};")
    lines.append("}")
    return "\n".join(lines) + "\n"


def to_json(g: ZdGraph) -> str:
    adj = g.undirected()
    out = g.out_adjacency
    doc = {
        "ring": g.ring.name,
        "vertices": [[int(x) for x in v] for v in g.vertices],
        "edges": [[int(u), int(v)] for u, v in zip(*np.nonzero(np.triu(adj)))],
        "arcs": [[int(u), int(v)] for u, v in zip(*np.nonzero(out))],
    }
    return json.dumps(doc, separators=(",", ":")) + "\n"


def class_table_csv(cg: CompressedGraph) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["label", "size", "degree", "self_adjacent"])
    for label, size, deg, selfadj in zip(cg.labels, cg.sizes, cg.degrees(), cg.self_adjacent):
        w.writerow([label, size, deg, int(selfadj)])
    return buf.getvalue()
