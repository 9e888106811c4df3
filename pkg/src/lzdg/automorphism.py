"""Automorphisms of compressed zero-divisor graphs of Z_{2^s}[i,j,k].

Search is plain backtracking over vertex images after colour refinement; the
groups involved are small enough to enumerate completely.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .modular import InvalidInput
from .rings import ResourceLimit, Ring
from .zdg import (D1, CompressedGraph, TwinPartition, ZdGraph, compressed_graph,
                  open_twin_quotient)

MAX_SEARCH_VERTICES = 64

P_TAGS = D1
Q_TAGS = ("1", "1+i+j+k", "1+i+j-k")
# h' fixes 2^n and swaps the two D2 tags
H_PRIME = (0, 2, 1)


def refine_colors(adj: np.ndarray, colors=None) -> list[int]:
    """Stable colour refinement (1-dimensional Weisfeiler-Leman)."""
    n = len(adj)
    cur = list(colors) if colors is not None else [0] * n
    nbrs = [np.flatnonzero(adj[v]) for v in range(n)]
    while True:
        sig = [(cur[v], tuple(sorted(cur[u] for u in nbrs[v]))) for v in range(n)]
        palette = {s: k for k, s in enumerate(sorted(set(sig)))}
        nxt = [palette[s] for s in sig]
        if len(set(nxt)) == len(set(cur)):
            return nxt
        cur = nxt


def enumerate_automorphisms(adj: np.ndarray, colors=None,
                            cap: int = MAX_SEARCH_VERTICES) -> list[tuple[int, ...]]:
    """Every colour-preserving automorphism of a simple graph, sorted."""
    adj = np.asarray(adj, dtype=bool)
    n = len(adj)
    if n > cap:
        raise ResourceLimit(f"automorphism search limited to {cap} vertices, got {n}")
    if colors is not None:
        palette = {c: k for k, c in enumerate(sorted(set(colors)))}
        colors = [palette[c] for c in colors]
    col = refine_colors(adj, colors)
    # Assign rarest colours first, then by index.
    freq = {c: col.count(c) for c in set(col)}
    order = sorted(range(n), key=lambda v: (freq[col[v]], col[v], v))
    cand = {v: [u for u in range(n) if col[u] == col[v]] for v in range(n)}
    image = [-1] * n
    used = [False] * n
    found = []

    def extend(depth: int):
        if depth == n:
            found.append(tuple(image))
            return
        v = order[depth]
        for u in cand[v]:
            if used[u]:
                continue
            ok = True
            for w in order[:depth]:
                if adj[v, w] != adj[u, image[w]]:
                    ok = False
                    break
            if not ok:
                continue
            image[v], used[u] = u, True
            extend(depth + 1)
            image[v], used[u] = -1, False

    extend(0)
    return sorted(found)


def compose(f, g) -> tuple[int, ...]:
    """f after g."""
    return tuple(f[g[i]] for i in range(len(g)))


def invert(f) -> tuple[int, ...]:
    out = [0] * len(f)
    for i, v in enumerate(f):
        out[v] = i
    return tuple(out)


def is_automorphism(adj: np.ndarray, f) -> bool:
    f = np.asarray(f)
    return sorted(f.tolist()) == list(range(len(adj))) and bool((adj[np.ix_(f, f)] == adj).all())


def generators(group: list[tuple[int, ...]]) -> list[tuple[int, ...]]:
    """Greedy generating set: walk the sorted group, keep what is not yet generated."""
    if not group:
        return []
    ident = tuple(range(len(group[0])))
    span = {ident}
    gens = []
    for f in group:
        if f in span:
            continue
        gens.append(f)
        frontier = list(span)
        span = set(span)
        while frontier:
            nxt = []
            for h in frontier:
                for g in gens:
                    k = compose(g, h)
                    if k not in span:
                        span.add(k)
                        nxt.append(k)
            frontier = nxt
    return gens


# -- labelled compressed graph of Z_{2^s}[i,j,k] ------------------------------------

@dataclass
class LabeledCompressedGraph:
    s: int
    graph: CompressedGraph

    @property
    def adjacency(self) -> np.ndarray:
        return self.graph.adjacency

    def __len__(self):
        return len(self.graph)

    def vertex(self, l: int, tag: str) -> int:
        if l == self.s - 1 and tag == "1+i+j-k":
            tag = "1+i+j+k"
        return self.graph.find((l, tag))

    def P(self, m: int) -> list[int]:
        return [self.vertex(m, t) for t in P_TAGS]

    def Q(self, n: int) -> list[int]:
        return [self.vertex(n, "1"), self.vertex(n - 1, "1+i+j+k"),
                self.vertex(n - 1, "1+i+j-k")]


def labeled_graph(s: int, cap: Optional[int] = None) -> LabeledCompressedGraph:
    ring = Ring("quat", 2**s)
    cg = compressed_graph(ring) if cap is None else compressed_graph(ring, cap)
    return LabeledCompressedGraph(s, open_twin_quotient(cg))


def _induced(f, verts: list[int]) -> Optional[tuple[int, ...]]:
    """The S_3 element f induces on a tagged triple, or None when the triple
    is fused or not mapped onto itself."""
    if len(set(verts)) < 3:
        return None
    pos = {v: k for k, v in enumerate(verts)}
    try:
        return tuple(pos[f[v]] for v in verts)
    except KeyError:
        return None


def check_stabilization(f, g: LabeledCompressedGraph) -> dict[str, bool]:
    s = g.s
    report = {}
    for m in range(s):
        P = set(g.P(m))
        report[f"P_{m}"] = {f[v] for v in P} == P
    for n in range(1, s):
        Q = set(g.Q(n))
        report[f"Q_{n}"] = {f[v] for v in Q} == Q
    top = g.vertex(s - 1, "1+i+j+k")
    report["fix_top"] = f[top] == top
    if s % 2 == 0 and s >= 2:
        h = s // 2
        mid = g.vertex(h, "1")
        report["fix_2^(s/2)"] = f[mid] == mid
        rest = set(g.Q(h)) - {mid}
        report["Q_(s/2)_rest"] = {f[v] for v in rest} == rest
    elif s % 2 == 1:
        report["P_mid_fused"] = len(set(g.P((s - 1) // 2))) == 1
    return report


def star(h: tuple[int, ...]) -> tuple[int, ...]:
    return compose(H_PRIME, compose(h, H_PRIME))


def check_pairing(f, g: LabeledCompressedGraph) -> dict[str, bool]:
    s = g.s
    report = {}
    for m in range(s):
        partner = s - 1 - m
        if partner < m:
            continue
        a, b = _induced(f, g.P(m)), _induced(f, g.P(partner))
        if a is None or b is None:
            # fused middle triple: nothing to pair, but it must be fixed
            report[f"P_{m}~P_{partner}"] = all(f[v] == v for v in g.P(m) + g.P(partner))
        else:
            report[f"P_{m}~P_{partner}"] = a == b
    for n in range(1, s):
        partner = s - n
        if partner < n:
            continue
        a, b = _induced(f, g.Q(n)), _induced(f, g.Q(partner))
        report[f"Q_{n}~Q_{partner}"] = a is not None and b is not None and star(a) == b
    return report


def predicted_order(s: int) -> int:
    if s < 1:
        raise InvalidInput("s must be >= 1")
    if s % 2 == 0:
        return 6 ** (s // 2) * 6 ** (s // 2 - 1) * 2
    return 6 ** ((s - 1) // 2) * 6 ** ((s - 1) // 2)


def reg_order(t) -> int:
    """Number of regular automorphisms: product of factorials of class sizes."""
    sizes = t.sizes if hasattr(t, "sizes") else t
    return math.prod(math.factorial(int(k)) for k in sizes)


def reg_order_log10(sizes) -> float:
    return sum(math.lgamma(int(k) + 1) for k in sizes) / math.log(10)


def big_int_field(value: int, log10: float, max_digits: int = 300):
    return value if log10 < max_digits else f"~1e{log10:.3f}"


@dataclass
class AutGroupSummary:
    order: int
    automorphisms: list[tuple[int, ...]]
    generators: list[tuple[int, ...]]
    predicted: int
    reg_order_log10: float
    reg_order: Optional[int] = None
    stabilization_pass: bool = True
    pairing_pass: bool = True
    weighted_order: Optional[int] = None
    failures: list = field(default_factory=list)


def find_automorphisms(g: LabeledCompressedGraph, with_reg: bool = True) -> AutGroupSummary:
    autos = enumerate_automorphisms(g.adjacency)
    failures = []
    stab_ok = pair_ok = True
    for f in autos:
        st = check_stabilization(f, g)
        pr = check_pairing(f, g)
        if not all(st.values()):
            stab_ok = False
            failures.append(("stabilization", f, [k for k, v in st.items() if not v]))
        if not all(pr.values()):
            pair_ok = False
            failures.append(("pairing", f, [k for k, v in pr.items() if not v]))
    summary = AutGroupSummary(
        order=len(autos),
        automorphisms=autos,
        generators=generators(autos),
        predicted=predicted_order(g.s),
        reg_order_log10=0.0,
        stabilization_pass=stab_ok,
        pairing_pass=pair_ok,
        failures=failures,
    )
    if with_reg:
        base = compressed_graph(Ring("quat", 2**g.s))
        summary.reg_order_log10 = reg_order_log10(base.sizes)
        if summary.reg_order_log10 < 300:
            summary.reg_order = reg_order(base.sizes)
        summary.weighted_order = len(weighted_quotient_automorphisms(base))
    return summary


def weighted_quotient_automorphisms(cg: CompressedGraph) -> list[tuple[int, ...]]:
    """Automorphisms of the exact twin quotient that respect class sizes and
    self-adjacency; these are exactly the images of Aut(Gamma) in the quotient."""
    colors = list(zip(cg.sizes, cg.self_adjacent))
    return enumerate_automorphisms(cg.adjacency, colors)


# -- full-graph checks ------------------------------------------------------------

def lift(f, cg: CompressedGraph, n_vertices: int) -> np.ndarray:
    """A full-graph permutation inducing f: members map in index order."""
    perm = np.empty(n_vertices, dtype=np.int64)
    for c, members in enumerate(cg.members):
        target = cg.members[f[c]]
        if len(target) != len(members):
            raise ValueError("automorphism does not preserve class sizes")
        perm[members] = target
    return perm


def random_regular_permutation(t: TwinPartition, n_vertices: int, rng: random.Random) -> np.ndarray:
    perm = np.arange(n_vertices)
    for members in t.classes:
        shuffled = list(members)
        rng.shuffle(shuffled)
        perm[members] = shuffled
    return perm


def preserves_adjacency(g: ZdGraph, perm) -> bool:
    perm = np.asarray(perm)
    A = g.out_adjacency
    return bool((A[np.ix_(perm, perm)] == A).all())


def sample_regular_automorphisms(g: ZdGraph, t: TwinPartition, trials: int,
                                 seed: int = 0) -> dict:
    rng = random.Random(seed)
    passed = 0
    for _ in range(trials):
        if preserves_adjacency(g, random_regular_permutation(t, len(g), rng)):
            passed += 1
    return {"trials": trials, "passed": passed}
