"""Dominating sets: the explicit constructions, an exact solver on
twin-compressed instances, and a brute-force oracle for small graphs."""

from __future__ import annotations

import itertools
import time
from dataclasses import dataclass, field

import numpy as np

from .matrix import Mat2, QuatMatIso, enumerate_m1, mat_to_quat, outer
from .modular import InvalidInput, Residue, Unsupported, crt_join, factorize
from .quaternion import Quaternion
from .rings import ResourceLimit, Ring
from .zdg import CompressedGraph, ZdGraph, zero_divisors

DEFAULT_CLASS_CAP = 512
BRUTE_FORCE_CAP = 48


@dataclass
class DominationInstance:
    sizes: list[int]
    adjacency: np.ndarray  # symmetric, zero diagonal
    self_adjacent: list[bool]
    labels: list[str]

    def __post_init__(self):
        if any(s < 1 for s in self.sizes):
            raise InvalidInput("class sizes must be positive")
        if not (self.adjacency == self.adjacency.T).all():
            raise InvalidInput("class adjacency must be symmetric")

    def __len__(self):
        return len(self.sizes)

    @classmethod
    def from_compressed(cls, cg: CompressedGraph) -> "DominationInstance":
        return cls(list(cg.sizes), cg.adjacency, cg.self_adjacent, list(cg.labels))

    @classmethod
    def from_graph(cls, adj: np.ndarray) -> tuple["DominationInstance", list[list[int]]]:
        """Compress a plain undirected graph by true twins (equal closed
        neighbourhoods) and then false twins (equal open neighbourhoods).

        Returns the instance and the member lists of its classes.
        """
        adj = np.asarray(adj, dtype=bool)
        n = len(adj)
        closed = adj | np.eye(n, dtype=bool)
        groups: dict[bytes, list[int]] = {}
        for v in range(n):
            groups.setdefault(closed[v].tobytes(), []).append(v)
        classes, flags = [], []
        loose = []
        for members in groups.values():
            if len(members) > 1:
                classes.append(members)
                flags.append(True)
            else:
                loose.extend(members)
        open_groups: dict[bytes, list[int]] = {}
        for v in loose:
            open_groups.setdefault(adj[v].tobytes(), []).append(v)
        for members in open_groups.values():
            classes.append(members)
            flags.append(False)
        order = sorted(range(len(classes)), key=lambda c: classes[c][0])
        classes = [classes[c] for c in order]
        flags = [flags[c] for c in order]
        heads = [c[0] for c in classes]
        inst = cls([len(c) for c in classes], adj[np.ix_(heads, heads)].copy(), flags,
                   [str(h) for h in heads])
        return inst, classes


@dataclass
class DominationResult:
    gamma: int
    witness: list[tuple[int, int]]  # (class index, count)
    certificate: dict = field(default_factory=dict)
    elapsed_ms: float = 0.0
    optimal: bool = True
    labels: list[str] = field(default_factory=list)

    def to_json(self, **extra) -> dict:
        doc = dict(extra)
        doc.update({
            "gamma": self.gamma,
            "witness": [[self.labels[c] if self.labels else c, k] for c, k in self.witness],
            "elapsed_ms": round(self.elapsed_ms, 3),
            "optimal": self.optimal,
            "certificate": self.certificate,
        })
        return doc


def _popcount(x: int) -> int:
    return bin(x).count("1")


class _Solver:
    """Exact weighted set cover over classes.

    Hitting class c once covers its neighbour classes, and c itself when c is
    self-adjacent or a singleton; taking all of c also covers c. Intermediate
    counts never help, because the uncovered rest of c has the same needs.
    """

    def __init__(self, inst: DominationInstance, time_limit: float | None = None):
        self.inst = inst
        self.deadline = None if time_limit is None else time.perf_counter() + time_limit
        self.timed_out = False
        C = len(inst)
        nbr = [sum(1 << int(d) for d in np.flatnonzero(inst.adjacency[c])) for c in range(C)]
        options = []  # (cover bitset, cost, class, count)
        for c in range(C):
            selfcov = inst.self_adjacent[c] or inst.sizes[c] == 1
            options.append((nbr[c] | ((1 << c) if selfcov else 0), 1, c, 1))
            if not selfcov:
                options.append((nbr[c] | (1 << c), inst.sizes[c], c, inst.sizes[c]))
        # Descending class degree, then class index.
        deg = inst.adjacency.sum(axis=1)
        options.sort(key=lambda o: (-int(deg[o[2]]), o[2], o[1]))
        self.options = options
        self.covering = [[k for k, o in enumerate(options) if o[0] >> e & 1] for e in range(C)]
        self.full = (1 << C) - 1
        self.nodes = 0
        self.pruned = 0
        self.best_cost = None
        self.best = None

    def lower_bound(self, uncovered: int, banned: int) -> int:
        opts = self.options
        # Elements whose admissible options are pairwise disjoint need one each.
        used = 0
        packing = 0
        rest = uncovered
        while rest:
            e = (rest & -rest).bit_length() - 1
            rest &= rest - 1
            mine = [k for k in self.covering[e] if not banned >> k & 1]
            if not mine:
                return 1 << 30
            mask = sum(1 << k for k in mine)
            if mask & used:
                continue
            used |= mask
            packing += min(opts[k][1] for k in mine)
        # Each option covers at most `widest` uncovered elements at cost >= 1.
        widest = max((_popcount(o[0] & uncovered) for k, o in enumerate(opts)
                      if not banned >> k & 1), default=0)
        if widest == 0:
            return 1 << 30
        ratio = -(-_popcount(uncovered) // widest)
        return max(packing, ratio)

    def greedy(self) -> tuple[int, list[int]]:
        uncovered, cost, chosen = self.full, 0, []
        while uncovered:
            k = max(range(len(self.options)),
                    key=lambda k: (_popcount(self.options[k][0] & uncovered) / self.options[k][1], -k))
            chosen.append(k)
            cost += self.options[k][1]
            uncovered &= ~self.options[k][0]
        return cost, chosen

    def solve(self):
        self.best_cost, self.best = self.greedy()
        self.root_bound = self.lower_bound(self.full, 0)
        self._search(self.full, 0, [], 0)

    def _search(self, uncovered: int, cost: int, chosen: list[int], banned: int):
        self.nodes += 1
        if self.deadline is not None and self.nodes % 256 == 0 \
                and time.perf_counter() > self.deadline:
            self.timed_out = True
        if self.timed_out:
            return
        if not uncovered:
            if cost < self.best_cost:
                self.best_cost, self.best = cost, list(chosen)
            return
        if cost + self.lower_bound(uncovered, banned) >= self.best_cost:
            self.pruned += 1
            return
        # Branch on the uncovered class with the fewest admissible options.
        e = min((e for e in range(len(self.covering)) if uncovered >> e & 1),
                key=lambda e: (sum(1 for k in self.covering[e] if not banned >> k & 1), e))
        mine = [k for k in self.covering[e] if not banned >> k & 1]
        mine.sort(key=lambda k: (-_popcount(self.options[k][0] & uncovered) / self.options[k][1], k))
        for k in mine:
            cover, c_cost = self.options[k][0], self.options[k][1]
            chosen.append(k)
            self._search(uncovered & ~cover, cost + c_cost, chosen, banned)
            chosen.pop()
            banned |= 1 << k


def exact_domination(inst: DominationInstance, cap: int = DEFAULT_CLASS_CAP,
                     time_limit: float | None = None) -> DominationResult:
    """Minimum dominating set of the uncompressed graph, solved on classes.

    With ``time_limit`` (seconds) the search may stop early; the result then
    carries ``optimal=False`` and gamma is only an upper bound.
    """
    if len(inst) > cap:
        raise ResourceLimit(f"{len(inst)} classes exceeds the solver cap {cap}")
    t0 = time.perf_counter()
    solver = _Solver(inst, time_limit)
    solver.solve()
    counts: dict[int, int] = {}
    for k in solver.best:
        _, _, c, count = solver.options[k]
        counts[c] = max(counts.get(c, 0), count)
    witness = sorted(counts.items())
    gamma = sum(k for _, k in witness)
    assert gamma == solver.best_cost
    cert = {
        "nodes": solver.nodes,
        "pruned": solver.pruned,
        "root_lower_bound": solver.root_bound,
        "greedy_upper_bound": solver.greedy()[0],
        "classes": len(inst),
    }
    return DominationResult(gamma, witness, cert, 1000 * (time.perf_counter() - t0),
                            not solver.timed_out, list(inst.labels))


def expand_witness(result: DominationResult, members: list) -> list[int]:
    """Concrete vertex indices: the first `count` members of each class."""
    out = []
    for c, count in result.witness:
        out.extend(int(v) for v in list(members[c])[:count])
    return sorted(out)


def is_dominating(adj: np.ndarray, chosen) -> bool:
    chosen = list(chosen)
    covered = np.zeros(len(adj), dtype=bool)
    covered[chosen] = True
    if chosen:
        covered |= adj[chosen].any(axis=0)
    return bool(covered.all())


def brute_force_domination(adj: np.ndarray, cap: int = BRUTE_FORCE_CAP) -> int:
    """Smallest dominating set size by trying subsets of increasing size."""
    adj = np.asarray(adj, dtype=bool)
    n = len(adj)
    if n > cap:
        raise ResourceLimit(f"brute force limited to {cap} vertices, got {n}")
    if n == 0:
        return 0
    closed = [(1 << v) | sum(1 << int(u) for u in np.flatnonzero(adj[v])) for v in range(n)]
    full = (1 << n) - 1
    for k in range(1, n + 1):
        for combo in itertools.combinations(range(n), k):
            acc = 0
            for v in combo:
                acc |= closed[v]
            if acc == full:
                return k
    return n


# -- constructions ---------------------------------------------------------------

def paper_dominating_set(p: int, s: int) -> list[Mat2]:
    """{p^(s-1) alpha^t alpha : alpha in M1}: p + 1 distinct matrices."""
    if p == 2:
        raise Unsupported("the construction needs an odd prime")
    out = []
    for alpha in enumerate_m1(p, s):
        m = outer(alpha, alpha) * p ** (s - 1)
        if m not in out:
            out.append(m)
    return out


def composite_dominating_set(n: int) -> list[Quaternion]:
    """CRT assembly: 2^(s0-1)(1+i+j+k) in the 2-slot, and the image of the
    matrix construction in each odd slot, zero elsewhere."""
    comps = factorize(n).factorization
    qs = [p**e for p, e in comps]

    def embed(slot: int, coeffs) -> Quaternion:
        parts = [[Residue(int(coeffs[k]) if t == slot else 0, q) for t, q in enumerate(qs)]
                 for k in range(4)]
        return Quaternion(*(crt_join(pk).value for pk in parts), n)

    out = []
    for slot, (p, e) in enumerate(comps):
        if p == 2:
            out.append(embed(slot, [2 ** (e - 1)] * 4))
        else:
            iso = QuatMatIso.build(p, e)
            for m in paper_dominating_set(p, e):
                out.append(embed(slot, mat_to_quat(m, iso).coeffs))
    return out


def expected_composite_size(n: int) -> int:
    """1 + m + p_1 + ... + p_m, with the 1 dropped for odd n."""
    fac = factorize(n).factorization
    odd = [p for p, _ in fac if p != 2]
    return (1 if fac[0][0] == 2 else 0) + len(odd) + sum(odd)


def check_dominating_set(ring: Ring, chosen) -> bool:
    """Domination check in the undirected graph, element by element."""
    V = zero_divisors(ring)
    S = np.array([list(x.entries) if isinstance(x, Mat2) else list(x.coeffs) for x in chosen],
                 dtype=np.int64)
    if not len(S):
        return len(V) == 0
    # every chosen element must itself be a vertex
    if ring.unit_mask(S).any() or not S.any(axis=1).all():
        return False
    covered = np.zeros(len(V), dtype=bool)
    codes = {tuple(x) for x in S.tolist()}
    covered |= np.array([tuple(v) in codes for v in V.tolist()])
    for x in S:
        covered |= ~ring.mul(x[None, :], V).any(axis=1)
        covered |= ~ring.mul(V, x[None, :]).any(axis=1)
    return bool(covered.all())
