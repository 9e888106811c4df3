"""End-to-end verification suite.

Each check records an id, a short description of the claim it tests, a status
(pass, fail or skipped), the measured value and the expected value. Expected
values come from ``data/expected.json`` unless they are computed from a closed
formula in the library.
"""

from __future__ import annotations

import csv
import io
import itertools
import json
import math
import random
import time
from collections import Counter
from dataclasses import asdict, dataclass, field, fields
from importlib import resources
from pathlib import Path
from typing import Any, Callable, Optional

import numpy as np

from . import automorphism as aut
from .domination import (DEFAULT_CLASS_CAP, DominationInstance, brute_force_domination,
                         check_dominating_set, composite_dominating_set, exact_domination,
                         expand_witness, expected_composite_size, paper_dominating_set)
from .matrix import (Mat2, QuatMatIso, all_factorization_tuples, canonical_factorize,
                     enumerate_m1, orthogonal_partner, smith_type)
from .modular import InvalidInput, Residue, crt_join, crt_split, factorize
from .quaternion import (PI_TAGS, Quaternion, all_elements, equivalence_classes,
                         factorize_2adic, hamilton, unit_solutions)
from .rings import Ring, _matmul_coeffs
from .zdg import (DEFAULT_ELEMENT_CAP, annihilators, build_graph, canonical_key, class_keys,
                  compressed_graph, expected_degree_table, neighbor_formula_check,
                  compress, open_twin_quotient, quat2_label, twin_partition, zero_divisors)

STATUSES = ("pass", "fail", "skipped")


class ConfigError(ValueError):
    """Bad configuration key or value."""


@dataclass
class RunConfig:
    max_s: int = 5
    primes: tuple = (3, 5)
    element_cap: int = DEFAULT_ELEMENT_CAP
    class_cap: int = DEFAULT_CLASS_CAP
    threads: int = 1
    out: Optional[str] = None
    formats: tuple = ("csv", "json")
    figures: bool = True
    seed: int = 0
    odd_n: bool = False
    odd_n_time_limit: float = 60.0

    def __post_init__(self):
        self.validate()

    def validate(self):
        if self.max_s < 1:
            raise ConfigError("max_s must be >= 1")
        for name in ("element_cap", "class_cap", "threads"):
            if getattr(self, name) < 1:
                raise ConfigError(f"{name} must be positive")
        if self.odd_n_time_limit <= 0:
            raise ConfigError("odd_n_time_limit must be positive")
        for p in self.primes:
            if p < 3 or len(factorize(p).factorization) != 1 or factorize(p).factorization[0][1] != 1:
                raise ConfigError(f"primes must be odd primes, got {p}")
        bad = set(self.formats) - {"csv", "json"}
        if bad:
            raise ConfigError(f"unknown report formats {sorted(bad)}")

    @classmethod
    def from_mapping(cls, values: dict) -> "RunConfig":
        known = {f.name: f for f in fields(cls)}
        unknown = set(values) - set(known)
        if unknown:
            raise ConfigError(f"unknown config keys: {', '.join(sorted(unknown))}")
        kwargs = {}
        for key, raw in values.items():
            kwargs[key] = _coerce(key, raw, cls.__dataclass_fields__[key].default)
        try:
            return cls(**kwargs)
        except InvalidInput as exc:
            raise ConfigError(str(exc)) from exc

    def updated(self, **changes) -> "RunConfig":
        values = asdict(self)
        values.update({k: v for k, v in changes.items() if v is not None})
        return RunConfig.from_mapping(values)


def _coerce(key: str, raw, default):
    if not isinstance(raw, str):
        return tuple(raw) if isinstance(raw, list) else raw
    raw = raw.strip()
    try:
        if isinstance(default, bool):
            if raw.lower() not in ("1", "0", "true", "false", "yes", "no"):
                raise ValueError(raw)
            return raw.lower() in ("1", "true", "yes")
        if isinstance(default, int):
            return int(raw)
        if isinstance(default, float):
            return float(raw)
        if isinstance(default, tuple):
            items = [x.strip() for x in raw.split(",") if x.strip()]
            return tuple(int(x) if x.lstrip("-").isdigit() else x for x in items)
    except ValueError as exc:
        raise ConfigError(f"bad value for {key}: {raw!r}") from exc
    return raw or None


def read_config_file(path) -> dict:
    """key = value lines; '#' starts a comment."""
    values = {}
    for lineno, line in enumerate(Path(path).read_text().splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected key = value")
        key, value = (part.strip() for part in line.split("=", 1))
        values[key.replace("-", "_")] = value
    return values


def load_fixtures(path=None) -> dict:
    if path is None:
        text = resources.files("lzdg").joinpath("data/expected.json").read_text()
    else:
        text = Path(path).read_text()
    return json.loads(text)


# -- report --------------------------------------------------------------------

@dataclass
class CheckResult:
    id: str
    ref: str
    status: str
    measured: Any
    expected: Any
    elapsed: float
    note: str = ""


@dataclass
class VerifyReport:
    entries: list[CheckResult] = field(default_factory=list)
    extras: dict = field(default_factory=dict)

    def add(self, entry: CheckResult):
        if entry.status not in STATUSES:
            raise ValueError(f"bad status {entry.status!r}")
        if any(e.id == entry.id for e in self.entries):
            raise ValueError(f"duplicate check id {entry.id}")
        self.entries.append(entry)

    def get(self, check_id: str) -> CheckResult:
        return next(e for e in self.entries if e.id == check_id)

    @property
    def failures(self) -> list[CheckResult]:
        return [e for e in self.entries if e.status == "fail"]

    def counts(self) -> dict[str, int]:
        c = Counter(e.status for e in self.entries)
        return {s: c.get(s, 0) for s in STATUSES}

    @property
    def ok(self) -> bool:
        return not self.failures

    def rows(self) -> list[dict]:
        """Timing-free rows, stable across runs."""
        return [{"id": e.id, "ref": e.ref, "status": e.status,
                 "measured": _jsonable(e.measured), "expected": _jsonable(e.expected),
                 "note": e.note} for e in self.entries]

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["id", "ref", "status", "measured", "expected", "note"])
        for r in self.rows():
            w.writerow([r["id"], r["ref"], r["status"], json.dumps(r["measured"], sort_keys=True),
                        json.dumps(r["expected"], sort_keys=True), r["note"]])
        return buf.getvalue()

    def to_json(self) -> str:
        doc = {"summary": self.counts(), "entries": self.rows()}
        return json.dumps(doc, indent=2, sort_keys=True) + "\n"

    def timings_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["id", "elapsed_s"])
        for e in self.entries:
            w.writerow([e.id, f"{e.elapsed:.3f}"])
        return buf.getvalue()

    def write(self, out: Path, formats=("csv", "json")) -> list[str]:
        out.mkdir(parents=True, exist_ok=True)
        written = []
        if "csv" in formats:
            (out / "verify_report.csv").write_text(self.to_csv())
            written.append("verify_report.csv")
        if "json" in formats:
            (out / "verify_report.json").write_text(self.to_json())
            written.append("verify_report.json")
        # Timings live apart so the reports above are reproducible byte for byte.
        (out / "timings.csv").write_text(self.timings_csv())
        written.append("timings.csv")
        return written


def _jsonable(value):
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, (np.integer,)):
        return int(value)
    if isinstance(value, (np.bool_,)):
        return bool(value)
    if isinstance(value, int) and abs(value) > 10**15:
        return str(value)
    return value


# -- runner ----------------------------------------------------------------------

class _Suite:
    def __init__(self, cfg: RunConfig, fixtures: dict, log: Optional[Callable[[str], None]]):
        self.cfg = cfg
        self.fx = fixtures
        self.report = VerifyReport()
        self.log = log or (lambda msg: None)
        self._graphs: dict = {}

    def expect(self, *path):
        node = self.fx
        for key in path:
            node = node[str(key)]
        return node["expected"]

    def limit(self, *path) -> Optional[float]:
        node = self.fx
        for key in path:
            node = node[str(key)]
        return node.get("time_limit_s")

    def run(self, check_id: str, ref: str, fn: Callable[[], tuple], time_limit=None):
        """fn returns (passed, measured, expected[, note]); passed None = measured only."""
        t0 = time.perf_counter()
        try:
            out = fn()
            passed, measured, expected = out[:3]
            note = out[3] if len(out) > 3 else ""
            status = "pass" if passed in (True, None) else "fail"
        except Exception as exc:  # a crashing check is a failing check
            status, measured, expected, note = "fail", None, None, f"{type(exc).__name__}: {exc}"
        elapsed = time.perf_counter() - t0
        if time_limit is not None and elapsed > time_limit and status == "pass":
            status = "fail"
            note = (note + "; " if note else "") + f"took {elapsed:.1f}s, limit {time_limit}s"
        self.report.add(CheckResult(check_id, ref, status, measured, expected, elapsed, note))
        self.log(f"{status:7s} {check_id} ({elapsed:.2f}s)")

    def skip(self, check_id: str, ref: str, note: str):
        self.report.add(CheckResult(check_id, ref, "skipped", None, None, 0.0, note))
        self.log(f"skipped {check_id}: {note}")

    def graph(self, ring: Ring):
        key = (ring.kind, ring.n)
        if key not in self._graphs:
            self._graphs[key] = build_graph(ring, self.cfg.element_cap, self.cfg.threads)
        return self._graphs[key]


# Each group below appends its checks to the suite.

def _check_modular(su: _Suite):
    def crt():
        bad = 0
        for n in range(2, 61):
            for v in range(n):
                if crt_join(crt_split(Residue(v, n))) != Residue(v, n):
                    bad += 1
        return bad == 0, {"failures": bad, "moduli": "2..60"}, {"failures": 0}
    su.run("modular.crt_round_trip", "CRT splitting of Z_n", crt)


def _check_quaternions(su: _Suite):
    cfg = su.cfg

    def reversible():
        out = {}
        for s in (1, 2):
            ring = Ring("quat", 2**s)
            E = ring.elements()
            Z = ~ring.mul(E[:, None, :], E[None, :, :]).any(axis=-1)
            out[f"s={s}"] = int((Z != Z.T).sum())
        rng = np.random.default_rng(cfg.seed)
        ring = Ring("quat", 8)
        E = ring.elements()
        # sampled s = 3: pairs drawn among zero products so the test is not vacuous
        X = E[rng.integers(0, len(E), 4000)]
        hits = 0
        asym = 0
        for x in X:
            right = ~ring.mul(x[None, :], E).any(axis=1)
            left = ~ring.mul(E, x[None, :]).any(axis=1)
            hits += int(right.sum())
            asym += int((right != left).sum())
        out["s=3 sampled"] = asym
        out["s=3 zero products seen"] = hits
        return all(v == 0 for k, v in out.items() if "seen" not in k), out, {
            "s=1": 0, "s=2": 0, "s=3 sampled": 0}
    su.run("quat.reversible", "xy = 0 iff yx = 0 in Z_{2^s}[i,j,k]", reversible)

    def non_reversible():
        ring = Ring("mat", 3)
        V = build_graph(ring).vertices
        Z = ~ring.mul(V[:, None, :], V[None, :, :]).any(axis=-1)
        witnesses = int((Z & ~Z.T).sum())
        e11, e12 = Mat2.E(1, 1, 3), Mat2.E(1, 2, 3)
        found = (e12 * e11).is_zero() and not (e11 * e12).is_zero()
        return found and witnesses > 0, {"E12*E11=0,E11*E12!=0": found,
                                         "one-sided pairs": witnesses}, {"E12*E11=0,E11*E12!=0": True}
    su.run("mat.non_reversible", "M_2(Z_3) is not reversible", non_reversible)

    top = min(3, cfg.max_s)

    def factor_2adic(s):
        def check():
            n = 2**s
            E = all_elements(n)
            ring = Ring("quat", n)
            V = E[~ring.unit_mask(E) & E.any(axis=1)]
            bad_round = bad_unique = 0
            multiplicity = Counter()
            for e in V:
                x = Quaternion.from_coeffs(e, n)
                f = factorize_2adic(x)
                if f.reconstruct() != x:
                    bad_round += 1
                pairs = {canonical_key((l, _tag(pi)), s) for l in range(s) for pi in PI_TAGS
                         if unit_solutions(x, l, pi)[0] is not None}
                if len(pairs) != 1:
                    bad_unique += 1
                multiplicity[unit_solutions(x, f.l, f.pi)[1]] += 1
            su.report.extras.setdefault("alpha0_multiplicity", {})[s] = dict(multiplicity)
            return (bad_round == 0 and bad_unique == 0,
                    {"elements": len(V), "round_trip_failures": bad_round,
                     "non_unique_l_pi": bad_unique},
                    {"elements": len(V), "round_trip_failures": 0, "non_unique_l_pi": 0})
        return check
    for s in range(1, top + 1):
        su.run(f"quat.factor_2adic.s{s}", "x = 2^l pi alpha0 with (l, pi) unique", factor_2adic(s))
    for s in range(1, top + 1):
        mult = su.report.extras.get("alpha0_multiplicity", {}).get(s)
        su.run(f"quat.factor_2adic.alpha0.s{s}", "number of unit cofactors alpha0 (measured)",
               lambda mult=mult: (None, {str(k): v for k, v in sorted((mult or {}).items())}, None,
                                  "alpha0 is unique only up to the unit stabilizer of 2^l pi"))

    def classes(s):
        def check():
            found = equivalence_classes(s)
            non_units = found[1:]
            keys = sorted(canonical_key(quat2_label(c.representative), s) for c in non_units)
            predicted = sorted(class_keys(s))
            total = sum(c.size for c in found)
            return (keys == predicted and total == 16**s - 1,
                    {"classes": len(non_units), "labels_match": keys == predicted},
                    {"classes": len(predicted), "labels_match": True})
        return check
    for s in range(1, min(4, cfg.max_s) + 1):
        su.run(f"quat.classes.s{s}", "classes are [2^l a], a in {1} u D", classes(s))


def _tag(pi: str) -> str:
    return {"(1+i)(1+j)": "1+i+j+k", "(1+i)(1-k)": "1+i+j-k"}.get(pi, pi)


def _check_matrices(su: _Suite):
    def partners():
        out = {}
        for q in (3, 9, 5, 4, 8):
            p, s = factorize(q).factorization[0]
            m1 = enumerate_m1(p, s)
            bad = 0
            for a in m1:
                zeros = [b for b in m1 if a.dot(b) == 0]
                if len(zeros) != 1 or zeros[0] != orthogonal_partner(a):
                    bad += 1
            out[str(q)] = bad
        return all(v == 0 for v in out.values()), out, {k: 0 for k in out}
    su.run("mat.partner_unique", "each alpha in M1 has exactly one orthogonal beta", partners)

    def smith():
        out = {}
        for q in (3, 9):
            p, s = factorize(q).factorization[0]
            ring = Ring("mat", q)
            V = build_graph(ring).vertices
            by_type: dict = {}
            for e in V:
                by_type.setdefault(str(smith_type(Mat2(*e, q))), set()).add(tuple(int(x) for x in e))
            gens = [Mat2(1, 1, 0, 1, q), Mat2(1, 0, 1, 1, q), Mat2(0, 1, 1, 0, q)]
            gens += [Mat2(u, 0, 0, 1, q) for u in range(2, q) if u % p]
            bad = 0
            for i in range(s):
                for j in list(range(max(i, 1), s)) + [None]:
                    diag = Mat2(p**i, 0, 0, 0 if j is None else p**j, q)
                    orbit = _two_sided_orbit(diag, gens)
                    label = str(smith_type(diag))
                    if orbit != by_type.get(label, set()):
                        bad += 1
            out[str(q)] = {"types": len(by_type), "orbit_mismatches": bad}
        ok = all(v["orbit_mismatches"] == 0 for v in out.values())
        return ok, out, {k: {"orbit_mismatches": 0} for k in out}, \
            "each Smith type is exactly the GL x GL orbit of diag(p^i, p^j)"
    su.run("mat.smith_type", "zero divisors are equivalent to a unique diag(p^i, p^j)", smith)

    def factor_round_trip():
        q = 9
        V = build_graph(Ring("mat", q)).vertices
        bad = sum(canonical_factorize(Mat2(*e, q)).reconstruct() != Mat2(*e, q) for e in V)
        return (bad == 0 and len(V) == su.expect("factorization_zero_divisors_mat9"),
                {"zero_divisors": len(V), "failures": int(bad)},
                {"zero_divisors": su.expect("factorization_zero_divisors_mat9"), "failures": 0})
    su.run("mat.factor.round_trip", "A = u1 p^i alpha^t beta + u2 p^j E_mn reconstructs A",
           factor_round_trip)

    def factor_unique():
        out = {}
        for q in (3, 9):
            p, s = factorize(q).factorization[0]
            images = Counter(t.reconstruct() for t in all_factorization_tuples(p, s))
            images.pop(Mat2(0, 0, 0, 0, q), None)
            out[str(q)] = {"tuples": sum(images.values()), "matrices": len(images),
                           "hit_more_than_once": sum(1 for c in images.values() if c > 1)}
        ok = out["3"]["hit_more_than_once"] == 0 and out["3"]["matrices"] == 32
        return (ok, out, {"3": {"hit_more_than_once": 0, "matrices": 32}},
                "at p^s = 9 parameters repeat; uniqueness holds only for the canonical choice")
    su.run("mat.factor.unique", "uniqueness of the factorization tuple", factor_unique)


def _two_sided_orbit(start: Mat2, gens: list[Mat2]) -> set:
    seen = {start.entries}
    frontier = [start]
    while frontier:
        nxt = []
        for m in frontier:
            for g in gens:
                for y in (g * m, m * g):
                    if y.entries not in seen:
                        seen.add(y.entries)
                        nxt.append(y)
        frontier = nxt
    return seen


def _check_isomorphism(su: _Suite):
    def phi(iso: QuatMatIso, X: np.ndarray) -> np.ndarray:
        return (X @ np.array(iso.matrix(), dtype=np.int64).T) % iso.q

    def exhaustive():
        iso = QuatMatIso.build(3, 1)
        E = all_elements(3)
        P = phi(iso, E)
        lhs = phi(iso, hamilton(E[:, None, :], E[None, :, :]) % 3)
        rhs = _matmul_coeffs(P[:, None, :], P[None, :, :]) % 3
        mult = int((lhs != rhs).any(axis=-1).sum())
        add = int((phi(iso, (E[:, None, :] + E[None, :, :]) % 3)
                   != (P[:, None, :] + P[None, :, :]) % 3).any(axis=-1).sum())
        one = P[1 * 27].tolist() == [1, 0, 0, 1]
        return mult == 0 and add == 0 and one, {"mult_failures": mult, "add_failures": add,
                                                "maps_1_to_identity": one}, {
            "mult_failures": 0, "add_failures": 0, "maps_1_to_identity": True}
    su.run("iso.homomorphism.q3", "Z_{p^s}[i,j,k] is isomorphic to M_2(Z_{p^s})", exhaustive)

    def bijective():
        iso = QuatMatIso.build(3, 1)
        image = {tuple(r) for r in phi(iso, all_elements(3)).tolist()}
        want = su.expect("isomorphism_image_size_3")
        return len(image) == want, len(image), want
    su.run("iso.bijective.q3", "the map is a bijection onto M_2(Z_3)", bijective)

    pairs = su.expect("isomorphism_random_pairs")
    for q in (9, 25):
        def sampled(q=q):
            p, s = factorize(q).factorization[0]
            iso = QuatMatIso.build(p, s)
            rng = np.random.default_rng(su.cfg.seed + q)
            X = rng.integers(0, q, (pairs, 4))
            Y = rng.integers(0, q, (pairs, 4))
            lhs = phi(iso, hamilton(X, Y) % q)
            rhs = _matmul_coeffs(phi(iso, X), phi(iso, Y)) % q
            bad = int((lhs != rhs).any(axis=1).sum())
            return bad == 0, {"pairs": pairs, "failures": bad}, {"pairs": pairs, "failures": 0}
        su.run(f"iso.sampled.q{q}", "the map is multiplicative (random pairs)", sampled)


def _ring_of(key: str) -> Ring:
    kind, n = key.split(":")
    return Ring(kind, int(n))


def _check_graphs(su: _Suite):
    cfg = su.cfg
    for key in su.fx["vertex_counts"]:
        ring = _ring_of(key)

        def count(ring=ring, key=key):
            want = su.expect("vertex_counts", key)
            measured = {"formula": ring.zero_divisor_count()}
            if ring.size <= cfg.element_cap:
                measured["graph"] = len(su.graph(ring))
            return all(v == want for v in measured.values()), measured, want
        su.run(f"graph.vertices.{ring.name}", "|Z*(R)| from the unit count", count)

    def annihilator():
        ring = Ring("mat", 3)
        _, right = annihilators(ring, Mat2.E(1, 1, 3).entries, restrict=True)
        want = su.expect("right_annihilator_E11_mat3")
        return len(right) == want, len(right), want
    su.run("graph.annihilator.E11", "right annihilator of E11 in M_2(Z_3)", annihilator)

    # Twins of individual elements, exactly.
    for s in (2, 3):
        if s > cfg.max_s:
            continue

        def element_twins(s=s):
            ring = Ring("quat", 2**s)
            g = su.graph(ring)
            t = twin_partition(g)
            units = g.ring.elements()[g.ring.unit_mask(g.ring.elements())]
            mismatched = 0
            for members in t.classes:
                rep = g.vertices[members[0]]
                orbit = {tuple(r) for r in ring.mul(rep[None, :], units).tolist()}
                if orbit != {tuple(v) for v in g.vertices[members].tolist()}:
                    mismatched += 1
            return mismatched == 0, {"twin_classes": len(t), "not_an_orbit": mismatched}, {
                "twin_classes": len(class_keys(s)), "not_an_orbit": 0}
        su.run(f"graph.twins.element.s{s}", "twin classes of elements vs classes xU",
               element_twins)

    # Class-level compressed graph: triple merge for odd s.
    for s in (2, 3, 4):
        if s > cfg.max_s:
            continue

        def class_twins(s=s):
            pg = open_twin_quotient(compressed_graph(Ring("quat", 2**s), cfg.element_cap))
            parts = sorted(sorted(k) for k in pg.keys)
            predicted = [[k] for k in class_keys(s)]
            if s % 2:
                h = (s - 1) // 2
                triple = sorted((h, t) for t in ("1+i", "1+j", "1+k"))
                predicted = [p for p in predicted if p[0] not in triple] + [triple]
            predicted = sorted(sorted(p) for p in predicted)
            measured = {"vertices": len(pg), "merged": [p for p in parts if len(p) > 1]}
            expected = {"vertices": len(predicted), "merged": [p for p in predicted if len(p) > 1]}
            return parts == predicted, _keys_str(measured), _keys_str(expected)
        su.run(f"graph.twins.class.s{s}", "N(a) = N(b) iff a ~ b, up to the odd-s triple",
               class_twins)

    for s, node in su.fx["compressed_vertices"].items():
        if int(s) > cfg.max_s:
            continue

        def vertices(s=int(s), want=node["expected"]):
            got = len(open_twin_quotient(compressed_graph(Ring("quat", 2**s), cfg.element_cap)))
            return got == want, got, want
        su.run(f"graph.compressed_vertices.s{s}", "size of the compressed graph", vertices)

    degree_rows = {}
    for s in range(2, cfg.max_s + 1):
        def degrees(s=s):
            pg = open_twin_quotient(compressed_graph(Ring("quat", 2**s), cfg.element_cap))
            degs = pg.degrees()
            measured = {k: degs[c] for c, keys in enumerate(pg.keys) for k in keys}
            table = expected_degree_table(s)
            bad = {_key_str(k): [measured.get(k), v] for k, v in table.items() if measured.get(k) != v}
            degree_rows[s] = [(_key_str(k), measured.get(k), v) for k, v in table.items()]
            return not bad, {"classes": len(table), "mismatches": bad}, {
                "classes": len(table), "mismatches": {}}
        su.run(f"graph.degrees.s{s}", "closed-form compressed degrees", degrees)
    su.report.extras["degrees"] = degree_rows

    for key, node in su.fx["degree_examples"].items():
        s, m, tag = key.split(":")
        if int(s) > cfg.max_s:
            continue
        su.run(f"graph.degree_example.{key}", "tabulated degree example",
               lambda s=int(s), k=(int(m), tag), want=node["expected"]: (
                   expected_degree_table(s)[k] == want, expected_degree_table(s)[k], want))

    for s in range(2, cfg.max_s + 1):
        def neighbours(s=s):
            amended = neighbor_formula_check(s, cfg.element_cap, amended=True)
            literal = neighbor_formula_check(s, cfg.element_cap)
            bad = [_mismatch(m) for m in amended if m.missing or m.extra]
            lit = [_mismatch(m) for m in literal if m.missing or m.extra]
            return not bad, {"classes": len(amended), "mismatches": bad,
                             "literal_last_case_mismatches": lit}, {
                "classes": len(amended), "mismatches": []}, \
                "last case amended with the classes [2^l], 1 <= l <= s-1"
        su.run(f"graph.neighbors.s{s}", "class-level neighbour formulas", neighbours)

    if cfg.max_s >= 2:
        def reading():
            out = {}
            for s in range(2, cfg.max_s + 1):
                a = neighbor_formula_check(s, cfg.element_cap, amended=True)
                b = neighbor_formula_check(s, cfg.element_cap, amended=True, drop_top_iii=True)
                pick = lambda r: sum(1 for m in r if m.part == "iii" and m.key[0] == s - 1
                                     and (m.missing or m.extra))
                out[f"s={s}"] = {"with_l0_term": pick(a), "without_l0_term": pick(b)}
            ok = all(v["with_l0_term"] == 0 for v in out.values())
            return ok, out, None, "the term with index 2^0 at m = s-1 is needed"
        su.run("graph.neighbors.iii_top_reading", "reading of the m = s-1 neighbour term", reading)


def _key_str(key) -> str:
    l, tag = key
    return f"2^{l}({tag})"


def _keys_str(value):
    if isinstance(value, dict):
        return {k: _keys_str(v) for k, v in value.items()}
    if isinstance(value, list):
        return [_keys_str(v) for v in value]
    if isinstance(value, tuple) and len(value) == 2 and isinstance(value[1], str):
        return _key_str(value)
    return value


def _mismatch(m) -> dict:
    return {"class": _key_str(m.key), "part": m.part,
            "missing": [_key_str(k) for k in m.missing], "extra": [_key_str(k) for k in m.extra]}


def _check_domination(su: _Suite):
    cfg = su.cfg

    # constructions
    def explicit_set_mat3():
        got = sorted(list(m.entries) for m in paper_dominating_set(3, 1))
        want = sorted(su.expect("explicit_set_mat3"))
        return got == want, got, want
    su.run("dom.explicit_set.elements.q3", "the explicit set {p^(s-1) alpha^t alpha}", explicit_set_mat3)

    cases = [(3, 1), (3, 2)] + [(p, 1) for p in cfg.primes if p != 3]
    for p, s in cases:
        if (p**s) ** 4 > 10**6:
            su.skip(f"dom.explicit_set.q{p**s}", "p^(s-1) alpha^t alpha dominates", "ring too large")
            continue

        def explicit_set(p=p, s=s):
            D = paper_dominating_set(p, s)
            ring = Ring("mat", p**s)
            ok = check_dominating_set(ring, D)
            return ok and len(D) == p + 1, {"size": len(D), "dominating": ok}, {
                "size": p + 1, "dominating": True}
        su.run(f"dom.explicit_set.q{p**s}", "p^(s-1) alpha^t alpha dominates, size p+1", explicit_set)

    gammas = []
    for key, node in su.fx["domination"].items():
        ring = _ring_of(key)
        if ring.kind == "quat":
            def construct(ring=ring):
                S = composite_dominating_set(ring.n)
                ok = check_dominating_set(ring, S)
                want = expected_composite_size(ring.n)
                return ok and len(S) == want, {"size": len(S), "dominating": ok}, {
                    "size": want, "dominating": True}
            su.run(f"dom.composite_set.n{ring.n}", "CRT-assembled dominating set", construct)

        def exact(ring=ring, want=node["expected"]):
            cg = compressed_graph(ring, cfg.element_cap, cfg.threads)
            res = exact_domination(DominationInstance.from_compressed(cg), cfg.class_cap)
            witness_ok = _witness_dominates(ring, cg, res)
            gammas.append((ring.name, res.gamma, want))
            return (res.gamma == want and res.optimal and witness_ok is not False,
                    {"gamma": res.gamma, "optimal": res.optimal, "witness_dominates": witness_ok,
                     "classes": len(cg)},
                    {"gamma": want, "optimal": True, "witness_dominates": True})
        su.run(f"dom.exact.{ring.name}", "exact domination number", exact,
               time_limit=node.get("time_limit_s"))
    su.report.extras["gammas"] = gammas

    # oracle equivalence
    for ring in (Ring("mat", 3), Ring("quat", 2)):
        def oracle(ring=ring):
            adj = su.graph(ring).undirected()
            inst, members = DominationInstance.from_graph(adj)
            a = exact_domination(inst).gamma
            b = brute_force_domination(adj)
            c = exact_domination(DominationInstance.from_compressed(compressed_graph(ring))).gamma
            return a == b == c, {"compressed": a, "brute_force": b, "twin_quotient": c}, {
                "all_equal": True}
        su.run(f"dom.oracle.{ring.name}", "compressed solver equals brute force", oracle)

    def random_graphs():
        rng = random.Random(cfg.seed)
        count = su.expect("oracle_random_graphs")
        bad = []
        for t in range(count):
            adj = random_graph(rng)
            inst, members = DominationInstance.from_graph(adj)
            res = exact_domination(inst)
            chosen = expand_witness(res, members)
            brute = brute_force_domination(adj)
            if res.gamma != brute or len(chosen) != res.gamma or not _dominates(adj, chosen):
                bad.append(t)
        return not bad, {"graphs": count, "mismatches": bad}, {"graphs": count, "mismatches": []}
    su.run("dom.oracle.random", "compressed solver equals brute force on random graphs",
           random_graphs)

    def universal():
        rng = random.Random(cfg.seed + 1)
        bad = 0
        for _ in range(10):
            adj = random_graph(rng)
            n = len(adj)
            big = np.zeros((n + 1, n + 1), dtype=bool)
            big[:n, :n] = adj
            big[n, :n] = big[:n, n] = True
            inst, _ = DominationInstance.from_graph(big)
            bad += exact_domination(inst).gamma != 1
        return bad == 0, {"graphs": 10, "gamma_not_1": bad}, {"graphs": 10, "gamma_not_1": 0}
    su.run("dom.universal_vertex", "a universal vertex gives gamma 1", universal)

    if not cfg.odd_n:
        su.skip("dom.odd_n.n15", "gamma for odd composite n (measured)",
                "opt-in: set odd_n = true")
    else:
        def odd():
            ring = Ring("quat", 15)
            cg = compressed_graph(ring, cfg.element_cap)
            res = exact_domination(DominationInstance.from_compressed(cg), max(cfg.class_cap, len(cg)),
                                   time_limit=cfg.odd_n_time_limit)
            S = composite_dominating_set(15)
            return None, {"gamma_upper_bound": res.gamma, "proved_optimal": res.optimal,
                          "root_lower_bound": res.certificate["root_lower_bound"],
                          "construction_size": len(S),
                          "construction_dominates": check_dominating_set(ring, S)}, {
                "m + sum p": expected_composite_size(15), "1 + m + sum p": expected_composite_size(15) + 1}
        su.run("dom.odd_n.n15", "gamma for odd composite n (measured)", odd)


def random_graph(rng: random.Random) -> np.ndarray:
    """Random simple graph on 6..24 vertices with some planted twins."""
    n = rng.randint(6, 20)
    density = rng.uniform(0.1, 0.6)
    adj = np.zeros((n, n), dtype=bool)
    for u, v in itertools.combinations(range(n), 2):
        adj[u, v] = adj[v, u] = rng.random() < density
    extra = rng.randint(0, 4)
    for _ in range(extra):
        src = rng.randrange(len(adj))
        true_twin = rng.random() < 0.5
        row = adj[src].copy()
        big = np.zeros((len(adj) + 1, len(adj) + 1), dtype=bool)
        big[:-1, :-1] = adj
        big[-1, :-1] = big[:-1, -1] = row
        if true_twin:
            big[-1, src] = big[src, -1] = True
        adj = big
    return adj


def _dominates(adj: np.ndarray, chosen) -> bool:
    covered = np.zeros(len(adj), dtype=bool)
    chosen = list(chosen)
    covered[chosen] = True
    if chosen:
        covered |= adj[chosen].any(axis=0)
    return bool(covered.all())


def _witness_dominates(ring: Ring, cg, res) -> Optional[bool]:
    """Expand the class witness into ring elements and test it directly."""
    if cg.members is not None:
        verts = zero_divisors(ring)
        chosen = [verts[v] for v in expand_witness(res, cg.members)]
    elif all(k == 1 for _, k in res.witness):
        chosen = [cg.reps[c] for c, _ in res.witness]
    else:
        return None
    return check_dominating_set(ring, [ring.element(x) for x in chosen])


def _check_automorphisms(su: _Suite):
    cfg = su.cfg
    if cfg.max_s < 2:
        su.skip("aut.structure", "automorphism structure", "needs max_s >= 2")
        return
    rows = []
    for s in range(2, min(cfg.max_s, 5) + 1):
        cache = {}

        def order(s=s, cache=cache):
            g = aut.labeled_graph(s)
            summary = aut.find_automorphisms(g)
            cache["g"], cache["summary"] = g, summary
            want = su.expect("aut_order", s)
            return (summary.order == want == summary.predicted,
                    {"order": summary.order, "predicted": summary.predicted,
                     "vertices": len(g)}, {"order": want, "predicted": want})
        su.run(f"aut.order.s{s}", "order of Aut of the compressed graph", order,
               time_limit=su.limit("aut_order", s))
        summary = cache.get("summary")
        if summary is None:
            continue
        g = cache["g"]
        bad45 = [f for f in summary.failures if f[0] == "stabilization"]
        bad46 = [f for f in summary.failures if f[0] == "pairing"]
        su.run(f"aut.stabilization.s{s}", "automorphisms stabilize each P_m and Q_n",
               lambda: (not bad45, {"automorphisms": summary.order, "failures": len(bad45)},
                        {"failures": 0}))
        su.run(f"aut.pairing.s{s}", "P_m pairs with P_(s-1-m), Q_n with Q_(s-n)",
               lambda: (not bad46, {"automorphisms": summary.order, "failures": len(bad46)},
                        {"failures": 0}))

        def closure(summary=summary):
            group = set(summary.automorphisms)
            ok = all(aut.compose(f, h) in group for f in group for h in group) and \
                all(aut.invert(f) in group for f in group)
            return ok, {"closed": ok}, {"closed": True}
        if s <= 4:
            su.run(f"aut.group_axioms.s{s}", "found set is a group", closure)

        def orders(s=s, summary=summary):
            log10 = summary.reg_order_log10
            reg = summary.reg_order

            def times(k):
                return reg * k if reg is not None else f"~1e{log10 + math.log10(k):.3f}"
            measured = {"reg_order": reg if reg is not None else f"~1e{log10:.3f}",
                        "aut_compressed": summary.order,
                        "aut_weighted_quotient": summary.weighted_order,
                        "product_reg_times_aut": times(summary.order),
                        "full_aut_order": times(summary.weighted_order)}
            rows.append((s, summary.order, summary.predicted, summary.weighted_order))
            return None, measured, {"aut_compressed": summary.predicted}, \
                "Aut(Gamma)/Reg(Gamma) is the size-coloured automorphism group of the twin quotient"
        su.run(f"aut.orders.s{s}", "Reg(Gamma) and the order decomposition (measured)", orders)
    su.report.extras["aut_rows"] = rows

    def s1():
        g = aut.labeled_graph(1)
        summary = aut.find_automorphisms(g)
        return None, {"vertices": len(g), "order": summary.order}, {
            "predicted": aut.predicted_order(1)}, "no structural claim at s = 1"
    su.run("aut.s1", "s = 1 edge case (measured)", s1)

    def negative():
        g = aut.labeled_graph(2)
        adj = g.adjacency
        # swap two classes of different degree: never an automorphism
        degs = adj.sum(axis=1)
        u = int(np.argmax(degs))
        v = int(np.argmin(degs))
        f = list(range(len(adj)))
        f[u], f[v] = v, u
        group = set(aut.enumerate_automorphisms(adj))
        return (not aut.is_automorphism(adj, f) and tuple(f) not in group,
                {"rejected": True}, {"rejected": True})
    su.run("aut.negative_control", "a degree-changing swap is rejected", negative)

    def lift():
        ring = Ring("quat", 4)
        g = su.graph(ring)
        t = twin_partition(g)
        cg = compress(g, t)
        group = aut.weighted_quotient_automorphisms(cg)
        lifted = [aut.lift(f, cg, len(g)) for f in group]
        ok = all(aut.preserves_adjacency(g, p) for p in lifted)
        # distinct (regular, compressed) pairs give distinct full automorphisms
        rng = random.Random(cfg.seed)
        seen = {}
        clashes = 0
        for k, base in enumerate(lifted):
            for _ in range(4):
                r = aut.random_regular_permutation(t, len(g), rng)
                full = tuple(base[r])
                key = (tuple(r), k)
                if full in seen and seen[full] != key:
                    clashes += 1
                seen[full] = key
        samples = aut.sample_regular_automorphisms(g, t, 100, cfg.seed)
        return (ok and clashes == 0 and samples["passed"] == samples["trials"],
                {"lifted": len(lifted), "all_preserve_adjacency": ok, "pair_clashes": clashes,
                 "regular_samples": samples},
                {"lifted": len(group), "all_preserve_adjacency": True, "pair_clashes": 0,
                 "regular_samples": {"trials": 100, "passed": 100}})
    su.run("aut.lift.s2", "compressed automorphisms lift to the full graph", lift)

    def cross_swap():
        ring = Ring("quat", 4)
        g = su.graph(ring)
        t = twin_partition(g)
        a, b = int(t.classes[0][0]), int(t.classes[1][0])
        perm = np.arange(len(g))
        perm[a], perm[b] = b, a
        return not aut.preserves_adjacency(g, perm), {"rejected": True}, {"rejected": True}
    su.run("aut.regular.negative_control", "swapping non-twins breaks adjacency", cross_swap)


GROUPS = (_check_modular, _check_quaternions, _check_matrices, _check_isomorphism,
          _check_graphs, _check_domination, _check_automorphisms)


def run_verify(cfg: RunConfig, fixtures: Optional[dict] = None,
               log: Optional[Callable[[str], None]] = None) -> VerifyReport:
    su = _Suite(cfg, fixtures if fixtures is not None else load_fixtures(), log)
    for group in GROUPS:
        group(su)
    return su.report
