"""2x2 matrices over Z_{p^s}: the normalized vector family M1, orthogonal
partners, Smith types, the canonical rank-one-plus-corner factorization and an
explicit isomorphism Z_{p^s}[i,j,k] -> M_2(Z_{p^s}) for odd p."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from math import gcd
from typing import Optional

from .modular import (InvalidInput, SumOfSquaresRoot, Unsupported, factor_pairs,
                      lift_sum_of_squares, solve_mod, valuation)
from .quaternion import Quaternion


def prime_power(q: int) -> tuple[int, int]:
    fac = factor_pairs(q)
    if len(fac) != 1:
        raise InvalidInput(f"{q} is not a prime power")
    return fac[0]


@dataclass(frozen=True)
class Mat2:
    """Row-major [[a, b], [c, d]] over Z_q."""

    a: int
    b: int
    c: int
    d: int
    q: int

    def __post_init__(self):
        for name in "abcd":
            object.__setattr__(self, name, int(getattr(self, name)) % self.q)

    @classmethod
    def from_rows(cls, rows, q: int) -> "Mat2":
        (a, b), (c, d) = rows
        return cls(a, b, c, d, q)

    @classmethod
    def identity(cls, q: int) -> "Mat2":
        return cls(1, 0, 0, 1, q)

    @classmethod
    def E(cls, m: int, n: int, q: int) -> "Mat2":
        """Matrix unit with a 1 in (1-based) position (m, n)."""
        e = [0, 0, 0, 0]
        e[2 * (m - 1) + (n - 1)] = 1
        return cls(*e, q)

    @property
    def entries(self) -> tuple[int, int, int, int]:
        return (self.a, self.b, self.c, self.d)

    @property
    def rows(self):
        return [[self.a, self.b], [self.c, self.d]]

    def _check(self, other):
        if other.q != self.q:
            raise InvalidInput(f"modulus mismatch: {self.q} vs {other.q}")

    def __add__(self, other):
        self._check(other)
        return Mat2(*(x + y for x, y in zip(self.entries, other.entries)), self.q)

    def __sub__(self, other):
        self._check(other)
        return Mat2(*(x - y for x, y in zip(self.entries, other.entries)), self.q)

    def __neg__(self):
        return Mat2(*(-x for x in self.entries), self.q)

    def __mul__(self, other):
        if isinstance(other, int):
            return Mat2(*(x * other for x in self.entries), self.q)
        self._check(other)
        a, b, c, d = self.entries
        e, f, g, h = other.entries
        return Mat2(a * e + b * g, a * f + b * h, c * e + d * g, c * f + d * h, self.q)

    def __rmul__(self, k):
        if isinstance(k, int):
            return self * k
        return NotImplemented

    def det(self) -> int:
        return (self.a * self.d - self.b * self.c) % self.q

    def is_unit(self) -> bool:
        return gcd(self.det(), self.q) == 1

    def is_zero(self) -> bool:
        return not any(self.entries)

    def __str__(self):
        return f"[[{self.a},{self.b}],[{self.c},{self.d}]]"


def outer(alpha: "Vec2M1", beta: "Vec2M1") -> Mat2:
    """alpha^t beta."""
    (x1, x2), (y1, y2) = alpha.pair, beta.pair
    return Mat2(x1 * y1, x1 * y2, x2 * y1, x2 * y2, alpha.q)


@dataclass(frozen=True)
class Vec2M1:
    """(1 a) when kind == 'first', (b 1) with p | b when kind == 'second'."""

    kind: str
    free: int
    q: int

    def __post_init__(self):
        if self.kind not in ("first", "second"):
            raise InvalidInput(f"unknown kind {self.kind!r}")
        object.__setattr__(self, "free", self.free % self.q)
        if self.kind == "second" and gcd(self.free, self.q) == 1:
            raise InvalidInput("(b 1) needs b to be a non-unit")

    @property
    def pair(self) -> tuple[int, int]:
        return (1, self.free) if self.kind == "first" else (self.free, 1)

    def dot(self, other: "Vec2M1") -> int:
        return sum(x * y for x, y in zip(self.pair, other.pair)) % self.q

    def __str__(self):
        return "({} {})".format(*self.pair)


def enumerate_m1(p: int, s: int) -> list[Vec2M1]:
    q = p**s
    return ([Vec2M1("first", a, q) for a in range(q)]
            + [Vec2M1("second", b, q) for b in range(0, q, p)])


def orthogonal_partner(alpha: Vec2M1) -> Vec2M1:
    """The unique beta in M1 with alpha . beta = 0."""
    q = alpha.q
    if alpha.kind == "first":
        a = alpha.free
        if gcd(a, q) == 1:
            return Vec2M1("first", -pow(a, -1, q), q)
        return Vec2M1("second", -a, q)
    return Vec2M1("first", -alpha.free, q)


# -- Smith type ----------------------------------------------------------------

@dataclass(frozen=True)
class SmithType:
    i: int
    j: Optional[int]  # None: the second diagonal entry is 0

    def __str__(self):
        return f"({self.i}, {'Zero' if self.j is None else self.j})"


def _check_zero_divisor(A: Mat2):
    if A.is_zero():
        raise InvalidInput("matrix is zero")
    if A.is_unit():
        raise InvalidInput("matrix is invertible")


def smith_type(A: Mat2) -> SmithType:
    """(i, j) with A equivalent to diag(p^i, p^j)."""
    _check_zero_divisor(A)
    p, s = prime_power(A.q)
    i = min(valuation(x, p, s) for x in A.entries)
    # Pivot on an entry of valuation i; the Schur complement carries p^j.
    k = next(t for t, x in enumerate(A.entries) if valuation(x, p, s) == i)
    e = list(A.entries)
    r, c = divmod(k, 2)
    piv = e[k]
    other = e[3 - k]
    off1, off2 = e[2 * r + (1 - c)], e[2 * (1 - r) + c]
    u = pow(piv // p**i, -1, A.q)
    rem = (other - off1 * off2 // p**i * u) % A.q
    j = valuation(rem, p, s)
    return SmithType(i, None if j == s else j)


# -- canonical factorization ---------------------------------------------------

@dataclass(frozen=True)
class CornerTerm:
    u2: int
    j: int
    m: int
    n: int


@dataclass(frozen=True)
class CanonicalFactorization:
    u1: int
    i: int
    alpha: Vec2M1
    beta: Vec2M1
    second_term: Optional[CornerTerm]
    q: int

    def reconstruct(self) -> Mat2:
        p, _ = prime_power(self.q)
        out = outer(self.alpha, self.beta) * (self.u1 * p**self.i)
        if self.second_term is not None:
            t = self.second_term
            out = out + Mat2.E(t.m, t.n, self.q) * (t.u2 * p**t.j)
        return out


def canonical_factorize(A: Mat2) -> CanonicalFactorization:
    """A = u1 p^i alpha^t beta + u2 p^j E_mn.

    Pivots on the first unit entry (row-major) of A / p^i; the corner term sits
    opposite the pivot, so a unit (1,1) entry gives E_22. Free parameters are
    reduced mod p^(s-i) (resp. p^(s-j)), which is where they are determined.
    """
    _check_zero_divisor(A)
    q = A.q
    p, s = prime_power(q)
    st = smith_type(A)
    i = st.i
    r = p ** (s - i)
    a, b, c, d = (x // p**i % r for x in A.entries)
    inv = lambda x: pow(x, -1, r)
    if gcd(a, p) == 1:
        u1, alpha, beta = a, ("first", c * inv(a)), ("first", b * inv(a))
        rem, (m, n) = d - c * b * inv(a), (2, 2)
    elif gcd(b, p) == 1:
        u1, alpha, beta = b, ("first", d * inv(b)), ("second", a * inv(b))
        rem, (m, n) = c - a * d * inv(b), (2, 1)
    elif gcd(c, p) == 1:
        u1, alpha, beta = c, ("second", a * inv(c)), ("first", d * inv(c))
        rem, (m, n) = b - a * d * inv(c), (1, 2)
    else:
        u1, alpha, beta = d, ("second", b * inv(d)), ("second", c * inv(d))
        rem, (m, n) = a - b * c * inv(d), (1, 1)
    alpha = Vec2M1(alpha[0], alpha[1] % r, q)
    beta = Vec2M1(beta[0], beta[1] % r, q)
    second = None
    rem = rem * p**i % q
    if rem:
        j = valuation(rem, p, s)
        u2 = (rem // p**j) % p ** (s - j)
        second = CornerTerm(u2, j, m, n)
        assert st.j == j, (str(A), st, j)
    else:
        assert st.j is None, (str(A), st)
    return CanonicalFactorization(u1 % r, i, alpha, beta, second, q)


def all_factorization_tuples(p: int, s: int):
    """Every tuple of the canonical form: (u1, i, alpha, beta, corner term).

    Free parameters range over their canonical residues; E_mn ranges over all
    four positions, so callers can detect alternative corner placements.
    """
    q = p**s
    m1 = enumerate_m1(p, s)
    for i in range(s):
        r = p ** (s - i)
        for u1 in (u for u in range(1, r) if u % p):
            for alpha, beta in itertools.product(m1, m1):
                if alpha.free >= r or beta.free >= r:
                    continue
                yield CanonicalFactorization(u1, i, alpha, beta, None, q)
                for j in range(max(i, 1), s):
                    for u2 in (u for u in range(1, p ** (s - j)) if u % p):
                        for m, n in itertools.product((1, 2), (1, 2)):
                            yield CanonicalFactorization(
                                u1, i, alpha, beta, CornerTerm(u2, j, m, n), q)


# -- isomorphism with the quaternions -----------------------------------------

@dataclass(frozen=True)
class QuatMatIso:
    """1 -> Id, i -> [[x, y], [y, -x]], j -> [[0, 1], [-1, 0]], k -> I J."""

    root: SumOfSquaresRoot
    p: int
    s: int

    @classmethod
    def build(cls, p: int, s: int) -> "QuatMatIso":
        if p == 2:
            raise Unsupported("Z_{2^s}[i,j,k] is not a matrix ring")
        return cls(lift_sum_of_squares(p, s), p, s)

    @property
    def q(self) -> int:
        return self.p**self.s

    def basis(self) -> list[Mat2]:
        q = self.q
        x, y = self.root.x.value, self.root.y.value
        I = Mat2(x, y, y, -x, q)
        J = Mat2(0, 1, -1, 0, q)
        return [Mat2.identity(q), I, J, I * J]

    def matrix(self) -> list[list[int]]:
        """4x4 matrix taking quaternion coefficients to row-major entries."""
        cols = [m.entries for m in self.basis()]
        return [[cols[k][r] for k in range(4)] for r in range(4)]


def quat_to_mat(x: Quaternion, iso: QuatMatIso) -> Mat2:
    if x.n != iso.q:
        raise InvalidInput(f"modulus mismatch: {x.n} vs {iso.q}")
    M = iso.matrix()
    return Mat2(*(sum(M[r][k] * x.coeffs[k] for k in range(4)) for r in range(4)), iso.q)


def mat_to_quat(A: Mat2, iso: QuatMatIso) -> Quaternion:
    if A.q != iso.q:
        raise InvalidInput(f"modulus mismatch: {A.q} vs {iso.q}")
    sol = solve_mod(iso.matrix(), list(A.entries), iso.p, iso.s)
    assert sol.particular is not None and sol.kernel_size == 1
    return Quaternion(*sol.particular, iso.q)
