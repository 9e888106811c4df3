"""Residue arithmetic in Z_n: factorization, CRT, unit tests, Hensel lifting,
and a small Smith-style linear solver over Z_{p^s}."""

from __future__ import annotations

from dataclasses import dataclass
from math import gcd, prod


class InvalidInput(ValueError):
    """Raised when an argument is outside an operation's domain."""


class Unsupported(ValueError):
    """Raised for parameter combinations the library does not handle (e.g. p = 2)."""


def factor_pairs(n: int) -> tuple[tuple[int, int], ...]:
    if n < 2:
        raise InvalidInput(f"cannot factor n={n}; need n >= 2")
    out = []
    d = 2
    while d * d <= n:
        if n % d == 0:
            e = 0
            while n % d == 0:
                n //= d
                e += 1
            out.append((d, e))
        d += 1 if d == 2 else 2
    if n > 1:
        out.append((n, 1))
    return tuple(out)


@dataclass(frozen=True)
class Modulus:
    n: int
    factorization: tuple[tuple[int, int], ...]

    def __post_init__(self):
        if self.n < 2:
            raise InvalidInput(f"modulus must be >= 2, got {self.n}")
        if prod(p**e for p, e in self.factorization) != self.n:
            raise InvalidInput("factorization does not multiply to n")
        primes = [p for p, _ in self.factorization]
        if primes != sorted(set(primes)) or any(e < 1 for _, e in self.factorization):
            raise InvalidInput("factorization must have increasing primes and positive exponents")

    @property
    def prime_powers(self) -> list[int]:
        return [p**e for p, e in self.factorization]

    def __int__(self):
        return self.n


def factorize(n: int) -> Modulus:
    return Modulus(n, factor_pairs(n))


@dataclass(frozen=True)
class Residue:
    """An element of Z_n. Mixing moduli raises instead of coercing."""

    value: int
    modulus: int

    def __post_init__(self):
        if self.modulus < 1:
            raise InvalidInput(f"bad modulus {self.modulus}")
        object.__setattr__(self, "value", self.value % self.modulus)

    def _other(self, other) -> int:
        if isinstance(other, Residue):
            if other.modulus != self.modulus:
                raise InvalidInput(
                    f"modulus mismatch: {self.modulus} vs {other.modulus}")
            return other.value
        if isinstance(other, int):
            return other
        return NotImplemented

    def __add__(self, other):
        o = self._other(other)
        return o if o is NotImplemented else Residue(self.value + o, self.modulus)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._other(other)
        return o if o is NotImplemented else Residue(self.value - o, self.modulus)

    def __rsub__(self, other):
        o = self._other(other)
        return o if o is NotImplemented else Residue(o - self.value, self.modulus)

    def __mul__(self, other):
        o = self._other(other)
        return o if o is NotImplemented else Residue(self.value * o, self.modulus)

    __rmul__ = __mul__

    def __neg__(self):
        return Residue(-self.value, self.modulus)

    def __pow__(self, e: int):
        return Residue(pow(self.value, e, self.modulus), self.modulus)

    def inverse(self) -> "Residue":
        if not is_unit(self):
            raise InvalidInput(f"{self.value} is not a unit mod {self.modulus}")
        return Residue(pow(self.value, -1, self.modulus), self.modulus)

    def __int__(self):
        return self.value

    def __repr__(self):
        return f"{self.value} mod {self.modulus}"


def is_unit(r: Residue) -> bool:
    return gcd(r.value, r.modulus) == 1


def crt_split(r: Residue) -> list[Residue]:
    return [Residue(r.value, q) for q in factorize(r.modulus).prime_powers]


def crt_join(parts: list[Residue]) -> Residue:
    value, mod = 0, 1
    for part in parts:
        if gcd(mod, part.modulus) != 1:
            raise InvalidInput("CRT moduli must be pairwise coprime")
        # x = value + mod * t, solve for t mod part.modulus
        t = ((part.value - value) * pow(mod, -1, part.modulus)) % part.modulus
        value += mod * t
        mod *= part.modulus
    return Residue(value, mod)


def valuation(x: int, p: int, cap: int) -> int:
    """p-adic valuation of x, capped at `cap` (so v(0) == cap)."""
    x %= p**cap
    if x == 0:
        return cap
    v = 0
    while x % p == 0:
        x //= p
        v += 1
    return v


@dataclass(frozen=True)
class SumOfSquaresRoot:
    x: Residue
    y: Residue


def lift_sum_of_squares(p: int, s: int) -> SumOfSquaresRoot:
    """Return (x, y) with x^2 + y^2 = -1 mod p^s, p odd.

    The pair is found mod p by a lexicographic scan, then Newton-lifted in
    whichever coordinate is a unit.
    """
    if p == 2:
        raise Unsupported("sum-of-squares lifting needs an odd prime")
    if s < 1:
        raise InvalidInput("s must be >= 1")
    x = y = None
    for a in range(p):
        for b in range(p):
            if (a * a + b * b + 1) % p == 0:
                x, y = a, b
                break
        if x is not None:
            break
    swap = x % p == 0
    if swap:
        x, y = y, x
    q = p
    for _ in range(1, s):
        q *= p
        f = x * x + y * y + 1
        x = (x - f * pow(2 * x, -1, q)) % q
    if swap:
        x, y = y, x
    mod = p**s
    return SumOfSquaresRoot(Residue(x, mod), Residue(y, mod))


# -- linear algebra over Z_{p^s} ---------------------------------------------

@dataclass
class SmithDecomposition:
    """P @ A @ Q == diag(d) (mod p^s), with P, Q invertible mod p^s."""

    diag: list[int]
    P: list[list[int]]
    Q: list[list[int]]
    p: int
    s: int

    @property
    def valuations(self) -> list[int]:
        return [valuation(d, self.p, self.s) for d in self.diag]


def _identity(k):
    return [[int(i == j) for j in range(k)] for i in range(k)]


def smith_mod(A: list[list[int]], p: int, s: int) -> SmithDecomposition:
    """Diagonalize A over Z_{p^s} by unimodular row and column operations.

    The pivot is always an entry of minimal valuation (first in row-major
    order), so it divides every remaining entry and no gcd steps are needed.
    """
    mod = p**s
    rows, cols = len(A), len(A[0])
    M = [[x % mod for x in row] for row in A]
    P, Q = _identity(rows), _identity(cols)
    diag = []
    for t in range(min(rows, cols)):
        best = None
        for i in range(t, rows):
            for j in range(t, cols):
                v = valuation(M[i][j], p, s)
                if best is None or v < best[0]:
                    best = (v, i, j)
        v, pi, pj = best
        if v == s:
            diag.extend([0] * (min(rows, cols) - t))
            break
        M[t], M[pi] = M[pi], M[t]
        P[t], P[pi] = P[pi], P[t]
        for row in M:
            row[t], row[pj] = row[pj], row[t]
        for row in Q:
            row[t], row[pj] = row[pj], row[t]
        piv = M[t][t]
        unit = piv // p**v
        uinv = pow(unit, -1, mod)
        for i in range(t + 1, rows):
            if M[i][t]:
                f = (M[i][t] // p**v) * uinv % mod
                M[i] = [(a - f * b) % mod for a, b in zip(M[i], M[t])]
                P[i] = [(a - f * b) % mod for a, b in zip(P[i], P[t])]
        for j in range(t + 1, cols):
            if M[t][j]:
                f = (M[t][j] // p**v) * uinv % mod
                for row in M:
                    row[j] = (row[j] - f * row[t]) % mod
                for row in Q:
                    row[j] = (row[j] - f * row[t]) % mod
        diag.append(M[t][t])
    return SmithDecomposition(diag, P, Q, p, s)


@dataclass
class LinearSolution:
    particular: list[int] | None
    kernel_gens: list[list[int]]
    kernel_size: int


def solve_mod(A: list[list[int]], b: list[int], p: int, s: int) -> LinearSolution:
    """All solutions of A z = b over Z_{p^s}: one particular solution plus
    generators of the kernel (as an abelian group)."""
    mod = p**s
    sd = smith_mod(A, p, s)
    rows, cols = len(A), len(A[0])
    Pb = [sum(sd.P[i][k] * b[k] for k in range(rows)) % mod for i in range(rows)]
    y = [0] * cols
    ok = True
    kernel_y = []
    kernel_size = 1
    for t in range(cols):
        d = sd.diag[t] if t < len(sd.diag) else 0
        rhs = Pb[t] if t < rows else 0
        v = valuation(d, p, s)
        if v < s:
            # d = p^v u; solvable iff p^v | rhs
            if rhs % p**v:
                ok = False
                break
            u = d // p**v
            y[t] = (rhs // p**v) * pow(u, -1, mod) % mod
        elif rhs % mod:
            ok = False
            break
        if v > 0:
            e = [0] * cols
            e[t] = p ** (s - v)
            kernel_y.append(e)
            kernel_size *= p**v
    for t in range(cols, rows):
        if Pb[t] % mod:
            ok = False
    to_z = lambda vec: [sum(sd.Q[i][k] * vec[k] for k in range(cols)) % mod
                        for i in range(cols)]
    return LinearSolution(
        particular=to_z(y) if ok else None,
        kernel_gens=[to_z(e) for e in kernel_y],
        kernel_size=kernel_size,
    )


def kernel_size(A: list[list[int]], p: int, s: int) -> int:
    return solve_mod(A, [0] * len(A), p, s).kernel_size
