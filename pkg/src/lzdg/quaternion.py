"""Lipschitz quaternions modulo n: arithmetic, units, the 2-adic factorization
x = 2^l * pi * alpha0 over Z_{2^s}, and right-unit equivalence classes."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from math import gcd

import numpy as np

from .modular import InvalidInput, Residue, crt_join, factorize, solve_mod, valuation


@dataclass(frozen=True)
class Quaternion:
    a: int
    b: int
    c: int
    d: int
    n: int

    def __post_init__(self):
        for name in "abcd":
            object.__setattr__(self, name, int(getattr(self, name)) % self.n)

    @classmethod
    def from_coeffs(cls, coeffs, n: int) -> "Quaternion":
        a, b, c, d = (int(v) for v in coeffs)
        return cls(a, b, c, d, n)

    @property
    def coeffs(self) -> tuple[int, int, int, int]:
        return (self.a, self.b, self.c, self.d)

    def _check(self, other: "Quaternion"):
        if other.n != self.n:
            raise InvalidInput(f"modulus mismatch: {self.n} vs {other.n}")

    def __add__(self, other):
        self._check(other)
        return Quaternion(*(x + y for x, y in zip(self.coeffs, other.coeffs)), self.n)

    def __sub__(self, other):
        self._check(other)
        return Quaternion(*(x - y for x, y in zip(self.coeffs, other.coeffs)), self.n)

    def __neg__(self):
        return Quaternion(*(-x for x in self.coeffs), self.n)

    def __mul__(self, other):
        if isinstance(other, int):
            return Quaternion(*(x * other for x in self.coeffs), self.n)
        return multiply(self, other)

    def __rmul__(self, k):
        if isinstance(k, int):
            return self * k
        return NotImplemented

    def conj(self) -> "Quaternion":
        return Quaternion(self.a, -self.b, -self.c, -self.d, self.n)

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def __str__(self):
        return format_coeffs(self.coeffs)


def format_coeffs(coeffs) -> str:
    terms = []
    for v, unit in zip(coeffs, ("", "i", "j", "k")):
        v = int(v)
        if v:
            terms.append(f"{v}{unit}" if v != 1 or not unit else unit)
    return "+".join(terms) if terms else "0"


def hamilton(x, y):
    """Hamilton product on coefficient arrays of shape (..., 4); no reduction."""
    a, b, c, d = (x[..., t] for t in range(4))
    e, f, g, h = (y[..., t] for t in range(4))
    return np.stack([
        a * e - b * f - c * g - d * h,
        a * f + b * e + c * h - d * g,
        a * g - b * h + c * e + d * f,
        a * h + b * g - c * f + d * e,
    ], axis=-1)


def multiply(x: Quaternion, y: Quaternion) -> Quaternion:
    x._check(y)
    a, b, c, d = x.coeffs
    e, f, g, h = y.coeffs
    return Quaternion(
        a * e - b * f - c * g - d * h,
        a * f + b * e + c * h - d * g,
        a * g - b * h + c * e + d * f,
        a * h + b * g - c * f + d * e,
        x.n,
    )


def norm(x: Quaternion) -> Residue:
    return Residue(sum(v * v for v in x.coeffs), x.n)


def is_unit_quat(x: Quaternion) -> bool:
    # x * conj(x) = N(x) is central, so x is invertible iff N(x) is.
    return gcd(norm(x).value, x.n) == 1


def inverse(x: Quaternion) -> Quaternion:
    ninv = norm(x).inverse().value
    return x.conj() * ninv


def left_matrix(x) -> list[list[int]]:
    """4x4 integer matrix L with L @ z == x * z (coefficients, unreduced)."""
    a, b, c, d = (int(v) for v in x)
    return [[a, -b, -c, -d],
            [b, a, -d, c],
            [c, d, a, -b],
            [d, -c, b, a]]


def crt_split_quat(x: Quaternion) -> list[Quaternion]:
    return [Quaternion(*x.coeffs, q) for q in factorize(x.n).prime_powers]


def crt_join_quat(parts: list[Quaternion]) -> Quaternion:
    coeffs = [crt_join([Residue(p.coeffs[t], p.n) for p in parts]) for t in range(4)]
    return Quaternion(*(r.value for r in coeffs), coeffs[0].modulus)


# -- 2-adic factorization ------------------------------------------------------

# The six pi values, in the order they are tried.
PI_TAGS = ("1", "1+i", "1+j", "1+k", "(1+i)(1+j)", "(1+i)(1-k)")
PI_COEFFS = {
    "1": (1, 0, 0, 0),
    "1+i": (1, 1, 0, 0),
    "1+j": (1, 0, 1, 0),
    "1+k": (1, 0, 0, 1),
    "(1+i)(1+j)": (1, 1, 1, 1),   # = 1+i+j+k
    "(1+i)(1-k)": (1, 1, 1, -1),  # = 1+i+j-k
}


@dataclass(frozen=True)
class QuatFactorization:
    l: int
    pi: str
    alpha0: Quaternion

    def reconstruct(self) -> Quaternion:
        n = self.alpha0.n
        pi = Quaternion(*PI_COEFFS[self.pi], n)
        return (pi * self.alpha0) * (2**self.l)


def _two_power(n: int) -> int:
    fac = factorize(n).factorization
    if len(fac) != 1 or fac[0][0] != 2:
        raise InvalidInput(f"modulus {n} is not a power of 2")
    return fac[0][1]


def unit_solutions(x: Quaternion, l: int, pi: str):
    """Solve (2^l pi) z = x over Z_{2^s}.

    Returns (one unit solution or None, number of unit solutions).
    """
    s = _two_power(x.n)
    L = [[(2**l) * v for v in row] for row in left_matrix(PI_COEFFS[pi])]
    sol = solve_mod(L, list(x.coeffs), 2, s)
    if sol.particular is None:
        return None, 0
    # z is a unit iff its norm is odd iff a+b+c+d is odd.
    z = sol.particular
    if sum(z) % 2 == 0:
        flip = next((g for g in sol.kernel_gens if sum(g) % 2), None)
        if flip is None:
            return None, 0
        z = [(u + v) % x.n for u, v in zip(z, flip)]
        count = sol.kernel_size // 2
    else:
        odd_gen = any(sum(g) % 2 for g in sol.kernel_gens)
        count = sol.kernel_size // 2 if odd_gen else sol.kernel_size
    return Quaternion(*z, x.n), count


def factorize_2adic(x: Quaternion) -> QuatFactorization:
    s = _two_power(x.n)
    if x.is_zero():
        raise InvalidInput("cannot factor zero")
    for l in range(s):
        for pi in PI_TAGS:
            z, _ = unit_solutions(x, l, pi)
            if z is not None:
                return QuatFactorization(l, pi, z)
    raise AssertionError(f"no 2-adic factorization found for {x}")


# -- enumeration and classes ---------------------------------------------------

def all_elements(n: int) -> np.ndarray:
    """Every element of Z_n^4, lexicographic in (a, b, c, d)."""
    return np.array(list(itertools.product(range(n), repeat=4)), dtype=np.int64)


def encode(coeffs: np.ndarray, n: int) -> np.ndarray:
    c = np.asarray(coeffs, dtype=np.int64)
    return ((c[..., 0] * n + c[..., 1]) * n + c[..., 2]) * n + c[..., 3]


def unit_mask(elements: np.ndarray, n: int) -> np.ndarray:
    norms = (elements**2).sum(axis=-1) % n
    return np.gcd(norms, n) == 1


@dataclass(frozen=True)
class EquivClassId:
    representative: Quaternion
    size: int


def equivalence_classes(s: int, max_elements: int = 1 << 16) -> list[EquivClassId]:
    """Orbits of Z_{2^s}[i,j,k] minus {0} under right multiplication by units.

    Exact orbit enumeration; representatives are lexicographically smallest.
    The unit class comes first, the rest follow in representative order.
    """
    if s < 1:
        raise InvalidInput("s must be >= 1")
    n = 2**s
    if n**4 > max_elements:
        raise InvalidInput(f"Z_{n}[i,j,k] has {n**4} elements, over the cap {max_elements}")
    elems = all_elements(n)
    units = elems[unit_mask(elems, n)]
    seen = np.zeros(n**4, dtype=bool)
    seen[0] = True
    out = []
    for code in range(1, n**4):
        if seen[code]:
            continue
        x = elems[code]
        orbit = np.unique(encode(hamilton(x[None, :], units) % n, n))
        seen[orbit] = True
        out.append(EquivClassId(Quaternion.from_coeffs(elems[orbit[0]], n), len(orbit)))
    out.sort(key=lambda c: (not is_unit_quat(c.representative), c.representative.coeffs))
    return out


def class_size(x: Quaternion) -> int:
    """|x U| for x in Z_{2^s}[i,j,k], via |U| / |right annihilator of x|.

    1 + r is a unit for every r in ann_r(x) (x != 0 forces N(r) even), so the
    stabilizer of x has exactly |ann_r(x)| elements.
    """
    s = _two_power(x.n)
    units = 2 ** (4 * s - 1)
    if is_unit_quat(x):
        return units
    sol = solve_mod(left_matrix(x.coeffs), [0, 0, 0, 0], 2, s)
    return units // sol.kernel_size


def same_class(x: Quaternion, y: Quaternion) -> bool:
    """True iff y = x * u for some unit u."""
    s = _two_power(x.n)
    sol = solve_mod(left_matrix(x.coeffs), list(y.coeffs), 2, s)
    if sol.particular is None:
        return False
    return sum(sol.particular) % 2 == 1 or any(sum(g) % 2 for g in sol.kernel_gens)
