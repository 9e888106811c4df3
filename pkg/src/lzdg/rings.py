"""Uniform vectorized view of the two four-dimensional rings: quaternions mod n
and 2x2 matrices mod n, both stored as coefficient rows (a, b, c, d)."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .matrix import Mat2
from .modular import InvalidInput, factorize
from .quaternion import Quaternion, all_elements, hamilton, left_matrix


class ResourceLimit(RuntimeError):
    """A computation would exceed a configured size cap."""


def _matmul_coeffs(x, y):
    a, b, c, d = (x[..., t] for t in range(4))
    e, f, g, h = (y[..., t] for t in range(4))
    return np.stack([a * e + b * g, a * f + b * h, c * e + d * g, c * f + d * h], axis=-1)


@dataclass(frozen=True)
class Ring:
    kind: str  # "quat" or "mat"
    n: int

    def __post_init__(self):
        if self.kind not in ("quat", "mat"):
            raise InvalidInput(f"unknown ring kind {self.kind!r}")
        if self.n < 2:
            raise InvalidInput("n must be >= 2")

    @property
    def size(self) -> int:
        return self.n**4

    @property
    def name(self) -> str:
        if self.kind == "quat":
            return f"Z_{self.n}[i,j,k]"
        return f"M_2(Z_{self.n})"

    def elements(self) -> np.ndarray:
        return all_elements(self.n)

    def mul(self, x, y) -> np.ndarray:
        x = np.asarray(x, dtype=np.int64)
        y = np.asarray(y, dtype=np.int64)
        f = hamilton if self.kind == "quat" else _matmul_coeffs
        return f(x, y) % self.n

    def left_matrix(self, x) -> np.ndarray:
        if self.kind == "quat":
            return np.array(left_matrix(x), dtype=np.int64)
        a, b, c, d = (int(v) for v in x)
        return np.array([[a, 0, b, 0], [0, a, 0, b], [c, 0, d, 0], [0, c, 0, d]],
                        dtype=np.int64)

    def reduced_norm(self, X) -> np.ndarray:
        X = np.asarray(X, dtype=np.int64)
        if self.kind == "quat":
            return (X**2).sum(axis=-1) % self.n
        return (X[..., 0] * X[..., 3] - X[..., 1] * X[..., 2]) % self.n

    def unit_mask(self, X) -> np.ndarray:
        return np.gcd(self.reduced_norm(X), self.n) == 1

    def unit_count(self) -> int:
        count = 1
        for p, e in factorize(self.n).factorization:
            q = p**e
            if self.kind == "quat" and p == 2:
                count *= q**4 // 2
            else:
                # |GL_2(Z_{p^e})|; Z_{p^e}[i,j,k] is M_2(Z_{p^e}) for odd p
                count *= q**4 // p**4 * (p * p - 1) * (p * p - p)
        return count

    def zero_divisor_count(self) -> int:
        return self.size - self.unit_count() - 1

    def element(self, coeffs):
        if self.kind == "quat":
            return Quaternion.from_coeffs(coeffs, self.n)
        return Mat2(*(int(v) for v in coeffs), self.n)

    def component(self, q: int) -> "Ring":
        return Ring(self.kind, q)

    def format(self, coeffs) -> str:
        return str(self.element(coeffs))
