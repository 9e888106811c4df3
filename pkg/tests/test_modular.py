import itertools
import random

import pytest
from hypothesis import given, settings, strategies as st

from lzdg.modular import (InvalidInput, Modulus, Residue, Unsupported, crt_join, crt_split,
                          factor_pairs, factorize, kernel_size, lift_sum_of_squares, smith_mod,
                          solve_mod, valuation)


def test_factor_pairs_small():
    assert factor_pairs(2) == ((2, 1),)
    assert factor_pairs(360) == ((2, 3), (3, 2), (5, 1))
    assert factor_pairs(97) == ((97, 1),)


def test_factor_rejects_small():
    with pytest.raises(InvalidInput):
        factor_pairs(1)


def test_modulus_validates():
    assert factorize(12).prime_powers == [4, 3]
    with pytest.raises(InvalidInput):
        Modulus(12, ((2, 1), (3, 1)))
    with pytest.raises(InvalidInput):
        Modulus(12, ((3, 1), (2, 2)))


def test_residue_arithmetic():
    a, b = Residue(7, 10), Residue(5, 10)
    assert (a + b).value == 2
    assert (a * b).value == 5
    assert a.inverse().value == 3
    with pytest.raises(InvalidInput):
        Residue(5, 10).inverse()


def test_residue_modulus_mismatch():
    with pytest.raises(InvalidInput):
        Residue(1, 4) + Residue(1, 5)


@given(st.integers(2, 500), st.integers(0, 10**6))
def test_crt_round_trip(n, v):
    r = Residue(v, n)
    assert crt_join(crt_split(r)) == r


def test_crt_needs_coprime_moduli():
    with pytest.raises(InvalidInput):
        crt_join([Residue(1, 4), Residue(1, 6)])


def test_valuation():
    assert valuation(12, 2, 5) == 2
    assert valuation(0, 3, 4) == 4
    assert valuation(81, 3, 4) == 4  # 81 = 0 mod 3^4
    assert valuation(5, 5, 3) == 1


@pytest.mark.parametrize("p", [3, 5, 7, 11, 13])
@pytest.mark.parametrize("s", [1, 2, 3, 4])
def test_sum_of_squares_root(p, s):
    root = lift_sum_of_squares(p, s)
    q = p**s
    assert (root.x.value**2 + root.y.value**2 + 1) % q == 0


def test_sum_of_squares_known_values():
    r = lift_sum_of_squares(3, 2)
    assert (r.x.value, r.y.value) == (4, 1)
    r = lift_sum_of_squares(5, 3)
    assert (r.x.value, r.y.value) == (0, 57)


def test_sum_of_squares_needs_odd_prime():
    with pytest.raises(Unsupported):
        lift_sum_of_squares(2, 3)


def _matmul(A, B, q):
    return [[sum(A[i][k] * B[k][j] for k in range(len(B))) % q for j in range(len(B[0]))]
            for i in range(len(A))]


@settings(max_examples=60, deadline=None)
@given(st.sampled_from([(2, 3), (3, 2), (5, 1), (2, 1)]), st.integers(0, 2**32))
def test_smith_mod_diagonalizes(ps, seed):
    p, s = ps
    q = p**s
    rng = random.Random(seed)
    A = [[rng.randrange(q) for _ in range(4)] for _ in range(4)]
    sd = smith_mod(A, p, s)
    D = _matmul(_matmul(sd.P, A, q), sd.Q, q)
    for i in range(4):
        for j in range(4):
            assert D[i][j] == (sd.diag[i] if i == j else 0)
    vals = sd.valuations
    assert vals == sorted(vals)


def _brute_solutions(A, b, q):
    out = []
    for z in itertools.product(range(q), repeat=len(A[0])):
        if all(sum(a * x for a, x in zip(row, z)) % q == bi % q for row, bi in zip(A, b)):
            out.append(z)
    return out


@pytest.mark.parametrize("seed", range(25))
def test_solve_mod_matches_brute_force(seed):
    rng = random.Random(seed)
    p, s = rng.choice([(2, 2), (3, 1), (2, 3)])
    q = p**s
    A = [[rng.randrange(q) for _ in range(3)] for _ in range(3)]
    b = [rng.randrange(q) for _ in range(3)] if seed % 2 else [0, 0, 0]
    sols = _brute_solutions(A, b, q)
    res = solve_mod(A, b, p, s)
    if not sols:
        assert res.particular is None
    else:
        assert tuple(res.particular) in sols
        assert res.kernel_size == len(sols)
        assert kernel_size(A, p, s) == len(sols)
