import numpy as np
import pytest
from hypothesis import given, strategies as st

from lzdg.modular import InvalidInput
from lzdg.quaternion import (PI_TAGS, Quaternion, all_elements, class_size, crt_join_quat,
                             crt_split_quat, equivalence_classes, factorize_2adic, hamilton,
                             inverse, is_unit_quat, norm, same_class, unit_mask, unit_solutions)

quats = lambda n: st.tuples(*[st.integers(0, n - 1)] * 4).map(lambda c: Quaternion(*c, n))


def test_hamilton_rules():
    n = 7
    one, i, j, k = (Quaternion(*e, n) for e in np.eye(4, dtype=int).tolist())
    minus_one = Quaternion(-1, 0, 0, 0, n)
    assert i * i == j * j == k * k == minus_one
    assert i * j * k == minus_one
    assert i * j == k and j * i == -k
    assert one * i == i


@given(quats(12), quats(12), quats(12))
def test_associative(x, y, z):
    assert (x * y) * z == x * (y * z)


@given(quats(10), quats(10))
def test_norm_multiplicative(x, y):
    assert norm(x * y) == norm(x) * norm(y)


@given(quats(9))
def test_inverse_of_units(x):
    if is_unit_quat(x):
        assert x * inverse(x) == Quaternion(1, 0, 0, 0, 9)
        assert inverse(x) * x == Quaternion(1, 0, 0, 0, 9)


def test_scalar_multiplication_and_conj():
    x = Quaternion(1, 2, 3, 4, 5)
    assert 2 * x == x * 2 == Quaternion(2, 4, 6, 8, 5)
    assert x * x.conj() == Quaternion(30, 0, 0, 0, 5)


def test_modulus_mismatch():
    with pytest.raises(InvalidInput):
        Quaternion(1, 0, 0, 0, 4) * Quaternion(1, 0, 0, 0, 8)


def test_vectorized_product_agrees():
    E = all_elements(3)
    rng = np.random.default_rng(1)
    for a, b in rng.integers(0, 81, (50, 2)):
        x, y = Quaternion.from_coeffs(E[a], 3), Quaternion.from_coeffs(E[b], 3)
        assert tuple(hamilton(E[a], E[b]) % 3) == (x * y).coeffs


def test_unit_counts():
    E = all_elements(4)
    assert unit_mask(E, 4).sum() == 128  # half of 4^4
    E = all_elements(3)
    assert unit_mask(E, 3).sum() == 48  # |GL_2(Z_3)|


@given(quats(60))
def test_crt_round_trip(x):
    assert crt_join_quat(crt_split_quat(x)) == x


@pytest.mark.parametrize("s", [1, 2])
def test_factorize_2adic_round_trip(s):
    n = 2**s
    E = all_elements(n)
    for e in E[~unit_mask(E, n) & E.any(axis=1)]:
        x = Quaternion.from_coeffs(e, n)
        f = factorize_2adic(x)
        assert f.reconstruct() == x
        assert is_unit_quat(f.alpha0)
        assert f.pi in PI_TAGS


def test_factorize_rejects_zero_and_odd_modulus():
    with pytest.raises(InvalidInput):
        factorize_2adic(Quaternion(0, 0, 0, 0, 8))
    with pytest.raises(InvalidInput):
        factorize_2adic(Quaternion(1, 1, 0, 0, 6))


def test_unit_solution_count_matches_brute_force():
    n = 4
    E = all_elements(n)
    units = E[unit_mask(E, n)]
    x = Quaternion(2, 2, 0, 0, n)  # 2(1+i)
    z, count = unit_solutions(x, 1, "1+i")
    prods = hamilton(np.array([2, 2, 0, 0]), units) % n
    assert count == int((prods == np.array(x.coeffs)).all(axis=1).sum())
    assert z is not None


@pytest.mark.parametrize("s,count", [(1, 5), (2, 11), (3, 17)])
def test_equivalence_class_counts(s, count):
    classes = equivalence_classes(s)
    assert len(classes) == count
    assert sum(c.size for c in classes) == 16**s - 1
    assert is_unit_quat(classes[0].representative)


@pytest.mark.parametrize("s", [1, 2, 3])
def test_class_size_formula(s):
    for c in equivalence_classes(s):
        assert class_size(c.representative) == c.size


def test_same_class():
    n = 8
    x = Quaternion(2, 2, 0, 0, n)
    u = Quaternion(1, 1, 1, 0, n)
    assert is_unit_quat(u)
    assert same_class(x, x * u)
    assert not same_class(x, Quaternion(2, 0, 2, 0, n))
