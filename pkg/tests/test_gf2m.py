"""Field arithmetic tests against independent bit-twiddling oracles."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from drspc.gf2m import GF2m, PRIMITIVE_POLYS


def clmul(a: int, b: int) -> int:
    """Carry-less product of two polynomials over GF(2)."""
    out = 0
    while b:
        if b & 1:
            out ^= a
        a <<= 1
        b >>= 1
    return out


def polymod(a: int, mod: int) -> int:
    dm = mod.bit_length() - 1
    while a.bit_length() - 1 >= dm:
        a ^= mod << (a.bit_length() - 1 - dm)
    return a


def mul_oracle(nu: int, a: int, b: int) -> int:
    return polymod(clmul(a, b), PRIMITIVE_POLYS[nu])


@pytest.mark.parametrize("nu", [7, 8, 9])
def test_primitive_polynomials_are_primitive(nu):
    # Brute-force order of x modulo the polynomial, independent of the tables.
    mod = PRIMITIVE_POLYS[nu]
    order = (1 << nu) - 1
    x = 1
    for i in range(1, order + 1):
        x = polymod(x << 1, mod)
        if x == 1:
            assert i == order, f"x has order {i} < {order}"
            return
    pytest.fail("x never returned to 1")


def test_exhaustive_multiplication_nu7():
    gf = GF2m(7)
    for a in range(128):
        for b in range(128):
            assert gf.mul(a, b) == mul_oracle(7, a, b)


@pytest.mark.parametrize("nu", [8, 9])
def test_sampled_multiplication(nu, rng):
    gf = GF2m(nu)
    pairs = rng.integers(0, gf.field_size, size=(3000, 2))
    for a, b in pairs:
        assert gf.mul(int(a), int(b)) == mul_oracle(nu, int(a), int(b))


@pytest.mark.parametrize("nu", [7, 8, 9])
def test_log_exp_inverse(nu):
    gf = GF2m(nu)
    for i in range(gf.order):
        assert gf.log[gf.exp[i]] == i
    # replication: exp is periodic with period `order`
    assert (gf.exp[gf.order:2 * gf.order] == gf.exp[:gf.order]).all()


@pytest.mark.parametrize("nu", [7, 8, 9])
def test_inverse_and_division(nu, rng):
    gf = GF2m(nu)
    for a in rng.integers(1, gf.field_size, size=500):
        a = int(a)
        assert gf.mul(a, gf.inv(a)) == 1
        b = int(rng.integers(1, gf.field_size))
        assert gf.mul(gf.div(a, b), b) == a
    with pytest.raises(ZeroDivisionError):
        gf.inv(0)


@given(a=st.integers(0, 255), b=st.integers(0, 255), c=st.integers(0, 255))
@settings(max_examples=300, deadline=None)
def test_field_axioms_nu8(a, b, c):
    gf = GF2m(8)
    assert gf.mul(a, b) == gf.mul(b, a)
    assert gf.mul(gf.mul(a, b), c) == gf.mul(a, gf.mul(b, c))
    assert gf.mul(a, gf.add(b, c)) == gf.add(gf.mul(a, b), gf.mul(a, c))
    assert gf.mul(a, 1) == a and gf.add(a, 0) == a and gf.add(a, a) == 0
    # Frobenius: squaring is additive in characteristic 2
    assert gf.mul(gf.add(a, b), gf.add(a, b)) == gf.add(gf.mul(a, a), gf.mul(b, b))


@pytest.mark.parametrize("nu", [7, 8, 9])
def test_pow(nu, rng):
    gf = GF2m(nu)
    assert gf.pow(0, 0) == 1
    assert gf.pow(0, 5) == 0
    for a in rng.integers(1, gf.field_size, size=50):
        a = int(a)
        acc = 1
        for e in range(6):
            assert gf.pow(a, e) == acc
            acc = gf.mul(acc, a)
        assert gf.pow(a, gf.order) == 1


def test_mul_vec_matches_scalar(rng):
    gf = GF2m(8)
    a = rng.integers(0, 256, size=200)
    b = rng.integers(0, 256, size=200)
    vec = gf.mul_vec(a, b)
    for i in range(200):
        assert vec[i] == gf.mul(int(a[i]), int(b[i]))


def test_unsupported_degree_rejected():
    with pytest.raises(ValueError):
        GF2m(6)


def test_tables_are_read_only():
    gf = GF2m(7)
    with pytest.raises(ValueError):
        gf.exp[0] = 5
