from __future__ import annotations

import pytest
from hypothesis import given, strategies as st
from sympy import GF as SymGF, Poly, symbols

from dp2.field import (
    FieldElement,
    FieldMismatchError,
    FieldSpec,
    add,
    enumerate_field,
    frobenius,
    gf,
    is_irreducible,
    mul,
    parse_field,
    smallest_irreducible,
)
from oracles import gf_inv_ref, gf_mul_ref

X = symbols("x")


def _sympy_irreducible(poly: int) -> bool:
    coeffs = [int(b) for b in bin(poly)[2:]]
    return Poly(coeffs, X, domain=SymGF(2)).is_irreducible


def test_gf4_generator_squared():
    F = gf(2)
    g = F.gen
    assert g * g == g + F.one


def test_gf8_generator_cubed():
    F = gf(3)
    g = F.gen
    assert g**3 == g + F.one
    assert str(g**3) == "g+1"


def test_gf2_is_prime_field():
    F = gf(1)
    assert [x.bits for x in F.enumerate()] == [0, 1]
    assert F.one + F.one == F.zero


@pytest.mark.parametrize("e", range(1, 9))
def test_configured_modulus_is_smallest_irreducible(e):
    F = gf(e)
    assert F.modulus == smallest_irreducible(e)
    assert _sympy_irreducible(F.modulus)
    smaller = [p for p in range(1 << e, F.modulus) if _sympy_irreducible(p)]
    assert smaller == []


def test_irreducibility_matches_sympy():
    for poly in range(2, 1 << 9):
        assert is_irreducible(poly) == _sympy_irreducible(poly), bin(poly)


@pytest.mark.parametrize("e", [1, 2, 3, 4])
def test_field_axioms_exhaustive(e):
    F = gf(e)
    els = enumerate_field(F)
    assert len(els) == F.order and len({x.bits for x in els}) == F.order
    for a in els:
        assert a + F.zero == a and a * F.one == a and a + a == F.zero
        if a:
            assert a * a.inverse() == F.one
        for b in els:
            assert a * b == b * a
            assert (a * b).bits == gf_mul_ref(a.bits, b.bits, F.modulus)
            for c in els:
                assert a * (b + c) == a * b + a * c
                assert (a * b) * c == a * (b * c)


@pytest.mark.parametrize("e", range(1, 9))
def test_multiplication_table_against_shift_and_add(e):
    F = gf(e)
    for a in range(F.order):
        for b in range(0, F.order, max(1, F.order // 16)):
            assert F.mul_int(a, b) == gf_mul_ref(a, b, F.modulus)
        if a:
            assert F.inv_int(a) == gf_inv_ref(a, F.modulus)


@given(st.integers(1, 8).flatmap(lambda e: st.tuples(st.just(e), st.integers(0, (1 << e) - 1), st.integers(0, (1 << e) - 1))))
def test_frobenius_is_additive_and_multiplicative(t):
    e, a, b = t
    F = gf(e)
    x, y = F(a), F(b)
    assert frobenius(add(x, y)) == frobenius(x) + frobenius(y)
    assert frobenius(mul(x, y)) == frobenius(x) * frobenius(y)
    assert x.frobenius() == x * x


@pytest.mark.parametrize("e", range(1, 9))
def test_frobenius_has_order_e(e):
    F = gf(e)
    for a in range(F.order):
        y = a
        for _ in range(e):
            y = F.frob_int(y)
        assert y == a


@given(st.integers(1, 8).flatmap(lambda e: st.tuples(st.just(e), st.integers(1, (1 << e) - 1), st.integers(0, 40))))
def test_power_matches_repeated_product(t):
    e, a, n = t
    F = gf(e)
    want = F.one
    for _ in range(n):
        want = want * F(a)
    assert F(a) ** n == want
    assert F.pow_int(a, n) == want.bits


def test_fields_do_not_mix():
    with pytest.raises(FieldMismatchError):
        gf(2).one + gf(3).one
    with pytest.raises(FieldMismatchError):
        gf(1).one * gf(2).gen


def test_bad_elements_and_specs():
    with pytest.raises(ValueError):
        FieldElement(4, gf(2))
    with pytest.raises(ValueError):
        FieldSpec(2, 0b101)  # x^2 + 1 = (x + 1)^2
    with pytest.raises(ZeroDivisionError):
        gf(2).zero.inverse()


def test_spec_identity_is_modulus():
    assert gf(3) == FieldSpec(3, 0b1011)
    assert gf(3) != FieldSpec(3, 0b1101)
    assert hash(gf(3)) == hash(FieldSpec(3, 0b1011))


@pytest.mark.parametrize("text,e", [("2^3", 3), ("GF(2^2)", 2), ("4", 2), ("2", 1), ("2**5", 5)])
def test_parse_field(text, e):
    assert parse_field(text) == gf(e)


@pytest.mark.parametrize("text", ["3", "2^9", "GF(5)", "two", "0"])
def test_parse_field_rejects(text):
    with pytest.raises(ValueError):
        parse_field(text)


def test_format():
    F = gf(2)
    assert [str(x) for x in F.enumerate()] == ["0", "1", "g", "g+1"]
