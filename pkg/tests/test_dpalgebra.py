from __future__ import annotations

import pytest
from hypothesis import given, strategies as st

from dp2.combinatorics import compositions
from dp2.dpalgebra import (
    MAX_EXPONENT,
    AlgebraElement,
    AlgebraError,
    differential,
    divided_power_of_vector,
    double,
    elementary_action,
    general_basis,
    mono_mul,
    omega,
    substitution_action,
    symplectic_basis,
    transvection_action,
    transvection_images,
    weight,
)
from dp2.field import FieldMismatchError, gf
from oracles import dp_coefficient_ref

F2, F4 = gf(1), gf(2)
B1, B2, B3 = symplectic_basis(1), symplectic_basis(2), symplectic_basis(3)


def mono(basis, **exps):
    """Monomial by label, e.g. mono(B2, x1=2, y2=1)."""
    return tuple(exps.get(label, 0) for label in basis.labels)


def elt(basis, field, *terms):
    """Element from (coefficient, exponent-dict) pairs."""
    out = {}
    for c, exps in terms:
        out[mono(basis, **exps)] = c
    deg = sum(next(iter(out)))
    return AlgebraElement(basis, field, deg, out)


def test_basis_order():
    assert B2.labels == ("x1", "x2", "y2", "y1")
    assert B2.pairing == ((0, 3), (1, 2))
    assert B3.partner == (5, 4, 3, 2, 1, 0)


def test_mono_mul_examples():
    x = mono(B1, x1=1)
    assert mono_mul(x, x, B1, F2).is_zero()
    assert mono_mul(mono(B1, x1=1), mono(B1, y1=1), B1, F2) == elt(B1, F2, (1, {"x1": 1, "y1": 1}))
    assert mono_mul(mono(B1, x1=2), x, B1, F2) == elt(B1, F2, (1, {"x1": 3}))


@given(st.integers(1, 4), st.data())
def test_mono_mul_matches_integer_binomials(n, data):
    a = tuple(data.draw(st.lists(st.integers(0, 20), min_size=n, max_size=n)))
    b = tuple(data.draw(st.lists(st.integers(0, 20), min_size=n, max_size=n)))
    basis = general_basis(n)
    prod = mono_mul(a, b, basis, F2)
    want = dp_coefficient_ref(a, b)
    assert prod.coefficient(tuple(x + y for x, y in zip(a, b))).bits == want
    assert len(prod.terms) == want


@pytest.mark.parametrize("m", [1, 2, 3])
def test_omega(m):
    w = omega(symplectic_basis(m), F2)
    assert w.degree == 2 and len(w.terms) == m and set(w.terms.values()) == {1}
    assert str(omega(B2, F2)) == "x1*y1 + x2*y2"


def test_omega_needs_pairing():
    with pytest.raises(AlgebraError):
        omega(general_basis(2), F2)


@pytest.mark.parametrize("a,b", [(a, b) for a in range(7) for b in range(7)])
def test_differential_m1(a, b):
    got = differential(AlgebraElement.monomial(B1, F2, (a, b)))
    coef = (a + 1) * (b + 1) % 2
    assert got == AlgebraElement(B1, F2, a + b + 2, {(a + 1, b + 1): coef})


def test_differential_examples():
    assert differential(AlgebraElement.one(B2, F2)) == omega(B2, F2)
    d = differential(elt(B2, F2, (1, {"x1": 1, "y1": 1})))
    assert d == elt(B2, F2, (1, {"x1": 1, "y1": 1, "x2": 1, "y2": 1}))


@pytest.mark.parametrize("m,kmax", [(1, 14), (2, 9), (3, 5)])
def test_d_squared_on_every_monomial(m, kmax):
    basis = symplectic_basis(m)
    for k in range(kmax + 1):
        for e in compositions(2 * m, k):
            assert differential(differential(AlgebraElement.monomial(basis, F2, e))).is_zero()


def test_divided_power_examples():
    assert divided_power_of_vector([1, 0], 3, B1, F2) == elt(B1, F2, (1, {"x1": 3}))
    assert divided_power_of_vector([1, 1], 2, B1, F2) == elt(
        B1, F2, (1, {"x1": 2}), (1, {"x1": 1, "y1": 1}), (1, {"y1": 2})
    )
    g = F4.gen
    assert divided_power_of_vector([g, 0], 2, B1, F4) == elt(B1, F4, (3, {"x1": 2}))
    assert divided_power_of_vector([0, 0], 0, B1, F2) == AlgebraElement.one(B1, F2)
    assert divided_power_of_vector([0, 0], 2, B1, F2).is_zero()


@given(st.integers(1, 2), st.data())
def test_divided_power_product_rule(e, data):
    # u^(a) u^(b) = binom(a+b, a) u^(a+b)
    F = gf(e)
    u = data.draw(st.lists(st.integers(0, F.order - 1), min_size=4, max_size=4))
    a, b = data.draw(st.integers(0, 5)), data.draw(st.integers(0, 5))
    lhs = divided_power_of_vector(u, a, B2, F) * divided_power_of_vector(u, b, B2, F)
    rhs = divided_power_of_vector(u, a + b, B2, F)
    if (a & b) == 0:
        assert lhs == rhs
    else:
        assert lhs.is_zero()


@given(st.integers(1, 2), st.data())
def test_divided_power_of_sum(e, data):
    # (u + w)^(a) = sum_i u^(i) w^(a - i)
    F = gf(e)
    u = data.draw(st.lists(st.integers(0, F.order - 1), min_size=2, max_size=2))
    w = data.draw(st.lists(st.integers(0, F.order - 1), min_size=2, max_size=2))
    a = data.draw(st.integers(0, 6))
    lhs = divided_power_of_vector([x ^ y for x, y in zip(u, w)], a, B1, F)
    rhs = AlgebraElement(B1, F, a)
    for i in range(a + 1):
        rhs = rhs + divided_power_of_vector(u, i, B1, F) * divided_power_of_vector(w, a - i, B1, F)
    assert lhs == rhs


def test_substitution_identity_and_singular():
    v = elt(B2, F2, (1, {"x1": 2, "y2": 1}), (1, {"x2": 3}))
    ident = [[int(i == j) for i in range(4)] for j in range(4)]
    assert substitution_action(ident, v) == v
    with pytest.raises(AlgebraError):
        substitution_action([[1, 0, 0, 0]] * 4, v)


def test_elementary_example():
    # g_rs(1) on v_s^(2) with r = 0, s = 1: v_s^(2) + v_s v_r + v_r^(2)
    basis = general_basis(2)
    v = AlgebraElement.monomial(basis, F2, (0, 2))
    want = AlgebraElement(basis, F2, 2, {(0, 2): 1, (1, 1): 1, (2, 0): 1})
    assert elementary_action(0, 1, 1, v) == want
    assert substitution_action([[1, 0], [1, 1]], v) == want


@pytest.mark.parametrize("e", [1, 2, 3])
def test_elementary_closed_form_matches_substitution(e):
    F = gf(e)
    basis = general_basis(3)
    for k in range(5):
        for m in compositions(3, k):
            v = AlgebraElement.monomial(basis, F, m)
            for r, s in [(0, 1), (2, 0), (1, 2)]:
                for t in range(F.order):
                    cols = [[int(i == j) for i in range(3)] for j in range(3)]
                    cols[s][r] = t
                    assert elementary_action(r, s, t, v) == substitution_action(cols, v)
                    cols[s][r] = F.frob_int(t)
                    assert elementary_action(r, s, t, v, twist=True) == substitution_action(cols, v)


@pytest.mark.parametrize("e", [1, 2])
def test_substitution_is_multiplicative(e):
    F = gf(e)
    images = [[1, 0, 0, 0], [F.gen.bits, 1, 0, 0], [0, 1, 1, 0], [1, 0, F.order - 1, 1]]
    monos = [m for k in range(4) for m in compositions(4, k)]
    for a in monos[::3]:
        for b in monos[::5]:
            A = AlgebraElement.monomial(B2, F, a)
            B = AlgebraElement.monomial(B2, F, b)
            assert substitution_action(images, A * B) == substitution_action(images, A) * substitution_action(images, B)


def _all_transvections(m, F):
    q = F.order
    for code in range(1, q ** (2 * m)):
        u = [(code >> (F.e * i)) & (q - 1) for i in range(2 * m)]
        for lam in range(1, q):
            yield u, lam


@pytest.mark.parametrize("m,e", [(1, 1), (1, 2), (2, 1)])
def test_transvections_commute_with_d(m, e):
    F = gf(e)
    basis = symplectic_basis(m)
    for u, lam in _all_transvections(m, F):
        for k in range(4):
            for mo in compositions(2 * m, k):
                v = AlgebraElement.monomial(basis, F, mo)
                assert transvection_action(u, lam, differential(v)) == differential(transvection_action(u, lam, v))


def test_transvection_fixes_omega_and_lambda_zero():
    for u, lam in _all_transvections(1, F4):
        assert transvection_action(u, lam, omega(B1, F4)) == omega(B1, F4)
    v = elt(B1, F4, (2, {"x1": 3}))
    assert transvection_action([1, 3], 0, v) == v


def test_transvection_preserves_form():
    F = F4
    for u, lam in _all_transvections(1, F):
        cols = transvection_images(B1, F, u, lam)
        for i in range(2):
            for j in range(2):
                ei = [int(t == i) for t in range(2)]
                ej = [int(t == j) for t in range(2)]
                assert B1.form(cols[i], cols[j], F) == B1.form(ei, ej, F)


def test_double_examples():
    assert double(elt(B1, F2, (1, {"x1": 1}))) == elt(B1, F2, (1, {"x1": 2}))
    assert double(omega(B2, F2)) == elt(B2, F2, (1, {"x1": 2, "y1": 2}), (1, {"x2": 2, "y2": 2}))
    assert double(elt(B1, F4, (2, {"x1": 1}))) == elt(B1, F4, (3, {"x1": 2}))


def test_weight_examples():
    assert weight(mono(B3, x1=1, x2=1, x3=1), B3) == (1, 1, 1)
    assert weight(mono(B2, x2=1, y2=1), B2) == (0, 0)
    assert weight(mono(B2, x1=3, y2=1), B2) == (3, -1)
    with pytest.raises(AlgebraError):
        weight((1, 0), general_basis(2))


def test_rendering():
    v = elt(B2, F4, (1, {"x1": 3, "y2": 1}), (2, {"x2": 4}), (3, {"y1": 4}))
    assert str(v) == "x1^(3)*y2 + g*x2^(4) + (g+1)*y1^(4)"
    assert str(AlgebraElement(B1, F2, 3)) == "0"
    assert str(AlgebraElement.one(B1, F4).scale(3)) == "(g+1)"


def test_vector_round_trip():
    v = elt(B2, F4, (1, {"x1": 3, "y2": 1}), (2, {"x2": 2, "y1": 2}))
    assert AlgebraElement.from_vector(B2, F4, 4, v.to_vector()) == v


def test_validation():
    with pytest.raises(AlgebraError):
        AlgebraElement(B1, F2, 2, {(1, 0): 1})
    with pytest.raises(AlgebraError):
        AlgebraElement.monomial(B1, F2, (MAX_EXPONENT + 1, 0))
    with pytest.raises(FieldMismatchError):
        AlgebraElement(B1, F2, 1, {(1, 0): F4.gen})
    with pytest.raises(AlgebraError):
        AlgebraElement.one(B1, F2) * AlgebraElement.one(B1, F4)
    with pytest.raises(AlgebraError):
        elt(B1, F2, (1, {"x1": 1})) + elt(B1, F2, (1, {"x1": 2}))
    with pytest.raises(ValueError):
        symplectic_basis(1).__class__(2, ("a", "b"), ((0, 0),))


def test_addition_in_characteristic_two():
    v = elt(B2, F4, (3, {"x1": 1}))
    assert (v + v).is_zero()
    assert v * F4.gen == v.scale(2)
