"""The divided power algebra D(V) over GF(2^e).

A monomial ``v_1^(a_1) ... v_n^(a_n)`` is stored as its exponent tuple.
Products follow ``v^(a) v^(b) = binom(a+b, a) v^(a+b)``, so in characteristic
2 a product of monomials is either a single monomial or zero (Lucas).

For a symplectic basis of dimension ``2m`` the variables are ordered
``x1, ..., xm, ym, ..., y1`` so that ``x_i`` and ``y_i`` sit at mirrored
positions ``i - 1`` and ``2m - i``.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass
from typing import Iterable, Sequence

from .combinatorics import compositions, rank_table
from .field import FieldElement, FieldMismatchError, FieldSpec
from .linalg import BinMatrix, packing, rank

MAX_EXPONENT = 1 << 16

Monomial = tuple  # exponent vector


class AlgebraError(ValueError):
    pass


@dataclass(frozen=True)
class BasisSpec:
    n: int
    labels: tuple[str, ...]
    pairing: tuple[tuple[int, int], ...] | None = None

    def __post_init__(self):
        if len(self.labels) != self.n:
            raise ValueError("one label per basis vector required")
        if self.pairing is not None:
            flat = sorted(i for pair in self.pairing for i in pair)
            if flat != list(range(self.n)):
                raise ValueError("symplectic pairing must partition the basis")

    @property
    def m(self) -> int:
        self.require_pairing()
        return len(self.pairing)

    def require_pairing(self):
        if self.pairing is None:
            raise AlgebraError("operation needs a symplectic basis")

    @functools.cached_property
    def partner(self) -> tuple[int, ...]:
        self.require_pairing()
        p = [0] * self.n
        for x, y in self.pairing:
            p[x], p[y] = y, x
        return tuple(p)

    def form(self, u: Sequence[int], w: Sequence[int], field: FieldSpec) -> int:
        """The alternating form ``f(u, w)``; signs vanish in characteristic 2."""
        acc = 0
        for x, y in self.pairing:
            acc ^= field.mul_int(u[x], w[y]) ^ field.mul_int(u[y], w[x])
        return acc


@functools.lru_cache(maxsize=None)
def symplectic_basis(m: int) -> BasisSpec:
    labels = tuple(f"x{i}" for i in range(1, m + 1)) + tuple(f"y{i}" for i in range(m, 0, -1))
    pairing = tuple((i, 2 * m - 1 - i) for i in range(m))
    return BasisSpec(2 * m, labels, pairing)


@functools.lru_cache(maxsize=None)
def general_basis(n: int) -> BasisSpec:
    return BasisSpec(n, tuple(f"v{i}" for i in range(1, n + 1)))


def mono_product(a: Monomial, b: Monomial) -> Monomial | None:
    """Exponent sum of ``a`` and ``b``, or None when some binomial is even."""
    out = []
    for x, y in zip(a, b):
        if x & y:
            return None
        out.append(x + y)
    return tuple(out)


class AlgebraElement:
    """A homogeneous element of D_k V with nonzero coefficients keyed by monomial."""

    __slots__ = ("basis", "field", "degree", "terms")

    def __init__(self, basis: BasisSpec, field: FieldSpec, degree: int, terms: dict | None = None):
        self.basis = basis
        self.field = field
        self.degree = degree
        self.terms = {}
        for mono, c in (terms or {}).items():
            if isinstance(c, FieldElement):
                if c.spec != field:
                    raise FieldMismatchError(f"coefficient in {c.spec}, element over {field}")
                c = c.bits
            if not c:
                continue
            mono = tuple(mono)
            if len(mono) != basis.n or sum(mono) != degree or min(mono) < 0:
                raise AlgebraError(f"monomial {mono} is not of degree {degree} in {basis.n} variables")
            if max(mono) > MAX_EXPONENT:
                raise AlgebraError(f"exponent above cap {MAX_EXPONENT} in {mono}")
            self.terms[mono] = c

    @classmethod
    def monomial(cls, basis: BasisSpec, field: FieldSpec, exps: Sequence[int], coef: int = 1) -> AlgebraElement:
        return cls(basis, field, sum(exps), {tuple(exps): coef})

    @classmethod
    def one(cls, basis: BasisSpec, field: FieldSpec) -> AlgebraElement:
        return cls.monomial(basis, field, (0,) * basis.n)

    def coefficient(self, mono: Sequence[int]) -> FieldElement:
        return FieldElement(self.terms.get(tuple(mono), 0), self.field)

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def _compatible(self, other: AlgebraElement):
        if other.basis != self.basis or other.field != self.field:
            raise AlgebraError("elements live in different algebras")

    def __add__(self, other: AlgebraElement) -> AlgebraElement:
        self._compatible(other)
        if other.degree != self.degree and self.terms and other.terms:
            raise AlgebraError("only homogeneous elements are supported")
        terms = dict(self.terms)
        for mono, c in other.terms.items():
            terms[mono] = terms.get(mono, 0) ^ c
        deg = self.degree if self.terms else other.degree
        return AlgebraElement(self.basis, self.field, deg, terms)

    __sub__ = __add__

    def __mul__(self, other):
        if isinstance(other, (int, FieldElement)):
            return self.scale(other)
        self._compatible(other)
        mul = self.field.mul_int
        terms: dict = {}
        for a, ca in self.terms.items():
            for b, cb in other.terms.items():
                prod = mono_product(a, b)
                if prod is not None:
                    terms[prod] = terms.get(prod, 0) ^ mul(ca, cb)
        return AlgebraElement(self.basis, self.field, self.degree + other.degree, terms)

    def scale(self, c) -> AlgebraElement:
        if isinstance(c, FieldElement):
            if c.spec != self.field:
                raise FieldMismatchError("scalar from another field")
            c = c.bits
        mul = self.field.mul_int
        return AlgebraElement(self.basis, self.field, self.degree, {k: mul(c, v) for k, v in self.terms.items()})

    __rmul__ = scale

    def __eq__(self, other):
        if not isinstance(other, AlgebraElement):
            return NotImplemented
        return (
            self.basis == other.basis
            and self.field == other.field
            and self.terms == other.terms
            and (self.degree == other.degree or not self.terms)
        )

    __hash__ = None

    def sorted_terms(self) -> list[tuple[Monomial, int]]:
        """Terms in ranked basis order (descending lexicographic exponents)."""
        return sorted(self.terms.items(), reverse=True)

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for mono, c in self.sorted_terms():
            factors = []
            for label, a in zip(self.basis.labels, mono):
                if a == 1:
                    factors.append(label)
                elif a:
                    factors.append(f"{label}^({a})")
            body = "*".join(factors) or "1"
            if c != 1:
                coef = self.field.format_int(c)
                coef = f"({coef})" if "+" in coef else coef
                body = coef if body == "1" else f"{coef}*{body}"
            parts.append(body)
        return " + ".join(parts)

    __repr__ = __str__

    # dense coordinates in the ranked monomial basis

    def to_vector(self) -> int:
        idx = rank_table(self.basis.n, self.degree)
        e = self.field.e
        v = 0
        for mono, c in self.terms.items():
            v |= c << (idx[mono] * e)
        return v

    @classmethod
    def from_vector(cls, basis: BasisSpec, field: FieldSpec, degree: int, v: int) -> AlgebraElement:
        monos = compositions(basis.n, degree)
        pk = packing(field, len(monos))
        return cls(basis, field, degree, {monos[j]: c for j, c in pk.support(v)})


def mono_mul(a: Monomial, b: Monomial, basis: BasisSpec, field: FieldSpec) -> AlgebraElement:
    prod = mono_product(a, b)
    deg = sum(a) + sum(b)
    return AlgebraElement(basis, field, deg, {} if prod is None else {prod: 1})


def omega(basis: BasisSpec, field: FieldSpec) -> AlgebraElement:
    """``x_1 y_1 + ... + x_m y_m`` in D_2 V."""
    basis.require_pairing()
    terms = {}
    for x, y in basis.pairing:
        e = [0] * basis.n
        e[x] = e[y] = 1
        terms[tuple(e)] = 1
    return AlgebraElement(basis, field, 2, terms)


def differential(v: AlgebraElement) -> AlgebraElement:
    """Multiplication by omega, raising degree by 2."""
    return omega(v.basis, v.field) * v


def _coords(u, field: FieldSpec) -> list[int]:
    out = []
    for c in u:
        if isinstance(c, FieldElement):
            if c.spec != field:
                raise FieldMismatchError("vector coordinate from another field")
            c = c.bits
        out.append(c)
    return out


def divided_power_of_vector(u, a: int, basis: BasisSpec, field: FieldSpec) -> AlgebraElement:
    """``u^(a)`` for ``u = sum lambda_i v_i``: sum over compositions of ``a`` of ``lambda^alpha v^(alpha)``."""
    lam = _coords(u, field)
    if len(lam) != basis.n:
        raise AlgebraError(f"vector of length {len(lam)} in a {basis.n}-dimensional space")
    if a < 0:
        raise AlgebraError("negative divided power")
    support = [i for i, c in enumerate(lam) if c]
    if not support:
        return AlgebraElement(basis, field, a, {} if a else {(0,) * basis.n: 1})
    terms = {}
    pw = field.pow_int
    mul = field.mul_int
    for alpha in compositions(len(support), a):
        c = 1
        mono = [0] * basis.n
        for i, ai in zip(support, alpha):
            if ai:
                c = mul(c, pw(lam[i], ai))
                mono[i] = ai
        terms[tuple(mono)] = c
    return AlgebraElement(basis, field, a, terms)


def substitution_action(images, v: AlgebraElement) -> AlgebraElement:
    """Apply the algebra automorphism sending ``v_j`` to ``images[j]``."""
    basis, field = v.basis, v.field
    cols = [_coords(u, field) for u in images]
    if len(cols) != basis.n or any(len(c) != basis.n for c in cols):
        raise AlgebraError("need one image vector of length n per basis vector")
    if rank(BinMatrix.from_lists(cols, field)) != basis.n:
        raise AlgebraError("substitution is singular")

    @functools.lru_cache(maxsize=None)
    def power(j, a):
        return divided_power_of_vector(cols[j], a, basis, field)

    out = AlgebraElement(basis, field, v.degree)
    for mono, c in v.terms.items():
        img = AlgebraElement.one(basis, field)
        for j, a in enumerate(mono):
            if a:
                img = img * power(j, a)
        out = out + img.scale(c)
    return out


def elementary_action(r: int, s: int, t, v: AlgebraElement, twist: bool = False) -> AlgebraElement:
    """Act by ``g_rs(t) = I + t E_rs`` (so ``v_s -> v_s + t v_r``) term by term.

    Uses the closed form ``sum_i t^(a_s - i) binom(a_r + a_s - i, a_r)`` times the
    monomial with ``v_s^(i) v_r^(a_r + a_s - i)``.  With ``twist`` the power of
    ``t`` is doubled, which is the action on the first Frobenius twist.
    """
    if r == s:
        raise AlgebraError("elementary matrix needs r != s")
    field = v.field
    t = _coords([t], field)[0]
    pw, mul = field.pow_int, field.mul_int
    terms: dict = {}
    for mono, c in v.terms.items():
        ar, as_ = mono[r], mono[s]
        for i in range(as_ + 1):
            new_r = ar + as_ - i
            if (new_r - ar) & ar:  # binom(new_r, ar) even
                continue
            k = (as_ - i) * (2 if twist else 1)
            coef = mul(c, pw(t, k))
            if not coef:
                continue
            out = list(mono)
            out[s], out[r] = i, new_r
            key = tuple(out)
            terms[key] = terms.get(key, 0) ^ coef
    return AlgebraElement(v.basis, field, v.degree, terms)


def transvection_images(basis: BasisSpec, field: FieldSpec, u, lam) -> list[list[int]]:
    """Columns of ``w -> w + lam f(w, u) u`` on the basis vectors."""
    basis.require_pairing()
    u = _coords(u, field)
    lam = _coords([lam], field)[0]
    mul = field.mul_int
    cols = []
    for j in range(basis.n):
        coef = mul(lam, u[basis.partner[j]])  # f(v_j, u)
        col = [mul(coef, ui) for ui in u]
        col[j] ^= 1
        cols.append(col)
    return cols


def transvection_action(u, lam, v: AlgebraElement) -> AlgebraElement:
    return substitution_action(transvection_images(v.basis, v.field, u, lam), v)


def double(v: AlgebraElement) -> AlgebraElement:
    """Double every exponent and square every coefficient (D_k V -> D_2k V)."""
    frob = v.field.frob_int
    return AlgebraElement(
        v.basis, v.field, 2 * v.degree, {tuple(2 * a for a in mono): frob(c) for mono, c in v.terms.items()}
    )


def weight(mono: Iterable[int], basis: BasisSpec) -> tuple[int, ...]:
    """Torus weight in epsilon coordinates: exponent of x_i minus exponent of y_i."""
    basis.require_pairing()
    mono = tuple(mono)
    return tuple(mono[x] - mono[y] for x, y in basis.pairing)


def basis_monomials(basis: BasisSpec, k: int) -> tuple[Monomial, ...]:
    return compositions(basis.n, k)
