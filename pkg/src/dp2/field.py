"""Arithmetic in the binary fields GF(2^e), 1 <= e <= 8.

Elements are stored as polynomial-basis bitmasks: bit ``i`` of an element is
the coefficient of ``g^i`` where ``g`` is the class of ``x`` modulo the
reduction polynomial.  Hot loops elsewhere in the package work directly on
these ints through the :class:`FieldSpec` table methods; :class:`FieldElement`
is the checked, operator-friendly wrapper for the public API.
"""

from __future__ import annotations

import configparser
import functools
import re
from dataclasses import dataclass, field
from importlib import resources

import numpy as np

MAX_DEGREE = 8


class FieldMismatchError(ValueError):
    """Raised when combining elements of two different fields."""


def poly_mulmod(a: int, b: int, modulus: int) -> int:
    """Carry-less product of ``a`` and ``b`` reduced modulo ``modulus``."""
    deg = modulus.bit_length() - 1
    r = 0
    while b:
        if b & 1:
            r ^= a
        b >>= 1
        a <<= 1
        if a >> deg & 1:
            a ^= modulus
    return r


def poly_mod(a: int, m: int) -> int:
    dm = m.bit_length()
    while a.bit_length() >= dm:
        a ^= m << (a.bit_length() - dm)
    return a


def is_irreducible(poly: int) -> bool:
    """Trial division by every polynomial of degree 1 .. deg(poly) - 1."""
    deg = poly.bit_length() - 1
    if deg < 1:
        return False
    for d in range(2, 1 << deg):
        if poly_mod(poly, d) == 0:
            return False
    return True


def smallest_irreducible(e: int) -> int:
    for p in range(1 << e, 1 << (e + 1)):
        if is_irreducible(p):
            return p
    raise ValueError(f"no irreducible polynomial of degree {e}")  # pragma: no cover


@functools.lru_cache(maxsize=None)
def _configured_moduli() -> dict[int, int]:
    parser = configparser.ConfigParser()
    parser.read_string(resources.files("dp2").joinpath("fields.ini").read_text())
    return {int(k): int(v, 0) for k, v in parser["reduction"].items()}


@dataclass(frozen=True, eq=False)
class FieldSpec:
    """The field GF(2^e) defined by a fixed irreducible reduction polynomial."""

    e: int
    modulus: int
    _mul: np.ndarray = field(init=False, repr=False)
    _inv: tuple = field(init=False, repr=False)

    def __post_init__(self):
        if not 1 <= self.e <= MAX_DEGREE:
            raise ValueError(f"extension degree must be in 1..{MAX_DEGREE}, got {self.e}")
        if self.modulus.bit_length() - 1 != self.e or not is_irreducible(self.modulus):
            raise ValueError(f"{bin(self.modulus)} is not irreducible of degree {self.e}")
        q = 1 << self.e
        table = np.zeros((q, q), dtype=np.uint8)
        for a in range(q):
            for b in range(a, q):
                table[a, b] = table[b, a] = poly_mulmod(a, b, self.modulus)
        table.setflags(write=False)
        inv = [0] * q
        for a in range(1, q):
            inv[a] = int(np.flatnonzero(table[a] == 1)[0])
        object.__setattr__(self, "_mul", table)
        object.__setattr__(self, "_inv", tuple(inv))
        object.__setattr__(self, "_mul_rows", tuple(tuple(int(x) for x in row) for row in table))

    # identity is (e, modulus); tables are derived data
    def __eq__(self, other):
        return isinstance(other, FieldSpec) and (self.e, self.modulus) == (other.e, other.modulus)

    def __hash__(self):
        return hash((self.e, self.modulus))

    def __str__(self):
        return f"GF(2^{self.e})"

    @property
    def order(self) -> int:
        return 1 << self.e

    @property
    def mul_table(self) -> np.ndarray:
        """Read-only ``q x q`` uint8 multiplication table."""
        return self._mul

    # -- raw-int arithmetic (no checks) --------------------------------------

    def mul_int(self, a: int, b: int) -> int:
        return self._mul_rows[a][b]

    def inv_int(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError("zero has no inverse")
        return self._inv[a]

    def pow_int(self, a: int, n: int) -> int:
        r = 1
        rows = self._mul_rows
        while n:
            if n & 1:
                r = rows[r][a]
            a = rows[a][a]
            n >>= 1
        return r

    def frob_int(self, a: int) -> int:
        return self._mul_rows[a][a]

    # -- checked API ---------------------------------------------------------

    def __call__(self, bits: int) -> FieldElement:
        return FieldElement(bits, self)

    @property
    def zero(self) -> FieldElement:
        return FieldElement(0, self)

    @property
    def one(self) -> FieldElement:
        return FieldElement(1, self)

    @property
    def gen(self) -> FieldElement:
        """The class ``g`` of ``x``; equals 1 only in GF(2)."""
        return FieldElement(poly_mod(2, self.modulus), self)

    def enumerate(self) -> list[FieldElement]:
        """All elements, ordered by bitmask: 0, 1, g, g+1, ..."""
        return [FieldElement(b, self) for b in range(self.order)]

    def format_int(self, a: int) -> str:
        """Render ``a`` as a polynomial in ``g``, e.g. ``g^2+1``."""
        if a in (0, 1):
            return str(a)
        parts = []
        for i in reversed(range(self.e)):
            if a >> i & 1:
                parts.append("1" if i == 0 else "g" if i == 1 else f"g^{i}")
        return "+".join(parts)


@dataclass(frozen=True)
class FieldElement:
    bits: int
    spec: FieldSpec

    def __post_init__(self):
        if not 0 <= self.bits < self.spec.order:
            raise ValueError(f"{self.bits} is not an element of {self.spec}")

    def _check(self, other) -> FieldElement:
        if isinstance(other, int) and other in (0, 1):
            return FieldElement(other, self.spec)
        if not isinstance(other, FieldElement):
            return NotImplemented
        if other.spec != self.spec:
            raise FieldMismatchError(f"cannot combine {self.spec} with {other.spec}")
        return other

    def __add__(self, other):
        other = self._check(other)
        if other is NotImplemented:
            return other
        return FieldElement(self.bits ^ other.bits, self.spec)

    __radd__ = __add__
    __sub__ = __add__
    __rsub__ = __add__

    def __neg__(self):
        return self

    def __mul__(self, other):
        other = self._check(other)
        if other is NotImplemented:
            return other
        return FieldElement(self.spec.mul_int(self.bits, other.bits), self.spec)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if n < 0:
            return self.inverse() ** (-n)
        return FieldElement(self.spec.pow_int(self.bits, n), self.spec)

    def __truediv__(self, other):
        other = self._check(other)
        if other is NotImplemented:
            return other
        return self * other.inverse()

    def __bool__(self):
        return self.bits != 0

    def inverse(self) -> FieldElement:
        return FieldElement(self.spec.inv_int(self.bits), self.spec)

    def frobenius(self) -> FieldElement:
        return FieldElement(self.spec.frob_int(self.bits), self.spec)

    def __str__(self):
        return self.spec.format_int(self.bits)


def add(a: FieldElement, b: FieldElement) -> FieldElement:
    return a + b


def mul(a: FieldElement, b: FieldElement) -> FieldElement:
    return a * b


def frobenius(a: FieldElement) -> FieldElement:
    return a.frobenius()


def enumerate_field(spec: FieldSpec) -> list[FieldElement]:
    return spec.enumerate()


@functools.lru_cache(maxsize=None)
def gf(e: int) -> FieldSpec:
    """The configured field GF(2^e)."""
    moduli = _configured_moduli()
    if e not in moduli:
        raise ValueError(f"extension degree must be in 1..{MAX_DEGREE}, got {e}")
    return FieldSpec(e, moduli[e])


_ORDER_RE = re.compile(r"^\s*(?:GF\()?\s*2\s*(?:\^|\*\*)\s*(\d+)\s*\)?\s*$")


def parse_field(text: str) -> FieldSpec:
    """Parse ``2^e``, ``GF(2^e)`` or a plain field order such as ``4``."""
    m = _ORDER_RE.match(text)
    if m:
        return gf(int(m.group(1)))
    try:
        q = int(text)
    except ValueError:
        raise ValueError(f"cannot parse field {text!r}; expected 2^e") from None
    if q < 2 or q & (q - 1):
        raise ValueError(f"field order must be a power of two, got {q}")
    return gf(q.bit_length() - 1)
