"""Slow, independent reference implementations used only by the tests."""

from __future__ import annotations

import itertools
from math import comb


def gf_mul_ref(a: int, b: int, modulus: int) -> int:
    """Shift-and-add multiplication in GF(2)[x] / (modulus)."""
    deg = modulus.bit_length() - 1
    out = 0
    while b:
        if b & 1:
            out ^= a
        b >>= 1
        a <<= 1
        if a >> deg & 1:
            a ^= modulus
    return out


def gf_inv_ref(a: int, modulus: int) -> int:
    q = 1 << (modulus.bit_length() - 1)
    return next(x for x in range(1, q) if gf_mul_ref(a, x, modulus) == 1)


def compositions_ref(n: int, k: int) -> list[tuple[int, ...]]:
    return sorted((c for c in itertools.product(range(k + 1), repeat=n) if sum(c) == k), reverse=True)


def dp_coefficient_ref(a, b) -> int:
    """Coefficient of v^(a+b) in v^(a) v^(b), reduced mod 2, from integer binomials."""
    c = 1
    for x, y in zip(a, b):
        c *= comb(x + y, x)
    return c % 2


def rank_ref(rows: list[list[int]], modulus: int) -> int:
    """Plain Gaussian elimination on lists of field elements."""
    rows = [list(r) for r in rows]
    if not rows:
        return 0
    ncols = len(rows[0])
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(rows)) if rows[i][c]), None)
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        inv = gf_inv_ref(rows[r][c], modulus)
        rows[r] = [gf_mul_ref(inv, x, modulus) for x in rows[r]]
        for i in range(len(rows)):
            if i != r and rows[i][c]:
                f = rows[i][c]
                rows[i] = [x ^ gf_mul_ref(f, y, modulus) for x, y in zip(rows[i], rows[r])]
        r += 1
    return r


def matmul_ref(A, B, modulus: int):
    n, k, p = len(A), len(B), len(B[0])
    out = [[0] * p for _ in range(n)]
    for i in range(n):
        for j in range(p):
            acc = 0
            for t in range(k):
                acc ^= gf_mul_ref(A[i][t], B[t][j], modulus)
            out[i][j] = acc
    return out
