"""Binomial parity, compositions and their dense ranking.

Compositions of ``k`` into ``n`` parts index the monomial basis of the
degree-``k`` divided powers of an ``n``-dimensional space.  They are ordered
reverse-lexicographically, i.e. lexicographically *descending*, so that
``(k, 0, ..., 0)`` comes first and ``(0, ..., 0, k)`` last.
"""

from __future__ import annotations

import functools
from math import comb
from typing import NamedTuple


class Composition(NamedTuple):
    parts: tuple[int, ...]

    @property
    def degree(self) -> int:
        return sum(self.parts)


def binom_parity(n: int, k: int) -> int:
    """``binom(n, k) mod 2`` by Lucas: odd iff ``k`` and ``n - k`` share no bit."""
    if k < 0 or n < 0 or k > n:
        return 0
    return int(k & (n - k) == 0)


@functools.lru_cache(maxsize=None)
def compositions(n: int, k: int) -> tuple[tuple[int, ...], ...]:
    """All compositions of ``k`` into ``n`` non-negative parts, descending lex."""
    if n < 1 or k < 0:
        raise ValueError(f"need n >= 1 and k >= 0, got n={n}, k={k}")
    if n == 1:
        return ((k,),)
    out = []
    for first in range(k, -1, -1):
        for rest in compositions(n - 1, k - first):
            out.append((first,) + rest)
    return tuple(out)


@functools.lru_cache(maxsize=None)
def rank_table(n: int, k: int) -> dict[tuple[int, ...], int]:
    return {c: i for i, c in enumerate(compositions(n, k))}


def count(n: int, k: int) -> int:
    """Number of compositions of ``k`` into ``n`` parts."""
    return comb(n + k - 1, k) if n >= 1 else int(k == 0)


def rank(c) -> int:
    """Position of ``c`` in :func:`compositions` order, computed arithmetically."""
    parts = tuple(c.parts if isinstance(c, Composition) else c)
    if any(p < 0 for p in parts):
        raise ValueError(f"negative part in {parts}")
    n = len(parts)
    remaining = sum(parts)
    r = 0
    for i, p in enumerate(parts[:-1]):
        # every value larger than p at slot i precedes c
        r += count(n - i, remaining - p - 1) if remaining > p else 0
        remaining -= p
    return r


def unrank(n: int, k: int, index: int) -> tuple[int, ...]:
    total = count(n, k)
    if not 0 <= index < total:
        raise IndexError(f"index {index} out of range for compositions({n}, {k}) of size {total}")
    parts = []
    remaining = k
    for i in range(n - 1):
        # blocks for first part = remaining, remaining - 1, ...
        p = remaining
        while True:
            block = count(n - i - 1, remaining - p)
            if index < block:
                break
            index -= block
            p -= 1
        parts.append(p)
        remaining -= p
    parts.append(remaining)
    return tuple(parts)


def odd_compositions(m: int, k: int) -> list[tuple[int, ...]]:
    """All ``m``-tuples of odd positive integers summing to ``k``."""
    if m < 1:
        raise ValueError("m must be positive")
    if k < m or (k - m) % 2:
        return []
    return [tuple(2 * b + 1 for b in c) for c in compositions(m, (k - m) // 2)]


def identity3_check(n: int, k: int) -> int:
    """1 iff ``binom(n,k) == sum_{j<=k} (j+1) binom(n-2-j, k-j)`` over the integers."""
    if k < 0 or k + 2 > n:
        raise ValueError(f"need 0 <= k and k + 2 <= n, got n={n}, k={k}")
    rhs = sum((j + 1) * comb(n - 2 - j, k - j) for j in range(k + 1))
    return int(comb(n, k) == rhs)
