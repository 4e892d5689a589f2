"""Exact dense linear algebra over GF(2^e).

Vectors are *packed* into Python ints: coordinate ``j`` occupies bits
``[j*e, (j+1)*e)``.  Addition is XOR, and scaling by a field constant costs
``e`` shifts/multiplies because each coordinate chunk is independent.  When
``e == 1`` this is plain bitset arithmetic, one bit per entry.

A second, independent elimination route over numpy ``uint8`` arrays
(:func:`dense_rref`) works for every ``e``; it exists to cross-check the
packed route and is not used on hot paths.
"""

from __future__ import annotations

import functools
import os
import struct
import zlib
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .field import FieldSpec


# -- packed vectors ---------------------------------------------------------


class Packing:
    """Chunk layout of length-``n`` vectors over ``field``."""

    def __init__(self, field: FieldSpec, n: int):
        self.field = field
        self.n = n
        self.e = e = field.e
        self.cmask = (1 << e) - 1
        unit = 0
        for j in range(n):
            unit |= 1 << (j * e)
        # plane_masks[i] selects bit i of every chunk
        self.plane_masks = tuple(unit << i for i in range(e))
        self.full = (1 << (n * e)) - 1

    def scale(self, c: int, v: int) -> int:
        if c == 1 or v == 0:
            return v
        if c == 0:
            return 0
        mul = self.field.mul_int
        r = 0
        for i, mask in enumerate(self.plane_masks):
            plane = v & mask
            if plane:
                # each chunk of (plane >> i) is 0 or 1, so the product has no carries
                r ^= (plane >> i) * mul(c, 1 << i)
        return r

    def get(self, v: int, j: int) -> int:
        return (v >> (j * self.e)) & self.cmask

    def lead(self, v: int) -> tuple[int, int]:
        """Index and coefficient of the lowest nonzero coordinate of ``v != 0``."""
        j = ((v & -v).bit_length() - 1) // self.e
        return j, (v >> (j * self.e)) & self.cmask

    def pack(self, coords: Iterable[int]) -> int:
        v = 0
        e = self.e
        for j, c in enumerate(coords):
            if c:
                v |= c << (j * e)
        return v

    def unpack(self, v: int) -> list[int]:
        return [(v >> (j * self.e)) & self.cmask for j in range(self.n)]

    def support(self, v: int):
        """Yield ``(j, coef)`` for nonzero coordinates, ascending."""
        e, cm = self.e, self.cmask
        while v:
            j = ((v & -v).bit_length() - 1) // e
            c = (v >> (j * e)) & cm
            yield j, c
            v ^= c << (j * e)

    def unit(self, j: int) -> int:
        return 1 << (j * self.e)


@functools.lru_cache(maxsize=256)
def packing(field: FieldSpec, n: int) -> Packing:
    return Packing(field, n)


# -- matrices ---------------------------------------------------------------


class BinMatrix:
    """A ``nrows x ncols`` matrix over ``field`` stored as packed rows."""

    __slots__ = ("nrows", "ncols", "field", "rows", "_cols")

    def __init__(self, nrows: int, ncols: int, field: FieldSpec, rows: Sequence[int]):
        if len(rows) != nrows:
            raise ValueError(f"expected {nrows} rows, got {len(rows)}")
        self.nrows = nrows
        self.ncols = ncols
        self.field = field
        self.rows = list(rows)
        self._cols = None

    # constructors

    @classmethod
    def zeros(cls, nrows: int, ncols: int, field: FieldSpec) -> BinMatrix:
        return cls(nrows, ncols, field, [0] * nrows)

    @classmethod
    def identity(cls, n: int, field: FieldSpec) -> BinMatrix:
        pk = packing(field, n)
        return cls(n, n, field, [pk.unit(i) for i in range(n)])

    @classmethod
    def from_lists(cls, entries: Sequence[Sequence[int]], field: FieldSpec, ncols: int | None = None) -> BinMatrix:
        ncols = len(entries[0]) if ncols is None else ncols
        pk = packing(field, ncols)
        for row in entries:
            if len(row) != ncols or any(not 0 <= x < field.order for x in row):
                raise ValueError("malformed matrix entries")
        return cls(len(entries), ncols, field, [pk.pack(r) for r in entries])

    @classmethod
    def from_columns(cls, nrows: int, field: FieldSpec, columns: Sequence[int]) -> BinMatrix:
        m = cls(len(columns), nrows, field, columns).transpose()
        m._cols = list(columns)
        return m

    @classmethod
    def from_array(cls, arr: np.ndarray, field: FieldSpec) -> BinMatrix:
        arr = np.asarray(arr, dtype=np.uint8)
        nrows, ncols = arr.shape
        if arr.size and int(arr.max()) >= field.order:
            raise ValueError("entry outside the field")
        e = field.e
        bits = np.unpackbits(arr[:, :, None], axis=2, bitorder="little")[:, :, :e]
        packed = np.packbits(bits.reshape(nrows, ncols * e), axis=1, bitorder="little")
        return cls(nrows, ncols, field, [int.from_bytes(r.tobytes(), "little") for r in packed])

    def to_array(self) -> np.ndarray:
        e = self.field.e
        nbytes = (self.ncols * e + 7) // 8
        raw = np.frombuffer(b"".join(r.to_bytes(nbytes, "little") for r in self.rows), dtype=np.uint8)
        bits = np.unpackbits(raw.reshape(self.nrows, nbytes), axis=1, bitorder="little")
        bits = bits[:, : self.ncols * e].reshape(self.nrows, self.ncols, e)
        weights = (1 << np.arange(e)).astype(np.uint8)
        return (bits * weights).sum(axis=2, dtype=np.uint8)

    def tolist(self) -> list[list[int]]:
        pk = packing(self.field, self.ncols)
        return [pk.unpack(r) for r in self.rows]

    # access

    @property
    def shape(self) -> tuple[int, int]:
        return self.nrows, self.ncols

    def __getitem__(self, ij: tuple[int, int]) -> int:
        i, j = ij
        return packing(self.field, self.ncols).get(self.rows[i], j)

    def columns(self) -> list[int]:
        if self._cols is None:
            self._cols = self.transpose().rows
        return self._cols

    def transpose(self) -> BinMatrix:
        pk = packing(self.field, self.ncols)
        e = self.field.e
        cols = [0] * self.ncols
        for i, row in enumerate(self.rows):
            shift = i * e
            for j, c in pk.support(row):
                cols[j] |= c << shift
        return BinMatrix(self.ncols, self.nrows, self.field, cols)

    T = property(transpose)

    def is_zero(self) -> bool:
        return not any(self.rows)

    def __eq__(self, other):
        if not isinstance(other, BinMatrix):
            return NotImplemented
        return self.shape == other.shape and self.field == other.field and self.rows == other.rows

    __hash__ = None

    def __repr__(self):
        return f"BinMatrix({self.nrows}x{self.ncols} over {self.field})"

    # arithmetic

    def __add__(self, other: BinMatrix) -> BinMatrix:
        self._same(other, other.shape == self.shape)
        return BinMatrix(self.nrows, self.ncols, self.field, [a ^ b for a, b in zip(self.rows, other.rows)])

    def __matmul__(self, other: BinMatrix) -> BinMatrix:
        self._same(other, self.ncols == other.nrows)
        pk_in = packing(self.field, self.ncols)
        scale = packing(self.field, other.ncols).scale
        brows = other.rows
        out = []
        for row in self.rows:
            acc = 0
            for k, c in pk_in.support(row):
                acc ^= scale(c, brows[k])
            out.append(acc)
        return BinMatrix(self.nrows, other.ncols, self.field, out)

    def apply(self, v: int) -> int:
        """Matrix-vector product on a packed column vector."""
        cols = self.columns()
        scale = packing(self.field, self.nrows).scale
        acc = 0
        for j, c in packing(self.field, self.ncols).support(v):
            acc ^= scale(c, cols[j])
        return acc

    def kron(self, other: BinMatrix) -> BinMatrix:
        self._same(other, True)
        a, b = self.to_array(), other.to_array()
        mt = self.field.mul_table
        prod = mt[a[:, None, :, None], b[None, :, None, :]]
        return BinMatrix.from_array(prod.reshape(a.shape[0] * b.shape[0], a.shape[1] * b.shape[1]), self.field)

    def map_entries(self, f) -> BinMatrix:
        """Apply ``f`` (int -> int) to every entry, e.g. the Frobenius map."""
        return BinMatrix.from_lists([[f(x) for x in r] for r in self.tolist()], self.field, self.ncols)

    def _same(self, other, shape_ok):
        if other.field != self.field:
            raise ValueError(f"field mismatch: {self.field} vs {other.field}")
        if not shape_ok:
            raise ValueError(f"shape mismatch: {self.shape} vs {other.shape}")


# -- echelon forms and subspaces ---------------------------------------------


class Echelon:
    """Incremental row-echelon basis keyed by lowest pivot coordinate.

    Only the first ``width`` coordinates are eligible as pivots; anything
    above is carried along (used to track linear combinations).
    """

    def __init__(self, field: FieldSpec, width: int, extra: int = 0):
        self.field = field
        self.width = width
        self.pk = packing(field, width + extra)
        self.low = (1 << (width * field.e)) - 1
        self.rows: dict[int, int] = {}

    def __len__(self):
        return len(self.rows)

    def reduce(self, v: int) -> int:
        """Reduce ``v`` until its low part has no pivot as leading coordinate."""
        rows, pk, low = self.rows, self.pk, self.low
        while v & low:
            j, c = pk.lead(v & low)
            row = rows.get(j)
            if row is None:
                return v
            v ^= pk.scale(c, row)
        return v

    def insert(self, v: int) -> int:
        """Add ``v`` to the basis; returns the reduced vector (low part 0 if dependent)."""
        v = self.reduce(v)
        if v & self.low:
            j, c = self.pk.lead(v & self.low)
            if c != 1:
                v = self.pk.scale(self.field.inv_int(c), v)
            self.rows[j] = v
        return v

    def to_subspace(self) -> Subspace:
        pivots = sorted(self.rows)
        pk = packing(self.field, self.width)
        e = self.field.e
        final: dict[int, int] = {}
        mask_above = 0
        for p in reversed(pivots):
            row = self.rows[p] & self.low
            w = row & mask_above
            while w:
                j, c = pk.lead(w)
                row ^= pk.scale(c, final[j])
                w = row & mask_above
            final[p] = row
            mask_above |= pk.cmask << (p * e)
        return Subspace(self.field, self.width, tuple(final[p] for p in pivots), tuple(pivots))


@dataclass(frozen=True)
class Subspace:
    """A subspace in reduced row-echelon form (pivot = lowest coordinate)."""

    field: FieldSpec
    dim: int
    rows: tuple[int, ...]
    pivots: tuple[int, ...]

    @classmethod
    def span(cls, field: FieldSpec, dim: int, vectors: Iterable[int]) -> Subspace:
        ech = Echelon(field, dim)
        for v in vectors:
            ech.insert(v)
        return ech.to_subspace()

    @classmethod
    def zero(cls, field: FieldSpec, dim: int) -> Subspace:
        return cls(field, dim, (), ())

    @classmethod
    def full(cls, field: FieldSpec, dim: int) -> Subspace:
        pk = packing(field, dim)
        return cls(field, dim, tuple(pk.unit(j) for j in range(dim)), tuple(range(dim)))

    @property
    def rank(self) -> int:
        return len(self.rows)

    def __len__(self):
        return len(self.rows)

    @functools.cached_property
    def _pivot_mask(self) -> int:
        cm = (1 << self.field.e) - 1
        m = 0
        for p in self.pivots:
            m |= cm << (p * self.field.e)
        return m

    @functools.cached_property
    def _by_pivot(self) -> dict[int, int]:
        return dict(zip(self.pivots, self.rows))

    def reduce(self, v: int) -> int:
        """Canonical representative of ``v + self``: zero at every pivot."""
        if v >> (self.dim * self.field.e):
            raise ValueError(f"vector longer than ambient dimension {self.dim}")
        pk = packing(self.field, self.dim)
        by_pivot, mask = self._by_pivot, self._pivot_mask
        w = v & mask
        while w:
            j, c = pk.lead(w)
            v ^= pk.scale(c, by_pivot[j])
            w = v & mask
        return v

    def contains(self, v: int) -> bool:
        return self.reduce(v) == 0

    def __le__(self, other: Subspace) -> bool:
        _check_compatible(self, other)
        return all(other.contains(r) for r in self.rows)

    def basis_matrix(self) -> BinMatrix:
        return BinMatrix(len(self.rows), self.dim, self.field, self.rows)


def _check_compatible(a: Subspace, b: Subspace):
    if a.dim != b.dim or a.field != b.field:
        raise ValueError(f"incompatible subspaces: dim {a.dim} over {a.field} vs dim {b.dim} over {b.field}")


def rref(M: BinMatrix) -> tuple[Subspace, int]:
    """Row space of ``M`` in canonical reduced form, and the rank."""
    s = Subspace.span(M.field, M.ncols, M.rows)
    return s, s.rank


def rank(M: BinMatrix) -> int:
    return rref(M)[1]


def image_basis(M: BinMatrix) -> Subspace:
    """Column space of ``M`` as a subspace of the target."""
    return Subspace.span(M.field, M.nrows, M.columns())


def kernel_basis(M: BinMatrix) -> Subspace:
    """``{v : M v = 0}`` as a subspace of the source."""
    field, n = M.field, M.ncols
    shift = M.nrows * field.e
    ech = Echelon(field, M.nrows, extra=n)
    unit = packing(field, n).unit
    kernel = []
    for j, col in enumerate(M.columns()):
        r = ech.insert(col | (unit(j) << shift))
        if not r & ech.low:
            kernel.append(r >> shift)
    return Subspace.span(field, n, kernel)


def coset_reduce(S: Subspace, v: int) -> int:
    return S.reduce(v)


def subspace_equal(A: Subspace, B: Subspace) -> bool:
    _check_compatible(A, B)
    return A.rows == B.rows


def contains(A: Subspace, v: int) -> bool:
    return A.contains(v)


class CoordinateSolver:
    """Coordinates of vectors in the span of a fixed independent list."""

    def __init__(self, field: FieldSpec, dim: int, vectors: Sequence[int]):
        self.field = field
        self.dim = dim
        self.count = len(vectors)
        self._shift = dim * field.e
        self._ech = Echelon(field, dim, extra=len(vectors))
        unit = packing(field, len(vectors)).unit
        self.independent = True
        for i, v in enumerate(vectors):
            r = self._ech.insert(v | (unit(i) << self._shift))
            if not r & self._ech.low:
                self.independent = False

    def solve(self, v: int) -> int | None:
        """Packed coordinate vector ``c`` with ``sum c_i vectors[i] == v``, or None."""
        r = self._ech.reduce(v)
        if r & self._ech.low:
            return None
        return r >> self._shift


# -- GF(q) matrix products on numpy arrays ------------------------------------


def gf_matmul(field: FieldSpec, A: np.ndarray, B: np.ndarray) -> np.ndarray:
    """``A @ B`` over GF(2^e) via bit-plane decomposition and integer matmul."""
    A = np.asarray(A, dtype=np.uint8)
    B = np.asarray(B, dtype=np.uint8)
    e = field.e
    out = np.zeros((A.shape[0], B.shape[1]), dtype=np.uint8)
    mt = field.mul_table
    for b in range(e):
        Bb = ((B >> b) & 1).astype(np.float64)
        if not Bb.any():
            continue
        Ab = mt[A, 1 << b] if b else A
        for c in range(e):
            Abc = ((Ab >> c) & 1).astype(np.float64)
            prod = (Abc @ Bb).astype(np.int64) & 1
            out ^= (prod << c).astype(np.uint8)
    return out


# -- independent dense route ------------------------------------------------


def dense_rref(field: FieldSpec, A: np.ndarray) -> tuple[np.ndarray, list[int]]:
    """Reduced row-echelon form by textbook column-order Gauss-Jordan on uint8 arrays."""
    A = np.array(A, dtype=np.uint8)
    mt = field.mul_table
    nrows, ncols = A.shape
    pivots = []
    r = 0
    for col in range(ncols):
        if r == nrows:
            break
        nz = np.flatnonzero(A[r:, col])
        if nz.size == 0:
            continue
        p = r + nz[0]
        if p != r:
            A[[r, p]] = A[[p, r]]
        inv = field.inv_int(int(A[r, col]))
        A[r] = mt[inv, A[r]]
        others = np.flatnonzero(A[:, col])
        others = others[others != r]
        if others.size:
            A[others] ^= mt[A[others, col][:, None], A[r][None, :]]
        pivots.append(col)
        r += 1
    return A[:r], pivots


def dense_rank(field: FieldSpec, A: np.ndarray) -> int:
    return len(dense_rref(field, A)[1])


# -- on-disk cache ----------------------------------------------------------

CACHE_MAGIC = b"DP2S"
CACHE_VERSION = 1
_HEADER = struct.Struct("<4sHBHHBHII")
KIND_IMAGE, KIND_KERNEL = 0, 1


def cache_path(cache_dir: str | os.PathLike, kind: int, m: int, degree: int, field: FieldSpec) -> str:
    name = ("im" if kind == KIND_IMAGE else "ker") + f"_m{m}_d{degree}_e{field.e}.bin"
    return os.path.join(os.fspath(cache_dir), name)


def save_subspace(path: str | os.PathLike, S: Subspace, kind: int, m: int, degree: int) -> None:
    nbytes = (S.dim * S.field.e + 7) // 8
    body = _HEADER.pack(CACHE_MAGIC, CACHE_VERSION, kind, m, degree, S.field.e, S.field.modulus, S.dim, len(S.rows))
    body += b"".join(r.to_bytes(nbytes, "little") for r in S.rows)
    tmp = os.fspath(path) + ".tmp"
    with open(tmp, "wb") as fh:
        fh.write(body + struct.pack("<I", zlib.crc32(body)))
    os.replace(tmp, path)


def load_subspace(path: str | os.PathLike, field: FieldSpec, kind: int, m: int, degree: int) -> Subspace | None:
    """Load a cached subspace; None if missing, stale, corrupt or for other parameters."""
    try:
        with open(path, "rb") as fh:
            data = fh.read()
    except OSError:
        return None
    if len(data) < _HEADER.size + 4:
        return None
    body, crc = data[:-4], struct.unpack("<I", data[-4:])[0]
    if zlib.crc32(body) != crc:
        return None
    magic, version, k, mm, deg, e, modulus, dim, nrows = _HEADER.unpack_from(body)
    if (magic, version, k, mm, deg, e, modulus) != (CACHE_MAGIC, CACHE_VERSION, kind, m, degree, field.e, field.modulus):
        return None
    nbytes = (dim * e + 7) // 8
    if len(body) != _HEADER.size + nrows * nbytes:
        return None
    rows = []
    off = _HEADER.size
    for _ in range(nrows):
        rows.append(int.from_bytes(body[off : off + nbytes], "little"))
        off += nbytes
    pk = packing(field, dim)
    pivots = []
    for r in rows:
        if r == 0:
            return None
        j, c = pk.lead(r)
        if c != 1 or (pivots and j <= pivots[-1]):
            return None
        pivots.append(j)
    return Subspace(field, dim, tuple(rows), tuple(pivots))
