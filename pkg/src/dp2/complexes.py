"""The cochain complex (DV, d) with d = multiplication by omega.

Cohomology is computed from ranks of the differential matrices in the ranked
monomial bases.  The tensor decomposition over the hyperbolic planes is used
only as a cross-check, never to produce the numbers it checks.
"""

from __future__ import annotations

import functools
import logging
import os
from dataclasses import asdict, dataclass, field as dc_field
from math import comb, prod

from .combinatorics import compositions, count, odd_compositions, rank_table
from .dpalgebra import AlgebraElement, differential, symplectic_basis
from .field import FieldSpec
from .linalg import (
    KIND_IMAGE,
    KIND_KERNEL,
    BinMatrix,
    CoordinateSolver,
    Echelon,
    Subspace,
    cache_path,
    image_basis,
    kernel_basis,
    load_subspace,
    save_subspace,
)

log = logging.getLogger(__name__)

MAX_COLUMNS = 12_000
CACHE_ENV = "DP2_CACHE_DIR"

_default_cache_dir: str | None = os.environ.get(CACHE_ENV) or None


def set_cache_dir(path) -> None:
    """Directory used for subspace caching when no explicit one is given (None disables)."""
    global _default_cache_dir
    _default_cache_dir = None if path is None else str(path)
    cohomology_data.cache_clear()


def get_cache_dir() -> str | None:
    return _default_cache_dir


class CapExceeded(ValueError):
    """A requested slice is larger than the configured caps."""


def dim_D(m: int, k: int) -> int:
    """``dim D_k V`` for ``dim V = 2m``; zero in negative degree."""
    return count(2 * m, k) if k >= 0 else 0


def expected_dim(m: int, degree: int) -> int:
    if degree < m or (degree - m) % 2:
        return 0
    j = (degree - m) // 2
    return 2**m * comb(2 * m + j - 1, j)


def _check_caps(m: int, k: int, force: bool):
    if m < 1 or k < 0:
        raise ValueError(f"need m >= 1 and k >= 0, got m={m}, k={k}")
    if not force and dim_D(m, k + 2) > MAX_COLUMNS:
        raise CapExceeded(f"D_{k + 2} has dimension {dim_D(m, k + 2)} > {MAX_COLUMNS}; pass force to override")


@functools.lru_cache(maxsize=64)
def differential_columns(m: int, k: int, field: FieldSpec) -> tuple[int, ...]:
    """Packed images of the ranked basis of D_k under d, as vectors of D_{k+2}."""
    basis = symplectic_basis(m)
    return tuple(differential(AlgebraElement.monomial(basis, field, mono)).to_vector() for mono in compositions(2 * m, k))


def differential_matrix(m: int, k: int, field: FieldSpec, force: bool = False) -> BinMatrix:
    """Matrix of ``d_k : D_k -> D_{k+2}`` (rows index D_{k+2})."""
    _check_caps(m, k, force)
    return BinMatrix.from_columns(dim_D(m, k + 2), field, differential_columns(m, k, field))


@dataclass
class ComplexSlice:
    m: int
    k: int
    field: FieldSpec
    matrix_in: BinMatrix | None
    matrix_out: BinMatrix

    def composite_is_zero(self) -> bool:
        return self.matrix_in is None or (self.matrix_out @ self.matrix_in).is_zero()


def build_slice(m: int, k: int, field: FieldSpec, force: bool = False) -> ComplexSlice:
    mat_in = differential_matrix(m, k - 2, field, force) if k >= 2 else None
    return ComplexSlice(m, k, field, mat_in, differential_matrix(m, k, field, force))


@dataclass
class CohomologyReport:
    m: int
    degree: int
    field: str
    dim_Dk: int
    rank_in: int
    dim_ker_out: int
    dim_H: int
    expected_dim: int
    basis_reps: list = dc_field(default_factory=list)
    match: bool = False

    def to_dict(self) -> dict:
        d = asdict(self)
        d["basis_reps"] = [list(r) for r in self.basis_reps]
        return d


def _image_and_kernel(m: int, degree: int, field: FieldSpec, cache_dir=None, force: bool = False):
    _check_caps(m, degree, force)
    if cache_dir is None:
        cache_dir = _default_cache_dir
    loaded = {}
    if cache_dir is not None:
        for kind in (KIND_IMAGE, KIND_KERNEL):
            path = cache_path(cache_dir, kind, m, degree, field)
            sub = load_subspace(path, field, kind, m, degree)
            if sub is not None and sub.dim != dim_D(m, degree):
                sub = None
            if sub is None and os.path.exists(path):
                log.warning("rejecting unreadable or stale cache file %s", path)
            loaded[kind] = sub
    image = loaded.get(KIND_IMAGE)
    if image is None:
        if degree >= 2:
            image = image_basis(BinMatrix.from_columns(dim_D(m, degree), field, differential_columns(m, degree - 2, field)))
        else:
            image = Subspace.zero(field, dim_D(m, degree))
    kernel = loaded.get(KIND_KERNEL)
    if kernel is None:
        kernel = kernel_basis(differential_matrix(m, degree, field, force))
    if cache_dir is not None:
        for kind, sub in ((KIND_IMAGE, image), (KIND_KERNEL, kernel)):
            if loaded[kind] is None:
                log.info("caching %s subspace m=%d degree=%d e=%d", "image" if kind == KIND_IMAGE else "kernel", m, degree, field.e)
                save_subspace(cache_path(cache_dir, kind, m, degree, field), sub, kind, m, degree)
    return image, kernel


def cohomology(m: int, degree: int, field: FieldSpec, cache_dir=None, force: bool = False) -> CohomologyReport:
    image, kernel = _image_and_kernel(m, degree, field, cache_dir, force)
    dim_h = kernel.rank - image.rank
    exp = expected_dim(m, degree)
    reps = canonical_basis(m, degree) if exp else []
    return CohomologyReport(
        m=m,
        degree=degree,
        field=str(field),
        dim_Dk=dim_D(m, degree),
        rank_in=image.rank,
        dim_ker_out=kernel.rank,
        dim_H=dim_h,
        expected_dim=exp,
        basis_reps=reps,
        match=dim_h == exp,
    )


def canonical_basis(m: int, degree: int) -> list[tuple[int, ...]]:
    """Monomials of the given degree whose exponents on each pair x_i, y_i sum to an odd number."""
    basis = symplectic_basis(m)
    return [
        mono for mono in compositions(2 * m, degree) if all((mono[x] + mono[y]) % 2 for x, y in basis.pairing)
    ]


class CohomologyData:
    """Image, kernel and canonical class coordinates of H^degree."""

    def __init__(self, m: int, degree: int, field: FieldSpec, cache_dir=None, force: bool = False):
        self.m, self.degree, self.field = m, degree, field
        self.image, self.kernel = _image_and_kernel(m, degree, field, cache_dir, force)
        self.reps = canonical_basis(m, degree)
        idx = rank_table(2 * m, degree)
        e = field.e
        self.rep_vectors = [1 << (idx[r] * e) for r in self.reps]
        self.reduced = [self.image.reduce(v) for v in self.rep_vectors]
        self.solver = CoordinateSolver(field, dim_D(m, degree), self.reduced)

    @property
    def dim(self) -> int:
        return self.kernel.rank - self.image.rank

    def coordinates(self, v: int) -> int:
        """Packed coordinates of the class of the cocycle ``v`` in the canonical basis."""
        if not self.kernel.contains(v):
            raise ArithmeticError("vector is not a cocycle")
        c = self.solver.solve(self.image.reduce(v))
        if c is None:
            raise ArithmeticError("class not in the span of the canonical representatives")
        return c


@functools.lru_cache(maxsize=32)
def cohomology_data(m: int, degree: int, field: FieldSpec) -> CohomologyData:
    return CohomologyData(m, degree, field)


def verify_basis(m: int, degree: int, field: FieldSpec) -> bool:
    data = cohomology_data(m, degree, field)
    if not all(data.kernel.contains(v) for v in data.rep_vectors):
        return False
    ech = Echelon(field, dim_D(m, degree))
    for r in data.reduced:
        if not ech.insert(r):
            return False
    return len(data.reps) == data.dim


def tensor_decomposition_dim(m: int, degree: int) -> int:
    """Sum over odd compositions (a_1..a_m) of degree of prod (a_i + 1)."""
    return sum(prod(a + 1 for a in c) for c in odd_compositions(m, degree))


def verify_theorem_2_2_dims(m: int, degree: int, field: FieldSpec) -> bool:
    return cohomology(m, degree, field).dim_H == tensor_decomposition_dim(m, degree)


def kunneth_convolution(m: int, degree: int, h1: dict[int, int]) -> int:
    """Degree-``degree`` entry of the m-fold convolution of the sequence ``h1``."""
    seq = {0: 1}
    for _ in range(m):
        nxt: dict[int, int] = {}
        for a, x in seq.items():
            for b, y in h1.items():
                if a + b <= degree:
                    nxt[a + b] = nxt.get(a + b, 0) + x * y
        seq = nxt
    return seq.get(degree, 0)
