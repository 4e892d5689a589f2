"""Symplectic group actions on divided powers and on cohomology.

Group elements are ``2m x 2m`` matrices over GF(2^e) acting on V in the basis
``x1..xm, ym..y1``; column ``j`` holds the image of the ``j``-th basis vector.
Their action on D_k V is built degree by degree: a monomial whose first
nonzero exponent has top bit ``2^b`` factors as ``v_j^(2^b)`` times a monomial
of lower degree with coefficient 1 (Lucas), so each column is one product of
two already-known columns.
"""

from __future__ import annotations

import functools
import itertools
import random
from dataclasses import dataclass, field as dc_field
from typing import Sequence

import numpy as np
from scipy import sparse

from .combinatorics import compositions, rank_table
from .complexes import cohomology_data
from .dpalgebra import (
    AlgebraElement,
    divided_power_of_vector,
    general_basis,
    substitution_action,
    symplectic_basis,
    transvection_images,
    weight,
)
from .field import FieldSpec
from .linalg import BinMatrix, Echelon, Subspace, packing, rank

EXHAUSTIVE_CAP = 1 << 20

Weight = tuple  # coefficients of eps_1..eps_m


class NotSymplecticError(ValueError):
    pass


def gram_matrix(m: int, field: FieldSpec) -> BinMatrix:
    """Matrix of the form f in the basis x1..xm, ym..y1 (anti-diagonal ones)."""
    n = 2 * m
    return BinMatrix.from_lists([[int(i + j == n - 1) for j in range(n)] for i in range(n)], field)


class GroupElement:
    """An element of Sp(2m, q), validated against ``A^T J A = J``."""

    def __init__(self, matrix: BinMatrix, check: bool = True):
        n = matrix.nrows
        if matrix.ncols != n or n % 2:
            raise NotSymplecticError(f"need an even square matrix, got {matrix.shape}")
        self.matrix = matrix
        self.m = n // 2
        self.field = matrix.field
        self._actions: list[np.ndarray] | None = None
        if check and not self.is_symplectic():
            raise NotSymplecticError("matrix does not preserve the symplectic form")

    def is_symplectic(self) -> bool:
        J = gram_matrix(self.m, self.field)
        return self.matrix.T @ J @ self.matrix == J

    @property
    def key(self) -> tuple:
        return (self.field, tuple(self.matrix.rows))

    def __eq__(self, other):
        return isinstance(other, GroupElement) and self.key == other.key

    def __hash__(self):
        return hash(self.key)

    def __matmul__(self, other: GroupElement) -> GroupElement:
        return GroupElement(self.matrix @ other.matrix, check=False)

    def __repr__(self):
        return f"GroupElement({self.matrix.tolist()})"

    def clear_cache(self) -> None:
        self._actions = None

    def action_array(self, k: int) -> np.ndarray:
        """Dense uint8 matrix of the action on D_k V (cached across degrees)."""
        if self._actions is None or len(self._actions) <= k:
            self._actions = _action_arrays(self.matrix, k)
        return self._actions[k]


def transvection(m: int, field: FieldSpec, u: Sequence[int], lam: int) -> GroupElement:
    """``w -> w + lam f(w, u) u``."""
    cols = transvection_images(symplectic_basis(m), field, u, lam)
    return GroupElement(BinMatrix.from_lists(cols, field).T)


def symplectic_generators(m: int, field: FieldSpec) -> list[GroupElement]:
    """All distinct transvections over ``field``: ``q^(2m) - 1`` of them."""
    q = field.order
    seen = set()
    gens = []
    for code in range(1, q ** (2 * m)):
        u = [(code >> (field.e * i)) & (q - 1) for i in range(2 * m)]
        for lam in range(1, q):
            g = transvection(m, field, u, lam)
            if g.key not in seen:
                seen.add(g.key)
                gens.append(g)
    return gens


def group_closure(gens: Sequence[GroupElement], limit: int = 10**6) -> set[GroupElement]:
    """All products of the generators (breadth-first); refuses to exceed ``limit``."""
    if not gens:
        return set()
    n = gens[0].matrix.nrows
    ident = GroupElement(BinMatrix.identity(n, gens[0].field), check=False)
    seen = {ident}
    frontier = [ident]
    while frontier:
        nxt = []
        for h in frontier:
            for g in gens:
                gh = g @ h
                if gh not in seen:
                    seen.add(gh)
                    nxt.append(gh)
                    if len(seen) > limit:
                        raise OverflowError(f"group closure exceeds {limit} elements")
        frontier = nxt
    return seen


def frobenius_twist(g: GroupElement) -> GroupElement:
    """Entrywise Frobenius of the matrix on V."""
    return GroupElement(g.matrix.map_entries(g.field.frob_int))


def torus_element(m: int, field: FieldSpec, ts: Sequence[int]) -> GroupElement:
    """``diag(t_1, ..., t_m, t_m^-1, ..., t_1^-1)``."""
    diag = list(ts) + [field.inv_int(t) for t in reversed(ts)]
    n = 2 * m
    return GroupElement(BinMatrix.from_lists([[diag[i] if i == j else 0 for j in range(n)] for i in range(n)], field))


# -- action on divided powers ----------------------------------------------------


@functools.lru_cache(maxsize=None)
def _product_structure(n: int, a: int, c: int):
    """Sparse 0/1 matrix sending (i, j) pair index ``i*dim_c + j`` to the product monomial."""
    left, right = compositions(n, a), compositions(n, c)
    target = rank_table(n, a + c)
    P, Q, T = [], [], []
    for i, x in enumerate(left):
        for j, y in enumerate(right):
            if all(not (s & t) for s, t in zip(x, y)):
                P.append(i)
                Q.append(j)
                T.append(target[tuple(s + t for s, t in zip(x, y))])
    P, Q, T = np.array(P, dtype=np.intp), np.array(Q, dtype=np.intp), np.array(T, dtype=np.intp)
    S = sparse.csr_matrix((np.ones(len(T)), (T, np.arange(len(T)))), shape=(len(target), len(T)))
    return P, Q, S


def _split(mono: tuple[int, ...]) -> tuple[int, int]:
    """Variable index and power of two peeled off the first nonzero exponent."""
    for j, a in enumerate(mono):
        if a:
            return j, 1 << (a.bit_length() - 1)
    raise ValueError("degree-0 monomial has no split")


def _action_arrays(g: BinMatrix, max_degree: int) -> list[np.ndarray]:
    field = g.field
    n = g.nrows
    basis = general_basis(n)
    mt = field.mul_table
    gcols = g.columns()
    pk = packing(field, n)
    images = [pk.unpack(c) for c in gcols]
    out = [np.ones((1, 1), dtype=np.uint8)]
    # pure powers v_j^(2^b) computed directly
    pure: dict[tuple[int, int], np.ndarray] = {}
    for d in range(1, max_degree + 1):
        monos = compositions(n, d)
        idx = rank_table(n, d)
        A = np.zeros((len(monos), len(monos)), dtype=np.uint8)
        groups: dict[int, list[tuple[int, int, int]]] = {}
        for col, mono in enumerate(monos):
            j, p = _split(mono)
            if p == d:
                elt = divided_power_of_vector(images[j], d, basis, field)
                for mk, c in elt.terms.items():
                    A[idx[mk], col] = c
                pure[(j, d)] = A[:, col].copy()
            else:
                rest = list(mono)
                rest[j] -= p
                groups.setdefault(p, []).append((col, j, rank_table(n, d - p)[tuple(rest)]))
        for p, items in groups.items():
            cols = np.array([it[0] for it in items])
            X = np.stack([pure[(it[1], p)] for it in items], axis=1)
            Y = out[d - p][:, [it[2] for it in items]]
            P, Q, S = _product_structure(n, p, d - p)
            vals = mt[X[P, :], Y[Q, :]]
            res = np.zeros((len(monos), len(items)), dtype=np.uint8)
            for b in range(field.e):
                plane = ((vals >> b) & 1).astype(np.float64)
                res |= ((np.rint(S @ plane).astype(np.int64) & 1) << b).astype(np.uint8)
            A[:, cols] = res
        out.append(A)
    return out


def action_matrix(g: GroupElement, k: int) -> BinMatrix:
    """Matrix of ``g`` on D_k V in the ranked monomial basis."""
    return BinMatrix.from_array(g.action_array(k), g.field)


def action_matrix_reference(g: GroupElement, k: int) -> BinMatrix:
    """Same matrix via the generic substitution action, one basis monomial at a time."""
    field = g.field
    basis = symplectic_basis(g.m)
    images = [packing(field, g.matrix.nrows).unpack(c) for c in g.matrix.columns()]
    cols = [
        substitution_action(images, AlgebraElement.monomial(basis, field, mono)).to_vector()
        for mono in compositions(basis.n, k)
    ]
    return BinMatrix.from_columns(len(cols), field, cols)


def _array_columns(A: np.ndarray, field: FieldSpec) -> list[int]:
    return BinMatrix.from_array(np.ascontiguousarray(A.T), field).rows


def induced_cohomology_action(g: GroupElement, m: int, degree: int, field: FieldSpec) -> BinMatrix:
    """Matrix of ``g`` on H^degree in the canonical basis of class representatives."""
    data = cohomology_data(m, degree, field)
    if not data.reps:
        raise ValueError(f"H^{degree} vanishes for m={m}")
    idx = rank_table(2 * m, degree)
    A = g.action_array(degree)
    sub = A[:, [idx[r] for r in data.reps]]
    cols = [data.coordinates(v) for v in _array_columns(sub, field)]
    return BinMatrix.from_columns(len(data.reps), field, cols)


# -- modules, spinning, irreducibility -------------------------------------------


@dataclass
class ModuleInstance:
    dim: int
    field: FieldSpec
    generators: list[BinMatrix]
    weights: list[Weight] | None = None

    def __post_init__(self):
        for g in self.generators:
            if g.shape != (self.dim, self.dim) or g.field != self.field:
                raise ValueError("generator matrices must be square of the module dimension")
            if rank(g) != self.dim:
                raise ValueError("generator matrix is singular")
        if self.weights is not None and len(self.weights) != self.dim:
            raise ValueError("one weight per basis vector required")


def spin(seed: int, M: ModuleInstance) -> Subspace:
    """Smallest subspace containing ``seed`` and stable under every generator."""
    if not seed:
        raise ValueError("seed must be nonzero")
    ech = Echelon(M.field, M.dim)
    queue = [ech.insert(seed)]
    while queue:
        v = queue.pop()
        for g in M.generators:
            r = ech.insert(g.apply(v))
            if r:
                queue.append(r)
                if len(ech) == M.dim:
                    return Subspace.full(M.field, M.dim)
    return ech.to_subspace()


def is_invariant(S: Subspace, M: ModuleInstance) -> bool:
    return all(S.contains(g.apply(r)) for g in M.generators for r in S.rows)


@dataclass
class IrreducibilityVerdict:
    irreducible: bool
    mode: str
    seeds_checked: int
    orbits: int | None = None
    witness: Subspace | None = None
    rng_seed: int | None = None

    @property
    def label(self) -> str:
        if not self.irreducible:
            return "reducible"
        return "irreducible" if self.mode == "exhaustive" else "irreducible-up-to-sampling"

    def to_dict(self) -> dict:
        d = {"verdict": self.label, "mode": self.mode, "seeds_checked": self.seeds_checked}
        if self.orbits is not None:
            d["orbits"] = self.orbits
        if self.rng_seed is not None:
            d["rng_seed"] = self.rng_seed
        if self.witness is not None:
            pk = packing(self.witness.field, self.witness.dim)
            d["witness"] = [pk.unpack(r) for r in self.witness.rows]
        return d


def _code_maps(M: ModuleInstance) -> list[np.ndarray]:
    """Each generator (and scalar multiplication) as a permutation of all q^dim packed vectors."""
    field = M.field
    nbits = M.dim * field.e
    N = 1 << nbits
    codes = np.arange(N, dtype=np.int64)
    linear = list(M.generators)
    if field.e > 1:
        pk = packing(field, M.dim)
        g0 = field.gen.bits
        linear.append(BinMatrix(M.dim, M.dim, field, [pk.scale(g0, pk.unit(j)) for j in range(M.dim)]))
    maps = []
    for g in linear:
        # images of single bits, then byte-wise lookup tables
        bit_images = [g.apply(1 << pos) for pos in range(nbits)]
        img = np.zeros(N, dtype=np.int64)
        for start in range(0, nbits, 8):
            chunk = bit_images[start : start + 8]
            table = np.zeros(1 << len(chunk), dtype=np.int64)
            for i, v in enumerate(chunk):
                table[1 << i : 1 << (i + 1)] = table[: 1 << i] ^ v
            img ^= table[(codes >> start) & ((1 << len(chunk)) - 1)]
        maps.append(img)
        inv = np.empty_like(img)
        inv[img] = codes
        maps.append(inv)
    return maps


def _orbit_labels(M: ModuleInstance) -> np.ndarray:
    maps = _code_maps(M)
    labels = np.arange(1 << (M.dim * M.field.e), dtype=np.int64)
    while True:
        new = labels.copy()
        for p in maps:
            np.minimum(new, labels[p], out=new)
        while True:
            jumped = new[new]
            if np.array_equal(jumped, new):
                break
            new = jumped
        if np.array_equal(new, labels):
            return labels
        labels = new


def is_irreducible(
    M: ModuleInstance,
    mode: str = "exhaustive",
    samples: int = 1000,
    seed: int = 0,
    extra_seeds: Sequence[int] = (),
) -> IrreducibilityVerdict:
    """Decide irreducibility under the generators by spinning vectors.

    Exhaustive mode covers every nonzero vector: spin dimension is constant
    on orbits of the generated group and of scalar multiplication, so one
    spin per orbit decides all of them.
    """
    if M.dim == 0:
        raise ValueError("zero module")
    if mode == "exhaustive":
        if M.field.order**M.dim > EXHAUSTIVE_CAP:
            raise ValueError(
                f"q^dim = {M.field.order}^{M.dim} exceeds {EXHAUSTIVE_CAP}; use randomized mode"
            )
        labels = _orbit_labels(M)
        reps = np.unique(labels[1:])
        for r in reps:
            S = spin(int(r), M)
            if S.rank < M.dim:
                return IrreducibilityVerdict(False, mode, len(labels) - 1, len(reps), S)
        return IrreducibilityVerdict(True, mode, len(labels) - 1, len(reps))
    if mode != "randomized":
        raise ValueError(f"unknown mode {mode!r}")
    rng = random.Random(seed)
    pk = packing(M.field, M.dim)
    seeds = [pk.unit(j) for j in range(M.dim)] + list(extra_seeds)
    top = M.field.order**M.dim
    seeds += [rng.randrange(1, top) for _ in range(samples)]
    for s in seeds:
        S = spin(s, M)
        if S.rank < M.dim:
            return IrreducibilityVerdict(False, mode, len(seeds), witness=S, rng_seed=seed)
    return IrreducibilityVerdict(True, mode, len(seeds), rng_seed=seed)


# -- weights --------------------------------------------------------------------


def fundamental_weight(m: int, i: int) -> Weight:
    """``omega_i = eps_1 + ... + eps_i``."""
    return tuple(1 if j < i else 0 for j in range(m))


def dominates(lam: Weight, mu: Weight) -> bool:
    """``lam - mu`` is a non-negative integer combination of the simple roots
    ``eps_i - eps_(i+1)`` and ``2 eps_m``."""
    d = [a - b for a, b in zip(lam, mu)]
    partial = list(itertools.accumulate(d))
    return all(s >= 0 for s in partial[:-1]) and partial[-1] >= 0 and partial[-1] % 2 == 0


def highest_weight(weights: Sequence[Weight]) -> Weight | None:
    """The unique weight dominating all others, or None if there is none."""
    distinct = sorted(set(map(tuple, weights)))
    tops = [lam for lam in distinct if all(dominates(lam, mu) for mu in distinct)]
    return tops[0] if len(tops) == 1 else None


def cohomology_module(m: int, degree: int, field: FieldSpec, gens: Sequence[GroupElement] | None = None) -> ModuleInstance:
    """H^degree with the induced action of the transvection generators and canonical weights."""
    gens = symplectic_generators(m, field) if gens is None else gens
    data = cohomology_data(m, degree, field)
    basis = symplectic_basis(m)
    mats = [induced_cohomology_action(g, m, degree, field) for g in gens]
    return ModuleInstance(len(data.reps), field, mats, [weight(r, basis) for r in data.reps])
