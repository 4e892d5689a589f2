from __future__ import annotations

import os

import numpy as np
import pytest
from hypothesis import given, strategies as st

from dp2.complexes import differential_matrix
from dp2.field import gf
from dp2.linalg import (
    KIND_IMAGE,
    KIND_KERNEL,
    BinMatrix,
    CoordinateSolver,
    Subspace,
    cache_path,
    coset_reduce,
    dense_rank,
    dense_rref,
    gf_matmul,
    image_basis,
    kernel_basis,
    load_subspace,
    packing,
    rank,
    rref,
    save_subspace,
    subspace_equal,
)
from oracles import matmul_ref, rank_ref


@st.composite
def matrices(draw, max_e=4, max_side=9):
    e = draw(st.integers(1, max_e))
    nr = draw(st.integers(1, max_side))
    nc = draw(st.integers(1, max_side))
    q = 1 << e
    # bias towards zeros so that low ranks show up
    entry = st.one_of(st.just(0), st.integers(0, q - 1))
    rows = draw(st.lists(st.lists(entry, min_size=nc, max_size=nc), min_size=nr, max_size=nr))
    return BinMatrix.from_lists(rows, gf(e))


def test_packing_round_trip():
    F = gf(3)
    pk = packing(F, 5)
    coords = [0, 7, 1, 0, 5]
    v = pk.pack(coords)
    assert pk.unpack(v) == coords
    assert pk.lead(v) == (1, 7)
    assert list(pk.support(v)) == [(1, 7), (2, 1), (4, 5)]
    assert pk.unpack(pk.scale(F.gen.bits, v)) == [F.mul_int(2, c) for c in coords]


def test_identity_rank_and_kernel():
    F = gf(1)
    I = BinMatrix.identity(4, F)
    assert rank(I) == 4
    assert kernel_basis(I).rank == 0
    assert image_basis(I) == Subspace.full(F, 4)


def test_zero_differential_m1():
    # d_1 on D_1 V for m = 1 is zero
    M = differential_matrix(1, 1, gf(1))
    assert M.shape == (4, 2)
    assert M.is_zero()
    assert kernel_basis(M).rank == 2


def test_d2_for_m2():
    M = differential_matrix(2, 2, gf(1))
    assert M.shape == (35, 10)
    assert rank(M) == 5
    assert kernel_basis(M).rank == 5


def test_example_rref():
    F = gf(1)
    M = BinMatrix.from_lists([[1, 1, 0], [0, 1, 1], [1, 0, 1]], F)
    S, r = rref(M)
    assert r == 2
    assert [packing(F, 3).unpack(x) for x in S.rows] == [[1, 0, 1], [0, 1, 1]]
    assert S.pivots == (0, 1)


def test_coset_reduce_and_equality():
    F = gf(2)
    pk = packing(F, 3)
    S = Subspace.span(F, 3, [pk.pack([1, 2, 0])])
    v = pk.pack([3, 1, 1])
    w = v ^ pk.scale(3, pk.pack([1, 2, 0]))
    assert coset_reduce(S, v) == coset_reduce(S, w)
    assert coset_reduce(S, v) & pk.cmask == 0
    T = Subspace.span(F, 3, [pk.pack([2, 3, 0])])  # g * (1, g, 0)
    assert subspace_equal(S, T)
    assert not subspace_equal(S, Subspace.span(F, 3, [pk.pack([1, 3, 0])]))
    with pytest.raises(ValueError):
        subspace_equal(S, Subspace.zero(F, 4))


@given(matrices())
def test_rank_matches_oracle(M):
    assert rank(M) == rank_ref(M.tolist(), M.field.modulus) == dense_rank(M.field, M.to_array())


@given(matrices())
def test_rank_nullity(M):
    assert rank(M) + kernel_basis(M).rank == M.ncols
    assert image_basis(M).rank == rank(M)


@given(matrices())
def test_kernel_vectors_are_annihilated(M):
    for v in kernel_basis(M).rows:
        assert M.apply(v) == 0


@given(matrices())
def test_packed_rref_equals_dense_rref(M):
    S, _ = rref(M)
    D, pivots = dense_rref(M.field, M.to_array())
    assert list(S.pivots) == pivots
    assert BinMatrix(S.rank, M.ncols, M.field, S.rows).to_array().tolist() == D.tolist()


@given(matrices(), st.data())
def test_rref_is_canonical(M, data):
    # an invertible row operation sequence leaves the reduced form unchanged
    F = M.field
    pk = packing(F, M.ncols)
    rows = list(M.rows)
    for _ in range(data.draw(st.integers(0, 6))):
        i = data.draw(st.integers(0, len(rows) - 1))
        j = data.draw(st.integers(0, len(rows) - 1))
        c = data.draw(st.integers(1, F.order - 1))
        if i != j:
            rows[i] ^= pk.scale(c, rows[j])
        else:
            rows[i] = pk.scale(c, rows[i])
    S1, _ = rref(M)
    S2, _ = rref(BinMatrix(M.nrows, M.ncols, F, rows))
    assert S1 == S2
    assert rref(S1.basis_matrix())[0] == S1


@given(matrices(max_side=6), st.data())
def test_matmul_against_oracle(A, data):
    F = A.field
    p = data.draw(st.integers(1, 6))
    B = BinMatrix.from_lists(
        data.draw(st.lists(st.lists(st.integers(0, F.order - 1), min_size=p, max_size=p), min_size=A.ncols, max_size=A.ncols)), F
    )
    want = matmul_ref(A.tolist(), B.tolist(), F.modulus)
    assert (A @ B).tolist() == want
    assert gf_matmul(F, A.to_array(), B.to_array()).tolist() == want


@given(matrices())
def test_array_round_trip_and_transpose(M):
    assert BinMatrix.from_array(M.to_array(), M.field) == M
    assert M.T.T == M
    assert M.T.tolist() == [list(r) for r in zip(*M.tolist())]


@given(matrices(max_side=7))
def test_coordinate_solver(M):
    F = M.field
    vectors = list(image_basis(M).rows)
    solver = CoordinateSolver(F, M.nrows, vectors)
    assert solver.independent
    pk_coords = packing(F, len(vectors))
    for col in M.columns():
        c = solver.solve(col)
        assert c is not None
        acc = 0
        pk = packing(F, M.nrows)
        for i, ci in pk_coords.support(c):
            acc ^= pk.scale(ci, vectors[i])
        assert acc == col


def test_solver_rejects_outside_span():
    F = gf(1)
    pk = packing(F, 3)
    solver = CoordinateSolver(F, 3, [pk.pack([1, 0, 0])])
    assert solver.solve(pk.pack([0, 1, 0])) is None


def test_kron():
    F = gf(2)
    A = BinMatrix.from_lists([[1, 2], [0, 3]], F)
    B = BinMatrix.from_lists([[2, 1]], F)
    K = A.kron(B)
    assert K.tolist() == [[2, 1, F.mul_int(2, 2), 2], [0, 0, F.mul_int(3, 2), 3]]


def test_malformed_inputs():
    F = gf(1)
    with pytest.raises(ValueError):
        BinMatrix.from_lists([[1, 2]], F)
    with pytest.raises(ValueError):
        BinMatrix.from_lists([[1, 0], [1]], F)
    with pytest.raises(ValueError):
        Subspace.zero(F, 2).reduce(0b100)
    with pytest.raises(ValueError):
        BinMatrix.identity(2, F) @ BinMatrix.identity(3, F)


# -- cache ---------------------------------------------------------------------


@pytest.mark.parametrize("e", [1, 2])
def test_cache_round_trip(tmp_path, e):
    F = gf(e)
    K = kernel_basis(differential_matrix(2, 4, F))
    path = cache_path(tmp_path, KIND_KERNEL, 2, 4, F)
    save_subspace(path, K, KIND_KERNEL, 2, 4)
    assert load_subspace(path, F, KIND_KERNEL, 2, 4) == K


def test_cache_rejects_mismatch_and_corruption(tmp_path):
    F = gf(1)
    K = kernel_basis(differential_matrix(2, 4, F))
    path = cache_path(tmp_path, KIND_KERNEL, 2, 4, F)
    save_subspace(path, K, KIND_KERNEL, 2, 4)
    assert load_subspace(path, F, KIND_IMAGE, 2, 4) is None
    assert load_subspace(path, F, KIND_KERNEL, 2, 6) is None
    assert load_subspace(path, gf(2), KIND_KERNEL, 2, 4) is None
    data = bytearray(open(path, "rb").read())
    data[40] ^= 0xFF
    open(path, "wb").write(bytes(data))
    assert load_subspace(path, F, KIND_KERNEL, 2, 4) is None
    open(path, "wb").write(b"DP2S")
    assert load_subspace(path, F, KIND_KERNEL, 2, 4) is None
    assert load_subspace(os.path.join(tmp_path, "missing.bin"), F, KIND_KERNEL, 2, 4) is None


def test_cache_rejects_other_version(tmp_path):
    import struct
    import zlib

    F = gf(1)
    K = kernel_basis(differential_matrix(1, 3, F))
    path = cache_path(tmp_path, KIND_KERNEL, 1, 3, F)
    save_subspace(path, K, KIND_KERNEL, 1, 3)
    body = bytearray(open(path, "rb").read()[:-4])
    struct.pack_into("<H", body, 4, 99)
    open(path, "wb").write(bytes(body) + struct.pack("<I", zlib.crc32(bytes(body))))
    assert load_subspace(path, F, KIND_KERNEL, 1, 3) is None
