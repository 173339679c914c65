import itertools

import pytest
from hypothesis import given, settings, strategies as st

from cotlab.linalg import (
    DimensionMismatch,
    FpMatrix,
    SubspaceBasis,
    hstack,
    kernel_basis,
    quotient_space,
    row_reduce,
    solve_linear,
    span_basis,
)


def mat(p, rows, cols=None):
    return FpMatrix(p, rows, cols=cols)


# -- rowReduce ---------------------------------------------------------------


def test_rref_empty_matrix():
    rank, rref, pivots = row_reduce(FpMatrix.zeros(2, 0, 0))
    assert rank == 0 and pivots == ()


def test_rref_identity_gf2():
    rank, rref, pivots = row_reduce(FpMatrix.identity(2, 3))
    assert rank == 3
    assert pivots == (0, 1, 2)
    assert rref == FpMatrix.identity(2, 3)


def test_rref_rank_one_gf2():
    # hand row-reduction: r2 <- r2 - r1
    rank, rref, pivots = row_reduce(mat(2, [[1, 1], [1, 1]]))
    assert rank == 1
    assert rref == mat(2, [[1, 1], [0, 0]])
    assert pivots == (0,)


def test_rref_gf3_scaling():
    # det = 2*2 - 1*1 = 3 = 0 mod 3, so rank 1; pivot row normalized by inv(2) = 2
    rank, rref, pivots = row_reduce(mat(3, [[2, 1], [1, 2]]))
    assert rank == 1
    assert rref == mat(3, [[1, 2], [0, 0]])
    rank2, rref2, _ = row_reduce(mat(3, [[2, 1], [1, 1]]))
    assert rank2 == 2 and rref2 == FpMatrix.identity(3, 2)


# -- solveLinear -------------------------------------------------------------


def test_solve_identity():
    i2 = FpMatrix.identity(2, 2)
    assert solve_linear(i2, i2) == i2


def test_solve_free_variables_pinned():
    # enumerate all 4 candidate X over GF(2): solutions are [[0],[0]] and [[1],[1]]
    a = mat(2, [[1, 1]])
    b = mat(2, [[0]])
    sols = [
        x
        for x in itertools.product([0, 1], repeat=2)
        if (x[0] + x[1]) % 2 == 0
    ]
    assert sols == [(0, 0), (1, 1)]
    x = solve_linear(a, b)
    assert x == mat(2, [[0], [0]])


def test_solve_inconsistent():
    a = FpMatrix.zeros(2, 2, 1)
    b = mat(2, [[1], [0]])
    assert solve_linear(a, b) is None


def test_solve_dimension_mismatch():
    with pytest.raises(DimensionMismatch):
        solve_linear(FpMatrix.zeros(2, 2, 1), FpMatrix.zeros(2, 3, 1))


# -- kernelBasis -------------------------------------------------------------


def test_kernel_injective():
    kb = kernel_basis(FpMatrix.identity(2, 2))
    assert kb.ambient_dim == 2 and kb.dim == 0


def test_kernel_zero_map():
    kb = kernel_basis(FpMatrix.zeros(2, 1, 2))
    assert kb.dim == 2


def test_kernel_sum_map_gf2():
    # enumerate 4 vectors: kernel of [1 1] is {(0,0),(1,1)}
    kb = kernel_basis(mat(2, [[1, 1]]))
    assert kb.dim == 1
    assert kb.basis == mat(2, [[1, 1]])


# -- quotientSpace -----------------------------------------------------------


def test_quotient_by_zero_subspace():
    s = SubspaceBasis(3, FpMatrix.zeros(2, 0, 3))
    proj, sec = quotient_space(3, s)
    assert proj == FpMatrix.identity(2, 3)
    assert (proj @ sec) == FpMatrix.identity(2, 3)


def test_quotient_by_full_space():
    s = SubspaceBasis(2, FpMatrix.identity(2, 2))
    proj, sec = quotient_space(2, s)
    assert proj.rows == 0 and proj.cols == 2


def test_quotient_kernel_by_enumeration():
    s = SubspaceBasis(2, mat(2, [[1, 1]]))
    proj, sec = quotient_space(2, s)
    assert proj.rows == 1
    killed = [
        v
        for v in itertools.product([0, 1], repeat=2)
        if (proj @ FpMatrix.column(2, v)).is_zero()
    ]
    assert killed == [(0, 0), (1, 1)]
    assert (proj @ sec) == FpMatrix.identity(2, 1)


def test_quotient_rejects_rank_deficient():
    with pytest.raises(ValueError):
        quotient_space(2, SubspaceBasis(2, mat(2, [[1, 1], [1, 1]])))


# -- property tests ----------------------------------------------------------


def small_matrices(p):
    return st.integers(min_value=0, max_value=3).flatmap(
        lambda r: st.integers(min_value=0, max_value=3).flatmap(
            lambda c: st.lists(
                st.lists(st.integers(min_value=0, max_value=p - 1), min_size=c, max_size=c),
                min_size=r,
                max_size=r,
            ).map(lambda rows: FpMatrix(p, rows, cols=c))
        )
    )


@settings(max_examples=150, deadline=None)
@given(st.sampled_from([2, 3, 5]).flatmap(small_matrices))
def test_rref_idempotent_and_rank(m):
    rank, rref, pivots = row_reduce(m)
    assert rank == len(pivots)
    rank2, rref2, pivots2 = row_reduce(rref)
    assert rref2 == rref and pivots2 == pivots
    assert rank == rref.rank()


@settings(max_examples=150, deadline=None)
@given(st.sampled_from([2, 3]).flatmap(small_matrices))
def test_rank_nullity(m):
    kb = kernel_basis(m)
    assert kb.dim == m.cols - m.rank()
    if kb.dim and m.rows:
        assert (m @ kb.basis.transpose()).is_zero()


@settings(max_examples=100, deadline=None)
@given(st.sampled_from([2, 3]).flatmap(small_matrices))
def test_solve_matches_brute_force(m):
    # brute force: does any X solve m @ X = b for b = image of ones vector?
    if m.cols == 0 or m.rows == 0:
        return
    ones = FpMatrix.column(m.p, [1] * m.cols)
    b = m @ ones
    x = solve_linear(m, b)
    assert x is not None
    assert (m @ x) == b


@settings(max_examples=100, deadline=None)
@given(st.sampled_from([2, 3]).flatmap(small_matrices))
def test_solve_none_means_no_solution(m):
    if m.rows == 0 or m.cols > 3 or m.rows > 3:
        return
    p = m.p
    target = FpMatrix.column(p, [1] + [0] * (m.rows - 1))
    x = solve_linear(m, target)
    if x is None:
        for cand in itertools.product(range(p), repeat=m.cols):
            assert (m @ FpMatrix.column(p, cand)) != target
    else:
        assert (m @ x) == target


@settings(max_examples=80, deadline=None)
@given(st.sampled_from([2, 3]).flatmap(small_matrices))
def test_quotient_rank_nullity(m):
    sb = span_basis(m.p, [list(r) for r in m.entries], m.cols)
    proj, sec = quotient_space(m.cols, sb)
    assert proj.rows == m.cols - sb.dim
    assert (proj @ sec) == FpMatrix.identity(m.p, proj.rows)
    # projection kills exactly the span
    for row in sb.basis.entries:
        assert (proj @ FpMatrix.column(m.p, row)).is_zero()


def test_gf2_and_generic_paths_agree():
    # the packed GF(2) eliminator must match the generic one bit for bit
    import random

    rng = random.Random(7)
    for _ in range(200):
        r = rng.randrange(0, 5)
        c = rng.randrange(0, 5)
        rows = [[rng.randrange(2) for _ in range(c)] for _ in range(r)]
        m = FpMatrix(2, rows, cols=c)
        from cotlab.linalg import _rref_generic, _rref_gf2

        if r == 0 or c == 0:
            continue
        rank_g, rows_g, piv_g = _rref_generic(2, rows)
        rank_b, rows_b, piv_b = _rref_gf2(rows, c)
        assert rank_g == rank_b
        assert rows_g == rows_b
        assert piv_g == piv_b


def test_matmul_edge_cases():
    a = FpMatrix.zeros(2, 0, 3)
    b = FpMatrix.zeros(2, 3, 2)
    assert (a @ b).rows == 0
    c = FpMatrix.zeros(2, 2, 0)
    d = FpMatrix.zeros(2, 0, 4)
    assert (c @ d) == FpMatrix.zeros(2, 2, 4)


def test_hstack_kron():
    a = mat(2, [[1, 0], [0, 1]])
    b = mat(2, [[1], [1]])
    assert hstack(a, b) == mat(2, [[1, 0, 1], [0, 1, 1]])
    k = b.kron(b)
    assert k == mat(2, [[1], [1], [1], [1]])
