from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from sextic_cm import linalg
from sextic_cm.abgroup import kernel_lattice, smith_decompose, subgroup_quotient
from sextic_cm.errors import InfiniteQuotient

small = st.integers(-20, 20)


def matrices(rows, cols):
    return st.lists(st.lists(small, min_size=cols, max_size=cols), min_size=rows, max_size=rows)


def unimodular(n):
    """Random products of elementary integer matrices."""
    steps = st.lists(st.tuples(st.integers(0, n - 1), st.integers(0, n - 1), st.integers(-3, 3)), max_size=12)

    def build(ops):
        U = linalg.identity(n)
        for i, j, c in ops:
            if i != j:
                U[i] = [a + c * b for a, b in zip(U[i], U[j])]
        return U

    return steps.map(build)


@settings(max_examples=60, deadline=None)
@given(matrices(4, 4), unimodular(4))
def test_hnf_is_invariant_under_row_operations(A, U):
    if linalg.det_bareiss(A) == 0:
        return
    assert linalg.hnf(A, 4) == linalg.hnf(linalg.matmul(U, A), 4)


@settings(max_examples=60, deadline=None)
@given(matrices(4, 4))
def test_hnf_shape(A):
    H = linalg.hnf(A, 4)
    for i, r in enumerate(H):
        piv = next(j for j, x in enumerate(r) if x)
        assert r[piv] > 0
        for k in range(i):
            assert 0 <= H[k][piv] < r[piv]
    if linalg.det_bareiss(A):
        assert abs(linalg.det_bareiss(A)) == linalg.det_bareiss(H)


@settings(max_examples=60, deadline=None)
@given(matrices(3, 4))
def test_smith_transforms(A):
    d, U, V = linalg.smith(A)
    D = linalg.matmul(linalg.matmul(U, A), V)
    for i, r in enumerate(D):
        for j, x in enumerate(r):
            assert x == (d[i] if i == j else 0)
    nz = [x for x in d if x]
    assert all(b % a == 0 for a, b in zip(nz, nz[1:]))
    assert abs(linalg.det_bareiss(U)) == 1 and abs(linalg.det_bareiss(V)) == 1


def test_smith_decompose_examples():
    G = smith_decompose([[2, 0], [0, 3]])
    assert G.invariants == [6] and G.order == 6
    G = smith_decompose([[2, 0], [0, 4]])
    assert G.invariants == [2, 4]
    with pytest.raises(InfiniteQuotient):
        smith_decompose([[1, 1]], m=2)


@settings(max_examples=40, deadline=None)
@given(st.lists(st.integers(1, 6), min_size=1, max_size=3), st.data())
def test_dlog_is_a_homomorphism(orders, data):
    G = smith_decompose([[o if i == j else 0 for j in range(len(orders))] for i, o in enumerate(orders)])
    n = 1
    for o in orders:
        n *= o
    assert G.order == n
    x = data.draw(st.lists(small, min_size=len(orders), max_size=len(orders)))
    y = data.draw(st.lists(small, min_size=len(orders), max_size=len(orders)))
    s = [a + b for a, b in zip(x, y)]
    assert G.dlog(s) == G.add(G.dlog(x), G.dlog(y))
    assert G.dlog(G.lift(G.dlog(x))) == G.dlog(x)
    assert len(list(G.elements())) == G.order


def test_subgroup_quotient_and_kernel():
    # Z^2 / 4Z^2 inside Z^2 / 2Z x Z
    Q, _ = subgroup_quotient([[2, 0], [0, 1]], [[4, 0], [0, 4]], 2)
    assert Q.invariants == [2, 4]
    target = smith_decompose([[2]])
    L = kernel_lattice([(1,), (0,)], target, [[4, 0], [0, 4]])
    assert linalg.lattice_contains(L, [2, 0]) and linalg.lattice_contains(L, [0, 1])
    assert not linalg.lattice_contains(L, [1, 0])


@settings(max_examples=30, deadline=None)
@given(st.lists(st.lists(st.integers(-6, 6), min_size=3, max_size=3), min_size=3, max_size=3))
def test_lll_gram_is_unimodular_and_short(B):
    if linalg.det_bareiss(B) == 0:
        return
    G = linalg.matmul(B, linalg.transpose(B))
    T, R = linalg.lll_gram(G)
    assert abs(linalg.det_bareiss(T)) == 1
    assert R == linalg.matmul(linalg.matmul(T, G), linalg.transpose(T))
    assert R[0][0] <= min(G[i][i] for i in range(3))


def test_short_vectors_exact():
    G = [[2, 1], [1, 2]]  # A2 lattice: 3 vectors of norm 2 up to sign
    vs = linalg.short_vectors(G, 2)
    assert len(vs) == 3
    assert all(n == 2 for n, _ in vs)
    out = linalg.short_vectors([[Fraction(1, 2)]], Fraction(1, 2))
    assert [list(v) for _, v in out] in ([[1]], [[-1]])
