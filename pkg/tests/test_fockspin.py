from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from twisted_sutherland.fockspin import (
    SubspaceNotPreserved,
    apply_word,
    dim_invariant,
    fock_space,
    generator_matrix,
    invariant_basis,
    invariant_basis_bruteforce,
    ladder_matrix,
    restrict_to_invariant,
    spin_operator,
    symmetrize,
)


def as_float(m):
    return np.array([[float(x) for x in row] for row in m])


def test_dimension_examples():
    assert dim_invariant(5, 5) == 6
    assert dim_invariant(6, 4) == 6
    assert dim_invariant(4, 3) == 0
    assert dim_invariant(3, 4) == 3


@given(st.integers(3, 8), st.integers(0, 8))
def test_dimension_formula_matches_enumeration(N, k):
    assert dim_invariant(N, k) == len(invariant_basis_bruteforce(N, k)) == invariant_basis(N, k).dim


@pytest.mark.parametrize("N,k", [(3, 2), (4, 2), (5, 3), (6, 4)])
def test_invariant_subspace_is_common_kernel(N, k):
    """Kernel of rho'(E_ii - E_jj) over mirror pairs, by exact rank."""
    space = fock_space(N, k)
    stack = []
    for i in range(N // 2):
        X = np.zeros((N, N), dtype=np.int64)
        X[i, i], X[N - 1 - i, N - 1 - i] = 1, -1
        stack.append(generator_matrix(N, k, X))
    kernel_dim = space.dim - np.linalg.matrix_rank(np.vstack(stack).astype(float))
    assert kernel_dim == dim_invariant(N, k)
    for occ in invariant_basis(N, k).occupations:
        v = np.zeros(space.dim)
        v[space.index[occ]] = 1
        assert not np.any(np.vstack(stack) @ v)


@given(st.integers(2, 4), st.integers(0, 3), st.data())
def test_ladder_operators_satisfy_gl_relations(N, k, data):
    i, j, a, b = (data.draw(st.integers(0, N - 1)) for _ in range(4))
    space = fock_space(N, k)
    lhs = ladder_matrix(space, i, j) @ ladder_matrix(space, a, b) - ladder_matrix(space, a, b) @ ladder_matrix(
        space, i, j
    )
    rhs = np.zeros_like(lhs)
    if j == a:
        rhs += ladder_matrix(space, i, b)
    if i == b:
        rhs -= ladder_matrix(space, a, j)
    assert np.array_equal(lhs, rhs)


def test_apply_word_counts_factors():
    # a_0 a_0 (a_0^+)^2 |0> = 2 |0>
    out = apply_word([("a", 0), ("a", 0), ("c", 0), ("c", 0)], {(0, 0): 1})
    assert out == {(0, 0): 2}


def test_spin_operator_examples():
    assert spin_operator(3, 1, "C", 1).matrix.tolist() == [[1]]
    assert spin_operator(3, 1, "D", 1).matrix.tolist() == [[0]]
    assert spin_operator(3, 1, "A", 1, 1).matrix.tolist() == [[0]]
    assert spin_operator(4, 2, "A", 1, 2).matrix.tolist() == [[1, 0], [0, 1]]
    assert spin_operator(4, 2, "B", 1, 2).matrix.tolist() == [[0, -1], [-1, 0]]
    d = spin_operator(3, 2, "D", 1)
    assert d.matrix.tolist() == [[0, 1], [2, 0]]
    assert np.allclose(d.symmetric(), [[0, np.sqrt(2)], [np.sqrt(2), 0]])


@pytest.mark.parametrize("N,k", [(4, 4), (5, 3), (6, 4), (7, 2)])
def test_spin_operators_symmetric_in_orthonormal_basis(N, k):
    basis = invariant_basis(N, k)
    n = N // 2
    ops = [spin_operator(N, k, "A", i, j) for i in range(1, n + 1) for j in range(i, n + 1)]
    ops += [spin_operator(N, k, "B", i, j) for i in range(1, n + 1) for j in range(i + 1, n + 1)]
    if N % 2:
        ops += [spin_operator(N, k, lab, i) for lab in "CD" for i in range(1, n + 1)]
    s = np.sqrt(np.array(basis.norms_sq(), dtype=float))
    for op in ops:
        raw = s[:, None] * as_float(op.matrix) / s[None, :]
        assert np.allclose(raw, raw.T, atol=1e-12), op.label


def test_b_operator_from_generators():
    """B_12 = -(a1+ a4+ a2 a3 + h.c.) rebuilt from rho'(E_12) rho'(E_43)."""
    N, k = 4, 2

    def E(a, b):
        m = np.zeros((N, N), dtype=np.int64)
        m[a, b] = 1
        return m

    words = generator_matrix(N, k, E(0, 1)) @ generator_matrix(N, k, E(3, 2))
    words = words + words.T
    b = spin_operator(N, k, "B", 1, 2)
    assert np.array_equal(restrict_to_invariant(N, k, words).astype(object), -b.matrix)


def test_restriction_detects_leaks():
    X = np.zeros((3, 3), dtype=np.int64)
    X[0, 1] = 1
    with pytest.raises(SubspaceNotPreserved) as info:
        restrict_to_invariant(3, 2, generator_matrix(3, 2, X))
    assert info.value.witness is not None


def test_symmetrize_is_similarity():
    m = np.array([[Fraction(0), Fraction(1)], [Fraction(2), Fraction(0)]], dtype=object)
    sym = symmetrize(m, (2, 1))  # self-adjoint for <e_i, e_j> = norms_i delta_ij
    assert np.allclose(np.linalg.eigvalsh(sym), sorted(np.linalg.eigvals(as_float(m)).real))


def test_invalid_spin_labels():
    with pytest.raises(ValueError):
        spin_operator(4, 2, "C", 1)
    with pytest.raises(ValueError):
        spin_operator(5, 2, "B", 1, 1)
    with pytest.raises(ValueError):
        invariant_basis(2, 2)
