from __future__ import annotations

import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from permlab import oracles
from permlab.determinants import (
    AlgebraMatrix,
    cayley_det,
    scalar_det,
    sdet_exact,
    sdet_sampled,
    sdet_sampled_terms,
    supported_permutations,
    sym_prod,
)
from permlab.errors import InvalidInputError, ResourceLimitError
from permlab.linalg import RngStream, sample_gaussian


def gaussian_matrix(rng, n, d, density=1.0):
    cells = sample_gaussian(d, rng, (n, n))
    support = rng.random((n, n)) < density if density < 1 else np.ones((n, n), bool)
    return AlgebraMatrix(cells, support)


def test_algebra_matrix_validation():
    with pytest.raises(InvalidInputError):
        AlgebraMatrix(np.zeros((2, 3, 2, 2)), np.ones((2, 3), bool))
    with pytest.raises(InvalidInputError):
        AlgebraMatrix(np.zeros((2, 2, 2, 2)), np.ones((3, 3), bool))
    M = AlgebraMatrix(np.ones((2, 2, 2, 2)), np.eye(2, dtype=bool))
    assert np.all(M.cell(0, 1) == 0)


def test_supported_permutations():
    perms = supported_permutations(np.ones((3, 3), bool))
    assert len(perms) == 6
    for cols, s in perms:
        assert s == oracles._inversion_sign(cols)
    assert supported_permutations(np.array([[1, 0], [1, 0]], bool)) == []


def test_cayley_examples():
    rng = np.random.default_rng(0)
    M = gaussian_matrix(rng, 3, 2)
    D = AlgebraMatrix(M.cells, np.eye(3, dtype=bool))
    assert np.allclose(cayley_det(D), D.cell(0, 0) @ D.cell(1, 1) @ D.cell(2, 2))
    one = gaussian_matrix(rng, 1, 3)
    assert np.allclose(cayley_det(one), one.cell(0, 0))
    two = gaussian_matrix(rng, 2, 2)
    by_hand = two.cell(0, 0) @ two.cell(1, 1) - two.cell(0, 1) @ two.cell(1, 0)
    assert np.allclose(cayley_det(two), by_hand)


def test_cayley_matches_row_ordered_oracle():
    rng = np.random.default_rng(1)
    for n in range(1, 5):
        M = gaussian_matrix(rng, n, 2, density=0.8)
        assert np.allclose(cayley_det(M), oracles.row_ordered_det(M), atol=1e-12)


def test_cayley_depends_on_product_order():
    a = np.array([[0, 1], [0, 0]], dtype=complex)
    b = np.array([[0, 0], [1, 0]], dtype=complex)
    cells = np.array([[np.eye(2), a], [b, np.eye(2)]])
    M = AlgebraMatrix(cells, np.ones((2, 2), bool))
    assert not np.allclose(a @ b, b @ a)
    assert not np.allclose(cayley_det(M), oracles.column_ordered_det(M))


def test_empty_support_gives_zero():
    M = gaussian_matrix(np.random.default_rng(2), 3, 2)
    zero_row = M.support.copy()
    zero_row[1] = False
    Z = AlgebraMatrix(M.cells, zero_row)
    assert np.all(cayley_det(Z) == 0)
    assert np.all(sdet_exact(Z) == 0)
    assert np.all(sdet_sampled(Z, 50, RngStream(0)) == 0)


def test_sym_prod_examples():
    rng = np.random.default_rng(3)
    s = sample_gaussian(2, rng)
    assert np.allclose(sym_prod([s, s, s]), s @ s @ s)
    a, b = sample_gaussian(3, rng), sample_gaussian(3, rng)
    assert np.allclose(sym_prod([a, b]), (a @ b + b @ a) / 2)
    mats = [sample_gaussian(2, rng) for _ in range(4)]
    ref = oracles.factorial_sym_prod(mats)
    assert np.abs(sym_prod(mats) - ref).max() <= 1e-10 * np.abs(ref).max()
    with pytest.raises(ResourceLimitError):
        sym_prod([s] * 13)


@given(st.integers(0, 2**31), st.integers(1, 5))
@settings(max_examples=20, deadline=None)
def test_sym_prod_is_multilinear(seed, m):
    rng = np.random.default_rng(seed)
    mats = [sample_gaussian(2, rng) for _ in range(m)]
    extra = sample_gaussian(2, rng)
    i = int(rng.integers(m))
    c1, c2 = complex(rng.standard_normal(), rng.standard_normal()), complex(rng.standard_normal(), 0.5)
    mixed = list(mats)
    mixed[i] = c1 * mats[i] + c2 * extra
    other = list(mats)
    other[i] = extra
    lhs = sym_prod(mixed)
    rhs = c1 * sym_prod(mats) + c2 * sym_prod(other)
    assert np.abs(lhs - rhs).max() <= 1e-10 * max(1.0, np.abs(rhs).max())


def test_sdet_matches_literal_double_sum():
    rng = np.random.default_rng(4)
    for trial in range(50):
        n = 1 + trial % 3
        M = gaussian_matrix(rng, n, 2, density=0.85)
        ref = oracles.literal_sdet(M)
        assert np.abs(sdet_exact(M) - ref).max() <= 1e-10 * max(1.0, np.abs(ref).max())


def test_sdet_n1_and_commutative_embedding():
    rng = np.random.default_rng(5)
    one = gaussian_matrix(rng, 1, 2)
    assert np.allclose(sdet_exact(one), cayley_det(one))
    assert np.allclose(sdet_exact(one), one.cell(0, 0))
    for n in range(1, 6):
        M = AlgebraMatrix.from_scalars(rng.standard_normal((n, n)), 3)
        assert np.abs(cayley_det(M) - sdet_exact(M)).max() <= 1e-12


def test_sdet_invariant_under_simultaneous_relabeling():
    rng = np.random.default_rng(6)
    for n in range(1, 4):
        M = gaussian_matrix(rng, n, 2, density=0.8)
        base = sdet_exact(M)
        for p in itertools.permutations(range(n)):
            idx = np.array(p)
            moved = AlgebraMatrix(M.cells[idx][:, idx], M.support[idx][:, idx])
            assert np.allclose(sdet_exact(moved), base, atol=1e-12)


def test_d1_all_determinants_agree():
    rng = np.random.default_rng(7)
    for n in range(1, 5):
        m = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
        M = AlgebraMatrix(m[:, :, None, None], np.ones((n, n), bool))
        ref = scalar_det(m)
        assert cayley_det(M)[0, 0] == pytest.approx(ref, abs=1e-10)
        assert sdet_exact(M)[0, 0] == pytest.approx(ref, abs=1e-10)
        assert oracles.literal_sdet(M)[0, 0] == pytest.approx(ref, abs=1e-10)
        assert oracles.column_ordered_det(M)[0, 0] == pytest.approx(ref, abs=1e-10)


def test_scalar_det():
    assert scalar_det(np.eye(4)) == pytest.approx(1)
    singular = np.array([[1.0, 2, 3], [1, 2, 3], [0, 1, 5]])
    assert abs(scalar_det(singular)) <= 1e-10
    rng = np.random.default_rng(8)
    m = rng.standard_normal((5, 5)) + 1j * rng.standard_normal((5, 5))
    ref = oracles.expansion_det(m)
    assert abs(scalar_det(m) - ref) <= 1e-9 * abs(ref)


def test_sdet_sampled_n1_exact():
    M = gaussian_matrix(np.random.default_rng(9), 1, 2)
    assert np.allclose(sdet_sampled(M, 10, RngStream(1)), M.cell(0, 0))


def test_sdet_sampled_is_unbiased():
    M = gaussian_matrix(np.random.default_rng(10), 4, 2)
    terms = sdet_sampled_terms(M, 100_000, RngStream(2))
    exact = sdet_exact(M)
    se_re = terms.real.std(axis=0, ddof=1) / np.sqrt(len(terms))
    se_im = terms.imag.std(axis=0, ddof=1) / np.sqrt(len(terms))
    mean = terms.mean(axis=0)
    assert np.all(np.abs(mean.real - exact.real) <= 5 * se_re)
    assert np.all(np.abs(mean.imag - exact.imag) <= 5 * se_im)


def test_batched_determinants_match_single():
    rng = np.random.default_rng(11)
    cells = sample_gaussian(2, rng, (5, 3, 3))
    support = np.ones((3, 3), bool)
    batched = AlgebraMatrix(cells, support)
    for b in range(5):
        single = AlgebraMatrix(cells[b], support)
        assert np.allclose(cayley_det(batched)[b], cayley_det(single))
        assert np.allclose(sdet_exact(batched)[b], sdet_exact(single))


def test_caps():
    M = AlgebraMatrix.zeros(8, 1)
    with pytest.raises(ResourceLimitError):
        sdet_exact(M)
    assert np.all(cayley_det(M) == 0)
    with pytest.raises(ResourceLimitError):
        cayley_det(AlgebraMatrix.zeros(10, 1))
