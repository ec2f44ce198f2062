from __future__ import annotations

import math
from fractions import Fraction
from math import comb, factorial

import numpy as np
import pytest
from hypothesis import given, strategies as st

from permlab import charlib, moments, oracles
from permlab.errors import InvalidInputError, ResourceLimitError

# Frozen from the Wick trace-word oracle (oracles.covariance_diagram averaged over S_n).
A_D_FROZEN = {
    (3, 1): Fraction(1), (3, 2): Fraction(5, 8), (3, 3): Fraction(5, 9), (3, 4): Fraction(17, 32),
    (4, 1): Fraction(1), (4, 2): Fraction(3, 8), (4, 3): Fraction(7, 27), (4, 4): Fraction(7, 32),
}
# Frozen from oracles.sym_identity_moment(n, d, 2) for n <= 3.
A2_FROZEN = {
    (1, 1): Fraction(2), (1, 2): Fraction(2), (1, 3): Fraction(2),
    (2, 1): Fraction(4), (2, 2): Fraction(5, 2), (2, 3): Fraction(20, 9),
    (3, 1): Fraction(8), (3, 2): Fraction(23, 16), (3, 3): Fraction(68, 81),
}
# Frozen from the S_{2n} class enumeration, agreeing with the other two routes.
A2_TILDE_FROZEN = {
    (2, 2): Fraction(3), (2, 3): Fraction(22, 9), (3, 2): Fraction(11, 4),
    (3, 3): Fraction(104, 81), (4, 2): Fraction(45, 16), (4, 4): Fraction(585, 2048),
}


def test_a_d_closed_examples():
    for d in range(1, 10):
        assert moments.a_d_closed(1, d) == 1
    assert moments.a_d_closed(3, 2) == Fraction(5, 8)
    assert moments.a_d_closed(2, 3) == 1
    with pytest.raises(InvalidInputError):
        moments.a_d_closed(0, 2)


def test_a_d_frozen_values():
    for (n, d), value in A_D_FROZEN.items():
        assert moments.a_d_closed(n, d) == value
        assert moments.a_d_bruteforce(n, d) == value
        assert moments.a_d_character(n, d) == value


def test_a_d_against_wick_oracle():
    for n, d in ((3, 2), (3, 3), (2, 5)):
        assert oracles.sym_identity_moment(n, d, 1) == moments.a_d_closed(n, d)


def test_a_d_three_routes_small_grid():
    for n in range(1, 6):
        for d in range(1, 7):
            closed = moments.a_d_closed(n, d)
            assert moments.a_d_bruteforce(n, d) == closed
            assert moments.a_d_character(n, d) == closed


def test_a_d_floor():
    for n in range(1, 7):
        for d in range(1, 9):
            assert moments.a_d_bruteforce(n, d) >= Fraction(n, factorial(n))
    assert moments.a_d_bruteforce(3, 1) == 1


def test_a_d_large_d_limit():
    # only commuting pairs survive as d grows: the limit is n/n!, which is 1 only for n <= 2
    for n in range(1, 6):
        value = float(moments.a_d_closed(n, 10**6 * n))
        assert abs(value - n / factorial(n)) < 1e-3
        assert (abs(value - 1) < 1e-3) == (n <= 2)


def test_a_d_bruteforce_cap():
    with pytest.raises(ResourceLimitError):
        moments.a_d_bruteforce(5, 2, cap=4)


def test_hook_coefficient():
    for n in range(1, 7):
        for t in range(n):
            assert moments.hook_coefficient(n, t) == Fraction(1, factorial(n) * comb(n - 1, t))


def test_hook_content_sum_matches_inner_product_and_kostka():
    for n in range(1, 7):
        for d in range(1, 6):
            dc = charlib.d_cycles_class_function(n, d)
            for t in range(n):
                lam = charlib.hook(n, t)
                value = moments.hook_content_sum(n, t, d)
                assert value == charlib.inner_product(dc, charlib.character(lam))
                assert value == charlib.kostka_content_sum(lam, d)


def test_hook_sum_reassembles_closed_form():
    for n in range(1, 11):
        for d in range(1, 11):
            total = sum(Fraction(moments.hook_content_sum(n, t, d), comb(n - 1, t)) for t in range(n))
            assert total == comb(n + d, n + 1) - comb(d, n + 1)


@given(st.integers(1, 40), st.integers(1, 40))
def test_binomial_identity(n, d):
    left, right = moments.binomial_identity_sides(n, d)
    assert left == right


def test_a2_frozen_and_collapse():
    for (n, d), value in A2_FROZEN.items():
        assert moments.a2_bruteforce(n, d) == value
    for d in range(1, 5):
        assert moments.a2_bruteforce(1, d) == 2
    for n in range(1, 5):
        assert moments.a2_bruteforce(n, 1) == 2**n
        assert moments.a2_tilde_bruteforce(n, 1) == comb(2 * n, n)


def test_a2_tilde_frozen():
    for (n, d), value in A2_TILDE_FROZEN.items():
        assert moments.a2_tilde_bruteforce(n, d) == value
        assert moments.a2_tilde_class(n, d) == value
        assert moments.a2_tilde_character(n, d) == value


def test_a2_tilde_routes_and_reduction():
    for n in range(1, 4):
        for d in range(1, 4):
            brute = moments.a2_tilde_bruteforce(n, d)
            assert brute == moments.a2_tilde_class(n, d) == moments.a2_tilde_character(n, d)
            assert moments.a2_reduced(n, d, tilde=True) == brute
            assert moments.a2_reduced(n, d) == moments.a2_bruteforce(n, d)
    assert moments.a2_tilde_class(1, 5) == 2
    assert moments.a2_tilde_class(2, 1) == 6


def test_a2_tilde_character_bounds():
    for n in range(1, 5):
        for d in range(1, 5):
            value = moments.a2_tilde_character(n, d)
            base = moments.trivial_term(n, d)
            assert base <= value <= 4 * n * n * base


def test_trivial_character_term():
    for n in range(1, 5):
        for d in range(1, 5):
            chi_sq = 1  # the trivial character is 1 on (n, n)
            term = Fraction(chi_sq * charlib.kostka_content_sum((2 * n,), d), 1) * comb(2 * n, n) / d ** (2 * n)
            assert term == moments.trivial_term(n, d)


def test_sandwich_check():
    for n in range(1, 5):
        for d in range(1, 5):
            rep = moments.sandwich_check(n, d)
            assert rep.holds
    rep = moments.sandwich_check(3, 1)
    assert rep.a2 == 8 and rep.a2_tilde == 20
    assert rep.a2_tilde / rep.a2 <= moments.central_binomial(3)
    rep = moments.sandwich_check(1, 3)
    assert rep.a2 == rep.a2_tilde == 2


def test_central_binomial_reads_floor_for_odd_n():
    assert moments.central_binomial(3) == 3
    assert moments.central_binomial(4) == 6


def test_identity_matrix_ratios():
    for d in range(1, 5):
        assert moments.identity_matrix_ratios(1, d).unsym_gaussian_ratio == 2
    assert moments.identity_matrix_ratios(3, 2).unsym_gaussian_ratio == Fraction(7, 2)
    assert moments.identity_matrix_ratios(1, 1).sym_gaussian_ratio == 2
    for n in (1, 2, 3):
        expected = oracles.unsym_identity_second_moment(n, 2)
        assert moments.unsym_identity_ratio(n, 2) == expected


def test_bound_profiles():
    assert moments.bound_profiles(10, 400).exp_envelope == pytest.approx(4 * math.e, rel=1e-12)
    for n in range(1, 5):
        for d in range(1, 5):
            prof = moments.bound_profiles(n, d)
            ratio = moments.identity_matrix_ratios(n, d).sym_gaussian_ratio
            assert prof.floor <= ratio <= prof.character_envelope


def test_exact_tensor_symmetries():
    for d in (2, 3):
        g = moments.gaussian_fourth_tensor(d)
        h = moments.haar_fourth_tensor(d)
        # swapping the two plain factors together with the two conjugates
        for t in (g, h):
            assert np.allclose(t, t.transpose(2, 3, 0, 1, 6, 7, 4, 5))
        # E|u_11|^4 = 2/(d(d+1)) for Haar, 2/d^2 for Gaussian
        assert h[0, 0, 0, 0, 0, 0, 0, 0] == pytest.approx(2 / (d * (d + 1)))
        assert g[0, 0, 0, 0, 0, 0, 0, 0] == pytest.approx(2 / d**2)
    with pytest.raises(InvalidInputError):
        moments.haar_fourth_delta(1)


def test_fourth_moment_sandwich():
    for d in (2, 3, 4):
        low, high = moments.fourth_moment_sandwich(d)
        assert low >= -1e-12 and high >= -1e-12


def test_caps():
    with pytest.raises(ResourceLimitError):
        moments.a2_bruteforce(5, 2)
    with pytest.raises(ResourceLimitError):
        moments.a2_tilde_character(6, 2)
