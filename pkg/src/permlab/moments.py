"""Exact moment quantities for the symmetrized trace estimator.

``a_d(n)`` is ``E[X_s] / perm A``; ``a2`` and ``a2_tilde`` are the
second-moment sums over the crossing count ``k``. Every value is a
:class:`fractions.Fraction`; the enumerations only ever count cycle numbers,
so the ``d``-dependence is applied afterwards from a cached histogram.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import comb, factorial

import numpy as np

from . import charlib
from .errors import InvalidInputError, ResourceLimitError
from .oracles import DeltaTensor
from .permgroup import (
    ENUMERATION_CAP,
    commutator,
    compose_array,
    cycle_count,
    cycle_count_array,
    enumerate_sn,
    inverse_array,
    permutation_array,
    rotation,
    to_array,
    w_involution,
)

ExactRatio = Fraction


def _check(n: int, d: int) -> None:
    if n < 1 or d < 1:
        raise InvalidInputError(f"need n >= 1 and d >= 1, got n={n}, d={d}")


def _from_histogram(hist: dict[int, int], d: int) -> int:
    return sum(count * d**c for c, count in hist.items())


# -- a_d -----------------------------------------------------------------


def a_d_closed(n: int, d: int) -> Fraction:
    _check(n, d)
    top = comb(n + d, n + 1)
    if d > n:
        top -= comb(d, n + 1)
    return Fraction(top, d**n)


def binomial_identity_sides(n: int, d: int) -> tuple[int, int]:
    """Both sides of ``sum_k C(d,k) C(n,k-1) = C(n+d,n+1) - C(d,n+1)``."""
    left = sum(comb(d, k) * comb(n, k - 1) for k in range(1, min(d, n) + 1))
    return left, comb(n + d, n + 1) - comb(d, n + 1)


_commutator_histograms: dict[tuple[int, int], dict[int, int]] = {}


def _commutator_histogram(n: int, cap: int) -> dict[int, int]:
    key = (n, cap)
    if key not in _commutator_histograms:
        r = rotation(n)
        hist: dict[int, int] = {}
        for beta in enumerate_sn(n, cap):
            c = cycle_count(commutator(beta, r))
            hist[c] = hist.get(c, 0) + 1
        _commutator_histograms[key] = hist
    return _commutator_histograms[key]


def a_d_bruteforce(n: int, d: int, cap: int | None = None) -> Fraction:
    """``d^{-n}`` times the mean of ``d^{c([beta, r])}`` over all of ``S_n``."""
    _check(n, d)
    hist = _commutator_histogram(n, ENUMERATION_CAP if cap is None else cap)
    return Fraction(_from_histogram(hist, d), factorial(n) * d**n)


def hook_coefficient(n: int, t: int) -> Fraction:
    """``<P_n * P_n, chi_t>`` for the hook ``(n - t, 1^t)``."""
    p = charlib.n_cycle_distribution(n)
    return charlib.inner_product(charlib.convolve(p, p), charlib.character(charlib.hook(n, t)))


def hook_content_sum(n: int, t: int, d: int) -> int:
    """``<d^{c(.)}, chi_t>`` in closed form: ``sum_k C(d,k) C(n-1,k-1) C(k-1,t)``."""
    return sum(comb(d, k) * comb(n - 1, k - 1) * comb(k - 1, t) for k in range(1, min(d, n) + 1))


def a_d_character(n: int, d: int) -> Fraction:
    """``(n!/d^n) sum_t <P_n*P_n, chi_t> <d^c, chi_t>`` over the hooks, from charlib."""
    _check(n, d)
    if n > 12:
        raise ResourceLimitError("character route limited to n <= 12")
    p = charlib.n_cycle_distribution(n)
    pp = charlib.convolve(p, p)
    dc = charlib.d_cycles_class_function(n, d)
    total = Fraction(0)
    for t in range(n):
        chi = charlib.character(charlib.hook(n, t))
        total += charlib.inner_product(pp, chi) * charlib.inner_product(dc, chi)
    return total * factorial(n) / d**n


# -- a2 and a2_tilde -------------------------------------------------------


def _block(p: np.ndarray, q: np.ndarray) -> np.ndarray:
    n = p.shape[-1]
    return np.concatenate([p, q + n], axis=-1).astype(np.int16)


@lru_cache(maxsize=None)
def _crossing_histograms(n: int) -> tuple[dict[int, int], ...]:
    """Per ``k``, histogram of ``c((r^-1,r^-1)^(a,b) w_k (r,r)^(g,e) w_k)`` over ``S_n^4``."""
    perms = permutation_array(n)
    inv = inverse_array(perms)
    r = to_array(rotation(n))
    r_inv = inverse_array(r)
    # x^q = q^-1 x q, one row per q
    left = compose_array(inv, compose_array(r_inv[None, :], perms))
    right = compose_array(inv, compose_array(r[None, :], perms))
    m = len(perms)
    ia, ib = np.divmod(np.arange(m * m), m)
    outer = _block(left[ia], left[ib])
    inner = _block(right[ia], right[ib])
    out = []
    for k in range(n + 1):
        w = to_array(w_involution(n, k))
        inner_w = compose_array(w[None, :], compose_array(inner, w[None, :]))
        hist: dict[int, int] = {}
        for start in range(0, len(outer), 4096):
            block = outer[start : start + 4096]
            prod = compose_array(block[:, None, :], inner_w[None, :, :])
            cycles, counts = np.unique(cycle_count_array(prod), return_counts=True)
            for c, cnt in zip(cycles.tolist(), counts.tolist()):
                hist[c] = hist.get(c, 0) + cnt
        out.append(hist)
    return tuple(out)


def _a2_sum(n: int, d: int, weight) -> Fraction:
    _check(n, d)
    if n > 4:
        raise ResourceLimitError("S_n^4 enumeration limited to n <= 4")
    hists = _crossing_histograms(n)
    total = sum(weight(k) * _from_histogram(h, d) for k, h in enumerate(hists))
    return Fraction(total, factorial(n) ** 4 * d ** (2 * n))


def a2_bruteforce(n: int, d: int) -> Fraction:
    return _a2_sum(n, d, lambda k: comb(n, k))


def a2_tilde_bruteforce(n: int, d: int) -> Fraction:
    return _a2_sum(n, d, lambda k: comb(n, k) ** 2)


@lru_cache(maxsize=None)
def _reduced_crossing_histograms(n: int) -> tuple[dict[int, int], ...]:
    """Same sums as the full enumeration, over ``n``-cycles instead of conjugators.

    Each conjugate of ``r`` is hit by exactly ``n`` conjugators, so the
    counts are the full ones divided by ``n^4``.
    """
    perms = permutation_array(n)
    cyc = perms[cycle_count_array(perms) == 1]
    cyc_inv = inverse_array(cyc)
    m = len(cyc)
    ia, ib = np.divmod(np.arange(m * m), m)
    outer = _block(cyc_inv[ia], cyc_inv[ib])
    inner = _block(cyc[ia], cyc[ib])
    out = []
    for k in range(n + 1):
        w = to_array(w_involution(n, k))
        inner_w = compose_array(w[None, :], compose_array(inner, w[None, :]))
        prod = compose_array(outer[:, None, :], inner_w[None, :, :])
        cycles, counts = np.unique(cycle_count_array(prod), return_counts=True)
        out.append(dict(zip(cycles.tolist(), counts.tolist())))
    return tuple(out)


def a2_reduced(n: int, d: int, tilde: bool = False) -> Fraction:
    """``a2`` (or ``a2_tilde``) from the ``((n-1)!)^4`` cycle tuples."""
    _check(n, d)
    if n > 5:
        raise ResourceLimitError("reduced enumeration limited to n <= 5")
    hists = _reduced_crossing_histograms(n)
    total = sum(comb(n, k) ** (2 if tilde else 1) * _from_histogram(h, d) for k, h in enumerate(hists))
    return Fraction(total, factorial(n - 1) ** 4 * d ** (2 * n))


@lru_cache(maxsize=None)
def _class_histogram(n: int, cap: int) -> dict[int, int]:
    perms = permutation_array(2 * n, cap)
    rr = to_array(rotation(n))
    rr = np.concatenate([rr, rr + n]).astype(np.int16)
    hist: dict[int, int] = {}
    for start in range(0, len(perms), 8192):
        s = perms[start : start + 8192]
        conj = compose_array(inverse_array(s), compose_array(rr[None, :], s))
        cycles, counts = np.unique(cycle_count_array(compose_array(conj, rr[None, :])), return_counts=True)
        for c, cnt in zip(cycles.tolist(), counts.tolist()):
            hist[c] = hist.get(c, 0) + cnt
    return hist


def a2_tilde_class(n: int, d: int, cap: int | None = None) -> Fraction:
    """``C(2n,n) d^{-2n}`` times the mean of ``d^{c((r,r)^s (r,r))}`` over ``s`` in ``S_{2n}``."""
    _check(n, d)
    cap = min(ENUMERATION_CAP, 8) if cap is None else cap
    hist = _class_histogram(n, cap)
    return Fraction(comb(2 * n, n) * _from_histogram(hist, d), factorial(2 * n) * d ** (2 * n))


def a2_tilde_character(n: int, d: int) -> Fraction:
    """Sum over ``T_n`` of ``chi(n,n)^2 s_tau(1^d) / dim tau``, scaled by ``C(2n,n) d^{-2n}``."""
    _check(n, d)
    if 2 * n > 10:
        raise ResourceLimitError("character route limited to 2n <= 10")
    total = Fraction(0)
    for tau, chi in charlib.t_n_family(n):
        total += Fraction(chi * chi * charlib.kostka_content_sum(tau, d), charlib.dimension(tau))
    return total * comb(2 * n, n) / d ** (2 * n)


def trivial_term(n: int, d: int) -> Fraction:
    """The trivial character's share of ``a2_tilde``: ``C(2n,n) C(2n+d-1,2n) / d^{2n}``."""
    return Fraction(comb(2 * n, n) * comb(2 * n + d - 1, 2 * n), d ** (2 * n))


def central_binomial(n: int) -> int:
    """``C(n, n/2)``, read as ``C(n, floor(n/2))`` for odd ``n``."""
    return comb(n, n // 2)


class BoundViolation(AssertionError):
    pass


@dataclass(frozen=True)
class SandwichReport:
    n: int
    d: int
    a2: Fraction
    a2_tilde: Fraction
    tilde_lower: Fraction
    tilde_upper: Fraction

    @property
    def holds(self) -> bool:
        return (
            self.a2_tilde / central_binomial(self.n) <= self.a2 <= self.a2_tilde
            and self.tilde_lower <= self.a2_tilde <= self.tilde_upper
        )


def sandwich_check(n: int, d: int) -> SandwichReport:
    lower = trivial_term(n, d)
    report = SandwichReport(n, d, a2_bruteforce(n, d), a2_tilde_bruteforce(n, d), lower, 4 * n * n * lower)
    if not report.holds:
        raise BoundViolation(
            f"sandwich fails at (n={n}, d={d}): a2={report.a2}, a2_tilde={report.a2_tilde}, "
            f"binomial bounds [{report.tilde_lower}, {report.tilde_upper}]"
        )
    return report


@dataclass(frozen=True)
class IdentityRatios:
    unsym_gaussian_ratio: Fraction
    sym_gaussian_ratio: Fraction


def unsym_identity_ratio(n: int, d: int) -> Fraction:
    _check(n, d)
    return (1 + Fraction(1, d)) ** n + (1 - Fraction(1, d)) ** n


def identity_matrix_ratios(n: int, d: int) -> IdentityRatios:
    return IdentityRatios(unsym_identity_ratio(n, d), a2_bruteforce(n, d) / a_d_closed(n, d) ** 2)


@dataclass(frozen=True)
class BoundProfile:
    exp_envelope: float
    character_envelope: Fraction
    floor: Fraction


def bound_profiles(n: int, d: int) -> BoundProfile:
    """Concrete envelopes for ``a2 / a_d^2``: ``4 e^{4n^2/d}``, the ``4n^2`` binomial bound, and the floor."""
    _check(n, d)
    ad2 = a_d_closed(n, d) ** 2
    base = trivial_term(n, d)
    return BoundProfile(
        exp_envelope=4 * math.exp(4 * n * n / d),
        character_envelope=4 * n * n * base / ad2,
        floor=base / central_binomial(n) / ad2,
    )


# -- exact tensor moments ---------------------------------------------------
# Slot layout: factor f owns (2f, 2f + 1) = (row, column); plain factors first.


def cupcap_delta(d: int) -> DeltaTensor:
    """``E[s_ij conj(s_kl)] = delta_ik delta_jl / d`` (Gaussian and Haar alike)."""
    return DeltaTensor(4, ((Fraction(1, d), ((0, 2), (1, 3))),))


_CUP_1324 = ((0, 4), (1, 5), (2, 6), (3, 7))
_CUP_1423 = ((0, 6), (1, 7), (2, 4), (3, 5))
_MIX_1 = ((0, 4), (2, 6), (1, 7), (3, 5))
_MIX_2 = ((0, 6), (2, 4), (1, 5), (3, 7))


def gaussian_fourth_delta(d: int) -> DeltaTensor:
    c = Fraction(1, d * d)
    return DeltaTensor(8, ((c, _CUP_1324), (c, _CUP_1423)))


def haar_fourth_delta(d: int) -> DeltaTensor:
    """``E[u_ij u_kl conj(u_mn) conj(u_pq)]`` for Haar ``u`` in ``U(d)``, ``d >= 2``."""
    if d < 2:
        raise InvalidInputError("the degree-two Haar formula needs d >= 2")
    c = Fraction(1, d * d - 1)
    return DeltaTensor(
        8,
        ((c, _CUP_1324), (c, _CUP_1423), (-c / d, _MIX_1), (-c / d, _MIX_2)),
    )


def cupcap_tensor(d: int) -> np.ndarray:
    return cupcap_delta(d).to_array(d)


def gaussian_fourth_tensor(d: int) -> np.ndarray:
    return gaussian_fourth_delta(d).to_array(d)


def haar_fourth_tensor(d: int) -> np.ndarray:
    return haar_fourth_delta(d).to_array(d)


def _as_operator(t: np.ndarray, d: int) -> np.ndarray:
    """Rows ``(i, k, m, p)``, columns ``(j, l, n, q)``."""
    return t.transpose(0, 2, 4, 6, 1, 3, 5, 7).reshape(d**4, d**4)


def fourth_moment_sandwich(d: int) -> tuple[float, float]:
    """Smallest eigenvalues of ``E - Q/(1+1/d)`` and ``Q/(1-1/d) - E``.

    ``E`` is the Haar fourth moment and ``Q`` the Gaussian one, both as
    operators; nonnegative minima mean ``Q/(1+1/d) <= E <= Q/(1-1/d)``.
    """
    e = _as_operator(haar_fourth_tensor(d), d)
    q = _as_operator(gaussian_fourth_tensor(d), d)
    low = np.linalg.eigvalsh(e - q / (1 + 1 / d)).min()
    high = np.linalg.eigvalsh(q / (1 - 1 / d) - e).min()
    return float(low), float(high)


def clear_caches() -> None:
    _commutator_histograms.clear()
    _crossing_histograms.cache_clear()
    _reduced_crossing_histograms.cache_clear()
    _class_histogram.cache_clear()
