"""Independent reference computations.

Nothing in here calls into :mod:`permlab.permgroup`, :mod:`permlab.moments`
or :mod:`permlab.determinants`; permutations are raw tuples, signs come from
inversion counts, and Gaussian expectations come from Wick pairings of
symbolic delta tensors whose loops are counted with union-find.
"""

from __future__ import annotations

import itertools
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from math import factorial, prod
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import InvalidInputError, ResourceLimitError

Pairing = tuple[tuple[int, int], ...]


def _canonical_pairing(pairs: Iterable[Sequence[int]]) -> Pairing:
    return tuple(sorted(tuple(sorted((int(a), int(b)))) for a, b in pairs))


@dataclass(frozen=True)
class DeltaTensor:
    """A linear combination of products of Kronecker deltas.

    Each term pairs up all ``arity`` index slots; a pair ``(a, b)`` stands
    for ``delta(index_a, index_b)``. Terms are merged and sorted on
    construction, so ``==`` is exact symbolic equality.
    """

    arity: int
    terms: tuple[tuple[Fraction, Pairing], ...]

    def __post_init__(self) -> None:
        if self.arity % 2:
            raise InvalidInputError("delta tensors need an even number of slots")
        merged: dict[Pairing, Fraction] = {}
        for coef, pairing in self.terms:
            pairing = _canonical_pairing(pairing)
            flat = sorted(itertools.chain.from_iterable(pairing))
            if flat != list(range(self.arity)):
                raise InvalidInputError(f"{pairing} is not a perfect matching of {self.arity} slots")
            merged[pairing] = merged.get(pairing, Fraction(0)) + Fraction(coef)
        terms = tuple(sorted((c, p) for p, c in merged.items() if c != 0))
        object.__setattr__(self, "terms", terms)

    def __add__(self, other: "DeltaTensor") -> "DeltaTensor":
        if self.arity != other.arity:
            raise InvalidInputError("arity mismatch")
        return DeltaTensor(self.arity, self.terms + other.terms)

    def scale(self, c) -> "DeltaTensor":
        return DeltaTensor(self.arity, tuple((c * k, p) for k, p in self.terms))

    def tensor(self, other: "DeltaTensor") -> "DeltaTensor":
        """Tensor product; ``other``'s slots are shifted past ``self``'s."""
        off = self.arity
        terms = []
        for (c1, p1), (c2, p2) in itertools.product(self.terms, other.terms):
            terms.append((c1 * c2, p1 + tuple((a + off, b + off) for a, b in p2)))
        return DeltaTensor(self.arity + other.arity, tuple(terms))

    def relabel(self, mapping: Sequence[int]) -> "DeltaTensor":
        """Rename slot ``s`` to ``mapping[s]`` (a bijection on slots)."""
        return DeltaTensor(
            self.arity,
            tuple((c, tuple((mapping[a], mapping[b]) for a, b in p)) for c, p in self.terms),
        )

    def to_array(self, d: int) -> np.ndarray:
        letters = "abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ"
        if self.arity > len(letters):
            raise ResourceLimitError("too many slots for a dense array")
        out = np.zeros((d,) * self.arity)
        eye = np.eye(d)
        target = letters[: self.arity]
        for coef, pairing in self.terms:
            spec = ",".join(letters[a] + letters[b] for a, b in pairing) + "->" + target
            out += float(coef) * np.einsum(spec, *([eye] * len(pairing)))
        return out


def wick_gaussian_moment(k: int, d: int) -> DeltaTensor:
    """``E[s^{(x)k} (x) conj(s)^{(x)k}]`` for ``s`` with i.i.d. ``CN(0, 1/d)`` entries.

    Slots ``(2f, 2f + 1)`` are the row and column of factor ``f``; the first
    ``k`` factors are plain, the last ``k`` conjugated. Each bijection
    between plain and conjugated factors contributes ``d^{-k}`` times the
    deltas tying rows to rows and columns to columns.
    """
    if not 1 <= k <= 3:
        raise InvalidInputError("Wick enumeration is limited to k <= 3")
    terms = []
    for pi in itertools.permutations(range(k)):
        pairs = []
        for a in range(k):
            b = k + pi[a]
            pairs += [(2 * a, 2 * b), (2 * a + 1, 2 * b + 1)]
        terms.append((Fraction(1, d**k), tuple(pairs)))
    return DeltaTensor(4 * k, tuple(terms))


class _UnionFind:
    def __init__(self, size: int):
        self.parent = list(range(size))

    def find(self, x: int) -> int:
        while self.parent[x] != x:
            self.parent[x] = self.parent[self.parent[x]]
            x = self.parent[x]
        return x

    def union(self, a: int, b: int) -> None:
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parent[ra] = rb

    def components(self) -> int:
        return sum(1 for i in range(len(self.parent)) if self.find(i) == i)


def loop_count(size: int, *pairings: Iterable[Sequence[int]]) -> int:
    uf = _UnionFind(size)
    for pairing in pairings:
        for a, b in pairing:
            uf.union(a, b)
    return uf.components()


def contract(t: DeltaTensor, wiring: Iterable[Sequence[int]], d: int) -> Fraction:
    """Close every slot of ``t`` with ``wiring`` and sum ``coef * d^loops``."""
    wiring = _canonical_pairing(wiring)
    flat = sorted(itertools.chain.from_iterable(wiring))
    if flat != list(range(t.arity)):
        raise InvalidInputError("wiring must pair every slot exactly once")
    return sum((c * Fraction(d) ** loop_count(t.arity, p, wiring) for c, p in t.terms), Fraction(0))


# -- products of traces of Gaussian matrices -------------------------------



def gaussian_trace_moment(words: Sequence[tuple[Sequence, bool]], d: int) -> Fraction:
    """Exact ``E[prod_w tr(word_w)]`` for independent ``CN(0, 1/d)`` matrices.

    Each word is ``(labels, conjugated)``: the product of the labelled
    matrices in order, entrywise conjugated when the flag is set. Equal
    labels denote the same matrix. The expectation is assembled as a tensor
    product of one Wick moment per label, contracted with the trace wiring.
    """
    occurrences: list[tuple[object, bool]] = []
    wiring = []
    for labels, conj in words:
        start = len(occurrences)
        m = len(labels)
        for p, lab in enumerate(labels):
            occurrences.append((lab, conj))
            nxt = start + (p + 1) % m
            wiring.append((2 * (start + p) + 1, 2 * nxt))
    by_label: dict[object, tuple[list[int], list[int]]] = {}
    for idx, (lab, conj) in enumerate(occurrences):
        by_label.setdefault(lab, ([], []))[1 if conj else 0].append(idx)

    total = None
    order: list[int] = []
    for lab, (plain, conj) in by_label.items():
        if len(plain) != len(conj):
            return Fraction(0)
        factor = wick_gaussian_moment(len(plain), d)
        total = factor if total is None else total.tensor(factor)
        order += plain + conj
    # the product tensor's factor f belongs to occurrence order[f]
    mapping = [0] * (2 * len(order))
    for f, occ in enumerate(order):
        mapping[2 * f] = 2 * occ
        mapping[2 * f + 1] = 2 * occ + 1
    return contract(total.relabel(mapping), wiring, d)


def covariance_diagram(beta: Sequence[int], d: int) -> Fraction:
    """``E[tr(s_1 ... s_n) conj tr(s_{beta 1} ... s_{beta n})]`` for 0-based ``beta``."""
    n = len(beta)
    return gaussian_trace_moment([(tuple(range(n)), False), (tuple(beta), True)], d)


def unsym_identity_second_moment(n: int, d: int) -> Fraction:
    """``E|tr(s_1 ... s_n)|^4``, i.e. ``E[X^2]`` for ``A = I_n``."""
    w = tuple(range(n))
    return gaussian_trace_moment([(w, False), (w, False), (w, True), (w, True)], d)


def sym_identity_moment(n: int, d: int, power: int) -> Fraction:
    """``E[|tr symprod(s_1..s_n)|^{2 power}]`` for ``power`` in {1, 2} by full expansion."""
    if power not in (1, 2) or n > 3 + (power == 1):
        raise ResourceLimitError("literal symmetrized moments are limited to tiny n")
    orders = list(itertools.permutations(range(n)))
    total = Fraction(0)
    for combo in itertools.product(orders, repeat=2 * power):
        words = [(o, i >= power) for i, o in enumerate(combo)]
        total += gaussian_trace_moment(words, d)
    return total / len(orders) ** (2 * power)


def _inversion_sign(p: Sequence[int]) -> int:
    inv = sum(1 for i in range(len(p)) for j in range(i + 1, len(p)) if p[i] > p[j])
    return -1 if inv % 2 else 1


def _support_perms(support: np.ndarray) -> list[tuple[int, ...]]:
    n = support.shape[0]
    return [p for p in itertools.permutations(range(n)) if all(support[i, p[i]] for i in range(n))]


def gaussian_second_moment_unsym(A, d: int) -> Fraction:
    """Exact ``E[X^2]`` for the Gaussian trace estimator on a {0,1} matrix (n <= 3)."""
    A = np.asarray(A)
    n = A.shape[0]
    if n > 3:
        raise ResourceLimitError("exact quadruple expansion limited to n <= 3")
    perms = _support_perms(A != 0)
    total = Fraction(0)
    for quad in itertools.product(perms, repeat=4):
        words = [(tuple((i, q[i]) for i in range(n)), j >= 2) for j, q in enumerate(quad)]
        value = gaussian_trace_moment(words, d)
        if value:
            total += prod(_inversion_sign(q) for q in quad) * value
    return total


# -- literal determinants and permanents ------------------------------------


def _cells(M) -> tuple[np.ndarray, np.ndarray]:
    cells = np.asarray(M.cells)
    support = np.asarray(M.support, dtype=bool)
    return cells, support


def literal_sdet(M) -> np.ndarray:
    """The double sum over ``(alpha, alpha')`` of the symmetrized determinant, unmodified."""
    cells, support = _cells(M)
    n, d = cells.shape[-3], cells.shape[-1]
    if n > 4:
        raise ResourceLimitError("literal sdet limited to n <= 4")
    out = np.zeros(cells.shape[:-4] + (d, d), dtype=np.complex128)
    for alpha in itertools.permutations(range(n)):
        alpha_inv = [0] * n
        for i, a in enumerate(alpha):
            alpha_inv[a] = i
        for alpha2 in itertools.permutations(range(n)):
            if not all(support[alpha[i], alpha2[i]] for i in range(n)):
                continue
            s = _inversion_sign([alpha2[alpha_inv[j]] for j in range(n)])
            term = cells[..., alpha[0], alpha2[0], :, :]
            for i in range(1, n):
                term = term @ cells[..., alpha[i], alpha2[i], :, :]
            out = out + s * term
    return out / factorial(n)


def column_ordered_det(M) -> np.ndarray:
    """Signed sum with each product taken left column to right column."""
    cells, support = _cells(M)
    n, d = cells.shape[-3], cells.shape[-1]
    out = np.zeros(cells.shape[:-4] + (d, d), dtype=np.complex128)
    for alpha in _support_perms(support):
        rows = [0] * n
        for i, a in enumerate(alpha):
            rows[a] = i
        term = cells[..., rows[0], 0, :, :]
        for j in range(1, n):
            term = term @ cells[..., rows[j], j, :, :]
        out = out + _inversion_sign(alpha) * term
    return out


def row_ordered_det(M) -> np.ndarray:
    """Signed sum over all ``n!`` permutations with products in row order (no pruning)."""
    cells, _ = _cells(M)
    n, d = cells.shape[-3], cells.shape[-1]
    out = np.zeros(cells.shape[:-4] + (d, d), dtype=np.complex128)
    support = np.asarray(M.support, dtype=bool)
    for alpha in itertools.permutations(range(n)):
        term = np.eye(d, dtype=np.complex128)
        for i in range(n):
            term = term @ (cells[..., i, alpha[i], :, :] * support[i, alpha[i]])
        out = out + _inversion_sign(alpha) * term
    return out


def expansion_det(m) -> complex:
    m = np.asarray(m)
    n = m.shape[0]
    return sum(_inversion_sign(p) * prod(m[i, p[i]] for i in range(n)) for p in itertools.permutations(range(n)))


def naive_permanent(A):
    A = np.asarray(A)
    n = A.shape[0]
    if np.issubdtype(A.dtype, np.integer):
        A = A.astype(object)
    return sum(prod(A[i, p[i]] for i in range(n)) for p in itertools.permutations(range(n)))


def factorial_sym_prod(mats: Sequence[np.ndarray]) -> np.ndarray:
    """Average of the product over all orderings."""
    mats = [np.asarray(m, dtype=np.complex128) for m in mats]
    total = np.zeros_like(mats[0])
    count = 0
    for order in itertools.permutations(range(len(mats))):
        term = mats[order[0]]
        for i in order[1:]:
            term = term @ mats[i]
        total = total + term
        count += 1
    return total / count


# -- tableau and character references ---------------------------------------


def hook_lengths(shape: Sequence[int]) -> list[int]:
    shape = list(shape)
    cols = [sum(1 for p in shape if p > j) for j in range(shape[0])] if shape else []
    return [shape[r] - c - 1 + cols[c] - r for r in range(len(shape)) for c in range(shape[r])]


def hook_length_dimension(shape: Sequence[int]) -> int:
    """Standard Young tableaux count ``n! / prod(hooks)``."""
    return factorial(sum(shape)) // prod(hook_lengths(shape))


def hook_content_count(shape: Sequence[int], d: int) -> int:
    """Semistandard tableaux of ``shape`` with entries in ``1..d``: ``prod (d + content) / hook``."""
    shape = list(shape)
    num = prod(d + c - r for r in range(len(shape)) for c in range(shape[r]))
    return num // prod(hook_lengths(shape))


def _cycle_type(p: Sequence[int]) -> tuple[int, ...]:
    seen = [False] * len(p)
    lengths = []
    for s in range(len(p)):
        if not seen[s]:
            k, i = 0, s
            while not seen[i]:
                seen[i] = True
                i = p[i]
                k += 1
            lengths.append(k)
    return tuple(sorted(lengths, reverse=True))


def brute_convolve(f: Mapping[tuple[int, ...], Fraction], g: Mapping[tuple[int, ...], Fraction], n: int) -> dict:
    """Convolution of class functions (keyed by cycle-type tuples) by summing over ``S_n``."""
    if n > 6:
        raise ResourceLimitError("brute convolution limited to n <= 6")
    perms = list(itertools.permutations(range(n)))
    out: dict[tuple[int, ...], Fraction] = {}
    for pi in perms:
        mu = _cycle_type(pi)
        if mu in out:
            continue
        total = Fraction(0)
        for eta in perms:
            eta_inv = [0] * n
            for i, e in enumerate(eta):
                eta_inv[e] = i
            rest = tuple(eta_inv[pi[i]] for i in range(n))
            total += Fraction(f[_cycle_type(eta)]) * Fraction(g[_cycle_type(rest)])
        out[mu] = total
    return out


def brute_inner_product(f: Mapping, g: Mapping, n: int) -> Fraction:
    perms = itertools.permutations(range(n))
    return sum((Fraction(f[_cycle_type(p)]) * Fraction(g[_cycle_type(p)]) for p in perms), Fraction(0)) / factorial(n)


# -- double cycle covers ----------------------------------------------------


def cover_sum_by_edge_subsets(A) -> int:
    """``sum_C 2^{t(C)}`` by enumerating edge subsets of the bipartite graph directly.

    A subset is a cover when every vertex is touched and each component is
    either a single edge or a cycle (all vertices of degree 2).
    """
    A = np.asarray(A)
    n = A.shape[0]
    edges = [(i, j) for i in range(n) for j in range(n) if A[i, j]]
    if len(edges) > 20:
        raise ResourceLimitError("too many edges for subset enumeration")
    total = 0
    for mask in range(1, 1 << len(edges)):
        chosen = [edges[e] for e in range(len(edges)) if mask >> e & 1]
        deg = Counter()
        for i, j in chosen:
            deg[("L", i)] += 1
            deg[("R", j)] += 1
        if len(deg) != 2 * n or any(v > 2 for v in deg.values()):
            continue
        uf = _UnionFind(2 * n)
        for i, j in chosen:
            uf.union(i, n + j)
        comps: dict[int, list[int]] = {}
        for v in range(2 * n):
            comps.setdefault(uf.find(v), []).append(v)
        cycles = 0
        ok = True
        for verts in comps.values():
            degrees = {deg[("L", v)] if v < n else deg[("R", v - n)] for v in verts}
            if degrees == {1} and len(verts) == 2:
                continue
            if degrees == {2}:
                cycles += 1
                continue
            ok = False
            break
        if ok:
            total += 2**cycles
    return total
