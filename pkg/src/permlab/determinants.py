"""Determinants over the algebra of ``d x d`` complex matrices.

An :class:`AlgebraMatrix` holds an ``n x n`` grid of ``d x d`` cells plus a
boolean support mask; cells outside the support are the algebra's zero and
are pruned from every permutation sum. Cells may carry leading batch axes,
in which case every determinant is computed per batch element.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from math import factorial

import numpy as np

from .errors import InvalidInputError, ResourceLimitError
from .linalg import RngStream

CAYLEY_CAP = 9
SYM_CAP = 12
SDET_CAP = 7


@dataclass(frozen=True)
class AlgebraMatrix:
    cells: np.ndarray  # (..., n, n, d, d)
    support: np.ndarray  # (n, n) bool

    def __post_init__(self) -> None:
        cells = np.asarray(self.cells, dtype=np.complex128)
        support = np.asarray(self.support, dtype=bool)
        if cells.ndim < 4 or cells.shape[-1] != cells.shape[-2] or cells.shape[-3] != cells.shape[-4]:
            raise InvalidInputError(f"cells must have shape (..., n, n, d, d), got {cells.shape}")
        if support.shape != cells.shape[-4:-2]:
            raise InvalidInputError("support mask does not match the cell grid")
        cells = np.where(support[:, :, None, None], cells, 0)
        object.__setattr__(self, "cells", cells)
        object.__setattr__(self, "support", support)

    @property
    def n(self) -> int:
        return self.cells.shape[-3]

    @property
    def d(self) -> int:
        return self.cells.shape[-1]

    @property
    def batch_shape(self) -> tuple[int, ...]:
        return self.cells.shape[:-4]

    def cell(self, i: int, j: int) -> np.ndarray:
        return self.cells[..., i, j, :, :]

    @classmethod
    def zeros(cls, n: int, d: int) -> "AlgebraMatrix":
        return cls(np.zeros((n, n, d, d)), np.zeros((n, n), dtype=bool))

    @classmethod
    def from_scalars(cls, m, d: int) -> "AlgebraMatrix":
        """Commutative embedding: cell ``(i, j)`` is ``m_ij`` times the identity."""
        m = np.asarray(m, dtype=np.complex128)
        cells = m[..., :, :, None, None] * np.eye(d)
        support = (m != 0).reshape((-1,) + m.shape[-2:]).any(axis=0)
        return cls(cells, support)


def _zero_result(M: AlgebraMatrix) -> np.ndarray:
    return np.zeros(M.batch_shape + (M.d, M.d), dtype=np.complex128)


@lru_cache(maxsize=4096)
def _supported(support_bytes: bytes, n: int) -> tuple[tuple[tuple[int, ...], int], ...]:
    support = np.frombuffer(support_bytes, dtype=bool).reshape(n, n)
    out = []

    def dfs(row: int, used: int, cols: tuple[int, ...], inversions: int) -> None:
        if row == n:
            out.append((cols, -1 if inversions % 2 else 1))
            return
        for j in range(n):
            if support[row, j] and not used >> j & 1:
                above = bin(used >> (j + 1)).count("1")
                dfs(row + 1, used | 1 << j, cols + (j,), inversions + above)

    dfs(0, 0, (), 0)
    return tuple(out)


def supported_permutations(support) -> list[tuple[tuple[int, ...], int]]:
    """``(alpha, sign)`` for every 0-based ``alpha`` with all ``support[i, alpha[i]]`` set."""
    support = np.ascontiguousarray(support, dtype=bool)
    return list(_supported(support.tobytes(), support.shape[0]))


def cayley_det(M: AlgebraMatrix, cap: int = CAYLEY_CAP) -> np.ndarray:
    """``sum_alpha sign(alpha) M[0, a0] M[1, a1] ... M[n-1, a_{n-1}]``, rows top to bottom.

    Depth-first over rows; each prefix product is shared by all
    permutations extending it.
    """
    n = M.n
    if n > cap:
        raise ResourceLimitError(f"cayley_det limited to n <= {cap}")
    out = _zero_result(M)
    support = M.support

    def dfs(row: int, used: int, prefix: np.ndarray | None, inversions: int) -> None:
        nonlocal out
        if row == n:
            out = out - prefix if inversions % 2 else out + prefix
            return
        for j in range(n):
            if support[row, j] and not used >> j & 1:
                cell = M.cell(row, j)
                nxt = cell if prefix is None else prefix @ cell
                dfs(row + 1, used | 1 << j, nxt, inversions + bin(used >> (j + 1)).count("1"))

    dfs(0, 0, None, 0)
    return out


def sym_prod(matrices, cap: int = SYM_CAP) -> np.ndarray:
    """Average of ``s_1 ... s_m`` over all orderings, by inclusion-exclusion.

    The multilinear part of ``(sum_{i in S} s_i)^m`` summed with signs
    ``(-1)^{m - |S|}`` over subsets ``S`` is ``m!`` times the average.
    ``matrices`` is a sequence of ``(..., d, d)`` arrays or one stacked
    ``(..., m, d, d)`` array.
    """
    if isinstance(matrices, np.ndarray):
        mats = np.asarray(matrices, dtype=np.complex128)
    else:
        mats = np.stack([np.asarray(x, dtype=np.complex128) for x in matrices], axis=-3)
    m = mats.shape[-3]
    if not 1 <= m <= cap:
        raise ResourceLimitError(f"sym_prod needs 1 <= m <= {cap}, got {m}")
    total = np.zeros(mats.shape[:-3] + mats.shape[-2:], dtype=np.complex128)
    for mask in range(1, 1 << m):
        chosen = [i for i in range(m) if mask >> i & 1]
        s = mats[..., chosen, :, :].sum(axis=-3)
        term = np.linalg.matrix_power(s, m)
        total = total + term if (m - len(chosen)) % 2 == 0 else total - term
    return total / factorial(m)


def sdet_exact(M: AlgebraMatrix, cap: int = SDET_CAP) -> np.ndarray:
    """``sum_pi sign(pi) sym_prod(M[0, pi0], ..., M[n-1, pi_{n-1}])`` over supported ``pi``."""
    n = M.n
    if n > cap:
        raise ResourceLimitError(f"sdet_exact limited to n <= {cap}")
    out = _zero_result(M)
    rows = np.arange(n)
    for cols, s in supported_permutations(M.support):
        stacked = M.cells[..., rows, list(cols), :, :]
        out = out + s * sym_prod(stacked)
    return out


def sdet_sampled_terms(M: AlgebraMatrix, pair_count: int, stream: RngStream) -> np.ndarray:
    """``n! sign(a' a^-1) prod_i M[a_i, a'_i]`` for ``pair_count`` uniform pairs ``(a, a')``.

    The ``n!`` factor makes each term unbiased for ``sdet``, whose double
    sum carries only one ``1/n!``.
    """
    if M.batch_shape:
        raise InvalidInputError("sdet_sampled works on a single matrix")
    n, d = M.n, M.d
    rng = stream.rng if isinstance(stream, RngStream) else stream
    out = np.empty((pair_count, d, d), dtype=np.complex128)
    for t in range(pair_count):
        a = rng.permutation(n)
        a2 = rng.permutation(n)
        pi = np.empty(n, dtype=int)
        pi[a] = a2  # pi = a' a^-1
        term = np.eye(d, dtype=np.complex128)
        for i in range(n):
            term = term @ M.cell(a[i], a2[i])
        out[t] = factorial(n) * _perm_sign(pi) * term
    return out


def sdet_sampled(M: AlgebraMatrix, pair_count: int, stream: RngStream) -> np.ndarray:
    return sdet_sampled_terms(M, pair_count, stream).mean(axis=0)


def _perm_sign(p: np.ndarray) -> int:
    seen = np.zeros(len(p), dtype=bool)
    parity = 0
    for s in range(len(p)):
        if not seen[s]:
            i, length = s, 0
            while not seen[i]:
                seen[i] = True
                i = p[i]
                length += 1
            parity += length - 1
    return -1 if parity % 2 else 1


def scalar_det(m) -> complex:
    """Ordinary determinant (LU with partial pivoting)."""
    return np.linalg.det(np.asarray(m, dtype=np.complex128))
