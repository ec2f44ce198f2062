"""Complex ``d x d`` matrices, the Gaussian and Haar measures, and seeded streams.

Matrices are plain ``complex128`` numpy arrays; leading axes are batch axes
throughout. Random draws come from :class:`RngStream`, which is keyed by a
master seed and an integer path so that any trial of any experiment can be
regenerated on its own.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import InvalidInputError

MEASURES = ("gaussian", "haar")


class RngStream:
    """A reproducible random stream identified by ``(master_seed, path)``.

    The same key always yields the same sequence. A stream is meant to be
    owned by one task; hand other tasks a :meth:`spawn`-ed child instead.
    """

    def __init__(self, master_seed: int, path: Sequence[int] = ()):
        self.master_seed = int(master_seed)
        self.path = tuple(int(p) for p in path)
        seq = np.random.SeedSequence(self.master_seed, spawn_key=self.path)
        self.rng = np.random.Generator(np.random.PCG64(seq))

    def spawn(self, *index: int) -> "RngStream":
        return RngStream(self.master_seed, self.path + tuple(index))

    def __repr__(self) -> str:
        return f"RngStream({self.master_seed}, {self.path})"


def as_matrix(a) -> np.ndarray:
    a = np.asarray(a, dtype=np.complex128)
    if a.ndim < 2 or a.shape[-1] != a.shape[-2] or a.shape[-1] < 1:
        raise InvalidInputError(f"expected square matrices, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise InvalidInputError("matrix entries must be finite")
    return a


def _same_dim(a: np.ndarray, b: np.ndarray) -> None:
    if a.shape[-1] != b.shape[-1]:
        raise InvalidInputError(f"dimension mismatch: {a.shape[-1]} vs {b.shape[-1]}")


def matmul(a, b) -> np.ndarray:
    a, b = as_matrix(a), as_matrix(b)
    _same_dim(a, b)
    return a @ b


def add(a, b) -> np.ndarray:
    a, b = as_matrix(a), as_matrix(b)
    _same_dim(a, b)
    return a + b


def scale(c: complex, a) -> np.ndarray:
    return c * as_matrix(a)


def dagger(a) -> np.ndarray:
    return np.conj(np.swapaxes(as_matrix(a), -1, -2))


def trace(a):
    return np.trace(as_matrix(a), axis1=-2, axis2=-1)


def frobenius_sq(a):
    """``||a||^2 = tr a a^dagger``, evaluated as a sum of squared moduli."""
    a = as_matrix(a)
    return np.sum(a.real**2 + a.imag**2, axis=(-2, -1))


def _batch_shape(size) -> tuple[int, ...]:
    if size is None:
        return ()
    return (size,) if isinstance(size, (int, np.integer)) else tuple(size)


def sample_gaussian(d: int, stream: RngStream | np.random.Generator, size=None) -> np.ndarray:
    """Entries i.i.d. complex normal, mean 0 and ``E|z|^2 = 1/d``."""
    if d < 1:
        raise InvalidInputError("d must be positive")
    rng = stream.rng if isinstance(stream, RngStream) else stream
    shape = _batch_shape(size) + (d, d, 2)
    x = rng.standard_normal(shape) * np.sqrt(0.5 / d)
    return x[..., 0] + 1j * x[..., 1]


def haar_from_ginibre(z: np.ndarray) -> np.ndarray:
    """Map Ginibre matrices to Haar unitaries: ``Q diag(R_ii / |R_ii|)``.

    Plain QR leaves the column phases biased by the factorization's sign
    convention; absorbing the phases of ``diag(R)`` into ``Q`` makes the
    result exactly Haar.
    """
    q, r = np.linalg.qr(z)
    diag = np.diagonal(r, axis1=-2, axis2=-1)
    phase = diag / np.abs(diag)
    return q * phase[..., None, :]


def sample_haar(d: int, stream: RngStream | np.random.Generator, size=None) -> np.ndarray:
    if d < 1:
        raise InvalidInputError("d must be positive")
    return haar_from_ginibre(sample_gaussian(d, stream, size))


def sample_measure(measure: str, d: int, stream, size=None) -> np.ndarray:
    if measure == "gaussian":
        return sample_gaussian(d, stream, size)
    if measure == "haar":
        return sample_haar(d, stream, size)
    raise InvalidInputError(f"unknown measure {measure!r}; expected one of {MEASURES}")


@dataclass(frozen=True)
class MomentEstimate:
    """Monte Carlo mean of a tensor with per-entry standard errors.

    ``se_re`` and ``se_im`` are the standard errors of the real and
    imaginary parts of each entry of ``mean``.
    """

    mean: np.ndarray
    se_re: np.ndarray
    se_im: np.ndarray
    trials: int

    def z_scores(self, expected) -> tuple[np.ndarray, np.ndarray]:
        diff = self.mean - np.asarray(expected)
        tiny = 1e-300
        return (
            np.abs(diff.real) / np.maximum(self.se_re, tiny),
            np.abs(diff.imag) / np.maximum(self.se_im, tiny),
        )

    def agrees_with(self, expected, n_se: float = 5.0, atol: float = 1e-12) -> bool:
        diff = self.mean - np.asarray(expected)
        ok_re = np.abs(diff.real) <= n_se * self.se_re + atol
        ok_im = np.abs(diff.imag) <= n_se * self.se_im + atol
        return bool(np.all(ok_re) and np.all(ok_im))


def _outer(factors: list[np.ndarray]) -> np.ndarray:
    """Batched tensor product; factor ``f`` owns output axes ``(2f, 2f + 1)``."""
    letters = "abcdefghijklmnopqrstuvwxy"
    inputs = ",".join("z" + letters[2 * f : 2 * f + 2] for f in range(len(factors)))
    out = "z" + letters[: 2 * len(factors)]
    return np.einsum(f"{inputs}->{out}", *factors)


def tensor_moment(
    measure: str,
    d: int,
    trials: int,
    stream: RngStream,
    pattern: str = "nc",
    chunk: int = 2000,
) -> MomentEstimate:
    """Estimate ``E[s1 (x) s2 (x) ...]`` for one random matrix ``s``.

    ``pattern`` has one letter per tensor factor: ``n`` for ``s`` itself and
    ``c`` for its entrywise conjugate. Axes come in (row, column) pairs per
    factor, so ``pattern="nncc"`` gives ``T[i,j,k,l,m,n,p,q] =
    E[s_ij s_kl conj(s_mn) conj(s_pq)]``.
    """
    if set(pattern) - {"n", "c"}:
        raise InvalidInputError("pattern letters must be 'n' or 'c'")
    if trials < 2:
        raise InvalidInputError("need at least two trials for a standard error")
    shape = (d,) * (2 * len(pattern))
    s1 = np.zeros(shape, dtype=np.complex128)
    s2_re = np.zeros(shape)
    s2_im = np.zeros(shape)
    done = 0
    while done < trials:
        m = min(chunk, trials - done)
        s = sample_measure(measure, d, stream, size=m)
        sc = np.conj(s)
        t = _outer([s if ch == "n" else sc for ch in pattern])
        s1 += t.sum(axis=0)
        s2_re += (t.real**2).sum(axis=0)
        s2_im += (t.imag**2).sum(axis=0)
        done += m
    mean = s1 / trials
    var_re = np.maximum(s2_re / trials - mean.real**2, 0.0) * trials / (trials - 1)
    var_im = np.maximum(s2_im / trials - mean.imag**2, 0.0) * trials / (trials - 1)
    return MomentEstimate(mean, np.sqrt(var_re / trials), np.sqrt(var_im / trials), trials)


def tensor_moment_2(measure: str, d: int, trials: int, stream: RngStream) -> MomentEstimate:
    """``E[s (x) s*]`` as ``T[i, j, k, l] = E[s_ij conj(s_kl)]``."""
    return tensor_moment(measure, d, trials, stream, "nc")


def tensor_moment_4(measure: str, d: int, trials: int, stream: RngStream) -> MomentEstimate:
    """``E[s (x) s (x) s* (x) s*]`` with axes ``(i, j, k, l, m, n, p, q)``."""
    return tensor_moment(measure, d, trials, stream, "nncc", chunk=500 if d > 2 else 2000)
