"""Permutations of ``{1..n}`` and the specific elements the moment formulas use.

A :class:`Permutation` stores its one-line images, 1-based, so ``p(i)`` reads
the same as in cycle notation. Composition is right-to-left: ``compose(p, q)(i) ==
p(q(i))``.

The ``*_array`` helpers work on stacks of 0-based image rows and exist only
to make the ``S_n^4`` and ``S_{2n}`` enumerations in :mod:`permlab.moments`
tractable.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from math import factorial
from typing import Iterable, Iterator, Sequence

import numpy as np

from .charlib import Partition
from .errors import InvalidInputError, ResourceLimitError

ENUMERATION_CAP = 10


@dataclass(frozen=True)
class Permutation:
    images: tuple[int, ...]

    def __post_init__(self) -> None:
        images = tuple(int(i) for i in self.images)
        n = len(images)
        if n < 1:
            raise InvalidInputError("permutation degree must be at least 1")
        if sorted(images) != list(range(1, n + 1)):
            raise InvalidInputError(f"{images} is not a bijection on 1..{n}")
        object.__setattr__(self, "images", images)

    @property
    def n(self) -> int:
        return len(self.images)

    def __call__(self, i: int) -> int:
        return self.images[i - 1]

    def __mul__(self, other: "Permutation") -> "Permutation":
        return compose(self, other)

    def __repr__(self) -> str:
        return f"Permutation({self.images})"

    def __str__(self) -> str:
        cyc = [c for c in self.cycles() if len(c) > 1]
        if not cyc:
            return "()"
        return "".join("(" + " ".join(map(str, c)) + ")" for c in cyc)

    @classmethod
    def identity(cls, n: int) -> "Permutation":
        return cls(tuple(range(1, n + 1)))

    @classmethod
    def from_cycles(cls, n: int, cycles: Iterable[Sequence[int]]) -> "Permutation":
        """Build from disjoint cycles, e.g. ``from_cycles(5, [(1, 2), (3, 4, 5)])``."""
        images = list(range(1, n + 1))
        seen: set[int] = set()
        for cyc in cycles:
            for a in cyc:
                if not 1 <= a <= n or a in seen:
                    raise InvalidInputError(f"bad cycle {tuple(cyc)} for degree {n}")
                seen.add(a)
            for a, b in zip(cyc, tuple(cyc[1:]) + (cyc[0],)):
                images[a - 1] = b
        return cls(tuple(images))

    def inverse(self) -> "Permutation":
        inv = [0] * self.n
        for i, j in enumerate(self.images, start=1):
            inv[j - 1] = i
        return Permutation(tuple(inv))

    def cycles(self) -> list[tuple[int, ...]]:
        """Cycles including fixed points, each starting at its smallest element."""
        seen = [False] * (self.n + 1)
        out = []
        for start in range(1, self.n + 1):
            if seen[start]:
                continue
            cyc = []
            i = start
            while not seen[i]:
                seen[i] = True
                cyc.append(i)
                i = self.images[i - 1]
            out.append(tuple(cyc))
        return out


def _same_degree(*perms: Permutation) -> int:
    degrees = {p.n for p in perms}
    if len(degrees) != 1:
        raise InvalidInputError(f"permutation degrees differ: {sorted(degrees)}")
    return degrees.pop()


def compose(p: Permutation, q: Permutation) -> Permutation:
    """``i -> p(q(i))``."""
    _same_degree(p, q)
    return Permutation(tuple(p.images[j - 1] for j in q.images))


def inverse(p: Permutation) -> Permutation:
    return p.inverse()


def conjugate(p: Permutation, q: Permutation) -> Permutation:
    """``p^q = q^{-1} p q``."""
    return compose(q.inverse(), compose(p, q))


def commutator(b: Permutation, r: Permutation) -> Permutation:
    """``[b, r] = b r b^{-1} r^{-1}``."""
    _same_degree(b, r)
    return compose(compose(b, r), compose(b.inverse(), r.inverse()))


def cycle_count(p: Permutation) -> int:
    return len(p.cycles())


def sign(p: Permutation) -> int:
    return -1 if (p.n - cycle_count(p)) % 2 else 1


def rotation(n: int) -> Permutation:
    """The n-cycle ``(1 2 ... n)``."""
    if n < 1:
        raise InvalidInputError("n must be positive")
    return Permutation(tuple(range(2, n + 1)) + (1,))


def block_embed(p: Permutation, q: Permutation) -> Permutation:
    """The element ``(p, q)`` of ``S_{2n}``: ``p`` on ``1..n`` and ``q`` on ``n+1..2n``."""
    n = _same_degree(p, q)
    return Permutation(p.images + tuple(n + j for j in q.images))


def w_involution(n: int, k: int) -> Permutation:
    """``(1 n+1)(2 n+2)...(k n+k)`` in ``S_{2n}``; ``k = 0`` gives the identity."""
    if n < 1 or not 0 <= k <= n:
        raise InvalidInputError(f"need 0 <= k <= n, got n={n}, k={k}")
    return Permutation.from_cycles(2 * n, [(i, n + i) for i in range(1, k + 1)])


def _check_cap(n: int, cap: int | None) -> None:
    cap = ENUMERATION_CAP if cap is None else cap
    if n > cap:
        raise ResourceLimitError(f"enumerating S_{n} exceeds the cap n <= {cap}")


def enumerate_sn(n: int, cap: int | None = None) -> Iterator[Permutation]:
    """Every element of ``S_n`` once, in lexicographic order of images."""
    if n < 1:
        raise InvalidInputError("n must be positive")
    _check_cap(n, cap)
    for images in itertools.permutations(range(1, n + 1)):
        yield Permutation(images)


def sample_uniform(n: int, rng: np.random.Generator) -> Permutation:
    """Fisher-Yates shuffle driven by ``rng``."""
    if n < 1:
        raise InvalidInputError("n must be positive")
    images = list(range(1, n + 1))
    for i in range(n - 1, 0, -1):
        j = int(rng.integers(0, i + 1))
        images[i], images[j] = images[j], images[i]
    return Permutation(tuple(images))


def conjugacy_class_of(p: Permutation) -> Partition:
    """Cycle type as a partition of ``n``."""
    return Partition.of([len(c) for c in p.cycles()])


# -- stacked 0-based helpers -------------------------------------------------


def permutation_array(n: int, cap: int | None = None) -> np.ndarray:
    """All of ``S_n`` as an ``(n!, n)`` array of 0-based images (lexicographic)."""
    _check_cap(n, cap)
    out = np.fromiter(
        itertools.chain.from_iterable(itertools.permutations(range(n))),
        dtype=np.int16,
        count=factorial(n) * n,
    )
    return out.reshape(factorial(n), n)


def compose_array(p: np.ndarray, q: np.ndarray) -> np.ndarray:
    """Row-wise ``i -> p(q(i))`` with broadcasting over leading axes."""
    p, q = np.broadcast_arrays(p, q)
    return np.take_along_axis(p, q.astype(np.intp), axis=-1)


def inverse_array(p: np.ndarray) -> np.ndarray:
    inv = np.empty_like(p)
    idx = np.broadcast_to(np.arange(p.shape[-1], dtype=p.dtype), p.shape)
    np.put_along_axis(inv, p.astype(np.intp), idx, axis=-1)
    return inv


def cycle_count_array(p: np.ndarray) -> np.ndarray:
    """Cycle counts of stacked permutations.

    Every point follows its orbit for ``m`` steps keeping the running
    minimum; a point is counted iff it is the minimum of its own cycle.
    """
    m = p.shape[-1]
    pos = np.broadcast_to(np.arange(m, dtype=p.dtype), p.shape).copy()
    start = pos.copy()
    low = pos.copy()
    p = p.astype(np.intp)
    for _ in range(m - 1):
        pos = np.take_along_axis(p, pos.astype(np.intp), axis=-1).astype(low.dtype)
        np.minimum(low, pos, out=low)
    return (low == start).sum(axis=-1)


def to_array(p: Permutation) -> np.ndarray:
    return np.asarray(p.images, dtype=np.int16) - 1
