"""Exact character theory of the symmetric group.

Everything here is integer or :class:`fractions.Fraction` arithmetic.
Characters come from the Murnaghan-Nakayama rule, evaluated on beta-sets
(first-column hook lengths): removing a ribbon of length ``k`` is the same as
lowering one beta-number by ``k`` onto a free position, and the ribbon's
height is the number of beta-numbers jumped over.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import comb, factorial
from typing import Callable, Iterator, Mapping, Sequence

from .errors import InvalidInputError

__all__ = [
    "Partition",
    "ClassFunction",
    "partitions",
    "hook",
    "mn_character",
    "dimension",
    "hook_dimension",
    "kostka",
    "kostka_content_sum",
    "centralizer_size",
    "class_size",
    "character",
    "inner_product",
    "convolve",
    "d_cycles_class_function",
    "n_cycle_distribution",
    "double_cycle_distribution",
    "t_n_family",
]


@dataclass(frozen=True, order=True)
class Partition:
    """Weakly decreasing tuple of positive parts.

    Doubles as a Young diagram (English convention, row ``i`` has
    ``parts[i]`` cells) and as a cycle type.
    """

    parts: tuple[int, ...]

    def __post_init__(self) -> None:
        parts = tuple(int(p) for p in self.parts)
        if any(p < 1 for p in parts):
            raise InvalidInputError(f"partition parts must be positive: {parts}")
        if any(parts[i] < parts[i + 1] for i in range(len(parts) - 1)):
            raise InvalidInputError(f"partition parts must be nonincreasing: {parts}")
        object.__setattr__(self, "parts", parts)

    @classmethod
    def of(cls, values: Sequence[int]) -> "Partition":
        """Sort ``values`` (dropping zeros) into a partition."""
        return cls(tuple(sorted((v for v in values if v), reverse=True)))

    @property
    def weight(self) -> int:
        return sum(self.parts)

    def __len__(self) -> int:
        return len(self.parts)

    def __iter__(self) -> Iterator[int]:
        return iter(self.parts)

    def __getitem__(self, i: int) -> int:
        return self.parts[i]

    def __str__(self) -> str:
        return "(" + ",".join(map(str, self.parts)) + ")"

    def conjugate(self) -> "Partition":
        if not self.parts:
            return self
        return Partition(tuple(sum(1 for p in self.parts if p > j) for j in range(self.parts[0])))

    @property
    def rank(self) -> int:
        """Number of cells on the main diagonal."""
        return sum(1 for i, p in enumerate(self.parts) if p > i)

    def characteristics(self) -> tuple[tuple[int, ...], tuple[int, ...]]:
        """Frobenius coordinates ``(arms | legs)``.

        ``arms[i]`` counts the cells right of diagonal cell ``i``, ``legs[i]``
        the cells below it.
        """
        cols = self.conjugate().parts
        r = self.rank
        return (
            tuple(self.parts[i] - i - 1 for i in range(r)),
            tuple(cols[i] - i - 1 for i in range(r)),
        )

    def is_hook(self) -> bool:
        return len(self.parts) <= 1 or self.parts[1] <= 1

    def cells(self) -> list[tuple[int, int]]:
        return [(r, c) for r, p in enumerate(self.parts) for c in range(p)]


def _as_partition(p: Partition | Sequence[int]) -> Partition:
    return p if isinstance(p, Partition) else Partition(tuple(p))


def partitions(n: int, max_part: int | None = None) -> Iterator[Partition]:
    """All partitions of ``n`` in decreasing lexicographic order."""
    if n < 0:
        raise InvalidInputError("n must be nonnegative")

    def rec(rem: int, cap: int) -> Iterator[tuple[int, ...]]:
        if rem == 0:
            yield ()
            return
        for first in range(min(rem, cap), 0, -1):
            for tail in rec(rem - first, first):
                yield (first,) + tail

    for parts in rec(n, n if max_part is None else max_part):
        yield Partition(parts)


def hook(n: int, t: int) -> Partition:
    """The hook ``(n - t, 1^t)``."""
    if not 0 <= t <= n - 1:
        raise InvalidInputError(f"hook height index t={t} outside [0, {n - 1}]")
    return Partition((n - t,) + (1,) * t)


@lru_cache(maxsize=None)
def _mn(parts: tuple[int, ...], mu: tuple[int, ...]) -> int:
    if not mu:
        return 1 if not parts else 0
    k, rest = mu[0], mu[1:]
    length = len(parts)
    beta = [parts[i] + (length - 1 - i) for i in range(length)]
    occupied = set(beta)
    total = 0
    for b in beta:
        lowered = b - k
        if lowered < 0 or lowered in occupied:
            continue
        height = sum(1 for x in beta if lowered < x < b)
        new_beta = sorted((occupied - {b}) | {lowered}, reverse=True)
        new_parts = tuple(
            v for v in (new_beta[i] - (length - 1 - i) for i in range(length)) if v > 0
        )
        total += (-1) ** height * _mn(new_parts, rest)
    return total


def mn_character(shape: Partition | Sequence[int], cycle_type: Partition | Sequence[int]) -> int:
    """Irreducible character ``chi_shape`` evaluated on the class ``cycle_type``."""
    shape, cycle_type = _as_partition(shape), _as_partition(cycle_type)
    if shape.weight != cycle_type.weight:
        raise InvalidInputError(
            f"shape {shape} and cycle type {cycle_type} have different weights"
        )
    return _mn(shape.parts, cycle_type.parts)


def dimension(shape: Partition | Sequence[int]) -> int:
    shape = _as_partition(shape)
    return mn_character(shape, (1,) * shape.weight)


def hook_dimension(n: int, t: int) -> int:
    if not 0 <= t <= n - 1:
        raise InvalidInputError(f"t={t} outside [0, {n - 1}]")
    return comb(n - 1, t)


def kostka(shape: Partition | Sequence[int], content: Sequence[int]) -> int:
    """Number of semistandard tableaux of ``shape`` with ``content[i]`` copies of ``i + 1``.

    ``content`` may be any composition; zeros are allowed. Cells are filled
    in row-major order, so each placement only has to respect its left and
    upper neighbours.
    """
    shape = _as_partition(shape)
    content = [int(c) for c in content]
    if any(c < 0 for c in content):
        raise InvalidInputError("content entries must be nonnegative")
    if shape.weight != sum(content):
        raise InvalidInputError(f"shape {shape} and content {content} have different weights")

    cells = shape.cells()
    m = len(content)
    remaining = list(content)
    grid: dict[tuple[int, int], int] = {}

    def fill(idx: int) -> int:
        if idx == len(cells):
            return 1
        r, c = cells[idx]
        lo = 1
        if c > 0:
            lo = grid[r, c - 1]
        if r > 0:
            lo = max(lo, grid[r - 1, c] + 1)
        count = 0
        for v in range(lo, m + 1):
            if remaining[v - 1]:
                remaining[v - 1] -= 1
                grid[r, c] = v
                count += fill(idx + 1)
                remaining[v - 1] += 1
        grid.pop((r, c), None)
        return count

    return fill(0)


def _arrangements(parts: Sequence[int], slots: int) -> int:
    """Number of length-``slots`` compositions whose nonzero entries sort to ``parts``."""
    if len(parts) > slots:
        return 0
    mult: dict[int, int] = {}
    for p in parts:
        mult[p] = mult.get(p, 0) + 1
    mult[0] = slots - len(parts)
    out = factorial(slots)
    for m in mult.values():
        out //= factorial(m)
    return out


def kostka_content_sum(shape: Partition | Sequence[int], d: int) -> int:
    """Sum of ``K^shape_rho`` over all contents ``rho = (rho_1..rho_d)`` of the shape's weight."""
    shape = _as_partition(shape)
    total = 0
    for rho in partitions(shape.weight):
        if len(rho) <= d:
            total += _arrangements(rho.parts, d) * kostka(shape, rho.parts)
    return total


def centralizer_size(mu: Partition | Sequence[int]) -> int:
    """``z_mu = prod_k k^{m_k} m_k!``."""
    mu = _as_partition(mu)
    mult: dict[int, int] = {}
    for p in mu:
        mult[p] = mult.get(p, 0) + 1
    z = 1
    for k, m in mult.items():
        z *= k**m * factorial(m)
    return z


def class_size(mu: Partition | Sequence[int]) -> int:
    mu = _as_partition(mu)
    return factorial(mu.weight) // centralizer_size(mu)


@dataclass(frozen=True)
class ClassFunction:
    """Exact rational-valued function on the conjugacy classes of ``S_n``."""

    n: int
    values: Mapping[Partition, Fraction] = field(default_factory=dict)

    def __post_init__(self) -> None:
        expected = set(partitions(self.n))
        if set(self.values) != expected:
            raise InvalidInputError(f"class function on S_{self.n} needs one value per cycle type")
        object.__setattr__(
            self, "values", {mu: Fraction(v) for mu, v in self.values.items()}
        )

    @classmethod
    def from_callable(cls, n: int, f: Callable[[Partition], int | Fraction]) -> "ClassFunction":
        return cls(n, {mu: Fraction(f(mu)) for mu in partitions(n)})

    def __call__(self, mu: Partition | Sequence[int]) -> Fraction:
        return self.values[_as_partition(mu)]

    def scale(self, c: int | Fraction) -> "ClassFunction":
        return ClassFunction(self.n, {mu: c * v for mu, v in self.values.items()})


def character(shape: Partition | Sequence[int]) -> ClassFunction:
    shape = _as_partition(shape)
    return ClassFunction.from_callable(shape.weight, lambda mu: mn_character(shape, mu))


def _check_degrees(f: ClassFunction, g: ClassFunction) -> None:
    if f.n != g.n:
        raise InvalidInputError(f"class functions on S_{f.n} and S_{g.n}")


def inner_product(f: ClassFunction, g: ClassFunction) -> Fraction:
    """``(1/n!) sum_g f(g)^* g(g)``, summed class by class (class weight ``1/z_mu``)."""
    _check_degrees(f, g)
    return sum(
        (f.values[mu] * g.values[mu] / centralizer_size(mu) for mu in f.values),
        Fraction(0),
    )


def convolve(f: ClassFunction, g: ClassFunction) -> ClassFunction:
    """Group convolution ``(f*g)(pi) = sum_eta f(eta) g(eta^{-1} pi)``.

    Computed in the character basis, where ``chi * chi = (n!/dim chi) chi``
    and distinct irreducibles convolve to zero.
    """
    _check_degrees(f, g)
    n = f.n
    out = {mu: Fraction(0) for mu in partitions(n)}
    for lam in partitions(n):
        chi = character(lam)
        coeff = inner_product(chi, f) * inner_product(chi, g)
        if coeff == 0:
            continue
        coeff *= Fraction(factorial(n), dimension(lam))
        for mu in out:
            out[mu] += coeff * chi.values[mu]
    return ClassFunction(n, out)


def d_cycles_class_function(n: int, d: int) -> ClassFunction:
    """``pi -> d^{c(pi)}``, the character of ``S_n`` acting on length-``n`` words over ``d`` letters."""
    if n < 1 or d < 1:
        raise InvalidInputError("n and d must be positive")
    return ClassFunction.from_callable(n, lambda mu: d ** len(mu))


def n_cycle_distribution(n: int) -> ClassFunction:
    """Uniform probability on the class of ``n``-cycles."""
    target = Partition((n,))
    return ClassFunction.from_callable(
        n, lambda mu: Fraction(1, class_size(target)) if mu == target else 0
    )


def double_cycle_distribution(n: int) -> ClassFunction:
    """Uniform probability on the class of ``(n, n)`` in ``S_{2n}``."""
    target = Partition((n, n))
    return ClassFunction.from_callable(
        2 * n, lambda mu: Fraction(1, class_size(target)) if mu == target else 0
    )


def t_n_family(n: int) -> list[tuple[Partition, int]]:
    """Partitions ``tau`` of ``2n`` with ``chi_tau(n, n) != 0``, paired with that value."""
    if n < 1:
        raise InvalidInputError("n must be positive")
    family = []
    for tau in partitions(2 * n):
        value = mn_character(tau, (n, n))
        if value:
            family.append((tau, value))
    return family
