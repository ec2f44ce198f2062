"""Random instances, estimator samples, seeded campaigns and permanent oracles.

Trial ``t`` of a campaign draws from its own stream ``(master_seed,
(campaign_id, t))``, so a campaign's samples do not depend on chunking or on
how many worker threads evaluate them. All matrix kinds evaluated in one
call share the same draws, which is what makes paired comparisons such as
Frobenius against trace cheap.
"""

from __future__ import annotations

import itertools
from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import determinants
from .determinants import AlgebraMatrix
from .errors import InvalidInputError, ResourceLimitError
from .linalg import MEASURES, RngStream, haar_from_ginibre, sample_gaussian, sample_measure

MATRIX_KINDS = ("trace", "trace_sym", "frobenius", "frobenius_sym")
SCALAR_KINDS = ("gg_sign", "unit_circle", "scalar_gaussian")
KINDS = MATRIX_KINDS + SCALAR_KINDS
RYSER_CAP = 20
COVER_CAP = 6


@dataclass(frozen=True, eq=False)
class InstanceMatrix:
    entries: np.ndarray

    def __post_init__(self) -> None:
        a = np.array(self.entries, dtype=float)
        if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] < 1:
            raise InvalidInputError(f"instance must be a nonempty square matrix, got shape {a.shape}")
        if not np.all(np.isfinite(a)) or np.any(a < 0):
            raise InvalidInputError("instance entries must be finite and nonnegative")
        a.setflags(write=False)
        object.__setattr__(self, "entries", a)

    @property
    def n(self) -> int:
        return self.entries.shape[0]

    def __eq__(self, other: object) -> bool:
        return isinstance(other, InstanceMatrix) and np.array_equal(self.entries, other.entries)

    def __hash__(self) -> int:
        return hash(self.entries.tobytes())

    def is_binary(self) -> bool:
        return bool(np.all((self.entries == 0) | (self.entries == 1)))


def _instance(A) -> InstanceMatrix:
    return A if isinstance(A, InstanceMatrix) else InstanceMatrix(A)


@dataclass(frozen=True)
class EstimatorSpec:
    kind: str
    measure: str | None = None
    d: int | None = None

    def __post_init__(self) -> None:
        if self.kind not in KINDS:
            raise InvalidInputError(f"unknown estimator {self.kind!r}; expected one of {KINDS}")
        if self.is_matrix_kind:
            if self.measure not in MEASURES:
                raise InvalidInputError(f"{self.kind} needs a measure in {MEASURES}")
            if not isinstance(self.d, (int, np.integer)) or self.d < 1:
                raise InvalidInputError(f"{self.kind} needs a positive integer d")
        elif self.measure is not None or self.d is not None:
            raise InvalidInputError(f"{self.kind} is a scalar estimator and takes no measure or d")

    @property
    def is_matrix_kind(self) -> bool:
        return self.kind in MATRIX_KINDS


def _trial_stream(master_seed: int, campaign_id: int, t: int) -> RngStream:
    return RngStream(master_seed, (campaign_id, t))


def build_random_instance(A, spec: EstimatorSpec, stream: RngStream) -> AlgebraMatrix:
    """Cell ``(i, j)`` is ``sqrt(A_ij) rho_ij``; zero entries stay zero."""
    A = _instance(A)
    if not spec.is_matrix_kind:
        raise InvalidInputError("build_random_instance needs a matrix estimator")
    rho = sample_measure(spec.measure, spec.d, stream, size=(A.n, A.n))
    return AlgebraMatrix(np.sqrt(A.entries)[:, :, None, None] * rho, A.entries != 0)


def _matrix_values(M: AlgebraMatrix, kinds: Sequence[str]) -> dict[str, np.ndarray]:
    out = {}
    if "trace" in kinds or "frobenius" in kinds:
        det = determinants.cayley_det(M)
        if "trace" in kinds:
            out["trace"] = np.abs(np.trace(det, axis1=-2, axis2=-1)) ** 2
        if "frobenius" in kinds:
            out["frobenius"] = np.sum(np.abs(det) ** 2, axis=(-2, -1))
    if "trace_sym" in kinds or "frobenius_sym" in kinds:
        sdet = determinants.sdet_exact(M)
        if "trace_sym" in kinds:
            out["trace_sym"] = np.abs(np.trace(sdet, axis1=-2, axis2=-1)) ** 2
        if "frobenius_sym" in kinds:
            out["frobenius_sym"] = np.sum(np.abs(sdet) ** 2, axis=(-2, -1))
    return out


def _scalar_draw(A: InstanceMatrix, kind: str, rng: np.random.Generator) -> np.ndarray:
    n = A.n
    if kind == "gg_sign":
        noise = rng.choice([-1.0, 1.0], size=(n, n))
    elif kind == "unit_circle":
        noise = np.exp(2j * np.pi * rng.random((n, n)))
    else:
        noise = (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / np.sqrt(2)
    return np.sqrt(A.entries) * noise


def evaluate(A, spec: EstimatorSpec, stream: RngStream) -> float:
    """One sample of the estimator."""
    A = _instance(A)
    if spec.is_matrix_kind:
        return float(_matrix_values(build_random_instance(A, spec, stream), [spec.kind])[spec.kind])
    return float(abs(determinants.scalar_det(_scalar_draw(A, spec.kind, stream.rng))) ** 2)


def sample_matrix_kinds(
    A,
    kinds: Sequence[str],
    measure: str,
    d: int,
    trials: int,
    master_seed: int,
    campaign_id: int = 0,
    chunk: int = 4096,
    workers: int = 1,
) -> dict[str, np.ndarray]:
    """Samples of several matrix kinds on shared draws, one row per trial."""
    A = _instance(A)
    for kind in kinds:
        EstimatorSpec(kind, measure, d)
    n = A.n
    scale = np.sqrt(A.entries)[:, :, None, None]
    support = A.entries != 0

    def run(start: int) -> dict[str, np.ndarray]:
        stop = min(start + chunk, trials)
        raw = np.stack(
            [sample_gaussian(d, _trial_stream(master_seed, campaign_id, t), (n, n)) for t in range(start, stop)]
        )
        # sample_haar(d, s, size) == haar_from_ginibre(sample_gaussian(d, s, size))
        rho = haar_from_ginibre(raw) if measure == "haar" else raw
        return _matrix_values(AlgebraMatrix(scale * rho, support), kinds)

    starts = range(0, trials, chunk)
    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            parts = list(pool.map(run, starts))
    else:
        parts = [run(s) for s in starts]
    return {k: np.concatenate([p[k] for p in parts]) for k in kinds}


def sample_values(A, spec: EstimatorSpec, trials: int, master_seed: int, campaign_id: int = 0, workers: int = 1) -> np.ndarray:
    A = _instance(A)
    if spec.is_matrix_kind:
        return sample_matrix_kinds(A, [spec.kind], spec.measure, spec.d, trials, master_seed, campaign_id, workers=workers)[spec.kind]
    out = np.empty(trials)
    for t in range(trials):
        rng = _trial_stream(master_seed, campaign_id, t).rng
        out[t] = abs(determinants.scalar_det(_scalar_draw(A, spec.kind, rng))) ** 2
    return out


@dataclass(frozen=True)
class RunStats:
    trials: int
    mean: float
    variance: float
    critical_ratio_estimate: float
    stderr_mean: float
    master_seed: int
    second_moment: float
    stderr_second_moment: float
    critical_ratio_stderr: float

    @classmethod
    def from_samples(cls, x, master_seed: int) -> "RunStats":
        x = np.asarray(x, dtype=float)
        n = len(x)
        if n < 2:
            raise InvalidInputError("need at least two samples")
        s1, s2 = np.sum(x), np.sum(x * x)
        mean, m2 = s1 / n, s2 / n
        var = float(np.var(x, ddof=1))
        # jackknife for m2 / m1^2 from closed-form leave-one-out moments
        with np.errstate(divide="ignore", invalid="ignore"):
            loo = ((s2 - x * x) / (n - 1)) / ((s1 - x) / (n - 1)) ** 2
            ratio = m2 / mean**2 if mean != 0 else float("nan")
            ratio_se = float(np.sqrt((n - 1) / n * np.sum((loo - loo.mean()) ** 2)))
        return cls(
            trials=n,
            mean=float(mean),
            variance=var,
            critical_ratio_estimate=float(ratio),
            stderr_mean=float(np.sqrt(var / n)),
            master_seed=int(master_seed),
            second_moment=float(m2),
            stderr_second_moment=float(np.std(x * x, ddof=1) / np.sqrt(n)),
            critical_ratio_stderr=ratio_se,
        )


def run_campaign(A, spec: EstimatorSpec, trials: int, master_seed: int, campaign_id: int = 0, workers: int = 1) -> RunStats:
    if trials < 2:
        raise InvalidInputError("a campaign needs at least two trials")
    return RunStats.from_samples(sample_values(A, spec, trials, master_seed, campaign_id, workers), master_seed)


# -- exact oracles ------------------------------------------------------------


def ryser_permanent(A):
    """Ryser's formula with Gray-code column sums; exact ``int`` for integer input."""
    a = np.asarray(A.entries if isinstance(A, InstanceMatrix) else A)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise InvalidInputError("permanent needs a square matrix")
    n = a.shape[0]
    if n > RYSER_CAP:
        raise ResourceLimitError(f"ryser_permanent limited to n <= {RYSER_CAP}")
    if n == 0:
        return 1
    integral = np.all(np.isreal(a)) and np.all(np.real(a) == np.round(np.real(a)))
    rows = [[int(round(v.real)) for v in r] for r in a] if integral else [list(r) for r in a]
    sums = [0] * n
    total = 0
    subset = 0
    for k in range(1, 1 << n):
        j = (k & -k).bit_length() - 1  # the column whose membership flips
        subset ^= 1 << j
        sign = 1 if subset >> j & 1 else -1
        for i in range(n):
            sums[i] += sign * rows[i][j]
        term = 1
        for s in sums:
            term *= s
        total += -term if (n - bin(subset).count("1")) % 2 else term
    return total


def _supported_perms(a: np.ndarray) -> list[tuple[int, ...]]:
    return [cols for cols, _ in determinants.supported_permutations(a != 0)]


def cycle_cover_square(A) -> int:
    """``sum_C 2^{t(C)}`` over double cycle covers of a {0,1} matrix.

    Ordered pairs ``(alpha, beta)`` of supported permutations are grouped by
    the edge multiset they cover; ``t`` is the number of cycles formed by the
    edges used once, and each cover must arise from exactly ``2^t`` pairs.
    """
    a = np.asarray(A.entries if isinstance(A, InstanceMatrix) else A)
    n = a.shape[0]
    if n > COVER_CAP:
        raise ResourceLimitError(f"cycle_cover_square limited to n <= {COVER_CAP}")
    perms = _supported_perms(a)
    covers: Counter = Counter()
    for alpha, beta in itertools.product(perms, repeat=2):
        edges = Counter((i, alpha[i]) for i in range(n)) + Counter((i, beta[i]) for i in range(n))
        covers[tuple(sorted(edges.items()))] += 1
    total = 0
    for cover, count in covers.items():
        single = [e for e, m in cover if m == 1]
        t = _component_count(single, n)
        if count != 2**t:
            raise AssertionError(f"cover {cover} arises {count} times, expected 2^{t}")
        total += 2**t
    return total


def _component_count(edges: list[tuple[int, int]], n: int) -> int:
    """Connected components of the bipartite graph spanned by ``edges`` (touched vertices only)."""
    parent = {}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for i, j in edges:
        for v in (("L", i), ("R", j)):
            parent.setdefault(v, v)
        ra, rb = find(("L", i)), find(("R", j))
        if ra != rb:
            parent[ra] = rb
    return sum(1 for v in parent if find(v) == v)


# -- Frobenius comparison -----------------------------------------------------


class StatisticalFailure(AssertionError):
    pass


@dataclass(frozen=True)
class PairedRatio:
    """``E[num] / E[den]`` from paired samples, with a delta-method standard error."""

    estimate: float
    stderr: float
    numerator: float
    numerator_se: float
    denominator: float
    denominator_se: float

    @classmethod
    def from_samples(cls, num: np.ndarray, den: np.ndarray) -> "PairedRatio":
        n = len(num)
        mu_n, mu_d = float(np.mean(num)), float(np.mean(den))
        r = mu_n / mu_d
        se = float(np.std(num - r * den, ddof=1) / np.sqrt(n) / abs(mu_d))
        return cls(
            r,
            se,
            mu_n,
            float(np.std(num, ddof=1) / np.sqrt(n)),
            mu_d,
            float(np.std(den, ddof=1) / np.sqrt(n)),
        )

    def within(self, lo: float, hi: float, n_se: float = 5.0) -> bool:
        slack = n_se * self.stderr
        return lo - slack <= self.estimate <= hi + slack


@dataclass(frozen=True)
class FrobeniusReport:
    d: int
    first: PairedRatio
    second: PairedRatio
    trials: int

    @property
    def holds(self) -> bool:
        d = self.d
        return self.first.within(1 / d, d) and self.second.within(1 / d**2, d**2)


def frobenius_samples(A, measure: str, d: int, trials: int, master_seed: int, campaign_id: int = 0) -> dict[str, np.ndarray]:
    return sample_matrix_kinds(A, ["trace", "frobenius"], measure, d, trials, master_seed, campaign_id)


def frobenius_consistency(
    A, measure: str, d: int, trials: int, master_seed: int, campaign_id: int = 0, samples=None
) -> FrobeniusReport:
    """Check ``1/d <= E[X_F]/E[X] <= d`` and ``1/d^2 <= E[X_F^2]/E[X^2] <= d^2`` within 5 SE."""
    s = samples if samples is not None else frobenius_samples(A, measure, d, trials, master_seed, campaign_id)
    x, f = s["trace"], s["frobenius"]
    report = FrobeniusReport(d, PairedRatio.from_samples(f, x), PairedRatio.from_samples(f * f, x * x), len(x))
    if not report.holds:
        raise StatisticalFailure(
            f"Frobenius sandwich fails (d={d}, {measure}): "
            f"E[X_F]={report.first.numerator:.6g}+-{report.first.numerator_se:.2g}, "
            f"E[X]={report.first.denominator:.6g}+-{report.first.denominator_se:.2g}, "
            f"ratio {report.first.estimate:.4g}+-{report.first.stderr:.2g}; "
            f"E[X_F^2]={report.second.numerator:.6g}, E[X^2]={report.second.denominator:.6g}, "
            f"ratio {report.second.estimate:.4g}+-{report.second.stderr:.2g}"
        )
    return report
