"""Verification suites shared by ``permlab verify`` and the acceptance tests.

Each criterion function returns a list of :class:`Check` records. Checks
whose problem size exceeds ``cap_n`` are reported as skipped rather than
run, so lowering the cap shrinks the work without turning passes into
failures.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from math import comb
from typing import Callable

import numpy as np

from . import charlib, determinants, estimators, moments, oracles
from .linalg import RngStream, sample_gaussian, tensor_moment

PASS, FAIL, SKIP = "pass", "fail", "skip"
DEFAULT_CAP_N = 7
DEFAULT_TRIALS = 100_000
DEFAULT_SEED = 20240611


@dataclass(frozen=True)
class Check:
    criterion: int
    name: str
    status: str
    detail: str = ""

    def line(self) -> str:
        return f"[{self.status.upper()}] {self.criterion:>2} {self.name}" + (f": {self.detail}" if self.detail else "")


def _check(criterion: int, name: str, ok: bool, detail: str = "") -> Check:
    return Check(criterion, name, PASS if ok else FAIL, detail)


def _skip(criterion: int, name: str, n: int, cap_n: int) -> Check:
    return Check(criterion, name, SKIP, f"n={n} exceeds cap {cap_n}")


BATTERY: dict[str, np.ndarray] = {
    "I3": np.eye(3, dtype=int),
    "J2": np.ones((2, 2), dtype=int),
    "J3": np.ones((3, 3), dtype=int),
    "dense4": np.array([[1, 0, 1, 1], [1, 1, 1, 1], [1, 1, 1, 0], [1, 1, 1, 1]]),
    "ring4": np.array([[1, 1, 0, 0], [0, 1, 1, 0], [0, 0, 1, 1], [1, 0, 0, 1]]),
}


# -- exact criteria -------------------------------------------------------------


def a_d_routes(cap_n: int = DEFAULT_CAP_N) -> list[Check]:
    moments.clear_caches()
    out = []
    for n in range(1, 8):
        name = f"a_d three routes, n={n}, d=1..8"
        if n > cap_n:
            out.append(_skip(1, name, n, cap_n))
            continue
        bad = []
        for d in range(1, 9):
            values = (moments.a_d_closed(n, d), moments.a_d_bruteforce(n, d), moments.a_d_character(n, d))
            if len(set(values)) != 1:
                bad.append(f"d={d}: closed={values[0]} brute={values[1]} character={values[2]}")
        out.append(_check(1, name, not bad, "; ".join(bad)))
    return out


def binomial_identity(cap_n: int = DEFAULT_CAP_N) -> list[Check]:
    bad = []
    for n, d in itertools.product(range(1, 11), repeat=2):
        left, right = moments.binomial_identity_sides(n, d)
        if left != right:
            bad.append(f"(n={n}, d={d}): {left} != {right}")
    return [_check(2, "binomial identity, n,d <= 10", not bad, "; ".join(bad))]


def hook_laws(cap_n: int = DEFAULT_CAP_N) -> list[Check]:
    out = []
    for n in range(1, 8):
        name = f"hook character, dimension and Kostka laws, n={n}"
        if n > cap_n:
            out.append(_skip(3, name, n, cap_n))
            continue
        bad = []
        for t in range(n):
            lam = charlib.hook(n, t)
            chi = charlib.mn_character(lam, (n,))
            if chi != (-1) ** t:
                bad.append(f"chi_{t}(r)={chi}")
            dim = charlib.dimension(lam)
            if not dim == oracles.hook_length_dimension(lam.parts) == comb(n - 1, t):
                bad.append(f"dim chi_{t}={dim}")
            for rho in charlib.partitions(n):
                k = len(rho)
                kst = charlib.kostka(lam, rho.parts)
                if kst != comb(k - 1, t):
                    bad.append(f"K^{lam}_{rho}={kst}")
        out.append(_check(3, name, not bad, "; ".join(bad[:5])))
    return out


def a2_tilde_routes(cap_n: int = DEFAULT_CAP_N) -> list[Check]:
    out = []
    for n in range(1, 5):
        name = f"a2_tilde three routes and sandwich, n={n}, d=1..4"
        if n > cap_n:
            out.append(_skip(4, name, n, cap_n))
            continue
        bad = []
        for d in range(1, 5):
            values = (
                moments.a2_tilde_bruteforce(n, d),
                moments.a2_tilde_class(n, d),
                moments.a2_tilde_character(n, d),
            )
            if len(set(values)) != 1:
                bad.append(f"d={d}: brute={values[0]} class={values[1]} character={values[2]}")
            try:
                moments.sandwich_check(n, d)
            except moments.BoundViolation as exc:
                bad.append(str(exc))
        out.append(_check(4, name, not bad, "; ".join(bad)))
    return out


def cycle_covers(cap_n: int = DEFAULT_CAP_N, seed: int = DEFAULT_SEED) -> list[Check]:
    out = []
    for n in range(1, 4):
        name = f"cycle-cover identity, all {{0,1}} matrices n={n}"
        if n > cap_n:
            out.append(_skip(5, name, n, cap_n))
            continue
        bad = []
        for bits in itertools.product((0, 1), repeat=n * n):
            a = np.array(bits).reshape(n, n)
            if estimators.cycle_cover_square(a) != estimators.ryser_permanent(a) ** 2:
                bad.append(str(a.tolist()))
        out.append(_check(5, name, not bad, "; ".join(bad[:3])))
    name = "cycle-cover identity, 100 random n=4"
    if 4 > cap_n:
        out.append(_skip(5, name, 4, cap_n))
    else:
        rng = RngStream(seed, (5,)).rng
        bad = []
        for _ in range(100):
            a = rng.integers(0, 2, size=(4, 4))
            if estimators.cycle_cover_square(a) != estimators.ryser_permanent(a) ** 2:
                bad.append(str(a.tolist()))
        out.append(_check(5, name, not bad, "; ".join(bad[:3])))
    return out


def tensor_identities(cap_n: int = DEFAULT_CAP_N) -> list[Check]:
    out = []
    bad = [
        f"d={d}"
        for d in range(1, 6)
        if oracles.wick_gaussian_moment(1, d) != moments.cupcap_delta(d)
        or oracles.wick_gaussian_moment(2, d) != moments.gaussian_fourth_delta(d)
    ]
    out.append(_check(6, "Wick oracle equals cupcap and Gaussian fourth-moment deltas, d=1..5", not bad, ", ".join(bad)))
    lows = {d: moments.fourth_moment_sandwich(d) for d in (2, 3, 4)}
    ok = all(min(v) >= -1e-12 for v in lows.values())
    out.append(
        _check(
            6,
            "Haar fourth moment sandwich eigenvalues >= 0, d=2,3,4",
            ok,
            ", ".join(f"d={d}: {lo:.1e}/{hi:.1e}" for d, (lo, hi) in lows.items()),
        )
    )
    return out


def determinant_routes(cap_n: int = DEFAULT_CAP_N, seed: int = DEFAULT_SEED) -> list[Check]:
    out = []
    rng = RngStream(seed, (10,)).rng
    worst, ran = 0.0, 0
    for trial in range(50):
        n = 1 + trial % 3
        if n > cap_n:
            continue
        ran += 1
        cells = sample_gaussian(2, rng, (n, n))
        M = determinants.AlgebraMatrix(cells, rng.random((n, n)) < 0.85)
        ref = oracles.literal_sdet(M)
        err = np.abs(determinants.sdet_exact(M) - ref).max() / max(1.0, np.abs(ref).max())
        worst = max(worst, err)
    out.append(_check(10, "sdet_exact equals literal double sum, 50 instances n<=3 d=2", worst <= 1e-10, f"{ran} run, max rel err {worst:.1e}"))

    if 4 > cap_n:
        out.append(_skip(10, "sym_prod equals factorial average, n=4", 4, cap_n))
    else:
        mats = [sample_gaussian(2, rng) for _ in range(4)]
        ref = oracles.factorial_sym_prod(mats)
        err = np.abs(determinants.sym_prod(mats) - ref).max() / np.abs(ref).max()
        out.append(_check(10, "sym_prod equals factorial average, n=4", err <= 1e-10, f"rel err {err:.1e}"))

    worst = 0.0
    for n in range(1, min(cap_n, 5) + 1):
        M = determinants.AlgebraMatrix.from_scalars(rng.standard_normal((n, n)), 2)
        worst = max(worst, np.abs(determinants.cayley_det(M) - determinants.sdet_exact(M)).max())
    out.append(_check(10, "commutative embedding: cayley_det equals sdet_exact", worst <= 1e-12, f"max err {worst:.1e}"))
    return out


# -- statistical criteria ---------------------------------------------------------


def _z(mean: float, target: float, se: float) -> float:
    return abs(mean - target) / se if se > 0 else (0.0 if mean == target else float("inf"))


_battery_cache: dict[tuple, dict[str, np.ndarray]] = {}


def battery_samples(name: str, measure: str, d: int, trials: int, seed: int) -> dict[str, np.ndarray]:
    """Shared draws for trace, trace_sym and frobenius; cached per configuration."""
    key = (name, measure, d, trials, seed)
    if key not in _battery_cache:
        campaign = list(BATTERY).index(name) * 100 + d * 10 + (measure == "haar")
        _battery_cache[key] = estimators.sample_matrix_kinds(
            BATTERY[name], ["trace", "trace_sym", "frobenius"], measure, d, trials, seed, campaign
        )
    return _battery_cache[key]


def unbiasedness(cap_n: int = DEFAULT_CAP_N, trials: int = DEFAULT_TRIALS, seed: int = DEFAULT_SEED) -> list[Check]:
    out = []
    for name, a in BATTERY.items():
        n = a.shape[0]
        for measure, d in itertools.product(("gaussian", "haar"), (2, 3)):
            label = f"unbiased X and X_s on {name}, {measure}, d={d}"
            if n > cap_n:
                out.append(_skip(7, label, n, cap_n))
                continue
            s = battery_samples(name, measure, d, trials, seed)
            perm = estimators.ryser_permanent(a)
            x = estimators.RunStats.from_samples(s["trace"], seed)
            xs = estimators.RunStats.from_samples(s["trace_sym"], seed)
            target_s = float(moments.a_d_closed(n, d) * perm)
            z1, z2 = _z(x.mean, perm, x.stderr_mean), _z(xs.mean, target_s, xs.stderr_mean)
            out.append(
                _check(
                    7,
                    label,
                    z1 <= 5 and z2 <= 5,
                    f"X {x.mean:.4f} vs {perm} (z={z1:.2f}); X_s {xs.mean:.4f} vs {target_s:.4f} (z={z2:.2f})",
                )
            )
    return out


def identity_second_moments(cap_n: int = DEFAULT_CAP_N, trials: int = DEFAULT_TRIALS, seed: int = DEFAULT_SEED) -> list[Check]:
    out = []
    for n, d in itertools.product(range(1, 5), (2, 3)):
        label = f"critical ratio of X on I_{n}, gaussian, d={d}"
        if n > cap_n:
            out.append(_skip(8, label, n, cap_n))
            continue
        spec = estimators.EstimatorSpec("trace", "gaussian", d)
        st = estimators.run_campaign(np.eye(n), spec, trials, seed, campaign_id=800 + 10 * n + d)
        target = float(moments.unsym_identity_ratio(n, d))
        z = _z(st.critical_ratio_estimate, target, st.critical_ratio_stderr)
        out.append(_check(8, label, z <= 5, f"{st.critical_ratio_estimate:.4f}+-{st.critical_ratio_stderr:.4f} vs {target:.4f} (z={z:.2f})"))
    label = "second moment of X_s on I_3, gaussian, d=2"
    if 3 > cap_n:
        out.append(_skip(8, label, 3, cap_n))
    else:
        spec = estimators.EstimatorSpec("trace_sym", "gaussian", 2)
        st = estimators.run_campaign(np.eye(3), spec, trials, seed, campaign_id=899)
        target = float(moments.a2_bruteforce(3, 2))
        z = _z(st.second_moment, target, st.stderr_second_moment)
        out.append(_check(8, label, z <= 5, f"{st.second_moment:.4f}+-{st.stderr_second_moment:.4f} vs {target:.4f} (z={z:.2f})"))
    return out


def frobenius_sandwich(cap_n: int = DEFAULT_CAP_N, trials: int = DEFAULT_TRIALS, seed: int = DEFAULT_SEED) -> list[Check]:
    out = []
    for name, a in BATTERY.items():
        n = a.shape[0]
        for measure, d in itertools.product(("gaussian", "haar"), (2, 3)):
            label = f"Frobenius sandwich on {name}, {measure}, d={d}"
            if n > cap_n:
                out.append(_skip(9, label, n, cap_n))
                continue
            s = battery_samples(name, measure, d, trials, seed)
            try:
                rep = estimators.frobenius_consistency(a, measure, d, trials, seed, samples=s)
                out.append(
                    _check(
                        9,
                        label,
                        True,
                        f"E[X_F]/E[X]={rep.first.estimate:.3f}+-{rep.first.stderr:.3f}, "
                        f"E[X_F^2]/E[X^2]={rep.second.estimate:.3f}+-{rep.second.stderr:.3f}",
                    )
                )
            except estimators.StatisticalFailure as exc:
                out.append(_check(9, label, False, str(exc)))
    for d in (2, 3):
        label = f"E[X_F] on I_3 equals d, gaussian, d={d}"
        if 3 > cap_n:
            out.append(_skip(9, label, 3, cap_n))
            continue
        f = estimators.RunStats.from_samples(battery_samples("I3", "gaussian", d, trials, seed)["frobenius"], seed)
        z = _z(f.mean, d, f.stderr_mean)
        out.append(_check(9, label, z <= 5, f"{f.mean:.4f}+-{f.stderr_mean:.4f} (z={z:.2f})"))
    return out


def tensor_monte_carlo(cap_n: int = DEFAULT_CAP_N, trials: int = DEFAULT_TRIALS, seed: int = DEFAULT_SEED) -> list[Check]:
    out = []
    cases = [
        ("gaussian", 2, "nc", moments.cupcap_tensor(2)),
        ("gaussian", 2, "nncc", moments.gaussian_fourth_tensor(2)),
        ("haar", 2, "nncc", moments.haar_fourth_tensor(2)),
        ("haar", 3, "nncc", moments.haar_fourth_tensor(3)),
    ]
    for i, (measure, d, pattern, exact) in enumerate(cases):
        est = tensor_moment(measure, d, trials, RngStream(seed, (6, i)), pattern, chunk=2000 if d == 2 else 500)
        zr, zi = est.z_scores(exact)
        out.append(
            _check(
                6,
                f"Monte Carlo {measure} moment '{pattern}', d={d}",
                est.agrees_with(exact),
                f"max z {max(zr.max(), zi.max()):.2f} over {exact.size} entries",
            )
        )
    return out


EXACT_SUITE: dict[str, Callable[..., list[Check]]] = {
    "a_d": a_d_routes,
    "binomial": binomial_identity,
    "hooks": hook_laws,
    "a2_tilde": a2_tilde_routes,
    "covers": cycle_covers,
    "tensors": tensor_identities,
    "determinants": determinant_routes,
}
STATISTICAL_SUITE: dict[str, Callable[..., list[Check]]] = {
    "tensor_mc": tensor_monte_carlo,
    "unbiased": unbiasedness,
    "identity": identity_second_moments,
    "frobenius": frobenius_sandwich,
}
SUITES = ("all", "exact", "statistical") + tuple(EXACT_SUITE) + tuple(STATISTICAL_SUITE)


def run_suite(name: str = "all", cap_n: int = DEFAULT_CAP_N, trials: int = DEFAULT_TRIALS, seed: int = DEFAULT_SEED) -> list[Check]:
    if name not in SUITES:
        raise ValueError(f"unknown suite {name!r}; expected one of {SUITES}")
    checks: list[Check] = []
    if name in ("all", "exact") or name in EXACT_SUITE:
        for key, fn in EXACT_SUITE.items():
            if name in ("all", "exact", key):
                checks += fn(cap_n)
    if name in ("all", "statistical") or name in STATISTICAL_SUITE:
        for key, fn in STATISTICAL_SUITE.items():
            if name in ("all", "statistical", key):
                checks += fn(cap_n, trials=trials, seed=seed)
    return checks
