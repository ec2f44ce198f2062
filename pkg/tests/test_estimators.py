from __future__ import annotations

import itertools
from fractions import Fraction

import numpy as np
import pytest

from permlab import moments, oracles
from permlab.errors import InvalidInputError, ResourceLimitError
from permlab.estimators import (
    KINDS,
    MATRIX_KINDS,
    EstimatorSpec,
    InstanceMatrix,
    RunStats,
    StatisticalFailure,
    build_random_instance,
    cycle_cover_square,
    evaluate,
    frobenius_consistency,
    frobenius_samples,
    run_campaign,
    ryser_permanent,
    sample_matrix_kinds,
    sample_values,
)
from permlab.linalg import RngStream, sample_gaussian

# perm = 14, exact from ryser and the naive expansion
DENSE4 = np.array([[1, 0, 1, 1], [1, 1, 1, 1], [1, 1, 1, 0], [1, 1, 1, 1]])


def within(samples, target, n_se=5.0):
    se = samples.std(ddof=1) / np.sqrt(len(samples))
    return abs(samples.mean() - target) <= n_se * se


def test_instance_matrix_validation():
    with pytest.raises(InvalidInputError):
        InstanceMatrix(np.ones((2, 3)))
    with pytest.raises(InvalidInputError):
        InstanceMatrix(np.array([[1.0, -1.0], [0.0, 1.0]]))
    with pytest.raises(InvalidInputError):
        InstanceMatrix(np.array([[np.inf]]))
    a = InstanceMatrix(np.eye(3))
    assert a == InstanceMatrix(np.eye(3)) and hash(a) == hash(InstanceMatrix(np.eye(3)))
    assert a.is_binary() and not InstanceMatrix(4 * np.eye(2)).is_binary()
    with pytest.raises(ValueError):
        a.entries[0, 0] = 2


def test_estimator_spec_validation():
    for kind in MATRIX_KINDS:
        with pytest.raises(InvalidInputError):
            EstimatorSpec(kind)
        with pytest.raises(InvalidInputError):
            EstimatorSpec(kind, "gaussian", 0)
        EstimatorSpec(kind, "haar", 2)
    with pytest.raises(InvalidInputError):
        EstimatorSpec("gg_sign", "gaussian", 2)
    with pytest.raises(InvalidInputError):
        EstimatorSpec("ryser")
    assert set(KINDS) == {"trace", "trace_sym", "frobenius", "frobenius_sym", "gg_sign", "unit_circle", "scalar_gaussian"}


def test_build_random_instance():
    spec = EstimatorSpec("trace", "gaussian", 2)
    M = build_random_instance(np.zeros((3, 3)), spec, RngStream(0))
    assert not M.support.any() and np.all(M.cells == 0)
    A = np.array([[1, 0], [1, 1]])
    M = build_random_instance(A, spec, RngStream(1))
    rho = sample_gaussian(2, RngStream(1), size=(2, 2))
    assert np.array_equal(M.support, A != 0)
    assert np.array_equal(M.cells[A != 0], rho[A != 0])
    with pytest.raises(InvalidInputError):
        build_random_instance(A, EstimatorSpec("gg_sign"), RngStream(0))


def test_entry_scaling():
    x = sample_values(np.array([[4.0]]), EstimatorSpec("trace", "gaussian", 2), 100_000, 3)
    assert within(x, 4.0)


def test_gg_sign_on_identity_is_one():
    for n in range(1, 6):
        x = sample_values(np.eye(n), EstimatorSpec("gg_sign"), 50, 7)
        assert np.all(x == 1)


def test_zero_row_gives_zero():
    A = np.ones((3, 3))
    A[1] = 0
    for kind in KINDS:
        spec = EstimatorSpec(kind, "haar", 2) if kind in MATRIX_KINDS else EstimatorSpec(kind)
        assert np.all(sample_values(A, spec, 20, 1) == 0)


def test_identity_trace_mean_is_one():
    for measure in ("gaussian", "haar"):
        x = sample_values(np.eye(1), EstimatorSpec("trace", measure, 3), 20_000, 5)
        assert within(x, 1.0)


def test_samples_nonnegative():
    A = DENSE4
    out = sample_matrix_kinds(A, MATRIX_KINDS, "gaussian", 2, 500, 11)
    for values in out.values():
        assert np.all(values >= 0)
    for kind in ("gg_sign", "unit_circle", "scalar_gaussian"):
        assert np.all(sample_values(A, EstimatorSpec(kind), 500, 11) >= 0)


def test_d1_trace_equals_frobenius():
    out = sample_matrix_kinds(DENSE4, ["trace", "frobenius", "trace_sym", "frobenius_sym"], "gaussian", 1, 300, 2)
    assert np.allclose(out["trace"], out["frobenius"])
    assert np.allclose(out["trace_sym"], out["frobenius_sym"])
    # with scalar cells the two determinants coincide
    assert np.allclose(out["trace"], out["trace_sym"])


def test_evaluate_matches_campaign_stream():
    spec = EstimatorSpec("trace_sym", "haar", 2)
    x = sample_values(DENSE4, spec, 40, 99, campaign_id=3)
    for t in (0, 17, 39):
        assert evaluate(DENSE4, spec, RngStream(99, (3, t))) == pytest.approx(x[t], rel=1e-12)
    scalar = EstimatorSpec("unit_circle")
    y = sample_values(DENSE4, scalar, 10, 99, campaign_id=3)
    assert evaluate(DENSE4, scalar, RngStream(99, (3, 4))) == pytest.approx(y[4], rel=1e-12)


def test_campaign_is_deterministic_and_chunk_independent():
    spec = EstimatorSpec("trace", "gaussian", 2)
    a = run_campaign(DENSE4, spec, 2000, 123)
    b = run_campaign(DENSE4, spec, 2000, 123)
    assert a == b
    assert a.master_seed == 123 and a.trials == 2000
    small = sample_matrix_kinds(DENSE4, ["trace"], "gaussian", 2, 2000, 123, chunk=7)["trace"]
    threaded = sample_matrix_kinds(DENSE4, ["trace"], "gaussian", 2, 2000, 123, chunk=300, workers=3)["trace"]
    big = sample_values(DENSE4, spec, 2000, 123)
    assert np.array_equal(small, big) and np.array_equal(threaded, big)
    assert run_campaign(DENSE4, spec, 2000, 124) != a
    with pytest.raises(InvalidInputError):
        run_campaign(DENSE4, spec, 1, 0)


def test_run_stats():
    x = np.array([1.0, 2.0, 3.0, 4.0])
    s = RunStats.from_samples(x, 5)
    assert s.mean == 2.5
    assert s.variance == pytest.approx(np.var(x, ddof=1))
    assert s.critical_ratio_estimate == pytest.approx(7.5 / 6.25)
    assert s.stderr_mean == pytest.approx(np.sqrt(s.variance / 4))
    assert s.critical_ratio_stderr > 0
    # constant samples have no spread at all
    c = RunStats.from_samples(np.full(10, 3.0), 0)
    assert c.variance == 0 and c.critical_ratio_estimate == pytest.approx(1)
    assert c.critical_ratio_stderr == pytest.approx(0, abs=1e-12)


def test_ryser_examples():
    assert ryser_permanent(np.eye(7, dtype=int)) == 1
    for n in range(1, 8):
        assert ryser_permanent(np.ones((n, n), dtype=int)) == np.prod(range(1, n + 1))
    assert ryser_permanent(DENSE4) == 14
    assert ryser_permanent(np.array([[0.5, 1.5], [2.0, 1.0]])) == pytest.approx(3.5)
    with pytest.raises(ResourceLimitError):
        ryser_permanent(np.zeros((21, 21)))


def test_ryser_matches_naive_expansion():
    rng = np.random.default_rng(0)
    for _ in range(20):
        A = (rng.random((6, 6)) < 0.6).astype(int)
        value = ryser_permanent(A)
        assert isinstance(value, int)
        assert value == oracles.naive_permanent(A)


def test_cycle_covers_examples():
    assert cycle_cover_square(np.eye(4, dtype=int)) == 1
    assert cycle_cover_square(np.ones((2, 2), dtype=int)) == 4
    with pytest.raises(ResourceLimitError):
        cycle_cover_square(np.eye(7))


def test_cycle_cover_identity_exhaustive_n3():
    for n in (1, 2, 3):
        for bits in itertools.product((0, 1), repeat=n * n):
            A = np.array(bits).reshape(n, n)
            assert cycle_cover_square(A) == ryser_permanent(A) ** 2


def test_cycle_cover_identity_random_n4():
    rng = np.random.default_rng(1)
    for _ in range(100):
        A = (rng.random((4, 4)) < 0.6).astype(int)
        perm = ryser_permanent(A)
        assert cycle_cover_square(A) == perm**2
        assert oracles.cover_sum_by_edge_subsets(A) == perm**2


def test_gg_sign_unbiased():
    x = sample_values(DENSE4, EstimatorSpec("gg_sign"), 100_000, 8)
    assert within(x, 14)


def test_scalar_estimators_unbiased():
    for kind in ("unit_circle", "scalar_gaussian"):
        x = sample_values(DENSE4, EstimatorSpec(kind), 50_000, 9)
        assert within(x, 14)


def test_exact_gaussian_second_moment_small_instance():
    A = np.array([[1, 1, 0], [0, 1, 1], [1, 0, 1]])
    exact = oracles.gaussian_second_moment_unsym(A, 2)
    x = sample_values(A, EstimatorSpec("trace", "gaussian", 2), 100_000, 10)
    assert within(x, 2) and within(x * x, float(exact))


def test_identity_exact_ratio_matches_oracle():
    for n in (1, 2, 3):
        assert oracles.gaussian_second_moment_unsym(np.eye(n, dtype=int), 2) == moments.unsym_identity_ratio(n, 2)
        assert moments.unsym_identity_ratio(n, 2) == Fraction(3, 2) ** n + Fraction(1, 2) ** n


@pytest.mark.slow
def test_unbiased_on_random_instance():
    spec = EstimatorSpec("trace", "gaussian", 2)
    stats = run_campaign(DENSE4, spec, 100_000, 2024)
    assert abs(stats.mean - 14) <= 5 * stats.stderr_mean
    sym = run_campaign(DENSE4, EstimatorSpec("trace_sym", "gaussian", 2), 100_000, 2024)
    target = float(moments.a_d_closed(4, 2)) * 14
    assert abs(sym.mean - target) <= 5 * sym.stderr_mean


def test_frobenius_on_identity():
    for d in (1, 2, 3):
        s = frobenius_samples(np.eye(3), "gaussian", d, 50_000, 4)
        assert within(s["frobenius"], d)
        assert within(s["trace"], 1)
        report = frobenius_consistency(np.eye(3), "gaussian", d, 0, 0, samples=s)
        assert report.holds and report.trials == 50_000


def test_frobenius_consistency_raises_on_violation():
    fake = {"trace": np.ones(100), "frobenius": np.full(100, 10.0) + np.linspace(0, 1e-3, 100)}
    with pytest.raises(StatisticalFailure, match="E\\[X_F\\]"):
        frobenius_consistency(np.eye(2), "gaussian", 2, 0, 0, samples=fake)
