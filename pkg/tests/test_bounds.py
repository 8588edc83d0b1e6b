"""Tests for the error-bound family: closed forms, quadrature, domination.

The three-state chain with blocks {1,2} and {3} admits hand closed forms for
every bound variant, so most tests compare solver output against analytic
expressions.  Frozen exact-error values were produced by the trusted-route
oracle (series transient + exact transport) in ``tests/oracles.py``.
"""

from __future__ import annotations

import math

import numpy as np
import pytest

from wdbounds.aggregation import (
    Partition,
    partition_aggregation_ctmc,
    partition_aggregation_dtmc,
)
from wdbounds.bounds import (
    BoundInputs,
    bound_exponential,
    bound_hybrid,
    bound_linear_K,
    bound_linear_K_timevarying,
    bound_local_K,
    compute_bound_curve,
    defect,
    defect_dtmc,
    dtmc_bound_sequence,
    exact_error_curve,
    prepare_bound_inputs,
    time_grid,
)
from wdbounds.errors import NegativeTime, RateUnavailable
from wdbounds.markov import Generator, ProbVec, transient_ctmc, uniformize
from wdbounds.metric import discrete_metric, validate_metric
from wdbounds.models import random_instance

from .oracles import transient_series

TOY_Q = np.array(
    [
        [-1.0, 0.0, 1.0],
        [1.0, -4.0, 3.0],
        [0.0, 2.0, -2.0],
    ]
)
TOY_D = np.array(
    [
        [0.0, 1.0, 5.0],
        [1.0, 0.0, 4.0],
        [5.0, 4.0, 0.0],
    ]
)
TOY_BLOCKS = ((1, 2), (3,))
TOY_P0 = np.array([0.5, 0.5, 0.0])

ALL_VARIANTS = (
    "linear",
    "timevarying",
    "exp-k",
    "exp-kappa",
    "local",
    "hybrid",
    "hybrid-kappa",
)

# Exact aggregation error W1(disaggregated pi_t, p_t) for the toy chain
# started at (0.5, 0.5, 0), frozen from the series-transient + transport
# oracle route.  The curve peaks a little above 0.3 near t = 0.51.
EXACT_ANCHORS = (
    (0.51, 0.30081719),
    (0.57, 0.30055797),
    (1.0, 0.22299332),
)


@pytest.fixture(scope="module")
def toy():
    gen = Generator(TOY_Q)
    metric = validate_metric(TOY_D)
    agg = partition_aggregation_ctmc(gen, Partition(TOY_BLOCKS))
    p0 = ProbVec(TOY_P0)
    inputs = prepare_bound_inputs(gen, metric, agg, p0, with_kappa=True, with_local=True)
    return gen, metric, agg, p0, inputs


def _toy_pi_path(agg):
    pi0 = ProbVec(np.array([1.0, 0.0]))

    def pi_path(s: float) -> np.ndarray:
        return transient_ctmc(pi0, agg.theta, s).p

    return pi_path


def test_toy_bound_inputs(toy) -> None:
    _, _, _, _, inputs = toy
    assert inputs.w0 == pytest.approx(0.0, abs=1e-12)
    np.testing.assert_allclose(inputs.defect_vector, [1.0, 1.0], atol=1e-9)
    assert inputs.defect_norm == pytest.approx(1.0, abs=1e-9)
    assert inputs.k_min == pytest.approx(-14.0, abs=1e-9)
    assert inputs.K == pytest.approx(14.0, abs=1e-9)
    assert inputs.kappa_min == pytest.approx(-6.0, abs=1e-7)
    np.testing.assert_allclose(inputs.K_local, [14.0, 14.0, 0.0], atol=1e-9)
    assert inputs.d_max == pytest.approx(5.0)


def test_linear_bound_closed_form(toy) -> None:
    # W0 = 0, defect norm 1, K = 14: the linear bound grows at slope 15.
    _, _, _, _, inputs = toy
    t_grid = np.linspace(0.0, 1.0, 11)
    np.testing.assert_allclose(bound_linear_K(inputs, t_grid), 15.0 * t_grid, atol=1e-12)


def test_exponential_bound_closed_form(toy) -> None:
    _, _, _, _, inputs = toy
    t_grid = np.linspace(0.0, 0.4, 9)
    # With contraction rate kappa = k_min = -14 the bound integrates to
    # (W0 - B/kappa) e^{-kappa t} + B/kappa = (e^{14 t} - 1) / 14.
    np.testing.assert_allclose(
        bound_exponential(inputs, t_grid),
        (np.exp(14.0 * t_grid) - 1.0) / 14.0,
        rtol=1e-12,
    )
    np.testing.assert_allclose(
        bound_exponential(inputs, t_grid, rate="kappa_min"),
        (np.exp(6.0 * t_grid) - 1.0) / 6.0,
        rtol=1e-12,
    )


def test_hybrid_switch_point_and_envelope(toy) -> None:
    _, _, _, _, inputs = toy
    t_grid = np.linspace(0.0, 1.0, 201)
    hybrid = bound_hybrid(inputs, t_grid)

    # Exponential growth until the curve reaches K/|k_min| = 1, which happens
    # at t* = ln(15)/14, then linear growth at the worst-case slope B + K.
    t_star = math.log(15.0) / 14.0
    expected = np.where(
        t_grid <= t_star,
        (np.exp(14.0 * t_grid) - 1.0) / 14.0,
        1.0 + 15.0 * (t_grid - t_star),
    )
    np.testing.assert_allclose(hybrid, expected, atol=1e-12)

    # The hybrid curve never exceeds either pure bound.
    linear = bound_linear_K(inputs, t_grid)
    exponential = bound_exponential(inputs, t_grid)
    assert np.all(hybrid <= np.minimum(linear, exponential) + 1e-9)
    # It is strictly better than both somewhere past the switch.
    late = t_grid > t_star + 0.05
    assert np.all(hybrid[late] < exponential[late])


def test_timevarying_equals_linear_for_constant_defect(toy) -> None:
    # The toy defect vector is (1, 1), so pi_s . v == 1 for every distribution
    # pi_s and the time-varying integral collapses to the linear bound.  This
    # pins the quadrature against an exact value.
    _, _, agg, _, inputs = toy
    t_grid = np.linspace(0.0, 1.0, 21)
    curve = bound_linear_K_timevarying(inputs, _toy_pi_path(agg), t_grid, rate=4.0)
    np.testing.assert_allclose(curve, 15.0 * t_grid, atol=1e-8)


def test_local_bound_matches_analytic_integral(toy) -> None:
    # K_local = (14, 14, 0) and the aggregated transient from (1, 0) is
    # pi_s = (1/2 + e^{-4s}/2, 1/2 - e^{-4s}/2).  Lifting to the fine chain
    # gives integrand 1 + 7 + 7 e^{-4s}, hence 8t + (7/4)(1 - e^{-4t}).
    _, _, agg, _, inputs = toy
    t_grid = np.linspace(0.0, 1.0, 21)
    curve = bound_local_K(inputs, agg, _toy_pi_path(agg), t_grid, rate=4.0)
    analytic = 8.0 * t_grid + (7.0 / 4.0) * (1.0 - np.exp(-4.0 * t_grid))
    np.testing.assert_allclose(curve, analytic, atol=1e-6)
    # The local refinement beats the uniform linear bound at every t > 0.
    assert np.all(curve[1:] < bound_linear_K(inputs, t_grid)[1:])


def test_exact_error_curve_frozen_values(toy) -> None:
    gen, metric, agg, p0, _ = toy
    times = np.array([0.0] + [t for t, _ in EXACT_ANCHORS])
    curve = exact_error_curve(p0, gen, metric, agg, times)
    assert curve[0] == pytest.approx(0.0, abs=1e-12)
    for value, (_, expected) in zip(curve[1:], EXACT_ANCHORS):
        assert value == pytest.approx(expected, abs=1e-7)


def test_exact_error_curve_pi0_override(toy) -> None:
    # Starting the aggregated chain in the other block costs W1 between
    # (0, 0, 1) and (0.5, 0.5, 0) at time zero: 0.5 * 5 + 0.5 * 4 = 4.5.
    gen, metric, agg, p0, _ = toy
    curve = exact_error_curve(
        p0, gen, metric, agg, np.array([0.0]), pi0=ProbVec(np.array([0.0, 1.0]))
    )
    assert curve[0] == pytest.approx(4.5, abs=1e-10)


def test_all_variants_dominate_exact_on_toy(toy) -> None:
    gen, metric, agg, p0, _ = toy
    t_grid = np.linspace(0.0, 1.0, 21)
    curve = compute_bound_curve(
        gen, metric, agg, p0, t_grid, variants=ALL_VARIANTS, with_exact=True
    )
    assert sorted(curve.columns) == sorted(ALL_VARIANTS)
    for name in ALL_VARIANTS:
        assert np.all(curve.columns[name] >= curve.exact - 1e-6), name


def test_bounds_dominate_exact_randomized() -> None:
    t_grid = np.linspace(0.0, 0.8, 9)
    for seed in range(5):
        rng = np.random.default_rng(4000 + seed)
        n = int(rng.integers(3, 7))
        gen, metric, p0 = random_instance(n, 4000 + seed)
        cut = int(rng.integers(1, n))
        blocks = (tuple(range(1, cut + 1)), tuple(range(cut + 1, n + 1)))
        agg = partition_aggregation_ctmc(gen, Partition(blocks))
        curve = compute_bound_curve(
            gen, metric, agg, p0, t_grid, variants=ALL_VARIANTS, with_exact=True
        )
        for name in ALL_VARIANTS:
            gap = curve.columns[name] - curve.exact
            assert gap.min() >= -1e-6, (seed, name, gap.min())


def test_discrete_metric_toy_bounds() -> None:
    # Under the discrete metric the toy chain has k_min = 1 and K = 0, so the
    # exponential bound contracts: (W0 - 1) e^{-t} + 1 with W0 = 0, and the
    # hybrid bound coincides with it (no switch for nonnegative rates).
    gen = Generator(TOY_Q)
    metric = discrete_metric(3)
    agg = partition_aggregation_ctmc(gen, Partition(TOY_BLOCKS))
    inputs = prepare_bound_inputs(gen, metric, agg, ProbVec(TOY_P0))
    assert inputs.w0 == pytest.approx(0.0, abs=1e-12)
    assert inputs.defect_norm == pytest.approx(1.0, abs=1e-9)
    assert inputs.k_min == pytest.approx(1.0, abs=1e-9)
    assert inputs.K == pytest.approx(0.0, abs=1e-9)

    t_grid = np.linspace(0.0, 2.0, 9)
    expo = bound_exponential(inputs, t_grid)
    np.testing.assert_allclose(expo, 1.0 - np.exp(-t_grid), atol=1e-12)
    np.testing.assert_allclose(bound_hybrid(inputs, t_grid), expo, atol=1e-12)
    np.testing.assert_allclose(bound_linear_K(inputs, t_grid), t_grid, atol=1e-12)


def test_defect_vectors_ctmc_and_dtmc() -> None:
    gen = Generator(TOY_Q)
    metric = validate_metric(TOY_D)
    part = Partition(TOY_BLOCKS)
    agg = partition_aggregation_ctmc(gen, part)
    v, norm = defect(gen, metric, agg)
    np.testing.assert_allclose(v, [1.0, 1.0], atol=1e-9)
    assert norm == pytest.approx(1.0, abs=1e-9)

    # Uniformization divides the generator mismatch by the rate lambda = 4.
    pmat, lam = uniformize(gen)
    dagg = partition_aggregation_dtmc(pmat, part)
    v_d, norm_d = defect_dtmc(pmat, metric, dagg)
    np.testing.assert_allclose(v_d, v / lam, atol=1e-9)
    assert norm_d == pytest.approx(norm / lam, abs=1e-9)

    with pytest.raises(ValueError, match="no CTMC generator"):
        defect(gen, metric, dagg)
    with pytest.raises(ValueError, match="no DTMC transition matrix"):
        defect_dtmc(pmat, metric, agg)


def test_dtmc_bound_sequence_recurrence() -> None:
    # W_{k+1} = pi_k . v + (1 - kappa_P) W_k, checked by hand for two steps.
    pi_seq = np.array([[1.0, 0.0], [0.5, 0.5]])
    seq = dtmc_bound_sequence(0.5, np.array([1.0, 1.0]), 0.25, pi_seq)
    np.testing.assert_allclose(seq, [0.5, 1.375, 2.03125], atol=1e-12)

    with pytest.raises(ValueError, match="pi rows have 3 entries"):
        dtmc_bound_sequence(0.0, np.array([1.0, 1.0]), 0.1, np.array([[1.0, 0.0, 0.0]]))


def test_dtmc_bound_dominates_uniformized_error() -> None:
    # Push the uniformized toy chain for several steps and verify the DTMC
    # recurrence bound sits above the true aggregation error at each step.
    from wdbounds.curvature import kappa_dtmc
    from wdbounds.transport import wasserstein

    gen = Generator(TOY_Q)
    metric = validate_metric(TOY_D)
    part = Partition(TOY_BLOCKS)
    pmat, lam = uniformize(gen)
    dagg = partition_aggregation_dtmc(pmat, part)
    v_d, _ = defect_dtmc(pmat, metric, dagg)
    kap_p = min(kappa_dtmc(pmat, metric, r, s) for r in (1, 2, 3) for s in (1, 2, 3) if r < s)

    steps = 8
    p = np.array([1.0, 0.0, 0.0])
    pi = np.array([1.0, 0.0])
    pi_seq = np.empty((steps, 2))
    errors = []
    w0 = wasserstein(ProbVec(pi @ dagg.a), ProbVec(p), metric).value
    for k in range(steps):
        pi_seq[k] = pi
        p = p @ pmat.p
        pi = pi @ dagg.pi_mat.p
        errors.append(wasserstein(ProbVec(pi @ dagg.a), ProbVec(p), metric).value)
    seq = dtmc_bound_sequence(w0, v_d, kap_p, pi_seq)
    assert seq.shape == (steps + 1,)
    for k, err in enumerate(errors):
        assert seq[k + 1] >= err - 1e-9


def test_time_grid_and_grid_validation() -> None:
    np.testing.assert_allclose(time_grid(1.0, 5), [0.0, 0.25, 0.5, 0.75, 1.0])
    with pytest.raises(NegativeTime):
        time_grid(-1.0)
    with pytest.raises(ValueError, match="at least two grid points"):
        time_grid(1.0, 1)

    ins = BoundInputs(
        w0=0.0, defect_vector=np.array([1.0]), defect_norm=1.0, k_min=-1.0, K=1.0, d_max=5.0
    )
    with pytest.raises(ValueError, match="nondecreasing"):
        bound_linear_K(ins, np.array([0.0, 0.5, 0.4]))
    with pytest.raises(ValueError, match="empty"):
        bound_linear_K(ins, np.array([]))
    with pytest.raises(NegativeTime):
        bound_linear_K(ins, np.array([-0.1, 0.2]))


def test_missing_rates_raise(toy) -> None:
    gen, metric, agg, p0, _ = toy
    plain = prepare_bound_inputs(gen, metric, agg, p0)
    assert plain.kappa_min is None and plain.K_local is None
    t_grid = np.linspace(0.0, 1.0, 5)
    with pytest.raises(RateUnavailable):
        bound_exponential(plain, t_grid, rate="kappa_min")
    with pytest.raises(ValueError, match="unknown rate"):
        bound_exponential(plain, t_grid, rate="steepest")
    with pytest.raises(ValueError, match="K_local"):
        bound_local_K(plain, agg, _toy_pi_path(agg), t_grid, rate=4.0)


def test_hybrid_and_exponential_edge_cases() -> None:
    t_grid = np.array([0.0, 0.5, 1.0])
    # Start above the switch level K/|k_min| = 1: immediately linear.
    high = BoundInputs(
        w0=2.0, defect_vector=np.array([1.0]), defect_norm=1.0, k_min=-14.0, K=14.0, d_max=50.0
    )
    np.testing.assert_allclose(bound_hybrid(high, t_grid), 2.0 + 15.0 * t_grid, atol=1e-12)
    # Zero initial error and zero defect: the bound is identically zero even
    # though the curvature rate is negative.
    null = BoundInputs(
        w0=0.0, defect_vector=np.zeros(1), defect_norm=0.0, k_min=-2.0, K=3.0, d_max=5.0
    )
    np.testing.assert_allclose(bound_hybrid(null, t_grid), 0.0, atol=1e-15)
    # kappa = 0 degenerates the exponential bound to W0 + B t.
    flat = BoundInputs(
        w0=1.0, defect_vector=np.array([2.0]), defect_norm=2.0, k_min=0.0, K=1.0, d_max=9.0
    )
    np.testing.assert_allclose(bound_exponential(flat, t_grid), 1.0 + 2.0 * t_grid, atol=1e-12)


def test_compute_bound_curve_interface(toy) -> None:
    gen, metric, agg, p0, _ = toy
    t_grid = time_grid(1.0, 5)
    curve = compute_bound_curve(gen, metric, agg, p0, t_grid, variants=("exp-k", "linear"))
    assert curve.exact is None
    assert curve.d_max == pytest.approx(5.0)
    np.testing.assert_allclose(curve.t, t_grid)
    # Clipping caps every column at the metric diameter; the exploding
    # exponential bound saturates at 5 well before t = 1.
    clipped = curve.clipped()
    assert set(clipped) == {"exp-k", "linear"}
    assert clipped["exp-k"][-1] == pytest.approx(5.0)
    assert np.all(clipped["exp-k"] <= 5.0 + 1e-12)
    raw_tail = curve.columns["exp-k"][-1]
    assert raw_tail > 5.0  # raw column kept intact

    with pytest.raises(ValueError, match="unknown bound variants"):
        compute_bound_curve(gen, metric, agg, p0, t_grid, variants=("spline",))


def test_exact_error_against_series_oracle(toy) -> None:
    # Cross-check exact_error_curve at one interior time with an independent
    # series transient for both the fine and aggregated chains.
    gen, metric, agg, p0, _ = toy
    from wdbounds.transport import wasserstein

    t = 0.3
    curve = exact_error_curve(p0, gen, metric, agg, np.array([t]))
    p_t = transient_series(TOY_P0, TOY_Q, t)
    pi_t = transient_series(np.array([1.0, 0.0]), np.asarray(agg.theta.q), t)
    oracle = wasserstein(ProbVec(pi_t @ agg.a), ProbVec(p_t), metric).value
    assert curve[0] == pytest.approx(oracle, abs=1e-9)
