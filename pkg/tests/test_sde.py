"""Unit tests for path simulation and the Monte Carlo estimators."""

from __future__ import annotations

import math

import numpy as np
import orjson
import pytest
from pydantic import ValidationError

from src.config import MonteCarloConfig
from src.errors import SchemeError, SimulationError
from src.models.payoff import PayoffKind, PayoffSpec
from src.models.volatility import VolatilityModel, parse_volatility
from src.sde import (
    MCEstimate,
    MonteCarloParams,
    Scheme,
    StoppingSpec,
    estimate_minimal_price,
    estimate_payoff_expectation,
    extrapolate_ladder,
    inverse_bessel_exact,
    martingale_defect,
    psi_bound_check,
    put_call_parity_gap,
    simulate_paths,
)
from src.sde.closed_form import black_scholes, inverse_bessel_defect, inverse_bessel_mean, minimal_closed_form
from src.sde.rng import block_generator, block_layout, run_blocks


def _se(values: np.ndarray) -> float:
    return float(np.std(values, ddof=1) / math.sqrt(values.size))


class TestRng:
    def test_block_layout(self) -> None:
        assert block_layout(10, 4) == [(0, 4), (4, 8), (8, 10)]
        assert block_layout(4, 4) == [(0, 4)]

    def test_blocks_are_distinct_streams(self) -> None:
        a = block_generator(1, 0).standard_normal(4)
        b = block_generator(1, 1).standard_normal(4)
        assert not np.array_equal(a, b)
        np.testing.assert_array_equal(a, block_generator(1, 0).standard_normal(4))

    def test_run_blocks_keeps_order(self) -> None:
        out = run_blocks(lambda block, m: (block, m), n_paths=10, block_size=3, workers=4)
        assert out == [(0, 3), (1, 3), (2, 3), (3, 1)]

    @pytest.mark.parametrize("workers", [1, 4, 8])
    def test_bit_identical_across_workers(self, gbm: VolatilityModel, workers: int) -> None:
        reference = simulate_paths(gbm, 1.0, 0.0, 1.0, 20, 5000, 11, block_size=700)
        batch = simulate_paths(gbm, 1.0, 0.0, 1.0, 20, 5000, 11, block_size=700, workers=workers)
        np.testing.assert_array_equal(batch.terminal_values, reference.terminal_values)
        np.testing.assert_array_equal(batch.running_max, reference.running_max)


class TestSimulatePaths:
    def test_martingale_mean(self, gbm: VolatilityModel) -> None:
        batch = simulate_paths(gbm, 1.0, 0.0, 1.0, 200, 20_000, 3)
        xt = batch.terminal_values
        assert abs(xt.mean() - 1.0) <= 3 * _se(xt)

    def test_terminal_nonnegative_and_absorbed_zero(self) -> None:
        model = VolatilityModel.cev(alpha=1.0, p=0.5)
        batch = simulate_paths(model, 0.2, 0.0, 1.0, 100, 5000, 5)
        assert np.all(batch.terminal_values >= 0)
        assert np.any(batch.absorption_flags)
        assert np.all(batch.terminal_values[batch.absorption_flags] == 0.0)

    def test_one_step_scheme_definition(self) -> None:
        model = parse_volatility("1 + x")
        batch = simulate_paths(model, 0.5, 0.0, 4.0, 1, 1000, 9, block_size=1000)
        z = block_generator(9, 0).standard_normal(1000)
        expected = np.maximum(0.5 + 1.5 * 2.0 * z, 0.0)
        np.testing.assert_allclose(batch.terminal_values, expected, rtol=0, atol=1e-15)
        np.testing.assert_array_equal(batch.absorption_flags, expected == 0.0)

    def test_barrier_freezing(self, gbm: VolatilityModel) -> None:
        batch = simulate_paths(gbm, 1.0, 0.0, 1.0, 200, 5000, 4, StoppingSpec(levels=(2,)))
        record = batch.barrier(2)
        exited = ~np.isnan(record.exit_times)
        assert np.any(exited)
        assert np.all((record.stopped_values[exited] >= 2.0) | (record.stopped_values[exited] <= 0.5))
        assert np.all(record.stopped_values[exited] < 2.0 * 1.5)
        inside = record.stopped_values[~exited]
        assert np.all((inside > 0.5) & (inside < 2.0))
        np.testing.assert_array_equal(record.exited_upper, exited & (record.stopped_values >= 2.0))

    def test_stopped_chain_is_martingale(self, gbm: VolatilityModel) -> None:
        batch = simulate_paths(gbm, 1.0, 0.0, 1.0, 200, 20_000, 8, StoppingSpec(levels=(2,)))
        stopped = batch.barrier(2).stopped_values
        assert abs(stopped.mean() - 1.0) <= 4 * _se(stopped)

    def test_missing_barrier(self, gbm: VolatilityModel) -> None:
        batch = simulate_paths(gbm, 1.0, 0.0, 1.0, 10, 100, 4)
        with pytest.raises(KeyError):
            batch.barrier(2)

    def test_invalid_inputs(self, gbm: VolatilityModel) -> None:
        with pytest.raises(ValueError):
            simulate_paths(gbm, 0.0, 0.0, 1.0, 10, 100, 1)
        with pytest.raises(ValueError):
            simulate_paths(gbm, 1.0, 1.0, 1.0, 10, 100, 1)
        with pytest.raises(ValueError):
            simulate_paths(gbm, 1.0, 0.0, 1.0, 0, 100, 1)

    def test_exact_scheme_needs_oracle(self, gbm: VolatilityModel) -> None:
        with pytest.raises(SchemeError):
            simulate_paths(gbm, 1.0, 0.0, 1.0, 1, 100, 1, scheme=Scheme.INVERSE_BESSEL_EXACT)

    def test_non_finite_sigma_aborts(self) -> None:
        model = parse_volatility("1 / (x - 1)", validate=False)
        with pytest.raises(SimulationError, match="not finite"):
            simulate_paths(model, 1.0, 0.0, 1.0, 10, 100, 1)

    def test_exploding_paths_are_flagged_not_fatal(self) -> None:
        config = MonteCarloConfig().model_copy(update={"overflow_max_fraction": 1.0})
        batch = simulate_paths(VolatilityModel.cev(alpha=1.0, p=3.0), 1.0, 0.0, 1.0, 200, 20_000, 1, config=config)
        assert batch.overflow_count > 0
        assert batch.n_paths + batch.overflow_count == 20_000
        assert np.all(np.isfinite(batch.terminal_values))
        assert np.all(np.isfinite(batch.running_max))

    def test_nan_sigma_aborts(self) -> None:
        model = parse_volatility("sqrt(x - 2)", validate=False)
        with pytest.raises(SimulationError, match="not finite"):
            simulate_paths(model, 1.0, 0.0, 1.0, 10, 100, 1)

    def test_stop_above_freezes_instead_of_overflowing(self) -> None:
        model = VolatilityModel.cev(alpha=1.0, p=3.0)
        batch = simulate_paths(model, 1.0, 0.0, 1.0, 200, 20_000, 1, stop_above=16.0)
        assert batch.overflow_count == 0
        assert batch.n_paths == 20_000
        stopped = batch.running_max >= 16.0
        assert np.any(stopped)
        assert np.all(batch.terminal_values[stopped] >= 16.0)
        assert np.all(batch.running_max[~stopped] < 16.0)

    def test_stop_above_range(self, gbm: VolatilityModel) -> None:
        with pytest.raises(ValueError, match="stop_above"):
            simulate_paths(gbm, 1.0, 0.0, 1.0, 10, 100, 1, stop_above=0.0)

    def test_overflow_beyond_fraction_aborts(self, gbm: VolatilityModel) -> None:
        config = MonteCarloConfig().model_copy(update={"overflow_threshold": 3.0})
        with pytest.raises(SimulationError, match="overflowed"):
            simulate_paths(gbm, 1.0, 0.0, 1.0, 50, 2000, 1, config=config)

    def test_overflowed_paths_are_dropped(self, gbm: VolatilityModel) -> None:
        config = MonteCarloConfig().model_copy(update={"overflow_threshold": 3.0, "overflow_max_fraction": 1.0})
        batch = simulate_paths(gbm, 1.0, 0.0, 1.0, 50, 2000, 1, config=config)
        assert batch.overflow_count > 0
        assert batch.n_paths == 2000 - batch.overflow_count
        assert batch.absorption_flags.size == batch.running_max.size == batch.n_paths

    def test_json_records_seed(self, gbm: VolatilityModel) -> None:
        batch = simulate_paths(gbm, 1.0, 0.0, 1.0, 5, 10, 42)
        data = orjson.loads(batch.to_json())
        assert data["rng"]["seed"] == 42
        assert data["rng"]["generator"] == "philox"
        assert len(data["terminal_values"]) == 10


class TestInverseBessel:
    @pytest.mark.parametrize("x0,expected", [(1.0, 0.682689), (0.5, 0.477250)])
    def test_terminal_mean(self, x0: float, expected: float) -> None:
        xt = inverse_bessel_exact(x0, 0.0, 1.0, 50_000, 21).terminal_values
        assert abs(xt.mean() - expected) <= 3 * _se(xt)

    def test_short_horizon(self) -> None:
        xt = inverse_bessel_exact(1.0, 0.0, 1e-8, 10_000, 2).terminal_values
        assert xt.mean() == pytest.approx(1.0, abs=1e-3)

    def test_alpha_scaling(self) -> None:
        xt = inverse_bessel_exact(1.0, 0.0, 1.0, 50_000, 5, alpha=2.0).terminal_values
        assert abs(xt.mean() - float(inverse_bessel_mean(1.0, 1.0, 2.0))) <= 3 * _se(xt)

    def test_path_mode_tracks_barriers(self) -> None:
        batch = inverse_bessel_exact(1.0, 0.0, 1.0, 2000, 5, n_steps=100, barriers=StoppingSpec(levels=(4,)))
        assert batch.n_steps == 100
        assert np.all(batch.running_max >= 1.0)
        assert batch.barrier(4).stopped_values.size == batch.n_paths


class TestClosedForms:
    def test_inverse_bessel_mean_plus_defect_is_x(self) -> None:
        xs = np.array([0.1, 1.0, 3.0])
        np.testing.assert_allclose(inverse_bessel_mean(xs, 0.7) + inverse_bessel_defect(xs, 0.7), xs, rtol=1e-12)

    def test_defect_values(self) -> None:
        assert float(inverse_bessel_defect(1.0, 1.0)) == pytest.approx(0.317311, abs=1e-6)
        assert float(inverse_bessel_defect(0.5, 1.0)) == pytest.approx(0.022750, abs=1e-6)

    def test_black_scholes_atm(self) -> None:
        assert float(black_scholes(1.0, 1.0, 1.0, 1.0)) == pytest.approx(0.382925, abs=1e-6)

    def test_black_scholes_parity(self) -> None:
        call = black_scholes(1.3, 0.5, 1.0, 0.8)
        put = black_scholes(1.3, 0.5, 1.0, 0.8, kind=PayoffKind.PUT)
        assert float(call - put) == pytest.approx(0.3, abs=1e-12)

    def test_minimal_closed_form_lookup(self, gbm: VolatilityModel, cev2: VolatilityModel) -> None:
        assert minimal_closed_form(cev2, PayoffSpec.identity()) is not None
        assert minimal_closed_form(gbm, PayoffSpec.call(1.0)) is not None
        assert minimal_closed_form(cev2, PayoffSpec.call(1.0)) is None
        constant = minimal_closed_form(cev2, PayoffSpec.const(2.0))
        assert constant is not None
        np.testing.assert_array_equal(constant(np.array([1.0, 5.0]), np.array([1.0, 1.0])), [2.0, 2.0])


class TestMonteCarloParams:
    def test_steps_for(self) -> None:
        params = MonteCarloParams(n_paths=10, seed=1, steps_per_unit_time=100)
        assert params.steps_for(0.5) == 50
        assert params.steps_for(1e-9) == 1
        assert params.model_copy(update={"n_steps": 7}).steps_for(3.0) == 7

    def test_rejects_nonpositive_paths(self) -> None:
        with pytest.raises(ValidationError):
            MonteCarloParams(n_paths=0, seed=1)

    def test_stopping_levels_sorted(self) -> None:
        assert StoppingSpec(levels=(8, 2, 4, 2)).levels == (2, 4, 8)
        with pytest.raises(ValidationError):
            StoppingSpec(levels=())

    def test_estimate_interval(self) -> None:
        est = MCEstimate.from_samples(np.array([1.0, 2.0, 3.0, 4.0]))
        assert est.mean == 2.5
        assert est.stderr == pytest.approx(math.sqrt(5.0 / 3.0) / 2.0)
        assert est.ci95[0] < 2.5 < est.ci95[1]


class TestEstimators:
    def test_black_scholes_call(self, gbm: VolatilityModel, call1: PayoffSpec, small_mc: MonteCarloParams) -> None:
        est = estimate_payoff_expectation(gbm, call1, 1.0, 0.0, 1.0, small_mc)
        assert est.contains(0.382925)
        assert est.scheme == Scheme.EULER_ABSORBED

    def test_constant_is_exact(self, cev2: VolatilityModel, small_mc: MonteCarloParams) -> None:
        est = estimate_payoff_expectation(cev2, PayoffSpec.const(3.0), 1.0, 0.0, 1.0, small_mc)
        assert est.mean == 3.0
        assert est.stderr == 0.0

    def test_inverse_bessel_identity(
        self, cev2: VolatilityModel, identity: PayoffSpec, small_mc: MonteCarloParams
    ) -> None:
        est = estimate_payoff_expectation(cev2, identity, 2.0, 0.0, 1.0, small_mc)
        assert est.contains(0.765850)
        assert est.scheme == Scheme.INVERSE_BESSEL_EXACT

    def test_defect_refuses_naive_euler(self, gbm: VolatilityModel, small_mc: MonteCarloParams) -> None:
        with pytest.raises(SchemeError):
            martingale_defect(gbm, 1.0, 0.0, 1.0, small_mc)

    def test_forced_euler_defect_is_zero(self, gbm: VolatilityModel, small_mc: MonteCarloParams) -> None:
        est = martingale_defect(gbm, 1.0, 0.0, 1.0, small_mc, force_euler=True)
        assert est.contains(0.0)
        assert est.metadata["forced_euler"] is True

    @pytest.mark.parametrize("x,expected", [(1.0, 0.317311), (0.5, 0.022750)])
    def test_inverse_bessel_defect(
        self, cev2: VolatilityModel, small_mc: MonteCarloParams, x: float, expected: float
    ) -> None:
        assert martingale_defect(cev2, x, 0.0, 1.0, small_mc).contains(expected)

    def test_defect_at_maturity(self, cev2: VolatilityModel, small_mc: MonteCarloParams) -> None:
        est = martingale_defect(cev2, 1.0, 1.0, 1.0, small_mc)
        assert est.mean == 0.0
        assert est.n_paths == 0

    def test_parity_gap_is_minus_defect(self, cev2: VolatilityModel, small_mc: MonteCarloParams) -> None:
        gap = put_call_parity_gap(cev2, 1.0, 1.0, 0.0, 1.0, small_mc)
        assert gap.contains(-0.317311)

    def test_parity_gap_vanishes_for_martingale(self, gbm: VolatilityModel, small_mc: MonteCarloParams) -> None:
        assert put_call_parity_gap(gbm, 1.2, 1.0, 0.0, 1.0, small_mc).contains(0.0)

    def test_ladder_martingale(self, gbm: VolatilityModel, identity: PayoffSpec, small_mc: MonteCarloParams) -> None:
        ladder = estimate_minimal_price(gbm, identity, 1.0, 0.0, 1.0, [4, 8, 16], small_mc)
        means = [e.mean for e in ladder]
        assert means == sorted(means)
        assert means[-1] <= 1.0 + 3 * ladder[-1].stderr
        assert means[-1] >= 0.9

    def test_ladder_strict_local(
        self, cev2: VolatilityModel, identity: PayoffSpec, small_mc: MonteCarloParams
    ) -> None:
        ladder = estimate_minimal_price(cev2, identity, 1.0, 0.0, 1.0, [4, 8, 16, 32], small_mc)
        means = [e.mean for e in ladder]
        assert means == sorted(means)
        assert means[-1] < 0.75
        assert means[-1] > 0.6

    def test_ladder_zero_payoff(self, cev2: VolatilityModel, small_mc: MonteCarloParams) -> None:
        ladder = estimate_minimal_price(cev2, PayoffSpec.const(0.0), 1.0, 0.0, 1.0, [2, 4], small_mc)
        assert [e.mean for e in ladder] == [0.0, 0.0]

    @pytest.mark.parametrize(
        "model",
        [
            parse_volatility("2.0 * x ^ 2.5 + 0.1 * sqrt(x)", recognize=False),
            VolatilityModel.cev(alpha=2.0, p=2.5),
            VolatilityModel.cev(alpha=1.3, p=2.5),
        ],
    )
    def test_ladder_survives_exploding_paths(self, model: VolatilityModel, identity: PayoffSpec) -> None:
        params = MonteCarloParams(n_paths=2000, seed=11, steps_per_unit_time=200, block_size=1024)
        ladder = estimate_minimal_price(model, identity, 1.0, 0.0, 1.0, [2, 4, 8, 16], params)
        means = [e.mean for e in ladder]
        assert means == sorted(means)
        assert all(e.metadata["overflowed"] == 0 for e in ladder)
        assert ladder[-1].metadata["killed"] > 0

    def test_ladder_must_ascend(self, gbm: VolatilityModel, identity: PayoffSpec, small_mc: MonteCarloParams) -> None:
        with pytest.raises(ValueError):
            estimate_minimal_price(gbm, identity, 1.0, 0.0, 1.0, [8, 4], small_mc)

    def test_extrapolate_geometric(self) -> None:
        ladder = [MCEstimate.exact(v) for v in (0.5, 0.75, 0.875)]
        assert extrapolate_ladder(ladder) == pytest.approx(1.0)

    def test_extrapolate_short_ladder(self) -> None:
        assert extrapolate_ladder([MCEstimate.exact(0.4), MCEstimate.exact(0.6)]) == 0.6

    @pytest.mark.parametrize("p", [1.0, 2.0])
    def test_psi_bound_holds(self, p: float, small_mc: MonteCarloParams) -> None:
        model = VolatilityModel.cev(alpha=1.0, p=p)
        report = psi_bound_check(model, 1.0, 0.0, 1.0, StoppingSpec(levels=(2, 4, 8)), small_mc)
        assert report.bound == pytest.approx(1.5)
        assert report.all_passed
        assert [e.level for e in report.entries] == [2, 4, 8]

    def test_psi_bound_degenerate(self, gbm: VolatilityModel, small_mc: MonteCarloParams) -> None:
        report = psi_bound_check(gbm, 2.0, 1.0, 1.0, StoppingSpec(levels=(2,)), small_mc)
        assert report.entries[0].estimate.mean == pytest.approx(report.psi_x)
        assert report.bound == report.psi_x
        assert report.all_passed
