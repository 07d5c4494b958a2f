"""Monte Carlo estimates against closed forms at acceptance scale."""

from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import stats

from src.config import MonteCarloConfig
from src.models.payoff import PayoffSpec
from src.models.volatility import VolatilityModel, parse_volatility
from src.sde import (
    MonteCarloParams,
    Scheme,
    StoppingSpec,
    estimate_minimal_price,
    estimate_payoff_expectation,
    martingale_defect,
    psi_bound_check,
    put_call_parity_gap,
    simulate_paths,
)

pytestmark = pytest.mark.slow


class TestInverseBesselDefect:
    def test_parity_gap_is_minus_defect(self, medium_mc: MonteCarloParams) -> None:
        gap = put_call_parity_gap(VolatilityModel.cev(alpha=1.0, p=2.0), 1.0, 1.0, 0.0, 1.0, medium_mc)
        assert gap.contains(-0.317311, n_stderr=4.0)


class TestEulerAgainstExact:
    def test_inverse_bessel_laws_agree(self) -> None:
        model = VolatilityModel.cev(alpha=1.0, p=2.0)
        n_paths = 20_000
        config = MonteCarloConfig().model_copy(update={"overflow_max_fraction": 0.05})
        exact = simulate_paths(model, 1.0, 0.0, 1.0, 1, n_paths, 1, scheme=Scheme.INVERSE_BESSEL_EXACT)
        euler = simulate_paths(
            model, 1.0, 0.0, 1.0, 10_000, n_paths, 2, scheme=Scheme.EULER_ABSORBED, workers=4, config=config
        )
        region = np.linspace(0.05, 3.0, 300)
        cdf_exact = np.searchsorted(np.sort(exact.terminal_values), region, side="right") / exact.n_paths
        cdf_euler = np.searchsorted(np.sort(euler.terminal_values), region, side="right") / euler.n_paths
        # 1% two-sample critical value plus room for the time-step bias
        assert np.max(np.abs(cdf_exact - cdf_euler)) < 1.63 * np.sqrt(2.0 / n_paths) + 0.01

    def test_gbm_is_lognormal(self) -> None:
        batch = simulate_paths(VolatilityModel.cev(alpha=1.0, p=1.0), 1.0, 0.0, 1.0, 2000, 20_000, 3, workers=4)
        result = stats.kstest(batch.terminal_values, stats.lognorm(s=1.0, scale=np.exp(-0.5)).cdf)
        assert result.pvalue > 1e-3


class TestBlackScholes:
    def test_call(self, medium_mc: MonteCarloParams) -> None:
        estimate = estimate_payoff_expectation(
            VolatilityModel.cev(alpha=1.0, p=1.0), PayoffSpec.call(1.0), 1.0, 0.0, 1.0, medium_mc
        )
        assert estimate.contains(0.382925, n_stderr=4.0)

    def test_martingale_has_no_defect(self, medium_mc: MonteCarloParams) -> None:
        estimate = martingale_defect(VolatilityModel.cev(alpha=1.0, p=1.0), 1.0, 0.0, 1.0, medium_mc, force_euler=True)
        assert estimate.contains(0.0, n_stderr=4.0)


class TestDefectTable:
    @pytest.mark.parametrize("x,expected", [(1.0, 0.317311), (0.5, 0.022750), (2.0, 1.234152)])
    def test_matches_closed_form(self, large_mc: MonteCarloParams, x: float, expected: float) -> None:
        estimate = martingale_defect(VolatilityModel.cev(alpha=1.0, p=2.0), x, 0.0, 1.0, large_mc)
        assert estimate.contains(expected, n_stderr=3.0)
        assert estimate.stderr < 2e-3


class TestPsiBound:
    @pytest.mark.parametrize("p", [1.0, 2.0])
    def test_bound_holds(self, p: float) -> None:
        params = MonteCarloParams(n_paths=20_000, seed=5, steps_per_unit_time=1000, block_size=4096, workers=4)
        report = psi_bound_check(VolatilityModel.cev(alpha=1.0, p=p), 1.0, 0.0, 1.0, StoppingSpec(levels=(2, 4, 8, 16)), params)
        assert report.bound == pytest.approx(1.5)
        for entry in report.entries:
            assert entry.estimate.mean <= 1.5 + 3 * entry.estimate.stderr


class TestMinimalPriceLadders:
    @settings(max_examples=20, deadline=None)
    @given(alpha=st.floats(min_value=0.3, max_value=2.0), p=st.floats(min_value=0.5, max_value=2.5), as_expression=st.booleans())
    def test_nondecreasing(self, alpha: float, p: float, as_expression: bool) -> None:
        if as_expression:
            model = parse_volatility(f"{alpha!r} * x ^ {p!r} + 0.1 * sqrt(x)", recognize=False)
        else:
            model = VolatilityModel.cev(alpha=alpha, p=p)
        params = MonteCarloParams(n_paths=2000, seed=11, steps_per_unit_time=200, block_size=1024)
        means = [e.mean for e in estimate_minimal_price(model, PayoffSpec.identity(), 1.0, 0.0, 1.0, [2, 4, 8, 16], params)]
        assert all(b >= a for a, b in zip(means, means[1:]))
