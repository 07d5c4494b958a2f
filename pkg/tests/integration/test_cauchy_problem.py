"""Fine-grid PDE runs and property checks over randomly drawn CEV models."""

from __future__ import annotations

from pathlib import Path
from typing import Any

import numpy as np
import orjson
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st
from typer.testing import CliRunner

from src.cli.main import app
from src.condition import Verdict, classify_martingale, psi_values
from src.models.payoff import PayoffSpec
from src.models.volatility import VolatilityModel, parse_volatility
from src.pde import (
    FarFieldBC,
    GapVerdict,
    GridConfig,
    Spacing,
    add_defect_solution,
    bc_from_name,
    build_grid,
    defect_profile,
    solve_cauchy,
    uniqueness_gap_study,
)
from src.sde.closed_form import inverse_bessel_mean

pytestmark = pytest.mark.slow

alphas = st.floats(min_value=0.2, max_value=5.0)
exponents = st.floats(min_value=0.0, max_value=3.0)


class TestFineGrid:
    def test_minimal_solution_of_inverse_bessel(self) -> None:
        model, identity = VolatilityModel.cev(alpha=1.0, p=2.0), PayoffSpec.identity()
        grid = build_grid(GridConfig(x_max=16.0, n_x=800, n_t=800))
        solution = solve_cauchy(model, identity, grid, bc_from_name("minimal-profile", model, identity), theta=1.0)
        xs = np.array([0.5, 1.0, 2.0, 4.0])
        np.testing.assert_allclose(solution.value_at(xs), inverse_bessel_mean(xs, 1.0), atol=3e-3)

    def test_defect_family_interpolates(self) -> None:
        model, identity = VolatilityModel.cev(alpha=1.0, p=2.0), PayoffSpec.identity()
        grid = build_grid(GridConfig(x_max=16.0, n_x=800, n_t=800))
        minimal = solve_cauchy(model, identity, grid, bc_from_name("minimal-profile", model, identity), theta=1.0)
        linear = solve_cauchy(model, identity, grid, FarFieldBC.dirichlet_payoff())
        defect = defect_profile(model, grid)
        for lam in (0.0, 0.5, 1.0):
            member = add_defect_solution(minimal, defect, lam)
            expected = (1.0 - lam) * minimal.value_at(1.0) + lam * linear.value_at(1.0)
            assert member.value_at(1.0) == pytest.approx(expected, abs=3e-3)

    def test_persistent_gap_on_log_grid(self) -> None:
        model, identity = VolatilityModel.cev(alpha=1.0, p=2.0), PayoffSpec.identity()
        report = uniqueness_gap_study(
            model,
            identity,
            (FarFieldBC.zero_gamma(), bc_from_name("minimal-profile", model, identity)),
            ladder=(8.0, 16.0, 32.0, 64.0),
            base=GridConfig(x_max=8.0, n_x=200, n_t=200, spacing=Spacing.LOG_UNIFORM),
            theta=1.0,
        )
        assert report.verdict == GapVerdict.PERSISTENT_GAP
        assert report.level == pytest.approx(0.317311, abs=1e-2)

    def test_black_scholes_gap_vanishes(self) -> None:
        model, put = VolatilityModel.cev(alpha=1.0, p=1.0), PayoffSpec.put(1.0)
        report = uniqueness_gap_study(
            model,
            put,
            (FarFieldBC.dirichlet_payoff(), bc_from_name("minimal-profile", model, put)),
            ladder=(4.0, 8.0, 16.0, 32.0),
            base=GridConfig(x_max=4.0, n_x=200, n_t=400),
        )
        assert report.verdict == GapVerdict.VANISHING_GAP


class TestRandomModels:
    @settings(max_examples=20, deadline=None)
    @given(alpha=alphas, p=exponents)
    def test_verdict_follows_exponent(self, alpha: float, p: float) -> None:
        assume(abs(p - 1.0) > 0.05)
        report = classify_martingale(VolatilityModel.cev(alpha=alpha, p=p))
        expected = Verdict.MARTINGALE if p < 1.0 else Verdict.STRICT_LOCAL_MARTINGALE
        assert report.verdict == expected

    @settings(max_examples=20, deadline=None)
    @given(alpha=st.floats(min_value=0.5, max_value=2.0), p=exponents)
    def test_tail_fit_agrees(self, alpha: float, p: float) -> None:
        assume(abs(p - 1.0) > 0.25)
        model = parse_volatility(f"{alpha!r} * x ^ {p!r}", recognize=False)
        expected = Verdict.MARTINGALE if p < 1.0 else Verdict.STRICT_LOCAL_MARTINGALE
        assert classify_martingale(model, symbolic=False).verdict == expected

    @settings(max_examples=20, deadline=None)
    @given(alpha=alphas, p=st.floats(min_value=0.5, max_value=2.0))
    def test_psi_dominates_identity(self, alpha: float, p: float) -> None:
        xs = np.geomspace(1.0, 1e3, 25)
        values = psi_values(VolatilityModel.cev(alpha=alpha, p=p), xs)
        assert np.all(values >= xs - 1e-9)
        assert np.all(np.diff(values) >= -1e-9)

    @settings(max_examples=20, deadline=None)
    @given(alpha=st.floats(min_value=0.2, max_value=2.0), p=st.floats(min_value=0.5, max_value=2.0))
    def test_linear_payoff_reproduced(self, alpha: float, p: float) -> None:
        grid = build_grid(GridConfig(x_max=8.0, n_x=80, n_t=40))
        solution = solve_cauchy(VolatilityModel.cev(alpha=alpha, p=p), PayoffSpec.identity(), grid, FarFieldBC.zero_gamma())
        np.testing.assert_allclose(solution.initial_slice(), grid.x_nodes, atol=1e-9)

    @settings(max_examples=20, deadline=None)
    @given(alpha=st.floats(min_value=0.2, max_value=2.0), p=st.floats(min_value=0.5, max_value=2.0))
    def test_put_bounded_under_implicit_steps(self, alpha: float, p: float) -> None:
        grid = build_grid(GridConfig(x_max=8.0, n_x=80, n_t=40))
        model = VolatilityModel.cev(alpha=alpha, p=p)
        solution = solve_cauchy(model, PayoffSpec.put(1.0), grid, FarFieldBC.dirichlet_payoff(), theta=1.0)
        assert solution.values.min() >= -1e-12
        assert solution.values.max() <= 1.0 + 1e-12


class TestGapCommand:
    runner = CliRunner()

    def _report(self, args: list[str], tmp_path: Path) -> dict[str, Any]:
        result = self.runner.invoke(app, ["nonuniq", *args, "--out", str(tmp_path), "--json"])
        assert result.exit_code == 0, result.output
        line = [row for row in result.stdout.splitlines() if row.startswith("{")][-1]
        return orjson.loads(line)["result"]

    def test_inverse_bessel_gap_persists(self, tmp_path: Path) -> None:
        report = self._report(["--sigma", "cev:p=2", "--payoff", "identity", "--ladder", "8,16,32"], tmp_path)
        assert report["bc_b"] == "minimal-profile"
        assert report["verdict"] == "persistent_gap"
        assert report["level"] == pytest.approx(0.317311, abs=0.05)

    def test_black_scholes_gap_vanishes(self, tmp_path: Path) -> None:
        args = ["--sigma", "x", "--payoff", "call:K=1", "--ladder", "8,16,32", "--bc-b", "zero-gamma"]
        report = self._report(args, tmp_path)
        gaps = [max(rung["gaps"]) for rung in report["rungs"]]
        assert all(b <= a + 1e-12 for a, b in zip(gaps, gaps[1:]))
        assert gaps[-1] < 1e-2
        assert report["verdict"] == "vanishing_gap"
