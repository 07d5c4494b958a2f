"""Unit tests for volatility models, payoffs and the expression parser."""

from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from pydantic import ValidationError

from src.errors import ModelValidationError, SpecSyntaxError
from src.models import (
    GrowthKind,
    PayoffKind,
    PayoffSpec,
    ProbeGrid,
    VolatilityKind,
    VolatilityModel,
    classify_growth,
    parse_payoff,
    parse_volatility,
    validate_assumptions,
)
from src.models.expression import match_power_law, parse_expression

strikes = st.floats(min_value=0.01, max_value=100.0, exclude_min=True, exclude_max=True)


class TestExpressionParser:
    def test_precedence(self) -> None:
        tree = parse_expression("1 + 2 * x ^ 2")
        assert tree.evaluate(np.array([3.0]))[0] == pytest.approx(19.0)

    def test_power_is_right_associative(self) -> None:
        tree = parse_expression("2 ^ 3 ^ 2")
        assert tree.evaluate(np.array([0.0]))[0] == pytest.approx(512.0)

    def test_double_star_alias(self) -> None:
        assert parse_expression("x**2").evaluate(np.array([4.0]))[0] == pytest.approx(16.0)

    def test_unary_minus_binds_looser_than_power(self) -> None:
        assert parse_expression("-x^2").evaluate(np.array([3.0]))[0] == pytest.approx(-9.0)

    def test_functions(self) -> None:
        tree = parse_expression("max(x - 1, 0) + sqrt(x) + log(exp(x))")
        assert tree.evaluate(np.array([4.0]))[0] == pytest.approx(3.0 + 2.0 + 4.0)

    def test_unknown_name_position(self) -> None:
        with pytest.raises(SpecSyntaxError) as info:
            parse_expression("x + y")
        assert info.value.position == (4, 5)
        assert "^" in info.value.render()

    def test_wrong_arity(self) -> None:
        with pytest.raises(SpecSyntaxError, match="takes 2 argument"):
            parse_expression("max(x)")

    def test_unbalanced_parenthesis(self) -> None:
        with pytest.raises(SpecSyntaxError, match="expected ')'"):
            parse_expression("(x + 1")

    def test_empty(self) -> None:
        with pytest.raises(SpecSyntaxError):
            parse_expression("   ")

    def test_power_law_recognition(self) -> None:
        assert match_power_law(parse_expression("2*x^1.5")) == pytest.approx((2.0, 1.5))
        assert match_power_law(parse_expression("sqrt(x)")) == pytest.approx((1.0, 0.5))
        assert match_power_law(parse_expression("x^3/4")) == pytest.approx((0.25, 3.0))
        assert match_power_law(parse_expression("x + 1")) is None
        assert match_power_law(parse_expression("-x")) is None


class TestParseVolatility:
    def test_cev_spec(self) -> None:
        model = parse_volatility("cev:alpha=1,p=2")
        assert model.kind == VolatilityKind.CEV
        assert model(3.0) == pytest.approx(9.0)

    def test_identity_recognized_as_cev(self) -> None:
        model = parse_volatility("x")
        assert model.cev_parameters == (1.0, 1.0)
        assert model(2.0) == pytest.approx(2.0)

    def test_recognition_can_be_disabled(self) -> None:
        model = parse_volatility("x", recognize=False)
        assert model.kind == VolatilityKind.EXPRESSION

    def test_negative_sigma_rejected(self) -> None:
        with pytest.raises(ModelValidationError, match="sigma <= 0"):
            parse_volatility("-x")

    def test_zero_outside_positive_axis(self) -> None:
        model = parse_volatility("1 + x")
        assert model(-1.0) == 0.0
        assert model(0.0) == 0.0
        np.testing.assert_allclose(model(np.array([-2.0, 1.0])), [0.0, 2.0])

    @pytest.mark.parametrize(
        "model",
        [
            VolatilityModel.cev(alpha=1.0, p=2.0),
            VolatilityModel.cev(alpha=0.5, p=0.5),
            VolatilityModel.table([0.5, 1.0, 4.0], [0.25, 1.0, 8.0]),
        ],
        ids=["cev-p2", "cev-sqrt", "table"],
    )
    def test_zero_outside_positive_axis_all_kinds(self, model: VolatilityModel) -> None:
        assert model(-1.0) == 0.0
        assert model(0.0) == 0.0
        out = model(np.array([-3.0, -1e-9, 0.0, 1.0]))
        np.testing.assert_array_equal(out[:3], [0.0, 0.0, 0.0])
        assert out[3] > 0.0

    def test_interior_zero_rejected(self) -> None:
        with pytest.raises(ModelValidationError):
            parse_volatility("max(x - 1, 0)")

    def test_cev_missing_exponent(self) -> None:
        with pytest.raises(SpecSyntaxError, match="p=<exponent>"):
            parse_volatility("cev:alpha=2")

    def test_cev_bad_alpha(self) -> None:
        with pytest.raises(ModelValidationError):
            parse_volatility("cev:alpha=-1,p=1")

    def test_table_power_law_tail(self) -> None:
        model = parse_volatility("table:1:1,10:100")
        assert model(10.0) == pytest.approx(100.0)
        assert model(100.0) == pytest.approx(1e4)
        assert model(0.1) == pytest.approx(1e-2)

    def test_table_not_increasing(self) -> None:
        with pytest.raises(ModelValidationError):
            parse_volatility("table:2:1,1:1")

    def test_oracle_flag(self) -> None:
        assert VolatilityModel.cev(alpha=3.0, p=2.0).has_inverse_bessel_oracle
        assert not VolatilityModel.cev(alpha=1.0, p=1.5).has_inverse_bessel_oracle

    def test_frozen(self) -> None:
        model = VolatilityModel.cev()
        with pytest.raises(ValidationError):
            model.p = 3.0  # type: ignore[misc]

    @settings(max_examples=40, deadline=None)
    @given(
        alpha=st.floats(min_value=0.1, max_value=10.0),
        p=st.floats(min_value=-1.0, max_value=3.0),
        x=st.floats(min_value=1e-3, max_value=1e3),
    )
    def test_cev_evaluation(self, alpha: float, p: float, x: float) -> None:
        model = VolatilityModel.cev(alpha=alpha, p=p)
        assert model(x) == pytest.approx(alpha * x**p, rel=1e-12)

    @settings(max_examples=40, deadline=None)
    @given(
        a=st.floats(min_value=0.5, max_value=5.0),
        b=st.floats(min_value=0.0, max_value=2.0),
        c=st.floats(min_value=0.1, max_value=2.0),
    )
    def test_print_parse_round_trip(self, a: float, b: float, c: float) -> None:
        source = f"{a!r} + {b!r} * x ^ {c!r} + sqrt(1 + x)"
        model = parse_volatility(source, recognize=False)
        again = parse_volatility(model.to_spec(), recognize=False)
        xs = ProbeGrid(lo=0.01, hi=100.0, n=50).points()
        np.testing.assert_allclose(model(xs), again(xs), rtol=1e-12)


class TestParsePayoff:
    def test_call(self) -> None:
        payoff = parse_payoff("call:K=1")
        assert payoff.kind == PayoffKind.CALL
        assert payoff(3.0) == pytest.approx(2.0)

    def test_identity(self) -> None:
        payoff = parse_payoff("identity")
        assert payoff(0.0) == 0.0
        assert payoff.growth is not None
        assert payoff.growth.kind == GrowthKind.AT_MOST_LINEAR
        assert payoff.growth.constant == pytest.approx(1.0, abs=1e-5)

    def test_put_is_sublinear(self) -> None:
        payoff = parse_payoff("put:K=1")
        assert payoff.growth is not None
        assert payoff.growth.kind == GrowthKind.STRICTLY_SUBLINEAR

    def test_constant(self) -> None:
        payoff = parse_payoff("const:2.5")
        np.testing.assert_allclose(payoff(np.array([0.0, 7.0])), [2.5, 2.5])

    def test_expression(self) -> None:
        payoff = parse_payoff("min(x, 2)")
        assert payoff(5.0) == pytest.approx(2.0)

    def test_negative_payoff_rejected(self) -> None:
        with pytest.raises(ModelValidationError, match="negative"):
            parse_payoff("x - 1")

    def test_bad_strike(self) -> None:
        with pytest.raises(SpecSyntaxError):
            parse_payoff("call:S=1")
        with pytest.raises(ModelValidationError):
            parse_payoff("call:K=-1")

    def test_missing_strike(self) -> None:
        with pytest.raises(ValidationError):
            PayoffSpec(kind=PayoffKind.CALL)


class TestClassifyGrowth:
    def test_call_at_most_linear(self, call1: PayoffSpec) -> None:
        growth = classify_growth(call1)
        assert growth.kind == GrowthKind.AT_MOST_LINEAR
        assert growth.constant is not None
        assert growth.constant <= 1.0

    def test_put_sublinear(self, put1: PayoffSpec) -> None:
        assert classify_growth(put1).kind == GrowthKind.STRICTLY_SUBLINEAR

    def test_square_superlinear(self) -> None:
        assert classify_growth(PayoffSpec.from_expression("x^2")).kind == GrowthKind.SUPERLINEAR

    def test_sqrt_sublinear(self) -> None:
        assert classify_growth(PayoffSpec.from_expression("sqrt(x)")).kind == GrowthKind.STRICTLY_SUBLINEAR

    @settings(max_examples=25, deadline=None)
    @given(k=strikes)
    def test_calls_are_linear(self, k: float) -> None:
        assert classify_growth(PayoffSpec.call(k)).kind == GrowthKind.AT_MOST_LINEAR

    @settings(max_examples=25, deadline=None)
    @given(k=strikes)
    def test_puts_are_sublinear(self, k: float) -> None:
        assert classify_growth(PayoffSpec.put(k)).kind == GrowthKind.STRICTLY_SUBLINEAR


class TestAssumptions:
    def test_cev2_on_compact(self, cev2: VolatilityModel) -> None:
        report = validate_assumptions(cev2, ProbeGrid(lo=0.1, hi=10.0, n=50))
        assert report.positivity_ok
        assert report.local_integrability_ok

    def test_sqrt_holder_half(self) -> None:
        report = validate_assumptions(VolatilityModel.cev(alpha=1.0, p=0.5), ProbeGrid(lo=0.1, hi=10.0, n=20))
        assert report.holder_half_estimate == pytest.approx(0.5, abs=0.05)
        assert report.holder_half_ok

    def test_interior_zero(self) -> None:
        model = parse_volatility("max(x - 1, 0)", validate=False)
        report = validate_assumptions(model, ProbeGrid(lo=0.1, hi=10.0, n=50))
        assert not report.positivity_ok
        assert not report.local_integrability_ok
        assert "sigma <= 0" in report.notes

    def test_non_finite_sigma_raises(self) -> None:
        model = parse_volatility("1 / (x - 1)", validate=False)
        with pytest.raises(ModelValidationError, match="not finite"):
            validate_assumptions(model, ProbeGrid(lo=0.5, hi=2.0, n=4, spacing="uniform"))
