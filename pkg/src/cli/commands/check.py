"""cauchylab check -- Is the sigma-diffusion a martingale?

Evaluates int_1^inf x / sigma^2(x) dx (symbolically for CEV models, by a tail
fit otherwise). Exit code 0 = martingale, 2 = strict local martingale,
3 = inconclusive, 1 = invalid input.
"""

from __future__ import annotations

from pathlib import Path
from typing import Optional

import typer

from src.cli.artifacts import emit_json, envelope, write_csv, write_json
from src.cli.display import render_assumptions, render_condition
from src.cli.runtime import VERDICT_EXIT, guarded, scenario_from
from src.condition.classifier import classify_martingale
from src.models.assumptions import validate_assumptions
from src.models.volatility import parse_volatility


def check(
    sigma: str = typer.Option(..., "--sigma", "-s", help="Volatility spec, e.g. 'cev:p=2', 'x^1.5', 'table:1:1,10:20'"),
    numeric: bool = typer.Option(False, "--numeric", help="Skip CEV recognition and always fit the tail"),
    assumptions: bool = typer.Option(False, "--assumptions", help="Also report positivity, integrability, Holder checks"),
    as_json: bool = typer.Option(False, "--json", help="Print the report as JSON"),
    out: Optional[Path] = typer.Option(None, "--out", "-o", help="Write condition.csv and condition.json here"),
) -> None:
    """Classify sigma as martingale, strict local martingale or inconclusive."""
    with guarded():
        scenario = scenario_from(None, sigma=sigma)
        model = parse_volatility(sigma, recognize=not numeric)
        report = classify_martingale(model, symbolic=not numeric)
        assumption_report = validate_assumptions(model) if assumptions else None

        result = report.model_dump(mode="json")
        if assumption_report is not None:
            result["assumptions"] = assumption_report.model_dump(mode="json")
        payload = envelope("check", scenario, None, result)
        if out is not None:
            header, rows = report.csv_rows()
            write_csv(out / "condition.csv", header, rows)
            write_json(out / "condition.json", payload)

    if as_json:
        emit_json(payload)
    else:
        render_condition(report)
        if assumption_report is not None:
            render_assumptions(assumption_report)
    raise typer.Exit(VERDICT_EXIT[report.verdict])
