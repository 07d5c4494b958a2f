"""cauchylab psi -- Growth profile of Psi(x)/x on [1, x_max]."""

from __future__ import annotations

from pathlib import Path
from typing import Optional

import numpy as np
import typer

from src.cli.artifacts import emit_json, envelope, write_csv, write_json
from src.cli.display import render_psi_profile
from src.cli.runtime import guarded, scenario_from
from src.condition.psi import psi_growth_profile
from src.models.volatility import parse_volatility


def psi(
    sigma: str = typer.Option(..., "--sigma", "-s", help="Volatility spec"),
    x_max: float = typer.Option(1e6, "--x-max", help="Upper end of the geometric grid"),
    points: int = typer.Option(61, "--points", "-n", help="Grid points"),
    numeric: bool = typer.Option(False, "--numeric", help="Integrate even when a closed form exists"),
    as_json: bool = typer.Option(False, "--json", help="Print the profile as JSON"),
    out: Optional[Path] = typer.Option(None, "--out", "-o", help="Write psi.csv and psi.json here"),
) -> None:
    """Tabulate Psi(x)/x and report whether it diverges or plateaus."""
    with guarded():
        if x_max <= 1.0 or points < 2:
            raise ValueError("need --x-max > 1 and at least 2 points")
        scenario = scenario_from(None, sigma=sigma)
        model = parse_volatility(sigma)
        profile = psi_growth_profile(model, np.geomspace(1.0, x_max, points), closed_form=not numeric)
        payload = envelope("psi", scenario, None, profile.model_dump(mode="json"))
        if out is not None:
            header, rows = profile.csv_rows()
            write_csv(out / "psi.csv", header, rows)
            write_json(out / "psi.json", payload)

    if as_json:
        emit_json(payload)
    else:
        render_psi_profile(profile)
