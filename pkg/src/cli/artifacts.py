"""Output files and the JSON envelope shared by every command.

CSV files are UTF-8 with a header row, LF line endings and '.' decimals.
Each CSV is paired with a JSON file holding the resolved scenario, the seed
and the tool version, so a run can be reproduced from its own output.
"""

from __future__ import annotations

import csv
from pathlib import Path
from typing import Any, Iterable, Sequence

import orjson
import typer

from src import __version__
from src.cli.scenario import ScenarioConfig

_JSON_OPTIONS = orjson.OPT_SERIALIZE_NUMPY | orjson.OPT_NON_STR_KEYS


def envelope(command: str, scenario: ScenarioConfig, seed: int | None, result: Any) -> dict[str, Any]:
    return {
        "tool": "cauchylab",
        "version": __version__,
        "command": command,
        "seed": seed,
        "config": scenario.model_dump(mode="json"),
        "result": result,
    }


def emit_json(payload: dict[str, Any]) -> None:
    """Print one JSON document to stdout."""
    typer.echo(orjson.dumps(payload, option=_JSON_OPTIONS).decode())


def write_json(path: Path, payload: dict[str, Any]) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_bytes(orjson.dumps(payload, option=_JSON_OPTIONS | orjson.OPT_INDENT_2) + b"\n")
    return path


def write_csv(path: Path, header: Sequence[str], rows: Iterable[Sequence[Any]]) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)
    return path

