"""cauchylab CLI entry point.

Usage:
    python -m src.cli.main [COMMAND] [OPTIONS]

Or via the installed console script:
    cauchylab [COMMAND] [OPTIONS]

Exit codes: 0 ok / martingale, 1 invalid input or usage error,
2 strict local martingale, 3 inconclusive.
"""

from __future__ import annotations

import sys
from typing import Optional

import typer

try:  # newer typer vendors click; its exceptions are not click's
    from typer._click.exceptions import Abort, ClickException
except ImportError:
    from click import Abort, ClickException

from src.cli.commands import check, defect, nonuniq, psi, psibound, simulate, solve
from src.cli.runtime import EXIT_ERROR
from src.config import get_config
from src.log import configure_logging

app = typer.Typer(
    name="cauchylab",
    help="cauchylab -- strict local martingales and uniqueness of the Cauchy problem",
    no_args_is_help=True,
    add_completion=False,
    pretty_exceptions_enable=False,
)


@app.callback()
def root(
    ctx: typer.Context,
    log_level: Optional[str] = typer.Option(None, "--log-level", help="DEBUG, INFO, WARNING, ERROR"),
    log_format: Optional[str] = typer.Option(None, "--log-format", help="console or json"),
    strict_repro: bool = typer.Option(
        False,
        "--strict-repro",
        envvar="CAUCHYLAB_STRICT_REPRO",
        help="Refuse randomized runs without an explicit seed",
    ),
) -> None:
    updates = {k: v for k, v in {"log_level": log_level, "log_format": log_format}.items() if v}
    configure_logging(get_config().logging.model_copy(update=updates))
    ctx.obj = {"strict_repro": strict_repro}


# Register sub-commands from each module.
app.command(name="check", help="Martingale or strict local martingale?")(check.check)
app.command(name="defect", help="Monte Carlo martingale defect x - E[X_T]")(defect.defect)
app.command(name="solve", help="Finite-difference solution of the Cauchy problem")(solve.solve)
app.command(name="nonuniq", help="Uniqueness gap study over x_max")(nonuniq.nonuniq)
app.command(name="psi", help="Growth profile of Psi(x)/x")(psi.psi)
app.command(name="simulate", help="Simulate the absorbed diffusion")(simulate.simulate)
app.command(name="psibound", help="Check E[Psi(X_tau_n)] against its bound")(psibound.psibound)


def main() -> None:
    """Console script; click usage errors exit 1 instead of click's 2."""
    command = typer.main.get_command(app)
    try:
        code = command.main(prog_name="cauchylab", standalone_mode=False)
    except ClickException as exc:
        exc.show()
        sys.exit(EXIT_ERROR)
    except Abort:
        sys.exit(EXIT_ERROR)
    sys.exit(code if isinstance(code, int) else 0)


if __name__ == "__main__":
    main()
