"""Rich console formatting helpers for the cauchylab CLI."""

from __future__ import annotations

from rich.console import Console
from rich.table import Table
from rich.text import Text
from rich.theme import Theme

from src.condition.models import ConditionReport, PsiProfile
from src.models.assumptions import AssumptionReport
from src.pde.models import GapReport
from src.sde.models import MCEstimate, PathBatch, PsiBoundReport

# Shared theme for consistent styling across all CLI output.
LAB_THEME = Theme(
    {
        "verdict.martingale": "bold green",
        "verdict.strict_local_martingale": "bold magenta",
        "verdict.inconclusive": "bold yellow",
        "gap.vanishing_gap": "bold green",
        "gap.persistent_gap": "bold magenta",
        "gap.undetermined": "bold yellow",
        "ok": "bold green",
        "warning": "bold yellow",
        "critical": "bold red",
        "header": "bold cyan",
        "muted": "dim",
    }
)

console = Console(theme=LAB_THEME)
err_console = Console(theme=LAB_THEME, stderr=True)


# ---------------------------------------------------------------------------
# Formatting helpers
# ---------------------------------------------------------------------------

def format_float(val: float | None, decimals: int = 6) -> str:
    """Format a float with fixed decimal places, or '--' if None."""
    if val is None:
        return "--"
    return f"{val:.{decimals}f}"


def format_sci(val: float | None) -> str:
    if val is None:
        return "--"
    return f"{val:.6g}"


def format_verdict(verdict: str) -> Text:
    return Text(verdict.upper(), style=f"verdict.{verdict}")


def format_gap_verdict(verdict: str) -> Text:
    return Text(verdict.upper(), style=f"gap.{verdict}")


def format_status(ok: bool) -> Text:
    """Green tag for a passed check, red for a failed one."""
    if ok:
        return Text("[OK]", style="ok")
    return Text("[FAIL]", style="critical")


def warn(message: str) -> None:
    err_console.print(Text.assemble(("warning: ", "warning"), message))


def error(message: str) -> None:
    err_console.print(Text.assemble(("error: ", "critical"), message))


# ---------------------------------------------------------------------------
# Report renderers
# ---------------------------------------------------------------------------

def _kv_table() -> Table:
    table = Table(show_header=False, show_edge=False, pad_edge=True)
    table.add_column("Label", style="bold", width=22)
    table.add_column("Value")
    return table


def render_condition(report: ConditionReport) -> None:
    table = _kv_table()
    table.add_row("Model", report.model)
    table.add_row("Verdict", format_verdict(report.verdict.value))
    table.add_row("Method", report.method.value)
    table.add_row("Tail exponent", format_sci(report.tail_exponent))
    if report.tail_exponent_band is not None:
        lo, hi = report.tail_exponent_band
        table.add_row("Exponent band", f"[{lo:.4f}, {hi:.4f}]")
    table.add_row("Limit of integral", format_sci(report.limit_value))
    table.add_row("Notes", Text(report.notes, style="muted"))
    console.print(table)

    partial = Table(title="int_1^B x / sigma^2(x) dx", show_lines=False, pad_edge=True)
    partial.add_column("B", justify="right")
    partial.add_column("Integral", justify="right")
    for item in report.partial_integrals:
        partial.add_row(f"{item.upper:g}", format_sci(item.value))
    console.print(partial)


def render_assumptions(report: AssumptionReport) -> None:
    table = _kv_table()
    table.add_row("Positivity", format_status(report.positivity_ok))
    table.add_row("Local integrability", format_status(report.local_integrability_ok))
    table.add_row("Holder-1/2 at 0", format_status(report.holder_half_ok))
    table.add_row("Holder estimate", format_sci(report.holder_half_estimate))
    if report.notes:
        table.add_row("Notes", Text(report.notes, style="muted"))
    console.print(table)


def render_estimate(title: str, estimate: MCEstimate, caveat: str | None = None) -> None:
    table = _kv_table()
    table.add_row("Quantity", title)
    table.add_row("Mean", format_float(estimate.mean))
    table.add_row("Std. error", format_sci(estimate.stderr))
    table.add_row("95% CI", f"[{estimate.ci95[0]:.6f}, {estimate.ci95[1]:.6f}]")
    table.add_row("Paths", str(estimate.n_paths))
    table.add_row("Scheme", estimate.scheme.value if estimate.scheme else "exact")
    table.add_row("Seed", str(estimate.seed) if estimate.seed is not None else "--")
    if caveat:
        table.add_row("Caveat", Text(caveat, style="warning"))
    console.print(table)


def render_psi_profile(profile: PsiProfile, max_rows: int = 12) -> None:
    table = _kv_table()
    table.add_row("Model", profile.model)
    table.add_row("Trend", Text(profile.trend.value.upper(), style="header"))
    table.add_row("Monotone", format_status(profile.monotone_ok))
    table.add_row("Increment slope", format_sci(profile.increment_slope))
    table.add_row("Limit of Psi(x)/x", format_sci(profile.limit_estimate))
    console.print(table)

    rows = Table(title="Psi(x) / x", show_lines=False, pad_edge=True)
    rows.add_column("x", justify="right")
    rows.add_column("Psi(x)", justify="right")
    rows.add_column("Psi(x)/x", justify="right")
    stride = max(1, len(profile.points) // max_rows)
    for point in profile.points[::stride]:
        rows.add_row(f"{point.x:g}", format_sci(point.psi), format_float(point.ratio, 4))
    console.print(rows)


def render_psi_bound(report: PsiBoundReport) -> None:
    console.print(f"bound Psi(x) + x(T-t)/2 = [header]{report.bound:.6f}[/header]  ({report.model}, x={report.x:g})")
    table = Table(title="E[Psi(X_tau_n)]", show_lines=False, pad_edge=True)
    table.add_column("n", justify="right")
    table.add_column("Estimate", justify="right")
    table.add_column("Std. error", justify="right")
    table.add_column("Upper exits", justify="right")
    table.add_column("Status")
    for entry in report.entries:
        table.add_row(
            str(entry.level),
            format_float(entry.estimate.mean),
            format_sci(entry.estimate.stderr),
            f"{entry.exited_upper_fraction:.4f}",
            format_status(entry.passed),
        )
    console.print(table)


def render_gap_report(report: GapReport) -> None:
    table = _kv_table()
    table.add_row("Model", report.model)
    table.add_row("Payoff", f"{report.payoff} ({report.payoff_growth or '--'})")
    table.add_row("Conditions", f"{report.bc_a} vs {report.bc_b}")
    table.add_row("Verdict", format_gap_verdict(report.verdict.value))
    table.add_row("Level", format_float(report.level))
    table.add_row("Notes", Text(report.notes, style="muted"))
    console.print(table)

    rungs = Table(title="Gap per x_max", show_lines=False, pad_edge=True)
    rungs.add_column("x_max", justify="right")
    rungs.add_column("n_x", justify="right")
    rungs.add_column("x", justify="right")
    rungs.add_column(f"u ({report.bc_a})", justify="right")
    rungs.add_column(f"u ({report.bc_b})", justify="right")
    rungs.add_column("Gap", justify="right")
    for rung in report.rungs:
        for x, a, b, gap in zip(rung.reference_xs, rung.u_a, rung.u_b, rung.gaps):
            rungs.add_row(f"{rung.x_max:g}", str(rung.n_x), f"{x:g}", format_float(a), format_float(b), format_sci(gap))
    console.print(rungs)


def render_batch(model: str, batch: PathBatch) -> None:
    absorbed = int(batch.absorption_flags.sum())
    table = _kv_table()
    table.add_row("Model", model)
    table.add_row("Scheme", batch.scheme.value)
    table.add_row("Paths", f"{batch.n_paths} ({absorbed} absorbed, {batch.overflow_count} overflowed)")
    table.add_row("Steps", str(batch.n_steps))
    table.add_row("Mean of X_T", format_float(float(batch.terminal_values.mean())))
    table.add_row("Seed", str(batch.rng.seed))
    console.print(table)
