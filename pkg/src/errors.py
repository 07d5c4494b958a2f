"""Exception hierarchy for the lab."""

from __future__ import annotations


class LabError(Exception):
    """Base class for every error raised by cauchylab."""


class SpecSyntaxError(LabError):
    """A volatility or payoff spec string could not be parsed."""

    def __init__(
        self,
        source: str,
        message: str,
        position: tuple[int, int] | None = None,
    ) -> None:
        self.source = source
        self.position = position
        self.message = message
        super().__init__(self.render())

    def render(self) -> str:
        if self.position is None:
            return f"{self.message}: {self.source!r}"
        start, end = self.position
        caret = " " * start + "^" * max(1, end - start)
        return f"{self.message} at column {start}:\n  {self.source}\n  {caret}"


class ModelValidationError(LabError):
    """A parsed model violates a standing assumption (sign, finiteness)."""


class QuadratureDomainError(LabError):
    """The integrand is not finite on the integration interval."""


class SimulationError(LabError):
    """Path simulation could not produce a trustworthy batch."""


class SchemeError(LabError):
    """The requested numerical scheme cannot answer the question asked."""


class SolverError(LabError):
    """A finite-difference time step failed."""


class GridMismatchError(LabError):
    """Two surfaces that must share a grid do not."""
