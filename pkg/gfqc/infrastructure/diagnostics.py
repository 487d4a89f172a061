"""Logging setup and per-sweep diagnostics.

``configure_logging`` is called once by the command line with the level from
``Settings.log`` (``GFQC_LOG``). Message-passing runs can additionally stream
one row per sweep to a ``DiagnosticsSink``.
"""

import csv
import logging
from dataclasses import astuple, dataclass
from pathlib import Path
from typing import List, Protocol, Union

LOG_FORMAT = "%(asctime)s %(levelname)-7s %(name)s: %(message)s"

DIAGNOSTICS_HEADER = (
    "trial",
    "sweep",
    "gamma",
    "max_delta",
    "unsat_checks",
    "entropy_proxy",
)


def configure_logging(level: str = "WARNING") -> None:
    """Route package logs to stderr at ``level``.

    Args:
        level: Standard logging level name.
    """
    logging.basicConfig(level=level.upper(), format=LOG_FORMAT, force=True)
    logging.getLogger("gfqc").setLevel(level.upper())


@dataclass(frozen=True)
class SweepRecord:
    """One diagnostics row.

    Attributes:
        trial: Encoder trial, starting at 1.
        sweep: Sweep within the trial, starting at 1.
        gamma: Reinforcement exponent used in the sweep.
        max_delta: Largest absolute change of a check message.
        unsat_checks: Checks violated by the hard decision.
        entropy_proxy: Mean marginal entropy in nats per variable.
    """

    trial: int
    sweep: int
    gamma: float
    max_delta: float
    unsat_checks: int
    entropy_proxy: float


class DiagnosticsSink(Protocol):
    def record(self, row: SweepRecord) -> None: ...


class MemoryDiagnostics:
    """Keeps sweep records in a list."""

    def __init__(self) -> None:
        self.rows: List[SweepRecord] = []

    def record(self, row: SweepRecord) -> None:
        self.rows.append(row)


class CsvDiagnostics:
    """Writes sweep records to a CSV file.

    Example:
        >>> with CsvDiagnostics("sweeps.csv") as sink:
        ...     run_rbp(code, prior, params, diagnostics=sink)
    """

    def __init__(self, path: Union[str, Path]):
        self.path = Path(path)
        self._handle = self.path.open("w", newline="", encoding="utf-8")
        self._writer = csv.writer(self._handle)
        self._writer.writerow(DIAGNOSTICS_HEADER)
        self.count = 0

    def record(self, row: SweepRecord) -> None:
        self._writer.writerow(astuple(row))
        self.count += 1

    def close(self) -> None:
        if not self._handle.closed:
            self._handle.close()

    def __enter__(self) -> "CsvDiagnostics":
        return self

    def __exit__(self, *exc: object) -> None:
        self.close()
