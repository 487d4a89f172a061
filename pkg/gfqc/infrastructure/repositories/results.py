"""Experiment tables and bit files.

Every table is written as CSV with a header row and mirrored as JSON (a list
of row objects) next to it, so ``sweep.csv`` comes with ``sweep.json``.
"""

import csv
import json
import logging
from pathlib import Path
from typing import Any, Dict, Iterable, List, Sequence, Tuple, Union

import numpy as np

from gfqc.domain.errors import ConfigurationError

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]


class ResultWriter:
    """Writes row dictionaries as CSV plus a JSON mirror.

    Attributes:
        directory: Directory receiving the files.

    Example:
        >>> writer = ResultWriter("out")
        >>> writer.write("gamma_sweep", [point.as_row() for point in points])
        (PosixPath('out/gamma_sweep.csv'), PosixPath('out/gamma_sweep.json'))
    """

    def __init__(self, directory: PathLike):
        self.directory = Path(directory)

    def write(
        self,
        name: str,
        rows: Sequence[Dict[str, Any]],
        fieldnames: Sequence[str] = (),
    ) -> Tuple[Path, Path]:
        """Write ``<name>.csv`` and ``<name>.json``.

        Args:
            name: File stem.
            rows: Rows in output order.
            fieldnames: Column order; taken from the first row when empty.

        Returns:
            ``(csv_path, json_path)``.
        """
        self.directory.mkdir(parents=True, exist_ok=True)
        csv_path = self.directory / f"{name}.csv"
        json_path = self.directory / f"{name}.json"
        write_csv(csv_path, rows, fieldnames)
        json_path.write_text(
            json.dumps([_plain(r) for r in rows], indent=2) + "\n", encoding="utf-8"
        )
        logger.info("Wrote %d rows to %s", len(rows), csv_path)
        return csv_path, json_path


def _plain(row: Dict[str, Any]) -> Dict[str, Any]:
    """JSON-safe copy; numpy scalars become Python numbers."""
    out = {}
    for key, value in row.items():
        if isinstance(value, np.generic):
            value = value.item()
        if isinstance(value, float) and not np.isfinite(value):
            value = None
        out[key] = value
    return out


def write_csv(
    path: PathLike, rows: Sequence[Dict[str, Any]], fieldnames: Sequence[str] = ()
) -> None:
    columns = list(fieldnames) or (list(rows[0].keys()) if rows else [])
    with Path(path).open("w", newline="", encoding="utf-8") as handle:
        writer = csv.DictWriter(handle, fieldnames=columns)
        writer.writeheader()
        for row in rows:
            writer.writerow(_plain(row))


def read_csv(path: PathLike) -> List[Dict[str, str]]:
    with Path(path).open(newline="", encoding="utf-8") as handle:
        return list(csv.DictReader(handle))


def parse_bits(text: str) -> np.ndarray:
    """Read a ``0``/``1`` text; whitespace is ignored.

    Raises:
        ConfigurationError: On any other character or an empty input.
    """
    digits = "".join(text.split())
    if not digits:
        raise ConfigurationError("Bit file is empty")
    if set(digits) - {"0", "1"}:
        raise ConfigurationError("Bit file may contain only 0 and 1")
    return np.frombuffer(digits.encode("ascii"), dtype=np.uint8) - ord("0")


def format_bits(bits: Iterable[int]) -> str:
    return "".join(str(int(b)) for b in bits) + "\n"


def read_bits(path: PathLike) -> np.ndarray:
    return parse_bits(Path(path).read_text(encoding="ascii")).astype(np.int64)


def write_bits(path: PathLike, bits: np.ndarray) -> None:
    Path(path).write_text(format_bits(bits), encoding="ascii")
