"""Text format for GF(q) codes.

Layout::

    gfq-code v1 p=6 n=267 m=174 b=5 seed=7 poly=0x43 construction=peg
    check 0: 12:1f 40:2a 133:3
    check 1: 5:7 77:11
    ...

One line per check lists ``<variable>:<coefficient in hex>`` pairs. The
``construction`` field is optional and defaults to ``external``.

Example:
    >>> text = format_code(code)
    >>> parse_code(text).same_graph(code)
    True
"""

import logging
from pathlib import Path
from typing import Dict, List, Tuple, Union

from gfqc.domain.errors import CodeFileError, ConfigurationError
from gfqc.domain.models.code import CONSTRUCTIONS, SparseCode
from gfqc.infrastructure.services.field import field_tables

logger = logging.getLogger(__name__)

MAGIC = "gfq-code"
VERSION = "v1"
_REQUIRED = ("p", "n", "m", "b", "seed", "poly")


def format_code(code: SparseCode) -> str:
    """Serialize a code; equal codes always give identical text."""
    tables = field_tables(code.p)
    lines = [
        f"{MAGIC} {VERSION} p={code.p} n={code.n_sym} m={code.m_sym} b={code.b} "
        f"seed={code.seed} poly={tables.primitive_poly:#x} "
        f"construction={code.construction}"
    ]
    for f in range(code.m_sym):
        variables, coefs = code.check_neighbors(f)
        pairs = " ".join(f"{v}:{h:x}" for v, h in zip(variables.tolist(), coefs.tolist()))
        lines.append(f"check {f}: {pairs}".rstrip())
    return "\n".join(lines) + "\n"


def _parse_header(line: str) -> Dict[str, str]:
    parts = line.split()
    if len(parts) < 2 or parts[0] != MAGIC:
        raise CodeFileError("Missing 'gfq-code' header line")
    if parts[1] != VERSION:
        raise CodeFileError(f"Unsupported code file version {parts[1]!r}")
    fields = {}
    for token in parts[2:]:
        key, sep, value = token.partition("=")
        if not sep:
            raise CodeFileError(f"Malformed header field {token!r}")
        fields[key] = value
    missing = [k for k in _REQUIRED if k not in fields]
    if missing:
        raise CodeFileError(f"Header lacks {', '.join(missing)}")
    return fields


def parse_code(text: str) -> SparseCode:
    """Parse code-file text.

    Raises:
        CodeFileError: On any structural problem, a polynomial that differs
            from the fixed one for ``p``, or an invalid graph.
    """
    lines = [ln.strip() for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise CodeFileError("Empty code file")
    fields = _parse_header(lines[0])

    try:
        p = int(fields["p"])
        n_sym = int(fields["n"])
        m_sym = int(fields["m"])
        b = int(fields["b"])
        seed = int(fields["seed"])
        poly = int(fields["poly"], 16)
    except ValueError as e:
        raise CodeFileError(f"Non-numeric header field: {e}") from e
    construction = fields.get("construction", "external")
    if construction not in CONSTRUCTIONS:
        raise CodeFileError(f"Unknown construction {construction!r}")

    try:
        tables = field_tables(p)
    except ConfigurationError as e:
        raise CodeFileError(str(e)) from e
    if poly != tables.primitive_poly:
        raise CodeFileError(
            f"Polynomial {poly:#x} differs from the fixed {tables.primitive_poly:#x} for p={p}"
        )

    body = lines[1:]
    if len(body) != m_sym:
        raise CodeFileError(f"Header declares m={m_sym} checks, file has {len(body)}")

    checks: List[List[Tuple[int, int]]] = []
    for expected, line in enumerate(body):
        head, sep, rest = line.partition(":")
        label = head.split()
        if not sep or len(label) != 2 or label[0] != "check":
            raise CodeFileError(f"Malformed check line {line!r}")
        if label[1] != str(expected):
            raise CodeFileError(f"Expected check {expected}, found {label[1]}")
        members = []
        for pair in rest.split():
            var, sep, coef = pair.partition(":")
            if not sep:
                raise CodeFileError(f"Malformed edge {pair!r} on check {expected}")
            try:
                members.append((int(var), int(coef, 16)))
            except ValueError as e:
                raise CodeFileError(f"Malformed edge {pair!r} on check {expected}") from e
        checks.append(members)

    try:
        code = SparseCode.from_checks(n_sym, checks, p, seed=seed, b=b, construction=construction)
    except (ConfigurationError, ValueError) as e:
        raise CodeFileError(f"Invalid code: {e}") from e
    logger.debug("Parsed code n_sym=%d m_sym=%d p=%d", n_sym, m_sym, p)
    return code


def write_code_file(path: Union[str, Path], code: SparseCode) -> None:
    Path(path).write_text(format_code(code), encoding="utf-8")


def read_code_file(path: Union[str, Path]) -> SparseCode:
    return parse_code(Path(path).read_text(encoding="utf-8"))
