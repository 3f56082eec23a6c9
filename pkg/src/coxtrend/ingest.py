"""Reading observation and prior files.

Both are delimited text with a header row. Observation files use either
``start,end,count`` or ``center,length,count``; prior files use
``center,a`` with an optional ``q`` column. The delimiter is taken from the
header (comma, semicolon, tab, or whitespace). Decimal commas are rejected.
"""

from __future__ import annotations

import csv
import io
import math
import re
from pathlib import Path

from .model import ObservationSeries, PriorSpec, WeightMode, validate

_DECIMAL_COMMA = re.compile(r"^[+-]?\d+,\d+$")


class InputError(ValueError):
    """Malformed or invalid input file; messages carry the line number."""


def _read_rows(text: str, source: str) -> tuple[list[str], list[tuple[int, list[str]]]]:
    lines = [(n, ln) for n, ln in enumerate(text.splitlines(), start=1) if ln.strip() and not ln.lstrip().startswith("#")]
    if not lines:
        raise InputError(f"{source}: file is empty (a header row is required)")
    header_line = lines[0][1]
    for delim in (",", ";", "\t"):
        if delim in header_line:
            break
    else:
        delim = None

    def split(line: str) -> list[str]:
        if delim is None:
            return line.split()
        return [f.strip() for f in next(csv.reader(io.StringIO(line), delimiter=delim))]

    header = [h.lower() for h in split(header_line)]
    rows = [(n, split(ln)) for n, ln in lines[1:]]
    for n, fields in rows:
        if len(fields) != len(header):
            hint = ""
            if any(_DECIMAL_COMMA.match(f) for f in fields) or delim == ",":
                hint = " (decimal commas are not supported; use a decimal point)"
            raise InputError(f"{source} line {n}: expected {len(header)} fields, got {len(fields)}{hint}")
    return header, rows


def _number(field: str, source: str, line: int, column: str) -> float:
    if _DECIMAL_COMMA.match(field):
        raise InputError(
            f"{source} line {line}: column {column!r} value {field!r} uses a decimal comma; use a decimal point"
        )
    try:
        value = float(field)
    except ValueError:
        raise InputError(f"{source} line {line}: column {column!r} value {field!r} is not a number") from None
    if not math.isfinite(value):
        raise InputError(f"{source} line {line}: column {column!r} must be finite")
    return value


def _count(field: str, source: str, line: int) -> int:
    value = _number(field, source, line, "count")
    if value < 0 or value != math.floor(value):
        raise InputError(f"{source} line {line}: count must be a nonnegative integer, got {field!r}")
    return int(value)


def parse_series(text: str, source: str = "<data>", time_unit: str = "year") -> ObservationSeries:
    header, rows = _read_rows(text, source)
    cols = set(header)
    if {"start", "end", "count"} == cols:
        scheme = "bounds"
    elif {"center", "length", "count"} == cols:
        scheme = "centers"
    else:
        raise InputError(
            f"{source} line 1: header must be exactly (start, end, count) or (center, length, count); got {header}"
        )
    if not rows:
        raise InputError(f"{source}: no data rows")
    idx = {name: header.index(name) for name in header}
    a_col, b_col = ("start", "end") if scheme == "bounds" else ("center", "length")
    first, second, counts, lines = [], [], [], []
    for n, f in rows:
        first.append(_number(f[idx[a_col]], source, n, a_col))
        second.append(_number(f[idx[b_col]], source, n, b_col))
        counts.append(_count(f[idx["count"]], source, n))
        lines.append(n)
    if scheme == "bounds":
        series = ObservationSeries.from_bounds(first, second, counts, time_unit)
    else:
        series = ObservationSeries.from_arrays(first, second, counts, time_unit)
    violations = validate(series)
    if violations:
        # map record indices back to file lines
        msgs = []
        for v in violations:
            m = re.match(r"record (\d+): (.*)", v)
            msgs.append(f"{source} line {lines[int(m.group(1))]}: {m.group(2)}" if m else f"{source}: {v}")
        raise InputError("; ".join(msgs))
    return series


def parse_prior(text: str, source: str = "<prior>", mode: WeightMode | str = WeightMode.AUGMENT) -> PriorSpec:
    mode = mode if isinstance(mode, WeightMode) else WeightMode(mode.upper())
    header, rows = _read_rows(text, source)
    if set(header) not in ({"center", "a"}, {"center", "a", "q"}):
        raise InputError(f"{source} line 1: header must be (center, a) or (center, a, q); got {header}")
    idx = {name: header.index(name) for name in header}
    taus, pseudo, weights = [], [], []
    for n, f in rows:
        taus.append(_number(f[idx["center"]], source, n, "center"))
        a = _number(f[idx["a"]], source, n, "a")
        if a < 0:
            raise InputError(f"{source} line {n}: pseudo-count a must be >= 0")
        pseudo.append(a)
        if "q" in idx:
            q = _number(f[idx["q"]], source, n, "q")
            if not 0 <= q <= 1:
                raise InputError(f"{source} line {n}: weight q must lie in [0, 1]")
            weights.append(q)
    if mode is WeightMode.BLEND and "q" not in idx:
        raise InputError(f"{source}: blend mode needs a q column")
    return PriorSpec.pseudo_counts(taus, pseudo, mode, weights if "q" in idx else None)


def read_series(path: str | Path, **kwargs) -> ObservationSeries:
    path = Path(path)
    return parse_series(path.read_text(), source=str(path), **kwargs)


def read_prior(path: str | Path, **kwargs) -> PriorSpec:
    path = Path(path)
    return parse_prior(path.read_text(), source=str(path), **kwargs)
