"""CSV serialization of sweep rows."""
from __future__ import annotations

import csv
import io
import math

from .analysis import SweepRow

HEADER = ("x0", "alpha", "tau_half", "tau", "x_hat0", "tau_linear")


def format_number(value) -> str:
    """Shortest round-trip decimal; integral values drop the trailing ``.0``."""
    value = float(value)
    if math.isfinite(value) and value == int(value) and abs(value) < 1e15:
        return str(int(value))
    return repr(value)


def csv_text(rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\r\n")
    writer.writerow(HEADER)
    ordered = sorted(rows, key=lambda r: (r.x0, r.alpha))
    for row in ordered:
        writer.writerow([format_number(getattr(row, name)) for name in HEADER])
    return buf.getvalue()


def write_csv(rows, path) -> None:
    """Write ``rows`` (a SweepTable or an iterable of SweepRow) to ``path``."""
    rows = getattr(rows, "rows", rows)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        fh.write(csv_text(rows))


def parse_csv(text: str) -> list[SweepRow]:
    reader = csv.reader(io.StringIO(text, newline=""))
    header = tuple(next(reader))
    if header != HEADER:
        raise ValueError(f"unexpected CSV header {header!r}")
    rows = []
    for record in reader:
        if not record:
            continue
        rows.append(SweepRow(*(float(v) for v in record)))
    return rows


def read_csv(path) -> list[SweepRow]:
    with open(path, newline="", encoding="utf-8") as fh:
        return parse_csv(fh.read())
