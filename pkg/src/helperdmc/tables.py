"""Number formatting and CSV output shared by the CLI and the simulators.

Reals are printed with 9 digits after the point; CSV is RFC 4180 style with
a header row and LF line endings, so identical inputs give identical bytes.
"""
from __future__ import annotations

import csv
import io
from typing import Iterable, Mapping, Sequence


def fmt_num(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float) or type(v).__name__.startswith("float"):
        return f"{float(v):.9f}"
    return str(v)


def to_csv(rows: Iterable[Mapping], fields: Sequence[str] | None = None) -> str:
    rows = list(rows)
    if fields is None:
        fields = list(rows[0]) if rows else []
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=list(fields), lineterminator="\n", extrasaction="ignore")
    w.writeheader()
    for r in rows:
        w.writerow({k: fmt_num(r[k]) for k in fields if k in r})
    return buf.getvalue()
