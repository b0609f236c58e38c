"""CSV and JSON writers for :class:`~compton_xsec.scans.ScanTable`.

CSV layout: ``# key=value`` metadata lines, one column-header line, then one
row per record. Numbers carry 12 significant digits. Failed points keep
their coordinates, an empty value and ``status=failed``.

JSON layout: ``{"metadata": ..., "columns": [...], "rows": [[...], ...]}``
with full-precision floats and ``null`` for missing values, serialised
with fixed options so that load + dump reproduces the file byte for byte.
"""

from __future__ import annotations

import io
import json
import math
from dataclasses import replace

import numpy as np

from .cross_sections import _FROM_AU, Units

__all__ = ["columns", "convert_table", "dumps_json", "format_number", "rows", "to_csv", "to_json"]

_JSON_OPTS = {"indent": 2, "ensure_ascii": True, "allow_nan": False}


def format_number(x) -> str:
    if x is None:
        return ""
    x = float(x)
    if math.isnan(x):
        return ""
    return format(x, ".12g")


def _json_number(x):
    if x is None:
        return None
    x = float(x)
    return x if math.isfinite(x) else None


def columns(table) -> list[str]:
    coords = [f"{n}_{u}" for n, u in zip(table.coord_names, table.coord_units)]
    units = table.records[0].units if table.records else "au"
    extra = list(table.derived)
    return (["target"] + coords + [f"{table.value_name}_{units}", f"error_{units}"]
            + extra + ["status"])


def rows(table):
    derived = table.derived
    for r in table.records:
        yield ([r.tag] + list(r.coordinates) + [r.value, r.error_estimate]
               + [fn(r) for fn in derived.values()] + [r.status])


def convert_table(table, to):
    """Copy of a cross-section table in another output unit."""
    to = Units(to)
    recs = []
    for r in table.records:
        factor = _FROM_AU[to] / _FROM_AU[Units(r.units)]
        err = None if r.error_estimate is None else r.error_estimate * factor
        recs.append(replace(r, value=r.value * factor, units=to.value, error_estimate=err))
    meta = dict(table.metadata)
    meta["units"] = to.value
    return replace(table, records=recs, metadata=meta)


def _meta_value(v) -> str:
    if isinstance(v, (float, np.floating)):
        return format_number(v)
    return str(v)


def to_csv(table) -> str:
    buf = io.StringIO()
    for k, v in table.metadata.items():
        buf.write(f"# {k}={_meta_value(v)}\n")
    buf.write(",".join(columns(table)) + "\n")
    for row in rows(table):
        cells = [c if isinstance(c, str) else format_number(c) for c in row]
        buf.write(",".join(cells) + "\n")
    return buf.getvalue()


def _json_obj(table):
    meta = {k: (_json_number(v) if isinstance(v, (float, np.floating)) else v)
            for k, v in table.metadata.items()}
    data_rows = [[c if isinstance(c, str) else _json_number(c) for c in row]
                 for row in rows(table)]
    return {"metadata": meta, "columns": columns(table), "rows": data_rows}


def dumps_json(obj) -> str:
    return json.dumps(obj, **_JSON_OPTS) + "\n"


def to_json(table) -> str:
    return dumps_json(_json_obj(table))
