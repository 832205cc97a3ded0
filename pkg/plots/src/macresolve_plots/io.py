"""Schema-checked readers for the persisted experiment files.

The sweep schema below restates the producer's CSV contract verbatim;
a file that deviates from it is rejected, not coerced.
"""

from __future__ import annotations

import csv
import json

SWEEP_COLUMNS = (
    "seed",
    "n",
    "R1_nominal",
    "R2_nominal",
    "R1_eff",
    "R2_eff",
    "M1",
    "M2",
    "tv",
    "p_atyp1",
    "p_atyp2",
    "typ_excess",
    "eps1",
    "eps2",
    "bound_total",
    "bound_vacuous_flag",
    "runtime_ms",
)

EPSPRIME_COLUMNS = ("n", "eps", "epsPrime1", "epsPrime2")

BOUNDS_COLUMNS = ("n", "kind", "value", "threshold", "vacuous")

INFO_KEYS = ("iXZ", "iYZ", "sumRate", "cornerA", "cornerB")


class SchemaError(ValueError):
    """An input file does not match the interface it claims to implement."""


def _read_table(path, columns, numeric, optional=()):
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != list(columns):
            raise SchemaError(f"{path}: header {header!r} != {list(columns)!r}")
        rows = []
        for index, raw in enumerate(reader):
            if len(raw) != len(columns):
                raise SchemaError(f"{path}: row {index + 2} has {len(raw)} fields")
            row = dict(zip(columns, raw))
            for name in numeric:
                if row[name] == "" and name in optional:
                    row[name] = None
                    continue
                try:
                    row[name] = float(row[name])
                except ValueError as exc:
                    raise SchemaError(
                        f"{path}: row {index + 2} field {name}: {exc}"
                    ) from None
            rows.append(row)
    if not rows:
        raise SchemaError(f"{path}: no data rows")
    return rows


def read_sweep(path):
    """Per-codebook records from a tv-sweep CSV."""
    numeric = tuple(c for c in SWEEP_COLUMNS if c != "seed")
    return _read_table(path, SWEEP_COLUMNS, numeric)


def read_epsprime(path):
    return _read_table(path, EPSPRIME_COLUMNS, ("n", "eps", "epsPrime1", "epsPrime2"))


def read_bounds(path):
    return _read_table(
        path,
        BOUNDS_COLUMNS,
        ("n", "value", "threshold", "vacuous"),
        optional=("value",),
    )


def read_info(path):
    """The channel-analytics JSON document (corner points and faces)."""
    with open(path, "r", encoding="utf-8") as fh:
        try:
            payload = json.load(fh)
        except json.JSONDecodeError as exc:
            raise SchemaError(f"{path}: {exc}") from None
    if not isinstance(payload, dict):
        raise SchemaError(f"{path}: expected a JSON object")
    missing = [k for k in INFO_KEYS if k not in payload]
    if missing:
        raise SchemaError(f"{path}: missing keys {missing}")
    for corner in ("cornerA", "cornerB"):
        if len(payload[corner]) != 2:
            raise SchemaError(f"{path}: {corner} must be a rate pair")
    return payload
