"""Offline figure rendering for resolvability experiment outputs.

Consumes only the persisted interfaces (sweep CSV, info JSON, derived
CSVs); never imports the package that produced them.
"""

from .io import SchemaError, read_bounds, read_epsprime, read_info, read_sweep
from .render import KINDS, PlotJob, render

__all__ = [
    "KINDS",
    "PlotJob",
    "SchemaError",
    "read_bounds",
    "read_epsprime",
    "read_info",
    "read_sweep",
    "render",
]
