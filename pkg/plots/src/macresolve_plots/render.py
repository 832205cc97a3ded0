"""Figure rendering: one deterministic image per job.

All randomness-free: a fixed style, fixed fonts, and no timestamps, so
rendering the same inputs twice yields byte-identical files.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import matplotlib
import numpy as np

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402  (backend must be pinned first)

from .io import read_bounds, read_epsprime, read_info, read_sweep  # noqa: E402

KINDS = ("decay", "region", "epsprime", "bounds")

_STYLE = {
    "figure.figsize": (6.4, 4.2),
    "figure.dpi": 120,
    "savefig.dpi": 120,
    "font.size": 10,
    "axes.grid": True,
    "grid.alpha": 0.3,
    "svg.hashsalt": "macresolve-plots",
}


@dataclass(frozen=True)
class PlotJob:
    """What to draw: an input file, a plot kind, and a destination image."""

    kind: str
    source: str
    out: str
    title: str | None = None

    def __post_init__(self) -> None:
        if self.kind not in KINDS:
            raise ValueError(f"kind must be one of {KINDS}")


def _quartiles(rows, key="tv"):
    """Median and quartiles of ``key`` per block length, sorted by n."""
    by_n: dict[float, list[float]] = {}
    for row in rows:
        by_n.setdefault(row["n"], []).append(row[key])
    ns = sorted(by_n)
    stacked = [np.percentile(by_n[n], (25, 50, 75)) for n in ns]
    q25, med, q75 = np.array(stacked).T
    return np.array(ns), med, q25, q75


def _render_decay(rows, ax, title):
    groups: dict[tuple, list] = {}
    for row in rows:
        groups.setdefault((row["R1_nominal"], row["R2_nominal"]), []).append(row)
    for (r1, r2), group in sorted(groups.items()):
        ns, med, q25, q75 = _quartiles(group)
        label = f"$R_1$={r1:g}, $R_2$={r2:g}"
        (line,) = ax.plot(ns, med, marker="o", label=label)
        ax.fill_between(ns, q25, q75, alpha=0.2, color=line.get_color())
    ax.set_yscale("log")
    ax.set_xlabel("block length n")
    ax.set_ylabel("total variation (median, IQR band)")
    ax.set_title(title or "Exact TV versus block length")
    ax.legend()


def _render_region(info, ax, title):
    a1, a2 = info["cornerA"]
    b1, b2 = info["cornerB"]
    top = 1.35 * info["sumRate"]
    ax.axvline(info["iXZ"], linestyle=":", color="gray")
    ax.axhline(info["iYZ"], linestyle=":", color="gray")
    diag = np.array([0.0, top])
    ax.plot(diag, info["sumRate"] - diag, linestyle="--", color="black",
            label="$r_1 + r_2$ = sum rate")
    # boundary of the achievable set: corner-to-corner segment plus rays
    ax.plot([a1, b1], [a2, b2], color="tab:blue")
    ax.plot([a1, top], [a2, a2], color="tab:blue")
    ax.plot([b1, b1], [b2, top], color="tab:blue")
    ax.plot([a1, b1], [a2, b2], "o", color="tab:red", zorder=5)
    ax.annotate(f"A ({a1:.3f}, {a2:.3f})", (a1, a2), textcoords="offset points",
                xytext=(6, 6))
    ax.annotate(f"B ({b1:.3f}, {b2:.3f})", (b1, b2), textcoords="offset points",
                xytext=(6, 6))
    ax.set_xlim(0.0, top)
    ax.set_ylim(0.0, top)
    ax.set_xlabel("$r_1$ (nats)")
    ax.set_ylabel("$r_2$ (nats)")
    ax.set_title(title or "Resolvability rate region")
    ax.legend(loc="upper right")


def _render_epsprime(rows, ax, title):
    ns = np.array([row["n"] for row in rows])
    eps = rows[0]["eps"]
    for key, style in (("epsPrime1", "o-"), ("epsPrime2", "s-")):
        ax.plot(ns, [row[key] for row in rows], style, label=key)
    ax.axhline(eps, linestyle="--", color="gray", label=f"eps = {eps:g}")
    ax.set_xscale("log")
    ax.set_xlabel("block length n")
    ax.set_ylabel("effective one-shot eps'")
    ax.set_title(title or "Convergence of eps' to the target eps")
    ax.legend()


def _render_bounds(rows, ax, title):
    for kind in sorted({row["kind"] for row in rows}):
        group = [row for row in rows if row["kind"] == kind]
        ns = [row["n"] for row in group]
        ax.plot(ns, [row["threshold"] for row in group], "o-",
                label=f"{kind}: threshold")
        known = [(row["n"], row["value"]) for row in group if row["value"] is not None]
        if known:
            ax.plot(*zip(*known), "s--", label=f"{kind}: bound value")
    ax.set_yscale("log")
    ax.set_xlabel("block length n")
    ax.set_ylabel("probability bound")
    ax.set_title(title or "Certificate value against its TV threshold")
    ax.legend()


def render(job: PlotJob) -> Path:
    """Draw one figure; the output file appears only on success."""
    if job.kind == "decay":
        data = read_sweep(job.source)
    elif job.kind == "region":
        data = read_info(job.source)
    elif job.kind == "epsprime":
        data = read_epsprime(job.source)
    else:
        data = read_bounds(job.source)

    with plt.rc_context(_STYLE):
        fig, ax = plt.subplots()
        try:
            if job.kind == "decay":
                _render_decay(data, ax, job.title)
            elif job.kind == "region":
                _render_region(data, ax, job.title)
            elif job.kind == "epsprime":
                _render_epsprime(data, ax, job.title)
            else:
                _render_bounds(data, ax, job.title)
            fig.tight_layout()
            fig.savefig(job.out, metadata=_no_dates(job.out))
        finally:
            plt.close(fig)
    return Path(job.out)


def _no_dates(out: str) -> dict:
    # SVG embeds a creation date unless told otherwise; PNG does not
    if str(out).lower().endswith(".svg"):
        return {"Date": None}
    return {}
