"""Seeded Monte Carlo campaigns over random codebooks, persisted as CSV.

Per-trial seeds derive from (master seed, n, trial index), so any
execution order or worker layout reproduces the same records.  CSV
values use repr() so a round trip restores every float bit for bit;
the runtime column stays 0.0 unless timings are explicitly enabled,
keeping repeated runs byte-identical.
"""

from __future__ import annotations

import csv
import io
import math
import time
from dataclasses import dataclass, field

import numpy as np

from .channel import ChannelSpec, induced_joint
from .codebook import Budget, RatePair, codebook_sizes, sample_codebooks, sample_rows
from .errors import BudgetExceededError
from .info import density_moments, mutual_informations
from .resolvability import (
    TypParams,
    decompose_tv,
    exact_atypicality,
    first_order_certificate,
    lemma_atypical_bound,
    lemma_typical_bound,
    second_order_eps_prime,
    second_order_rates,
    second_order_rhs,
    second_order_typ_params,
)

CSV_COLUMNS = (
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

_INT_COLUMNS = {"seed", "n", "M1", "M2", "bound_vacuous_flag"}

# ceiling used when a closed-form bound overflows; the vacuous flag carries
# the real story, the cap just keeps records finite
BOUND_CAP = 1e300

SCHEDULES = ("fixed", "corner-offset", "second-order")


def derive_seed(master: int, n: int, trial: int) -> int:
    """Stable per-trial seed; independent of how trials are distributed."""
    return int(np.random.SeedSequence((master, n, trial)).generate_state(1, np.uint64)[0])


@dataclass(frozen=True)
class ExperimentConfig:
    """One campaign: a channel, a rate schedule, block lengths and trials.

    ``r1``/``r2`` are absolute rates for the fixed schedule and additive
    offsets from the first corner point for corner-offset; the
    second-order schedule derives rates from (eps, c) and ignores them.
    """

    channel: ChannelSpec
    n_list: tuple
    trials: int
    seed: int
    schedule: str = "fixed"
    r1: float | None = None
    r2: float | None = None
    eps1: float = 0.1
    eps2: float = 0.1
    eps: float = 0.1
    c: float = 1.5
    d: float = 0.25
    corner: str = "A"
    timings: bool = False
    budget: Budget = field(default_factory=Budget)

    def __post_init__(self) -> None:
        object.__setattr__(self, "n_list", tuple(int(n) for n in self.n_list))
        if not self.n_list or any(n < 1 for n in self.n_list):
            raise ValueError("n_list must contain block lengths >= 1")
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if self.schedule not in SCHEDULES:
            raise ValueError(f"schedule must be one of {SCHEDULES}")
        if self.schedule in ("fixed", "corner-offset") and (
            self.r1 is None or self.r2 is None
        ):
            raise ValueError(f"schedule {self.schedule!r} needs r1 and r2")


@dataclass(frozen=True)
class TrialRecord:
    """One codebook draw: its decomposition, sizes, and bound snapshot."""

    seed: int
    trial: int
    n: int
    r1_nominal: float
    r2_nominal: float
    r1_eff: float
    r2_eff: float
    m1: int
    m2: int
    tv: float
    p_atyp1: float
    p_atyp2: float
    typ_excess: float
    eps1: float
    eps2: float
    bound_total: float
    bound_vacuous_flag: int
    runtime_ms: float

    def __post_init__(self) -> None:
        for name in (
            "r1_nominal", "r2_nominal", "r1_eff", "r2_eff", "tv", "p_atyp1",
            "p_atyp2", "typ_excess", "eps1", "eps2", "bound_total", "runtime_ms",
        ):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"{name} must be finite")
        if not 0.0 <= self.tv <= 1.0 + 1e-12:
            raise ValueError(f"tv must lie in [0, 1], got {self.tv!r}")
        if self.tv > self.p_atyp1 + self.p_atyp2 + self.typ_excess + 1e-12:
            raise AssertionError("record violates the decomposition inequality")

    def csv_values(self) -> dict:
        return {
            "seed": self.seed,
            "n": self.n,
            "R1_nominal": self.r1_nominal,
            "R2_nominal": self.r2_nominal,
            "R1_eff": self.r1_eff,
            "R2_eff": self.r2_eff,
            "M1": self.m1,
            "M2": self.m2,
            "tv": self.tv,
            "p_atyp1": self.p_atyp1,
            "p_atyp2": self.p_atyp2,
            "typ_excess": self.typ_excess,
            "eps1": self.eps1,
            "eps2": self.eps2,
            "bound_total": self.bound_total,
            "bound_vacuous_flag": self.bound_vacuous_flag,
            "runtime_ms": self.runtime_ms,
        }


def _schedule_for(cfg: ExperimentConfig, joint, iq, n: int):
    """Rates, typicality slacks and a bound snapshot factory for one n."""
    if cfg.schedule == "second-order":
        variants = (
            ("conditional-x-given-y", "marginal-y")
            if cfg.corner == "A"
            else ("marginal-x", "conditional-y-given-x")
        )
        m1 = density_moments(joint, variants[0])
        m2 = density_moments(joint, variants[1])
        rates = second_order_rates(iq, m1, m2, cfg.eps, cfg.c, n, cfg.corner)
        params = second_order_typ_params(m1, m2, cfg.eps, cfg.d, n)

        def snapshot(r1_eff: float, r2_eff: float):
            ch = cfg.channel
            ep1 = second_order_eps_prime(m1, cfg.eps, cfg.d, n)
            ep2 = second_order_eps_prime(m2, cfg.eps, cfg.d, n)
            report = second_order_rhs(
                ep1, ep2, r1_eff, r2_eff, n, cfg.c, cfg.d, ch.sizeY, ch.sizeZ
            )
            return min(report.value, BOUND_CAP), int(report.vacuous), report

        return rates, params, snapshot

    if cfg.schedule == "corner-offset":
        rates = RatePair(iq.i_xz_given_y + cfg.r1, iq.i_yz + cfg.r2, n)
    else:
        rates = RatePair(cfg.r1, cfg.r2, n)
    params = TypParams(cfg.eps1, cfg.eps2, n)

    def snapshot(r1_eff: float, r2_eff: float):
        ch = cfg.channel
        try:
            report = first_order_certificate(iq, r1_eff, r2_eff, n, ch.sizeY, ch.sizeZ)
        except ValueError:
            # rates below the corner or no feasible grid point: the only
            # certificate left is the trivial one
            return 1.0, 1, None
        return min(report.value, BOUND_CAP), int(report.vacuous), report

    return rates, params, snapshot


def run_tv_sweep(cfg: ExperimentConfig) -> list:
    """Sample, decompose and record every (n, trial) cell of the campaign."""
    joint = induced_joint(cfg.channel)
    iq = mutual_informations(joint)
    records = []
    for n in cfg.n_list:
        rates, params, snapshot = _schedule_for(cfg, joint, iq, n)
        m1, m2 = codebook_sizes(rates)
        r1_eff, r2_eff = math.log(m1) / n, math.log(m2) / n
        bound_total, vacuous, _ = snapshot(r1_eff, r2_eff)
        for trial in range(cfg.trials):
            seed = derive_seed(cfg.seed, n, trial)
            start = time.perf_counter()
            cb = sample_codebooks(cfg.channel, rates, seed, cfg.budget)
            dec = decompose_tv(cfg.channel, cb, params, cfg.budget)
            elapsed_ms = (time.perf_counter() - start) * 1000.0
            records.append(
                TrialRecord(
                    seed=seed,
                    trial=trial,
                    n=n,
                    r1_nominal=rates.r1,
                    r2_nominal=rates.r2,
                    r1_eff=cb.effective_r1,
                    r2_eff=cb.effective_r2,
                    m1=cb.M1,
                    m2=cb.M2,
                    tv=dec.tv,
                    p_atyp1=dec.p_atyp1,
                    p_atyp2=dec.p_atyp2,
                    typ_excess=dec.typ_excess,
                    eps1=params.eps1,
                    eps2=params.eps2,
                    bound_total=bound_total,
                    bound_vacuous_flag=vacuous,
                    runtime_ms=elapsed_ms if cfg.timings else 0.0,
                )
            )
    records.sort(key=lambda r: (r.n, r.trial))
    return records


@dataclass(frozen=True)
class ConcentrationSummary:
    """Empirical exceedance frequency next to its closed-form bound."""

    statement: str
    n: int
    delta: float | None
    threshold: float
    trials: int
    exceed_count: int
    bound: float

    @property
    def frequency(self) -> float:
        return self.exceed_count / self.trials

    @property
    def ci3(self) -> float:
        # worst-case 3 sigma binomial half-width
        return 3.0 * math.sqrt(0.25 / self.trials)

    @property
    def vacuous(self) -> bool:
        return not self.bound <= 1.0

    @property
    def consistent(self) -> bool:
        return self.vacuous or self.frequency <= self.bound + self.ci3

    def to_record(self) -> dict:
        return {
            "statement": self.statement,
            "n": self.n,
            "delta": self.delta,
            "threshold": self.threshold,
            "trials": self.trials,
            "exceed_count": self.exceed_count,
            "frequency": self.frequency,
            "bound": min(self.bound, BOUND_CAP),
            "ci3": self.ci3,
            "vacuous": int(self.vacuous),
            "consistent": int(self.consistent),
        }


def typical_lemma_campaign(
    ch: ChannelSpec,
    n: int,
    rate: float,
    trials: int,
    seed: int,
    eps: float,
    deltas,
) -> list:
    """Exceedance of the normalized typical sum over one random codebook.

    The conditioning pair (y^n, z^n) is the constant sequence at the most
    probable (y, z) symbol pair, which always has positive probability.
    """
    joint = induced_joint(ch)
    iq = mutual_informations(joint)
    y_star, z_star = np.unravel_index(int(np.argmax(joint.q_yz)), joint.q_yz.shape)
    q2 = joint.q_z_given_y[y_star, z_star]
    ratio = ch.W[:, y_star, z_star] / q2
    cap = math.exp(n * (iq.i_xz_given_y + eps))
    m_size = codebook_sizes(RatePair(rate, 0.0, n))[0]
    r_eff = math.log(m_size) / n
    sums = np.empty(trials)
    for trial in range(trials):
        rows = sample_rows(ch.qX, m_size, n, derive_seed(seed, n, trial), component=0)
        per_row = ratio[rows].prod(axis=1)
        sums[trial] = per_row[per_row <= cap].sum() / m_size
    out = []
    for delta in deltas:
        bound = lemma_typical_bound(iq.i_xz_given_y, eps, r_eff, n, delta)
        out.append(
            ConcentrationSummary(
                statement="lemma-typical",
                n=n,
                delta=float(delta),
                threshold=1.0 + delta,
                trials=trials,
                exceed_count=int(np.sum(sums > 1.0 + delta)),
                bound=bound,
            )
        )
    return out


def atypical_lemma_campaign(
    ch: ChannelSpec,
    n: int,
    r1: float,
    r2: float,
    trials: int,
    seed: int,
    eps1: float,
    eps2: float,
    deltas,
) -> list:
    """Exceedance of both atypical channel masses over random codebook pairs.

    The comparison level is mu (1 + delta) with mu the exact atypicality
    probability; a family whose mu is 0 gets the trivial bound 1, flagged
    vacuous.
    """
    joint = induced_joint(ch)
    rates = RatePair(r1, r2, n)
    params = TypParams(eps1, eps2, n)
    mu1 = exact_atypicality(joint, "T1", eps1, n)
    mu2 = exact_atypicality(joint, "T2", eps2, n)
    masses = np.empty((trials, 2))
    r1_eff = r2_eff = None
    for trial in range(trials):
        cb = sample_codebooks(ch, rates, derive_seed(seed, n, trial))
        dec = decompose_tv(ch, cb, params)
        masses[trial] = (dec.p_atyp1, dec.p_atyp2)
        r1_eff, r2_eff = cb.effective_r1, cb.effective_r2
    out = []
    for label, mu, column in (("T1", mu1, 0), ("T2", mu2, 1)):
        for delta in deltas:
            if mu > 0.0:
                bound = lemma_atypical_bound(mu, delta, r1_eff, r2_eff, n)
            else:
                bound = 1.0 + 0.0  # nothing to bound; trivially true, flagged
            out.append(
                ConcentrationSummary(
                    statement=f"lemma-atypical-{label}",
                    n=n,
                    delta=float(delta),
                    threshold=mu * (1.0 + delta),
                    trials=trials,
                    exceed_count=int(np.sum(masses[:, column] > mu * (1.0 + delta))),
                    bound=bound if mu > 0.0 else math.nextafter(1.0, 2.0),
                )
            )
    return out


def run_concentration_check(cfg: ExperimentConfig, policy: str, deltas=None) -> list:
    """Empirical exceedance frequencies against the matching closed bounds.

    ``policy`` picks the probability statement: "lemma-typical",
    "lemma-atypical", or the TV tail of the "first-order" or
    "second-order" certificate.
    """
    deltas = (0.25, 0.5, 1.0 - 1e-6) if deltas is None else tuple(deltas)
    if policy == "lemma-typical":
        if cfg.r1 is None:
            raise ValueError("lemma-typical needs cfg.r1 as the codebook rate")
        out = []
        for n in cfg.n_list:
            out += typical_lemma_campaign(
                cfg.channel, n, cfg.r1, cfg.trials, cfg.seed, cfg.eps1, deltas
            )
        return out
    if policy == "lemma-atypical":
        if cfg.r1 is None or cfg.r2 is None:
            raise ValueError("lemma-atypical needs cfg.r1 and cfg.r2")
        out = []
        for n in cfg.n_list:
            out += atypical_lemma_campaign(
                cfg.channel, n, cfg.r1, cfg.r2, cfg.trials, cfg.seed,
                cfg.eps1, cfg.eps2, deltas,
            )
        return out
    if policy in ("first-order", "second-order"):
        if (policy == "second-order") != (cfg.schedule == "second-order"):
            raise ValueError("policy and config schedule must match")
        joint = induced_joint(cfg.channel)
        iq = mutual_informations(joint)
        records = run_tv_sweep(cfg)
        out = []
        for n in cfg.n_list:
            group = [r for r in records if r.n == n]
            _, _, snapshot = _schedule_for(cfg, joint, iq, n)
            bound_total, _, report = snapshot(group[0].r1_eff, group[0].r2_eff)
            threshold = 1.0 if report is None else report.threshold
            out.append(
                ConcentrationSummary(
                    statement=policy,
                    n=n,
                    delta=None,
                    threshold=threshold,
                    trials=len(group),
                    exceed_count=sum(1 for r in group if r.tv > threshold),
                    bound=bound_total if report is None else report.value,
                )
            )
        return out
    raise ValueError(f"unknown policy {policy!r}")


def _format_value(column: str, value) -> str:
    if column in _INT_COLUMNS:
        return str(int(value))
    return repr(float(value))


def render_csv(records) -> str:
    """The CSV document for a record list, bit-stable for identical inputs."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for record in records:
        if record.tv > record.p_atyp1 + record.p_atyp2 + record.typ_excess + 1e-12:
            raise AssertionError("record violates the decomposition inequality")
        values = record.csv_values()
        writer.writerow([_format_value(c, values[c]) for c in CSV_COLUMNS])
    return buf.getvalue()


def write_results(records, path) -> None:
    """Persist records as CSV; overwrites atomically enough for reruns."""
    text = render_csv(records)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)


def read_results(path) -> list:
    """Load a results CSV back into TrialRecord objects (trial = file order)."""
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != list(CSV_COLUMNS):
            raise ValueError("unexpected results header")
        records = []
        for index, row in enumerate(reader):
            if len(row) != len(CSV_COLUMNS):
                raise ValueError(f"row {index + 2} has {len(row)} fields")
            values = dict(zip(CSV_COLUMNS, row))
            records.append(
                TrialRecord(
                    seed=int(values["seed"]),
                    trial=index,
                    n=int(values["n"]),
                    r1_nominal=float(values["R1_nominal"]),
                    r2_nominal=float(values["R2_nominal"]),
                    r1_eff=float(values["R1_eff"]),
                    r2_eff=float(values["R2_eff"]),
                    m1=int(values["M1"]),
                    m2=int(values["M2"]),
                    tv=float(values["tv"]),
                    p_atyp1=float(values["p_atyp1"]),
                    p_atyp2=float(values["p_atyp2"]),
                    typ_excess=float(values["typ_excess"]),
                    eps1=float(values["eps1"]),
                    eps2=float(values["eps2"]),
                    bound_total=float(values["bound_total"]),
                    bound_vacuous_flag=int(values["bound_vacuous_flag"]),
                    runtime_ms=float(values["runtime_ms"]),
                )
            )
    return records
