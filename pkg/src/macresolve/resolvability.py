"""Typical-set decomposition of total variation and every closed-form
concentration bound: the two helper lemmas, the first-order certificate
with its rate region, and the second-order rate machinery.

The decomposition computed here is exact per codebook: the variational
distance never exceeds the sum of the two atypical masses and the
typical excess, and that inequality is re-checked on every call.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .channel import ChannelSpec, DistVector, JointDist, induced_joint, sequence_log_prob
from .codebook import Budget, CodebookPair, KahanSum, RatePair, iter_pair_blocks, product_grid
from .errors import BudgetExceededError, UndefinedConditionalError
from .info import (
    InfoQuantities,
    MomentSummary,
    density_support,
    mutual_informations,
    q_function,
    q_inverse,
    renyi_divergence,
)

INF = float("inf")

DEFAULT_EPS_GRID = tuple(round(0.01 * k, 2) for k in range(1, 31))
DEFAULT_BETA_GRID = tuple(float(b) for b in np.logspace(-3.0, -1.0, 20))
DEFAULT_ALPHA_GRID = tuple(
    sorted({1.0 + 2.0**-k for k in range(1, 11)} | {1.5, 2.0})
)

_SLACK = 1e-12


def _exp_neg(t: float) -> float:
    """exp(-t) for t >= 0, quietly underflowing to 0."""
    return 0.0 if t > 746.0 else math.exp(-t)


def _safe_exp(t: float) -> float:
    """exp(t) that saturates to inf instead of raising on overflow."""
    return INF if t > 709.0 else math.exp(t)


@dataclass(frozen=True)
class TypParams:
    """Typicality slacks for the two set families at block length n."""

    eps1: float
    eps2: float
    n: int

    def __post_init__(self) -> None:
        if not (self.eps1 > 0.0 and self.eps2 > 0.0):
            raise ValueError("eps1 and eps2 must be positive")
        if self.n < 1:
            raise ValueError("block length n must be >= 1")


@dataclass(frozen=True)
class TvDecomposition:
    """Exact total variation and its three-part upper bound for one codebook."""

    tv: float
    p_atyp1: float
    p_atyp2: float
    typ_excess: float

    def __post_init__(self) -> None:
        for name in ("tv", "p_atyp1", "p_atyp2", "typ_excess"):
            value = getattr(self, name)
            if value < -_SLACK:
                raise ValueError(f"{name} must be nonnegative, got {value!r}")
            if value < 0.0:
                object.__setattr__(self, name, 0.0)
        if self.tv > 1.0 + _SLACK:
            raise ValueError(f"tv must not exceed 1, got {self.tv!r}")
        bound = self.p_atyp1 + self.p_atyp2 + self.typ_excess
        if self.tv > bound + _SLACK:
            raise AssertionError(
                f"decomposition inequality violated: tv {self.tv!r} > "
                f"atypical + typical-excess {bound!r}"
            )

    @property
    def bound_sum(self) -> float:
        return self.p_atyp1 + self.p_atyp2 + self.typ_excess


@dataclass(frozen=True, eq=False)
class BoundReport:
    """A named closed-form bound with its full parameter record.

    ``value`` is reported unclamped; values above 1 (or non-finite) are
    vacuous but truthful, and the flag makes that visible.
    """

    name: str
    value: float
    threshold: float | None = None
    terms: dict = field(default_factory=dict)
    params: dict = field(default_factory=dict)

    def __post_init__(self) -> None:
        object.__setattr__(self, "terms", dict(self.terms))
        object.__setattr__(self, "params", dict(self.params))

    @property
    def vacuous(self) -> bool:
        return not self.value <= 1.0

    def to_record(self) -> dict:
        """Flat key-value form; non-finite numbers become None."""

        def safe(v):
            if isinstance(v, float) and not math.isfinite(v):
                return None
            return v

        record = {
            "bound": self.name,
            "value": safe(self.value),
            "threshold": safe(self.threshold),
            "vacuous": int(self.vacuous),
        }
        for key, v in self.terms.items():
            record[f"term_{key}"] = safe(v)
        for key, v in self.params.items():
            record[f"param_{key}"] = safe(v)
        return record


def total_variation(p: DistVector, q: DistVector) -> float:
    """Half the L1 distance; cross-checked against the positive-part sum."""
    if p.size != q.size or p.n != q.n:
        raise ValueError("p and q must share one index set")
    diff = p.probs - q.probs
    half_l1 = 0.5 * math.fsum(np.abs(diff).tolist())
    pos_part = math.fsum(np.maximum(diff, 0.0).tolist())
    if abs(half_l1 - pos_part) > _SLACK:
        raise AssertionError(
            f"half-L1 {half_l1!r} and positive-part {pos_part!r} disagree"
        )
    return half_l1


def typicality_thresholds(joint: JointDist, params: TypParams) -> tuple[float, float]:
    """The two density thresholds n(I + eps) in nats."""
    iq = mutual_informations(joint)
    return (
        params.n * (iq.i_xz_given_y + params.eps1),
        params.n * (iq.i_yz + params.eps2),
    )


def is_typical(
    joint: JointDist,
    params: TypParams,
    which: str,
    xseq=None,
    yseq=None,
    zseq=None,
) -> bool:
    """Membership in the first (needs x, y, z) or second (y, z) typical set.

    Sequences with zero joint probability count as atypical; a sequence
    using an input symbol of zero probability has no defined density and
    raises instead.
    """
    thr1, thr2 = typicality_thresholds(joint, params)
    ch = joint.channel
    if which == "T1":
        if xseq is None or yseq is None or zseq is None:
            raise ValueError("T1 membership needs xseq, yseq and zseq")
        log_num = sequence_log_prob(ch.W, xseq, yseq, zseq)
        if log_num == -INF:
            return False
        log_den = sequence_log_prob(joint.q_z_given_y, yseq, zseq)
        if log_den == -INF:
            return False
        return log_num - log_den <= thr1
    if which == "T2":
        if yseq is None or zseq is None:
            raise ValueError("T2 membership needs yseq and zseq")
        log_num = sequence_log_prob(joint.q_z_given_y, yseq, zseq)
        if log_num == -INF:
            return False
        log_den = sequence_log_prob(joint.q_z, zseq)
        if log_den == -INF:
            return False
        return log_num - log_den <= thr2
    raise ValueError(f"unknown typical-set family {which!r}")


def exact_atypicality(
    joint: JointDist, which: str, eps: float, n: int, max_states: int = 10**7
) -> float:
    """P[density sum > n(I + eps)] under the n-fold product of the joint.

    Letters are independent, so the atypicality probability is a tail of
    an n-fold sum of the single-letter density; the sum distribution is
    built by direct products over the (collapsed) single-letter support.
    """
    if which not in ("T1", "T2"):
        raise ValueError(f"unknown typical-set family {which!r}")
    if not eps > 0.0:
        raise ValueError("eps must be positive")
    if n < 1:
        raise ValueError("n must be >= 1")
    variant = "conditional-x-given-y" if which == "T1" else "marginal-y"
    iq = mutual_informations(joint)
    target = iq.i_xz_given_y if which == "T1" else iq.i_yz
    probs, values = density_support(joint, variant)
    atoms, inverse = np.unique(values, return_inverse=True)
    weights = np.bincount(inverse, weights=probs)
    if len(atoms) ** n > max_states:
        raise BudgetExceededError(
            f"{len(atoms)}^{n} density states exceed the cap {max_states}"
        )
    dsum = np.zeros(1)
    prob = np.ones(1)
    for _ in range(n):
        dsum = (dsum[:, None] + atoms[None, :]).ravel()
        prob = (prob[:, None] * weights[None, :]).ravel()
    return math.fsum(prob[dsum > n * (target + eps)].tolist())


def decompose_tv(
    ch: ChannelSpec,
    cb: CodebookPair,
    params: TypParams,
    budget: Budget | None = None,
) -> TvDecomposition:
    """Exact decomposition of the induced-vs-target variational distance.

    Enumerates all |Z|^n outputs once: accumulates the induced law, the
    two atypical channel masses, and the typical excess against the
    product target law.
    """
    if params.n != cb.n:
        raise ValueError("TypParams block length does not match the codebook")
    if np.any(ch.qX[cb.C1] <= 0.0):
        raise UndefinedConditionalError("C1 uses a symbol with qX = 0")
    if np.any(ch.qY[cb.C2] <= 0.0):
        raise UndefinedConditionalError("C2 uses a symbol with qY = 0")
    budget = budget or Budget()
    joint = induced_joint(ch)
    thr1, thr2 = typicality_thresholds(joint, params)
    n = cb.n
    count = budget.check_outputs(ch.sizeZ, n)
    q_vec = product_grid([np.tile(joint.q_z, (1, 1)) for _ in range(n)])[0]
    pairs = cb.M1 * cb.M2

    p_acc = KahanSum(count)
    dtyp_acc = KahanSum(count)
    atyp1_parts: list[float] = []
    atyp2_parts: list[float] = []

    last_m2 = -1
    t1_cap = np.empty(0)
    t2_mask = np.empty(0, dtype=bool)
    for m2, _, V in iter_pair_blocks(ch, cb, budget):
        if m2 != last_m2:
            y = cb.C2[m2]
            q2_vec = product_grid([joint.q_z_given_y[y[k]][None, :] for k in range(n)])[0]
            t1_cap = math.exp(thr1) * q2_vec
            t2_mask = q2_vec <= math.exp(thr2) * q_vec
            last_m2 = m2
        col_sum = V.sum(axis=0)
        p_acc.add(col_sum)
        typ1 = np.where(V <= t1_cap[None, :], V, 0.0).sum(axis=0)
        atyp1_parts.append(float(col_sum.sum() - typ1.sum()))
        atyp2_parts.append(float(col_sum[~t2_mask].sum()))
        dtyp_acc.add(np.where(t2_mask, typ1, 0.0))

    p_vec = p_acc.value() / pairs
    diff = p_vec - q_vec
    tv = 0.5 * math.fsum(np.abs(diff).tolist())
    pos = math.fsum(np.maximum(diff, 0.0).tolist())
    if abs(tv - pos) > _SLACK:
        raise AssertionError(f"half-L1 {tv!r} and positive-part {pos!r} disagree")
    return TvDecomposition(
        tv=tv,
        p_atyp1=math.fsum(atyp1_parts) / pairs,
        p_atyp2=math.fsum(atyp2_parts) / pairs,
        typ_excess=math.fsum(
            np.maximum(dtyp_acc.value() / pairs - q_vec, 0.0).tolist()
        ),
    )


def hoeffding_bound(mu: float, delta: float) -> float:
    """exp(-(delta^2 / 3) mu): tail of a sum of [0,1] independent variables
    exceeding (1 + delta) times its mean bound mu."""
    if not 0.0 < delta < 1.0:
        raise ValueError("delta must lie strictly between 0 and 1")
    if mu < 0.0:
        raise ValueError("mu must be nonnegative")
    return _exp_neg(delta**2 / 3.0 * mu)


def janson_bound(n_terms: int, chi: int, delta: float) -> float:
    """exp(-2 delta^2 / (chi n)): tail for sums of [0,1] variables whose
    dependency structure splits into chi independent blocks."""
    if n_terms < 1:
        raise ValueError("n_terms must be >= 1")
    if chi < 1:
        raise ValueError("chi must be >= 1")
    if delta <= 0.0:
        raise ValueError("delta must be positive")
    return _exp_neg(2.0 * delta**2 / (chi * n_terms))


def lemma_typical_bound(I: float, eps: float, R: float, n: int, delta: float) -> float:
    """exp(-(delta^2 / 3) exp(-n (I + eps - R))): chance the normalized
    typical sum over one codebook exceeds 1 + delta."""
    if not 0.0 < delta < 1.0:
        raise ValueError("delta must lie strictly between 0 and 1")
    if n < 1:
        raise ValueError("n must be >= 1")
    if eps <= 0.0:
        raise ValueError("eps must be positive")
    return _exp_neg(delta**2 / 3.0 * _safe_exp(-n * (I + eps - R)))


def lemma_atypical_bound(mu: float, delta: float, r1: float, r2: float, n: int) -> float:
    """exp(-2 delta^2 mu^2 exp(n min(r1, r2))): chance the atypical channel
    mass exceeds mu (1 + delta), for any mu at least its expectation."""
    if not 0.0 < mu <= 1.0:
        raise ValueError("mu must lie in (0, 1]")
    if delta <= 0.0:
        raise ValueError("delta must be positive")
    if n < 0:
        raise ValueError("n must be nonnegative")
    if r1 < 0.0 or r2 < 0.0:
        raise ValueError("rates must be nonnegative")
    inner = n * min(r1, r2)
    if inner <= 700.0:
        t = 2.0 * delta**2 * mu**2 * math.exp(inner)
    else:
        log_t = math.log(2.0) + 2.0 * math.log(delta) + 2.0 * math.log(mu) + inner
        if log_t > 709.0:
            return 0.0
        t = math.exp(log_t)
    return _exp_neg(t) if t >= 0.0 else 1.0


@dataclass(frozen=True)
class RenyiAtypicality:
    """Best exponent over an alpha grid for one atypicality probability."""

    best_alpha: float
    beta: float
    bound: float
    exponents: tuple


def _renyi_reference(joint: JointDist, which: str):
    """Flattened (p, reference) pair for the divergence behind each family."""
    ch = joint.channel
    if which == "T1":
        qY = ch.qY
        q_xy = joint.probs.sum(axis=2)
        ref = np.zeros_like(joint.probs)
        for y in range(ch.sizeY):
            if qY[y] > 0.0:
                x_given_y = q_xy[:, y] / qY[y]
                ref[:, y, :] = np.outer(x_given_y, joint.q_z_given_y[y]) * qY[y]
        return joint.probs.ravel(), ref.ravel()
    if which == "T2":
        return joint.q_yz.ravel(), np.outer(ch.qY, joint.q_z).ravel()
    raise ValueError(f"unknown typical-set family {which!r}")


def renyi_atypicality_bound(
    joint: JointDist,
    which: str,
    eps: float,
    n: int,
    alpha_grid=None,
) -> RenyiAtypicality:
    """Certified exp(-n beta) bound on the chance of leaving one typical set.

    For each alpha above 1 the admissible decay exponent is
    (alpha - 1)(I + eps - D_alpha); beta is set to half the best exponent
    so the certificate keeps uniform slack.
    """
    if eps <= 0.0:
        raise ValueError("eps must be positive")
    if n < 1:
        raise ValueError("n must be >= 1")
    grid = DEFAULT_ALPHA_GRID if alpha_grid is None else tuple(alpha_grid)
    if any(a <= 1.0 for a in grid):
        raise ValueError("alpha grid must lie strictly above 1")
    iq = mutual_informations(joint)
    target = iq.i_xz_given_y if which == "T1" else iq.i_yz
    p, ref = _renyi_reference(joint, which)
    exponents = []
    for alpha in grid:
        div = renyi_divergence(p, ref, alpha)
        exponents.append((alpha, (alpha - 1.0) * (target + eps - div)))
    feasible = [(a, e) for a, e in exponents if e > 0.0]
    if not feasible:
        raise ValueError(
            "no alpha in the grid yields a positive exponent; eps is too small"
        )
    best_alpha, sup = max(feasible, key=lambda pair: pair[1])
    beta = 0.5 * sup
    return RenyiAtypicality(
        best_alpha=best_alpha,
        beta=beta,
        bound=_exp_neg(n * beta),
        exponents=tuple(exponents),
    )


def first_order_region(iq: InfoQuantities, r1: float, r2: float, strict: bool = False) -> bool:
    """Membership in the achievable-rate region via its three linear faces."""
    if strict:
        return (
            r1 > iq.i_xz and r2 > iq.i_yz and r1 + r2 > iq.sum_rate
        )
    return r1 >= iq.i_xz and r2 >= iq.i_yz and r1 + r2 >= iq.sum_rate


def region_slacks(iq: InfoQuantities, r1: float, r2: float) -> dict:
    """Signed slack of each region constraint; negative means violated."""
    return {
        "r1": r1 - iq.i_xz,
        "r2": r2 - iq.i_yz,
        "sum": r1 + r2 - iq.sum_rate,
    }


def corner_points(iq: InfoQuantities) -> tuple[tuple[float, float], tuple[float, float]]:
    """The two extreme rate pairs of the region."""
    return (
        (iq.i_xz_given_y, iq.i_yz),
        (iq.i_xz, iq.i_yz_given_x),
    )


def default_eps_beta_grid():
    return tuple(
        (eps, beta) for eps in DEFAULT_EPS_GRID for beta in DEFAULT_BETA_GRID
    )


def first_order_certificate(
    iq: InfoQuantities,
    r1: float,
    r2: float,
    n: int,
    size_y: int,
    size_z: int,
    eps_beta_grid=None,
) -> BoundReport:
    """Grid-searched certificate that TV stays below 7 exp(-n beta).

    Picks the (eps, beta) pair maximizing the smallest of the three decay
    margins, then evaluates the three tail terms at that choice.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if not (r1 > iq.i_xz_given_y and r2 > iq.i_yz):
        raise ValueError(
            "rates must be strictly above the corner point "
            f"({iq.i_xz_given_y:.6g}, {iq.i_yz:.6g})"
        )
    grid = default_eps_beta_grid() if eps_beta_grid is None else tuple(eps_beta_grid)
    best = None
    for eps, beta in grid:
        if eps <= 0.0 or beta <= 0.0:
            raise ValueError("eps and beta must be positive")
        margins = (
            min(r1, r2) - 2.0 * beta,
            r1 - 2.0 * beta - eps - iq.i_xz_given_y,
            r2 - 2.0 * beta - eps - iq.i_yz,
        )
        worst = min(margins)
        if worst > 0.0 and (best is None or worst > best[0]):
            best = (worst, eps, beta, margins)
    if best is None:
        raise ValueError("no grid point keeps all three decay margins positive")
    worst, eps, beta, margins = best
    term_atyp = 2.0 * _exp_neg(2.0 * _safe_exp(n * margins[0]))
    term_typ1 = _safe_exp(
        n * (math.log(size_z) + math.log(size_y))
        - _safe_exp(-n * (iq.i_xz_given_y + eps + 2.0 * beta - r1)) / 3.0
    )
    term_typ2 = _safe_exp(
        n * math.log(size_z)
        - _safe_exp(-n * (iq.i_yz + eps + 2.0 * beta - r2)) / 3.0
    )
    value = term_atyp + term_typ1 + term_typ2
    gamma1 = beta / 2.0
    gamma2 = worst / 2.0
    return BoundReport(
        name="first_order",
        value=value,
        threshold=7.0 * _exp_neg(n * beta),
        terms={
            "atypical": term_atyp,
            "typical_1": term_typ1,
            "typical_2": term_typ2,
        },
        params={
            "eps": eps,
            "beta": beta,
            "n": n,
            "r1": r1,
            "r2": r2,
            "margin_rates": margins[0],
            "margin_typ1": margins[1],
            "margin_typ2": margins[2],
            "gamma1": gamma1,
            "gamma2": gamma2,
            "gamma2_below_beta": int(gamma2 < beta),
        },
    )


def _corner_targets(iq: InfoQuantities, corner: str) -> tuple[float, float]:
    if corner == "A":
        return iq.i_xz_given_y, iq.i_yz
    if corner == "B":
        return iq.i_xz, iq.i_yz_given_x
    raise ValueError("corner must be 'A' or 'B'")


def second_order_rates(
    iq: InfoQuantities,
    moments1: MomentSummary,
    moments2: MomentSummary,
    eps: float,
    c: float,
    n: int,
    corner: str = "A",
) -> RatePair:
    """Rates I_k + sqrt(V_k / n) Qinv(eps) + c log(n) / n at either corner.

    Corner A pairs the conditional density of the first sender with the
    marginal of the second; corner B swaps the senders' roles.  The
    moment summaries must describe those same densities.
    """
    if not 0.0 < eps < 1.0:
        raise ValueError("eps must lie strictly between 0 and 1")
    if c <= 1.0:
        raise ValueError("c must exceed 1")
    if n < 1:
        raise ValueError("n must be >= 1")
    i1, i2 = _corner_targets(iq, corner)
    for target, m, label in ((i1, moments1, "moments1"), (i2, moments2, "moments2")):
        if m.variance <= 0.0:
            raise ValueError(f"{label} has zero variance; the rate expansion needs V > 0")
        if abs(m.mean - target) > 1e-9:
            raise ValueError(
                f"{label} mean {m.mean!r} does not match the corner target {target!r}"
            )
    shift = q_inverse(eps)
    log_term = c * math.log(n) / n
    return RatePair(
        r1=i1 + math.sqrt(moments1.variance / n) * shift + log_term,
        r2=i2 + math.sqrt(moments2.variance / n) * shift + log_term,
        n=n,
    )


def second_order_eps_prime(m: MomentSummary, eps: float, d: float, n: int) -> float:
    """Q(Qinv(eps) + d log(n) / sqrt(n V)) + rho / (V^{3/2} sqrt(n)).

    Tends to eps as n grows; both correction terms are O(log n / sqrt n).
    """
    if not 0.0 < eps < 1.0:
        raise ValueError("eps must lie strictly between 0 and 1")
    if d <= 0.0:
        raise ValueError("d must be positive")
    if n < 1:
        raise ValueError("n must be >= 1")
    if m.variance <= 0.0:
        raise ValueError("zero variance: eps' undefined")
    shift = d * math.log(n) / math.sqrt(n * m.variance)
    return q_function(q_inverse(eps) + shift) + m.third_abs / (
        m.variance**1.5 * math.sqrt(n)
    )


def second_order_rhs(
    eps_prime1: float,
    eps_prime2: float,
    r1: float,
    r2: float,
    n: int,
    c: float,
    d: float,
    size_y: int,
    size_z: int,
) -> BoundReport:
    """Two-term tail bound certifying the second-order TV threshold.

    Requires d strictly inside (0, c - 1) so the n^(c-d-1) term in the
    second exponent actually grows.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if not (eps_prime1 > 0.0 and eps_prime2 > 0.0):
        raise ValueError("eps' values must be positive")
    if not 0.0 < d < c - 1.0:
        raise ValueError("d must lie strictly inside (0, c - 1)")
    min_sq = min(eps_prime1**2, eps_prime2**2)
    term_atyp = 2.0 * _exp_neg(2.0 * min_sq / n * _safe_exp(n * min(r1, r2)))
    term_typ = 2.0 * _safe_exp(
        n * (math.log(size_z) + math.log(size_y)) - n ** (c - d - 1.0) / 3.0
    )
    threshold = (eps_prime1 + eps_prime2) * (1.0 + 1.0 / math.sqrt(n)) + 3.0 / math.sqrt(n)
    return BoundReport(
        name="second_order",
        value=term_atyp + term_typ,
        threshold=threshold,
        terms={"atypical": term_atyp, "typical": term_typ},
        params={
            "eps_prime1": eps_prime1,
            "eps_prime2": eps_prime2,
            "r1": r1,
            "r2": r2,
            "n": n,
            "c": c,
            "d": d,
        },
    )


def second_order_typ_params(
    moments1: MomentSummary,
    moments2: MomentSummary,
    eps: float,
    d: float,
    n: int,
) -> TypParams:
    """Blocklength-dependent slacks sqrt(V_k / n) Qinv(eps) + d log(n) / n."""
    if not 0.0 < eps < 1.0:
        raise ValueError("eps must lie strictly between 0 and 1")
    if d <= 0.0:
        raise ValueError("d must be positive")
    if n < 1:
        raise ValueError("n must be >= 1")
    shift = q_inverse(eps)
    log_term = d * math.log(n) / n
    return TypParams(
        eps1=math.sqrt(moments1.variance / n) * shift + log_term,
        eps2=math.sqrt(moments2.variance / n) * shift + log_term,
        n=n,
    )
