"""Information densities, mutual informations, Renyi divergence, and the
Gaussian tail machinery used by the second-order analysis.

All quantities are in nats.  Densities are only ever evaluated on the
support of the joint law, so moments never see an infinite value.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .channel import DistVector, JointDist
from .errors import OffSupportError, UndefinedConditionalError

INF = float("inf")

VARIANTS = (
    "conditional-x-given-y",
    "marginal-y",
    "marginal-x",
    "conditional-y-given-x",
)

# negative values this small are treated as rounding noise and clamped
_NEG_TOL = 1e-12


@dataclass(frozen=True)
class MomentSummary:
    """Mean, central second moment, and central absolute third moment."""

    mean: float
    variance: float
    third_abs: float

    def __post_init__(self) -> None:
        for name in ("variance", "third_abs"):
            value = getattr(self, name)
            if value < -_NEG_TOL:
                raise ValueError(f"{name} must be nonnegative, got {value!r}")
            if value < 0.0:
                object.__setattr__(self, name, 0.0)


@dataclass(frozen=True)
class InfoQuantities:
    """The four mutual informations of a two-sender channel plus the sum rate."""

    i_xz_given_y: float
    i_yz: float
    i_xz: float
    i_yz_given_x: float
    sum_rate: float

    def __post_init__(self) -> None:
        for name in ("i_xz_given_y", "i_yz", "i_xz", "i_yz_given_x", "sum_rate"):
            value = getattr(self, name)
            if value < -_NEG_TOL:
                raise ValueError(f"{name} must be nonnegative, got {value!r}")
            if value < 0.0:
                object.__setattr__(self, name, 0.0)
        # both chain-rule splits must reproduce the sum rate
        for split in (
            self.i_xz_given_y + self.i_yz,
            self.i_xz + self.i_yz_given_x,
        ):
            if abs(split - self.sum_rate) > 1e-10:
                raise ValueError(
                    f"chain rule violated: {split!r} vs sum rate {self.sum_rate!r}"
                )


def _density_parts(joint: JointDist, variant: str, x, y, z):
    ch = joint.channel
    if variant == "conditional-x-given-y":
        _require(variant, x=x, y=y, z=z)
        _check_condition(ch.qY[y] > 0.0, f"qY({y}) = 0")
        return ch.W[x, y, z], joint.q_z_given_y[y, z]
    if variant == "marginal-y":
        _require(variant, y=y, z=z)
        _check_condition(ch.qY[y] > 0.0, f"qY({y}) = 0")
        return joint.q_z_given_y[y, z], joint.q_z[z]
    if variant == "marginal-x":
        _require(variant, x=x, z=z)
        _check_condition(ch.qX[x] > 0.0, f"qX({x}) = 0")
        return joint.q_z_given_x[x, z], joint.q_z[z]
    if variant == "conditional-y-given-x":
        _require(variant, x=x, y=y, z=z)
        _check_condition(ch.qX[x] > 0.0, f"qX({x}) = 0")
        return ch.W[x, y, z], joint.q_z_given_x[x, z]
    raise ValueError(f"unknown variant {variant!r}")


def _require(variant: str, **symbols) -> None:
    missing = [name for name, value in symbols.items() if value is None]
    if missing:
        raise ValueError(f"variant {variant!r} needs symbols {', '.join(missing)}")


def _check_condition(ok: bool, what: str) -> None:
    if not ok:
        raise UndefinedConditionalError(f"{what}: conditional undefined")


def info_density(joint: JointDist, variant: str, x=None, y=None, z=None) -> float:
    """Single-letter log-likelihood ratio for one symbol combination.

    Variants: ``conditional-x-given-y`` is log W(z|x,y)/q(z|y); ``marginal-y``
    is log q(z|y)/q(z); ``marginal-x`` and ``conditional-y-given-x`` swap the
    roles of the senders.
    """
    num, den = _density_parts(joint, variant, x, y, z)
    if num <= 0.0 or den <= 0.0:
        raise OffSupportError(f"variant {variant!r} queried off support")
    return math.log(num) - math.log(den)


def _density_grid(joint: JointDist, variant: str) -> np.ndarray:
    """Density values on the full (x, y, z) grid; NaN off the joint support."""
    ch = joint.channel
    shape = ch.W.shape
    if variant == "conditional-x-given-y":
        num, den = ch.W, joint.q_z_given_y[None, :, :]
    elif variant == "marginal-y":
        num, den = joint.q_z_given_y[None, :, :], joint.q_z[None, None, :]
    elif variant == "marginal-x":
        num, den = joint.q_z_given_x[:, None, :], joint.q_z[None, None, :]
    elif variant == "conditional-y-given-x":
        num, den = ch.W, joint.q_z_given_x[:, None, :]
    elif variant == "sum":
        num, den = ch.W, joint.q_z[None, None, :]
    else:
        raise ValueError(f"unknown variant {variant!r}")
    support = joint.probs > 0.0
    out = np.full(shape, np.nan)
    out[support] = np.log(np.broadcast_to(num, shape)[support]) - np.log(
        np.broadcast_to(den, shape)[support]
    )
    return out


def _support_expectation(joint: JointDist, values: np.ndarray) -> float:
    support = joint.probs > 0.0
    return math.fsum((joint.probs[support] * values[support]).tolist())


def mutual_informations(joint: JointDist) -> InfoQuantities:
    """Expectations of the four single-letter densities, plus the sum rate."""
    return InfoQuantities(
        i_xz_given_y=_support_expectation(joint, _density_grid(joint, "conditional-x-given-y")),
        i_yz=_support_expectation(joint, _density_grid(joint, "marginal-y")),
        i_xz=_support_expectation(joint, _density_grid(joint, "marginal-x")),
        i_yz_given_x=_support_expectation(joint, _density_grid(joint, "conditional-y-given-x")),
        sum_rate=_support_expectation(joint, _density_grid(joint, "sum")),
    )


def density_moments(joint: JointDist, variant: str) -> MomentSummary:
    """Mean, variance, and central absolute third moment of one density."""
    support = joint.probs > 0.0
    p = joint.probs[support]
    d = _density_grid(joint, variant)[support]
    mean = math.fsum((p * d).tolist())
    centered = d - mean
    variance = math.fsum((p * centered**2).tolist())
    third_abs = math.fsum((p * np.abs(centered) ** 3).tolist())
    return MomentSummary(mean=mean, variance=variance, third_abs=third_abs)


def density_support(joint: JointDist, variant: str):
    """Support probabilities and matching density values, for sampling."""
    support = joint.probs > 0.0
    return joint.probs[support], _density_grid(joint, variant)[support]


def renyi_divergence(p, q, alpha: float) -> float:
    """Order-``alpha`` divergence (1/(alpha-1)) log sum p^alpha q^(1-alpha).

    Terms with p 0 contribute nothing; a point with p positive but q zero
    makes the divergence +inf when alpha > 1.
    """
    pa = p.probs if isinstance(p, DistVector) else np.asarray(p, dtype=float)
    qa = q.probs if isinstance(q, DistVector) else np.asarray(q, dtype=float)
    if pa.shape != qa.shape:
        raise ValueError("p and q must share one index set")
    if not alpha > 0.0 or alpha == 1.0:
        raise ValueError("alpha must be positive and different from 1")
    if alpha > 1.0 and np.any((pa > 0.0) & (qa == 0.0)):
        return INF
    mask = (pa > 0.0) & (qa > 0.0)
    if not mask.any():
        return INF
    total = math.fsum((pa[mask] ** alpha * qa[mask] ** (1.0 - alpha)).tolist())
    if total <= 0.0:
        return INF
    return math.log(total) / (alpha - 1.0)


def q_function(a: float) -> float:
    """Standard normal upper tail Q(a), via the complementary error function."""
    return 0.5 * math.erfc(a / math.sqrt(2.0))


def normal_cdf(a: float) -> float:
    return 0.5 * math.erfc(-a / math.sqrt(2.0))


def q_inverse(eps: float) -> float:
    """Inverse of ``q_function`` on (0, 1), by monotone bisection.

    200 halvings of [-40, 40] pin the answer far below the 1e-12
    probability-scale tolerance the round trip is held to.
    """
    if not 0.0 < eps < 1.0:
        raise ValueError("eps must lie strictly between 0 and 1")
    lo, hi = -40.0, 40.0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if q_function(mid) > eps:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def berry_esseen_delta(m: MomentSummary, n: int) -> float:
    """Uniform CDF deviation bound rho / (sigma^3 sqrt(n)) for i.i.d. sums."""
    if n < 1:
        raise ValueError("n must be >= 1")
    if m.variance <= 0.0:
        raise ValueError("zero variance: deviation bound undefined")
    return m.third_abs / (m.variance**1.5 * math.sqrt(n))


def empirical_cdf_deviation(
    joint: JointDist,
    variant: str,
    n: int,
    samples: int,
    seed: int,
    grid=None,
) -> float:
    """Largest gap, over ``grid``, between the empirical CDF of standardized
    n-fold density sums and the standard normal CDF."""
    m = density_moments(joint, variant)
    if m.variance <= 0.0:
        raise ValueError("zero variance: standardized sum undefined")
    if samples < 1:
        raise ValueError("samples must be >= 1")
    probs, values = density_support(joint, variant)
    probs = probs / math.fsum(probs.tolist())
    if grid is None:
        grid = np.linspace(-4.0, 4.0, 101)
    grid = np.asarray(grid, dtype=float)
    rng = np.random.Generator(np.random.Philox(seed))
    scale = math.sqrt(n * m.variance)
    stats = np.empty(samples)
    # chunked so the (take, n) draw buffer stays small
    chunk = max(1, 10**7 // max(n, 1))
    done = 0
    while done < samples:
        take = min(chunk, samples - done)
        draws = rng.choice(values, size=(take, n), p=probs, replace=True)
        stats[done : done + take] = (draws.sum(axis=1) - n * m.mean) / scale
        done += take
    stats.sort()
    empirical = np.searchsorted(stats, grid, side="right") / samples
    gaussian = np.array([normal_cdf(t) for t in grid])
    return float(np.max(np.abs(empirical - gaussian)))
