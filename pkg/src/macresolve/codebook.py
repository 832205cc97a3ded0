"""Random codebook pairs and the exact distribution they induce on Z^n.

Each codeword row draws its symbols from its own Philox stream derived
through SeedSequence spawn keys, so sampling is reproducible and
independent of the order rows are generated in.  Exact enumeration over
all |Z|^n output sequences is blocked along the first codebook and
streamed over the second.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .channel import ChannelSpec, DistVector
from .errors import BudgetExceededError

# block size (in array cells) for the m1-chunked enumeration
_CHUNK_CELLS = 1 << 22


@dataclass(frozen=True)
class Budget:
    """Caps on exact-enumeration work.

    ``max_outputs`` bounds |Z|**n; ``max_work`` bounds M1*M2*|Z|**n*n for
    full enumeration and M1*M2*n for pair-indexed computations.
    """

    max_outputs: int = 10**6
    max_work: int = 10**10

    def check_outputs(self, size_z: int, n: int) -> int:
        count = size_z**n
        if count > self.max_outputs:
            raise BudgetExceededError(
                f"|Z|^n = {count} exceeds the output cap {self.max_outputs}"
            )
        return count

    def check_work(self, cells: int) -> None:
        if cells > self.max_work:
            raise BudgetExceededError(
                f"enumeration work {cells} exceeds the cap {self.max_work}"
            )


@dataclass(frozen=True)
class RatePair:
    """Nominal rates in nats per channel use at block length n."""

    r1: float
    r2: float
    n: int

    def __post_init__(self) -> None:
        if self.r1 < 0.0 or self.r2 < 0.0:
            raise ValueError("rates must be nonnegative")
        if self.n < 1:
            raise ValueError("block length n must be >= 1")


def _snap_ceil_exp(t: float) -> int:
    """ceil(exp(t)), snapping to the nearest integer when exp() lands within
    rounding distance of it (so exp(2 * 0.5) stays e^1, not ceil(2.718...+ulp))."""
    value = math.exp(t)
    nearest = round(value)
    if nearest >= 1 and abs(value - nearest) <= 1e-9 * max(1.0, nearest):
        return int(nearest)
    return max(1, int(math.ceil(value)))


def codebook_sizes(rates: RatePair) -> tuple[int, int]:
    """Codebook sizes ceil(exp(n r1)), ceil(exp(n r2))."""
    return _snap_ceil_exp(rates.n * rates.r1), _snap_ceil_exp(rates.n * rates.r2)


@dataclass(frozen=True, eq=False)
class CodebookPair:
    """Two codeword arrays, one per sender, with the rates that sized them.

    ``rates`` records the nominal request; effective rates log(M)/n are
    derived from the actual array sizes.  ``seed`` is None for hand-built
    pairs.
    """

    C1: np.ndarray
    C2: np.ndarray
    rates: RatePair | None = None
    seed: int | None = None

    def __post_init__(self) -> None:
        for name in ("C1", "C2"):
            arr = np.array(getattr(self, name), dtype=np.int64, copy=True)
            if arr.ndim != 2 or arr.shape[0] < 1 or arr.shape[1] < 1:
                raise ValueError(f"{name} must be a nonempty 2-D symbol array")
            if np.any(arr < 0):
                raise ValueError(f"{name} contains negative symbols")
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)
        if self.C1.shape[1] != self.C2.shape[1]:
            raise ValueError("C1 and C2 must share one block length")

    @property
    def n(self) -> int:
        return int(self.C1.shape[1])

    @property
    def M1(self) -> int:
        return int(self.C1.shape[0])

    @property
    def M2(self) -> int:
        return int(self.C2.shape[0])

    @cached_property
    def effective_r1(self) -> float:
        return math.log(self.M1) / self.n

    @cached_property
    def effective_r2(self) -> float:
        return math.log(self.M2) / self.n


def _check_symbols(ch: ChannelSpec, cb: CodebookPair) -> None:
    if int(cb.C1.max()) >= ch.sizeX:
        raise ValueError("C1 contains symbols outside the X alphabet")
    if int(cb.C2.max()) >= ch.sizeY:
        raise ValueError("C2 contains symbols outside the Y alphabet")


def sample_rows(q: np.ndarray, rows: int, n: int, seed: int, component: int) -> np.ndarray:
    """Draw ``rows`` i.i.d. codewords of length n from the symbol law q.

    Each row owns a Philox stream keyed by (component, row), so a codeword
    is reproducible on its own and the two books never share a stream.
    """
    probs = q / math.fsum(q.tolist())
    out = np.empty((rows, n), dtype=np.int64)
    for m in range(rows):
        ss = np.random.SeedSequence(entropy=seed, spawn_key=(component, m))
        rng = np.random.Generator(np.random.Philox(ss))
        out[m] = rng.choice(q.size, size=n, p=probs)
    return out


def sample_codebooks(
    ch: ChannelSpec, rates: RatePair, seed: int, budget: Budget | None = None
) -> CodebookPair:
    """Draw a codebook pair with every symbol i.i.d. from qX resp. qY."""
    budget = budget or Budget()
    m1, m2 = codebook_sizes(rates)
    budget.check_work(m1 * m2 * rates.n)
    C1 = sample_rows(ch.qX, m1, rates.n, seed, component=0)
    C2 = sample_rows(ch.qY, m2, rates.n, seed, component=1)
    return CodebookPair(C1=C1, C2=C2, rates=rates, seed=seed)


class KahanSum:
    """Compensated elementwise accumulation for long sums of arrays.

    Neumaier's variant: the correction also survives when an incoming
    value dwarfs the running total.  Read the sum back with ``value()``.
    """

    def __init__(self, size: int):
        self.total = np.zeros(size)
        self._comp = np.zeros(size)

    def add(self, values: np.ndarray) -> None:
        t = self.total + values
        big = np.abs(self.total) >= np.abs(values)
        self._comp += np.where(big, (self.total - t) + values, (values - t) + self.total)
        self.total = t

    def value(self) -> np.ndarray:
        return self.total + self._comp


def product_grid(factors) -> np.ndarray:
    """Successive outer product along the last axis.

    ``factors`` is a sequence of (c, s) arrays, one per position; the
    result is (c, s**len(factors)) with the first position most
    significant, matching the sequence-index encoding.
    """
    out = None
    for f in factors:
        f = np.atleast_2d(f)
        if out is None:
            out = f.copy()
        else:
            out = (out[:, :, None] * f[:, None, :]).reshape(out.shape[0], -1)
    return out


def iter_pair_blocks(ch: ChannelSpec, cb: CodebookPair, budget: Budget | None = None):
    """Yield (m2, start, V) where V[i, j] is the probability of output
    sequence j given codeword pair (start + i, m2).

    Blocks cover every pair exactly once; j runs over all |Z|^n sequences.
    """
    budget = budget or Budget()
    _check_symbols(ch, cb)
    n = cb.n
    count = budget.check_outputs(ch.sizeZ, n)
    budget.check_work(cb.M1 * cb.M2 * count * n)
    chunk = max(1, _CHUNK_CELLS // count)
    for m2 in range(cb.M2):
        y = cb.C2[m2]
        for start in range(0, cb.M1, chunk):
            rows = cb.C1[start : start + chunk]
            V = product_grid([ch.W[rows[:, k], y[k], :] for k in range(n)])
            yield m2, start, V


def induced_output_distribution(
    ch: ChannelSpec, cb: CodebookPair, budget: Budget | None = None
) -> DistVector:
    """The exact codebook-averaged output law on Z^n."""
    budget = budget or Budget()
    count = budget.check_outputs(ch.sizeZ, cb.n)
    acc = KahanSum(count)
    for _, _, V in iter_pair_blocks(ch, cb, budget):
        acc.add(V.sum(axis=0))
    return DistVector(acc.value() / (cb.M1 * cb.M2), n=cb.n)


def induced_point_prob(ch: ChannelSpec, cb: CodebookPair, zseq) -> float:
    """One entry of the induced law, via the (M1, M2) pair table instead of
    the |Z|^n enumeration."""
    _check_symbols(ch, cb)
    z = np.asarray(zseq, dtype=np.int64)
    if z.ndim != 1 or z.size != cb.n:
        raise ValueError(f"zseq must have length n = {cb.n}")
    if np.any(z < 0) or np.any(z >= ch.sizeZ):
        raise ValueError("zseq contains symbols outside the Z alphabet")
    Budget().check_work(cb.M1 * cb.M2 * cb.n)
    V = np.ones((cb.M1, cb.M2))
    for k in range(cb.n):
        V *= ch.W[cb.C1[:, k][:, None], cb.C2[:, k][None, :], z[k]]
    return math.fsum(V.ravel().tolist()) / (cb.M1 * cb.M2)


def simulate_outputs(
    ch: ChannelSpec, cb: CodebookPair, samples: int, seed: int
) -> DistVector:
    """Empirical output law from ancestral sampling: uniform message pair,
    then the channel applied letter by letter."""
    _check_symbols(ch, cb)
    if samples < 1:
        raise ValueError("samples must be >= 1")
    count = Budget().check_outputs(ch.sizeZ, cb.n)
    # spawn key component 2 keeps this stream clear of the codeword streams
    ss = np.random.SeedSequence(entropy=seed, spawn_key=(2, 0))
    rng = np.random.Generator(np.random.Philox(ss))
    m1 = rng.integers(0, cb.M1, size=samples)
    m2 = rng.integers(0, cb.M2, size=samples)
    rows = ch.W[cb.C1[m1], cb.C2[m2]]
    u = rng.random((samples, cb.n, 1))
    z = np.clip((u > rows.cumsum(axis=-1)).sum(axis=-1), 0, ch.sizeZ - 1)
    index = np.zeros(samples, dtype=np.int64)
    for k in range(cb.n):
        index = index * ch.sizeZ + z[:, k]
    counts = np.bincount(index, minlength=count)
    return DistVector(counts / samples, n=cb.n)


def format_codebook_dump(cb: CodebookPair) -> str:
    """Plain-text dump: a header line, then one symbol row per codeword."""
    rates = cb.rates
    header = (
        f"# n={cb.n} M1={cb.M1} M2={cb.M2} seed={cb.seed}"
        f" R1={'' if rates is None else repr(rates.r1)}"
        f" R2={'' if rates is None else repr(rates.r2)}"
    )
    lines = [header, "# C1"]
    lines += [" ".join(str(s) for s in row) for row in cb.C1]
    lines.append("# C2")
    lines += [" ".join(str(s) for s in row) for row in cb.C2]
    return "\n".join(lines) + "\n"
