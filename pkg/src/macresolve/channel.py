"""Finite two-sender channels and the distributions they induce.

Single-letter probabilities live in linear domain; anything indexed by
length-n sequences goes through log domain so that n >= 8 does not
underflow.  Sequence indices encode base-|alphabet| digits with the
first position most significant.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import ChannelFormatError, UndefinedConditionalError

MASS_TOL = 1e-12

NEG_INF = float("-inf")


def _frozen_array(values, dtype=float) -> np.ndarray:
    out = np.array(values, dtype=dtype, copy=True)
    out.setflags(write=False)
    return out


@dataclass(frozen=True, eq=False)
class DistVector:
    """A pmf over a finite index set.

    ``n`` records the block length the index encodes: 1 for plain symbols,
    larger when the index enumerates length-n sequences.
    """

    probs: np.ndarray
    n: int = 1

    def __post_init__(self) -> None:
        arr = np.array(self.probs, dtype=float, copy=True)
        if arr.ndim != 1 or arr.size == 0:
            raise ValueError("probs must be a nonempty 1-D array")
        if self.n < 1:
            raise ValueError("block length n must be >= 1")
        if np.any(arr < 0.0) or np.any(arr > 1.0):
            raise ValueError("probabilities must lie in [0, 1]")
        total = math.fsum(arr.tolist())
        # sum tolerance grows with the index-set size: rounding of K terms
        tol = MASS_TOL * math.sqrt(arr.size)
        if abs(total - 1.0) > tol:
            raise ValueError(f"total mass {total!r} differs from 1 beyond {tol:g}")
        arr.setflags(write=False)
        object.__setattr__(self, "probs", arr)

    @property
    def size(self) -> int:
        return int(self.probs.size)


@dataclass(frozen=True, eq=False)
class ChannelSpec:
    """A finite channel with two senders.

    ``W[x][y][z]`` is the probability of output ``z`` given inputs ``x``
    and ``y``; ``qX`` and ``qY`` are the senders' input distributions.
    """

    W: np.ndarray
    qX: np.ndarray
    qY: np.ndarray

    def __post_init__(self) -> None:
        try:
            W = np.array(self.W, dtype=float, copy=True)
            qX = np.array(self.qX, dtype=float, copy=True)
            qY = np.array(self.qY, dtype=float, copy=True)
        except (TypeError, ValueError) as exc:
            raise ChannelFormatError(f"non-numeric or ragged entries: {exc}") from exc
        if W.ndim != 3:
            raise ChannelFormatError("W must be a rank-3 array indexed [x][y][z]")
        if qX.ndim != 1 or qX.size != W.shape[0]:
            raise ChannelFormatError(
                f"qX length {qX.size} does not match |X| = {W.shape[0]}"
            )
        if qY.ndim != 1 or qY.size != W.shape[1]:
            raise ChannelFormatError(
                f"qY length {qY.size} does not match |Y| = {W.shape[1]}"
            )
        for name, arr in (("W", W), ("qX", qX), ("qY", qY)):
            if np.any(arr < 0.0) or np.any(arr > 1.0):
                raise ChannelFormatError(f"{name} entries must lie in [0, 1]")
        for x in range(W.shape[0]):
            for y in range(W.shape[1]):
                s = math.fsum(W[x, y].tolist())
                if abs(s - 1.0) > MASS_TOL:
                    raise ChannelFormatError(f"W[{x}][{y}] has row sum {s:g}")
        for name, arr in (("qX", qX), ("qY", qY)):
            s = math.fsum(arr.tolist())
            if abs(s - 1.0) > MASS_TOL:
                raise ChannelFormatError(f"{name} has row sum {s:g}")
        for arr in (W, qX, qY):
            arr.setflags(write=False)
        object.__setattr__(self, "W", W)
        object.__setattr__(self, "qX", qX)
        object.__setattr__(self, "qY", qY)

    @property
    def sizeX(self) -> int:
        return int(self.W.shape[0])

    @property
    def sizeY(self) -> int:
        return int(self.W.shape[1])

    @property
    def sizeZ(self) -> int:
        return int(self.W.shape[2])


@dataclass(frozen=True, eq=False)
class JointDist:
    """The joint law qX(x) * qY(y) * W(z|x,y) with cached marginals.

    Conditional tables carry NaN rows wherever the conditioning symbol has
    zero probability; use the ``cond_*`` accessors to get a hard error
    instead of silent NaN propagation.
    """

    channel: ChannelSpec
    probs: np.ndarray

    def __post_init__(self) -> None:
        probs = _frozen_array(self.probs)
        ch = self.channel
        if probs.shape != (ch.sizeX, ch.sizeY, ch.sizeZ):
            raise ValueError("joint table shape does not match the channel")
        total = math.fsum(probs.ravel().tolist())
        if abs(total - 1.0) > MASS_TOL:
            raise ValueError(f"joint mass {total!r} differs from 1")
        object.__setattr__(self, "probs", probs)

    @cached_property
    def q_z(self) -> np.ndarray:
        out = np.array(
            [math.fsum(self.probs[:, :, z].ravel().tolist()) for z in range(self.channel.sizeZ)]
        )
        out.setflags(write=False)
        return out

    @cached_property
    def q_yz(self) -> np.ndarray:
        ch = self.channel
        out = np.array(
            [
                [math.fsum(self.probs[:, y, z].tolist()) for z in range(ch.sizeZ)]
                for y in range(ch.sizeY)
            ]
        )
        out.setflags(write=False)
        return out

    @cached_property
    def q_xz(self) -> np.ndarray:
        ch = self.channel
        out = np.array(
            [
                [math.fsum(self.probs[x, :, z].tolist()) for z in range(ch.sizeZ)]
                for x in range(ch.sizeX)
            ]
        )
        out.setflags(write=False)
        return out

    @cached_property
    def q_z_given_y(self) -> np.ndarray:
        qY = self.channel.qY
        out = np.full_like(self.q_yz, np.nan)
        pos = qY > 0.0
        out[pos, :] = self.q_yz[pos, :] / qY[pos, None]
        out.setflags(write=False)
        return out

    @cached_property
    def q_z_given_x(self) -> np.ndarray:
        qX = self.channel.qX
        out = np.full_like(self.q_xz, np.nan)
        pos = qX > 0.0
        out[pos, :] = self.q_xz[pos, :] / qX[pos, None]
        out.setflags(write=False)
        return out

    def cond_z_given_y(self, y: int) -> np.ndarray:
        if self.channel.qY[y] <= 0.0:
            raise UndefinedConditionalError(f"qY({y}) = 0: conditional undefined")
        return self.q_z_given_y[y]

    def cond_z_given_x(self, x: int) -> np.ndarray:
        if self.channel.qX[x] <= 0.0:
            raise UndefinedConditionalError(f"qX({x}) = 0: conditional undefined")
        return self.q_z_given_x[x]


def induced_joint(ch: ChannelSpec) -> JointDist:
    """Joint law of inputs and output when both senders draw i.i.d. inputs."""
    probs = ch.qX[:, None, None] * ch.qY[None, :, None] * ch.W
    return JointDist(channel=ch, probs=probs)


def sequence_log_prob(table, *seqs) -> float:
    """Log-probability of sequences under the memoryless extension of ``table``.

    ``table`` has one axis per sequence argument; the last axis is the
    symbol whose probability is read off, leading axes condition it.
    Returns -inf when any per-position factor is 0.
    """
    if isinstance(table, DistVector):
        arr = table.probs
    else:
        arr = np.asarray(table, dtype=float)
    if len(seqs) != arr.ndim:
        raise ValueError(f"table has {arr.ndim} axes but {len(seqs)} sequences given")
    idx = [np.asarray(s, dtype=np.int64) for s in seqs]
    n = idx[0].size
    if n == 0 or any(s.ndim != 1 or s.size != n for s in idx):
        raise ValueError("sequences must be 1-D, nonempty, and of equal length")
    vals = arr[tuple(idx)]
    if np.isnan(vals).any():
        raise UndefinedConditionalError("sequence touches a zero-probability condition")
    if np.any(vals <= 0.0):
        return NEG_INF
    return math.fsum(np.log(vals).tolist())


def all_sequences(size: int, n: int) -> np.ndarray:
    """Every length-``n`` sequence over ``{0..size-1}`` as a (size**n, n) array."""
    count = size**n
    idx = np.arange(count, dtype=np.int64)
    out = np.empty((count, n), dtype=np.int64)
    for k in range(n - 1, -1, -1):
        out[:, k] = idx % size
        idx //= size
    out.setflags(write=False)
    return out


def seq_to_index(seq, size: int) -> int:
    index = 0
    for symbol in np.asarray(seq, dtype=np.int64):
        index = index * size + int(symbol)
    return index


def index_to_seq(index: int, size: int, n: int) -> np.ndarray:
    out = np.empty(n, dtype=np.int64)
    for k in range(n - 1, -1, -1):
        out[k] = index % size
        index //= size
    return out


_CHANNEL_FIELDS = {"sizeX", "sizeY", "sizeZ", "W", "qX", "qY"}


def _reject_non_numbers(value, name: str) -> None:
    # JSON booleans satisfy isinstance(x, int); keep them out of the tables
    if isinstance(value, bool) or isinstance(value, str) or value is None:
        raise ChannelFormatError(f"{name} entries must be numbers")
    if isinstance(value, list):
        for item in value:
            _reject_non_numbers(item, name)
    elif not isinstance(value, (int, float)):
        raise ChannelFormatError(f"{name} entries must be numbers")


def parse_channel(text: str) -> ChannelSpec:
    """Parse and validate a channel document (JSON, fixed field set)."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ChannelFormatError(f"not valid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise ChannelFormatError("top level must be an object")
    unknown = sorted(set(doc) - _CHANNEL_FIELDS)
    if unknown:
        raise ChannelFormatError(f"unknown fields: {', '.join(unknown)}")
    missing = sorted(_CHANNEL_FIELDS - set(doc))
    if missing:
        raise ChannelFormatError(f"missing fields: {', '.join(missing)}")
    sizes = {}
    for key in ("sizeX", "sizeY", "sizeZ"):
        value = doc[key]
        if isinstance(value, bool) or not isinstance(value, int) or value < 1:
            raise ChannelFormatError(f"{key} must be a positive integer")
        sizes[key] = value
    for key in ("W", "qX", "qY"):
        _reject_non_numbers(doc[key], key)
    try:
        W = np.array(doc["W"], dtype=float)
        qX = np.array(doc["qX"], dtype=float)
        qY = np.array(doc["qY"], dtype=float)
    except (TypeError, ValueError) as exc:
        raise ChannelFormatError(f"non-numeric or ragged entries: {exc}") from exc
    expected = (sizes["sizeX"], sizes["sizeY"], sizes["sizeZ"])
    if W.ndim != 3 or W.shape != expected:
        raise ChannelFormatError(
            f"W shape {W.shape} does not match declared sizes {expected}"
        )
    if qX.shape != (sizes["sizeX"],):
        raise ChannelFormatError(f"qX length must be sizeX = {sizes['sizeX']}")
    if qY.shape != (sizes["sizeY"],):
        raise ChannelFormatError(f"qY length must be sizeY = {sizes['sizeY']}")
    return ChannelSpec(W=W, qX=qX, qY=qY)


def load_channel(path) -> ChannelSpec:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_channel(fh.read())


def channel_to_json(ch: ChannelSpec) -> str:
    doc = {
        "sizeX": ch.sizeX,
        "sizeY": ch.sizeY,
        "sizeZ": ch.sizeZ,
        "W": ch.W.tolist(),
        "qX": ch.qX.tolist(),
        "qY": ch.qY.tolist(),
    }
    return json.dumps(doc, indent=2)


def adder_mac() -> ChannelSpec:
    """Two uniform binary senders, output Z = X + Y over {0, 1, 2}."""
    W = np.zeros((2, 2, 3))
    for x in (0, 1):
        for y in (0, 1):
            W[x, y, x + y] = 1.0
    half = np.array([0.5, 0.5])
    return ChannelSpec(W=W, qX=half, qY=half)


def noisy_adder_mac(flip: float = 0.1) -> ChannelSpec:
    """Adder channel whose output is replaced by a uniform symbol w.p. ``flip``."""
    if not 0.0 <= flip < 1.0:
        raise ValueError("flip must lie in [0, 1)")
    base = adder_mac()
    W = (1.0 - flip) * base.W + flip / 3.0
    return ChannelSpec(W=W, qX=base.qX, qY=base.qY)
