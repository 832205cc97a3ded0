"""Slow, independent reference implementations used to check the package.

Everything here recomputes from first principles with plain loops and
fsum: no code under test is reused beyond basic containers.
"""

from __future__ import annotations

import itertools
import math

import numpy as np


def output_distribution(ch, cb) -> np.ndarray:
    """Induced law over Z^n by looping over every codeword pair and output."""
    n = cb.n
    size_z = ch.sizeZ
    probs = []
    for zseq in itertools.product(range(size_z), repeat=n):
        terms = []
        for m1 in range(cb.M1):
            for m2 in range(cb.M2):
                w = 1.0
                for k in range(n):
                    w *= ch.W[cb.C1[m1, k], cb.C2[m2, k], zseq[k]]
                terms.append(w)
        probs.append(math.fsum(terms) / (cb.M1 * cb.M2))
    return np.array(probs)


def _marginals(ch):
    """q_Z, q_{Z|Y} and q_{YZ} recomputed with explicit sums."""
    q_z = np.zeros(ch.sizeZ)
    q_zy = np.zeros((ch.sizeY, ch.sizeZ))
    for x in range(ch.sizeX):
        for y in range(ch.sizeY):
            for z in range(ch.sizeZ):
                q_zy[y, z] += ch.qX[x] * ch.W[x, y, z]
    q_yz = q_zy * ch.qY[:, None]
    for y in range(ch.sizeY):
        for z in range(ch.sizeZ):
            q_z[z] += q_yz[y, z]
    return q_z, q_zy, q_yz


def _info_pair(ch):
    """I(X;Z|Y) and I(Y;Z) from the explicit marginals."""
    q_z, q_zy, q_yz = _marginals(ch)
    i1_terms = []
    i2_terms = []
    for x in range(ch.sizeX):
        for y in range(ch.sizeY):
            for z in range(ch.sizeZ):
                p = ch.qX[x] * ch.qY[y] * ch.W[x, y, z]
                if p > 0.0:
                    i1_terms.append(p * math.log(ch.W[x, y, z] / q_zy[y, z]))
    for y in range(ch.sizeY):
        for z in range(ch.sizeZ):
            if q_yz[y, z] > 0.0:
                i2_terms.append(q_yz[y, z] * math.log(q_zy[y, z] / q_z[z]))
    return math.fsum(i1_terms), math.fsum(i2_terms)


def decompose(ch, cb, eps1: float, eps2: float):
    """Log-domain exact decomposition by looping over all sequences.

    Returns (tv, p_atyp1, p_atyp2, typ_excess) with the same set
    conventions as the package: zero-probability density ratios count
    as atypical; both atypical masses use their indicator alone.
    """
    n = cb.n
    i1, i2 = _info_pair(ch)
    q_z, q_zy, _ = _marginals(ch)
    thr1 = n * (i1 + eps1)
    thr2 = n * (i2 + eps2)
    pairs = cb.M1 * cb.M2

    tv_terms = []
    a1_terms = []
    a2_terms = []
    excess_terms = []
    for zseq in itertools.product(range(ch.sizeZ), repeat=n):
        qz = 1.0
        for k in range(n):
            qz *= q_z[zseq[k]]
        p_terms = []
        d_terms = []
        for m1 in range(cb.M1):
            for m2 in range(cb.M2):
                w = 1.0
                q2 = 1.0
                for k in range(n):
                    w *= ch.W[cb.C1[m1, k], cb.C2[m2, k], zseq[k]]
                    q2 *= q_zy[cb.C2[m2, k], zseq[k]]
                p_terms.append(w)
                # zero-probability pairs sit outside both typical sets but
                # carry no channel mass, so they drop out of every sum
                if w <= 0.0:
                    continue
                in_t1 = q2 > 0.0 and math.log(w) - math.log(q2) <= thr1
                in_t2 = (
                    q2 > 0.0
                    and qz > 0.0
                    and math.log(q2) - math.log(qz) <= thr2
                )
                if not in_t1:
                    a1_terms.append(w)
                if not in_t2:
                    a2_terms.append(w)
                if in_t1 and in_t2:
                    d_terms.append(w)
        p = math.fsum(p_terms) / pairs
        tv_terms.append(abs(p - qz))
        excess_terms.append(max(math.fsum(d_terms) / pairs - qz, 0.0))
    return (
        0.5 * math.fsum(tv_terms),
        math.fsum(a1_terms) / pairs,
        math.fsum(a2_terms) / pairs,
        math.fsum(excess_terms),
    )


def atypicality(ch, which: str, eps: float, n: int) -> float:
    """P(outside the typical set) by enumerating whole sequence tuples."""
    i1, i2 = _info_pair(ch)
    _, q_zy, q_yz = _marginals(ch)
    terms = []
    if which == "T1":
        thr = n * (i1 + eps)
        for xs in itertools.product(range(ch.sizeX), repeat=n):
            for ys in itertools.product(range(ch.sizeY), repeat=n):
                for zs in itertools.product(range(ch.sizeZ), repeat=n):
                    p = 1.0
                    for k in range(n):
                        p *= ch.qX[xs[k]] * ch.qY[ys[k]] * ch.W[xs[k], ys[k], zs[k]]
                    if p <= 0.0:
                        continue
                    dens = math.fsum(
                        math.log(ch.W[xs[k], ys[k], zs[k]] / q_zy[ys[k], zs[k]])
                        for k in range(n)
                    )
                    if dens > thr:
                        terms.append(p)
        return math.fsum(terms)
    if which == "T2":
        q_z, _, _ = _marginals(ch)
        thr = n * (i2 + eps)
        for ys in itertools.product(range(ch.sizeY), repeat=n):
            for zs in itertools.product(range(ch.sizeZ), repeat=n):
                p = 1.0
                for k in range(n):
                    p *= q_yz[ys[k], zs[k]]
                if p <= 0.0:
                    continue
                dens = math.fsum(
                    math.log(q_zy[ys[k], zs[k]] / q_z[zs[k]]) for k in range(n)
                )
                if dens > thr:
                    terms.append(p)
        return math.fsum(terms)
    raise ValueError(which)


def region_by_time_sharing(iq, r1: float, r2: float) -> bool:
    """Membership via time sharing between the two corner points.

    The region is the union over lam in [0, 1] of quadrants anchored at
    lam * cornerA + (1 - lam) * cornerB, resolved exactly as an interval
    intersection in lam.
    """
    a1, a2 = iq.i_xz_given_y, iq.i_yz  # corner A
    b1, b2 = iq.i_xz, iq.i_yz_given_x  # corner B
    # requirement: r1 >= lam a1 + (1-lam) b1  and  r2 >= lam a2 + (1-lam) b2
    lo, hi = 0.0, 1.0
    slope1 = a1 - b1  # >= 0 for independent inputs
    if slope1 > 0.0:
        hi = min(hi, (r1 - b1) / slope1)
    elif r1 < b1:
        return False
    slope2 = b2 - a2  # >= 0
    if slope2 > 0.0:
        lo = max(lo, (b2 - r2) / slope2)
    elif r2 < a2:
        return False
    if not (r1 >= b1 and r2 >= a2):
        return False
    return lo <= hi


def normal_cdf_by_quadrature(a: float) -> float:
    """Phi(a) via adaptive quadrature of the standard normal density."""
    from scipy.integrate import quad

    def density(t):
        return math.exp(-0.5 * t * t) / math.sqrt(2.0 * math.pi)

    if a <= 0.0:
        value, _ = quad(density, -np.inf, a)
        return value
    value, _ = quad(density, a, np.inf)
    return 1.0 - value


def random_channel(rng: np.random.Generator, size_x: int, size_y: int, size_z: int):
    """A strictly positive random channel with random full-support inputs."""
    from macresolve import ChannelSpec

    W = rng.dirichlet(np.ones(size_z) * 2.0, size=(size_x, size_y))
    W = np.maximum(W, 1e-9)
    W /= W.sum(axis=2, keepdims=True)
    qX = rng.dirichlet(np.ones(size_x) * 3.0)
    qX = np.maximum(qX, 1e-6)
    qX /= qX.sum()
    qY = rng.dirichlet(np.ones(size_y) * 3.0)
    qY = np.maximum(qY, 1e-6)
    qY /= qY.sum()
    return ChannelSpec(W=W, qX=qX, qY=qY)
