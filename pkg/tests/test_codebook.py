import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from macresolve import BudgetExceededError
from macresolve.codebook import (
    Budget,
    CodebookPair,
    KahanSum,
    RatePair,
    codebook_sizes,
    format_codebook_dump,
    induced_output_distribution,
    induced_point_prob,
    iter_pair_blocks,
    product_grid,
    sample_codebooks,
    sample_rows,
    simulate_outputs,
)
import oracles


def test_codebook_sizes_snap_to_exact_powers():
    # e^(3 ln 2) = 8 up to rounding: snap, do not bump to 9
    assert codebook_sizes(RatePair(math.log(2.0), 0.0, 3)) == (8, 1)
    assert codebook_sizes(RatePair(0.85, 0.45, 4)) == (30, 7)
    assert codebook_sizes(RatePair(0.0, 0.0, 5)) == (1, 1)


def test_codebook_sizes_ceil_otherwise():
    m1, m2 = codebook_sizes(RatePair(0.85, 0.45, 6))
    assert (m1, m2) == (165, 15)


def test_rate_pair_validation():
    with pytest.raises(ValueError):
        RatePair(-0.1, 0.5, 4)
    with pytest.raises(ValueError):
        RatePair(0.5, 0.5, 0)


def test_sample_codebooks_deterministic(adder):
    rates = RatePair(0.85, 0.45, 4)
    a = sample_codebooks(adder, rates, seed=42)
    b = sample_codebooks(adder, rates, seed=42)
    assert np.array_equal(a.C1, b.C1)
    assert np.array_equal(a.C2, b.C2)
    c = sample_codebooks(adder, rates, seed=43)
    assert not (np.array_equal(a.C1, c.C1) and np.array_equal(a.C2, c.C2))


def test_sample_rows_are_row_stable(adder):
    # row m depends only on (seed, component, m): growing the codebook
    # keeps earlier codewords unchanged
    small = sample_rows(adder.qX, 5, 6, seed=9, component=0)
    large = sample_rows(adder.qX, 12, 6, seed=9, component=0)
    assert np.array_equal(large[:5], small)
    other = sample_rows(adder.qX, 5, 6, seed=9, component=1)
    assert not np.array_equal(other, small)


def test_sample_codebooks_matches_input_law(noisy):
    skewed = np.array([[0.8, 0.2]])
    from macresolve import ChannelSpec

    W = np.tile(np.array([0.5, 0.5]), (2, 2, 1)).reshape(2, 2, 2)
    ch = ChannelSpec(W=W, qX=skewed[0], qY=np.array([0.5, 0.5]))
    cb = sample_codebooks(ch, RatePair(1.2, 0.2, 8), seed=3)
    freq = float(np.mean(cb.C1 == 0))
    assert abs(freq - 0.8) < 0.05


def test_effective_rates(adder):
    cb = sample_codebooks(adder, RatePair(0.85, 0.45, 4), seed=1)
    assert cb.M1 == 30 and cb.M2 == 7
    assert cb.effective_r1 == pytest.approx(math.log(30) / 4, abs=0.0)
    assert cb.effective_r2 == pytest.approx(math.log(7) / 4, abs=0.0)


def test_codebook_pair_validation():
    with pytest.raises(ValueError):
        CodebookPair(C1=np.zeros((2, 3), dtype=int), C2=np.zeros((2, 4), dtype=int))
    with pytest.raises(ValueError):
        CodebookPair(C1=np.array([[0, -1]]), C2=np.array([[0, 0]]))


def test_product_grid_matches_kron():
    a = np.array([[0.2, 0.8]])
    b = np.array([[0.5, 0.5]])
    c = np.array([[0.1, 0.9]])
    grid = product_grid([a, b, c])
    assert grid.shape == (1, 8)
    assert np.allclose(grid[0], np.kron(np.kron(a[0], b[0]), c[0]))
    # index encoding: first factor most significant
    assert grid[0, 0] == pytest.approx(0.2 * 0.5 * 0.1)
    assert grid[0, 1] == pytest.approx(0.2 * 0.5 * 0.9)
    assert grid[0, 4] == pytest.approx(0.8 * 0.5 * 0.1)


@pytest.mark.parametrize("seed", [0, 1, 7])
@pytest.mark.parametrize("n", [1, 2, 3])
def test_induced_distribution_matches_brute_force(noisy, seed, n):
    cb = sample_codebooks(noisy, RatePair(0.7, 0.5, n), seed=seed)
    fast = induced_output_distribution(noisy, cb)
    slow = oracles.output_distribution(noisy, cb)
    assert np.max(np.abs(fast.probs - slow)) < 1e-13
    assert math.fsum(fast.probs.tolist()) == pytest.approx(1.0, abs=1e-12)


def test_induced_distribution_random_channels(rng):
    for trial in range(5):
        ch = oracles.random_channel(rng, 2, 2, 3)
        cb = sample_codebooks(ch, RatePair(0.9, 0.6, 2), seed=trial)
        fast = induced_output_distribution(ch, cb)
        slow = oracles.output_distribution(ch, cb)
        assert np.max(np.abs(fast.probs - slow)) < 1e-13


def test_point_prob_agrees_with_vector(noisy):
    cb = sample_codebooks(noisy, RatePair(0.8, 0.5, 3), seed=5)
    vec = induced_output_distribution(noisy, cb)
    from macresolve.channel import all_sequences

    for idx, zseq in enumerate(all_sequences(noisy.sizeZ, 3)):
        assert induced_point_prob(noisy, cb, zseq) == pytest.approx(
            float(vec.probs[idx]), abs=1e-14
        )


def test_chunk_size_does_not_change_result(noisy, monkeypatch):
    cb = sample_codebooks(noisy, RatePair(0.9, 0.5, 4), seed=11)
    full = induced_output_distribution(noisy, cb)
    monkeypatch.setattr("macresolve.codebook._CHUNK_CELLS", 64)
    chunked = induced_output_distribution(noisy, cb)
    # accumulation order changes, so agreement is to rounding, not bitwise
    assert np.max(np.abs(full.probs - chunked.probs)) < 1e-15


def test_iter_pair_blocks_covers_every_pair(adder):
    cb = sample_codebooks(adder, RatePair(0.85, 0.45, 2), seed=2)
    seen = np.zeros((cb.M1, cb.M2), dtype=int)
    for m2, start, V in iter_pair_blocks(adder, cb):
        seen[start : start + V.shape[0], m2] += 1
        assert V.shape[1] == adder.sizeZ**2
    assert np.all(seen == 1)


def test_budget_rejects_large_enumerations(adder):
    with pytest.raises(BudgetExceededError):
        Budget().check_outputs(3, 13)
    cb = sample_codebooks(adder, RatePair(0.85, 0.45, 4), seed=0)
    with pytest.raises(BudgetExceededError):
        induced_output_distribution(adder, cb, Budget(max_work=10))
    with pytest.raises(BudgetExceededError):
        sample_codebooks(adder, RatePair(2.0, 2.0, 12), seed=0, budget=Budget(max_work=100))


def test_symbol_range_checked_against_channel(adder):
    cb = CodebookPair(C1=np.array([[2, 0]]), C2=np.array([[0, 0]]))
    with pytest.raises(ValueError):
        induced_output_distribution(adder, cb)


def test_simulate_outputs_deterministic_and_close(noisy):
    cb = sample_codebooks(noisy, RatePair(0.8, 0.5, 3), seed=5)
    emp1 = simulate_outputs(noisy, cb, samples=40_000, seed=77)
    emp2 = simulate_outputs(noisy, cb, samples=40_000, seed=77)
    assert np.array_equal(emp1.probs, emp2.probs)
    exact = induced_output_distribution(noisy, cb)
    tv = 0.5 * float(np.abs(emp1.probs - exact.probs).sum())
    assert tv < 0.02


def test_kahan_sum_beats_naive_on_adversarial_series():
    acc = KahanSum(1)
    parts = np.array([1e16, 1.0, -1e16, 1.0])
    naive = 0.0
    for p in parts:
        acc.add(np.array([p]))
        naive += p
    assert naive == 1.0  # plain addition loses one unit
    assert acc.value()[0] == 2.0


def test_format_codebook_dump_shape(adder):
    cb = sample_codebooks(adder, RatePair(0.6, 0.4, 3), seed=9)
    text = format_codebook_dump(cb)
    lines = text.splitlines()
    assert lines[0].startswith("# n=3 M1=")
    assert "# C1" in lines and "# C2" in lines
    assert text.endswith("\n")
    body = [l for l in lines if not l.startswith("#")]
    assert len(body) == cb.M1 + cb.M2


@given(st.integers(min_value=0, max_value=2**32 - 1))
@settings(max_examples=20, deadline=None)
def test_sampling_reproducible_for_any_seed(seed):
    from macresolve import adder_mac

    ch = adder_mac()
    a = sample_rows(ch.qX, 3, 4, seed, component=0)
    b = sample_rows(ch.qX, 3, 4, seed, component=0)
    assert np.array_equal(a, b)
