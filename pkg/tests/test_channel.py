import json
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from macresolve import (
    ChannelFormatError,
    ChannelSpec,
    DistVector,
    OffSupportError,
    UndefinedConditionalError,
    adder_mac,
    induced_joint,
    noisy_adder_mac,
    parse_channel,
)
from macresolve.channel import (
    all_sequences,
    channel_to_json,
    index_to_seq,
    seq_to_index,
    sequence_log_prob,
)


def test_adder_mac_tables(adder):
    assert adder.sizeX == adder.sizeY == 2
    assert adder.sizeZ == 3
    assert adder.W[0, 0, 0] == 1.0
    assert adder.W[1, 0, 1] == 1.0
    assert adder.W[1, 1, 2] == 1.0
    assert adder.W[1, 0, 0] == 0.0
    assert np.all(adder.qX == 0.5)
    assert np.all(adder.qY == 0.5)


def test_noisy_adder_mixture_weights(noisy):
    # mixture (1 - flip) * deterministic + flip / |Z|, at the default flip 0.1
    assert noisy.W[0, 0, 0] == 0.9333333333333333
    assert noisy.W[1, 0, 0] == pytest.approx(0.1 / 3, abs=0.0)
    assert np.allclose(noisy.W.sum(axis=2), 1.0, atol=1e-15)


def test_dist_vector_validation():
    DistVector(np.array([0.25, 0.75]))
    with pytest.raises(ValueError):
        DistVector(np.array([0.25, 0.70]))
    with pytest.raises(ValueError):
        DistVector(np.array([-0.1, 1.1]))
    with pytest.raises(ValueError):
        DistVector(np.array([[0.5, 0.5]]))
    with pytest.raises(ValueError):
        DistVector(np.array([]))


def test_dist_vector_is_read_only():
    v = DistVector(np.array([0.5, 0.5]))
    with pytest.raises(ValueError):
        v.probs[0] = 1.0


def test_channel_row_sum_diagnostic_names_the_row():
    W = np.full((2, 2, 2), 0.5)
    W[0, 1] = (0.5, 0.4)
    with pytest.raises(ChannelFormatError, match=r"W\[0\]\[1\] has row sum 0.9"):
        ChannelSpec(W=W, qX=np.array([0.5, 0.5]), qY=np.array([0.5, 0.5]))


def test_channel_shape_validation():
    good = np.full((2, 2, 2), 0.5)
    u = np.array([0.5, 0.5])
    ChannelSpec(W=good, qX=u, qY=u)
    with pytest.raises(ChannelFormatError):
        ChannelSpec(W=good[0], qX=u, qY=u)
    with pytest.raises(ChannelFormatError):
        ChannelSpec(W=good, qX=np.array([0.5, 0.25, 0.25]), qY=u)
    with pytest.raises(ChannelFormatError):
        ChannelSpec(W=good, qX=u, qY=np.array([1.0]))


def test_parse_channel_round_trip(adder, noisy):
    for ch in (adder, noisy):
        back = parse_channel(channel_to_json(ch))
        assert np.array_equal(back.W, ch.W)
        assert np.array_equal(back.qX, ch.qX)
        assert np.array_equal(back.qY, ch.qY)


def _adder_payload():
    return json.loads(channel_to_json(adder_mac()))


def test_parse_channel_rejects_unknown_field():
    payload = _adder_payload()
    payload["flip"] = 0.1
    with pytest.raises(ChannelFormatError, match="unknown"):
        parse_channel(json.dumps(payload))


def test_parse_channel_rejects_missing_field():
    payload = _adder_payload()
    del payload["qY"]
    with pytest.raises(ChannelFormatError, match="missing"):
        parse_channel(json.dumps(payload))


def test_parse_channel_rejects_size_mismatch():
    payload = _adder_payload()
    payload["sizeZ"] = 4
    with pytest.raises(ChannelFormatError):
        parse_channel(json.dumps(payload))


def test_parse_channel_rejects_bool_entries():
    payload = _adder_payload()
    payload["W"][0][0] = [True, False, False]
    with pytest.raises(ChannelFormatError):
        parse_channel(json.dumps(payload))


def test_parse_channel_rejects_ragged_rows():
    payload = _adder_payload()
    payload["W"][1][0] = [1.0, 0.0]
    with pytest.raises(ChannelFormatError):
        parse_channel(json.dumps(payload))


def test_parse_channel_rejects_non_object():
    with pytest.raises(ChannelFormatError):
        parse_channel("[1, 2, 3]")


def test_induced_joint_marginals(adder_joint):
    assert np.array_equal(adder_joint.q_z, np.array([0.25, 0.5, 0.25]))
    assert adder_joint.q_yz.sum() == pytest.approx(1.0, abs=1e-15)
    # q(z | y): uniform over the two reachable outputs
    assert adder_joint.q_z_given_y[0].tolist() == [0.5, 0.5, 0.0]
    assert adder_joint.q_z_given_y[1].tolist() == [0.0, 0.5, 0.5]


def test_conditional_undefined_when_condition_has_no_mass():
    W = np.zeros((1, 2, 2))
    W[:, :, 0] = 1.0
    ch = ChannelSpec(W=W, qX=np.array([1.0]), qY=np.array([1.0, 0.0]))
    joint = induced_joint(ch)
    assert joint.cond_z_given_y(0)[0] == 1.0
    with pytest.raises(UndefinedConditionalError):
        joint.cond_z_given_y(1)


def test_sequence_log_prob_factorizes(adder_joint):
    table = adder_joint.q_z
    lp = sequence_log_prob(table, np.array([0, 1, 2]))
    assert lp == pytest.approx(math.log(0.25) + math.log(0.5) + math.log(0.25))


def test_sequence_log_prob_off_support_is_minus_inf(adder):
    lp = sequence_log_prob(adder.W, np.array([1]), np.array([0]), np.array([0]))
    assert lp == -math.inf


def test_sequence_log_prob_rejects_undefined_rows():
    W = np.zeros((1, 2, 2))
    W[:, :, 0] = 1.0
    joint = induced_joint(ChannelSpec(W=W, qX=np.array([1.0]), qY=np.array([1.0, 0.0])))
    with pytest.raises(UndefinedConditionalError):
        sequence_log_prob(joint.q_z_given_y, np.array([1]), np.array([0]))


def test_all_sequences_order_and_count():
    seqs = all_sequences(3, 2)
    assert seqs.shape == (9, 2)
    assert seqs[0].tolist() == [0, 0]
    assert seqs[1].tolist() == [0, 1]  # first position most significant
    assert seqs[3].tolist() == [1, 0]
    assert seqs[-1].tolist() == [2, 2]


@given(
    size=st.integers(min_value=2, max_value=5),
    n=st.integers(min_value=1, max_value=6),
    data=st.data(),
)
@settings(max_examples=60, deadline=None)
def test_sequence_index_round_trip(size, n, data):
    seq = np.array(
        data.draw(st.lists(st.integers(0, size - 1), min_size=n, max_size=n))
    )
    idx = seq_to_index(seq, size)
    assert 0 <= idx < size**n
    assert np.array_equal(index_to_seq(idx, size, n), seq)


@given(st.lists(st.floats(min_value=0.01, max_value=1.0), min_size=1, max_size=6))
@settings(max_examples=60, deadline=None)
def test_dist_vector_accepts_normalized(weights):
    total = math.fsum(weights)
    DistVector(np.array([w / total for w in weights]))


def test_factories_are_valid_channels():
    for ch in (adder_mac(), noisy_adder_mac(), noisy_adder_mac(flip=0.25)):
        parse_channel(channel_to_json(ch))


def test_off_support_error_is_value_error():
    assert issubclass(OffSupportError, ValueError)
    assert issubclass(ChannelFormatError, ValueError)
