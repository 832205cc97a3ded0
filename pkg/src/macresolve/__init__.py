"""Resolvability for two-sender multiple-access channels.

Exact induced output distributions at small block length, typical-set
decomposition of total variation, closed-form concentration bounds, and
seeded Monte Carlo experiments.
"""

from .channel import (
    ChannelSpec,
    DistVector,
    JointDist,
    adder_mac,
    induced_joint,
    load_channel,
    noisy_adder_mac,
    parse_channel,
    sequence_log_prob,
)
from .errors import (
    BudgetExceededError,
    ChannelFormatError,
    OffSupportError,
    UndefinedConditionalError,
)

__all__ = [
    "ChannelSpec",
    "DistVector",
    "JointDist",
    "adder_mac",
    "induced_joint",
    "load_channel",
    "noisy_adder_mac",
    "parse_channel",
    "sequence_log_prob",
    "BudgetExceededError",
    "ChannelFormatError",
    "OffSupportError",
    "UndefinedConditionalError",
]
