"""Decision procedures for trace inclusion and universality of one-counter nets."""

from .net import (
    END,
    EPS,
    SINK,
    NetError,
    Ocn,
    Process,
    Transition,
    classify_net,
    eliminate_epsilon,
    normalize_pair,
    step,
)

__version__ = "0.1.0"
