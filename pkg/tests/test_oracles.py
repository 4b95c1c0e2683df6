import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import single
from ocnets.fixtures import PUMP_START
from ocnets.net import NetError, Process, classify_net
from ocnets.oracles import (
    BOUND_HIT,
    NONE_EXHAUSTED,
    NONE_UP_TO_DEPTH,
    GenParams,
    inclusion_oracle,
    rand_docn_pair,
    rand_icm,
    rand_ocn,
    traces_upto,
    universality_oracle,
)


def test_inclusion_oracle_examples(fix_loopy, fix_dd, fix_pump):
    r = inclusion_oracle(*fix_loopy, Process("p", 0), Process("q", 2), 5)
    assert r.found and len(r.word) == 2
    a, _ = fix_dd
    assert inclusion_oracle(a, a, Process("p", 1), Process("p", 1), 20).status == NONE_EXHAUSTED
    r = inclusion_oracle(*fix_pump, *PUMP_START, 45)
    assert r.found and len(r.word) <= 42


def test_inclusion_oracle_bounds():
    a = single([("p", "a", 1, "p")])
    r = inclusion_oracle(a, a, Process("p", 0), Process("p", 0), 10)
    assert r.status == NONE_UP_TO_DEPTH
    assert inclusion_oracle(a, a, Process("p", 0), Process("p", 0), 10**6, cap=50).status == BOUND_HIT
    nondet = single([("p", "a", 1, "p"), ("p", "a", 0, "p")])
    with pytest.raises(NetError):
        inclusion_oracle(nondet, a, Process("p", 0), Process("p", 0), 3)


def test_universality_oracle_examples():
    assert universality_oracle(single([("q", "a", -1, "q")]), Process("q", 2), 5) == ("a", "a", "a")
    assert universality_oracle(single([("q", "a", 0, "q")]), Process("q", 0), 5) is None


def test_traces_upto():
    net = single([("q", "a", -1, "q")])
    assert traces_upto(net, Process("q", 2), 4) == {(), ("a",), ("a", "a")}


def test_generators_are_deterministic():
    p = GenParams(seed=42)
    assert rand_ocn(p) == rand_ocn(p)
    assert rand_docn_pair(p) == rand_docn_pair(p)
    assert rand_icm(p) == rand_icm(p)
    assert len({rand_ocn(p.with_seed(s)) for s in range(10)}) > 1


def test_deterministic_complete_mode():
    p = GenParams(density=1.0, deterministic=True, complete=True, max_states=4, actions=3)
    for seed in range(20):
        net = rand_ocn(p.with_seed(seed))
        for q in net.states:
            for x in net.alphabet:
                assert len(net.outgoing(q, x)) == 1


@pytest.mark.parametrize("seed", range(100))
def test_generated_instances_classify(seed):
    p = GenParams(max_states=3, actions=2, seed=seed)
    det = rand_ocn(GenParams(max_states=3, actions=2, deterministic=True, seed=seed))
    assert classify_net(det).deterministic
    pair = rand_docn_pair(p)
    ka, kb = classify_net(pair.a), classify_net(pair.b)
    assert ka.deterministic and kb.deterministic and kb.complete
    assert 1 <= len(rand_ocn(p).states) <= 3


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 10**6))
def test_icm_generator_respects_params(seed):
    m = rand_icm(GenParams(max_states=3, counters=2, seed=seed))
    assert 2 <= len(m.states) <= 3 and m.counters == 2
    assert all(1 <= t.counter <= 2 for t in m.transitions)
