import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import single
from ocnets.fixtures import SAMPLE_ICM
from ocnets.net import NetError, Ocn, Process
from ocnets.oracles import GenParams, rand_icm
from ocnets.reductions import (
    INIT,
    START,
    UNIVERSAL,
    DecodeError,
    Icm,
    IcmConfig,
    IcmError,
    check_run,
    counting_gadget,
    decode_witness,
    fast_growing,
    fast_growing_iter,
    fast_growing_omega,
    icm_reachable_bounded,
    icm_successors,
    icm_to_ocn,
    initial_config,
    make_ignore,
    make_obstacle,
)
from ocnets.textio import parse_icm
from ocnets.universality import (
    find_nonuniversality_witness,
    is_bottom,
    macro_step,
    macrostate_of,
    run_word,
    search_nonuniversality,
)


@pytest.fixture
def machine():
    return parse_icm(SAMPLE_ICM)


def test_successors(machine):
    c0 = initial_config(machine)
    assert IcmConfig("q1", (1, 0)) in icm_successors(machine, c0)
    c1 = IcmConfig("q1", (1, 0))
    assert all(c.state != "q2" for c in icm_successors(machine, c1, allow_errors=False))
    assert IcmConfig("q1", (1, 1)) in icm_successors(machine, c1)
    assert IcmConfig("q2", (1, 0)) in icm_successors(machine, IcmConfig("q1", (1, 1)), allow_errors=False)


def test_reachability_examples(machine):
    run = icm_reachable_bounded(machine, 3, 12)
    assert [s.letter for s in run] == ["t1", "tau2", "t2"]
    assert run[-1].config == IcmConfig("q2", (1, 0))
    assert check_run(machine, run)
    assert icm_reachable_bounded(machine, 3, 12, allow_errors=False) is None
    idle = Icm("idle", ("a", "b"), 1, (), "a", "b")
    assert icm_reachable_bounded(idle, 3, 12) is None
    same = Icm("same", ("a",), 1, (), "a", "a")
    assert icm_reachable_bounded(same, 3, 12) == []


def test_icm_validation():
    with pytest.raises(IcmError):
        Icm("m", ("a",), 1, (("a", "inc", 2, "a"),), "a", "a")
    with pytest.raises(IcmError):
        Icm("m", ("a",), 1, (("a", "jump", 1, "a"),), "a", "a")
    with pytest.raises(IcmError):
        Icm("m", ("a",), 1, (), "a", "z")


def test_obstacle_and_ignore():
    net = Ocn(("q", UNIVERSAL), ("a", "b"), ((UNIVERSAL, "a", 0, UNIVERSAL), (UNIVERSAL, "b", 0, UNIVERSAL)), "N")
    assert make_obstacle(net, "q", []) == net
    ob = make_obstacle(net, "q", ["a"])
    M = macrostate_of(ob, [Process("q", 3)])
    assert macro_step(ob, M, "a")[ob.state_index[UNIVERSAL]] == 3
    ig = make_ignore(net, "q", ["b"])
    assert macro_step(ig, M, "b") == M
    assert make_ignore(ig, "q", ["b"]) == ig
    with pytest.raises(NetError):
        make_obstacle(single([("q", "a", 0, "q")]), "q", ["a"])


def test_sample_reduction_structure(machine):
    out = icm_to_ocn(machine)
    net = out.net
    assert set(net.states) == {INIT, UNIVERSAL, "Z", "q0", "q1", "q2", "C1", "C2"}
    assert set(net.alphabet) == {"#", "$", "t1", "t2", "t3", "tau1", "tau2"}
    assert out.init == Process(INIT, 0)
    assert all(net.outgoing(UNIVERSAL, x)[0].effect == 0 for x in net.alphabet)
    assert ("C2", "t3", -1, UNIVERSAL) in [tuple(t) for t in net.transitions]
    assert out.dictionary["t3"] == ("trans", 2) and out.dictionary["tau2"] == ("error", 2)


def test_sample_reduction_witness(machine):
    out = icm_to_ocn(machine)
    w = find_nonuniversality_witness(out.net, out.init, budget=14)
    assert w == ("#", "t1", "t2", "$")
    run = decode_witness(out, w)
    assert [s.letter for s in run] == ["t1", "tau2", "t2"] and check_run(machine, run)
    u = out.net.state_index[UNIVERSAL]
    assert all(M[u] is None for M in run_word(out.net, macrostate_of(out.net, [out.init]), w))


def test_unreachable_final_is_universal(machine):
    m = Icm("nodec", machine.states, 2, [t for t in machine.transitions if t.op != "dec"], "q0", "q2")
    out = icm_to_ocn(m)
    assert icm_reachable_bounded(m, 3, 12) is None
    r = search_nonuniversality(out.net, out.init, max_len=14)
    assert r.witness is None


def test_decode_examples(machine):
    out = icm_to_ocn(machine)
    assert [s.letter for s in decode_witness(out, ["#", "t1", "tau2", "t2", "$"])] == ["t1", "tau2", "t2"]
    assert decode_witness(out, ["#", "t1", "t2", "$", "$"]) is not None
    assert decode_witness(out, ["#", "t1", "$"]) is None  # ends in q1
    start_final = icm_to_ocn(Icm("f", ("a",), 1, (), "a", "a"))
    assert decode_witness(start_final, ["#", "$"]) == []
    with pytest.raises(DecodeError):
        decode_witness(out, ["#", "t1", "t2"])
    with pytest.raises(DecodeError):
        decode_witness(out, ["#", "t9", "$"])
    with pytest.raises(DecodeError):
        decode_witness(out, ["t1", "$"])
    with pytest.raises(DecodeError):
        decode_witness(out, ["#", "$", "t1"])


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10**6))
def test_reduction_matches_bounded_reachability(seed):
    m = rand_icm(GenParams(max_states=3, counters=2, seed=seed))
    out = icm_to_ocn(m)
    run = icm_reachable_bounded(m, 3, 12)
    r = search_nonuniversality(out.net, out.init, max_len=14)
    if r.witness is not None:
        w = r.witness
        assert w[0] == START and w[-1] == "$"
        assert is_bottom(run_word(out.net, macrostate_of(out.net, [out.init]), w)[-1])
        decoded = decode_witness(out, w)
        assert decoded is not None and check_run(m, decoded)
    assert (run is None) == (r.witness is None)


def test_gadget_examples():
    net, M = counting_gadget(0, 0, 0)
    assert find_nonuniversality_witness(net, M, budget=10) is not None
    lengths = []
    for n in range(3):
        net, M = counting_gadget(1, 1, n)
        w = find_nonuniversality_witness(net, M, budget=30)
        assert w is not None and w[-1] == "e"
        lengths.append(len(w))
    assert lengths == [4, 9, 18]
    with pytest.raises(ValueError):
        counting_gadget(-1, 0, 0)


def _unfold(k, x):
    if k == 0:
        return x + 1
    for _ in range(x + 1):
        x = _unfold(k - 1, x)
    return x


@pytest.mark.parametrize("k, x", [(k, x) for k in range(3) for x in range(6)] + [(3, 0), (3, 1)])
def test_fast_growing_matches_definition(k, x):
    assert fast_growing(k, x) == _unfold(k, x)


def test_fast_growing_examples():
    assert fast_growing(0, 3) == 4
    assert fast_growing(1, 2) == 5
    assert fast_growing(2, 2) == 23
    assert fast_growing_iter(1, 3, 2) == 2**3 * 3 - 1
    assert fast_growing_omega(2) == 23
    with pytest.raises(OverflowError):
        fast_growing(3, 3)
    with pytest.raises(OverflowError):
        fast_growing(2, 100, cap=10**6)


def test_fast_growing_monotone():
    for k in range(3):
        vals = [fast_growing(k, x) for x in range(8)]
        assert vals == sorted(set(vals))
    for x in range(1, 4):
        assert fast_growing(0, x) < fast_growing(1, x) < fast_growing(2, x)
