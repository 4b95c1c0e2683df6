import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import single
from ocnets.difftest import inclusion_instance
from ocnets.fixtures import PUMP_START, PUMP_WORD
from ocnets.inclusion import (
    BudgetExhausted,
    Form1,
    Form2,
    Form3,
    Included,
    NotIncluded,
    SearchStats,
    Short,
    bound_table,
    check_template,
    decide_inclusion,
    match_template,
    realize_template,
)
from ocnets.net import NetError, Process
from ocnets.oracles import GenParams, inclusion_oracle
from ocnets.product import Loop, build_product, is_witness
from ocnets.rewrite import normalize


def _table_by_hand(V):
    f = {"F0": (2 * V + 1) ** 2}
    f["F1"] = f["F0"] * (2 * V + V * V)
    f["F2"] = f["F0"] * (V * V + f["F1"])
    f["F3"] = f["F2"] + 2 * V
    f["F3p"] = V * V + 2 * f["F2"]
    f["F4"] = f["F0"] * (V * f["F3"] + f["F2"])
    f["F4p"] = f["F0"] * (V * f["F3p"] + f["F2"])
    f["F5"] = f["F3"] + f["F3p"] + f["F4"] + f["F4p"]
    f["F6"] = f["F5"] + V * f["F5"] + f["F5"]
    f["F7"] = 2 * f["F5"] + V * f["F6"]
    f["F8"] = V * V + 2 * f["F7"]
    f["F9"] = f["F5"] + V * f["F6"] + f["F5"] + V * f["F8"]
    f["c"] = f["F9"] * f["F0"]
    return f


def test_bound_table_small_values():
    t = bound_table(1)
    assert (t.F0, t.F1, t.F2, t.F3, t.F3p) == (9, 27, 252, 254, 505)
    assert (t.F4, t.F4p, t.F5, t.F6, t.F7, t.F8, t.F9) == (4554, 6813, 12126, 36378, 60630, 121261, 181891)
    assert t.c == 1637019
    assert bound_table(2).F0 == 25


@pytest.mark.parametrize("V", range(1, 11))
def test_bound_table_recurrences(V):
    t = bound_table(V)
    for k, v in _table_by_hand(V).items():
        assert getattr(t, k) == v


def test_bound_table_rejects_zero():
    with pytest.raises(ValueError):
        bound_table(0)


def _loop(g, node, word):
    return Loop(g.path_from_word(node, word))


def test_realize_form1_loopy(fix_loopy):
    g = build_product(*fix_loopy)
    L = _loop(g, ("p", "q"), ["a"])
    empty = g.path_from_word(("p", "q"), [])
    r = realize_template(g, Form1(empty, L, empty), 0, 2)
    assert r is not None and r.exponents == (2,)
    assert r.path.word == ("a", "a")


def test_realize_form3_dd(fix_dd):
    g = build_product(*fix_dd)
    L = _loop(g, ("p", "q"), ["a"])
    empty = g.path_from_word(("p", "q"), [])
    tmpl = Form3(empty, L, empty)
    r = realize_template(g, tmpl, 3, 2)
    assert r is not None and r.exponents == (2,)
    assert is_witness(g, r.path, (Process("p", 3), Process("q", 2)))
    assert realize_template(g, tmpl, 2, 2) is None


def test_check_template_rejects_malformed(fix_dd, fix_loopy):
    g = build_product(*fix_dd)
    L = _loop(g, ("p", "q"), ["a"])
    empty = g.path_from_word(("p", "q"), [])
    with pytest.raises(NetError):
        check_template(Form1(empty, L, empty))  # a down loop is not a drain
    with pytest.raises(NetError):
        check_template(Form2(empty, L, empty, L, empty))
    with pytest.raises(NetError):
        check_template(Short(g.path_from_word(("p", "q"), ["a", "a"])), limit=1)
    with pytest.raises(NetError):
        realize_template(g, Form1(empty, L, empty), 1, 1)


def test_decide_loopy(fix_loopy):
    v = decide_inclusion(*fix_loopy, Process("p", 0), Process("q", 2), budget=4)
    assert isinstance(v, NotIncluded) and len(v.witness) == 2


def test_decide_identity(fix_dd):
    a, _ = fix_dd
    v = decide_inclusion(a, a, Process("p", 1), Process("p", 1))
    assert isinstance(v, Included)
    assert not inclusion_oracle(a, a, Process("p", 1), Process("p", 1), 20).found


def test_decide_dd(fix_dd):
    v = decide_inclusion(*fix_dd, Process("p", 3), Process("q", 2))
    assert isinstance(v, NotIncluded)
    stats = SearchStats()
    v = decide_inclusion(*fix_dd, Process("p", 2), Process("q", 2), stats=stats)
    assert v == Included(certified=False) and stats.exhausted
    assert inclusion_oracle(*fix_dd, Process("p", 2), Process("q", 2), 50).status == "none-exhausted"


def test_decide_dd_large_counters_uses_template(fix_dd):
    v = decide_inclusion(*fix_dd, Process("p", 40), Process("q", 30), budget=4)
    assert isinstance(v, NotIncluded) and isinstance(v.template, Form3)
    assert v.exponents == (30,)


def test_decide_pump(fix_pump):
    a, b = fix_pump
    v = decide_inclusion(a, b, *PUMP_START)
    assert isinstance(v, NotIncluded)
    g = build_product(a, b)
    assert is_witness(g, v.witness, PUMP_START)
    assert isinstance(v.template, Form2)


def test_decide_preconditions(fix_pump):
    a, b = fix_pump
    nondet = single([("p", "a", 0, "p"), ("p", "a", 1, "p")])
    comp = single([("q", "a", 0, "q")])
    with pytest.raises(NetError):
        decide_inclusion(nondet, comp, Process("p", 0), Process("q", 0))
    with pytest.raises(NetError):
        decide_inclusion(b, a, Process("p'", 0), Process("p", 0))  # a is not complete
    with pytest.raises(ValueError):
        decide_inclusion(comp, comp, Process("q", 0), Process("q", 0), on_exhaust="maybe")


def test_unknown_on_exhaust():
    # the left side pumps forever, so the configuration space never runs dry
    a = single([("p", "a", 1, "p")])
    b = single([("q", "a", 1, "q")])
    v = decide_inclusion(a, b, Process("p", 0), Process("q", 0), budget=3, on_exhaust="unknown")
    assert v == BudgetExhausted(3)
    assert decide_inclusion(a, b, Process("p", 0), Process("q", 0), budget=3) == Included(certified=False)


def test_match_template_shapes(fix_loopy, fix_pump):
    g = build_product(*fix_loopy)
    path = g.path_from_word(("p", "q"), ["a"] * 6)
    assert isinstance(match_template(path, 8), Short)
    assert isinstance(match_template(path, 2), Form1)
    a, b = fix_pump
    g = build_product(a, b)
    red = normalize(g, g.path_from_word(("p", "p'"), PUMP_WORD), PUMP_START)
    assert isinstance(match_template(red, 8), Form2)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10**6))
def test_monotone_counter_dependence(seed):
    params = GenParams(max_states=3, actions=2)
    pair, pm, qn = inclusion_instance(seed, params)
    v = decide_inclusion(pair.a, pair.b, pm, qn)
    if not isinstance(v, NotIncluded):
        return
    more = decide_inclusion(pair.a, pair.b, Process(pm.state, pm.counter + 1), qn)
    assert isinstance(more, NotIncluded)
    if qn.counter > 0:
        less = decide_inclusion(pair.a, pair.b, pm, Process(qn.state, qn.counter - 1))
        assert isinstance(less, NotIncluded)


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 10**6), st.integers(0, 30), st.integers(0, 30))
def test_verdict_agrees_with_oracle(seed, m, n):
    pair, pm, qn = inclusion_instance(seed, GenParams(max_states=3, actions=2))
    pm, qn = Process(pm.state, m), Process(qn.state, n)
    v = decide_inclusion(pair.a, pair.b, pm, qn)
    orc = inclusion_oracle(pair.a, pair.b, pm, qn, 80)
    if isinstance(v, NotIncluded):
        assert is_witness(build_product(pair.a, pair.b), v.witness, (pm, qn))
        assert orc.status != "none-exhausted"
    else:
        assert not orc.found
