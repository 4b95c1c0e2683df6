"""The twelve acceptance criteria, one test each, at their stated tolerances and time limits."""

import random

import pytest

from ocnets.difftest import include_case, inclusion_instance, universal_case
from ocnets.fixtures import PUMP_START, PUMP_WORD, SAMPLE_ICM, pump_pair, macro_net
from ocnets.inclusion import bound_table, match_template
from ocnets.ineq import stream_check
from ocnets.net import Process
from ocnets.oracles import GenParams, inclusion_oracle, rand_icm, rand_ocn, traces_upto
from ocnets.product import build_product, is_witness
from ocnets.reductions import (
    Icm,
    check_run,
    counting_gadget,
    decode_witness,
    fast_growing,
    fast_growing_iter,
    icm_reachable_bounded,
    icm_to_ocn,
)
from ocnets.rewrite import RuleInstance, RuleName, apply_rule, check_reduced_bounds, normalize_steps, sanitize, weight
from ocnets.textio import parse_icm
from ocnets.universality import (
    covers,
    find_nonuniversality_witness,
    macro_step,
    macrostate_of,
    norm,
    run_word,
    search_nonuniversality,
)

PAIR_PARAMS = GenParams(max_states=3, actions=2)
PAIR_SEEDS = range(500)


def test_criterion_01_macrostates(criterion):
    with criterion(1, "macrostate replication", 1):
        net = macro_net()
        M = macrostate_of(net, [Process("q3", 4)])
        assert M == (None, None, 4)
        N = run_word(net, M, "aaa")[-1]
        assert N == (5, 5, 7) and norm(N) == 7
        assert covers(M, N)


def test_criterion_02_rewriting(criterion):
    with criterion(2, "witness rewriting 42 -> 50", 1):
        g = build_product(*pump_pair())
        path = g.path_from_word(("p", "p'"), PUMP_WORD)
        assert len(path) == 42 and is_witness(g, path, PUMP_START)
        out = apply_rule(path, RuleInstance(RuleName.UUL, 0, 1, 8, 8), len(g))
        assert len(out) == 50 and is_witness(g, out, PUMP_START)


def test_criterion_03_inclusion_differential(criterion):
    with criterion(3, "inclusion differential, 500 pairs", 300):
        bad = [c for c in (include_case(s, PAIR_PARAMS, budget=8, depth=50) for s in PAIR_SEEDS) if not c.ok]
        assert not bad, [(c.seed, c.detail) for c in bad[:5]]


def test_criterion_04_reduced_forms(criterion):
    with criterion(4, "reduced-form laws on oracle witnesses", 300):
        checked = 0
        for seed in PAIR_SEEDS:
            pair, pm, qn = inclusion_instance(seed, PAIR_PARAMS)
            orc = inclusion_oracle(pair.a, pair.b, pm, qn, 50)
            if not orc.found:
                continue
            g = build_product(pair.a, pair.b)
            start = (pm, qn)
            path = sanitize(g, g.path_from_word((pm.state, qn.state), orc.word), start)
            ws = [weight(path)]
            for st in normalize_steps(g, path, start):
                path = st.path
                ws.append(st.weight)
            assert all(x > y for x, y in zip(ws, ws[1:])), seed
            assert is_witness(g, path, start), seed
            assert check_reduced_bounds(path, len(g)) == [], seed
            assert match_template(path, bound_table(len(g)).c) is not None, seed
            checked += 1
        assert checked > 0


def test_criterion_05_universality_differential(criterion):
    with criterion(5, "universality differential, 500 nets", 300):
        params = GenParams(max_states=3, actions=2)
        bad = [c for c in (universal_case(s, params, budget=12, max_len=10) for s in range(500)) if not c.ok]
        assert not bad, [(c.seed, c.detail) for c in bad[:5]]


def test_criterion_06_norm_bound(criterion):
    with criterion(6, "norm grows by at most one, 10^4 steps", 30):
        rng = random.Random(6)
        violations = 0
        for i in range(10_000):
            net = rand_ocn(GenParams(max_states=4, actions=2, seed=i // 10))
            M = tuple(rng.choice([None] + list(range(8))) for _ in net.states)
            N = macro_step(net, M, rng.choice(net.alphabet))
            if norm(N) is not None and norm(N) > norm(M) + 1:
                violations += 1
        assert violations == 0


def test_criterion_07_monotonicity(criterion):
    with criterion(7, "trace monotonicity in the counter, 200 nets", 60):
        rng = random.Random(7)
        for seed in range(200):
            net = rand_ocn(GenParams(max_states=3, actions=2, seed=seed))
            p = Process(rng.choice(net.states), rng.randint(0, 3))
            lower = traces_upto(net, p, 8)
            upper = traces_upto(net, Process(p.state, p.counter + 1), 8)
            assert lower <= upper, seed


def test_criterion_08_icm_reduction(criterion):
    with criterion(8, "counter-machine reduction", 180):
        m = parse_icm(SAMPLE_ICM)
        out = icm_to_ocn(m)
        w = find_nonuniversality_witness(out.net, out.init, budget=14)
        assert w is not None
        run = decode_witness(out, w)
        assert run is not None and check_run(m, run) and run[-1].config.state == "q2"

        nodec = Icm("nodec", m.states, m.counters, [t for t in m.transitions if t.op != "dec"], m.init, m.final)
        out2 = icm_to_ocn(nodec)
        assert search_nonuniversality(out2.net, out2.init, max_len=14).witness is None
        assert icm_reachable_bounded(nodec, 3, 12) is None

        for seed in range(20):
            r = rand_icm(GenParams(max_states=3, counters=2, seed=seed))
            red = icm_to_ocn(r)
            w = search_nonuniversality(red.net, red.init, max_len=14).witness
            assert (icm_reachable_bounded(r, 3, 12) is None) == (w is None), seed
            if w is not None:
                decoded = decode_witness(red, w)
                assert decoded is not None and check_run(r, decoded), seed


LATTICE = (0, 1, 2, 5, 63, 2048, 4095)  # 7**6 = 117649 points below 2**12


def test_criterion_09_streaming_inequalities(criterion):
    with criterion(9, "streaming inequalities", 60):
        import itertools

        count = 0
        for m, A, B, n, C, D in itertools.product(LATTICE, repeat=6):
            r = stream_check(m, A, B, n, C, D)
            assert r.holds == (m * A + B >= n * C + D)
            assert r.max_scratch_bits <= r.operand_bits + 2
            count += 1
        assert count >= 10**5
        rng = random.Random(9)
        for _ in range(10**5):
            m, A, B, n, C, D = (rng.getrandbits(128) for _ in range(6))
            r = stream_check(m, A, B, n, C, D)
            assert r.holds == (m * A + B >= n * C + D)
            assert r.max_scratch_bits <= r.operand_bits + 2


def test_criterion_10_fast_growing(criterion):
    with criterion(10, "fast-growing values", 1):
        assert fast_growing(0, 3) == 4
        assert fast_growing(1, 2) == 5
        assert fast_growing(2, 2) == 23
        for n in range(11):
            for x in range(11):
                assert fast_growing_iter(1, n, x) == 2**n * (x + 1) - 1


def test_criterion_11_counting_gadgets(criterion):
    with criterion(11, "counting gadgets", 120):
        for k in range(2):
            for m in range(3):
                lengths = []
                for n in range(3):
                    net, M = counting_gadget(k, m, n)
                    w = find_nonuniversality_witness(net, M, budget=40)
                    assert w is not None and w[-1] == "e", (k, m, n)
                    lengths.append(len(w))
                assert lengths == sorted(set(lengths)), (k, m, lengths)


def _table(V):
    F0 = (2 * V + 1) ** 2
    F1 = F0 * (2 * V + V**2)
    F2 = F0 * (V**2 + F1)
    F3 = F2 + 2 * V
    F3p = V**2 + 2 * F2
    F4 = F0 * (V * F3 + F2)
    F4p = F0 * (V * F3p + F2)
    F5 = F3 + F3p + F4 + F4p
    F6 = F5 + V * F5 + F5
    F7 = 2 * F5 + V * F6
    F8 = V**2 + 2 * F7
    F9 = F5 + V * F6 + F5 + V * F8
    return (F0, F1, F2, F3, F3p, F4, F4p, F5, F6, F7, F8, F9, F9 * F0)


def test_criterion_12_bound_table(criterion):
    with criterion(12, "bound table", 1):
        t = bound_table(1)
        assert t.F0 == 9 and t.F1 == 27
        for V in range(1, 11):
            t = bound_table(V)
            got = (t.F0, t.F1, t.F2, t.F3, t.F3p, t.F4, t.F4p, t.F5, t.F6, t.F7, t.F8, t.F9, t.c)
            assert got == _table(V), V
