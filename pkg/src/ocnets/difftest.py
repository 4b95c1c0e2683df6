"""Single differential trials: a decision procedure against its brute-force oracle."""

from __future__ import annotations

import random

from .inclusion import NotIncluded, decide_inclusion
from .net import Process
from .oracles import DiffCase, GenParams, inclusion_oracle, rand_docn_pair, rand_ocn, universality_oracle
from .product import build_product, is_witness
from .universality import is_bottom, macrostate_of, run_word, search_nonuniversality


def inclusion_instance(seed: int, params: GenParams = GenParams(), max_counter: int = 3):
    """Normalised random pair with start processes drawn from the same seed."""
    pair = rand_docn_pair(params.with_seed(seed))
    rng = random.Random(seed + 1_000_003)
    p = rng.choice(pair.a.states)
    q = rng.choice([s for s in pair.b.states if s != "L"])
    return pair, Process(p, rng.randint(0, max_counter)), Process(q, rng.randint(0, max_counter))


def include_case(seed: int, params: GenParams = GenParams(), budget: int = 8, depth: int = 50) -> DiffCase:
    pair, pm, qn = inclusion_instance(seed, params)
    verdict = decide_inclusion(pair.a, pair.b, pm, qn, budget=budget)
    orc = inclusion_oracle(pair.a, pair.b, pm, qn, depth)
    data = {"left": str(pm), "right": str(qn), "verdict": type(verdict).__name__, "oracle": orc.status}
    if isinstance(verdict, NotIncluded):
        g = build_product(pair.a, pair.b)
        if not is_witness(g, verdict.witness, (pm, qn)):
            return DiffCase(seed, "include", False, "witness does not replay", data)
        if orc.status == "none-exhausted":
            return DiffCase(seed, "include", False, "oracle exhausted the space without a witness", data)
        return DiffCase(seed, "include", True, "", data)
    if orc.found:
        return DiffCase(seed, "include", False, f"oracle witness of length {len(orc.word)} missed", data)
    return DiffCase(seed, "include", True, "", data)


def universality_instance(seed: int, params: GenParams = GenParams(), max_counter: int = 2):
    net = rand_ocn(params.with_seed(seed))
    rng = random.Random(seed + 7)
    return net, Process(rng.choice(net.states), rng.randint(0, max_counter))


def universal_case(seed: int, params: GenParams = GenParams(), budget: int = 12, max_len: int = 10) -> DiffCase:
    net, p = universality_instance(seed, params)
    r = search_nonuniversality(net, p, shortest=True, max_len=budget)
    orc = universality_oracle(net, p, max_len)
    data = {"process": str(p), "witness": r.witness, "oracle": orc, "conclusive": r.conclusive}
    if r.witness is not None:
        if not is_bottom(run_word(net, macrostate_of(net, [p]), r.witness)[-1]):
            return DiffCase(seed, "universal", False, "witness does not reach all-bottom", data)
        if orc is not None and orc != r.witness:
            return DiffCase(seed, "universal", False, "different shortest witnesses", data)
        if orc is None and len(r.witness) <= max_len:
            return DiffCase(seed, "universal", False, "oracle found no witness within its bound", data)
        return DiffCase(seed, "universal", True, "", data)
    if orc is not None and (r.conclusive or len(orc) <= budget):
        return DiffCase(seed, "universal", False, "oracle witness missed", data)
    return DiffCase(seed, "universal", True, "", data)
