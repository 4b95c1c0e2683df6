"""Brute-force reference procedures and seeded random instances.

Nothing here uses the product graph or macrostate code: the oracles step raw
transition lists so that disagreements point at real bugs.
"""

from __future__ import annotations

import random
from collections import deque
from dataclasses import dataclass, field, replace
from typing import Optional

from .net import NetError, NormalPair, Ocn, Process, normalize_pair

FRONTIER_CAP = 10**6

WITNESS = "witness"
NONE_UP_TO_DEPTH = "none-up-to-depth"
NONE_EXHAUSTED = "none-exhausted"
BOUND_HIT = "bound-hit"


def _moves(net: Ocn):
    out: dict = {}
    for src, act, eff, dst in net.transitions:
        out.setdefault((src, act), []).append((eff, dst))
    return out


@dataclass(frozen=True)
class OracleResult:
    status: str
    word: Optional[tuple[str, ...]] = None
    explored: int = 0

    @property
    def found(self) -> bool:
        return self.status == WITNESS


def inclusion_oracle(
    a: Ocn, b: Ocn, pm: Process, qn: Process, depth: int, cap: int = FRONTIER_CAP
) -> OracleResult:
    """Shortest witness word for ``T_a(pm) not<= T_b(qn)`` by BFS up to ``depth`` steps.

    A witness word ``w a`` is returned as ``w``: after ``w`` the left side
    can take ``a`` and the right side cannot. ``a`` must be deterministic and
    ``b`` deterministic and complete.
    """
    ma, mb = _moves(a), _moves(b)
    for net, moves in ((a, ma), (b, mb)):
        if any(len(v) > 1 for v in moves.values()):
            raise NetError(f"oracle needs deterministic nets; {net.name} is not")
    acts = a.alphabet

    def distinguishes(cfg):
        p, m, q, n = cfg
        for x in acts:
            if any(m + e >= 0 for e, _ in ma.get((p, x), ())) and not any(
                n + e >= 0 for e, _ in mb.get((q, x), ())
            ):
                return True
        return False

    root = (pm.state, pm.counter, qn.state, qn.counter)
    parent = {root: None}
    queue = deque([(root, 0)])
    cut = False
    while queue:
        cfg, d = queue.popleft()
        if distinguishes(cfg):
            word = []
            while parent[cfg] is not None:
                cfg, x = parent[cfg]
                word.append(x)
            return OracleResult(WITNESS, tuple(reversed(word)), len(parent))
        if d == depth:
            cut = True
            continue
        p, m, q, n = cfg
        for x in acts:
            for ea, pa in ma.get((p, x), ()):
                for eb, qb in mb.get((q, x), ()):
                    nxt = (pa, m + ea, qb, n + eb)
                    if nxt[1] < 0 or nxt[3] < 0 or nxt in parent:
                        continue
                    parent[nxt] = (cfg, x)
                    queue.append((nxt, d + 1))
        if len(parent) > cap:
            return OracleResult(BOUND_HIT, None, len(parent))
    return OracleResult(NONE_UP_TO_DEPTH if cut else NONE_EXHAUSTED, None, len(parent))


def _post(moves, procs, x):
    out = set()
    for s, c in procs:
        for e, d in moves.get((s, x), ()):
            if c + e >= 0:
                out.add((d, c + e))
    return frozenset(out)


def universality_oracle(net: Ocn, proc: Process, max_len: int) -> Optional[tuple[str, ...]]:
    """The shortest non-trace of ``proc`` (least in alphabet order), if one has length <= max_len."""
    moves = _moves(net)
    start = frozenset([(proc.state, proc.counter)])
    level = [((), start)]
    seen = {start}
    for _ in range(max_len):
        nxt = []
        for word, procs in level:
            for x in net.alphabet:
                post = _post(moves, procs, x)
                if not post:
                    return word + (x,)
                if post not in seen:
                    seen.add(post)
                    nxt.append((word + (x,), post))
        level = nxt
        if not level:
            return None
    return None


def traces_upto(net: Ocn, proc: Process, length: int) -> set[tuple[str, ...]]:
    """All traces of ``proc`` with at most ``length`` actions."""
    moves = _moves(net)
    out = {()}
    level = {(): frozenset([(proc.state, proc.counter)])}
    for _ in range(length):
        nxt = {}
        for word, procs in level.items():
            for x in net.alphabet:
                post = _post(moves, procs, x)
                if post:
                    nxt[word + (x,)] = post
        out.update(nxt)
        level = nxt
    return out


# -- random instances --------------------------------------------------------


@dataclass(frozen=True)
class GenParams:
    min_states: int = 1
    max_states: int = 3
    actions: int = 2
    density: float = 0.7
    effects: tuple[float, float, float] = (1.0, 1.0, 1.0)  # weights of -1, 0, +1
    deterministic: bool = False
    complete: bool = False
    counters: int = 2
    seed: int = 0

    def with_seed(self, seed: int) -> "GenParams":
        return replace(self, seed=seed)


ACTION_NAMES = "abcdefghijklmnopqrstuvwxyz"


def rand_ocn(p: GenParams, name: str = "N", rng: Optional[random.Random] = None) -> Ocn:
    """Random net; with ``deterministic``/``complete`` every (state, action) has at most/least one move."""
    rng = rng or random.Random(p.seed)
    k = rng.randint(p.min_states, p.max_states)
    states = tuple(f"s{i}" for i in range(k))
    alphabet = tuple(ACTION_NAMES[: p.actions])
    trans = []
    for s in states:
        for x in alphabet:
            if p.deterministic:
                count = 1 if (p.complete or rng.random() < p.density) else 0
            else:
                count = sum(rng.random() < p.density for _ in range(2))
                if p.complete:
                    count = max(count, 1)
            for _ in range(count):
                eff = rng.choices((-1, 0, 1), weights=p.effects)[0]
                t = (s, x, eff, rng.choice(states))
                if t not in trans:
                    trans.append(t)
    return Ocn(states, alphabet, tuple(trans), name)


def rand_docn_pair(p: GenParams) -> NormalPair:
    """Two random deterministic nets over one alphabet, normalised together."""
    rng = random.Random(p.seed)
    q = replace(p, deterministic=True)
    return normalize_pair(rand_ocn(q, "A", rng), rand_ocn(q, "B", rng))


def rand_icm(p: GenParams, rng: Optional[random.Random] = None):
    from .reductions import Icm

    rng = rng or random.Random(p.seed)
    k = rng.randint(max(p.min_states, 2), p.max_states)
    states = tuple(f"q{i}" for i in range(k))
    ntrans = rng.randint(1, 2 * k)
    trans = []
    for _ in range(ntrans):
        t = (
            rng.choice(states),
            rng.choice(("inc", "dec", "ifz")),
            rng.randint(1, p.counters),
            rng.choice(states),
        )
        if t not in trans:
            trans.append(t)
    return Icm("R", states, p.counters, tuple(trans), states[0], states[-1])


# -- difference testing -----------------------------------------------------


@dataclass
class DiffCase:
    seed: int
    kind: str
    ok: bool
    detail: str = ""
    data: dict = field(default_factory=dict)
