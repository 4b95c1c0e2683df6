"""Incrementing counter machines, the reduction to universality, counting gadgets
and the fast-growing hierarchy."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import NamedTuple, Optional, Sequence

from .net import END, NetError, Ocn, Process, Transition
from .universality import Macrostate

START = "#"
UNIVERSAL = "U"
INIT = "Init"
ZERO = "Z"
OPS = ("inc", "dec", "ifz")


class IcmError(ValueError):
    pass


class ReductionError(ValueError):
    """Two construction rules disagree on the same (state, action)."""


class DecodeError(ValueError):
    pass


class IcmTransition(NamedTuple):
    src: str
    op: str
    counter: int
    dst: str

    def __str__(self):
        return f"{self.src} {self.op} {self.counter} {self.dst}"


@dataclass(frozen=True)
class Icm:
    """Counter machine with ``k`` counters numbered ``1..k``."""

    name: str
    states: tuple[str, ...]
    counters: int
    transitions: tuple[IcmTransition, ...]
    init: str
    final: str

    def __post_init__(self):
        object.__setattr__(self, "states", tuple(self.states))
        object.__setattr__(self, "transitions", tuple(IcmTransition(*t) for t in self.transitions))
        if len(set(self.states)) != len(self.states):
            raise IcmError(f"duplicate state in {self.states}")
        if self.counters < 0:
            raise IcmError("negative counter count")
        known = set(self.states)
        for q in (self.init, self.final):
            if q not in known:
                raise IcmError(f"unknown state {q!r}")
        seen = set()
        for t in self.transitions:
            if t.src not in known or t.dst not in known:
                raise IcmError(f"transition {t} uses an undeclared state")
            if t.op not in OPS:
                raise IcmError(f"transition {t} has unknown operation {t.op!r}")
            if not 1 <= t.counter <= self.counters:
                raise IcmError(f"transition {t} uses counter outside 1..{self.counters}")
            if t in seen:
                raise IcmError(f"duplicate transition {t}")
            seen.add(t)


class IcmConfig(NamedTuple):
    state: str
    values: tuple[int, ...]

    def __str__(self):
        return f"{self.state}({','.join(map(str, self.values))})"


def initial_config(m: Icm) -> IcmConfig:
    return IcmConfig(m.init, (0,) * m.counters)


def trans_letter(k: int) -> str:
    """Action naming the k-th (0-based) machine transition."""
    return f"t{k + 1}"


def error_letter(i: int) -> str:
    """Action naming a spontaneous increment of counter ``i`` (1-based)."""
    return f"tau{i}"


def apply_transition(t: IcmTransition, c: IcmConfig) -> Optional[IcmConfig]:
    if c.state != t.src:
        return None
    vals = list(c.values)
    i = t.counter - 1
    if t.op == "inc":
        vals[i] += 1
    elif t.op == "dec":
        if vals[i] == 0:
            return None
        vals[i] -= 1
    elif vals[i] != 0:
        return None
    return IcmConfig(t.dst, tuple(vals))


def apply_error(i: int, c: IcmConfig) -> IcmConfig:
    vals = list(c.values)
    vals[i - 1] += 1
    return IcmConfig(c.state, tuple(vals))


def labelled_successors(m: Icm, c: IcmConfig, allow_errors: bool):
    """(letter, successor) pairs: machine transitions first, then errors."""
    out = []
    for k, t in enumerate(m.transitions):
        d = apply_transition(t, c)
        if d is not None:
            out.append((trans_letter(k), d))
    if allow_errors:
        for i in range(1, m.counters + 1):
            out.append((error_letter(i), apply_error(i, c)))
    return out


def icm_successors(m: Icm, c: IcmConfig, allow_errors: bool = True) -> set[IcmConfig]:
    return {d for _, d in labelled_successors(m, c, allow_errors)}


class RunStep(NamedTuple):
    letter: str
    config: IcmConfig


def icm_reachable_bounded(
    m: Icm, counter_cap: int, depth_cap: int, allow_errors: bool = True
) -> Optional[list[RunStep]]:
    """A shortest run from the initial configuration to the final state.

    Configurations with a counter above ``counter_cap`` are not explored.
    """
    if counter_cap < 0 or depth_cap < 0:
        raise ValueError("caps must be non-negative")
    start = initial_config(m)
    if start.state == m.final:
        return []
    parent = {start: None}
    queue = deque([(start, 0)])
    while queue:
        c, d = queue.popleft()
        if d == depth_cap:
            continue
        for letter, nxt in labelled_successors(m, c, allow_errors):
            if max(nxt.values, default=0) > counter_cap or nxt in parent:
                continue
            parent[nxt] = (c, letter)
            if nxt.state == m.final:
                run = []
                while parent[nxt] is not None:
                    prev, lt = parent[nxt]
                    run.append(RunStep(lt, nxt))
                    nxt = prev
                return run[::-1]
            queue.append((nxt, d + 1))
    return None


def check_run(m: Icm, run: Sequence[RunStep]) -> bool:
    """Every step is a legal transition or error and the run ends in the final state."""
    c = initial_config(m)
    for letter, nxt in run:
        if dict(labelled_successors(m, c, True)).get(letter) != nxt:
            return False
        c = nxt
    return c.state == m.final


# -- obstacles and ignores ---------------------------------------------------


def make_obstacle(net: Ocn, q: str, actions) -> Ocn:
    """``q`` steps to the universal state on every action in ``actions``."""
    if UNIVERSAL not in net.state_index:
        raise NetError(f"net {net.name} has no universal state {UNIVERSAL!r}")
    net.check_state(q)
    for x in actions:
        net.check_action(x)
    return net.with_transitions(Transition(q, x, 0, UNIVERSAL) for x in actions)


def make_ignore(net: Ocn, q: str, actions) -> Ocn:
    """``q`` keeps its counter on every action in ``actions``."""
    net.check_state(q)
    for x in actions:
        net.check_action(x)
    return net.with_transitions(Transition(q, x, 0, q) for x in actions)


class _Builder:
    """Collects explicit moves and obstacles; unmentioned (state, action) pairs ignore."""

    def __init__(self, states, alphabet):
        self.states = list(states)
        self.alphabet = list(alphabet)
        self.moves: dict = {}
        self.obstacles: dict = {}
        self.silent: set = set()  # pairs that must have no transition at all

    def move(self, q, x, eff, dst, why):
        self.moves.setdefault((q, x), []).append((eff, dst, why))

    def obstacle(self, q, x, why):
        self.obstacles.setdefault((q, x), why)

    def nothing(self, q, x):
        self.silent.add((q, x))

    def build(self, name) -> Ocn:
        trans = []
        for q in self.states:
            if q == UNIVERSAL:
                trans += [(q, x, 0, q) for x in self.alphabet]
                continue
            for x in self.alphabet:
                key = (q, x)
                ob = self.obstacles.get(key)
                mv = self.moves.get(key, [])
                if ob and (mv or key in self.silent):
                    other = mv[0][2] if mv else "no-transition rule"
                    raise ReductionError(f"{q} on {x!r}: obstacle ({ob}) conflicts with {other}")
                if ob:
                    trans.append((q, x, 0, UNIVERSAL))
                elif mv:
                    trans += [(q, x, e, d) for e, d, _ in mv]
                elif key not in self.silent:
                    trans.append((q, x, 0, q))
        return Ocn(tuple(self.states), tuple(self.alphabet), tuple(dict.fromkeys(trans)), name)


@dataclass(frozen=True)
class ReductionOutput:
    net: Ocn
    init: Process
    dictionary: dict  # action -> ("start",) | ("end",) | ("trans", index) | ("error", counter)
    machine: Icm

    def counter_state(self, i: int) -> str:
        return f"C{i}"


def icm_to_ocn(m: Icm) -> ReductionOutput:
    """Net whose ``Init 0`` is non-universal iff the machine reaches its final state.

    Pathfinder words have the shape ``# run $``: ``#`` spreads ``Init`` into
    the initial control state, ``Z`` and one state ``C_i`` per counter holding
    its value; each machine transition and each error has its own letter.
    A zero test keeps ``C_i`` and also sends it to ``U`` with a decrement,
    which is only blocked when the counter is 0.
    """
    counters = [f"C{i}" for i in range(1, m.counters + 1)]
    fixed = [INIT, UNIVERSAL, ZERO] + counters
    clash = set(fixed) & set(m.states)
    if clash:
        raise ReductionError(f"machine state names clash with reserved names: {sorted(clash)}")
    tletters = [trans_letter(k) for k in range(len(m.transitions))]
    eletters = [error_letter(i) for i in range(1, m.counters + 1)]
    alphabet = [START, END] + tletters + eletters
    states = [INIT, UNIVERSAL, ZERO] + list(m.states) + counters
    b = _Builder(states, alphabet)

    for q in states:
        if q not in (INIT, UNIVERSAL):
            b.obstacle(q, START, "only Init may read #")
    for q in [m.init, ZERO] + counters:
        b.move(INIT, START, 0, q, "initialisation")
    for x in alphabet:
        if x != START:
            b.obstacle(INIT, x, "the run must start with #")

    for k, t in enumerate(m.transitions):
        x = tletters[k]
        c = counters[t.counter - 1]
        b.move(t.src, x, 0, t.dst, "finite control")
        for q in m.states:
            if q != t.src:
                b.obstacle(q, x, "transition starts elsewhere")
        if t.op == "inc":
            b.move(c, x, 1, c, "increment")
        elif t.op == "dec":
            b.move(c, x, -1, c, "decrement")
            b.move(ZERO, x, 0, c, "decrement at zero through an error")
        else:
            b.move(c, x, -1, UNIVERSAL, "zero test")
            b.move(c, x, 0, c, "zero test keeps the counter")
    for i, x in enumerate(eletters):
        b.move(counters[i], x, 1, counters[i], "incrementing error")

    for x in alphabet:
        if x not in (START, END):
            b.move(ZERO, x, 0, ZERO, "Z ignores all but $")
    for q in m.states:
        if q != m.final:
            b.obstacle(q, END, "only the final state may end the run")
    for q in [m.final, ZERO] + counters:
        b.nothing(q, END)

    dictionary = {START: ("start",), END: ("end",)}
    dictionary.update({x: ("trans", k) for k, x in enumerate(tletters)})
    dictionary.update({x: ("error", i + 1) for i, x in enumerate(eletters)})
    net = b.build(f"red_{m.name}")
    return ReductionOutput(net, Process(INIT, 0), dictionary, m)


def decode_witness(out: ReductionOutput, word: Sequence[str]) -> Optional[list[RunStep]]:
    """Translate ``# letters $`` (optionally with a second ``$``) into a machine run.

    A decrement of a zero counter is read as an incrementing error followed
    by the decrement, which is what the net allows. Returns None when the
    letters do not form a run reaching the final state.
    """
    m = out.machine
    word = list(word)
    for x in word:
        if x not in out.dictionary:
            raise DecodeError(f"letter {x!r} is not in the action dictionary")
    if not word or word[0] != START:
        raise DecodeError("witness must start with #")
    if END not in word:
        raise DecodeError("witness must contain $")
    cut = word.index(END)
    rest = word[cut + 1 :]
    if rest not in ([], [END]):
        raise DecodeError("only a second $ may follow the end marker")
    body = word[1:cut]
    if START in body:
        raise DecodeError("# may only appear first")
    c = initial_config(m)
    run: list[RunStep] = []
    for x in body:
        kind = out.dictionary[x]
        if kind[0] == "error":
            c = apply_error(kind[1], c)
            run.append(RunStep(x, c))
            continue
        t = m.transitions[kind[1]]
        if t.op == "dec" and c.state == t.src and c.values[t.counter - 1] == 0:
            c = apply_error(t.counter, c)
            run.append(RunStep(error_letter(t.counter), c))
        nxt = apply_transition(t, c)
        if nxt is None:
            return None
        c = nxt
        run.append(RunStep(x, c))
    return run if c.state == m.final else None


# -- counting gadgets --------------------------------------------------------


def gadget_state(i: int) -> str:
    return f"F{i}"


def counting_gadget(k: int, m: int, n: int) -> tuple[Ocn, Macrostate]:
    """Counting net over ``0..k`` and ``e`` with initial macrostate ``{A=m, F_k=n}``.

    ``F_i`` pays one unit per ``i``, is an obstacle for ``e`` and every ``j > i``
    and ignores smaller letters. The accumulator ``A`` grows on ``0``, copies
    itself into ``F_i`` on ``i+1`` while staying put, and has no ``e`` move.
    """
    if k < 0 or m < 0 or n < 0:
        raise ValueError("k, m, n must be natural numbers")
    letters = [str(i) for i in range(k + 1)]
    alphabet = letters + ["e"]
    fs = [gadget_state(i) for i in range(k + 1)]
    states = [UNIVERSAL, "A"] + fs
    trans = [(UNIVERSAL, x, 0, UNIVERSAL) for x in alphabet]
    for i, f in enumerate(fs):
        for j, x in enumerate(letters):
            if j < i:
                trans.append((f, x, 0, f))
            elif j == i:
                trans.append((f, x, -1, f))
            else:
                trans.append((f, x, 0, UNIVERSAL))
        trans.append((f, "e", 0, UNIVERSAL))
    trans.append(("A", "0", 1, "A"))
    for i in range(k):
        x = str(i + 1)
        trans.append(("A", x, 0, fs[i]))
        trans.append(("A", x, 0, "A"))
    net = Ocn(tuple(states), tuple(alphabet), tuple(trans), f"gadget{k}")
    M = [None] * len(states)
    M[1] = m
    M[2 + k] = n
    return net, tuple(M)


# -- fast-growing hierarchy --------------------------------------------------

DEFAULT_CAP = 2**4096


def fast_growing(k: int, x: int, cap: int = DEFAULT_CAP) -> int:
    """``F_k(x)`` with ``F_0(x) = x + 1`` and ``F_{k+1}(x) = F_k^{x+1}(x)``.

    Raises OverflowError as soon as a value would exceed ``cap``.
    """
    if k < 0 or x < 0:
        raise ValueError("k and x must be natural numbers")
    if k == 0:
        r = x + 1
    elif k == 1:
        r = 2 * x + 1
    elif k == 2:
        if x + 1 > cap.bit_length():
            raise OverflowError(f"F_2({x}) exceeds the cap")
        r = 2 ** (x + 1) * (x + 1) - 1
    else:
        r = x
        for _ in range(x + 1):
            r = fast_growing(k - 1, r, cap)
    if r > cap:
        raise OverflowError(f"F_{k}({x}) exceeds the cap")
    return r


def fast_growing_iter(k: int, times: int, x: int, cap: int = DEFAULT_CAP) -> int:
    """``F_k`` applied ``times`` times to ``x``."""
    for _ in range(times):
        x = fast_growing(k, x, cap)
    return x


def fast_growing_omega(x: int, cap: int = DEFAULT_CAP) -> int:
    return fast_growing(x, x, cap)
