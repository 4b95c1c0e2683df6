"""One-counter nets: data model, step semantics and normal-form constructions."""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, NamedTuple

EPS = "eps"
END = "$"
SINK = "L"

EFFECTS = (-1, 0, 1)


class NetError(ValueError):
    """Malformed net or a reference to an unknown state or action."""


class Transition(NamedTuple):
    src: str
    action: str
    effect: int
    dst: str


class Process(NamedTuple):
    state: str
    counter: int

    def __str__(self):
        return f"{self.state}:{self.counter}"


class Classification(NamedTuple):
    deterministic: bool
    complete: bool


@dataclass(frozen=True)
class Ocn:
    """A one-counter net ``(Q, Act, delta)``.

    State order is declaration order and fixes macrostate coordinates.
    Transitions keep their declaration order (fresh labels depend on it).
    """

    states: tuple[str, ...]
    alphabet: tuple[str, ...]
    transitions: tuple[Transition, ...]
    name: str = "N"
    _index: dict = field(default=None, init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "states", tuple(self.states))
        object.__setattr__(self, "alphabet", tuple(self.alphabet))
        object.__setattr__(
            self, "transitions", tuple(Transition(*t) for t in self.transitions)
        )
        if len(set(self.states)) != len(self.states):
            raise NetError(f"duplicate state in {self.states}")
        if len(set(self.alphabet)) != len(self.alphabet):
            raise NetError(f"duplicate action in {self.alphabet}")
        states, actions = set(self.states), set(self.alphabet)
        seen = set()
        for t in self.transitions:
            if t.src not in states or t.dst not in states:
                raise NetError(f"transition {t} refers to an undeclared state")
            if t.action not in actions:
                raise NetError(f"transition {t} uses action outside the alphabet")
            if t.effect not in EFFECTS:
                raise NetError(f"transition {t} has effect outside {{-1,0,1}}")
            if t in seen:
                raise NetError(f"duplicate transition {t}")
            seen.add(t)
        index = defaultdict(list)
        for t in self.transitions:
            index[t.src, t.action].append(t)
        object.__setattr__(self, "_index", {k: tuple(v) for k, v in index.items()})

    def outgoing(self, state: str, action: str) -> tuple[Transition, ...]:
        return self._index.get((state, action), ())

    @cached_property
    def state_index(self) -> dict[str, int]:
        return {q: i for i, q in enumerate(self.states)}

    def check_state(self, state: str):
        if state not in self.state_index:
            raise NetError(f"unknown state {state!r} in net {self.name}")

    def check_action(self, action: str):
        if action not in self._actions:
            raise NetError(f"unknown action {action!r} in net {self.name}")

    @cached_property
    def _actions(self) -> frozenset[str]:
        return frozenset(self.alphabet)

    def with_transitions(self, extra: Iterable[Transition], states=(), actions=()):
        """Copy of the net with added states, actions and transitions (deduplicated)."""
        trans = list(self.transitions)
        seen = set(trans)
        for t in extra:
            t = Transition(*t)
            if t not in seen:
                seen.add(t)
                trans.append(t)
        new_states = self.states + tuple(q for q in states if q not in self.state_index)
        new_actions = self.alphabet + tuple(a for a in actions if a not in self._actions)
        return Ocn(new_states, new_actions, tuple(trans), self.name)


def step(net: Ocn, proc: Process, action: str) -> frozenset[Process]:
    net.check_action(action)
    net.check_state(proc.state)
    out = set()
    for t in net.outgoing(proc.state, action):
        n = proc.counter + t.effect
        if n >= 0:
            out.add(Process(t.dst, n))
    return frozenset(out)


def classify_net(net: Ocn) -> Classification:
    det = comp = True
    for q in net.states:
        for a in net.alphabet:
            k = len(net.outgoing(q, a))
            det &= k <= 1
            comp &= k >= 1
    return Classification(det, comp)


def _eps_cycle_states(net: Ocn) -> set[str]:
    succ = defaultdict(set)
    for t in net.transitions:
        if t.action == EPS:
            succ[t.src].add(t.dst)
    on_cycle = set()
    for q in net.states:
        # q lies on an eps-cycle iff q is reachable from one of its eps-successors
        stack, seen = list(succ[q]), set()
        while stack:
            r = stack.pop()
            if r == q:
                on_cycle.add(q)
                break
            if r not in seen:
                seen.add(r)
                stack.extend(succ[r])
    return on_cycle


def eliminate_epsilon(net: Ocn) -> Ocn:
    """Remove ``eps`` transitions, keeping the traces of every original process.

    States on eps-cycles become deadlocks. Every visible step preceded by an
    eps-path is replaced by a direct step. When the combined step has an effect
    outside {-1,0,1} the surplus is carried by fresh states ``q~k`` that stand
    for state ``q`` with ``k`` pending increments, settled on the next step.

    Raises NetError when an eps-path needs a counter of at least 2 more than a
    single unit step can test for, or when pending increments pile up without
    bound along a cycle; the pending-state scheme cannot express either.
    """
    if EPS not in net.alphabet and not any(t.action == EPS for t in net.transitions):
        return net
    dead = _eps_cycle_states(net)
    eps_out = defaultdict(list)
    vis_out = defaultdict(list)
    for t in net.transitions:
        if t.src in dead:
            continue
        (eps_out if t.action == EPS else vis_out)[t.src].append(t)

    # combined[q]: ordered list of (action, guard, effect, dst) for eps* a
    combined: dict[str, list[tuple[str, int, int, str]]] = {}
    for q in net.states:
        steps = []
        # eps graph restricted to non-dead states is acyclic, so this DFS ends
        stack = [(q, 0, 0)]
        while stack:
            r, eff, guard = stack.pop()
            for t in vis_out[r]:
                e = eff + t.effect
                steps.append((t.action, max(guard, -e), e, t.dst))
            for t in reversed(eps_out[r]):
                e = eff + t.effect
                stack.append((t.dst, e, max(guard, -e)))
        combined[q] = list(dict.fromkeys(steps))

    def name(q, k):
        return q if k == 0 else f"{q}~{k}"

    # a pending surplus beyond this can only come from repeating a cycle that
    # gains more than one unit per visible step, which never settles
    max_eff = max((e for steps in combined.values() for _, _, e, _ in steps), default=1)
    pending_cap = len(net.states) * max(1, max_eff)
    states = [q for q in net.states]
    trans: list[Transition] = []
    todo = [(q, 0) for q in net.states]
    done = set(todo)
    while todo:
        q, k = todo.pop(0)
        for action, guard, eff, dst in combined[q]:
            need = guard - k
            if need <= 0:
                d = min(1, eff + k)
            elif need == 1:
                d = -1
            else:
                raise NetError(
                    f"eps-path from {q} before {action!r} needs counter >= {guard};"
                    " not expressible with unit effects"
                )
            pending = eff + k - d
            if pending > pending_cap:
                raise NetError(
                    f"visible steps from {q} gain more than one unit each without bound;"
                    " not expressible with unit effects"
                )
            tgt = (dst, pending)
            if tgt not in done:
                done.add(tgt)
                todo.append(tgt)
                if pending:
                    states.append(name(dst, pending))
            trans.append(Transition(name(q, k), action, d, name(dst, pending)))
    alphabet = tuple(a for a in net.alphabet if a != EPS)
    return Ocn(tuple(states), alphabet, tuple(dict.fromkeys(trans)), net.name)


class NormalPair(NamedTuple):
    a: Ocn
    b: Ocn
    labels: dict[str, str]


def normalize_pair(a: Ocn, b: Ocn) -> NormalPair:
    """Relabel ``a`` to be deterministic and complete ``b`` with a sink ``L``.

    Every transition of ``a`` gets its own label ``t0, t1, ...`` in declaration
    order; ``b`` copies each of its ``x``-transitions under every fresh label
    that stands for ``x``. Both nets get zero-effect ``$`` self-loops; the sink
    decrements on every action, ``$`` included.
    """
    for net in (a, b):
        if any(t.action == EPS for t in net.transitions):
            raise NetError(f"net {net.name} still has eps transitions")
    if SINK in b.states:
        raise NetError(f"state name {SINK!r} is reserved for the sink")
    labels = {f"t{i}": t.action for i, t in enumerate(a.transitions)}
    fresh = tuple(labels)
    alphabet = fresh + (END,)

    a_trans = [Transition(t.src, f"t{i}", t.effect, t.dst) for i, t in enumerate(a.transitions)]
    a_trans += [Transition(s, END, 0, s) for s in a.states]
    a2 = Ocn(a.states, alphabet, tuple(a_trans), a.name)

    by_label = defaultdict(list)
    for t in b.transitions:
        by_label[t.action].append(t)
    b_trans = []
    for lab in fresh:
        for t in by_label[labels[lab]]:
            b_trans.append(Transition(t.src, lab, t.effect, t.dst))
    b_trans += [Transition(s, END, 0, s) for s in b.states]
    have = {(t.src, t.action) for t in b_trans}
    for s in b.states:
        for lab in fresh:
            if (s, lab) not in have:
                b_trans.append(Transition(s, lab, 0, SINK))
    b_trans += [Transition(SINK, x, -1, SINK) for x in alphabet]
    b2 = Ocn(b.states + (SINK,), alphabet, tuple(b_trans), b.name)
    return NormalPair(a2, b2, labels)
