"""Trace universality through macrostates and the covering order."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterable, Optional, Sequence, Union

from .net import NetError, Ocn, Process

Macrostate = tuple  # entries: int or None (bottom), in the net's state order
BOTTOM = None


def bottom(net: Ocn) -> Macrostate:
    return (BOTTOM,) * len(net.states)


def is_bottom(M: Macrostate) -> bool:
    return all(v is None for v in M)


def macrostate_of(net: Ocn, procs: Iterable[Process]) -> Macrostate:
    out = [None] * len(net.states)
    for p in procs:
        net.check_state(p.state)
        if p.counter < 0:
            raise NetError(f"negative counter in {p}")
        i = net.state_index[p.state]
        if out[i] is None or out[i] < p.counter:
            out[i] = p.counter
    return tuple(out)


def norm(M: Macrostate) -> Optional[int]:
    vals = [v for v in M if v is not None]
    return max(vals) if vals else None


def _transition_table(net: Ocn):
    """Per action, the list of (src index, effect, dst index)."""
    cache = getattr(net, "_macro_table", None)
    if cache is None:
        idx = net.state_index
        cache = {x: [] for x in net.alphabet}
        for t in net.transitions:
            cache[t.action].append((idx[t.src], t.effect, idx[t.dst]))
        object.__setattr__(net, "_macro_table", cache)
    return cache


def macro_step(net: Ocn, M: Macrostate, action: str) -> Macrostate:
    """Per target state, the largest counter reachable by one ``action`` step."""
    net.check_action(action)
    if len(M) != len(net.states):
        raise NetError("macrostate does not match the net")
    out = [None] * len(M)
    for i, d, j in _transition_table(net)[action]:
        v = M[i]
        if v is None:
            continue
        v += d
        if v >= 0 and (out[j] is None or out[j] < v):
            out[j] = v
    return tuple(out)


def run_word(net: Ocn, M: Macrostate, word: Iterable[str]) -> list[Macrostate]:
    seq = [M]
    for x in word:
        seq.append(macro_step(net, seq[-1], x))
    return seq


def covers(M: Macrostate, N: Macrostate) -> bool:
    """``M`` is covered by ``N``: pointwise smaller, bottom below every number."""
    if len(M) != len(N):
        raise ValueError("macrostates of different dimension")
    return all(m is None or (n is not None and m <= n) for m, n in zip(M, N))


def universal_states(net: Ocn) -> frozenset[str]:
    """States with a non-decreasing self-loop on every action.

    Such a state with any counter has every word as a trace, so a macrostate
    containing one can never be driven to all-bottom.
    """
    out = set()
    for q in net.states:
        if all(any(t.dst == q and t.effect >= 0 for t in net.outgoing(q, x)) for x in net.alphabet):
            out.add(q)
    return frozenset(out)


@dataclass
class SearchResult:
    witness: Optional[tuple[str, ...]]
    conclusive: bool
    nodes: int

    @property
    def universal(self) -> Optional[bool]:
        if self.witness is not None:
            return False
        return True if self.conclusive else None


class SearchExhausted(RuntimeError):
    """The node budget ran out before the search was conclusive."""


class _Budget:
    def __init__(self, limit):
        self.limit = limit
        self.used = 0
        self.hit = False

    def tick(self):
        self.used += 1
        if self.limit is not None and self.used > self.limit:
            self.hit = True
            raise SearchExhausted


def _dfs(net, M, word, ancestors, blocked, budget, depth_left):
    """Depth-first pathfinder; returns a witness or None. ``depth_left=None`` means unbounded.

    Sets ``_dfs.cut`` when the depth bound pruned a branch.
    """
    budget.tick()
    if depth_left is not None and depth_left == 0:
        return None, True
    cut = False
    for x in net.alphabet:
        N = macro_step(net, M, x)
        if is_bottom(N):
            return word + (x,), cut
        if any(N[i] is not None for i in blocked):
            continue
        if any(covers(A, N) for A in ancestors):
            continue
        ancestors.append(N)
        try:
            w, c = _dfs(net, N, word + (x,), ancestors, blocked, budget,
                        None if depth_left is None else depth_left - 1)
        finally:
            ancestors.pop()
        cut |= c
        if w is not None:
            return w, cut
    return None, cut


def search_nonuniversality(
    net: Ocn,
    start: Union[Process, Macrostate],
    shortest: bool = True,
    max_len: Optional[int] = None,
    node_budget: Optional[int] = None,
) -> SearchResult:
    """Pathfinder search for a word driving the start macrostate to all-bottom.

    A branch is cut when its macrostate covers one of its ancestors on the
    current path (the pathfinder could have done at least as well earlier), or
    when it contains a state with non-decreasing self-loops on every action.
    ``shortest`` runs iterative deepening, so the first witness is of minimum
    length and least in alphabet order. ``max_len`` bounds the witness length
    (then a negative answer is conclusive only if no branch hit the bound).
    """
    import sys

    M = macrostate_of(net, [start]) if isinstance(start, Process) else tuple(start)
    if is_bottom(M):
        return SearchResult((), True, 0)
    idx = net.state_index
    blocked = [idx[q] for q in universal_states(net)]
    if any(M[i] is not None for i in blocked):
        return SearchResult(None, True, 0)
    budget = _Budget(node_budget)
    sys.setrecursionlimit(max(sys.getrecursionlimit(), 10_000))
    try:
        if not shortest:
            w, cut = _dfs(net, M, (), [M], blocked, budget, max_len)
            return SearchResult(w, w is not None or not cut, budget.used)
        depth = 1
        while max_len is None or depth <= max_len:
            w, cut = _dfs(net, M, (), [M], blocked, budget, depth)
            if w is not None:
                return SearchResult(w, True, budget.used)
            if not cut:
                return SearchResult(None, True, budget.used)
            depth += 1
        return SearchResult(None, False, budget.used)
    except SearchExhausted:
        return SearchResult(None, False, budget.used)


def find_nonuniversality_witness(
    net: Ocn,
    proc: Union[Process, Macrostate],
    mode: str = "shortest",
    budget: Optional[int] = None,
    node_budget: Optional[int] = None,
) -> Optional[tuple[str, ...]]:
    """A non-trace of ``proc`` or None when ``proc`` is universal.

    ``budget`` caps the witness length; raises SearchExhausted when the
    search could not conclude within the caps.
    """
    if mode not in ("shortest", "any"):
        raise ValueError("mode must be 'shortest' or 'any'")
    r = search_nonuniversality(net, proc, mode == "shortest", budget, node_budget)
    if r.witness is None and not r.conclusive:
        raise SearchExhausted(f"no witness of length <= {budget}; search inconclusive")
    return r.witness


def finite_vs_ocn_inclusion(
    finite: Ocn, s: str, net: Ocn, qn: Process, max_len: Optional[int] = None
) -> Optional[tuple[str, ...]]:
    """A trace of the finite system from ``s`` that ``qn`` cannot perform, or None.

    Search nodes pair the set of reachable finite states with a macrostate;
    a branch is cut when an ancestor has the same finite set and is covered.
    """
    if any(t.effect != 0 for t in finite.transitions):
        raise NetError(f"{finite.name} is not finite: it has non-zero effects")
    finite.check_state(s)
    for x in finite.alphabet:
        net.check_action(x)
    fin = {}
    for t in finite.transitions:
        fin.setdefault((t.src, t.action), set()).add(t.dst)

    def fstep(S, x):
        return frozenset(d for q in S for d in fin.get((q, x), ()))

    import sys

    sys.setrecursionlimit(max(sys.getrecursionlimit(), 10_000))
    start = (frozenset([s]), macrostate_of(net, [qn]))

    def dfs(node, word, ancestors, depth_left):
        if depth_left == 0:
            return None, True
        S, M = node
        cut = False
        for x in finite.alphabet:
            S2 = fstep(S, x)
            if not S2:
                continue
            M2 = macro_step(net, M, x)
            if is_bottom(M2):
                return word + (x,), cut
            if any(A[0] == S2 and covers(A[1], M2) for A in ancestors):
                continue
            ancestors.append((S2, M2))
            w, c = dfs((S2, M2), word + (x,), ancestors, None if depth_left is None else depth_left - 1)
            ancestors.pop()
            cut |= c
            if w is not None:
                return w, cut
        return None, cut

    depth = 1
    while max_len is None or depth <= max_len:
        w, cut = dfs(start, (), [start], depth)
        if w is not None:
            return w
        if not cut:
            return None
        depth += 1
    raise SearchExhausted(f"no witness of length <= {max_len}; search inconclusive")


# -- sequences ---------------------------------------------------------------


@dataclass(frozen=True)
class SequenceVerdict:
    good: bool
    controlled: bool
    good_pair: Optional[tuple[int, int]] = None


def control_function(f: Union[str, Callable[[int], int]]) -> Callable[[int], int]:
    """``"successor"``, ``"F<k>"`` (fast-growing level k) or a callable."""
    if callable(f):
        return f
    if f == "successor":
        return lambda i: i + 1
    if isinstance(f, str) and f.startswith("F") and f[1:].isdigit():
        from .reductions import fast_growing

        k = int(f[1:])
        return lambda i: fast_growing(k, i)
    raise ValueError(f"unknown control function {f!r}")


def check_sequence(seq: Sequence[Macrostate], t: int, f="successor") -> SequenceVerdict:
    """Good iff some earlier element is covered by a later one; controlled iff ``norm(x_i) < f(i + t)``.

    The all-bottom macrostate has no norm and never breaks control.
    """
    fn = control_function(f)
    pair = None
    for j in range(len(seq)):
        for i in range(j):
            if covers(seq[i], seq[j]):
                pair = (i, j)
                break
        if pair:
            break
    controlled = all(norm(x) is None or norm(x) < fn(i + t) for i, x in enumerate(seq))
    return SequenceVerdict(pair is not None, controlled, pair)
