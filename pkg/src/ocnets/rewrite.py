"""Witness rewriting: the five exponent-exchange rules and normalisation."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Iterator, NamedTuple, Optional

from .product import (
    Config,
    Decomposition,
    LoopType,
    Path,
    ProductGraph,
    decompose,
    is_sane,
    is_witness,
)

MAX_APPLICATIONS = 10**6


class RewriteError(ValueError):
    pass


class RuleName(enum.Enum):
    UUL = "UUL"
    UUR = "UUR"
    UD = "UD"
    DDL = "DDL"
    DDR = "DDR"

    def __str__(self):
        return self.value


PRIORITY = (RuleName.UUL, RuleName.UUR, RuleName.UD, RuleName.DDL, RuleName.DDR)


class RuleInstance(NamedTuple):
    rule: RuleName
    i: int
    j: int
    x: int
    y: int

    def __str__(self):
        return f"{self.rule}(i={self.i}, j={self.j}, x={self.x}, y={self.y})"


def minimal_multipliers(b0: int, b1: int) -> Optional[tuple[int, int]]:
    """Least positive ``(x, y)`` with ``b0 * x == b1 * y``, or None."""
    if b0 == 0 and b1 == 0:
        return 1, 1
    if b0 == 0 or b1 == 0 or (b0 > 0) != (b1 > 0):
        return None
    g = math.gcd(b0, b1)
    return abs(b1) // g, abs(b0) // g


def _conditions(rule: RuleName, dec: Decomposition, i: int, j: int, x: int, y: int) -> bool:
    L0, L1 = dec.blocks[i].loop, dec.blocks[j].loop
    l0, l1 = dec.blocks[i].count, dec.blocks[j].count
    t0, t1 = L0.loop_type, L1.loop_type
    s0, s1 = L0.slope, L1.slope
    mid = len(dec.between(i, j))
    b0, b1 = L0.effects[1], L1.effects[1]
    if rule is RuleName.UD:
        if b0 * x != -b1 * y:
            return False
    elif b0 * x != b1 * y:
        return False
    if rule is RuleName.UUL:
        return t0 is t1 is LoopType.UP and s0 >= s1 and l1 - y > 0
    if rule is RuleName.UUR:
        return t0 is t1 is LoopType.UP and s0 < s1 and l0 - x > mid + len(L1)
    if rule is RuleName.UD:
        return (
            t0 is LoopType.UP
            and t1 is LoopType.DOWN
            and s0 <= s1
            and l0 - x >= mid
            and l1 - y > 0
            and l0 - x > 0
        )
    if rule is RuleName.DDL:
        return t0 is t1 is LoopType.DOWN and s0 < s1 and l1 > len(L0) * x + 2 * mid and l1 - y > 0
    return t0 is t1 is LoopType.DOWN and s0 >= s1 and l0 - x > 0


def _multipliers(rule: RuleName, dec: Decomposition, i: int, j: int):
    b0 = dec.blocks[i].loop.effects[1]
    b1 = dec.blocks[j].loop.effects[1]
    return minimal_multipliers(b0, -b1 if rule is RuleName.UD else b1)


def _require_sane(path: Path, node_count: Optional[int]):
    if not is_sane(path, node_count):
        raise RewriteError(f"{path} is not sane")


def applicable_instances(path: Path, node_count: Optional[int] = None) -> list[RuleInstance]:
    """Instances with minimal multipliers, by leftmost loop pair then rule priority."""
    _require_sane(path, node_count)
    dec = decompose(path)
    out = []
    k = len(dec.blocks)
    for i in range(k):
        for j in range(i + 1, k):
            for rule in PRIORITY:
                xy = _multipliers(rule, dec, i, j)
                if xy and _conditions(rule, dec, i, j, *xy):
                    out.append(RuleInstance(rule, i, j, *xy))
    return out


def apply_rule(path: Path, inst: RuleInstance, node_count: Optional[int] = None) -> Path:
    """Rewrite the exponents of blocks ``i`` and ``j``; any admissible (x, y) is accepted."""
    _require_sane(path, node_count)
    dec = decompose(path)
    if not (0 <= inst.i < inst.j < len(dec.blocks)) or inst.x <= 0 or inst.y <= 0:
        raise RewriteError(f"{inst} does not fit the path")
    if not _conditions(inst.rule, dec, inst.i, inst.j, inst.x, inst.y):
        raise RewriteError(f"{inst} is not applicable")
    counts = list(dec.counts)
    sign0, sign1 = {
        RuleName.UUL: (1, -1),
        RuleName.UUR: (-1, 1),
        RuleName.UD: (-1, -1),
        RuleName.DDL: (1, -1),
        RuleName.DDR: (-1, 1),
    }[inst.rule]
    counts[inst.i] += sign0 * inst.x
    counts[inst.j] += sign1 * inst.y
    return dec.with_counts(counts).to_path()


def loop_order(dec: Decomposition) -> list[int]:
    """Block indices sorted ascending in a linear order compatible with all rules.

    Up loops: higher slope first, ties by position. Down loops: lower slope
    first, ties by reverse position. Other loops come last by position.
    """
    up = [i for i, b in enumerate(dec.blocks) if b.loop.loop_type is LoopType.UP]
    down = [i for i, b in enumerate(dec.blocks) if b.loop.loop_type is LoopType.DOWN]
    rest = [i for i, b in enumerate(dec.blocks) if i not in up and i not in down]
    up.sort(key=lambda i: (-dec.blocks[i].loop.slope, i))
    down.sort(key=lambda i: (dec.blocks[i].loop.slope, -i))
    return up + down + rest


def weight(path: Path) -> tuple[int, ...]:
    dec = decompose(path)
    order = loop_order(dec)
    return tuple(dec.blocks[i].count for i in reversed(order))


@dataclass
class RewriteStep:
    instance: RuleInstance
    path: Path
    weight: tuple[int, ...]


def normalize_steps(
    graph: ProductGraph, path: Path, start: Config, check: bool = True
) -> Iterator[RewriteStep]:
    """Apply the first applicable instance until none is left, yielding each step.

    With ``check`` every intermediate path is replayed as a witness.
    """
    n = len(graph)
    if check and not is_witness(graph, path, start):
        raise RewriteError("input is not a witness for the start configuration")
    w = weight(path)
    for _ in range(MAX_APPLICATIONS):
        insts = applicable_instances(path, n)
        if not insts:
            return
        path = apply_rule(path, insts[0], n)
        w2 = weight(path)
        if not w2 < w:
            raise AssertionError(f"weight did not decrease: {w} -> {w2}")
        w = w2
        if check and not is_witness(graph, path, start):
            raise AssertionError(f"{insts[0]} broke the witness")
        yield RewriteStep(insts[0], path, w)
    raise RuntimeError("rewriting did not terminate within the application cap")


def normalize(graph: ProductGraph, path: Path, start: Config) -> Path:
    out = path
    for st in normalize_steps(graph, path, start):
        out = st.path
    return out


def sanitize(graph: ProductGraph, path: Path, start: Config, max_rounds: int = 10_000) -> Path:
    """Turn a witness into a sane witness.

    Two blocks with equal loop effects are merged into one: into the earlier
    block when the loop does not decrease the left counter, into the later one
    otherwise. The result is cut to its shortest witness prefix.
    """
    pa, pb = start
    n = len(graph)
    for _ in range(max_rounds):
        if is_sane(path, n):
            return path
        dec = decompose(path)
        pair = _equal_effect_pair(dec)
        if pair is None:
            raise RewriteError(f"{path} has too many loop blocks")
        i, j = pair
        blocks = list(dec.blocks)
        keep, drop = (i, j) if blocks[i].loop.effects[0] >= 0 else (j, i)
        candidates = [_merge(dec, keep, drop), _merge(dec, drop, keep)]
        for cand in candidates:
            if is_witness(graph, cand, start):
                path = _shortest_prefix(graph, cand, start)
                break
        else:
            raise RewriteError("merging equal-effect loops lost the witness")
    raise RewriteError("sanitising did not converge")


def _equal_effect_pair(dec: Decomposition):
    seen = {}
    for j, b in enumerate(dec.blocks):
        i = seen.get(b.loop.effects)
        if i is not None:
            return i, j
        seen[b.loop.effects] = j
    return None


def _merge(dec: Decomposition, keep: int, drop: int) -> Path:
    """Move all iterations of block ``drop`` to block ``keep``, as whole copies of ``keep``'s loop."""
    counts = list(dec.counts)
    counts[keep] += counts[drop]
    counts[drop] = 0
    out = Path((), dec.blocks[0].prefix.source)
    for k, b in enumerate(dec.blocks):
        out = out + b.prefix + b.loop.path * counts[k]
    return out + dec.tail


def _shortest_prefix(graph, path, start):
    for k in range(len(path) + 1):
        if is_witness(graph, path[:k], start):
            return path[:k]
    raise AssertionError("unreachable: full path is a witness")


def reduce_witness(graph: ProductGraph, path: Path, start: Config) -> Path:
    """Sanitise then normalise a witness."""
    return normalize(graph, sanitize(graph, path, start), start)


class BoundViolation(NamedTuple):
    clause: int
    i: int
    j: int
    detail: str


def check_reduced_bounds(path: Path, node_count: int) -> list[BoundViolation]:
    """Check the five multiplicity bounds of reduced paths on every ordered block pair."""
    dec = decompose(path)
    V = node_count
    out = []
    for i in range(len(dec.blocks)):
        for j in range(i + 1, len(dec.blocks)):
            L0, L1 = dec.blocks[i].loop, dec.blocks[j].loop
            l0, l1 = dec.blocks[i].count, dec.blocks[j].count
            t0, t1, s0, s1 = L0.loop_type, L1.loop_type, L0.slope, L1.slope
            mid = len(dec.between(i, j))
            up0, up1 = t0 is LoopType.UP, t1 is LoopType.UP
            dn0, dn1 = t0 is LoopType.DOWN, t1 is LoopType.DOWN
            if up0 and up1 and s0 >= s1 and not l1 <= V:
                out.append(BoundViolation(1, i, j, f"l1={l1} > |V|={V}"))
            if up0 and up1 and s0 < s1 and not l0 <= mid + 2 * V:
                out.append(BoundViolation(2, i, j, f"l0={l0} > {mid + 2 * V}"))
            if dn0 and dn1 and s0 < s1 and not l1 < V * V + 2 * mid:
                out.append(BoundViolation(3, i, j, f"l1={l1} >= {V * V + 2 * mid}"))
            if dn0 and dn1 and s0 >= s1 and not l0 < V:
                out.append(BoundViolation(4, i, j, f"l0={l0} >= |V|={V}"))
            if up0 and dn1 and s0 <= s1 and not (l0 <= mid + V or l1 <= V):
                out.append(BoundViolation(5, i, j, f"l0={l0}, l1={l1}"))
    return out


__all__ = [
    "RuleName",
    "RuleInstance",
    "RewriteError",
    "RewriteStep",
    "applicable_instances",
    "apply_rule",
    "normalize",
    "normalize_steps",
    "sanitize",
    "reduce_witness",
    "weight",
    "loop_order",
    "check_reduced_bounds",
    "minimal_multipliers",
]
