"""Synchronised product of two nets, product paths, loops and decompositions."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Iterable, NamedTuple, Optional, Union

from .net import NetError, Ocn, Process, classify_net

Node = tuple[str, str]
Slope = Union[Fraction, float]


class ProductEdge(NamedTuple):
    src: Node
    action: str
    effect_a: int
    effect_b: int
    dst: Node

    def __str__(self):
        return f"{self.action}"


class Summary(NamedTuple):
    """Effects, guards and length of a path; enough to decide replayability."""

    effect_a: int = 0
    effect_b: int = 0
    guard_a: int = 0
    guard_b: int = 0
    length: int = 0

    def then(self, other: "Summary") -> "Summary":
        return Summary(
            self.effect_a + other.effect_a,
            self.effect_b + other.effect_b,
            max(self.guard_a, other.guard_a - self.effect_a),
            max(self.guard_b, other.guard_b - self.effect_b),
            self.length + other.length,
        )

    def power(self, k: int) -> "Summary":
        if k < 0:
            raise ValueError("negative repetition")
        if k == 0:
            return Summary()
        return Summary(
            self.effect_a * k,
            self.effect_b * k,
            self.guard_a + (k - 1) * max(0, -self.effect_a),
            self.guard_b + (k - 1) * max(0, -self.effect_b),
            self.length * k,
        )

    @classmethod
    def of_edge(cls, e: ProductEdge) -> "Summary":
        return cls(e.effect_a, e.effect_b, max(0, -e.effect_a), max(0, -e.effect_b), 1)


def chain(*parts: Summary) -> Summary:
    out = Summary()
    for p in parts:
        out = out.then(p)
    return out


class Path:
    """A sequence of chained product edges with cached effects and guards.

    The empty path carries its node explicitly through ``at``.
    """

    def __init__(self, edges: Iterable[ProductEdge] = (), at: Optional[Node] = None):
        self.edges = tuple(edges)
        for x, y in zip(self.edges, self.edges[1:]):
            if x.dst != y.src:
                raise ValueError(f"edges {x} and {y} do not chain")
        if self.edges:
            at = self.edges[0].src
        self.at = at

    @property
    def source(self) -> Optional[Node]:
        return self.at

    @property
    def target(self) -> Optional[Node]:
        return self.edges[-1].dst if self.edges else self.at

    @cached_property
    def summary(self) -> Summary:
        s = Summary()
        for e in self.edges:
            s = s.then(Summary.of_edge(e))
        return s

    effect_a = property(lambda self: self.summary.effect_a)
    effect_b = property(lambda self: self.summary.effect_b)
    guard_a = property(lambda self: self.summary.guard_a)
    guard_b = property(lambda self: self.summary.guard_b)

    @property
    def word(self) -> tuple[str, ...]:
        return tuple(e.action for e in self.edges)

    def __len__(self):
        return len(self.edges)

    def __iter__(self):
        return iter(self.edges)

    def __getitem__(self, item):
        if isinstance(item, slice):
            edges = self.edges[item]
            if edges:
                return Path(edges)
            start = item.start or 0
            at = self.edges[start].src if start < len(self.edges) else self.target
            return Path((), at)
        return self.edges[item]

    def __add__(self, other: "Path") -> "Path":
        if self.edges and other.edges and self.target != other.source:
            raise ValueError("paths do not chain")
        return Path(self.edges + other.edges, self.at if self.at is not None else other.at)

    def __mul__(self, k: int) -> "Path":
        return Path(self.edges * k, self.at)

    def __eq__(self, other):
        return isinstance(other, Path) and self.edges == other.edges and self.at == other.at

    def __hash__(self):
        return hash((self.edges, self.at))

    def __repr__(self):
        return f"Path({' '.join(self.word) or 'eps'} @ {self.at})"


class LoopType(enum.Enum):
    DOWN = "(<,<)"
    UP = "(>,>=)"
    FLAT = "(<=,>=)"
    DRAIN = "(>=,<)"

    def __str__(self):
        return self.value


def loop_type(effect_a: int, effect_b: int) -> LoopType:
    if effect_b < 0:
        return LoopType.DOWN if effect_a < 0 else LoopType.DRAIN
    return LoopType.UP if effect_a > 0 else LoopType.FLAT


def slope(effect_a: int, effect_b: int) -> Slope:
    """``effect_a / effect_b`` with n/0 = +inf, 0/0 = 0 and -n/0 = -inf."""
    if effect_b == 0:
        if effect_a == 0:
            return Fraction(0)
        return math.inf if effect_a > 0 else -math.inf
    return Fraction(effect_a, effect_b)


@dataclass(frozen=True)
class Loop:
    path: Path

    def __post_init__(self):
        p = self.path
        if not p.edges or p.source != p.target:
            raise ValueError(f"{p} is not a cycle")
        nodes = [e.src for e in p.edges]
        if len(set(nodes)) != len(nodes):
            raise ValueError(f"{p} has a proper sub-cycle")

    @property
    def anchor(self) -> Node:
        return self.path.source

    @property
    def effects(self) -> tuple[int, int]:
        return self.path.effect_a, self.path.effect_b

    @property
    def slope(self) -> Slope:
        return slope(*self.effects)

    @property
    def loop_type(self) -> LoopType:
        return loop_type(*self.effects)

    def __len__(self):
        return len(self.path)

    def __repr__(self):
        return f"Loop({' '.join(self.path.word)} @ {self.anchor}, {self.effects})"


def classify_loop(loop: Loop) -> tuple[Slope, LoopType]:
    return loop.slope, loop.loop_type


class ProductGraph:
    """Nodes ``Q_A x Q_B`` (A-major order) and synchronised edges."""

    def __init__(self, a: Ocn, b: Ocn):
        self.a = a
        self.b = b
        self.nodes: tuple[Node, ...] = tuple((p, q) for p in a.states for q in b.states)
        edges = []
        for p in a.states:
            for q in b.states:
                for act in a.alphabet:
                    for ta in a.outgoing(p, act):
                        for tb in b.outgoing(q, act):
                            edges.append(ProductEdge((p, q), act, ta.effect, tb.effect, (ta.dst, tb.dst)))
        self.edges: tuple[ProductEdge, ...] = tuple(edges)
        out: dict[Node, list[ProductEdge]] = {v: [] for v in self.nodes}
        for e in edges:
            out[e.src].append(e)
        self.out = {v: tuple(es) for v, es in out.items()}
        self.edge_index = {e: i for i, e in enumerate(edges)}

    @cached_property
    def kinds(self):
        return classify_net(self.a), classify_net(self.b)

    def __len__(self):
        return len(self.nodes)

    def check_node(self, node: Node):
        if node not in self.out:
            raise NetError(f"{node} is not a product node")

    def path_from_word(self, start: Node, word: Iterable[str]) -> Path:
        """Lift a word to the product path it induces (needs both nets deterministic)."""
        self.check_node(start)
        v, edges = start, []
        for act in word:
            cands = [e for e in self.out[v] if e.action == act]
            if len(cands) != 1:
                raise NetError(f"word does not induce a unique product path at {v} on {act!r}")
            edges.append(cands[0])
            v = cands[0].dst
        return Path(edges, start)


def build_product(a: Ocn, b: Ocn) -> ProductGraph:
    if set(a.alphabet) != set(b.alphabet):
        raise NetError(f"alphabets differ: {a.alphabet} vs {b.alphabet}")
    return ProductGraph(a, b)


Config = tuple[Process, Process]


def replay(graph: ProductGraph, path: Path, start: Config) -> Optional[Config]:
    pa, pb = start
    node = (pa.state, pb.state)
    graph.check_node(node)
    if path.source is not None and path.source != node:
        raise NetError(f"path starts at {path.source}, configuration is at {node}")
    if path.guard_a > pa.counter or path.guard_b > pb.counter:
        return None
    tgt = path.target if path.target is not None else node
    return Process(tgt[0], pa.counter + path.effect_a), Process(tgt[1], pb.counter + path.effect_b)


def distinguishing_actions(graph: ProductGraph, end: Config) -> list[str]:
    """Actions the A-process can take but the B-process cannot."""
    pa, pb = end
    out = []
    for act in graph.a.alphabet:
        a_ok = any(pa.counter + t.effect >= 0 for t in graph.a.outgoing(pa.state, act))
        b_ok = any(pb.counter + t.effect >= 0 for t in graph.b.outgoing(pb.state, act))
        if a_ok and not b_ok:
            out.append(act)
    return out


def _check_witness_pre(graph: ProductGraph):
    ka, kb = graph.kinds
    if not ka.deterministic:
        raise NetError("left net must be deterministic")
    if not kb.complete:
        raise NetError("right net must be complete")


def is_witness(graph: ProductGraph, path: Path, start: Config) -> bool:
    _check_witness_pre(graph)
    end = replay(graph, path, start)
    return end is not None and bool(distinguishing_actions(graph, end))


def enumerate_loops(graph: ProductGraph) -> list[Loop]:
    """All simple cycles, once per anchor node, in a deterministic order."""
    loops = []
    for v in graph.nodes:
        stack = [(v, (), frozenset([v]))]
        found = []
        while stack:
            u, edges, seen = stack.pop()
            for e in reversed(graph.out[u]):
                if e.dst == v:
                    found.append(edges + (e,))
                elif e.dst not in seen:
                    stack.append((e.dst, edges + (e,), seen | {e.dst}))
        found.sort(key=lambda es: (len(es), [graph.edge_index[e] for e in es]))
        loops.extend(Loop(Path(es)) for es in found)
    return loops


class Block(NamedTuple):
    prefix: Path
    loop: Loop
    count: int


@dataclass(frozen=True)
class Decomposition:
    blocks: tuple[Block, ...]
    tail: Path

    def to_path(self) -> Path:
        out = Path((), self.blocks[0].prefix.source if self.blocks else self.tail.source)
        for blk in self.blocks:
            out = out + blk.prefix + blk.loop.path * blk.count
        return out + self.tail

    def with_counts(self, counts) -> "Decomposition":
        return Decomposition(
            tuple(Block(b.prefix, b.loop, k) for b, k in zip(self.blocks, counts)), self.tail
        )

    @property
    def counts(self) -> tuple[int, ...]:
        return tuple(b.count for b in self.blocks)

    @property
    def loops(self) -> tuple[Loop, ...]:
        return tuple(b.loop for b in self.blocks)

    def between(self, i: int, j: int) -> Path:
        """The path strictly between block ``i``'s loops and block ``j``'s loops."""
        start = self.blocks[i].loop.anchor
        out = Path((), start)
        for blk in self.blocks[i + 1 : j]:
            out = out + blk.prefix + blk.loop.path * blk.count
        if j < len(self.blocks):
            return out + self.blocks[j].prefix
        return out + self.tail


def decompose(path: Path) -> Decomposition:
    edges = path.edges
    blocks = []
    seg: list = []
    seg_nodes = [path.source]
    i = 0
    while i < len(edges):
        e = edges[i]
        seg.append(e)
        i += 1
        if e.dst in seg_nodes:
            k = seg_nodes.index(e.dst)
            loop_edges = tuple(seg[k:])
            prefix = Path(tuple(seg[:k]), seg_nodes[0])
            count = 1
            n = len(loop_edges)
            while edges[i : i + n] == loop_edges:
                count += 1
                i += n
            blocks.append(Block(prefix, Loop(Path(loop_edges)), count))
            seg, seg_nodes = [], [e.dst]
        else:
            seg_nodes.append(e.dst)
    return Decomposition(tuple(blocks), Path(tuple(seg), seg_nodes[0]))


def sane_block_limit(node_count: int) -> int:
    return (2 * node_count + 1) ** 2


def is_sane(path: Path, node_count: Optional[int] = None) -> bool:
    """At most F0 loop blocks and pairwise different loop effects.

    Without ``node_count`` only the effect condition is checked.
    """
    dec = decompose(path)
    if node_count is not None and len(dec.blocks) > sane_block_limit(node_count):
        return False
    effects = [b.loop.effects for b in dec.blocks]
    return len(set(effects)) == len(effects)


def shrink_to_prefix_witness(
    graph: ProductGraph, path: Path, start: Config, counter_a: int, counter_b: int
) -> Path:
    """Shortest prefix of ``path`` that is a witness for the shifted counters."""
    pa, pb = start
    if counter_a < pa.counter or counter_b > pb.counter:
        raise ValueError("need counter_a >= m and counter_b <= n")
    if not is_witness(graph, path, start):
        raise ValueError("path is not a witness for the start configuration")
    shifted = (Process(pa.state, counter_a), Process(pb.state, counter_b))
    for k in range(len(path) + 1):
        pre = path[:k]
        if is_witness(graph, pre, shifted):
            return pre
    raise AssertionError("no prefix witness; monotonicity violated")
