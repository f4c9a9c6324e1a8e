"""Connectivity pruning of candidate constituents.

Before generation the bag's lexical signs are linked pairwise whenever one
lies in the outer domain of the other.  A candidate constituent is then
checked by removing its leaves from that graph, adding a node for the
constituent itself, linking it to every remaining element in its outer
domain, and asking whether the result is still connected.  A constituent
that disconnects the graph can never be part of a complete sentence.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Callable, Hashable, Iterable

from .domains import DomainSet
from .errors import DisconnectedBagError
from .fs import CAT, FeatureStructure
from .grammar import Bag

WFSS = "wfss"
"""Graph node standing for the constituent under test."""


@dataclass(frozen=True)
class ConnGraph:
    nodes: frozenset
    edges: frozenset  # of frozenset({x, y})

    def connected(self) -> bool:
        return is_connected(self.nodes, self.edges)


@dataclass
class PruneContext:
    bag: Bag
    outer: DomainSet
    lex_adjacency: tuple[int, ...]
    """Bitmask of neighbouring positions, one per bag position."""
    restrictor: tuple = (CAT,)
    trace: Callable[[str], None] | None = None
    _wfss_masks: dict = field(default_factory=dict, repr=False)

    def related(self, sign: FeatureStructure, position: int) -> bool:
        for lex in self.bag[position].signs:
            if self.outer.related(sign, lex) or self.outer.related(lex, sign):
                return True
        return False

    def wfss_mask(self, sign: FeatureStructure) -> int:
        mask = self._wfss_masks.get(sign)
        if mask is None:
            mask = 0
            for y in range(len(self.bag)):
                if self.related(sign, y):
                    mask |= 1 << y
            self._wfss_masks[sign] = mask
        return mask


def is_connected(nodes: Iterable[Hashable], edges: Iterable[Iterable[Hashable]]) -> bool:
    nodes = set(nodes)
    if not nodes:
        return True
    adjacency: dict = {n: set() for n in nodes}
    for edge in edges:
        x, y = tuple(edge)
        adjacency[x].add(y)
        adjacency[y].add(x)
    start = next(iter(nodes))
    seen = {start}
    queue = deque([start])
    while queue:
        for y in adjacency[queue.popleft()]:
            if y not in seen:
                seen.add(y)
                queue.append(y)
    return len(seen) == len(nodes)


def _components(n: int, adjacency: tuple[int, ...]) -> list[list[int]]:
    left = (1 << n) - 1
    comps = []
    while left:
        low = left & -left
        seen = frontier = low
        while frontier:
            bit = frontier & -frontier
            frontier ^= bit
            new = adjacency[bit.bit_length() - 1] & ~seen
            seen |= new
            frontier |= new
        comps.append([i for i in range(n) if seen >> i & 1])
        left &= ~seen
    return comps


def init_graph(
    bag: Bag,
    outer: DomainSet,
    restrictor: tuple = (CAT,),
    trace: Callable[[str], None] | None = None,
) -> PruneContext:
    n = len(bag)
    adjacency = [0] * n
    for x in range(n):
        for y in range(x + 1, n):
            if any(
                outer.related(a, b) or outer.related(b, a) for a in bag[x].signs for b in bag[y].signs
            ):
                adjacency[x] |= 1 << y
                adjacency[y] |= 1 << x
    ctx = PruneContext(bag, outer, tuple(adjacency), tuple(restrictor), trace)
    comps = _components(n, ctx.lex_adjacency)
    if len(comps) > 1:
        raise DisconnectedBagError([[bag.label(p) for p in c] for c in comps])
    return ctx


def initial_graph(ctx: PruneContext) -> ConnGraph:
    n = len(ctx.bag)
    edges = {
        frozenset((x, y)) for x in range(n) for y in range(x + 1, n) if ctx.lex_adjacency[x] >> y & 1
    }
    return ConnGraph(frozenset(range(n)), frozenset(edges))


def update_graph(ctx: PruneContext, sign: FeatureStructure, leaves: int) -> ConnGraph:
    """Delete the leaves, add the constituent node, link it to its outer domain."""
    survivors = [p for p in range(len(ctx.bag)) if not leaves >> p & 1]
    edges = {
        frozenset((x, y)) for x in survivors for y in survivors if x < y and ctx.lex_adjacency[x] >> y & 1
    }
    edges |= {frozenset((WFSS, y)) for y in survivors if ctx.related(sign, y)}
    return ConnGraph(frozenset([WFSS, *survivors]), frozenset(edges))


def test_wfss(ctx: PruneContext, sign: FeatureStructure, leaves: int) -> bool:
    """Accept iff the updated graph stays connected."""
    rest = ctx.bag.full_mask & ~leaves
    if not rest:
        ok = True
    else:
        adjacency = ctx.lex_adjacency
        seen = frontier = ctx.wfss_mask(sign) & rest
        while frontier:
            bit = frontier & -frontier
            frontier ^= bit
            new = adjacency[bit.bit_length() - 1] & rest & ~seen
            seen |= new
            frontier |= new
        ok = seen == rest
    if ctx.trace is not None:
        bits = "".join("1" if leaves >> p & 1 else "0" for p in range(len(ctx.bag)))
        shown = sign.project(ctx.restrictor).to_text()
        ctx.trace(f"TEST {shown} leaves={bits} -> {'accept' if ok else 'reject'}")
    return ok


test_wfss.__test__ = False  # not a pytest test despite the name
