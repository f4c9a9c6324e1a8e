"""Bag generation with a chart parser relaxed for unordered input.

Edges carry a bitset of the bag positions they cover instead of a string
span.  The fundamental rule combines an active and an inactive edge when
their leaf sets are disjoint; rules are invoked bottom-up from their first
daughter, and an agenda (FIFO by default) drives the process.  With a
compiled outer domain, every new inactive edge must pass the connectivity
test before it is admitted.
"""

from __future__ import annotations

import time
from collections import defaultdict, deque
from dataclasses import dataclass, field
from typing import Callable

from .domains import DomainSet
from .errors import BagError, InvariantError
from .fs import FeatureStructure
from .grammar import Bag, Grammar, Production, element_tags, require_connected
from .pruner import PruneContext, init_graph, test_wfss

LEXICAL = "lex"


@dataclass(eq=False)
class Edge:
    id: int
    rule: str
    fs: FeatureStructure
    """The sign for inactive edges; the whole rule instance for active ones."""
    leaves: int
    dot: int
    arity: int
    children: tuple[int, ...]
    words: tuple[str, ...]

    @property
    def inactive(self) -> bool:
        return self.dot == self.arity

    @property
    def sign(self) -> FeatureStructure:
        return self.fs if self.inactive else self.fs.get(("0",))

    @property
    def remaining(self) -> list[FeatureStructure]:
        if self.inactive:
            return []
        return [self.fs.get((str(i),)) for i in range(self.dot + 1, self.arity + 1)]

    @property
    def next_category(self) -> str | None:
        if self.inactive:
            return None
        return self.fs.value((str(self.dot + 1), "cat"))

    @property
    def text(self) -> str:
        return " ".join(self.words)

    @property
    def key(self) -> tuple:
        return self.rule, self.children


def _finish(rule: str, fs: FeatureStructure, leaves: int, dot: int, arity: int, children, words) -> Edge:
    if dot == arity:
        fs = fs.get(("0",))
    return Edge(-1, rule, fs, leaves, dot, arity, tuple(children), tuple(words))


def combine_edges(active: Edge, inactive: Edge) -> Edge | None:
    """Fundamental rule over disjoint leaf sets; the new edge has no id yet."""
    if active.leaves & inactive.leaves:
        return None
    if active.next_category != inactive.fs.category:
        return None
    fs = active.fs.unify_at((str(active.dot + 1),), inactive.fs)
    if fs is None:
        return None
    return _finish(
        active.rule,
        fs,
        active.leaves | inactive.leaves,
        active.dot + 1,
        active.arity,
        active.children + (inactive.id,),
        active.words + inactive.words,
    )


def invoke_rule(rule: Production, inactive: Edge) -> Edge | None:
    if rule.daughters[0].category != inactive.fs.category:
        return None
    fs = rule.fs.unify_at(("1",), inactive.fs)
    if fs is None:
        return None
    return _finish(rule.name, fs, inactive.leaves, 1, rule.arity, (inactive.id,), inactive.words)


def seed_chart(grammar: Grammar, bag: Bag) -> list[Edge]:
    edges = []
    for element in bag:
        if not element.signs:
            raise BagError(f"no consistent lexical entry for {element.word!r}")
        for sign in element.signs:
            edges.append(Edge(-1, LEXICAL, sign, 1 << element.position, 0, 0, (), (element.word,)))
    return edges


@dataclass
class GenStats:
    edges_total: int = 0
    edges_inactive: int = 0
    pruned: int = 0
    elapsed: float = 0.0

    def as_dict(self, timing: bool = True) -> dict:
        out = {
            "edges_total": self.edges_total,
            "edges_inactive": self.edges_inactive,
            "pruned": self.pruned,
        }
        if timing:
            out["elapsed_s"] = round(self.elapsed, 6)
        return out


@dataclass
class Derivation:
    string: str
    bracketed: str
    edge: Edge


@dataclass
class GenResult:
    strings: list[str]
    stats: GenStats
    derivations: list[Derivation]
    edges: list[Edge] = field(repr=False)

    def inactive_texts(self) -> set[str]:
        return {e.text for e in self.edges if e.inactive}


class Chart:
    def __init__(self, bag: Bag) -> None:
        self.bag = bag
        self.edges: list[Edge] = []
        self.inactive: dict[str, list[Edge]] = defaultdict(list)
        self.active: dict[str, list[Edge]] = defaultdict(list)
        self.keys: set[tuple] = set()
        self.stats = GenStats()

    def bracketed(self, edge: Edge) -> str:
        if edge.rule == LEXICAL:
            return edge.words[0]
        parts = [self.bracketed(self.edges[c]) for c in edge.children]
        return parts[0] if len(parts) == 1 else f"({' '.join(parts)})"


class Generator:
    def __init__(
        self,
        grammar: Grammar,
        bag: Bag,
        outer: DomainSet | None = None,
        *,
        first_solution: bool = False,
        agenda: str = "fifo",
        check_invariants: bool = True,
        trace: Callable[[str], None] | None = None,
    ) -> None:
        if len(bag) == 0:
            raise BagError("empty bag")
        require_connected(bag, grammar)
        if outer is not None and outer.grammar_hash and outer.grammar_hash != grammar.content_hash:
            from .errors import StaleCacheError

            raise StaleCacheError("outer domains were compiled for a different grammar")
        self.grammar = grammar
        self.bag = bag
        self.first_solution = first_solution
        self.lifo = agenda == "lifo"
        self.check_invariants = check_invariants
        self.pruner: PruneContext | None = None
        if outer is not None:
            self.pruner = init_graph(bag, outer, grammar.restrictor, trace)
        self.by_first: dict[str, list[Production]] = defaultdict(list)
        for rule in grammar.productions:
            self.by_first[rule.daughters[0].category].append(rule)
        tags = [element_tags(e, grammar) for e in bag]
        self._tag_adj = tuple(
            sum(1 << y for y in range(len(bag)) if y != x and tags[x] & tags[y]) for x in range(len(bag))
        )

    def _leaves_connected(self, leaves: int) -> bool:
        low = leaves & -leaves
        seen = frontier = low
        while frontier:
            bit = frontier & -frontier
            frontier ^= bit
            new = self._tag_adj[bit.bit_length() - 1] & leaves & ~seen
            seen |= new
            frontier |= new
        return seen == leaves

    def run(self) -> GenResult:
        t0 = time.perf_counter()
        chart = Chart(self.bag)
        agenda: deque[Edge] = deque()
        solutions: list[Edge] = []
        full = self.bag.full_mask
        start = self.grammar.start

        def admit(edge: Edge | None) -> bool:
            """Add a candidate edge; True once generation should stop."""
            if edge is None or edge.key in chart.keys and edge.rule != LEXICAL:
                return False
            if edge.inactive and self.pruner is not None and not test_wfss(self.pruner, edge.fs, edge.leaves):
                chart.stats.pruned += 1
                return False
            if edge.inactive and self.check_invariants and not self._leaves_connected(edge.leaves):
                raise InvariantError(f"edge {edge.text!r} covers an index-disconnected set of leaves")
            edge.id = len(chart.edges)
            chart.edges.append(edge)
            chart.keys.add(edge.key)
            chart.stats.edges_total += 1
            agenda.append(edge)
            if edge.inactive:
                chart.stats.edges_inactive += 1
                if edge.leaves == full and edge.fs.unifiable(start):
                    solutions.append(edge)
                    return self.first_solution
            return False

        done = False
        for edge in seed_chart(self.grammar, self.bag):
            if admit(edge):
                done = True
                break
        while agenda and not done:
            edge = agenda.pop() if self.lifo else agenda.popleft()
            if edge.inactive:
                cat = edge.fs.category
                chart.inactive[cat].append(edge)
                for active in list(chart.active.get(cat, ())):
                    if admit(combine_edges(active, edge)):
                        done = True
                        break
                if done:
                    break
                for rule in self.by_first.get(cat, ()):
                    if admit(invoke_rule(rule, edge)):
                        done = True
                        break
            else:
                cat = edge.next_category
                chart.active[cat].append(edge)
                for inactive in list(chart.inactive.get(cat, ())):
                    if admit(combine_edges(edge, inactive)):
                        done = True
                        break
        chart.stats.elapsed = time.perf_counter() - t0
        derivations = [Derivation(e.text, chart.bracketed(e), e) for e in solutions]
        strings = sorted({d.string for d in derivations})
        return GenResult(strings, chart.stats, derivations, chart.edges)


def generate(
    grammar: Grammar,
    bag: Bag,
    outer: DomainSet | None = None,
    **opts,
) -> GenResult:
    """Generate every ordering of ``bag`` licensed by ``grammar``.

    Passing ``outer`` turns on connectivity pruning of inactive edges.
    Keyword options go to :class:`Generator`.
    """
    return Generator(grammar, bag, outer, **opts).run()
