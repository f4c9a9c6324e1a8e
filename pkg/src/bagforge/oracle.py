"""Brute-force oracles used to cross-check the generator and the compiler.

``permutation_oracle`` parses every ordering of a bag with an ordinary
span-based parser.  ``derivation_oracle`` enumerates derivation trees
from the start sign and records, literally, which preterminals outside a
constituent share an index node with it.  Neither shares code with the
chart generator or the domain fixed point.
"""

from __future__ import annotations

from collections import defaultdict
from itertools import permutations

from .domains import DomainSet
from .errors import GuardError
from .fs import FeatureStructure, restrict
from .grammar import Bag, Grammar

MAX_ORACLE_BAG = 9
MAX_ORACLE_DEPTH = 6
_UNARY_LIMIT = 50


class OrderedParser:
    """Memoised exhaustive parser over sequences of bag positions."""

    def __init__(self, grammar: Grammar, bag: Bag) -> None:
        self.grammar = grammar
        self.bag = bag
        self.unary = [r for r in grammar.productions if r.arity == 1]
        self.nary = [r for r in grammar.productions if r.arity > 1]
        self._memo: dict[tuple[int, ...], tuple[FeatureStructure, ...]] = {}

    def signs(self, seq: tuple[int, ...]) -> tuple[FeatureStructure, ...]:
        hit = self._memo.get(seq)
        if hit is not None:
            return hit
        found: list[FeatureStructure] = []
        if len(seq) == 1:
            found.extend(self.bag[seq[0]].signs)
        else:
            for rule in self.nary:
                for fs in self._fill(rule.fs, 1, rule.arity, seq):
                    found.append(fs.get(("0",)))
        result = self._close(found)
        self._memo[seq] = result
        return result

    def _fill(self, fs: FeatureStructure, i: int, arity: int, seq: tuple[int, ...]):
        """Instances of a rule whose daughters i..arity exactly cover seq."""
        left = arity - i
        if left == 0:
            for sign in self.signs(seq):
                done = fs.unify_at((str(i),), sign)
                if done is not None:
                    yield done
            return
        want = fs.value((str(i), "cat"))
        for cut in range(1, len(seq) - left + 1):
            head = self.signs(seq[:cut])
            if not head:
                continue
            for sign in head:
                if sign.category != want:
                    continue
                step = fs.unify_at((str(i),), sign)
                if step is not None:
                    yield from self._fill(step, i + 1, arity, seq[cut:])

    def _close(self, found: list[FeatureStructure]) -> tuple[FeatureStructure, ...]:
        seen = list(dict.fromkeys(found))
        known = set(seen)
        frontier = list(seen)
        rounds = 0
        while frontier:
            rounds += 1
            if rounds > _UNARY_LIMIT:
                raise GuardError("unary rule closure does not terminate")
            new = []
            for sign in frontier:
                for rule in self.unary:
                    if rule.daughters[0].category != sign.category:
                        continue
                    fs = rule.fs.unify_at(("1",), sign)
                    if fs is not None:
                        mother = fs.get(("0",))
                        if mother not in known:
                            known.add(mother)
                            seen.append(mother)
                            new.append(mother)
            frontier = new
        return tuple(seen)


def permutation_oracle(grammar: Grammar, bag: Bag, start: FeatureStructure | None = None) -> set[str]:
    if len(bag) > MAX_ORACLE_BAG:
        raise GuardError(f"permutation oracle is limited to {MAX_ORACLE_BAG} elements")
    if len(bag) == 0:
        return set()
    start = grammar.start if start is None else start
    parser = OrderedParser(grammar, bag)
    out = set()
    for order in permutations(range(len(bag))):
        text = " ".join(bag[p].word for p in order)
        if text in out:
            continue
        if any(s.unifiable(start) for s in parser.signs(order)):
            out.add(text)
    return out


# -- derivation enumeration ------------------------------------------------


class _Tree:
    """A partial derivation: one structure holding every tree node.

    Node ``k`` lives under label ``n<k>``; ``info[k]`` records
    (rule position or None, depth, parent, preterminal flag, expanded).
    """

    __slots__ = ("fs", "info")

    def __init__(self, fs: FeatureStructure, info: tuple) -> None:
        self.fs = fs
        self.info = info


def derivation_oracle(grammar: Grammar, depth: int) -> DomainSet:
    """Outer-domain triples witnessed by derivations of at most ``depth`` levels."""
    if depth > MAX_ORACLE_DEPTH:
        raise GuardError(f"derivation oracle is limited to depth {MAX_ORACLE_DEPTH}")
    table: dict = defaultdict(set)
    if depth <= 0:
        return DomainSet("outer", {}, grammar.content_hash)
    rules = grammar.productions
    preterminal = set(grammar.preterminal_positions)
    abstract = {
        (r.name, i): restrict(r.fs.get((str(i),)), grammar.restrictor)
        for r in rules
        for i in range(1, r.arity + 1)
    }
    root = FeatureStructure().graft("n0", grammar.start)
    trees = [_Tree(root, ((None, 0, None, False, False),))]
    for tree in _expand_all(trees, rules, preterminal, depth):
        _record(tree, grammar, abstract, table)
    return DomainSet("outer", dict(table), grammar.content_hash)


def _expand_all(trees, rules, preterminal, depth):
    """Expand frontier nodes breadth-first; yield every finished tree."""
    stack = list(trees)
    while stack:
        tree = stack.pop()
        target = None
        for k, (pos, d, _, is_pre, expanded) in enumerate(tree.info):
            if not expanded and d < depth:
                target = k
                break
        if target is None:
            yield tree
            continue
        pos, d, parent, is_pre, _ = tree.info[target]
        label = f"n{target}"
        children = []
        for rule in rules:
            fs = tree.fs.unify_at((label,), rule.mother)
            if fs is None:
                continue
            # graft the whole rule, then tie its mother to the node
            base = len(tree.info)
            work = fs.graft("rule", rule.fs).unify_paths((label,), ("rule", "0"))
            if work is None:
                continue
            info = list(tree.info)
            info[target] = (pos, d, parent, is_pre, True)
            ok = True
            for i in range(1, rule.arity + 1):
                work = work.unify_paths((f"n{base + i - 1}",), ("rule", str(i)))
                if work is None:
                    ok = False
                    break
                info.append(((rule.name, i), d + 1, target, (rule.name, i) in preterminal, False))
            if not ok:
                continue
            work = _drop(work, "rule")
            children.append(_Tree(work, tuple(info)))
        info = list(tree.info)
        info[target] = (pos, d, parent, is_pre, True)
        if is_pre or not children:
            # a preterminal may stay a leaf; a node nothing expands stays as is
            stack.append(_Tree(tree.fs, tuple(info)))
        stack.extend(children)


def _drop(fs: FeatureStructure, label: str) -> FeatureStructure:
    return fs.project([(lab,) for lab in fs.labels() if lab != label])


def _record(tree: _Tree, grammar: Grammar, abstract, table) -> None:
    info = tree.info
    n = len(info)
    children = defaultdict(list)
    for k, (_, _, parent, _, _) in enumerate(info):
        if parent is not None:
            children[parent].append(k)
    leaves = [k for k in range(n) if info[k][3] and not children[k]]
    params = grammar.param_paths

    def subtree(k: int) -> set[int]:
        out, todo = set(), [k]
        while todo:
            x = todo.pop()
            out.add(x)
            todo.extend(children[x])
        return out

    for k in range(n):
        pos = info[k][0]
        if pos is None:
            continue
        inside = subtree(k)
        for leaf in leaves:
            if leaf in inside:
                continue
            binds = set()
            for p in params:
                a = tree.fs.node_at((f"n{k}",) + p)
                if a is None:
                    continue
                for q in params:
                    if a == tree.fs.node_at((f"n{leaf}",) + q):
                        binds.add((p, q))
            if binds:
                table[abstract[pos], abstract[info[leaf][0]]] |= binds
