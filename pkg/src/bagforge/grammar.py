"""Grammars, lexicons and bags, plus their line-oriented text formats."""

from __future__ import annotations

import hashlib
import re
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path as FilePath

from .errors import BagError, DisconnectedBagError, GrammarError, GrammarSyntaxError
from .fs import CAT, FeatureStructure, SignBuilder, _split_top, format_path, parse_path

_COMMENT_RE = re.compile(r"(^|\s)#(\s.*)?$")
_RULE_RE = re.compile(r"^rule\s+([\w\-']+)\s*:\s*(.+?)\s*->\s*(.+)$")
_LEX_RE = re.compile(r"^lex\s+(\S+)\s*:\s*(.+)$")


@dataclass(frozen=True)
class Production:
    """A rule ``mother -> daughters`` held as one structure.

    The mother sits under label ``"0"`` and daughter ``i`` (1-based) under
    ``str(i)``, so variables shared between them are ordinary reentrancies.
    """

    name: str
    fs: FeatureStructure
    arity: int

    @cached_property
    def mother(self) -> FeatureStructure:
        return self.fs.get(("0",))

    @cached_property
    def daughters(self) -> tuple[FeatureStructure, ...]:
        return tuple(self.fs.get((str(i),)) for i in range(1, self.arity + 1))

    def __str__(self) -> str:
        return f"rule {self.name}: {self.fs.to_text()}"


@dataclass(frozen=True)
class LexEntry:
    word: str
    sign: FeatureStructure
    slots: tuple[tuple[str, ...], ...]
    """Parameter paths in declaration order, one per distinct index node."""


@dataclass(frozen=True)
class Grammar:
    productions: tuple[Production, ...]
    lexicon: dict[str, tuple[LexEntry, ...]]
    start: FeatureStructure
    param_paths: tuple[tuple[str, ...], ...]
    restrictor: tuple[tuple[str, ...], ...]

    def __post_init__(self) -> None:
        if not self.productions:
            raise GrammarError("grammar has no rules")
        if not self.param_paths:
            raise GrammarError("grammar declares no param paths")
        if self.start.category is None:
            raise GrammarError("start sign has no category")
        if not any(p.mother.unifiable(self.start) for p in self.productions):
            raise GrammarError(f"start {self.start} matches no rule mother")

    @property
    def rules(self) -> dict[str, Production]:
        return {p.name: p for p in self.productions}

    @cached_property
    def lex_entries(self) -> tuple[LexEntry, ...]:
        return tuple(e for entries in self.lexicon.values() for e in entries)

    @cached_property
    def preterminal_positions(self) -> tuple[tuple[str, int], ...]:
        """(rule, daughter) positions whose daughter unifies with a lexical entry."""
        out = []
        for p in self.productions:
            for i, d in enumerate(p.daughters, 1):
                if any(d.unifiable(e.sign) for e in self.lex_entries):
                    out.append((p.name, i))
        return tuple(out)

    @cached_property
    def nonterminals(self) -> frozenset[str]:
        return frozenset(p.mother.category for p in self.productions)

    @cached_property
    def preterminals(self) -> frozenset[str]:
        rules = self.rules
        return frozenset(rules[r].daughters[i - 1].category for r, i in self.preterminal_positions)

    def with_start(self, start: FeatureStructure | str) -> "Grammar":
        if isinstance(start, str):
            start = _parse_start(start)
        return Grammar(self.productions, self.lexicon, start, self.param_paths, self.restrictor)

    def canonical_text(self) -> str:
        """Start-independent normal form, used for the cache hash."""
        lines = ["param " + " ".join(format_path(p) for p in self.param_paths)]
        lines.append("restrict " + " ".join(format_path(p) for p in self.restrictor))
        lines += [str(p) for p in self.productions]
        for e in self.lex_entries:
            slots = " ".join(format_path(s) for s in e.slots)
            lines.append(f"lex {e.word}: {e.sign.to_text()} / {slots}")
        return "\n".join(lines) + "\n"

    @cached_property
    def content_hash(self) -> str:
        return hashlib.sha256(self.canonical_text().encode()).hexdigest()[:16]


def _parse_start(text: str) -> FeatureStructure:
    builder = SignBuilder()
    builder.add_sign(text)
    return builder.build()


def _split_signs(text: str) -> list[str]:
    """Split ``A[x=1] B C[y=#2]`` on whitespace outside brackets."""
    out, depth, cur = [], 0, []
    for ch in text:
        if ch == "[":
            depth += 1
        elif ch == "]":
            depth -= 1
            if depth < 0:
                raise ValueError("unbalanced ']'")
        if ch.isspace() and depth == 0:
            if cur:
                out.append("".join(cur))
                cur = []
            continue
        cur.append(ch)
    if depth != 0:
        raise ValueError("unbalanced '['")
    if cur:
        out.append("".join(cur))
    # tolerate "Cat [ ... ]" by gluing a bare bracket group onto its head
    merged: list[str] = []
    for item in out:
        if item.startswith("[") and merged:
            merged[-1] += item
        else:
            merged.append(item)
    return merged


def _declared_paths(sign_text: str) -> list[tuple[str, ...]]:
    if "[" not in sign_text:
        return []
    body = sign_text[sign_text.index("[") + 1 : sign_text.rindex("]")]
    return [parse_path(item.split("=", 1)[0]) for item in _split_top(body) if "=" in item]


def parse_grammar(text: str) -> Grammar:
    params: list[tuple[str, ...]] = []
    restrict: list[tuple[str, ...]] = []
    start = None
    productions: list[Production] = []
    lexicon: dict[str, list[LexEntry]] = {}
    raw_lex: list[tuple[int, str, str]] = []
    seen_rules: set[str] = set()

    for lineno, raw in enumerate(text.splitlines(), 1):
        line = _COMMENT_RE.sub("", raw).strip()
        if not line:
            continue
        keyword = line.split(None, 1)[0]
        try:
            if keyword == "param":
                params += [parse_path(p) for p in line.split()[1:]]
            elif keyword == "restrict":
                restrict += [parse_path(p) for p in line.split()[1:]]
            elif keyword == "start":
                start = _parse_start(line[len("start"):].strip())
            elif keyword == "rule":
                m = _RULE_RE.match(line)
                if m is None:
                    raise ValueError("expected 'rule NAME: Mother -> Daughter ...'")
                name, mother, rhs = m.groups()
                if name in seen_rules:
                    raise ValueError(f"duplicate rule name {name!r}")
                seen_rules.add(name)
                daughters = _split_signs(rhs)
                if not daughters:
                    raise ValueError("rule has no daughters")
                builder = SignBuilder()
                builder.add_sign(mother, ("0",))
                for i, d in enumerate(daughters, 1):
                    builder.add_sign(d, (str(i),))
                fs = builder.build()
                for i in range(len(daughters) + 1):
                    if fs.get((str(i),)).category is None:
                        raise ValueError(f"rule position {i} has no category")
                productions.append(Production(name, fs, len(daughters)))
            elif keyword == "lex":
                m = _LEX_RE.match(line)
                if m is None:
                    raise ValueError("expected 'lex WORD: Sign'")
                raw_lex.append((lineno, m.group(1), m.group(2)))
            else:
                raise ValueError(f"unknown directive {keyword!r}")
        except ValueError as exc:
            raise GrammarSyntaxError(str(exc), lineno) from None

    if start is None:
        start = _parse_start("S")
    param_set = set(params)
    for lineno, word, sign_text in raw_lex:
        try:
            sign = _parse_start(sign_text)
        except ValueError as exc:
            raise GrammarSyntaxError(str(exc), lineno) from None
        if sign.category is None:
            raise GrammarSyntaxError("lexical sign has no category", lineno)
        order = [p for p in _declared_paths(sign_text) if p in param_set]
        order += [p for p in params if p not in order]
        slots, nodes = [], set()
        for p in order:
            node = sign.node_at(p)
            if node is not None and node not in nodes:
                nodes.add(node)
                slots.append(p)
        lexicon.setdefault(word, []).append(LexEntry(word, sign, tuple(slots)))

    restrictor = [CAT] + [p for p in restrict if p != CAT]
    restrictor += [p for p in params if p not in restrictor]
    return Grammar(
        tuple(productions),
        {w: tuple(es) for w, es in lexicon.items()},
        start,
        tuple(dict.fromkeys(params)),
        tuple(dict.fromkeys(restrictor)),
    )


def load_grammar(path: str | FilePath) -> Grammar:
    return parse_grammar(_read(path))


# -- bags ------------------------------------------------------------


@dataclass(frozen=True)
class BagElement:
    position: int
    word: str
    args: tuple[str, ...]
    signs: tuple[FeatureStructure, ...] = field(compare=False)
    """One instantiated sign per index-consistent lexical entry."""

    @property
    def sign(self) -> FeatureStructure:
        return self.signs[0]

    def __str__(self) -> str:
        return " ".join((self.word, *self.args))


@dataclass(frozen=True)
class Bag:
    elements: tuple[BagElement, ...] = ()

    def __len__(self) -> int:
        return len(self.elements)

    def __iter__(self):
        return iter(self.elements)

    def __getitem__(self, i: int) -> BagElement:
        return self.elements[i]

    @property
    def words(self) -> list[str]:
        return [e.word for e in self.elements]

    @property
    def full_mask(self) -> int:
        return (1 << len(self.elements)) - 1

    def label(self, position: int) -> str:
        e = self.elements[position]
        return f"{e.word}{'_' + ','.join(e.args) if e.args else ''}"


def _instantiate(entry: LexEntry, args: tuple[str, ...]) -> FeatureStructure | None:
    if any("=" in a for a in args):
        pairs = []
        for a in args:
            path_text, _, tag = a.partition("=")
            pairs.append((parse_path(path_text), tag))
    else:
        if len(args) != len(entry.slots):
            return None
        pairs = list(zip(entry.slots, args))
    sign = entry.sign
    for path, tag in pairs:
        if not sign.has_path(path):
            return None
        sign = sign.unify_at(path, FeatureStructure.var(tag))
        if sign is None:
            return None
    for slot in entry.slots:
        if sign.value(slot) is None:
            return None
    return sign


def parse_bag(text: str, grammar: Grammar) -> Bag:
    elements = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = _COMMENT_RE.sub("", raw).strip()
        if not line:
            continue
        word, *args = line.split()
        entries = grammar.lexicon.get(word)
        if not entries:
            raise BagError(f"line {lineno}: unknown word {word!r}")
        explicit = [a for a in args if "=" in a]
        if explicit and len(explicit) != len(args):
            raise BagError(f"line {lineno}: mix of positional and path=tag arguments")
        try:
            for a in explicit:
                path = parse_path(a.partition("=")[0])
                if not any(e.sign.has_path(path) for e in entries):
                    raise BagError(f"line {lineno}: {word!r} has no path {format_path(path)}")
            signs = tuple(s for e in entries if (s := _instantiate(e, tuple(args))) is not None)
        except ValueError as exc:
            raise BagError(f"line {lineno}: {exc}") from None
        if not signs:
            raise BagError(f"line {lineno}: no lexical entry for {word!r} is consistent with {' '.join(args)!r}")
        elements.append(BagElement(len(elements), word, tuple(args), signs))
    return Bag(tuple(elements))


def load_bag(path: str | FilePath, grammar: Grammar) -> Bag:
    return parse_bag(_read(path), grammar)


def print_bag(bag: Bag) -> str:
    return "".join(f"{e}\n" for e in bag)


def element_tags(element: BagElement, grammar: Grammar) -> frozenset[str]:
    tags = set()
    for sign in element.signs:
        for path in grammar.param_paths:
            tag = sign.value(path)
            if tag is not None and sign.kind_at(path) == 1:
                tags.add(tag)
    return frozenset(tags)


def bag_components(bag: Bag, grammar: Grammar) -> list[list[int]]:
    """Components of the shared-index graph over bag positions."""
    tags = [element_tags(e, grammar) for e in bag]
    seen: set[int] = set()
    comps = []
    for start in range(len(bag)):
        if start in seen:
            continue
        comp, frontier = [], [start]
        seen.add(start)
        while frontier:
            x = frontier.pop()
            comp.append(x)
            for y in range(len(bag)):
                if y not in seen and tags[x] & tags[y]:
                    seen.add(y)
                    frontier.append(y)
        comps.append(sorted(comp))
    return comps


def bag_connected(bag: Bag, grammar: Grammar) -> bool:
    return len(bag_components(bag, grammar)) <= 1


def require_connected(bag: Bag, grammar: Grammar) -> None:
    comps = bag_components(bag, grammar)
    if len(comps) > 1:
        raise DisconnectedBagError([[bag.label(p) for p in c] for c in comps])


def _read(path: str | FilePath) -> str:
    from . import data

    return data.read_text(path)
