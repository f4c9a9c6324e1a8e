"""Offline compilation of inner and outer domains.

Both domains are sets of ``(sign, lex, binds)`` triples over abstract
signs (rule positions seen through the grammar's restrictor).  ``binds``
holds pairs of connectivity paths ``(sign_path, lex_path)`` that can be
token-identical in some derivation.

Inner domains are a least fixed point in the style of FIRST sets: a
preterminal contains itself, and a rule mother absorbs the inner domain of
each daughter.  Outer domains are the FOLLOW-style companion: a daughter
absorbs the inner domains of its sisters and the outer domain of its
mother.  In every step a bind pair is carried across a rule only when the
rule makes the two paths token-identical (directly or through a shared
prefix); pairs without such an identity are dropped, and triples left
with no pairs are discarded.
"""

from __future__ import annotations

import io
from collections import defaultdict
from dataclasses import dataclass
from functools import lru_cache
from typing import IO, Iterable

from .errors import CacheError, StaleCacheError
from .fs import AbstractSign, FeatureStructure, format_path, parse_path, restrict
from .grammar import Grammar

FORMAT_VERSION = "v1"
MAGIC = "bagforge-domains"

Pair = tuple  # (sign_path, lex_path)


def _pair_key(pair: Pair) -> tuple[str, str]:
    return format_path(pair[0]), format_path(pair[1])


def format_binds(binds: Iterable[Pair]) -> str:
    return ", ".join(f"{s}~{l}" for s, l in sorted(map(_pair_key, binds)))


@lru_cache(maxsize=None)
def _abstract_fs(sign: AbstractSign) -> FeatureStructure:
    return sign.to_fs()


@dataclass(frozen=True)
class DomainTriple:
    sign: AbstractSign
    lex: AbstractSign
    binds: frozenset

    def line(self, kind: str) -> str:
        return f"{kind} {self.sign} :: {self.lex} :: {format_binds(self.binds)}"


class DomainSet:
    """Inner or outer domain: triples keyed by (sign, lex), binds merged."""

    def __init__(self, kind: str, table: dict, grammar_hash: str = "") -> None:
        if kind not in ("inner", "outer"):
            raise ValueError(f"unknown domain kind {kind!r}")
        self.kind = kind
        self.grammar_hash = grammar_hash
        self._table = {key: frozenset(binds) for key, binds in table.items() if binds}
        self._by_category: dict[str, list[DomainTriple]] = defaultdict(list)
        for triple in self.triples:
            self._by_category[triple.sign.category].append(triple)
        self._related: dict = {}

    @property
    def triples(self) -> list[DomainTriple]:
        return [DomainTriple(s, l, b) for (s, l), b in sorted(self._table.items())]

    def __len__(self) -> int:
        return len(self._table)

    def __eq__(self, other) -> bool:
        return isinstance(other, DomainSet) and (self.kind, self._table) == (other.kind, other._table)

    def __repr__(self) -> str:
        return f"DomainSet({self.kind}, {len(self)} triples)"

    def binds(self, sign: AbstractSign, lex: AbstractSign) -> frozenset:
        return self._table.get((sign, lex), frozenset())

    def for_category(self, category: str) -> list[DomainTriple]:
        return list(self._by_category.get(category, ()))

    def lines(self) -> list[str]:
        return sorted(t.line(self.kind) for t in self.triples)

    def category_lines(self, category: str | None = None) -> list[str]:
        """One line per (sign category, lex category, bind pair), deduplicated."""
        out = set()
        for t in self.triples:
            if category is not None and t.sign.category != category:
                continue
            for pair in t.binds:
                out.add(f"{self.kind} {t.sign.category} :: {t.lex.category} :: {format_binds([pair])}")
        return sorted(out)

    def related(self, sign: FeatureStructure, lex: FeatureStructure) -> frozenset:
        """Bind pairs witnessing that ``lex`` lies in the outer domain of ``sign``."""
        key = (sign, lex)
        hit = self._related.get(key)
        if hit is None:
            hit = self._related[key] = self._match(sign, lex)
        return hit

    def _match(self, sign: FeatureStructure, lex: FeatureStructure) -> frozenset:
        lex_cat = lex.category
        found = set()
        for triple in self._by_category.get(sign.category, ()):
            if triple.lex.category != lex_cat:
                continue
            pending = [p for p in triple.binds if p not in found]
            if not pending:
                continue
            if not _abstract_fs(triple.sign).unifiable(sign) or not _abstract_fs(triple.lex).unifiable(lex):
                continue
            for sign_path, lex_path in pending:
                a = sign.get(sign_path)
                b = lex.get(lex_path)
                if a is not None and b is not None and a.unifiable(b):
                    found.add((sign_path, lex_path))
        return frozenset(found)


def lex_in_outer(outer: DomainSet, sign: FeatureStructure, lex: FeatureStructure) -> frozenset:
    return outer.related(sign, lex)


# -- compilation -------------------------------------------------------


class _RuleGeometry:
    """Per-grammar tables shared by the inner and outer computations."""

    def __init__(self, grammar: Grammar) -> None:
        self.grammar = grammar
        self.params = grammar.param_paths
        self.rules = grammar.productions
        self.abstract: dict[tuple[str, int], AbstractSign] = {}
        for rule in self.rules:
            for i in range(rule.arity + 1):
                self.abstract[rule.name, i] = restrict(rule.fs.get((str(i),)), grammar.restrictor)
        pre = grammar.preterminal_positions
        self.preterminals = sorted({self.abstract[pos] for pos in pre})
        mothers = {self.abstract[r.name, 0] for r in self.rules}
        self.inner_keys = sorted(mothers | set(self.preterminals))
        self.outer_keys = sorted({self.abstract[r.name, i] for r in self.rules for i in range(1, r.arity + 1)})
        # sources[(rule, i)]: inner keys that can fill daughter i, with links
        self.sources = {
            (r.name, i): self._fill(r, i, self.inner_keys) for r in self.rules for i in range(1, r.arity + 1)
        }
        # uses[rule]: daughter positions the mother can fill, with links
        self.uses = {r.name: self._fill(r, 0, self.outer_keys) for r in self.rules}

    def _fill(self, rule, position: int, candidates) -> list[tuple[AbstractSign, dict[int, frozenset]]]:
        out = []
        for key in candidates:
            if key.category != self.abstract[rule.name, position].category:
                continue
            fs = rule.fs.unify_at((str(position),), _abstract_fs(key))
            if fs is None:
                continue
            links = {j: self.links(fs, position, j) for j in range(rule.arity + 1) if j != position}
            out.append((key, links))
        return out

    def links(self, fs: FeatureStructure, i: int, j: int) -> frozenset:
        """Param-path pairs (p at position i, q at position j) that are token-identical.

        Identity of a shared prefix counts: if ``i:a`` and ``j:b`` are one
        node then ``i:a.s`` and ``j:b.s`` are one node in every extension.
        """
        out = set()
        pi, pj = (str(i),), (str(j),)
        for p in self.params:
            for q in self.params:
                for k in range(len(p), -1, -1):
                    suffix = p[k:]
                    if len(suffix) > len(q) or q[len(q) - len(suffix):] != suffix:
                        continue
                    na = fs.node_at(pi + p[:k])
                    if na is not None and na == fs.node_at(pj + q[: len(q) - len(suffix)]):
                        out.add((p, q))
                        break
        return frozenset(out)


def _compose(links: Iterable[Pair], binds: Iterable[Pair]) -> set:
    """Carry ``binds`` (keyed on the far side) across ``links`` (far, near)."""
    by_far = defaultdict(list)
    for far, q in binds:
        by_far[far].append(q)
    return {(near, q) for far, near in links for q in by_far.get(far, ())}


def _flip(pairs: Iterable[Pair]) -> list[Pair]:
    return [(b, a) for a, b in pairs]


def _snapshot(table) -> dict:
    return {(sign, lex): len(binds) for sign, lexes in table.items() for lex, binds in lexes.items()}


def compute_inner(grammar: Grammar, log: list | None = None) -> DomainSet:
    geo = _RuleGeometry(grammar)
    table: dict = defaultdict(lambda: defaultdict(set))
    identity = {(p, p) for p in geo.params}
    for x in geo.preterminals:
        table[x][x] |= identity
    changed = True
    while changed:
        changed = False
        for rule in geo.rules:
            mother = geo.abstract[rule.name, 0]
            for i in range(1, rule.arity + 1):
                for source, links in geo.sources[rule.name, i]:
                    for lex, binds in list(table.get(source, {}).items()):
                        new = _compose(links[0], binds)
                        if new - table[mother][lex]:
                            table[mother][lex] |= new
                            changed = True
        if log is not None:
            log.append(_snapshot(table))
    return DomainSet("inner", _flatten(table), grammar.content_hash)


def compute_outer(grammar: Grammar, inner: DomainSet | None = None, log: list | None = None) -> DomainSet:
    """Outer domains; ``log`` receives a size snapshot after every round."""
    geo = _RuleGeometry(grammar)
    if inner is None:
        inner = compute_inner(grammar)
    inner_by_sign: dict = defaultdict(list)
    for t in inner.triples:
        inner_by_sign[t.sign].append((t.lex, t.binds))
    table: dict = defaultdict(lambda: defaultdict(set))
    changed = True
    while changed:
        changed = False
        for rule in geo.rules:
            for i in range(1, rule.arity + 1):
                here = geo.abstract[rule.name, i]
                for j in range(1, rule.arity + 1):
                    if j == i:
                        continue
                    for source, links in geo.sources[rule.name, j]:
                        for lex, binds in inner_by_sign.get(source, ()):
                            new = _compose(links[i], binds)
                            if new - table[here][lex]:
                                table[here][lex] |= new
                                changed = True
                for user, links in geo.uses[rule.name]:
                    for lex, binds in list(table.get(user, {}).items()):
                        new = _compose(links[i], binds)
                        if new - table[here][lex]:
                            table[here][lex] |= new
                            changed = True
        if log is not None:
            log.append(_snapshot(table))
    return DomainSet("outer", _flatten(table), grammar.content_hash)


def _flatten(table) -> dict:
    return {(sign, lex): binds for sign, lexes in table.items() for lex, binds in lexes.items() if binds}


def compile_domains(grammar: Grammar) -> tuple[DomainSet, DomainSet]:
    inner = compute_inner(grammar)
    return inner, compute_outer(grammar, inner)


# -- persistence -------------------------------------------------------


def save_domains(domains: DomainSet, sink: IO[str]) -> None:
    sink.write(f"{MAGIC} {FORMAT_VERSION} {domains.grammar_hash}\n")
    for line in domains.lines():
        sink.write(line + "\n")


def dumps(domains: DomainSet) -> str:
    buf = io.StringIO()
    save_domains(domains, buf)
    return buf.getvalue()


def load_domains(source: IO[str] | str, expected_hash: str | None = None) -> DomainSet:
    text = source if isinstance(source, str) else source.read()
    lines = text.splitlines()
    if not lines:
        raise CacheError("empty domain cache")
    header = lines[0].split()
    if len(header) != 3 or header[0] != MAGIC:
        raise CacheError("not a domain cache file")
    if header[1] != FORMAT_VERSION:
        raise CacheError(f"unsupported domain cache version {header[1]}")
    if expected_hash is not None and header[2] != expected_hash:
        raise StaleCacheError(f"domain cache was built for grammar {header[2]}, not {expected_hash}")
    kind = None
    table: dict = {}
    for n, line in enumerate(lines[1:], 2):
        if not line.strip():
            continue
        try:
            head, lex_text, binds_text = (part.strip() for part in line.split("::"))
            line_kind, sign_text = head.split(None, 1)
            if kind is None:
                kind = line_kind
            elif line_kind != kind:
                raise ValueError("mixed domain kinds")
            pairs = set()
            for item in binds_text.split(","):
                s, _, l = item.strip().partition("~")
                pairs.add((parse_path(s), parse_path(l)))
            key = (AbstractSign.parse(sign_text), AbstractSign.parse(lex_text))
        except ValueError as exc:
            raise CacheError(f"line {n}: malformed triple ({exc})") from None
        table[key] = table.get(key, frozenset()) | frozenset(pairs)
    return DomainSet(kind or "outer", table, header[2])
