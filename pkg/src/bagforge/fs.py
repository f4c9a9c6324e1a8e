"""Feature structures with reentrancy and typed index variables.

A :class:`FeatureStructure` is an immutable rooted DAG stored as a tuple of
nodes in canonical order (depth-first, arcs visited alphabetically), so two
structures are equal exactly when they are isomorphic, reentrancies
included.  Three node kinds exist:

* atoms, ``(ATOM, "dog")``
* index variables, ``(VAR, tag)`` where ``tag`` is ``None`` for an
  unconstrained rule variable or a string for a concrete bag index
* complex nodes, ``(CPLX, ((label, child), ...))`` with labels sorted

Unification never mutates its inputs; all work happens in a scratch
union-find (:class:`_Scratch`) that is frozen back into canonical form.

The textual form is ``Cat[path=value, ...]``.  Values are atoms, ``_``
(a fresh untagged variable), ``@t`` (a variable tagged ``t``), ``[]`` (an
empty complex node) or a ``#n`` reentrancy marker, optionally followed by
``@t`` or ``:atom``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable, Iterator, Mapping, Sequence

ATOM = 0
VAR = 1
CPLX = 2

CAT = ("cat",)

Path = tuple  # tuple[str, ...]


class UnificationCycle(ValueError):
    """Raised when a structure being built would contain a cycle."""


def parse_path(text: str) -> Path:
    text = text.strip()
    if not text:
        raise ValueError("empty path")
    labels = tuple(text.split("."))
    if any(not label for label in labels):
        raise ValueError(f"malformed path {text!r}")
    return labels


def format_path(path: Sequence[str]) -> str:
    return ".".join(path)


class _Scratch:
    """Mutable union-find store used to build and unify structures."""

    __slots__ = ("parent", "kind", "data")

    def __init__(self) -> None:
        self.parent: list[int] = []
        self.kind: list[int] = []
        self.data: list = []

    def add(self, kind: int, data) -> int:
        self.parent.append(len(self.parent))
        self.kind.append(kind)
        self.data.append(data)
        return len(self.parent) - 1

    def load(self, fs: "FeatureStructure") -> int:
        """Copy ``fs`` into the store and return the index of its root."""
        off = len(self.parent)
        for kind, data in fs._nodes:
            if kind == CPLX:
                data = {label: child + off for label, child in data}
            self.parent.append(len(self.parent))
            self.kind.append(kind)
            self.data.append(data)
        return off

    def find(self, x: int) -> int:
        parent = self.parent
        root = x
        while parent[root] != root:
            root = parent[root]
        while parent[x] != root:
            parent[x], x = root, parent[x]
        return root

    def union(self, x: int, y: int) -> bool:
        kind, data, parent = self.kind, self.data, self.parent
        stack = [(x, y)]
        while stack:
            x, y = stack.pop()
            x = self.find(x)
            y = self.find(y)
            if x == y:
                continue
            kx, ky = kind[x], kind[y]
            if kx == VAR and ky == VAR:
                tx, ty = data[x], data[y]
                if tx is not None and ty is not None and tx != ty:
                    return False
                parent[x] = y
                if ty is None:
                    data[y] = tx
            elif kx == VAR:
                if data[x] is not None:
                    return False
                parent[x] = y
            elif ky == VAR:
                if data[y] is not None:
                    return False
                parent[y] = x
            elif kx == ATOM and ky == ATOM:
                if data[x] != data[y]:
                    return False
                parent[x] = y
            elif kx == CPLX and ky == CPLX:
                arcs_x, arcs_y = data[x], data[y]
                if len(arcs_x) > len(arcs_y):
                    x, y, arcs_x, arcs_y = y, x, arcs_y, arcs_x
                parent[x] = y
                merged = dict(arcs_y)
                for label, child in arcs_x.items():
                    other = merged.get(label)
                    if other is None:
                        merged[label] = child
                    else:
                        stack.append((child, other))
                data[y] = merged
            else:
                return False
        return True

    def walk(self, node: int, path: Iterable[str], create: bool = False) -> int | None:
        for label in path:
            node = self.find(node)
            kind = self.kind[node]
            if kind == VAR and create and self.data[node] is None:
                self.kind[node] = CPLX
                self.data[node] = {}
                kind = CPLX
            if kind != CPLX:
                return None
            arcs = self.data[node]
            child = arcs.get(label)
            if child is None:
                if not create:
                    return None
                child = self.add(VAR, None)
                arcs = dict(arcs)
                arcs[label] = child
                self.data[node] = arcs
            node = child
        return self.find(node)

    def freeze(self, root: int) -> "FeatureStructure":
        order: dict[int, int] = {}
        nodes: list = []
        on_path: set[int] = set()
        find, kind, data = self.find, self.kind, self.data

        def visit(x: int) -> int:
            x = find(x)
            if x in on_path:
                raise UnificationCycle("cyclic feature structure")
            seen = order.get(x)
            if seen is not None:
                return seen
            idx = len(nodes)
            order[x] = idx
            k = kind[x]
            if k != CPLX:
                nodes.append((k, data[x]))
                return idx
            nodes.append(None)
            on_path.add(x)
            arcs = tuple((label, visit(child)) for label, child in sorted(data[x].items()))
            on_path.discard(x)
            nodes[idx] = (CPLX, arcs)
            return idx

        visit(root)
        return FeatureStructure._from_nodes(tuple(nodes))


class FeatureStructure:
    """Immutable attribute-value DAG; see the module docstring."""

    __slots__ = ("_nodes", "_hash")

    def __init__(self, text: str | None = None) -> None:
        if text is None:
            self._nodes = ((CPLX, ()),)
        else:
            self._nodes = parse_sign(text)._nodes
        self._hash = hash(self._nodes)

    @classmethod
    def _from_nodes(cls, nodes: tuple) -> "FeatureStructure":
        fs = cls.__new__(cls)
        fs._nodes = nodes
        fs._hash = hash(nodes)
        return fs

    @classmethod
    def atom(cls, value: str) -> "FeatureStructure":
        return cls._from_nodes(((ATOM, value),))

    @classmethod
    def var(cls, tag: str | None = None) -> "FeatureStructure":
        return cls._from_nodes(((VAR, tag),))

    def __eq__(self, other) -> bool:
        return isinstance(other, FeatureStructure) and self._nodes == other._nodes

    def __hash__(self) -> int:
        return self._hash

    def __len__(self) -> int:
        return len(self._nodes)

    def __repr__(self) -> str:
        return f"FeatureStructure({self.to_text()!r})"

    def __str__(self) -> str:
        return self.to_text()

    # -- access -------------------------------------------------------

    def node_at(self, path: Iterable[str]) -> int | None:
        nodes = self._nodes
        node = 0
        for label in path:
            kind, data = nodes[node]
            if kind != CPLX:
                return None
            for arc_label, child in data:
                if arc_label == label:
                    node = child
                    break
            else:
                return None
        return node

    def has_path(self, path: Iterable[str]) -> bool:
        return self.node_at(path) is not None

    def get(self, path: Iterable[str]) -> "FeatureStructure | None":
        node = self.node_at(path)
        if node is None:
            return None
        if node == 0:
            return self
        return self._subgraph(node)

    def value(self, path: Iterable[str]):
        """Return the atom string or variable tag at ``path`` (None if absent)."""
        node = self.node_at(path)
        if node is None:
            return None
        kind, data = self._nodes[node]
        return data if kind != CPLX else None

    def kind_at(self, path: Iterable[str]) -> int | None:
        node = self.node_at(path)
        return None if node is None else self._nodes[node][0]

    @property
    def category(self) -> str | None:
        node = self.node_at(CAT)
        if node is None:
            return None
        kind, data = self._nodes[node]
        return data if kind == ATOM else None

    def is_complex(self) -> bool:
        return self._nodes[0][0] == CPLX

    def labels(self) -> tuple[str, ...]:
        kind, data = self._nodes[0]
        return tuple(label for label, _ in data) if kind == CPLX else ()

    def paths(self) -> Iterator[tuple[Path, int]]:
        """Yield every (path, node) pair, depth first, labels sorted."""
        nodes = self._nodes

        def walk(node: int, prefix: Path):
            yield prefix, node
            kind, data = nodes[node]
            if kind == CPLX:
                for label, child in data:
                    yield from walk(child, prefix + (label,))

        yield from walk(0, ())

    def leaf_paths(self) -> list[Path]:
        return [p for p, n in self.paths() if self._nodes[n][0] != CPLX]

    def tags(self) -> set[str]:
        return {data for kind, data in self._nodes if kind == VAR and data is not None}

    def _subgraph(self, node: int) -> "FeatureStructure":
        scratch = _Scratch()
        scratch.load(self)
        return scratch.freeze(node)

    # -- unification --------------------------------------------------

    def unify(self, other: "FeatureStructure") -> "FeatureStructure | None":
        return self.unify_at((), other)

    def unify_at(self, path: Iterable[str], other: "FeatureStructure") -> "FeatureStructure | None":
        """Unify ``other`` into the node at ``path`` (created if missing).

        Returns the whole updated structure, or None on failure.
        """
        scratch = _Scratch()
        scratch.load(self)
        node = scratch.walk(0, path, create=True)
        if node is None:
            return None
        if not scratch.union(node, scratch.load(other)):
            return None
        try:
            return scratch.freeze(0)
        except UnificationCycle:
            return None

    def unify_paths(self, p: Iterable[str], q: Iterable[str]) -> "FeatureStructure | None":
        scratch = _Scratch()
        scratch.load(self)
        x = scratch.walk(0, p, create=True)
        y = scratch.walk(0, q, create=True)
        if x is None or y is None or not scratch.union(x, y):
            return None
        try:
            return scratch.freeze(0)
        except UnificationCycle:
            return None

    def unifiable(self, other: "FeatureStructure") -> bool:
        scratch = _Scratch()
        scratch.load(self)
        return scratch.union(0, scratch.load(other))

    def subsumes(self, other: "FeatureStructure") -> bool:
        """True iff every path/value constraint and reentrancy of self holds in other."""
        classes: dict[int, int] = {}
        for path, node in self.paths():
            target = other.node_at(path)
            if target is None:
                return False
            kind, data = self._nodes[node]
            okind, odata = other._nodes[target]
            if kind == ATOM and (okind != ATOM or odata != data):
                return False
            if kind == VAR and data is not None and (okind != VAR or odata != data):
                return False
            if kind == CPLX and okind != CPLX:
                return False
            if classes.setdefault(node, target) != target:
                return False
        return True

    def token_identical(self, p: Iterable[str], q: Iterable[str]) -> bool:
        x = self.node_at(p)
        return x is not None and x == self.node_at(q)

    def project(self, keep: Iterable[Sequence[str]]) -> "FeatureStructure":
        """Restrict to the given paths, keeping the full value at each path.

        Reentrancies among the kept material survive; everything else is
        dropped.
        """
        nodes = self._nodes
        spine: dict[int, set[str]] = {0: set()}
        full: set[int] = set()
        for path in keep:
            target = self.node_at(path)
            if target is None:
                continue
            node = 0
            for label in path:
                spine.setdefault(node, set()).add(label)
                node = self.node_at_from(node, label)
            stack = [target]
            while stack:
                n = stack.pop()
                if n in full:
                    continue
                full.add(n)
                if nodes[n][0] == CPLX:
                    stack.extend(child for _, child in nodes[n][1])
        scratch = _Scratch()
        index: dict[int, int] = {}
        included = set(spine) | full
        for n in sorted(included):
            kind, data = nodes[n]
            index[n] = scratch.add(kind, {} if kind == CPLX else data)
        for n in included:
            kind, data = nodes[n]
            if kind != CPLX:
                continue
            wanted = None if n in full else spine[n]
            scratch.data[index[n]] = {
                label: index[child] for label, child in data if wanted is None or label in wanted
            }
        return scratch.freeze(index[0])

    def node_at_from(self, node: int, label: str) -> int:
        for arc_label, child in self._nodes[node][1]:
            if arc_label == label:
                return child
        raise KeyError(label)

    def graft(self, label: str, other: "FeatureStructure") -> "FeatureStructure":
        if not self.is_complex() or label in self.labels():
            raise ValueError(f"cannot graft under {label!r}")
        result = self.unify_at((label,), other)
        assert result is not None
        return result

    # -- printing -----------------------------------------------------

    def to_text(self) -> str:
        """Render as ``Cat[path=value, ...]`` with stable alphabetical order."""
        nodes = self._nodes
        if nodes[0][0] != CPLX:
            return _root_value_text(nodes[0])
        indegree = [0] * len(nodes)
        for kind, data in nodes:
            if kind == CPLX:
                for _, child in data:
                    indegree[child] += 1
        marks: dict[int, int] = {}
        entries: list[str] = []

        def emit(node: int, path: Path) -> None:
            kind, data = nodes[node]
            text = ""
            if indegree[node] > 1:
                if node in marks:
                    entries.append(f"{format_path(path)}=#{marks[node]}")
                    return
                marks[node] = len(marks)
                text = f"#{marks[node]}"
                if kind == ATOM:
                    text += f":{data}"
                elif kind == VAR and data is not None:
                    text += f"@{data}"
                elif kind == CPLX and data:
                    entries.append(f"{format_path(path)}={text}")
                    text = ""
                elif kind == CPLX:
                    text += ":[]"
            elif kind == ATOM:
                text = str(data)
            elif kind == VAR:
                text = "_" if data is None else f"@{data}"
            elif not data:
                text = "[]"
            if text:
                entries.append(f"{format_path(path)}={text}")
            if kind == CPLX:
                for label, child in data:
                    emit(child, path + (label,))

        head = None
        cat_node = self.node_at(CAT)
        if cat_node is not None and nodes[cat_node][0] == ATOM and indegree[cat_node] == 1:
            head = nodes[cat_node][1]
        for label, child in nodes[0][1]:
            if head is not None and label == "cat":
                continue
            emit(child, (label,))
        body = f"[{', '.join(entries)}]" if entries else ""
        if head is None:
            return body or "[]"
        return head + body


def _root_value_text(node) -> str:
    kind, data = node
    if kind == ATOM:
        return f"={data}"
    return "=_" if data is None else f"=@{data}"


# -- parsing ---------------------------------------------------------

_SIGN_RE = re.compile(r"\s*([A-Za-z_][\w\-']*)?\s*(\[(.*)\])?\s*$", re.S)
_VALUE_RE = re.compile(r"^(?:#(\w+))?(?:(@)([\w\-]+)|(:)?(\[\]|[\w\-'.]+))?$")
_ATOM_RE = re.compile(r"^[\w\-']+$")


class SignBuilder:
    """Accumulates ``path=value`` constraints into one structure.

    Variables named ``#n`` are resolved through ``variables``; passing the
    same mapping to several builders (or prefixes) shares them, which is
    how rule-scoped variables link a mother to its daughters.
    """

    def __init__(self) -> None:
        self._scratch = _Scratch()
        self._root = self._scratch.add(CPLX, {})
        self.variables: dict[str, int] = {}

    def constrain(self, path: Path, value: str) -> None:
        scratch = self._scratch
        node = scratch.walk(self._root, path, create=True)
        if node is None:
            raise ValueError(f"path {format_path(path)} runs through an atomic value")
        m = _VALUE_RE.match(value.strip())
        if m is None or not value.strip():
            raise ValueError(f"malformed value {value!r}")
        var_name, at, tag, colon, atom = m.groups()
        if var_name is None and colon:
            raise ValueError(f"malformed value {value!r}")
        targets = []
        if var_name is not None:
            var = self.variables.get(var_name)
            if var is None:
                var = scratch.add(VAR, None)
                self.variables[var_name] = var
            targets.append(var)
        if at:
            targets.append(scratch.add(VAR, tag))
        elif atom is not None:
            if atom == "[]":
                targets.append(scratch.add(CPLX, {}))
            elif atom == "_":
                if var_name is not None:
                    raise ValueError(f"malformed value {value!r}")
                targets.append(scratch.add(VAR, None))
            elif var_name is not None and not colon:
                raise ValueError(f"malformed value {value!r}")
            else:
                targets.append(scratch.add(ATOM, atom))
        for target in targets:
            if not scratch.union(node, target):
                raise ValueError(f"conflicting value for {format_path(path)}: {value}")

    def add_sign(self, text: str, prefix: Path = ()) -> None:
        """Parse ``Cat[path=value, ...]`` into the node at ``prefix``."""
        m = _SIGN_RE.match(text)
        if m is None or (m.group(1) is None and m.group(2) is None):
            raise ValueError(f"malformed sign {text!r}")
        cat, _, body = m.groups()
        node = self._scratch.walk(self._root, prefix, create=True)
        if node is None:
            raise ValueError(f"malformed sign {text!r}")
        if cat is not None:
            self.constrain(prefix + CAT, cat)
        if body is not None and body.strip():
            for item in _split_top(body):
                if "=" not in item:
                    raise ValueError(f"expected path=value in {item!r}")
                path_text, value = item.split("=", 1)
                self.constrain(prefix + parse_path(path_text), value)

    def build(self, prefix: Path = ()) -> FeatureStructure:
        node = self._scratch.walk(self._root, prefix, create=True)
        try:
            return self._scratch.freeze(node)
        except UnificationCycle as exc:
            raise ValueError(str(exc)) from None


def _split_top(body: str) -> list[str]:
    items, depth, current = [], 0, []
    for ch in body:
        if ch == "[":
            depth += 1
        elif ch == "]":
            depth -= 1
        if ch == "," and depth == 0:
            items.append("".join(current).strip())
            current = []
        else:
            current.append(ch)
    tail = "".join(current).strip()
    if tail:
        items.append(tail)
    return [item for item in items if item]


def parse_sign(text: str) -> FeatureStructure:
    builder = SignBuilder()
    builder.add_sign(text)
    return builder.build()


# -- restriction -------------------------------------------------------


@dataclass(frozen=True, order=True)
class AbstractSign:
    """A sign seen through a restrictor.

    ``cells`` holds, for every restrictor path present in the sign, either
    ``("=", atom)`` or ``("#", k)`` where ``k`` numbers token-identity
    classes in path order.  Index tags are erased.
    """

    category: str
    cells: tuple = ()

    def __str__(self) -> str:
        parts = []
        for path, (mark, value) in self.cells:
            rendered = f"#{value}" if mark == "#" else str(value)
            parts.append(f"{format_path(path)}={rendered}")
        return f"{self.category}[{', '.join(parts)}]" if parts else self.category

    def to_fs(self) -> FeatureStructure:
        builder = SignBuilder()
        builder.constrain(CAT, self.category)
        for path, (mark, value) in self.cells:
            builder.constrain(path, f"#{value}" if mark == "#" else str(value))
        return builder.build()

    @classmethod
    def parse(cls, text: str) -> "AbstractSign":
        m = _SIGN_RE.match(text)
        if m is None or m.group(1) is None:
            raise ValueError(f"malformed abstract sign {text!r}")
        body = m.group(3) or ""
        paths = [parse_path(item.split("=", 1)[0]) for item in _split_top(body)]
        return restrict(parse_sign(text), [CAT, *paths])


def restrict(sign: FeatureStructure, restrictor: Iterable[Sequence[str]]) -> AbstractSign:
    category = sign.category
    if category is None:
        raise ValueError(f"sign has no category: {sign}")
    classes: dict[int, int] = {}
    cells = []
    for path in sorted({tuple(p) for p in restrictor}):
        if path == CAT:
            continue
        node = sign.node_at(path)
        if node is None:
            continue
        kind, data = sign._nodes[node]
        if kind == ATOM:
            cells.append((path, ("=", data)))
        else:
            cells.append((path, ("#", classes.setdefault(node, len(classes)))))
    return AbstractSign(category, tuple(cells))


def from_mapping(mapping: Mapping[str, object]) -> FeatureStructure:
    """Build a tree-shaped structure from nested dicts (no reentrancy)."""
    builder = SignBuilder()

    def walk(prefix: Path, value) -> None:
        if isinstance(value, Mapping):
            if not value:
                builder.constrain(prefix, "[]")
            for key, sub in value.items():
                walk(prefix + (key,), sub)
        else:
            builder.constrain(prefix, str(value))

    walk((), mapping)
    return builder.build()
