"""Bundled grammars and bags, addressable as ``builtin:<name>``."""

from __future__ import annotations

from importlib import resources
from pathlib import Path

PREFIX = "builtin:"


def read_text(path: str | Path) -> str:
    text = str(path)
    if text.startswith(PREFIX):
        return resources.files(__name__).joinpath(text[len(PREFIX):]).read_text(encoding="utf-8")
    return Path(path).read_text(encoding="utf-8")


def names(suffix: str = "") -> list[str]:
    found = []

    def walk(node, prefix: str) -> None:
        for entry in node.iterdir():
            if entry.is_dir():
                if not entry.name.startswith("__"):
                    walk(entry, f"{prefix}{entry.name}/")
            elif entry.name.endswith(suffix):
                found.append(prefix + entry.name)

    walk(resources.files(__name__), "")
    return sorted(found)
