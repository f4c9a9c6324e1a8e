"""Exception hierarchy.  CLI exit codes hang off these classes."""


class BagforgeError(Exception):
    """Base class for input and format errors (exit status 3)."""


class GrammarSyntaxError(BagforgeError):
    def __init__(self, message: str, line: int | None = None) -> None:
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


class GrammarError(BagforgeError):
    pass


class BagError(BagforgeError):
    pass


class DisconnectedBagError(BagError):
    def __init__(self, components: list[list[str]]) -> None:
        self.components = components
        shown = "; ".join("{" + ", ".join(c) + "}" for c in components)
        super().__init__(f"bag is not connected: {len(components)} components: {shown}")


class CacheError(BagforgeError):
    pass


class StaleCacheError(CacheError):
    pass


class GuardError(BagforgeError):
    """Input exceeds a brute-force oracle's size guard."""


class InvariantError(Exception):
    """An internal invariant was violated (exit status 4)."""
