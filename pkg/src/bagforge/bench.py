"""Pruned vs. unpruned benchmark over a list of bags."""

from __future__ import annotations

from dataclasses import dataclass

from .chart import generate
from .domains import DomainSet
from .errors import BagforgeError, InvariantError
from .grammar import Bag, Grammar

TSV_HEADER = "bag_size\ttime_unpruned_s\tedges_unpruned\ttime_pruned_s\tedges_pruned"

# Reference row from the original experiment (bag size 15), kept for the docs.
REFERENCE_ROW = (15, 17.6, 448, 11.1, 253)


@dataclass
class BenchRow:
    bag_size: int
    time_unpruned: float = 0.0
    edges_unpruned: int = 0
    time_pruned: float = 0.0
    edges_pruned: int = 0
    name: str = ""
    error: str | None = None

    def tsv(self) -> str:
        if self.error is not None:
            return f"{self.bag_size}\tERROR\t{self.error}\t\t"
        return (
            f"{self.bag_size}\t{self.time_unpruned:.1f}\t{self.edges_unpruned}"
            f"\t{self.time_pruned:.1f}\t{self.edges_pruned}"
        )


def bench_bag(grammar: Grammar, bag: Bag, outer: DomainSet, name: str = "") -> BenchRow:
    plain = generate(grammar, bag, None, first_solution=True)
    pruned = generate(grammar, bag, outer, first_solution=True)
    row = BenchRow(
        len(bag),
        plain.stats.elapsed,
        plain.stats.edges_total,
        pruned.stats.elapsed,
        pruned.stats.edges_total,
        name,
    )
    if row.edges_pruned > row.edges_unpruned:
        raise InvariantError(
            f"bag {name or row.bag_size}: pruning built more edges ({row.edges_pruned} > {row.edges_unpruned})"
        )
    return row


def run_bench(grammar: Grammar, bags, outer: DomainSet) -> list[BenchRow]:
    """One row per bag, in input order.

    ``bags`` holds ``Bag`` objects or ``(name, Bag)`` pairs.  Input errors
    are reported on their row; an invariant violation aborts the run.
    """
    rows = []
    for item in bags:
        name, bag = item if isinstance(item, tuple) else ("", item)
        try:
            rows.append(bench_bag(grammar, bag, outer, name))
        except InvariantError:
            raise
        except BagforgeError as exc:
            rows.append(BenchRow(len(bag), name=name, error=str(exc)))
    return rows


def format_tsv(rows: list[BenchRow]) -> str:
    return "".join(line + "\n" for line in [TSV_HEADER, *(r.tsv() for r in rows)])
