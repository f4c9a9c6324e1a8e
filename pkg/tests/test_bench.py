import pytest

from bagforge import bench
from bagforge.bench import BenchRow, TSV_HEADER, format_tsv, run_bench
from bagforge.errors import InvariantError
from bagforge.grammar import Bag


def test_empty_bag_list(bench_grammar, bench_outer):
    assert run_bench(bench_grammar, [], bench_outer) == []
    assert format_tsv([]) == TSV_HEADER + "\n"


def test_tsv_row_format():
    row = BenchRow(15, 17.64, 448, 11.06, 253)
    assert row.tsv() == "15\t17.6\t448\t11.1\t253"
    assert bench.REFERENCE_ROW == (15, 17.6, 448, 11.1, 253)


def test_errors_stay_on_their_row(bench_grammar, bench_outer, bag_of):
    good = bag_of(bench_grammar, "fido 1\nbarked e 1\n")
    rows = run_bench(bench_grammar, [Bag(()), good], bench_outer)
    assert rows[0].error and "ERROR" in rows[0].tsv()
    assert rows[1].error is None and rows[1].edges_pruned <= rows[1].edges_unpruned


def test_modifiers_and_pp_strictly_reduce(bench_grammar, bench_outer, bag_of):
    text = "the 1\nvery 1\nbig 1\nold 1\nbrown 1\ndog 1\nwith 1 2\na 2\ncollar 2\nbit e 1 3\nthe 3\nman 3\n"
    (row,) = run_bench(bench_grammar, [bag_of(bench_grammar, text)], bench_outer)
    assert row.bag_size == 12
    assert row.edges_pruned < row.edges_unpruned


def test_invariant_violation_aborts(bench_grammar, bench_outer, bag_of, monkeypatch):
    real = bench.generate

    def lopsided(g, bag, outer, **kw):
        result = real(g, bag, outer, **kw)
        if outer is not None:
            result.stats.edges_total += 1000
        return result

    monkeypatch.setattr(bench, "generate", lopsided)
    with pytest.raises(InvariantError):
        run_bench(bench_grammar, [bag_of(bench_grammar, "fido 1\nbarked e 1\n")], bench_outer)
