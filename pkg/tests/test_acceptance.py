"""Acceptance checks, one test per criterion.

Each test prints a single ``ACCEPTANCE <n> PASS|FAIL`` line with its
runtime, then asserts.  Run directly or through pytest.
"""

import io
import sys
import time

import pytest

from bagforge.bench import run_bench
from bagforge.chart import generate
from bagforge.cli import run_cli
from bagforge.data import PREFIX, names
from bagforge.domains import compute_inner, compute_outer
from bagforge.errors import DisconnectedBagError
from bagforge.fs import parse_sign
from bagforge.grammar import bag_connected, element_tags, load_bag, load_grammar, parse_bag
from bagforge.oracle import derivation_oracle, permutation_oracle
from bagforge.pruner import init_graph, initial_graph, test_wfss, update_graph


@pytest.fixture
def report(capsys):
    def emit(number: int, title: str, ok: bool, elapsed: float, limit: float, detail: str = "") -> None:
        ok = ok and elapsed < limit
        line = f"ACCEPTANCE {number} {'PASS' if ok else 'FAIL'} {title} ({elapsed:.2f}s, limit {limit:g}s)"
        if detail:
            line += f": {detail}"
        with capsys.disabled():
            print("\n" + line)
        assert ok, line

    return emit


def test_1_np_outer_domain(report, tmp_path, monkeypatch):
    monkeypatch.setenv("XDG_CACHE_HOME", str(tmp_path))
    t0 = time.perf_counter()
    out = io.StringIO()
    code = run_cli(["dump-domains", "--grammar", "fig1.gr", "--cat", "NP"], out, io.StringIO())
    elapsed = time.perf_counter() - t0
    got = out.getvalue().splitlines()
    want = [
        "outer NP :: P :: sem.arg1~sem.arg3",
        "outer NP :: Vtra :: sem.arg1~sem.arg2",
        "outer NP :: Vtra :: sem.arg1~sem.arg3",
    ]
    report(1, "outer domain of NP", code == 0 and got == want, elapsed, 1, f"{len(got)} triples")


def test_2_graph_figures(report):
    t0 = time.perf_counter()
    g = load_grammar("builtin:fig1.gr")
    outer = compute_outer(g)
    bag = parse_bag("dog 1\nthe 1\nbrown 1\nbig 1\n", g)
    ctx = init_graph(bag, outer, g.restrictor)
    start_ok = initial_graph(ctx).connected()
    the_dog = parse_sign("NP[sem.arg1=@1, sem.reln=dog]")
    leaves = 0b0011
    after = update_graph(ctx, the_dog, leaves)
    rejected = not test_wfss(ctx, the_dog, leaves)
    edges = {frozenset(bag.label(p) for p in e) for e in after.edges}
    elapsed = time.perf_counter() - t0
    ok = start_ok and rejected and edges == {frozenset({"big_1", "brown_1"})} and len(after.nodes) == 3
    report(2, "initial graph connected, 'the dog' rejected", ok, elapsed, 1, f"surviving edges {sorted(map(sorted, edges))}")


def test_3_dead_substrings(report):
    t0 = time.perf_counter()
    g = load_grammar("builtin:fig1x.gr")
    bag = load_bag("builtin:bags/ex1.bag", g)
    outer = compute_outer(g)
    plain = generate(g, bag)
    pruned = generate(g, bag, outer)
    elapsed = time.perf_counter() - t0
    dead = {"the dog", "the brown dog", "the dog barked"}
    built = dead & plain.inactive_texts()
    survived = dead & pruned.inactive_texts()
    ok = built == dead and not survived and plain.strings == pruned.strings
    detail = f"unpruned builds {sorted(built)}; pruned still builds {sorted(survived)}"
    report(3, "dead substrings eliminated", ok, elapsed, 5, detail)


def _equivalence_cases():
    fig1 = load_grammar("builtin:fig1.gr")
    fig1_np = fig1.with_start("NP")
    fig1x = load_grammar("builtin:fig1x.gr")
    bench = load_grammar("builtin:bench.gr")
    cases = [
        (fig1, "the 1\ndog 1\n"),
        (fig1, "the 1\ndog 1\nchased 1 2\na 2\ncat 2\n"),
        (fig1, "a 1\ncat 1\nsaw 1 2\nthe 2\nbrown 2\ndog 2\n"),
        (fig1, "the 1\nbig 1\ndog 1\nsaw 1 2\nthe 2\nman 2\n"),
        (fig1, "the 1\ndog 1\nwith 1 2\na 2\ncollar 2\nchased 1 3\nthe 3\ncat 3\n"),
        (fig1_np, "the 1\ndog 1\n"),
        (fig1_np, "dog 1\nthe 1\nbrown 1\nbig 1\n"),
        (fig1_np, "the 1\ndog 1\nwith 1 2\nthe 2\nbrown 2\ncollar 2\n"),
        (fig1_np, "a 1\nbig 1\ncat 1\nwith 1 2\nthe 2\ncollar 2\n"),
        (fig1_np, "the 1\nman 1\nwith 1 2\na 2\ndog 2\nwith 2 3\na 3\ncollar 3\n"),
        (fig1x, "dog 1\nbarked 1\nthe 1\nbrown 1\nbig 1\n"),
        (fig1x, "the 1\ndog 1\nbarked 1\n"),
        (fig1x, "the 1\ncat 1\nslept 1\n"),
        (fig1x, "the 1\nbig 1\ndog 1\nwith 1 2\na 2\ncollar 2\nbarked 1\n"),
        (bench, "mary 1\nliked e 1 2\njohn 2\n"),
        (bench, "she 1\nis e 1\nhappy 1\n"),
        (bench, "john 1\nsaid e 1 2\nthat 2\nmary 3\nslept 2 3\n"),
        (bench, "the 1\ndog 1\nbarked e 1\nin e 2\nthe 2\npark 2\n"),
        (bench, "he 1\nran e 1\nquickly e\nloudly e\n"),
    ]
    bench_bags = [n for n in names(".bag") if n.startswith("bags/bench/")]
    out = [(g, parse_bag(text, g)) for g, text in cases]
    for n in bench_bags:
        bag = load_bag(PREFIX + n, bench)
        if len(bag) <= 8:
            out.append((bench, bag))
    return out


def test_4_oracle_equivalence(report):
    t0 = time.perf_counter()
    cases = _equivalence_cases()
    outers = {}
    bad = []
    for g, bag in cases:
        assert 2 <= len(bag) <= 8 and bag_connected(bag, g)
        outer = outers.setdefault(g.content_hash, compute_outer(g))
        want = permutation_oracle(g, bag)
        plain = set(generate(g, bag).strings)
        pruned = set(generate(g, bag, outer).strings)
        if not plain == pruned == want:
            bad.append(" ".join(bag.words))
    elapsed = time.perf_counter() - t0
    report(4, "pruned = unpruned = permutation oracle", not bad and len(cases) >= 20, elapsed, 120,
           f"{len(cases)} bags, {len(bad)} discrepancies {bad}")


def test_5_domain_soundness(report):
    t0 = time.perf_counter()
    g = load_grammar("builtin:fig1.gr")
    log = []
    outer = compute_outer(g, compute_inner(g), log=log)
    missing = []
    for depth in range(6):
        for t in derivation_oracle(g, depth).triples:
            if not t.binds <= outer.binds(t.sign, t.lex):
                missing.append(t.line("outer"))
    monotone = all(
        after.get(key, 0) >= size for before, after in zip(log, log[1:]) for key, size in before.items()
    )
    elapsed = time.perf_counter() - t0
    report(5, "derivation oracle contained in compiled domains", not missing and monotone, elapsed, 60,
           f"{len(missing)} missing, {len(log)} rounds, monotone={monotone}")


def _modifier_heavy(bag, grammar) -> bool:
    """At least two stacked modifiers on one referent, plus a preposition."""
    cats = [e.sign.category for e in bag]
    if "P" not in cats:
        return False
    per_index: dict = {}
    for e in bag:
        if e.sign.category in ("A", "Deg"):
            for tag in element_tags(e, grammar):
                per_index[tag] = per_index.get(tag, 0) + 1
    return any(n >= 2 for n in per_index.values())


def test_6_benchmark_trend(report):
    t0 = time.perf_counter()
    g = load_grammar("builtin:bench.gr")
    outer = compute_outer(g)
    bags = [(n, load_bag(PREFIX + n, g)) for n in names(".bag") if n.startswith("bags/bench/")]
    rows = run_bench(g, bags, outer)
    elapsed = time.perf_counter() - t0
    sizes = sorted(r.bag_size for r in rows)
    heavy = [r for r, (_, bag) in zip(rows, bags) if _modifier_heavy(bag, g)]
    ok = (
        all(r.error is None for r in rows)
        and all(r.edges_pruned <= r.edges_unpruned for r in rows)
        and all(r.edges_pruned < r.edges_unpruned for r in heavy)
        and sizes[0] == 2 and sizes[-1] == 17
        and len(heavy) >= 3
    )
    report(6, "pruning never adds edges, modifier-heavy bags shrink", ok, elapsed, 300,
           f"{len(rows)} rows, {len(heavy)} modifier-heavy")


def test_7_connectivity_gate(report):
    t0 = time.perf_counter()
    g = load_grammar("builtin:fig1.gr").with_start("NP")
    good = bag_connected(load_bag("builtin:bags/ex3.bag", g), g)
    refused = None
    try:
        generate(g, load_bag("builtin:bags/ex3_nowith.bag", g))
    except DisconnectedBagError as exc:
        refused = exc
    elapsed = time.perf_counter() - t0
    ok = good and refused is not None and len(refused.components) == 2
    report(7, "disconnected bag refused before generation", ok, elapsed, 1, str(refused))


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q"]))
