import io

import pytest

from bagforge.domains import compute_inner, compute_outer, dumps, load_domains, save_domains
from bagforge.errors import CacheError, StaleCacheError
from bagforge.fs import parse_sign

NP_OUTER = [
    "outer NP :: P :: sem.arg1~sem.arg3",
    "outer NP :: Vtra :: sem.arg1~sem.arg2",
    "outer NP :: Vtra :: sem.arg1~sem.arg3",
]


def test_np_outer_domain(fig1_domains):
    _, outer = fig1_domains
    assert outer.category_lines("NP") == NP_OUTER


def test_outer_domains_only_hold_preterminals(fig1, fig1_domains):
    _, outer = fig1_domains
    assert {t.lex.category for t in outer.triples} <= fig1.preterminals


def test_inner_domain_of_preterminal_is_itself(fig1_domains):
    inner, _ = fig1_domains
    for t in inner.for_category("A"):
        assert t.lex.category == "A"
        assert ((("sem", "arg1"), ("sem", "arg1"))) in t.binds


def test_inner_np_reaches_nominal_material(fig1_domains):
    inner, _ = fig1_domains
    assert {t.lex.category for t in inner.for_category("NP")} >= {"Det", "N", "A"}


def test_s_has_empty_outer_domain(fig1_domains):
    _, outer = fig1_domains
    assert outer.for_category("S") == []


def test_binds_grow_monotonically(fig1):
    log = []
    compute_outer(fig1, compute_inner(fig1), log=log)
    assert len(log) >= 2
    for before, after in zip(log, log[1:]):
        assert all(after.get(key, 0) >= size for key, size in before.items())
    assert log[-1] == log[-2]  # the last round changed nothing


def test_related_matches_runtime_signs(fig1_domains):
    _, outer = fig1_domains
    np = parse_sign("NP[sem.arg1=@1, sem.reln=dog]")
    assert outer.related(np, parse_sign("Vtra[sem.arg2=@1, sem.arg3=@2]"))
    assert outer.related(np, parse_sign("Vtra[sem.arg2=@2, sem.arg3=@1]"))
    assert not outer.related(np, parse_sign("Vtra[sem.arg2=@2, sem.arg3=@3]"))
    assert not outer.related(np, parse_sign("A[sem.arg1=@1]"))


def test_cache_round_trip(fig1, fig1_domains):
    _, outer = fig1_domains
    buf = io.StringIO()
    save_domains(outer, buf)
    text = buf.getvalue()
    assert text.startswith(f"bagforge-domains v1 {fig1.content_hash}\n")
    again = load_domains(text, fig1.content_hash)
    assert again == outer
    assert dumps(again) == text


def test_cache_errors(fig1, fig1_domains):
    _, outer = fig1_domains
    text = dumps(outer)
    with pytest.raises(StaleCacheError):
        load_domains(text, "0" * 16)
    with pytest.raises(CacheError):
        load_domains("", None)
    with pytest.raises(CacheError):
        load_domains("something else\n", None)
    with pytest.raises(CacheError):
        load_domains(text.replace("v1", "v9", 1), None)
    with pytest.raises(CacheError):
        load_domains(text + "outer NP :: nonsense\n", None)


def test_bench_grammar_compiles_quickly(bench_grammar, bench_outer):
    assert len(bench_outer) > 0
    assert {t.lex.category for t in bench_outer.triples} <= bench_grammar.preterminals
