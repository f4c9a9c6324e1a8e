import pytest

from bagforge.chart import Edge, LEXICAL, combine_edges, generate, invoke_rule, seed_chart
from bagforge.errors import BagError, DisconnectedBagError, InvariantError, StaleCacheError
from bagforge.domains import DomainSet
from bagforge.chart import Generator

EX1 = "dog 1\nbarked 1\nthe 1\nbrown 1\nbig 1\n"
EX2 = "dog 1\nthe 1\nbrown 1\nbig 1\n"
SENTENCES = ["the big brown dog barked", "the brown big dog barked"]


def lex_edge(bag, position, eid):
    e = bag[position]
    return Edge(eid, LEXICAL, e.sign, 1 << position, 0, 0, (), (e.word,))


def test_seed_one_edge_per_element(fig1, bag_of):
    assert len(seed_chart(fig1, bag_of(fig1, EX2))) == 4


def test_fundamental_rule_needs_disjoint_leaves(fig1, bag_of):
    bag = bag_of(fig1, "the 1\ndog 1\n")
    the, dog = lex_edge(bag, 0, 0), lex_edge(bag, 1, 1)
    n1 = invoke_rule(fig1.rules["r5"], dog)
    n1.id = 2
    active = invoke_rule(fig1.rules["r2"], the)
    np = combine_edges(active, n1)
    assert np.inactive and np.fs.category == "NP" and np.leaves == 0b11
    overlapping = Edge(3, "r5", n1.fs, 0b11, 1, 1, (1,), ("the", "dog"))
    assert combine_edges(active, overlapping) is None


def test_category_mismatch(fig1, bag_of):
    bag = bag_of(fig1, "chased 2 1\ndog 1\n")
    vtra, dog = lex_edge(bag, 0, 0), lex_edge(bag, 1, 1)
    n1 = invoke_rule(fig1.rules["r5"], dog)
    active = invoke_rule(fig1.rules["r7"], vtra)
    assert combine_edges(active, n1) is None


def test_example_1_both_modes(fig1x, fig1x_outer, bag_of):
    bag = bag_of(fig1x, EX1)
    plain = generate(fig1x, bag)
    pruned = generate(fig1x, bag, fig1x_outer)
    assert plain.strings == pruned.strings == SENTENCES
    assert plain.stats.pruned == 0
    assert pruned.stats.edges_total <= plain.stats.edges_total


def test_derivations_are_bracketed(fig1x, bag_of):
    result = generate(fig1x, bag_of(fig1x, EX1))
    assert sorted(d.bracketed for d in result.derivations) == [
        "((the (big (brown dog))) barked)",
        "((the (brown (big dog))) barked)",
    ]


def test_example_2_np_loses_the_dog(fig1, fig1_domains, bag_of):
    g = fig1.with_start("NP")
    bag = bag_of(g, EX2)
    plain = generate(g, bag)
    pruned = generate(g, bag, fig1_domains[1])
    assert "the dog" in plain.inactive_texts()
    assert "the dog" not in pruned.inactive_texts()
    assert plain.strings == pruned.strings == ["the big brown dog", "the brown big dog"]


def test_single_noun_as_n1(fig1, bag_of):
    assert generate(fig1.with_start("N1"), bag_of(fig1, "dog 1\n")).strings == ["dog"]


def test_first_solution_stops_early(fig1x, bag_of):
    bag = bag_of(fig1x, EX1)
    first = generate(fig1x, bag, first_solution=True)
    full = generate(fig1x, bag)
    assert len(first.strings) == 1 and first.strings[0] in SENTENCES
    assert first.stats.edges_total <= full.stats.edges_total


def test_agenda_order_does_not_change_output(fig1x, fig1x_outer, bag_of):
    bag = bag_of(fig1x, EX1)
    assert generate(fig1x, bag, fig1x_outer, agenda="lifo").strings == SENTENCES


def test_edge_invariants(fig1x, fig1x_outer, bag_of):
    result = generate(fig1x, bag_of(fig1x, EX1), fig1x_outer)
    keys = set()
    for edge in result.edges:
        assert edge.key not in keys or edge.rule == LEXICAL
        keys.add(edge.key)
        if edge.children:
            union = 0
            for c in edge.children:
                child = result.edges[c]
                assert not union & child.leaves
                union |= child.leaves
            assert union == edge.leaves


def test_errors(fig1, fig1_domains, bag_of, builtin_bag):
    with pytest.raises(BagError):
        generate(fig1, bag_of(fig1, ""))
    with pytest.raises(DisconnectedBagError):
        generate(fig1, builtin_bag("ex3_nowith.bag", fig1))
    stale = DomainSet("outer", {}, "feedfacefeedface")
    with pytest.raises(StaleCacheError):
        generate(fig1, bag_of(fig1, EX2), stale)


def test_index_disconnected_edge_trips_invariant(fig1, bag_of):
    gen = Generator(fig1.with_start("NP"), bag_of(fig1, EX2))
    gen._tag_adj = (0, 0, 0, 0)  # pretend nothing shares an index
    with pytest.raises(InvariantError):
        gen.run()
