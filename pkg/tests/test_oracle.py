import pytest

from bagforge.errors import GuardError
from bagforge.oracle import derivation_oracle, permutation_oracle


def test_the_dog_as_np(fig1, bag_of):
    g = fig1.with_start("NP")
    assert permutation_oracle(g, bag_of(g, "the 1\ndog 1\n")) == {"the dog"}


def test_bare_noun_is_no_sentence(fig1, bag_of):
    assert permutation_oracle(fig1, bag_of(fig1, "dog 1\n")) == set()


def test_example_1(fig1x, bag_of):
    bag = bag_of(fig1x, "dog 1\nbarked 1\nthe 1\nbrown 1\nbig 1\n")
    assert permutation_oracle(fig1x, bag) == {"the big brown dog barked", "the brown big dog barked"}


def test_size_guard(fig1, bag_of):
    bag = bag_of(fig1, "".join("big 1\n" for _ in range(10)))
    with pytest.raises(GuardError):
        permutation_oracle(fig1, bag)
    with pytest.raises(GuardError):
        derivation_oracle(fig1, 7)


def test_depth_three_sees_subject_binding(fig1):
    lines = derivation_oracle(fig1, 3).category_lines("NP")
    assert "outer NP :: Vtra :: sem.arg1~sem.arg2" in lines


def test_depth_zero_is_empty(fig1):
    assert len(derivation_oracle(fig1, 0)) == 0


def test_monotone_in_depth(fig1):
    shallow = derivation_oracle(fig1, 3)
    deep = derivation_oracle(fig1, 5)
    for t in shallow.triples:
        assert t.binds <= deep.binds(t.sign, t.lex)
