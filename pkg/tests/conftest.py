import pytest

from bagforge.domains import compile_domains
from bagforge.grammar import load_bag, load_grammar


@pytest.fixture(scope="session")
def fig1():
    return load_grammar("builtin:fig1.gr")


@pytest.fixture(scope="session")
def fig1x():
    return load_grammar("builtin:fig1x.gr")


@pytest.fixture(scope="session")
def bench_grammar():
    return load_grammar("builtin:bench.gr")


@pytest.fixture(scope="session")
def fig1_domains(fig1):
    return compile_domains(fig1)


@pytest.fixture(scope="session")
def fig1x_outer(fig1x):
    return compile_domains(fig1x)[1]


@pytest.fixture(scope="session")
def bench_outer(bench_grammar):
    return compile_domains(bench_grammar)[1]


@pytest.fixture
def bag_of():
    def make(grammar, text):
        from bagforge.grammar import parse_bag

        return parse_bag(text, grammar)

    return make


@pytest.fixture
def builtin_bag():
    def make(name, grammar):
        return load_bag(f"builtin:bags/{name}", grammar)

    return make
