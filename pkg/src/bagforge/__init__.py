"""Bag generation with connectivity-based pruning of the chart."""

from .chart import GenResult, Generator, generate
from .domains import DomainSet, compile_domains, compute_inner, compute_outer, load_domains
from .errors import BagError, BagforgeError, DisconnectedBagError, InvariantError
from .fs import AbstractSign, FeatureStructure
from .grammar import Bag, Grammar, load_bag, load_grammar, parse_bag, parse_grammar

__version__ = "0.1.0"

__all__ = [
    "AbstractSign",
    "Bag",
    "BagError",
    "BagforgeError",
    "DisconnectedBagError",
    "DomainSet",
    "FeatureStructure",
    "GenResult",
    "Generator",
    "Grammar",
    "InvariantError",
    "compile_domains",
    "compute_inner",
    "compute_outer",
    "generate",
    "load_bag",
    "load_domains",
    "load_grammar",
    "parse_bag",
    "parse_grammar",
]
