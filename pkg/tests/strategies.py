"""Hypothesis strategies shared by the test modules."""
from fractions import Fraction

from hypothesis import strategies as st

from hyll.worlds import Domain, World

DOMAINS = list(Domain)

rationals = st.builds(Fraction, st.integers(0, 40), st.integers(1, 12))
positive_rationals = st.builds(Fraction, st.integers(1, 40), st.integers(1, 12))


def worlds(domain: Domain):
    if domain is Domain.UNIT:
        return st.just(World(domain))
    if domain is Domain.TEMPORAL:
        return rationals.map(lambda q: World(domain, q))
    return st.lists(positive_rationals, max_size=5).map(lambda qs: World(domain, tuple(qs)))
