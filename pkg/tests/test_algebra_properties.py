"""
test_algebra_properties.py
----------------------------------------

The valuation algebra laws on random small valuations.
"""

import numpy as np
from hypothesis import given, settings
from hypothesis import strategies as st

from .context import src
from .test_cases_utils import BINARY, valuations

from src.valuation import (allclose, combine, commonality_table, decombine, delta_divergence, marginalize,
                           mk_condition, vacuous_extend)


PROPERTY_SETTINGS = settings(max_examples=200, deadline=None)


@PROPERTY_SETTINGS
@given(valuations(), valuations())
def test_combination_is_commutative(a, b):
    assert allclose(combine(a, b), combine(b, a))


@PROPERTY_SETTINGS
@given(valuations(), valuations(), valuations())
def test_combination_is_associative(a, b, c):
    assert allclose(combine(a, combine(b, c)), combine(combine(a, b), c))


@PROPERTY_SETTINGS
@given(valuations(max_size=3), st.data())
def test_marginalization_is_consonant(bel, data):
    middle = data.draw(st.lists(st.sampled_from(bel.scope.names), min_size=1, unique=True))
    small = data.draw(st.lists(st.sampled_from(sorted(middle)), min_size=1, unique=True))
    middle, small = BINARY.scope(middle), BINARY.scope(small)
    assert allclose(marginalize(marginalize(bel, middle), small), marginalize(bel, small))


@PROPERTY_SETTINGS
@given(valuations(), valuations())
def test_local_computation(g, h):
    common = g.scope.intersection(h.scope)
    local = combine(g, marginalize(h, common)) if common else g
    assert allclose(marginalize(combine(g, h), g.scope), vacuous_extend(local, g.scope))


@PROPERTY_SETTINGS
@given(valuations(), valuations())
def test_commonalities_multiply(a, b):
    joint = combine(a, b)
    q = commonality_table(joint)
    q_a = commonality_table(vacuous_extend(a, joint.scope))
    q_b = commonality_table(vacuous_extend(b, joint.scope))
    np.testing.assert_allclose(q, q_a * q_b, atol=1e-9, rtol=0)


@PROPERTY_SETTINGS
@given(valuations(full=0.2), valuations(full=0.2))
def test_decombination_undoes_combination(a, b):
    both = combine(a, b)
    assert allclose(combine(b, decombine(both, b)), both)


@PROPERTY_SETTINGS
@given(valuations(max_size=2, full=0.2), st.data())
def test_mk_conditional_recombines(bel, data):
    given_names = data.draw(st.lists(st.sampled_from(bel.scope.names), min_size=1, unique=True))
    scope = BINARY.scope(given_names)
    assert allclose(combine(mk_condition(bel, scope), marginalize(bel, scope)), bel)


@PROPERTY_SETTINGS
@given(valuations(), valuations())
def test_delta_is_nonnegative_and_zero_on_itself(a, b):
    assert delta_divergence(a, a) == 0.0
    if a.scope == b.scope:
        assert delta_divergence(a, b) >= 0.0
