"""
test_cases.py
----------------------------------------

The runner function (see test_cases_utils.py) for the
hypergraph cases in all_tests/: reduction, the hypertree
test, twigs, hypertree covers and compatible dags.
"""

import pytest

from .context import src
from .test_cases_utils import all_test_cases, run_all_test_cases

from src.hypergraph import (Hypergraph, check_construction_sequence, covers, edge_key, find_twigs,
                            hypertree_cover, is_hypertree, reduce)
from src.network import enumerate_compatible, is_compatible


def runner(document):
    """
    The runner function of the structure operations.
    """
    h = Hypergraph(document['hyperedges'])
    reduced = reduce(h)
    cover = hypertree_cover(h)
    assert covers(cover.as_hypergraph(), h)
    assert check_construction_sequence(cover)
    dags = enumerate_compatible(h)
    assert all(is_compatible(dag, h) for dag in dags)
    return {
        'reduced': [list(edge_key(edge)) for edge in reduced.hyperedges],
        'hypertree': is_hypertree(h),
        'twigs': [list(edge_key(twig)) for twig, _ in find_twigs(reduced)],
        'cover_width': cover.width,
        'compatible': len(dags),
    }


@pytest.mark.parametrize('case', list(all_test_cases()), ids=repr)
def test_case(case):
    assert runner(case.document) == case.expected


def test_every_case_has_expected_results():
    cases = list(all_test_cases())
    assert len(cases) == 6
    assert run_all_test_cases(runner) == []
