"""
test_learning.py
----------------------------------------

Dependence measures, the spanning tree and tree recovery.
"""

import math

import networkx as nx
import numpy as np
import pytest

from .context import src

from src.frames import Model
from src.generator import GeneratorConfig, generate_tree_distribution, sample
from src.learning import (DepMatrix, Dependence, EmpiricalSource, ExactSource, LearningError, dep_bn, dep_kl,
                          dependence_matrix, learn_tree, maximum_spanning_tree, network_delta,
                          recovery_report, ternary_background_joint)
from src.network import network_joint
from src.valuation import BeliefValuation, allclose, combine_all, delta_divergence, marginalize


def chain_joint():
    """
    Bayesian chain A -> C -> B.
    """
    model = Model.binary('ABC')
    p_a = np.array([0.3, 0.7])
    p_c_given_a = np.array([[0.9, 0.1], [0.2, 0.8]])
    p_b_given_c = np.array([[0.6, 0.4], [0.1, 0.9]])
    table = np.einsum('a,ac,cb->abc', p_a, p_c_given_a, p_b_given_c)
    return BeliefValuation.bayesian(model.scope(), table)


def collider_joint():
    """
    Bayesian collider A -> C <- B.
    """
    model = Model.binary('ABC')
    p_c_given_ab = np.array([[[0.9, 0.1], [0.3, 0.7]], [[0.4, 0.6], [0.05, 0.95]]])
    table = np.einsum('a,b,abc->abc', [0.5, 0.5], [0.4, 0.6], p_c_given_ab)
    return BeliefValuation.bayesian(model.scope(), table)


def test_ternary_background_joint_is_exact_through_the_middle():
    joint = chain_joint()
    approx = ternary_background_joint(joint, 'A', 'B', 'C')
    assert allclose(approx, marginalize(joint, joint.scope.model.scope(['A', 'B'])))


def test_ternary_background_joint_misses_a_collider():
    joint = collider_joint()
    pair = marginalize(joint, joint.scope.model.scope(['A', 'B']))
    approx = ternary_background_joint(joint, 'A', 'B', 'C')
    assert delta_divergence(approx, pair) > 0


def test_ternary_background_joint_needs_three_variables():
    with pytest.raises(LearningError):
        ternary_background_joint(chain_joint(), 'A', 'B', 'A')


def test_dep_bn_of_independent_variables_is_zero():
    model = Model.binary('AB')
    joint = combine_all([BeliefValuation.bayesian(model.scope(['A']), [0.2, 0.8]),
                         BeliefValuation.bayesian(model.scope(['B']), [0.6, 0.4])])
    dependence = dep_bn(joint, 'A', 'B')
    assert dependence.value == pytest.approx(0.0, abs=1e-9)
    assert dependence.arm is None


def test_dep_bn_through_a_background_variable():
    dependence = dep_bn(chain_joint(), 'A', 'B')
    assert dependence.value == pytest.approx(0.0, abs=1e-9)
    assert dependence.arm == 'C'
    assert dep_bn(chain_joint(), 'A', 'C').value > 0


def test_dep_kl_is_mutual_information():
    model = Model.binary('AB')
    table = np.array([[0.4, 0.1], [0.1, 0.4]])
    bel = BeliefValuation.bayesian(model.scope(), table)
    expected = sum(p * math.log(p / 0.25) for p in table.ravel())
    assert dep_kl(bel) == pytest.approx(expected)
    with pytest.raises(LearningError):
        dep_kl(BeliefValuation.vacuous(model.scope()))


def test_maximum_spanning_tree_breaks_ties_by_name():
    matrix = DepMatrix('ABC')
    matrix.set('A', 'B', Dependence(1.0))
    matrix.set('A', 'C', Dependence(1.0))
    matrix.set('B', 'C', Dependence(1.0))
    chosen, ties = maximum_spanning_tree(matrix)
    assert chosen == [('A', 'B'), ('A', 'C')]
    assert ties == [{'value': 1.0, 'pairs': [('A', 'B'), ('A', 'C'), ('B', 'C')]}]


def test_infinite_weights_come_first():
    matrix = DepMatrix('ABC')
    matrix.set('A', 'B', Dependence(2.0))
    matrix.set('A', 'C', Dependence(math.inf))
    matrix.set('B', 'C', Dependence(3.0))
    chosen, _ = maximum_spanning_tree(matrix)
    assert chosen == [('A', 'C'), ('B', 'C')]


def test_two_variables_learn_their_single_edge():
    model = Model.binary('AB')
    joint = BeliefValuation(model.scope(), {0b0011: 0.3, 0b1001: 0.3, 0b1111: 0.4})
    learned = learn_tree(joint)
    assert learned.edges == [('A', 'B')]
    expected = marginalize(joint, model.scope())
    assert allclose(network_joint(learned.network), expected)


def test_learning_needs_two_variables():
    with pytest.raises(LearningError):
        learn_tree(BeliefValuation.vacuous(Model.binary('A').scope()))


def test_unknown_measure():
    with pytest.raises(LearningError):
        dependence_matrix(chain_joint(), 'dep-xx')


@pytest.mark.parametrize('seed', range(5))
def test_exact_joint_gives_back_the_generating_tree(seed):
    generated = generate_tree_distribution(GeneratorConfig(n_vars=5 + seed % 3, seed=seed))
    learned = learn_tree(generated.joint)
    report = recovery_report(learned, generated.tree_edges, generated.joint)
    assert report['recovered']
    assert report['hamming'] == 0
    assert report['delta'] == pytest.approx(0.0, abs=1e-9)
    if 'total_variation' in report:
        assert report['total_variation'] == pytest.approx(0.0, abs=1e-9)


def test_learned_tree_is_oriented_from_the_root():
    generated = generate_tree_distribution(GeneratorConfig(n_vars=5, seed=2))
    learned = learn_tree(generated.joint, root='C')
    assert learned.root == 'C'
    assert not list(learned.network.dag.predecessors('C'))
    assert nx.is_arborescence(learned.network.dag)
    with pytest.raises(LearningError):
        learn_tree(generated.joint, root='Z')


def test_network_delta_matches_the_built_joint():
    generated = generate_tree_distribution(GeneratorConfig(n_vars=4, seed=5))
    data = sample(generated.joint, 300, seed=1)
    learned = learn_tree(data)
    built = network_joint(learned.network)
    assert network_delta(learned.network, generated.joint) == pytest.approx(
        delta_divergence(built, generated.joint), rel=1e-9, abs=1e-12)


def test_empirical_source_smooths_with_half_a_record():
    generated = generate_tree_distribution(GeneratorConfig(n_vars=3, seed=0))
    data = sample(generated.joint, 50, seed=0)
    source = EmpiricalSource(data)
    assert source.epsilon == pytest.approx(0.01)
    marginal = source.marginal(['A'])
    assert marginal.mass(0b11) >= 0.01 / 1.01
    assert marginal.total == pytest.approx(1.0)
    assert source.marginal(['A']) is marginal
    assert source.unsmoothed().epsilon == 0.0
    exact = ExactSource(generated.joint)
    assert allclose(exact.marginal(['A']), marginalize(generated.joint, generated.model.scope(['A'])))


def test_bayesian_tree_learns_the_same_under_both_measures():
    generated = generate_tree_distribution(GeneratorConfig(n_vars=5, bayesian=True, seed=4))
    by_dep = learn_tree(generated.joint, 'dep-bn')
    by_kl = learn_tree(generated.joint, 'dep-kl')
    if not by_dep.ties and not by_kl.ties:
        assert by_dep.edge_set() == by_kl.edge_set()
    assert by_kl.edge_set() == {frozenset(edge) for edge in generated.tree_edges}
