"""
test_generator.py
----------------------------------------

Generated tree distributions, random hypertrees, sampling and
estimation.
"""

import networkx as nx
import numpy as np
import pytest

from .context import src

from src.frames import Model
from src.generator import (DatasetError, GenerationError, GeneratorConfig, SampleDataset,
                           estimate_marginal, generate_hypertree_distribution,
                           generate_tree_distribution, random_tree, sample)
from src.network import network_joint
from src.valuation import BeliefValuation, allclose, commonality_table, marginalize


@pytest.mark.parametrize('kwargs', [
    {'n_vars': 1},
    {'n_vars': 11},
    {'domain_size': 1},
    {'domain_size': [2, 2]},
    {'focal': -1},
    {'q_min': 0.0},
    {'q_min': 1.5},
    {'max_retries': 0},
])
def test_config_validation(kwargs):
    with pytest.raises(GenerationError):
        GeneratorConfig(**kwargs)


def test_model_follows_the_domain_sizes():
    model = GeneratorConfig(n_vars=3, domain_size=[2, 3, 4]).model()
    assert model.names == ('A', 'B', 'C')
    assert [variable.size for variable in model] == [2, 3, 4]
    assert model['B'].domain == ('0', '1', '2')


def test_random_tree_is_a_spanning_tree():
    rng = np.random.default_rng(0)
    names = list('ABCDEF')
    edges = random_tree(rng, names)
    graph = nx.Graph(edges)
    assert nx.is_tree(graph)
    assert set(graph.nodes) == set(names)
    assert random_tree(rng, ['A', 'B']) == [('A', 'B')]


def test_generation_is_deterministic():
    first = generate_tree_distribution(GeneratorConfig(n_vars=5, seed=9))
    second = generate_tree_distribution(GeneratorConfig(n_vars=5, seed=9))
    assert first.tree_edges == second.tree_edges
    assert allclose(first.joint, second.joint)


@pytest.mark.parametrize('seed', range(4))
def test_joint_is_proper_with_commonalities_above_q_min(seed):
    cfg = GeneratorConfig(n_vars=4, seed=seed, q_min=0.05)
    generated = generate_tree_distribution(cfg)
    assert generated.joint.is_proper()
    assert commonality_table(generated.joint)[1:].min() >= cfg.q_min * (1 - 1e-9)
    assert allclose(network_joint(generated.network), generated.joint)


def test_network_follows_the_tree():
    generated = generate_tree_distribution(GeneratorConfig(n_vars=5, seed=1))
    dag = generated.network.dag
    assert {frozenset(edge) for edge in dag.edges} == {frozenset(edge) for edge in generated.tree_edges}
    assert not list(dag.predecessors('A'))


def test_bayesian_generation():
    generated = generate_tree_distribution(GeneratorConfig(n_vars=4, bayesian=True, seed=2))
    assert generated.joint.is_bayesian()
    assert generated.joint.total == pytest.approx(1.0)
    assert allclose(network_joint(generated.network), generated.joint)


def test_hypertree_distribution_has_positive_factors():
    tree = generate_hypertree_distribution(GeneratorConfig(n_vars=5, seed=3))
    assert set().union(*tree.seq.hyperedges) == set('ABCDE')
    for factor in tree.factors:
        assert factor.is_proper()
        assert commonality_table(factor)[1:].min() > 0


def test_sampling_is_deterministic_and_draws_focal_sets():
    generated = generate_tree_distribution(GeneratorConfig(n_vars=3, seed=4))
    first = sample(generated.joint, 100, seed=5)
    second = sample(generated.joint, 100, seed=5)
    assert first.masks == second.masks
    assert len(first) == 100
    assert set(first.masks) <= set(generated.joint.masses)


def test_sampling_a_single_focal_set():
    model = Model.binary('AB')
    bel = BeliefValuation(model.scope(), {0b0110: 1.0})
    data = sample(bel, 10)
    assert set(data.masks) == {0b0110}


def test_sampling_needs_a_proper_joint():
    model = Model.binary('A')
    with pytest.raises(DatasetError):
        sample(BeliefValuation(model.scope(), {0: 0.5, 0b11: 0.5}), 10)
    with pytest.raises(DatasetError):
        sample(BeliefValuation.vacuous(model.scope()), -1)


def test_dataset_records_must_be_nonempty_sets():
    scope = Model.binary('A').scope()
    with pytest.raises(DatasetError):
        SampleDataset(scope, [0])
    with pytest.raises(DatasetError):
        SampleDataset(scope, [0b111])


def test_estimate_marginal_counts_projections():
    model = Model.binary('AB')
    data = SampleDataset(model.scope(), [0b0001, 0b0001, 0b0011, 0b1111])
    marginal = estimate_marginal(data, model.scope(['A']))
    assert dict(marginal.masses) == {0b01: 0.75, 0b11: 0.25}
    smoothed = estimate_marginal(data, model.scope(['A']), smoothing=0.25)
    assert smoothed.mass(0b01) == pytest.approx(0.6)
    assert smoothed.mass(0b11) == pytest.approx(0.4)
    with pytest.raises(DatasetError):
        estimate_marginal(SampleDataset(model.scope(), []), model.scope(['A']))


def test_estimates_approach_the_joint():
    generated = generate_tree_distribution(GeneratorConfig(n_vars=3, seed=6))
    data = sample(generated.joint, 20000, seed=0)
    scope = generated.model.scope(['A', 'B'])
    estimate = estimate_marginal(data, scope)
    assert allclose(estimate, marginalize(generated.joint, scope), tolerance=0.03)
