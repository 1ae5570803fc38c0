"""
test_serialization.py
----------------------------------------

JSON documents and JSON-lines datasets.
"""

import io
import json

import pytest

from .context import src

from src.frames import Model
from src.generator import GeneratedDistribution, GeneratorConfig, generate_hypertree_distribution, \
    generate_tree_distribution, sample
from src.hypergraph import Hypergraph
from src.network import network_joint
from src.serialization import (SerializationError, deserialize, dump_dataset, load_dataset, read,
                               serialize, write)
from src.valuation import BeliefValuation, allclose


def through_text(value):
    fp = io.StringIO()
    write(value, fp)
    fp.seek(0)
    return read(fp)


def test_joint_document_lists_configurations():
    model = Model.binary('AB')
    bel = BeliefValuation(model.scope(), {0b0011: 0.25, 0b1111: 0.75})
    document = serialize(bel)
    assert document['kind'] == 'joint'
    assert document['variables'] == [{'name': 'A', 'domain': ['0', '1']},
                                     {'name': 'B', 'domain': ['0', '1']}]
    assert document['valuation']['masses'][0] == {'set': [['0', '0'], ['0', '1']], 'mass': 0.25}
    assert allclose(through_text(bel), bel)


def test_masses_must_sum_to_one():
    document = serialize(BeliefValuation.vacuous(Model.binary('A').scope()))
    document['valuation']['masses'][0]['mass'] = 0.5
    with pytest.raises(SerializationError):
        deserialize(document)


def test_unknown_kind_and_malformed_documents():
    with pytest.raises(SerializationError):
        deserialize({'kind': 'spreadsheet'})
    with pytest.raises(SerializationError):
        deserialize({'kind': 'joint', 'variables': []})
    with pytest.raises(SerializationError):
        deserialize({'colour': 'blue'})
    with pytest.raises(SerializationError):
        deserialize([1, 2])
    with pytest.raises(SerializationError):
        read(io.StringIO('{"kind": '))


def test_unknown_labels_are_rejected():
    document = serialize(BeliefValuation.vacuous(Model.binary('A').scope()))
    document['valuation']['masses'][0]['set'] = [['2']]
    with pytest.raises(SerializationError):
        deserialize(document)


def test_hypergraph_document():
    h = Hypergraph(['AB', 'BC'])
    document = serialize(h)
    assert document == {'kind': 'hypergraph', 'vertices': ['A', 'B', 'C'], 'hyperedges': [['A', 'B'], ['B', 'C']]}
    assert deserialize({'hyperedges': [['A', 'B'], ['B', 'C']]}) == h


def test_hypertree_document():
    tree = generate_hypertree_distribution(GeneratorConfig(n_vars=5, seed=1))
    loaded = through_text(tree)
    assert loaded.seq.hyperedges == tree.seq.hyperedges
    assert loaded.seq.branches == tree.seq.branches
    assert all(allclose(a, b) for a, b in zip(loaded.factors, tree.factors))


def test_hypertree_branches_are_inferred():
    document = serialize(generate_hypertree_distribution(GeneratorConfig(n_vars=4, seed=2)))
    del document['branches']
    tree = deserialize(document)
    assert tree.seq.branches[0] is None
    assert len(tree.seq.branches) == len(document['hyperedges'])


def test_hypertree_rejects_a_bad_order():
    model = Model.binary('ABCD')
    document = {
        'kind': 'hypertree',
        'variables': serialize(BeliefValuation.vacuous(model.scope()))['variables'],
        'hyperedges': [['A', 'B'], ['C', 'D'], ['B', 'C']],
        'factors': [],
    }
    with pytest.raises(SerializationError):
        deserialize(document)


def test_network_document_keeps_the_tree():
    generated = generate_tree_distribution(GeneratorConfig(n_vars=4, seed=3))
    document = serialize(generated)
    assert document['kind'] == 'network'
    assert document['tree'] == [list(edge) for edge in generated.tree_edges]
    loaded = through_text(generated)
    assert isinstance(loaded, GeneratedDistribution)
    assert loaded.tree_edges == generated.tree_edges
    assert set(loaded.network.dag.edges) == set(generated.network.dag.edges)
    assert allclose(network_joint(loaded.network), generated.joint)


def test_bare_network_document():
    generated = generate_tree_distribution(GeneratorConfig(n_vars=3, seed=0))
    loaded = through_text(generated.network)
    assert not isinstance(loaded, GeneratedDistribution)
    assert loaded.variables == generated.network.variables


def test_dataset_lines():
    generated = generate_tree_distribution(GeneratorConfig(n_vars=3, seed=5))
    data = sample(generated.joint, 20, seed=2)
    fp = io.StringIO()
    dump_dataset(data, fp)
    lines = fp.getvalue().splitlines()
    assert len(lines) == 21
    assert json.loads(lines[0])['records'] == 20
    fp.seek(0)
    loaded = load_dataset(fp)
    assert loaded.masks == data.masks
    assert loaded.scope == data.scope


def test_dataset_record_count_is_checked():
    generated = generate_tree_distribution(GeneratorConfig(n_vars=3, seed=5))
    fp = io.StringIO()
    dump_dataset(sample(generated.joint, 3, seed=2), fp)
    truncated = io.StringIO('\n'.join(fp.getvalue().splitlines()[:-1]))
    with pytest.raises(SerializationError):
        load_dataset(truncated)
    with pytest.raises(SerializationError):
        load_dataset(io.StringIO(''))
