"""
serialization.py
----------------------------------------

JSON documents for Beltree's objects, and JSON lines for
datasets. A Serializer turns an object into a JSON-ready
dictionary; a Deserializer validates a dictionary and rebuilds
the object. Every top-level document has a "kind" tag and lists
its variables with their domains, so it can be read on its own.

Kinds:

    joint       {"variables", "valuation"}
    hypergraph  {"vertices", "hyperedges"}
    hypertree   {"variables", "hyperedges", "branches", "factors"}
    network     {"variables", "nodes": [{"var", "parents", "valuation"}], "tree"?}
    dataset     a header line {"variables", "scope"}, then one record per
                line: a list of configurations

A valuation is {"scope": [...], "masses": [{"set": [[...], ...], "mass": m}]}
with configurations listed in scope order.

"""

import json
import logging

import networkx as nx

from .environment import setting
from .frames import ConfigSet, FrameError, Model, Variable
from .generator import GeneratedDistribution, SampleDataset
from .hypergraph import ConstructionSequence, Hypergraph, check_construction_sequence, edge_key
from .network import BeliefNetwork
from .propagation import MarkovTree
from .utils import BeltreeError
from .valuation import BeliefValuation


log = logging.getLogger(__name__)

KIND_JOINT = 'joint'
KIND_HYPERGRAPH = 'hypergraph'
KIND_HYPERTREE = 'hypertree'
KIND_NETWORK = 'network'
KIND_DATASET = 'dataset'


class SerializationError(BeltreeError):
    """
    Raised for documents that are malformed or do not describe
    valid objects.
    """


class Serializer:
    """
    Turns a Beltree object into a JSON-ready document.
    """

    def __init__(self, value):
        self.value = value

    def serialize(self):
        return self._dispatch(self.value)

    def _dispatch(self, value):
        if isinstance(value, BeliefValuation):
            return self._serialize_joint(value)
        elif isinstance(value, Hypergraph):
            return self._serialize_hypergraph(value)
        elif isinstance(value, MarkovTree):
            return self._serialize_hypertree(value)
        elif isinstance(value, GeneratedDistribution):
            return self._serialize_network(value.network, value.tree_edges)
        elif isinstance(value, BeliefNetwork):
            return self._serialize_network(value)
        elif isinstance(value, SampleDataset):
            return self._serialize_dataset_header(value)
        else:
            raise SerializationError('cannot serialize a value of type {}'.format(type(value).__name__))

    def _serialize_variables(self, model):
        return [{'name': var.name, 'domain': list(var.domain)} for var in model]

    def _serialize_configset(self, focal):
        return [list(config) for config in focal.configurations()]

    def _serialize_valuation(self, bel):
        return {
            'scope': list(bel.scope.names),
            'masses': [{'set': self._serialize_configset(focal), 'mass': mass}
                       for focal, mass in bel.focal_sets()],
        }

    def _serialize_joint(self, bel):
        return {
            'kind': KIND_JOINT,
            'variables': self._serialize_variables(bel.scope.model),
            'valuation': self._serialize_valuation(bel),
        }

    def _serialize_hypergraph(self, h):
        return {
            'kind': KIND_HYPERGRAPH,
            'vertices': sorted(h.vertices),
            'hyperedges': [list(edge_key(edge)) for edge in h.hyperedges],
        }

    def _serialize_hypertree(self, tree):
        return {
            'kind': KIND_HYPERTREE,
            'variables': self._serialize_variables(tree.model),
            'hyperedges': [list(scope.names) for scope in tree.scopes],
            'branches': list(tree.seq.branches),
            'factors': [self._serialize_valuation(factor) for factor in tree.factors],
        }

    def _serialize_network(self, network, tree_edges=None):
        document = {
            'kind': KIND_NETWORK,
            'variables': self._serialize_variables(network.model),
            'nodes': [],
        }
        for name in network.variables:
            node = {'var': name, 'parents': list(network.parents(name))}
            if name in network.valuations:
                node['valuation'] = self._serialize_valuation(network.valuations[name])
            document['nodes'].append(node)
        if tree_edges is not None:
            document['tree'] = [list(edge) for edge in tree_edges]
        return document

    def _serialize_dataset_header(self, data):
        return {
            'kind': KIND_DATASET,
            'variables': self._serialize_variables(data.model),
            'scope': list(data.scope.names),
            'records': len(data),
        }

    def serialize_record(self, focal):
        return self._serialize_configset(focal)


def _infer_kind(document):
    if 'kind' in document:
        return document['kind']
    for key, kind in (('nodes', KIND_NETWORK), ('factors', KIND_HYPERTREE),
                      ('valuation', KIND_JOINT), ('hyperedges', KIND_HYPERGRAPH)):
        if key in document:
            return kind
    raise SerializationError('cannot tell what the document describes; keys are {}'.format(sorted(document)))


class Deserializer:
    """
    Rebuilds Beltree objects from documents. Masses are checked
    to sum to one within ``load_tolerance``.
    """

    def __init__(self, document, env=None):
        if not isinstance(document, dict):
            raise SerializationError('a document must be a JSON object')
        self.document = document
        self.env = env
        self.model = None

    def deserialize(self):
        try:
            return self._dispatch(_infer_kind(self.document))
        except (LookupError, TypeError, ValueError) as exc:
            raise SerializationError('malformed {} document: {!r}'.format(
                self.document.get('kind', 'untagged'), exc)) from exc

    def _dispatch(self, kind):
        if kind == KIND_JOINT:
            return self._deserialize_joint()
        elif kind == KIND_HYPERGRAPH:
            return self._deserialize_hypergraph()
        elif kind == KIND_HYPERTREE:
            return self._deserialize_hypertree()
        elif kind == KIND_NETWORK:
            return self._deserialize_network()
        elif kind == KIND_DATASET:
            return self._deserialize_dataset_header()
        else:
            raise SerializationError('unknown document kind "{}"'.format(kind))

    def _deserialize_variables(self):
        entries = self.document['variables']
        try:
            self.model = Model([Variable(entry['name'], entry['domain']) for entry in entries])
        except FrameError as exc:
            raise SerializationError('bad variable list: {}'.format(exc)) from exc
        return self.model

    def _scope(self, names):
        try:
            return self.model.scope(names)
        except FrameError as exc:
            raise SerializationError(str(exc)) from exc

    def deserialize_configset(self, scope, configs):
        try:
            return ConfigSet.from_configurations(scope, configs)
        except FrameError as exc:
            raise SerializationError('bad configuration set on {}: {}'.format(scope, exc)) from exc

    def _deserialize_valuation(self, fragment):
        scope = self._scope(fragment['scope'])
        masses = {}
        for entry in fragment['masses']:
            focal = self.deserialize_configset(scope, entry['set'])
            masses[focal.mask] = masses.get(focal.mask, 0.0) + float(entry['mass'])
        bel = BeliefValuation(scope, masses, self.env, check=False)
        tolerance = setting('load_tolerance', self.env)
        if abs(bel.total - 1.0) > tolerance:
            raise SerializationError('masses on {} sum to {!r}, not 1'.format(scope, bel.total))
        return bel

    def _deserialize_joint(self):
        self._deserialize_variables()
        return self._deserialize_valuation(self.document['valuation'])

    def _deserialize_hypergraph(self):
        edges = self.document['hyperedges']
        vertices = self.document.get('vertices')
        return Hypergraph(edges, vertices)

    def _deserialize_hypertree(self):
        self._deserialize_variables()
        edges = [frozenset(edge) for edge in self.document['hyperedges']]
        branches = self.document.get('branches')
        if branches is None:
            branches = _infer_branches(edges)
        seq = ConstructionSequence(edges, branches)
        if not check_construction_sequence(seq):
            raise SerializationError('hyperedges {} are not a construction sequence'.format(
                [sorted(edge) for edge in edges]))
        factors = [self._deserialize_valuation(fragment) for fragment in self.document['factors']]
        return MarkovTree(seq, factors)

    def _deserialize_network(self):
        model = self._deserialize_variables()
        dag = nx.DiGraph()
        valuations = {}
        for node in self.document['nodes']:
            name = node['var']
            dag.add_node(name)
            dag.add_edges_from((parent, name) for parent in node.get('parents', []))
            if 'valuation' in node:
                valuations[name] = self._deserialize_valuation(node['valuation'])
        network = BeliefNetwork(model, dag, valuations)
        if 'tree' in self.document:
            tree_edges = [tuple(edge) for edge in self.document['tree']]
            return GeneratedDistribution(None, tree_edges, network, None)
        return network

    def _deserialize_dataset_header(self):
        self._deserialize_variables()
        return self._scope(self.document['scope'])


def _infer_branches(edges):
    """
    For hyperedges listed in construction order without branch
    indices, take the first earlier hyperedge that holds every
    variable shared with the prefix.
    """
    branches = [None]
    for k in range(1, len(edges)):
        shared = edges[k] & frozenset().union(*edges[:k])
        branch = next((j for j in range(k) if shared and shared <= edges[j]), None)
        if branch is None:
            raise SerializationError('hyperedge {} has no branch among the earlier ones'.format(sorted(edges[k])))
        branches.append(branch)
    return branches


def serialize(value):
    return Serializer(value).serialize()


def deserialize(document, env=None):
    return Deserializer(document, env).deserialize()


def write(value, fp):
    json.dump(serialize(value), fp, indent=1)
    fp.write('\n')


def read(fp, env=None, name='input'):
    try:
        document = json.load(fp)
    except json.JSONDecodeError as exc:
        raise SerializationError('{} is not valid JSON: {}'.format(name, exc)) from exc
    return deserialize(document, env)


def dump(value, path):
    """
    Write a value as a JSON document to `path`.
    """
    with open(path, 'w') as fp:
        write(value, fp)


def load(path, env=None):
    """
    Read a JSON document from `path` and rebuild its object.
    """
    with open(path) as fp:
        return read(fp, env, path)

def dump_dataset(data, fp):
    """
    Write a dataset as JSON lines: a header, then one record per line.
    """
    serializer = Serializer(data)
    fp.write(json.dumps(serializer.serialize()) + '\n')
    for focal in data:
        fp.write(json.dumps(serializer.serialize_record(focal)) + '\n')


def load_dataset(fp, env=None):
    lines = [line for line in fp if line.strip()]
    if not lines:
        raise SerializationError('empty dataset file')
    try:
        header = json.loads(lines[0])
        deserializer = Deserializer(header, env)
        scope = deserializer.deserialize()
        records = [deserializer.deserialize_configset(scope, json.loads(line)) for line in lines[1:]]
    except json.JSONDecodeError as exc:
        raise SerializationError('bad dataset line: {}'.format(exc)) from exc
    expected = header.get('records')
    if expected is not None and expected != len(records):
        raise SerializationError('dataset header announces {} records, found {}'.format(expected, len(records)))
    log.info('read %d records on %s', len(records), scope)
    return SampleDataset(scope, records)
