"""
propagation.py
----------------------------------------

Markov trees and two-phase message passing.

A Markov tree has one node per hyperedge of a construction
sequence and one edge between every hyperedge and its branch.
Each node carries a factor on its hyperedge; the joint is the
combination of all factors. `propagate` computes the marginal
of that joint (with evidence) on every node without ever
building the joint: a collect pass sends messages towards the
root, a distribute pass sends them back out, and each node
combines its factor with everything it received.

"""

import logging

import networkx as nx

from .environment import setting
from .hypergraph import Hypergraph, edge_key, hypertree_cover
from .utils import BeltreeError
from .valuation import combine, combine_all, marginalize, normalize, vacuous_extend


log = logging.getLogger(__name__)


class PropagationError(BeltreeError):
    pass


class JointLimitError(BeltreeError):
    exit_code = 3


class MarkovTree:
    """
    A construction sequence with a factor attached to every
    hyperedge. Factors are vacuously extended to their node's
    hyperedge on construction.
    """

    def __init__(self, seq, factors):
        factors = list(factors)
        if len(factors) != len(seq):
            raise PropagationError('{} factors for {} hyperedges'.format(len(factors), len(seq)))
        self.model = factors[0].scope.model
        self.seq = seq
        self.scopes = [self.model.scope(sorted(edge)) for edge in seq]
        self.factors = []
        for k, (scope, factor) in enumerate(zip(self.scopes, factors)):
            if not factor.scope.issubset(scope):
                raise PropagationError('factor {} on {} does not fit hyperedge {}'.format(
                    k, factor.scope, scope))
            self.factors.append(vacuous_extend(factor, scope))
        self.graph = nx.Graph()
        self.graph.add_nodes_from(range(len(seq)))
        for k, branch in seq.tree_edges():
            if not seq.separator(k):
                raise PropagationError('hyperedges {} and {} share no variable'.format(k, branch))
            self.graph.add_edge(k, branch)

    def __len__(self):
        return len(self.scopes)

    def separator(self, j, k):
        return self.scopes[j].intersection(self.scopes[k])

    def node_for(self, scope):
        """
        Lowest-index node whose hyperedge contains `scope`.
        """
        for k, node_scope in enumerate(self.scopes):
            if scope.issubset(node_scope):
                return k
        raise PropagationError('no hyperedge contains {}'.format(scope))

    def __repr__(self):
        return 'MarkovTree({!r})'.format(self.seq)


def build_markov_tree(seq, factors):
    return MarkovTree(seq, factors)


class MessageStore:
    """
    Messages keyed by directed tree edge (sender, receiver).
    """

    def __init__(self, tree):
        self.tree = tree
        self.messages = {}

    def put(self, sender, receiver, message):
        expected = self.tree.separator(sender, receiver)
        if message.scope != expected:
            raise PropagationError('message {}->{} on {} instead of {}'.format(
                sender, receiver, message.scope, expected))
        self.messages[(sender, receiver)] = message

    def incoming(self, node, excluding=None):
        return [self.messages[(other, node)] for other in sorted(self.tree.graph[node])
                if other != excluding]

    def __len__(self):
        return len(self.messages)


def _send(factors, store, sender, receiver):
    tree = store.tree
    local = combine_all([factors[sender]] + store.incoming(sender, excluding=receiver))
    store.put(sender, receiver, marginalize(local, tree.separator(sender, receiver)))


def propagate(tree, evidence=(), root=0):
    """
    Node marginals of the joint combined with `evidence`, as a
    list indexed like the tree's hyperedges. Each evidence
    potential joins the factor of the lowest-index node containing
    its scope. Results are unnormalized; conflict stays on ∅.
    """
    factors = list(tree.factors)
    for potential in evidence:
        k = tree.node_for(potential.scope)
        factors[k] = combine(factors[k], potential.valuation)
        log.debug('evidence on %s placed at node %d', potential.scope, k)
    store = MessageStore(tree)
    parent = dict(nx.bfs_predecessors(tree.graph, root))
    for node in nx.dfs_postorder_nodes(tree.graph, source=root):
        if node in parent:
            _send(factors, store, node, parent[node])
    for node in nx.dfs_preorder_nodes(tree.graph, source=root):
        for child in sorted(tree.graph[node]):
            if parent.get(child) == node:
                _send(factors, store, node, child)
    log.debug('propagation from root %d sent %d messages', root, len(store))
    return [combine_all([factors[k]] + store.incoming(k), tree.scopes[k]) for k in range(len(tree))]


def brute_force_joint(factors, env=None):
    """
    Combine every factor on the union of their scopes.
    """
    factors = list(factors)
    scope = factors[0].scope
    for factor in factors[1:]:
        scope = scope.union(factor.scope)
    limit = setting('joint_limit', env)
    if scope.size > limit:
        raise JointLimitError('joint frame of {} has {} configurations; the limit is {}'.format(
            scope, scope.size, limit))
    return combine_all(factors, scope)


def query(results, variable, normalize_result=True, env=None):
    """
    Marginal of one variable, read from the first node result
    whose scope contains it.
    """
    for result in results:
        if variable in result.scope:
            marginal = marginalize(result, result.scope.model.scope([variable]))
            return normalize(marginal, env) if normalize_result else marginal
    raise PropagationError('no node holds variable "{}"'.format(variable))


def markov_tree_from_network(network):
    """
    A Markov tree for a belief network: its family sets are covered
    by a hypertree and every node valuation joins the first tree
    node containing its family.
    """
    families = [frozenset(family) for family in network.families()]
    seq = hypertree_cover(Hypergraph(families, network.model.names))
    assigned = [[] for _ in seq]
    for family, variable in zip(families, network.variables):
        k = next(k for k, edge in enumerate(seq) if family <= edge)
        assigned[k].append(network.valuations[variable])
    model = network.model
    factors = [combine_all(parts, model.scope(edge_key(edge))) for parts, edge in zip(assigned, seq)]
    return MarkovTree(seq, factors)
