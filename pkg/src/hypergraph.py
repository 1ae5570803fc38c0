"""
hypergraph.py
----------------------------------------

Hypergraphs over variable names and the structure operations
needed for local computation: reduction, covering, twig and
branch detection, hypertree construction sequences and
hypertree covers found by variable elimination.

Hyperedges are frozensets of names. Wherever an order is needed
they are compared as sorted tuples, so every result here is
deterministic.

"""

import itertools
import logging

import networkx as nx

from .utils import BeltreeError


log = logging.getLogger(__name__)


class HypergraphError(BeltreeError):
    pass


def edge_key(edge):
    """
    Sort key of a hyperedge: its sorted tuple of names.
    """
    return tuple(sorted(edge))


class Hypergraph:
    """
    A nonempty set of nonempty hyperedges over a vertex set.
    Duplicate hyperedges collapse; contained ones are kept until
    `reduce` removes them.
    """
    def __init__(self, hyperedges, vertices=None):
        edges = {frozenset(str(v) for v in edge) for edge in hyperedges}
        if not edges:
            raise HypergraphError('a hypergraph needs at least one hyperedge')
        if any(not edge for edge in edges):
            raise HypergraphError('hyperedges must not be empty')
        covered = frozenset().union(*edges)
        self.vertices = frozenset(str(v) for v in vertices) if vertices is not None else covered
        if not covered <= self.vertices:
            raise HypergraphError('hyperedges use vertices {} outside the vertex set'.format(
                sorted(covered - self.vertices)))
        self.hyperedges = tuple(sorted(edges, key=edge_key))

    def __len__(self):
        return len(self.hyperedges)

    def __iter__(self):
        return iter(self.hyperedges)

    def __contains__(self, edge):
        return frozenset(edge) in self.hyperedges

    @property
    def width(self):
        return max(len(edge) for edge in self.hyperedges)

    def __repr__(self):
        return 'Hypergraph({})'.format(', '.join('{' + ','.join(edge_key(e)) + '}' for e in self.hyperedges))

    def __eq__(self, other):
        if isinstance(other, self.__class__):
            return set(self.hyperedges) == set(other.hyperedges)
        return False

    def __hash__(self):
        return hash(frozenset(self.hyperedges))


class ConstructionSequence:
    """
    An ordering h_1..h_n of a hypertree's hyperedges with branch
    indices: for k >= 2, h_k is a twig of {h_1..h_k} with branch
    h_{branches[k]}. Positions are zero-based here and the root
    has branch None.
    """
    def __init__(self, hyperedges, branches):
        self.hyperedges = tuple(frozenset(edge) for edge in hyperedges)
        self.branches = tuple(branches)
        if not self.hyperedges:
            raise HypergraphError('a construction sequence needs at least one hyperedge')
        if len(self.branches) != len(self.hyperedges):
            raise HypergraphError('{} branch indices for {} hyperedges'.format(
                len(self.branches), len(self.hyperedges)))
        if self.branches[0] is not None:
            raise HypergraphError('the root hyperedge has no branch')
        for k, branch in enumerate(self.branches[1:], start=1):
            if branch is None or not 0 <= branch < k:
                raise HypergraphError('hyperedge {} needs a branch among the first {}'.format(k, k))

    def __len__(self):
        return len(self.hyperedges)

    def __iter__(self):
        return iter(self.hyperedges)

    def __getitem__(self, k):
        return self.hyperedges[k]

    @property
    def root(self):
        return self.hyperedges[0]

    def separator(self, k):
        """
        h_k ∩ h_{i_k}; empty for the root.
        """
        branch = self.branches[k]
        if branch is None:
            return frozenset()
        return self.hyperedges[k] & self.hyperedges[branch]

    def residual(self, k):
        """
        h_k − h_{i_k}: the variables the k-th hyperedge introduces.
        """
        return self.hyperedges[k] - self.separator(k)

    def tree_edges(self):
        return [(k, branch) for k, branch in enumerate(self.branches) if branch is not None]

    def as_hypergraph(self):
        return Hypergraph(self.hyperedges)

    @property
    def width(self):
        return max(len(edge) for edge in self.hyperedges)

    def __repr__(self):
        steps = []
        for edge, branch in zip(self.hyperedges, self.branches):
            name = '{' + ','.join(edge_key(edge)) + '}'
            steps.append(name if branch is None else '{}<-{}'.format(name, branch))
        return 'ConstructionSequence({})'.format(', '.join(steps))


def reduce(h):
    """
    Keep only the hyperedges not contained in another one.
    """
    maximal = [edge for edge in h.hyperedges if not any(edge < other for other in h.hyperedges)]
    return Hypergraph(maximal, h.vertices)


def covers(h, hp):
    """
    Does every hyperedge of `hp` lie inside some hyperedge of `h`?
    """
    return all(any(small <= big for big in h.hyperedges) for small in hp.hyperedges)


def find_twigs(h):
    """
    All twigs of `h` with their branches, as (twig, [branch, ...])
    pairs in hyperedge order.
    """
    edges = h.hyperedges
    if len(edges) < 2:
        return []
    twigs = []
    for twig in edges:
        others = [edge for edge in edges if edge != twig]
        shared = twig & frozenset().union(*others)
        branches = [edge for edge in others if twig & edge and shared <= edge]
        if branches:
            twigs.append((twig, branches))
    return twigs


def construction_sequence(h):
    """
    A construction sequence of `h`, or None if `h` is not a
    hypertree. Twigs are deleted one at a time, smallest first,
    and the deletion order is reversed.
    """
    remaining = list(h.hyperedges)
    peeled = []
    while len(remaining) > 1:
        twigs = find_twigs(Hypergraph(remaining))
        if not twigs:
            log.debug('no twig left among %d hyperedges; not a hypertree', len(remaining))
            return None
        twig, branches = twigs[0]
        peeled.append((twig, branches[0]))
        remaining.remove(twig)
    order = remaining + [twig for twig, _ in reversed(peeled)]
    branch_of = dict(peeled)
    branches = [None] + [order.index(branch_of[edge]) for edge in order[1:]]
    return ConstructionSequence(order, branches)


def check_construction_sequence(seq):
    """
    Re-check every prefix of `seq` against the definition of a
    twig. Does not trust, or call, the twig finder.
    """
    edges = seq.hyperedges
    if len(set(edges)) != len(edges):
        return False
    for k in range(1, len(edges)):
        twig = edges[k]
        branch = edges[seq.branches[k]]
        if twig == branch or not twig & branch:
            return False
        for vertex in twig:
            in_other = any(vertex in edges[j] for j in range(k + 1) if j != k)
            if in_other and vertex not in branch:
                return False
    return True


def is_hypertree(h):
    return construction_sequence(reduce(h)) is not None


def _fill_in(graph, node):
    neighbours = list(graph[node])
    return sum(1 for u, v in itertools.combinations(neighbours, 2) if not graph.has_edge(u, v))


def _primal_graph(h):
    graph = nx.Graph()
    graph.add_nodes_from(sorted(h.vertices))
    for edge in h.hyperedges:
        graph.add_edges_from(itertools.combinations(sorted(edge), 2))
    components = sorted((sorted(comp) for comp in nx.connected_components(graph)), key=lambda c: c[0])
    for left, right in zip(components, components[1:]):
        graph.add_edge(left[0], right[0])
    return graph


def hypertree_cover(h):
    """
    A construction sequence of a hypertree covering `h`. A
    hypertree is returned as is (reduced); otherwise variables are
    eliminated by minimum fill-in, ties broken by degree and then
    by name, and the elimination cliques form the cover.
    """
    reduced = reduce(h)
    seq = construction_sequence(reduced)
    if seq is not None:
        return seq
    graph = _primal_graph(h)
    cliques = []
    order = []
    while graph.number_of_nodes():
        node = min(graph.nodes, key=lambda n: (_fill_in(graph, n), graph.degree(n), n))
        neighbours = sorted(graph[node])
        cliques.append(frozenset(neighbours) | {node})
        graph.add_edges_from(itertools.combinations(neighbours, 2))
        graph.remove_node(node)
        order.append(node)
    log.debug('elimination order %s', order)
    seq = construction_sequence(reduce(Hypergraph(cliques, h.vertices)))
    if seq is None:
        raise HypergraphError('elimination did not produce a hypertree for {}'.format(h))
    return seq
