"""
network.py
----------------------------------------

Belief networks: a dag over the variables whose nodes store the
mk-conditional valuation of a variable given its parents. The
distribution a network represents is the combination of all its
node valuations.

Besides the structure questions (induced hypergraph,
compatibility with a hypergraph, d-separation, conditional
independence) this module converts a valuated hypertree into a
belief network. The hypertree's hyperedges are peeled from the
last to the first. At each step the peeled hyperedge takes its
share of the remaining factors; the share is split into the part
living on the separator, which goes back to the branch, and the
mk-conditional of the rest, which becomes the valuations of the
variables the hyperedge introduced.

"""

import itertools
import logging

import networkx as nx

from .environment import setting
from .frames import ScopeError
from .hypergraph import Hypergraph, edge_key, reduce
from .utils import BeltreeError
from .valuation import (DenseLimitError, NotDecombinableError, allclose, combine, combine_all,
                        marginalize, mk_condition)


log = logging.getLogger(__name__)


class NetworkError(BeltreeError):
    pass


class BeliefNetwork:
    """
    A dag over model variables with one valuation per node, on
    the node's family (the variable and its parents). A network
    may be a bare structure with no valuations.
    """

    def __init__(self, model, dag, valuations=None):
        for name in dag.nodes:
            if name not in model:
                raise NetworkError('dag node "{}" is not a model variable'.format(name))
        if not nx.is_directed_acyclic_graph(dag):
            raise NetworkError('the network graph has a cycle: {}'.format(nx.find_cycle(dag)))
        self.model = model
        self.dag = dag
        self.variables = tuple(name for name in model.names if name in dag)
        self.valuations = dict(valuations or {})
        for name, valuation in self.valuations.items():
            expected = self.family_scope(name)
            if valuation.scope != expected:
                raise NetworkError('valuation of "{}" is on {}, its family is {}'.format(
                    name, valuation.scope, expected))

    def parents(self, name):
        return tuple(other for other in self.model.names if self.dag.has_edge(other, name))

    def family(self, name):
        return (name,) + self.parents(name)

    def families(self):
        return [self.family(name) for name in self.variables]

    def family_scope(self, name):
        return self.model.scope(self.family(name))

    @property
    def is_valuated(self):
        return set(self.valuations) == set(self.variables)

    def __repr__(self):
        arcs = ', '.join('{}->{}'.format(u, v) for u, v in sorted(self.dag.edges))
        return 'BeliefNetwork({}; {})'.format(','.join(self.variables), arcs)


def _name_set(names):
    """
    A variable set from a single name or an iterable of names.
    """
    if isinstance(names, str):
        return frozenset([names])
    return frozenset(names)


class CIStatement:
    """
    I(J, K | L) for pairwise disjoint variable sets.
    """

    def __init__(self, j, k, l=()):
        self.j = _name_set(j)
        self.k = _name_set(k)
        self.l = _name_set(l)
        if self.j & self.k or self.j & self.l or self.k & self.l:
            raise NetworkError('{} has overlapping variable sets'.format(self))
        if not self.j or not self.k:
            raise NetworkError('{} needs nonempty J and K'.format(self))

    def __repr__(self):
        return 'I({}, {} | {})'.format(sorted(self.j), sorted(self.k), sorted(self.l))


def _families_of(structure):
    if isinstance(structure, BeliefNetwork):
        return structure.families()
    return [(name,) + tuple(structure.predecessors(name)) for name in structure.nodes]


def induced_hypergraph(network):
    """
    The reduced hypergraph of the network's family sets.
    """
    families = _families_of(network)
    return reduce(Hypergraph(families))


def is_compatible(network, h):
    """
    Does the network (or bare dag) induce exactly reduce(h)?
    """
    return induced_hypergraph(network) == reduce(h)


def _parent_candidates(name, edges):
    seen = set()
    candidates = []
    for edge in edges:
        if name not in edge:
            continue
        others = sorted(edge - {name})
        for size in range(len(others) + 1):
            for parents in itertools.combinations(others, size):
                if parents not in seen:
                    seen.add(parents)
                    candidates.append(parents)
    return sorted(candidates, key=lambda p: (len(p), p))


def enumerate_compatible(h, max_vars=None, env=None):
    """
    Every dag whose induced reduced hypergraph is reduce(h). Each
    family must fit inside a hyperedge, so parent sets are only
    drawn from the hyperedges containing the variable.
    """
    if max_vars is None:
        max_vars = setting('enumeration_limit', env)
    names = sorted(h.vertices)
    if len(names) > max_vars:
        raise NetworkError('{} variables exceed the enumeration limit of {}'.format(len(names), max_vars))
    target = reduce(h)
    candidates = [_parent_candidates(name, target.hyperedges) for name in names]
    found = []
    for choice in itertools.product(*candidates):
        families = [(name,) + parents for name, parents in zip(names, choice)]
        if reduce(Hypergraph(families)) != target:
            continue
        dag = nx.DiGraph()
        dag.add_nodes_from(names)
        dag.add_edges_from((parent, name) for name, parents in zip(names, choice) for parent in parents)
        if nx.is_directed_acyclic_graph(dag):
            found.append(dag)
    log.debug('%d compatible dags for %s', len(found), h)
    return found


def d_separated(dag, j, k, l=()):
    """
    d-separation of `j` and `k` by `l`, decided on the moral graph
    of the ancestral set of all three.
    """
    j, k, l = _name_set(j), _name_set(k), _name_set(l)
    if j & k or j & l or k & l:
        raise NetworkError('d-separation needs disjoint sets, got {}, {}, {}'.format(j, k, l))
    relevant = j | k | l
    ancestral = set(relevant)
    for name in relevant:
        ancestral |= nx.ancestors(dag, name)
    moral = nx.moral_graph(dag.subgraph(ancestral))
    moral.remove_nodes_from(l)
    return not any(nx.has_path(moral, a, b) for a in j for b in k)


def ci_holds(bel, j, k, l=(), tolerance=None, env=None):
    """
    Check the identity defining I(J, K | L) on the marginal of
    `bel` on J ∪ K ∪ L: it must equal the combination of the
    mk-conditionals on J ∪ L and K ∪ L given L with the marginal
    on L. With L empty the marginals on J and K are combined.
    """
    statement = CIStatement(j, k, l)
    model = bel.scope.model
    left = marginalize(bel, model.scope(statement.j | statement.k | statement.l))
    if not statement.l:
        right = combine(marginalize(bel, model.scope(statement.j)),
                        marginalize(bel, model.scope(statement.k)))
    else:
        given = model.scope(statement.l)
        parts = [mk_condition(marginalize(bel, model.scope(statement.j | statement.l)), given, env),
                 mk_condition(marginalize(bel, model.scope(statement.k | statement.l)), given, env),
                 marginalize(bel, given)]
        right = combine_all(parts)
    return allclose(left, right, tolerance, env)


def network_joint(network, env=None):
    """
    The distribution of a valuated network: the combination of
    all node valuations.
    """
    if not network.is_valuated:
        raise NetworkError('network {} has no valuation for {}'.format(
            network, sorted(set(network.variables) - set(network.valuations))))
    scope = network.model.scope(network.variables)
    limit = setting('joint_limit', env)
    if scope.size > limit:
        raise NetworkError('joint frame of {} configurations exceeds the limit of {}'.format(scope.size, limit))
    return combine_all([network.valuations[name] for name in network.variables], scope)


def _marginal_of(source, scope):
    if hasattr(source, 'marginal'):
        return source.marginal(scope)
    return marginalize(source, scope)


def valuate_network(model, dag, source, env=None):
    """
    Valuate every node of `dag` from the family marginals of
    `source` (a joint valuation, or anything with a `marginal`
    method). Only the family marginal of a node is consulted.
    """
    network = BeliefNetwork(model, dag)
    valuations = {}
    for name in network.variables:
        family = network.family_scope(name)
        parents = model.scope(network.parents(name))
        valuations[name] = mk_condition(_marginal_of(source, family), parents, env)
    return BeliefNetwork(model, dag, valuations)


def _split(model, bel, separator, introduced, env):
    """
    Chain the mk-conditional of `bel` given `separator` into one
    valuation per introduced variable: the j-th is the marginal on
    separator ∪ X_1..X_j conditioned on separator ∪ X_1..X_{j-1}.
    """
    pieces = {}
    given = list(separator)
    for name in introduced:
        family = model.scope(given + [name])
        pieces[name] = mk_condition(marginalize(bel, family), model.scope(given), env)
        given.append(name)
    return pieces


def hypertree_to_network(tree, env=None):
    """
    Convert a valuated hypertree into a belief network representing
    the same joint. Within the variables a hyperedge introduces the
    dag is complete, ordered by the model; every separator variable
    is a parent of each of them.
    """
    model = tree.model
    seq = tree.seq
    factors = list(tree.factors)
    dag = nx.DiGraph()
    valuations = {}
    for m in range(len(seq) - 1, -1, -1):
        branch = seq.branches[m]
        separator = [name for name in model.names if name in seq.separator(m)]
        introduced = [name for name in model.names if name in seq.residual(m)]
        try:
            if branch is None:
                peeled = factors[0]
            else:
                peeled, factors = _peel(model, seq, factors, m, env)
            log.debug('step %d: %s introduces %s given %s', m, tree.scopes[m], introduced, separator)
            valuations.update(_split(model, peeled, separator, introduced, env))
        except (NotDecombinableError, DenseLimitError) as exc:
            raise exc.__class__('peeling hyperedge {} {}: {}'.format(m, tree.scopes[m], exc)) from exc
        dag.add_nodes_from(introduced)
        for pos, name in enumerate(introduced):
            dag.add_edges_from((parent, name) for parent in separator + introduced[:pos])
    return BeliefNetwork(model, dag, valuations)


def _peel(model, seq, factors, m, env):
    """
    One peeling step for hyperedge m. Returns the valuation on h_m
    whose mk-conditional given the separator goes to the network,
    and the updated factors of the remaining hyperedges.
    """
    scopes = [model.scope(edge_key(edge)) for edge in seq]
    branch = seq.branches[m]
    shares = {}
    for k in range(m):
        common = scopes[k].intersection(scopes[m])
        if common:
            shares[k] = marginalize(factors[k], common)
    peeled = combine_all([factors[m]] + [shares[k] for k in sorted(shares)], scopes[m])
    separator = scopes[m].intersection(scopes[branch])
    if not separator:
        raise ScopeError('hyperedge {} shares nothing with its branch'.format(m))
    updated = factors[:m]
    for k, share in shares.items():
        updated[k] = mk_condition(factors[k], share.scope, env)
    updated[branch] = combine(updated[branch], marginalize(peeled, separator))
    return peeled, updated
