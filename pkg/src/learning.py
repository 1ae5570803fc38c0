"""
learning.py
----------------------------------------

Recovering tree-structured belief networks, Chow/Liu style.

Every pair of variables gets a dependence weight. The
probabilistic weight is mutual information. The general weight,
DEP_BN, asks how well the pair's marginal is approximated by
independence, or by combining the two variables' conditionals
given some third variable. The divergence of the best
approximation is the weight. A pair that is separated in the
generating tree has a perfect approximation through any
variable on the path between them, and so weight zero.

A maximum-weight spanning tree of the weights is then oriented
from a root and each node is valuated from the marginal of its
family.

"""

import itertools
import logging
import math

import networkx as nx
import numpy as np
from networkx.utils import UnionFind

from .environment import setting
from .frames import ConfigSet, project_mask
from .generator import estimate_marginal
from .network import network_joint, valuate_network
from .utils import BeltreeError
from .valuation import (NotDecombinableError, combine, combine_all, commonality_at, commonality_table,
                        delta_divergence, marginalize, mk_condition, total_variation)


log = logging.getLogger(__name__)

MEASURES = ('dep-bn', 'dep-kl')


class LearningError(BeltreeError):
    exit_code = 3


class MarginalSource:
    """
    Marginals of a target distribution on small scopes, cached by
    scope.
    """

    def __init__(self, model):
        self.model = model
        self._cache = {}

    def marginal(self, scope):
        if isinstance(scope, (list, tuple)):
            scope = self.model.scope(scope)
        if scope not in self._cache:
            self._cache[scope] = self._compute(scope)
        return self._cache[scope]

    def unsmoothed(self):
        return self

    def _compute(self, scope):
        raise NotImplementedError


class ExactSource(MarginalSource):
    def __init__(self, joint):
        super().__init__(joint.scope.model)
        self.joint = joint

    def _compute(self, scope):
        return marginalize(self.joint, scope)


class EmpiricalSource(MarginalSource):
    """
    Marginals estimated from a dataset. With smoothing, each one
    is mixed with the vacuous valuation at ε = 1 / (2n) so that no
    commonality is zero.
    """

    def __init__(self, data, smoothing=True):
        super().__init__(data.model)
        self.data = data
        self.smoothing = smoothing
        self.epsilon = 1.0 / (2 * len(data)) if smoothing and len(data) else 0.0

    def unsmoothed(self):
        if not self.smoothing:
            return self
        return EmpiricalSource(self.data, smoothing=False)

    def _compute(self, scope):
        return estimate_marginal(self.data, scope, self.epsilon)


def as_source(source):
    if isinstance(source, MarginalSource):
        return source
    return ExactSource(source)


class Dependence:
    """
    A DEP value and the arm that attained it: None for direct
    independence, otherwise the background variable.
    """

    def __init__(self, value, arm=None):
        self.value = value
        self.arm = arm

    def __repr__(self):
        return 'Dependence({:.6g}, arm={})'.format(self.value, self.arm)

    def __eq__(self, other):
        if isinstance(other, self.__class__):
            return self.value == other.value and self.arm == other.arm
        return False


def dep_kl(bel):
    """
    Mutual information (natural log) of a Bayesian valuation on
    two variables.
    """
    if len(bel.scope) != 2:
        raise LearningError('mutual information needs two variables, got {}'.format(bel.scope))
    if not bel.is_bayesian():
        raise LearningError('mutual information needs a Bayesian valuation on {}'.format(bel.scope))
    joint = bel.probability_table()
    outer = np.outer(joint.sum(axis=1), joint.sum(axis=0))
    positive = joint > 0
    return float(np.sum(joint[positive] * np.log(joint[positive] / outer[positive])))


def ternary_background_joint(source, x1, x2, x3, env=None):
    """
    Approximate the marginal on {x1, x2} by combining the
    mk-conditionals of x1 and of x2 given x3 with the marginal of
    x3, then marginalizing x3 out.
    """
    source = as_source(source)
    model = source.model
    if len({x1, x2, x3}) != 3:
        raise LearningError('background joint needs three distinct variables')
    given = model.scope([x3])
    parts = []
    for name in (x1, x2):
        try:
            parts.append(mk_condition(source.marginal([name, x3]), given, env))
        except NotDecombinableError as exc:
            raise NotDecombinableError('conditional of {} given {}: {}'.format(name, x3, exc)) from exc
    parts.append(source.marginal(given))
    return marginalize(combine_all(parts), model.scope([x1, x2]))


def dep_bn(source, x1, x2, env=None):
    """
    DEP_BN of a pair: the smaller of the divergence of direct
    independence from the pair marginal and, over every other
    variable, the divergence of the background joint through it.
    Ties keep the earlier arm.
    """
    source = as_source(source)
    model = source.model
    pair = source.marginal([x1, x2])
    independent = combine(source.marginal([x1]), source.marginal([x2]))
    best = Dependence(delta_divergence(independent, pair), None)
    for x3 in model.names:
        if x3 in (x1, x2):
            continue
        approx = ternary_background_joint(source, x1, x2, x3, env)
        value = delta_divergence(approx, pair)
        if value < best.value:
            best = Dependence(value, x3)
    return best


class DepMatrix:
    """
    Symmetric pairwise dependence values with the arm behind each.
    """

    def __init__(self, names):
        self.names = tuple(names)
        self.values = np.full((len(self.names), len(self.names)), np.nan)
        self.arms = {}

    def set(self, x, y, dependence):
        i, j = self.names.index(x), self.names.index(y)
        self.values[i, j] = self.values[j, i] = dependence.value
        self.arms[frozenset((x, y))] = dependence.arm

    def value(self, x, y):
        return float(self.values[self.names.index(x), self.names.index(y)])

    def arm(self, x, y):
        return self.arms.get(frozenset((x, y)))

    def pairs(self):
        return list(itertools.combinations(self.names, 2))

    def as_dict(self):
        return {'{}-{}'.format(x, y): {'value': self.value(x, y), 'arm': self.arm(x, y)}
                for x, y in self.pairs()}

    def __repr__(self):
        return 'DepMatrix({})'.format(', '.join('{}-{}: {:.4g}'.format(x, y, self.value(x, y))
                                                 for x, y in self.pairs()))


def dependence_matrix(source, measure='dep-bn', env=None):
    source = as_source(source)
    if measure not in MEASURES:
        raise LearningError('unknown measure "{}"; use one of {}'.format(measure, ', '.join(MEASURES)))
    matrix = DepMatrix(source.model.names)
    kl_source = source.unsmoothed()
    for x, y in matrix.pairs():
        if measure == 'dep-kl':
            dependence = Dependence(dep_kl(kl_source.marginal([x, y])))
        else:
            dependence = dep_bn(source, x, y, env)
        if math.isnan(dependence.value):
            raise LearningError('dependence of {} and {} is NaN'.format(x, y))
        matrix.set(x, y, dependence)
    return matrix


def maximum_spanning_tree(matrix):
    """
    Kruskal on descending weight; +inf first, equal weights in
    lexicographic pair order. Returns the chosen pairs and the
    groups of tied weights met on the way.
    """
    weighted = sorted(((matrix.value(x, y), (x, y)) for x, y in matrix.pairs()),
                      key=lambda item: (-item[0], item[1]))
    ties = []
    for value, group in itertools.groupby(weighted, key=lambda item: item[0]):
        group = [pair for _, pair in group]
        if len(group) > 1:
            ties.append({'value': value, 'pairs': group})
            log.debug('tie at %.6g between %s', value, group)
    components = UnionFind(matrix.names)
    chosen = []
    for value, (x, y) in weighted:
        if components[x] != components[y]:
            components.union(x, y)
            chosen.append((x, y))
            log.info('edge %s-%s with weight %.6g', x, y, value)
    return chosen, ties


class LearnedTree:
    """
    A learned undirected tree, its root, and the belief network
    obtained by orienting the tree away from the root.
    """

    def __init__(self, edges, root, network, matrix, ties=()):
        self.edges = sorted(tuple(edge) for edge in edges)
        self.root = root
        self.network = network
        self.matrix = matrix
        self.ties = list(ties)

    def edge_set(self):
        return {frozenset(edge) for edge in self.edges}

    def __repr__(self):
        return 'LearnedTree(root={}, edges={})'.format(self.root, self.edges)


def learn_tree(source, measure='dep-bn', root=None, env=None):
    """
    Learn a tree network from an exact joint, a MarginalSource or
    a SampleDataset (smoothed).
    """
    if hasattr(source, 'masks'):
        source = EmpiricalSource(source)
    source = as_source(source)
    model = source.model
    if len(model) < 2:
        raise LearningError('learning a tree needs at least two variables')
    matrix = dependence_matrix(source, measure, env)
    edges, ties = maximum_spanning_tree(matrix)
    root = model.names[0] if root is None else root
    if root not in model:
        raise LearningError('root "{}" is not a variable'.format(root))
    dag = nx.bfs_tree(nx.Graph(edges), root)
    dag.add_nodes_from(model.names)
    network = valuate_network(model, dag, source, env)
    return LearnedTree(edges, root, network, matrix, ties)


def network_delta(network, reference, env=None):
    """
    δ(network joint, reference) without building the network's
    joint: the joint's commonality at a set is the product of the
    node commonalities at its projections.
    """
    tables = [(network.valuations[name].scope, commonality_table(network.valuations[name], env))
              for name in network.variables]
    terms = []
    for mask, weight in reference.masses.items():
        if weight <= 0:
            continue
        q_approx = math.prod(table[project_mask(mask, reference.scope, scope)] for scope, table in tables)
        if q_approx <= 0:
            return math.inf
        q_ref = commonality_at(reference, ConfigSet(reference.scope, mask))
        terms.append(weight * abs(math.log(q_ref / q_approx)))
    return math.fsum(terms)


def recovery_report(learned, truth_edges, true_joint=None, env=None):
    """
    Compare a learned tree with the generating one: edge-set
    Hamming distance and, given the true joint, the δ divergence
    of the learned joint (and its total variation when the joint
    frame is small).
    """
    truth = {frozenset(edge) for edge in truth_edges}
    found = learned.edge_set()
    report = {
        'edges': [list(edge) for edge in learned.edges],
        'truth': sorted(sorted(edge) for edge in truth),
        'hamming': len(found ^ truth),
        'recovered': found == truth,
    }
    if true_joint is not None:
        report['delta'] = network_delta(learned.network, true_joint, env)
        if true_joint.scope.size <= setting('report_limit', env):
            report['total_variation'] = total_variation(network_joint(learned.network, env), true_joint)
    return report
