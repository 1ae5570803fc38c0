"""
generator.py
----------------------------------------

Synthetic data: random tree-structured belief distributions,
random valuated hypertrees, set-valued sampling from a joint
and marginal estimation from samples.

Every node of a generated tree carries a proper valuation that
keeps some mass on its whole frame. The joint's mass on the
whole frame is the product of those masses, and the joint
commonality of any set is at least that, so choosing each
node's full-frame mass at or above q_min ** (1 / n_vars) puts
every joint commonality at or above q_min.

"""

import logging
from collections import Counter
from dataclasses import dataclass

import networkx as nx
import numpy as np

from .frames import ConfigSet, Model, Variable, project_mask
from .hypergraph import ConstructionSequence
from .network import valuate_network
from .propagation import MarkovTree
from .utils import BeltreeError, full_mask
from .valuation import BeliefValuation, combine_all


log = logging.getLogger(__name__)

MAX_VARS = 10
VARIABLE_NAMES = 'ABCDEFGHIJ'


class GenerationError(BeltreeError):
    exit_code = 3


class DatasetError(BeltreeError):
    pass


@dataclass
class GeneratorConfig:
    """
    n_vars:
        Number of variables, 2 to 10. Variables are named A, B, ...

    domain_size:
        One size for every variable, or a list of sizes.

    focal:
        Informative focal sets per node valuation (besides the whole
        frame). 0 makes every node vacuous.

    q_min:
        Lower bound on every joint commonality. Not enforced for
        Bayesian distributions, whose commonalities are probabilities.
    """
    n_vars: int = 5
    domain_size: object = 2
    focal: int = 2
    q_min: float = 0.05
    seed: int = 0
    bayesian: bool = False
    max_retries: int = 20

    def __post_init__(self):
        if not 2 <= self.n_vars <= MAX_VARS:
            raise GenerationError('n_vars must be between 2 and {}, got {}'.format(MAX_VARS, self.n_vars))
        sizes = self.domain_sizes()
        if len(sizes) != self.n_vars or min(sizes) < 2:
            raise GenerationError('domain sizes {} do not fit {} variables'.format(sizes, self.n_vars))
        if self.focal < 0:
            raise GenerationError('focal must not be negative')
        if not 0.0 < self.q_min <= 1.0:
            raise GenerationError('q_min must lie in (0, 1], got {}'.format(self.q_min))
        if self.max_retries < 1:
            raise GenerationError('max_retries must be positive')

    def domain_sizes(self):
        if isinstance(self.domain_size, int):
            return [self.domain_size] * self.n_vars
        return [int(size) for size in self.domain_size]

    def model(self):
        return Model([Variable(name, [str(value) for value in range(size)])
                      for name, size in zip(VARIABLE_NAMES, self.domain_sizes())])


class GeneratedDistribution:
    """
    A generated tree: its undirected edges, the belief network
    holding the mk-conditionals of the joint, and the joint.
    """

    def __init__(self, config, tree_edges, network, joint):
        self.config = config
        self.tree_edges = tree_edges
        self.network = network
        self.joint = joint

    @property
    def model(self):
        return self.network.model

    def __repr__(self):
        seed = self.config.seed if self.config is not None else None
        return 'GeneratedDistribution(seed={}, edges={})'.format(seed, self.tree_edges)


def random_tree(rng, names):
    """
    A uniformly random labelled tree, as sorted name pairs.
    """
    if len(names) == 2:
        return [tuple(names)]
    prufer = rng.integers(0, len(names), size=len(names) - 2).tolist()
    tree = nx.from_prufer_sequence(prufer)
    return sorted(tuple(sorted((names[u], names[v]), key=names.index)) for u, v in tree.edges)


def _full_frame_mass(rng, floor):
    return floor + (1.0 - floor) * rng.uniform(0.0, 0.25)


def _split_mass(rng, total, count):
    return (total * rng.dirichlet(np.ones(count))).tolist()


def _conditional_sets(rng, model, child, parent, count):
    """
    Focal sets {(x, y): x in S_y} on {child, parent} with every S_y
    nonempty, at least one of them varying with y.
    """
    scope = model.scope([child, parent])
    child_domain = model[child].domain
    parent_domain = model[parent].domain
    sets = []
    while len(sets) < count:
        chosen = {}
        for y in parent_domain:
            members = rng.random(len(child_domain)) < 0.5
            if not members.any():
                members[rng.integers(len(child_domain))] = True
            chosen[y] = [x for x, keep in zip(child_domain, members) if keep]
        if len(parent_domain) > 1 and all(chosen[y] == chosen[parent_domain[0]] for y in parent_domain):
            continue
        configs = [{child: x, parent: y} for y in parent_domain for x in chosen[y]]
        focal = ConfigSet.from_configurations(scope, configs)
        if not focal.is_full():
            sets.append(focal.mask)
    return scope, sets


def _random_subsets(rng, scope, count):
    sets = []
    while len(sets) < count:
        members = rng.random(scope.size) < 0.5
        mask = sum(1 << pos for pos in np.flatnonzero(members).tolist())
        if 0 < mask < full_mask(scope.size):
            sets.append(mask)
    return sets


def _with_full_frame(rng, scope, sets, floor):
    full = _full_frame_mass(rng, floor) if sets else 1.0
    masses = {full_mask(scope.size): full}
    for mask, value in zip(sets, _split_mass(rng, 1.0 - full, len(sets)) if sets else []):
        masses[mask] = masses.get(mask, 0.0) + value
    return BeliefValuation(scope, masses)


def _bayesian_table(rng, size, rows=1):
    table = rng.dirichlet(np.ones(size), size=rows)
    return 0.9 * table + 0.1 / size


def _bayesian_factor(rng, model, child, parent):
    """
    The mk-conditional of a Bayesian family: P(child | parent) on
    the singletons, the balancing mass on the empty set.
    """
    if parent is None:
        scope = model.scope([child])
        return BeliefValuation.bayesian(scope, _bayesian_table(rng, model[child].size)[0])
    scope = model.scope([child, parent])
    table = _bayesian_table(rng, model[child].size, rows=model[parent].size)
    masses = {0: 1.0 - model[parent].size}
    for y_pos, y in enumerate(model[parent].domain):
        for x_pos, x in enumerate(model[child].domain):
            masses[1 << scope.config_index({child: x, parent: y})] = table[y_pos, x_pos]
    return BeliefValuation(scope, masses)


def generate_tree_distribution(cfg):
    """
    A random spanning tree over the variables, rooted at the first
    one, with a random factor per node; the joint is the
    combination of the factors and the network holds its
    mk-conditionals.
    """
    model = cfg.model()
    names = list(model.names)
    floor = cfg.q_min ** (1.0 / cfg.n_vars)
    for attempt in range(cfg.max_retries):
        rng = np.random.default_rng([cfg.seed, attempt])
        edges = random_tree(rng, names)
        undirected = nx.Graph(edges)
        dag = nx.bfs_tree(undirected, names[0])
        factors = []
        for name in names:
            parents = list(dag.predecessors(name))
            parent = parents[0] if parents else None
            if cfg.bayesian:
                factors.append(_bayesian_factor(rng, model, name, parent))
            elif parent is None:
                scope = model.scope([name])
                factors.append(_with_full_frame(rng, scope, _random_subsets(rng, scope, cfg.focal)
                                                if scope.size > 1 else [], floor))
            else:
                scope, sets = _conditional_sets(rng, model, name, parent, cfg.focal)
                factors.append(_with_full_frame(rng, scope, sets, floor))
        joint = combine_all(factors, model.scope())
        if cfg.bayesian or joint.mass(full_mask(joint.scope.size)) >= cfg.q_min * (1 - 1e-12):
            network = valuate_network(model, dag, joint)
            log.info('generated tree %s with %d joint focal sets', edges, len(joint.masses))
            return GeneratedDistribution(cfg, edges, network, joint)
        log.warning('attempt %d missed q_min=%g, retrying', attempt, cfg.q_min)
    raise GenerationError('no distribution reached q_min={} in {} attempts (seed {})'.format(
        cfg.q_min, cfg.max_retries, cfg.seed))


def random_hypertree(rng, names, max_edge_size=3):
    """
    A random construction sequence covering `names`: each new
    hyperedge takes a proper nonempty part of an earlier one and
    at least one new variable.
    """
    order = [str(name) for name in rng.permutation(names)]
    size = int(rng.integers(2, max_edge_size + 1)) if len(order) > 1 else 1
    edges = [frozenset(order[:size])]
    branches = [None]
    rest = order[size:]
    while rest:
        k = int(rng.integers(len(edges)))
        base = sorted(edges[k])
        size = int(rng.integers(2, max_edge_size + 1))
        shared = int(rng.integers(1, min(len(base), size)))
        separator = [str(name) for name in rng.choice(base, size=shared, replace=False)]
        fresh, rest = rest[:size - shared], rest[size - shared:]
        edges.append(frozenset(separator + fresh))
        branches.append(k)
    return ConstructionSequence(edges, branches)


def random_valuation(rng, scope, focal=2, floor=0.0, include_full=True):
    """
    A random proper valuation on `scope` with `focal` random focal
    sets. With `include_full` the whole frame gets some mass too,
    at least `floor` of it.
    """
    sets = _random_subsets(rng, scope, focal) if scope.size > 1 else []
    if floor > 0:
        return _with_full_frame(rng, scope, sets, floor)
    if include_full or not sets:
        sets = sets + [full_mask(scope.size)]
    masses = {}
    for mask, value in zip(sets, _split_mass(rng, 1.0, len(sets))):
        masses[mask] = masses.get(mask, 0.0) + value
    return BeliefValuation(scope, masses)


def random_markov_tree(rng, model, focal=2, max_edge_size=3, floor=0.0):
    """
    A Markov tree over every model variable with a random proper
    factor on each hyperedge. With `floor` > 0 each factor keeps
    at least that much mass on its whole frame.
    """
    seq = random_hypertree(rng, list(model.names), max_edge_size)
    factors = [random_valuation(rng, model.scope(sorted(edge)), focal, floor) for edge in seq]
    return MarkovTree(seq, factors)


def generate_hypertree_distribution(cfg, max_edge_size=3):
    """
    A random valuated hypertree with hyperedges of 2 to
    `max_edge_size` variables whose factors all have strictly
    positive commonality.
    """
    model = cfg.model()
    rng = np.random.default_rng(cfg.seed)
    floor = cfg.q_min ** (1.0 / cfg.n_vars)
    return random_markov_tree(rng, model, cfg.focal, max_edge_size, floor)


class SampleDataset:
    """
    Set-valued records: each one a focal set of the joint, drawn
    with probability equal to its mass.
    """

    def __init__(self, scope, records):
        self.scope = scope
        self.masks = tuple(record.mask if isinstance(record, ConfigSet) else int(record) for record in records)
        for mask in self.masks:
            if not 0 < mask <= full_mask(scope.size):
                raise DatasetError('record {:#x} is not a nonempty set of {}'.format(mask, scope))

    @property
    def model(self):
        return self.scope.model

    def __len__(self):
        return len(self.masks)

    def __iter__(self):
        return (ConfigSet(self.scope, mask) for mask in self.masks)

    def __repr__(self):
        return 'SampleDataset({}, {} records)'.format(self.scope, len(self.masks))


def sample(joint, n, seed=0):
    """
    Draw `n` focal sets of a proper joint, i.i.d. by mass.
    """
    if not joint.is_proper():
        raise DatasetError('cannot sample from a pseudo-belief function or one with conflict')
    if n < 0:
        raise DatasetError('sample size must not be negative')
    masks = sorted(mask for mask in joint.masses if mask)
    weights = np.array([joint.masses[mask] for mask in masks])
    weights = np.clip(weights, 0.0, None)
    weights /= weights.sum()
    rng = np.random.default_rng(seed)
    drawn = rng.choice(len(masks), size=n, p=weights)
    return SampleDataset(joint.scope, [masks[pos] for pos in drawn.tolist()])


def estimate_marginal(data, scope, smoothing=0.0):
    """
    Relative frequencies of the records projected on `scope`. A
    positive `smoothing` ε mixes in the vacuous valuation:
    (m + ε·vacuous) / (1 + ε).
    """
    if not len(data):
        raise DatasetError('cannot estimate from an empty dataset')
    counts = Counter()
    for mask, count in Counter(data.masks).items():
        counts[project_mask(mask, data.scope, scope)] += count
    total = float(len(data))
    masses = {mask: count / total for mask, count in counts.items()}
    if smoothing > 0:
        masses = {mask: value / (1.0 + smoothing) for mask, value in masses.items()}
        full = full_mask(scope.size)
        masses[full] = masses.get(full, 0.0) + smoothing / (1.0 + smoothing)
    return BeliefValuation(scope, masses)
