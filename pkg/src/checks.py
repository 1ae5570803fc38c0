"""
checks.py
----------------------------------------

Property suites behind ``beltree check``. Each suite runs a
number of seeded trials and returns a SuiteResult: how many
trials passed, the failing trials with what is needed to
reproduce them, and suite-specific measurements.

"""

import logging
import math

import numpy as np

from .frames import ConfigSet, Model
from .generator import (GeneratorConfig, generate_hypertree_distribution, generate_tree_distribution,
                        random_markov_tree, random_valuation, sample)
from .hypergraph import (Hypergraph, check_construction_sequence, covers, hypertree_cover, is_hypertree,
                         reduce)
from .learning import ExactSource, dependence_matrix, learn_tree, recovery_report
from .network import (ci_holds, d_separated, enumerate_compatible, hypertree_to_network, induced_hypergraph,
                      network_joint)
from .propagation import brute_force_joint, propagate
from .valuation import (BeliefValuation, EvidencePotential, allclose, combine, combine_all, commonality_at,
                        commonality_table, decombine, delta_divergence, marginalize, mk_condition,
                        vacuous_extend)


log = logging.getLogger(__name__)

TRIANGLE_LOOP = [['A', 'B', 'C'], ['C', 'D'], ['D', 'E'], ['A', 'E']]
DOUBLE_LOOP = [['A', 'B', 'C'], ['C', 'D'], ['D', 'E'], ['A', 'E'], ['B', 'F'], ['F', 'D']]


def percentage(part, whole):
    """
    Calculate the percentage of a number.
    """
    return round(100 * float(part) / float(whole), 1) if whole else 100.0


class SuiteResult:
    """
    The outcome of one suite. `required` is the share of trials
    that must pass (1.0 unless the suite measures a rate).
    """

    def __init__(self, name, required=1.0):
        self.name = name
        self.required = required
        self.trials = 0
        self.failures = []
        self.measurements = {}

    def record(self, ok, **details):
        self.trials += 1
        if not ok:
            self.failures.append(details)
            log.warning('%s: failed trial %s', self.name, details)

    @property
    def passed_count(self):
        return self.trials - len(self.failures)

    @property
    def passed(self):
        return self.trials > 0 and self.passed_count >= self.required * self.trials

    def as_dict(self):
        verdict = {
            'suite': self.name,
            'trials': self.trials,
            'passed_trials': self.passed_count,
            'percentage': percentage(self.passed_count, self.trials),
            'passed': self.passed,
            'failures': self.failures,
        }
        verdict.update(self.measurements)
        return verdict


def _random_scope(rng, model, max_size=2):
    size = int(rng.integers(1, max_size + 1))
    return model.scope(sorted(rng.choice(model.names, size=size, replace=False).tolist()))


def check_axioms(trials=200, seed=0, env=None):
    """
    Commutativity, associativity, consonance of marginalization,
    local computation, the commonality product law and the
    decombination round trip, on random small valuations.
    """
    result = SuiteResult('axioms')
    model = Model.binary('ABCD')
    for trial in range(trials):
        rng = np.random.default_rng([seed, trial])
        a, b, c = (random_valuation(rng, _random_scope(rng, model), int(rng.integers(1, 4)),
                                    include_full=bool(rng.integers(2))) for _ in range(3))
        ok = allclose(combine(a, b), combine(b, a), env=env)
        ok = ok and allclose(combine(a, combine(b, c)), combine(combine(a, b), c), env=env)

        big = a.scope.union(b.scope)
        joint = combine(a, b)
        middle = a.scope
        small = model.scope(middle.names[:1])
        ok = ok and allclose(marginalize(marginalize(joint, middle), small), marginalize(joint, small), env=env)

        common = a.scope.intersection(b.scope)
        if common:
            local = combine(a, marginalize(b, common))
        else:
            local = a
        ok = ok and allclose(marginalize(joint, a.scope), vacuous_extend(local, a.scope), env=env)

        q = commonality_table(joint, env)
        q_a = commonality_table(vacuous_extend(a, big), env)
        q_b = commonality_table(vacuous_extend(b, big), env)
        ok = ok and bool(np.allclose(q, q_a * q_b, atol=1e-9, rtol=0))

        pa = random_valuation(rng, a.scope, 2, floor=0.2)
        pb = random_valuation(rng, b.scope, 2, floor=0.2)
        both = combine(pa, pb)
        ok = ok and allclose(combine(pb, decombine(both, pb, env)), both, env=env)
        result.record(ok, seed=seed, trial=trial)
    return result


def check_delta(trials=200, seed=0, env=None):
    """
    δ(b, b) = 0, δ >= 0, and δ is infinite exactly when some focal
    set of the reference has no positive approximate commonality.
    """
    result = SuiteResult('delta')
    model = Model.binary('AB')
    scope = model.scope()
    for trial in range(trials):
        rng = np.random.default_rng([seed, trial])
        ref = random_valuation(rng, scope, int(rng.integers(1, 4)), include_full=bool(rng.integers(2)))
        approx = random_valuation(rng, scope, int(rng.integers(1, 4)), include_full=bool(rng.integers(2)))
        value = delta_divergence(approx, ref)
        zero_q = any(commonality_at(approx, ConfigSet(scope, mask)) <= 0
                     for mask, weight in ref.masses.items() if weight > 0)
        ok = abs(delta_divergence(ref, ref)) <= 1e-12 and value >= 0 and math.isinf(value) == zero_q
        result.record(ok, seed=seed, trial=trial)
    return result


def check_loops(trials=1, seed=0, env=None):
    """
    The triangle loop and the double loop: 4 compatible dags for the
    first, none for the second, both coverable by hypertrees, and
    a valuation on the first that breaks a d-separation its dags
    all share.
    """
    result = SuiteResult('loops')
    first, second = Hypergraph(TRIANGLE_LOOP), Hypergraph(DOUBLE_LOOP)
    dags_first = enumerate_compatible(first, env=env)
    dags_second = enumerate_compatible(second, env=env)
    result.record(len(dags_first) == 4, check='triangle loop compatible dags', found=len(dags_first))
    result.record(len(dags_second) == 0, check='double loop compatible dags', found=len(dags_second))
    for name, h in (('triangle loop', first), ('double loop', second)):
        seq = hypertree_cover(h)
        ok = not is_hypertree(h) and covers(seq.as_hypergraph(), h) and check_construction_sequence(seq)
        result.record(ok, check='{} cover'.format(name), width=seq.width)
    separated = all(d_separated(dag, {'A'}, {'C'}, {'D', 'E'}) for dag in dags_first)
    result.record(separated, check='triangle loop dags separate A and C by D, E')
    joint = unfriendly_valuation()
    violated = not ci_holds(joint, {'A'}, {'C'}, {'D', 'E'}, env=env)
    result.record(violated, check='triangle loop valuation violates I(A, C | D, E)')
    result.measurements['compatible'] = {'triangle loop': len(dags_first), 'double loop': len(dags_second)}
    return result


def unfriendly_valuation():
    """
    A valuation factorizing on the triangle loop in which
    A and C depend on each other through {A, B, C} alone.
    """
    model = Model.binary('ABCDE')
    table = np.array([[[0.30, 0.05], [0.10, 0.05]], [[0.05, 0.10], [0.05, 0.30]]])
    factors = [BeliefValuation.bayesian(model.scope(['A', 'B', 'C']), table)]
    factors += [BeliefValuation.vacuous(model.scope(edge)) for edge in TRIANGLE_LOOP[1:]]
    return combine_all(factors, model.scope())


def check_propagation(trials=50, seed=0, env=None):
    """
    Node marginals from message passing against the brute-force
    joint, with and without a hard observation.
    """
    result = SuiteResult('propagation')
    worst = 0.0
    for trial in range(trials):
        rng = np.random.default_rng([seed, trial])
        model = Model.binary('ABCDEF'[:int(rng.integers(2, 7))])
        tree = random_markov_tree(rng, model, focal=int(rng.integers(1, 3)))
        joint = brute_force_joint(tree.factors, env)
        name = str(rng.choice(model.names))
        evidence = EvidencePotential.observe(model, name, [str(rng.integers(2))])
        ok = True
        for potentials in ([], [evidence]):
            target = joint
            for potential in potentials:
                target = combine(target, potential.valuation)
            for scope, node in zip(tree.scopes, propagate(tree, potentials)):
                expected = marginalize(target, scope)
                keys = set(node.masses) | set(expected.masses)
                error = max(abs(node.mass(key) - expected.mass(key)) for key in keys)
                worst = max(worst, error)
                ok = ok and error <= 1e-9
        result.record(ok, seed=seed, trial=trial)
    result.measurements['max_abs_error'] = worst
    return result


def check_roundtrip(trials=25, seed=0, env=None):
    """
    Hypertree to network conversion: the network's joint is the
    hypertree's joint and its induced hypergraph is the hypertree.
    """
    result = SuiteResult('roundtrip')
    for trial in range(trials):
        cfg = GeneratorConfig(n_vars=4 + trial % 2, focal=2, q_min=0.05, seed=seed + trial)
        tree = generate_hypertree_distribution(cfg)
        network = hypertree_to_network(tree, env)
        same_joint = allclose(network_joint(network, env), brute_force_joint(tree.factors, env), env=env)
        same_structure = induced_hypergraph(network) == reduce(tree.seq.as_hypergraph())
        result.record(same_joint and same_structure, seed=seed + trial,
                      joint=same_joint, structure=same_structure)
    return result


def _paths_of_length_two(edges):
    neighbours = {}
    for x, y in edges:
        neighbours.setdefault(x, set()).add(y)
        neighbours.setdefault(y, set()).add(x)
    for middle, around in sorted(neighbours.items()):
        ordered = sorted(around)
        for i, x in enumerate(ordered):
            for z in ordered[i + 1:]:
                yield x, middle, z


def check_path_dependence(trials=20, seed=0, env=None):
    """
    On generated trees, every path X - Y - Z has
    min(DEP(X, Y), DEP(Y, Z)) > DEP(X, Z).
    """
    result = SuiteResult('path_dependence')
    margins = []
    for trial in range(trials):
        cfg = GeneratorConfig(n_vars=5 + trial % 4, focal=2, q_min=0.05, seed=seed + trial)
        generated = generate_tree_distribution(cfg)
        matrix = dependence_matrix(ExactSource(generated.joint), env=env)
        for x, y, z in _paths_of_length_two(generated.tree_edges):
            margin = min(matrix.value(x, y), matrix.value(y, z)) - matrix.value(x, z)
            margins.append(margin)
            result.record(margin > 0, seed=seed + trial, path=[x, y, z], margin=margin)
    result.measurements['min_margin'] = min(margins) if margins else None
    return result


def check_recovery(trials=20, seed=0, env=None, samples=200):
    """
    Exact joints must give back the generating tree every time;
    200 samples over 8 variables must in at least 70% of trials.
    """
    result = SuiteResult('recovery', required=1.0)
    sampled = SuiteResult('sampled recovery', required=0.7)
    hamming = []
    for trial in range(trials):
        cfg = GeneratorConfig(n_vars=5 + trial % 4, focal=2, q_min=0.05, seed=seed + trial)
        generated = generate_tree_distribution(cfg)
        learned = learn_tree(generated.joint, env=env)
        report = recovery_report(learned, generated.tree_edges)
        result.record(report['recovered'], seed=seed + trial, hamming=report['hamming'])

        cfg = GeneratorConfig(n_vars=8, focal=2, q_min=0.05, seed=seed + trial)
        generated = generate_tree_distribution(cfg)
        data = sample(generated.joint, samples, seed=seed + trial)
        report = recovery_report(learn_tree(data, env=env), generated.tree_edges)
        hamming.append(report['hamming'])
        sampled.record(report['recovered'], seed=seed + trial, hamming=report['hamming'])
    result.measurements['sampled'] = sampled.as_dict()
    result.measurements['sampled']['hamming'] = hamming
    if not sampled.passed:
        result.failures.append({'check': 'sampled recovery rate', 'percentage': percentage(
            sampled.passed_count, sampled.trials)})
    return result


def check_bayesian(trials=20, seed=0, env=None):
    """
    On Bayesian trees DEP_BN and mutual information learn the same
    edges when neither ranking has ties, and mk-conditionals are
    conditional probability tables.
    """
    result = SuiteResult('bayesian')
    for trial in range(trials):
        cfg = GeneratorConfig(n_vars=5, bayesian=True, seed=seed + trial)
        generated = generate_tree_distribution(cfg)
        by_dep = learn_tree(generated.joint, 'dep-bn', env=env)
        by_kl = learn_tree(generated.joint, 'dep-kl', env=env)
        tie_free = not by_dep.ties and not by_kl.ties
        same = by_dep.edge_set() == by_kl.edge_set()
        x, y = generated.tree_edges[0]
        pair = marginalize(generated.joint, generated.model.scope([x, y]))
        table = pair.probability_table()
        conditional = mk_condition(pair, generated.model.scope([x])).probability_table()
        expected = table / table.sum(axis=1, keepdims=True)
        tables_match = bool(np.allclose(conditional, expected, atol=1e-9, rtol=0))
        result.record((same or not tie_free) and tables_match, seed=seed + trial,
                      same_edges=same, tie_free=tie_free, tables=tables_match)
    return result


def check_dseparation(trials=10, seed=0, env=None):
    """
    On generated networks of up to 5 variables, every d-separated
    singleton triple is a conditional independence of the joint.
    """
    result = SuiteResult('dseparation')
    for trial in range(trials):
        cfg = GeneratorConfig(n_vars=3 + trial % 3, focal=2, q_min=0.05, seed=seed + trial)
        generated = generate_tree_distribution(cfg)
        dag = generated.network.dag
        names = generated.model.names
        ok = True
        for j in names:
            for k in names:
                for l in names:
                    if len({j, k, l}) < 3 or j > k:
                        continue
                    if d_separated(dag, {j}, {k}, {l}) and not ci_holds(generated.joint, {j}, {k}, {l}, env=env):
                        ok = False
                        log.warning('I(%s, %s | %s) fails for seed %d', j, k, l, seed + trial)
        result.record(ok, seed=seed + trial)
    return result


SUITES = {
    'axioms': check_axioms,
    'delta': check_delta,
    'loops': check_loops,
    'propagation': check_propagation,
    'roundtrip': check_roundtrip,
    'path_dependence': check_path_dependence,
    'recovery': check_recovery,
    'bayesian': check_bayesian,
    'dseparation': check_dseparation,
}


def run_suites(names, trials=None, seed=0, env=None):
    """
    Run the named suites and return their verdicts. `trials`
    overrides every suite's default trial count.
    """
    verdicts = []
    for name in names:
        suite = SUITES[name]
        result = suite(seed=seed, env=env) if trials is None else suite(trials=trials, seed=seed, env=env)
        log.info('%s: %d/%d trials passed', name, result.passed_count, result.trials)
        verdicts.append(result.as_dict())
    return verdicts
