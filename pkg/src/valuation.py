"""
valuation.py
----------------------------------------

Belief valuations and the operations of the valuation
algebra: commonality and its inverse, combination,
decombination, marginalization, vacuous extension,
mk-conditioning, evidence and the δ divergence.

A valuation stores its mass function sparsely, as a map from
configuration-set masks (see frames.py) to real numbers. The
masses always sum to one. Proper belief functions have no
negative mass and no mass on the empty set; pseudo-belief
functions, which decombination produces, may have both.

Combination is the conjunctive (unnormalized) rule: mass that
falls on the empty set is kept as conflict, and normalization
is a separate operation. Under this rule commonalities multiply,
so decombination is a commonality quotient followed by an
inverse Möbius transform. Those dense transforms work on the
whole subset lattice of a frame and are only allowed on frames
of at most ``dense_limit`` configurations.

"""

import logging
import math
from collections import defaultdict
from functools import reduce
from types import MappingProxyType

import numpy as np

from .environment import setting
from .frames import ConfigSet, FrameError, ScopeError, extend_mask, project_mask
from .utils import BeltreeError, full_mask, popcount


log = logging.getLogger(__name__)

# frames up to this many configurations fit a uint64 mask
_VECTOR_BITS = 64
_CHUNK = 1 << 22


class ValuationError(BeltreeError):
    """
    Raised for mass assignments that are not valuations.
    """


class DenseLimitError(BeltreeError):
    exit_code = 3


class NotDecombinableError(BeltreeError):
    exit_code = 3


class NormalizationError(BeltreeError):
    exit_code = 3


class BeliefValuation:
    """
    A (pseudo-)belief function on a scope.

    scope:
        The nonempty Scope the valuation is defined on.

    masses:
        A mapping from a mask over the scope's frame to its mass.
        Entries with magnitude below ``prune_tolerance`` are dropped.
    """

    def __init__(self, scope, masses, env=None, check=True):
        if not scope:
            raise ScopeError('a valuation needs a nonempty scope')
        prune = setting('prune_tolerance', env)
        limit = full_mask(scope.size)
        kept = {}
        for mask, value in masses.items():
            mask = int(mask)
            value = float(value)
            if not 0 <= mask <= limit:
                raise ValuationError('focal set {:#x} is outside the frame of {}'.format(mask, scope))
            if math.isnan(value) or math.isinf(value):
                raise ValuationError('mass {} on {:#x} is not finite'.format(value, mask))
            if abs(value) >= prune:
                kept[mask] = value
        self.scope = scope
        self._masses = kept
        if check:
            tolerance = setting('mass_tolerance', env)
            if abs(self.total - 1.0) > tolerance:
                raise ValuationError('masses on {} sum to {!r}, not 1'.format(scope, self.total))

    @classmethod
    def vacuous(cls, scope):
        return cls(scope, {full_mask(scope.size): 1.0})

    @classmethod
    def from_sets(cls, scope, assignments, env=None):
        """
        Build a valuation from pairs (or a mapping) of focal set and
        mass. A focal set is a ConfigSet or an iterable of
        configurations; repeated sets have their masses added.
        """
        if isinstance(assignments, dict):
            assignments = assignments.items()
        masses = defaultdict(float)
        for focal, mass in assignments:
            if not isinstance(focal, ConfigSet):
                focal = ConfigSet.from_configurations(scope, focal)
            elif focal.scope != scope:
                raise ScopeError('focal set on {} given for scope {}'.format(focal.scope, scope))
            masses[focal.mask] += mass
        return cls(scope, masses, env)

    @classmethod
    def bayesian(cls, scope, table, env=None):
        """
        A Bayesian valuation from a probability table laid out in
        the frame's enumeration order (any shape with that size).
        """
        flat = np.asarray(table, dtype=float).ravel()
        if flat.size != scope.size:
            raise ValuationError('table of size {} for a frame of {} configurations'.format(
                flat.size, scope.size))
        if (flat < 0).any():
            raise ValuationError('probabilities must not be negative')
        return cls(scope, {1 << pos: value for pos, value in enumerate(flat.tolist()) if value}, env)

    @property
    def masses(self):
        return MappingProxyType(self._masses)

    @property
    def total(self):
        return math.fsum(self._masses.values())

    @property
    def conflict(self):
        """
        Mass on the empty set.
        """
        return self._masses.get(0, 0.0)

    def mass(self, focal):
        if isinstance(focal, ConfigSet):
            if focal.scope != self.scope:
                raise ScopeError('set on {} asked of a valuation on {}'.format(focal.scope, self.scope))
            focal = focal.mask
        return self._masses.get(focal, 0.0)

    def focal_sets(self):
        """
        (ConfigSet, mass) pairs ordered by mask.
        """
        return [(ConfigSet(self.scope, mask), self._masses[mask]) for mask in sorted(self._masses)]

    def is_proper(self, tolerance=1e-9):
        return self.conflict <= tolerance and all(value >= -tolerance for value in self._masses.values())

    def is_bayesian(self, tolerance=1e-9):
        return self.is_proper(tolerance) and all(
            popcount(mask) == 1 for mask, value in self._masses.items() if abs(value) > tolerance)

    def is_vacuous(self, tolerance=1e-9):
        return abs(self.mass(full_mask(self.scope.size)) - 1.0) <= tolerance

    def probability_table(self):
        """
        Singleton masses as an array shaped like the frame. For a
        Bayesian valuation this is its probability table; for an
        mk-conditional of one it is the conditional table.
        """
        table = np.zeros(self.scope.size)
        for mask, value in self._masses.items():
            if popcount(mask) == 1:
                table[mask.bit_length() - 1] = value
        return table.reshape(self.scope.shape)

    def __repr__(self):
        parts = ['{}: {:.6g}'.format(focal, mass) for focal, mass in self.focal_sets()]
        return 'BeliefValuation{}[{}]'.format(self.scope, ', '.join(parts))

    def __eq__(self, other):
        if isinstance(other, self.__class__):
            return allclose(self, other)
        return False

    __hash__ = None


class EvidencePotential:
    """
    An indicator or simple support function capturing an
    observation: mass on the observed subset, with the rest (if
    any) on the whole frame.
    """

    def __init__(self, valuation):
        focal = valuation.focal_sets()
        if not valuation.is_proper():
            raise ValuationError('evidence must be a proper belief function')
        if len(focal) > 2 or (len(focal) == 2 and not focal[1][0].is_full()):
            raise ValuationError('evidence is a simple support function: one set, plus the whole frame')
        self.valuation = valuation

    @classmethod
    def observe(cls, model, name, values, mass=1.0):
        """
        Evidence that `name` takes one of `values`, held with
        belief `mass` (1 for hard evidence).
        """
        scope = model.scope([name])
        values = list(values)
        if not values:
            raise FrameError('evidence on "{}" names no values'.format(name))
        if not 0.0 < mass <= 1.0:
            raise ValuationError('evidence mass {} is outside (0, 1]'.format(mass))
        observed = ConfigSet.from_configurations(scope, [(value,) for value in values])
        if mass == 1.0 or observed.is_full():
            return cls(BeliefValuation(scope, {observed.mask: 1.0}))
        return cls(BeliefValuation(scope, {observed.mask: mass, full_mask(scope.size): 1.0 - mass}))

    @property
    def scope(self):
        return self.valuation.scope

    def __repr__(self):
        return 'EvidencePotential({!r})'.format(self.valuation)


def allclose(b1, b2, tolerance=None, env=None):
    """
    Mass-wise equality over the union of focal sets.
    """
    if b1.scope != b2.scope:
        return False
    if tolerance is None:
        tolerance = setting('mass_tolerance', env)
    keys = set(b1.masses) | set(b2.masses)
    return all(abs(b1.mass(key) - b2.mass(key)) <= tolerance for key in keys)


def total_variation(b1, b2):
    """
    Half the L1 distance between two mass functions on one scope.
    """
    if b1.scope != b2.scope:
        raise ScopeError('total variation between {} and {}'.format(b1.scope, b2.scope))
    keys = set(b1.masses) | set(b2.masses)
    return 0.5 * math.fsum(abs(b1.mass(key) - b2.mass(key)) for key in keys)


def commonality_at(bel, a):
    """
    Q(a): the total mass of focal sets containing `a`.
    """
    if a.scope != bel.scope:
        raise ScopeError('commonality of a set on {} under a valuation on {}'.format(a.scope, bel.scope))
    return math.fsum(value for mask, value in bel.masses.items() if mask & a.mask == a.mask)


def _check_dense(scope, env):
    limit = setting('dense_limit', env)
    if scope.size > limit:
        raise DenseLimitError('frame of {} has {} configurations; dense operations allow {}'.format(
            scope, scope.size, limit))


def _dense(bel):
    values = np.zeros(1 << bel.scope.size)
    for mask, value in bel.masses.items():
        values[mask] = value
    return values


def _zeta(values, bits):
    # superset sums: Q(A) = sum of m(B) for B containing A
    q = values.copy()
    for bit in range(bits):
        view = q.reshape(-1, 2, 1 << bit)
        view[:, 0, :] += view[:, 1, :]
    return q


def _moebius(q, bits):
    m = q.copy()
    for bit in range(bits):
        view = m.reshape(-1, 2, 1 << bit)
        view[:, 0, :] -= view[:, 1, :]
    return m


def commonality_table(bel, env=None):
    """
    Dense Q over every subset of the frame, indexed by mask.
    """
    _check_dense(bel.scope, env)
    return _zeta(_dense(bel), bel.scope.size)


def mobius_q_to_m(q, scope, env=None):
    """
    Inverse Möbius transform of a dense commonality table: the
    valuation whose commonality is `q`, rescaled to total mass one.
    """
    _check_dense(scope, env)
    q = np.asarray(q, dtype=float)
    if q.shape != (1 << scope.size,):
        raise ValuationError('commonality table of shape {} for a frame of {} configurations'.format(
            q.shape, scope.size))
    m = _moebius(q, scope.size)
    total = math.fsum(m.tolist())
    if abs(total) <= setting('zero_tolerance', env):
        raise NormalizationError('commonality table has zero total mass')
    m /= total
    prune = setting('prune_tolerance', env)
    kept = np.flatnonzero(np.abs(m) >= prune)
    return BeliefValuation(scope, dict(zip(kept.tolist(), m[kept].tolist())), env, check=False)


def vacuous_extend(bel, scope):
    """
    Extend every focal set by the whole frame of the added variables.
    """
    if not bel.scope.issubset(scope):
        raise ScopeError('cannot extend a valuation on {} to {}'.format(bel.scope, scope))
    if bel.scope == scope:
        return bel
    masses = {extend_mask(mask, bel.scope, scope): value for mask, value in bel.masses.items()}
    return BeliefValuation(scope, masses, check=False)


def marginalize(bel, scope):
    """
    Project every focal set onto `scope` and add up the masses.
    """
    if not scope.issubset(bel.scope):
        raise ScopeError('cannot marginalize a valuation on {} to {}'.format(bel.scope, scope))
    if not scope:
        raise ScopeError('cannot marginalize to an empty scope')
    if scope == bel.scope:
        return bel
    masses = defaultdict(float)
    for mask, value in bel.masses.items():
        masses[project_mask(mask, bel.scope, scope)] += value
    return BeliefValuation(scope, masses, check=False)


def _combine_masks(m1, m2):
    acc = defaultdict(float)
    for a, va in m1.items():
        for b, vb in m2.items():
            acc[a & b] += va * vb
    return acc


def _combine_vectorised(m1, m2):
    keys1 = np.array(list(m1.keys()), dtype=np.uint64)
    vals1 = np.array(list(m1.values()), dtype=float)
    keys2 = np.array(list(m2.keys()), dtype=np.uint64)
    vals2 = np.array(list(m2.values()), dtype=float)
    acc = defaultdict(float)
    step = max(1, _CHUNK // len(keys2))
    for start in range(0, len(keys1), step):
        inter = np.bitwise_and.outer(keys1[start:start + step], keys2).ravel()
        prod = np.multiply.outer(vals1[start:start + step], vals2).ravel()
        keys, inverse = np.unique(inter, return_inverse=True)
        sums = np.bincount(inverse.ravel(), weights=prod, minlength=len(keys))
        for key, value in zip(keys.tolist(), sums.tolist()):
            acc[key] += value
    return acc


def combine(b1, b2):
    """
    Conjunctive combination on the union of both scopes.
    """
    scope = b1.scope.union(b2.scope)
    e1 = vacuous_extend(b1, scope)
    e2 = vacuous_extend(b2, scope)
    if e1.is_vacuous(0.0) and len(e1.masses) == 1:
        return e2
    if e2.is_vacuous(0.0) and len(e2.masses) == 1:
        return e1
    if scope.size <= _VECTOR_BITS:
        masses = _combine_vectorised(e1.masses, e2.masses)
    else:
        masses = _combine_masks(e1.masses, e2.masses)
    return BeliefValuation(scope, masses, check=False)


def combine_all(valuations, scope=None):
    """
    Combine a sequence of valuations. With nothing to combine the
    result is the vacuous valuation on `scope`.
    """
    valuations = list(valuations)
    if not valuations:
        if scope is None:
            raise ScopeError('combining nothing needs an explicit scope')
        return BeliefValuation.vacuous(scope)
    joint = reduce(combine, valuations)
    if scope is not None:
        joint = vacuous_extend(joint, scope)
    return joint


def decombine(b12, b2, env=None):
    """
    The valuation b with combine(b2, b) == b12: commonality
    quotient Q12 / Q2 (0/0 taken as 0), rescaled to total mass one
    and turned back into masses. The result may be a pseudo-belief
    function.
    """
    scope = b12.scope.union(b2.scope)
    _check_dense(scope, env)
    zero = setting('zero_tolerance', env)
    q12 = _zeta(_dense(vacuous_extend(b12, scope)), scope.size)
    q2 = _zeta(_dense(vacuous_extend(b2, scope)), scope.size)
    vanishing = np.abs(q2) <= zero
    blocked = vanishing & (np.abs(q12) > zero)
    if blocked.any():
        raise NotDecombinableError('commonality of the divisor vanishes on {} subset(s) of {} '
                                   'where the dividend does not'.format(int(blocked.sum()), scope))
    quotient = np.zeros_like(q12)
    np.divide(q12, q2, out=quotient, where=~vanishing)
    return mobius_q_to_m(quotient, scope, env)


def mk_condition(bel, scope, env=None):
    """
    mk-conditioning: decombine a valuation by its own marginal on
    `scope`. For Bayesian valuations the singleton masses of the
    result form the conditional probability table.
    """
    if not scope.issubset(bel.scope):
        raise ScopeError('cannot condition a valuation on {} on {}'.format(bel.scope, scope))
    if not scope:
        return bel
    if scope == bel.scope:
        return BeliefValuation.vacuous(bel.scope)
    return decombine(bel, marginalize(bel, scope), env)


def conditional(bel, scope, given, env=None):
    """
    The node valuation of a family: the marginal on `scope`,
    mk-conditioned on `given`. Only that marginal is consulted.
    """
    if not given.issubset(scope):
        raise ScopeError('{} is not a subset of {}'.format(given, scope))
    return mk_condition(marginalize(bel, scope), given, env)


def normalize(bel, env=None):
    """
    Drop the conflict mass and rescale the rest.
    """
    conflict = bel.conflict
    if not conflict:
        return bel
    remaining = 1.0 - conflict
    if abs(remaining) <= setting('zero_tolerance', env):
        raise NormalizationError('total conflict on {}: nothing left to normalize'.format(bel.scope))
    masses = {mask: value / remaining for mask, value in bel.masses.items() if mask}
    return BeliefValuation(bel.scope, masses, env, check=False)


def apply_evidence(bel, evidence, normalize_result=False, env=None):
    """
    Combine a valuation with an evidence potential, optionally
    normalizing away the conflict.
    """
    result = combine(bel, evidence.valuation)
    if normalize_result:
        result = normalize(result, env)
    return result


def delta_divergence(approx, reference):
    """
    δ(approx, reference): the sum over focal sets A of `reference`
    with positive mass of m(A) * |ln(Q_ref(A) / Q_approx(A))|. A
    non-positive approximate commonality makes the result +inf.
    """
    if approx.scope != reference.scope:
        raise ScopeError('δ between valuations on {} and {}'.format(approx.scope, reference.scope))
    if any(value < 0 for value in reference.masses.values()):
        raise ValuationError('the reference of δ must be a proper belief function')
    terms = []
    for mask, weight in reference.masses.items():
        if weight <= 0:
            continue
        focal = ConfigSet(reference.scope, mask)
        q_approx = commonality_at(approx, focal)
        if q_approx <= 0:
            return math.inf
        q_ref = commonality_at(reference, focal)
        terms.append(weight * abs(math.log(q_ref / q_approx)))
    return math.fsum(terms)
