"""
frames.py
----------------------------------------

Variables, models, scopes and sets of configurations.

A scope's frame (its configuration space) is enumerated in
row-major order over the scope's variables, taken in model
order: the first variable changes slowest. A set of
configurations is stored as an integer whose bit ``i`` marks
the ``i``-th configuration of that enumeration.

"""

import itertools
from functools import lru_cache

import numpy as np

from .utils import BeltreeError, popcount, iter_bits, full_mask, mask_to_array, array_to_mask


class FrameError(BeltreeError):
    """
    Raised for malformed variables, models or configurations.
    """


class ScopeError(BeltreeError):
    """
    Raised when scopes do not fit an operation (not a subset,
    different models, empty where a variable is required).
    """


class Variable:
    """
    A named variable with an ordered domain of distinct labels.
    """
    def __init__(self, name, domain):
        domain = tuple(str(label) for label in domain)
        if not domain:
            raise FrameError('variable "{}" has an empty domain'.format(name))
        if len(set(domain)) != len(domain):
            raise FrameError('variable "{}" has duplicate labels: {}'.format(name, list(domain)))
        self.name = str(name)
        self.domain = domain

    @property
    def size(self):
        return len(self.domain)

    def index_of(self, label):
        try:
            return self.domain.index(str(label))
        except ValueError:
            raise FrameError('"{}" is not a value of variable "{}"'.format(label, self.name))

    def __repr__(self):
        return '{}{{{}}}'.format(self.name, ','.join(self.domain))

    def __eq__(self, other):
        if isinstance(other, self.__class__):
            return self.name == other.name and self.domain == other.domain
        return False

    def __hash__(self):
        return hash((self.name, self.domain))


class Model:
    """
    The ordered set of all variables. The order fixes the
    enumeration of every frame built from the model.
    """
    def __init__(self, variables):
        self.variables = tuple(variables)
        if not self.variables:
            raise FrameError('a model needs at least one variable')
        self._index = {}
        for pos, var in enumerate(self.variables):
            if var.name in self._index:
                raise FrameError('variable "{}" is defined twice'.format(var.name))
            self._index[var.name] = pos
        self._hash = hash(self.variables)

    @classmethod
    def binary(cls, names):
        """
        A model of binary variables with domains ``('0', '1')``.
        """
        return cls([Variable(name, ('0', '1')) for name in names])

    @property
    def names(self):
        return tuple(var.name for var in self.variables)

    def index(self, name):
        try:
            return self._index[name]
        except KeyError:
            raise FrameError('unknown variable "{}"'.format(name))

    def __getitem__(self, name):
        return self.variables[self.index(name)]

    def __contains__(self, name):
        return name in self._index

    def __len__(self):
        return len(self.variables)

    def __iter__(self):
        return iter(self.variables)

    def scope(self, names=None):
        """
        The scope of the given variable names, or of every variable.
        """
        if names is None:
            names = self.names
        elif isinstance(names, str):
            names = [names]
        return Scope(self, names)

    def __repr__(self):
        return 'Model({})'.format(', '.join(repr(var) for var in self.variables))

    def __eq__(self, other):
        if self is other:
            return True
        if isinstance(other, self.__class__):
            return self.variables == other.variables
        return False

    def __hash__(self):
        return self._hash


class Scope:
    """
    A set of model variables, kept in model order.
    """
    def __init__(self, model, names):
        self.model = model
        positions = sorted({model.index(name) for name in names})
        self.names = tuple(model.variables[pos].name for pos in positions)
        self.variables = tuple(model.variables[pos] for pos in positions)
        self.shape = tuple(var.size for var in self.variables)
        self.size = int(np.prod(self.shape, dtype=np.int64)) if self.shape else 1
        self._hash = hash((model, self.names))

    def __len__(self):
        return len(self.names)

    def __iter__(self):
        return iter(self.names)

    def __contains__(self, name):
        return name in self.names

    def __bool__(self):
        return bool(self.names)

    def _check_model(self, other):
        if self.model != other.model:
            raise ScopeError('scopes {} and {} belong to different models'.format(self, other))

    def issubset(self, other):
        self._check_model(other)
        return set(self.names) <= set(other.names)

    def union(self, other):
        self._check_model(other)
        return Scope(self.model, self.names + other.names)

    def intersection(self, other):
        self._check_model(other)
        return Scope(self.model, [name for name in self.names if name in other.names])

    def difference(self, other):
        self._check_model(other)
        return Scope(self.model, [name for name in self.names if name not in other.names])

    def configurations(self):
        """
        All configurations of the frame, as tuples of labels, in
        enumeration order.
        """
        return list(itertools.product(*(var.domain for var in self.variables)))

    def config_index(self, config):
        """
        Position of a configuration (a sequence of labels in scope
        order, or a mapping name -> label) in the enumeration.
        """
        if isinstance(config, dict):
            config = [config[name] for name in self.names]
        config = list(config)
        if len(config) != len(self.names):
            raise FrameError('configuration {} does not fit scope {}'.format(config, self))
        coords = [var.index_of(label) for var, label in zip(self.variables, config)]
        return int(np.ravel_multi_index(coords, self.shape)) if coords else 0

    def __repr__(self):
        return '{' + ','.join(self.names) + '}'

    def __eq__(self, other):
        if isinstance(other, self.__class__):
            return self.names == other.names and self.model == other.model
        return False

    def __hash__(self):
        return self._hash


@lru_cache(maxsize=4096)
def projection_index(scope, sub):
    """
    For every configuration of `scope`, the index of its
    restriction to `sub` (a subset of `scope`).
    """
    if not sub.issubset(scope):
        raise ScopeError('{} is not a subset of {}'.format(sub, scope))
    if not sub:
        return np.zeros(scope.size, dtype=np.int64)
    coords = np.unravel_index(np.arange(scope.size), scope.shape)
    picked = [coords[scope.names.index(name)] for name in sub.names]
    return np.ravel_multi_index(picked, sub.shape).astype(np.int64)


def extend_mask(mask, sub, scope):
    """
    The cylinder over `scope` of the set `mask` on `sub`.
    """
    if sub == scope:
        return mask
    proj = projection_index(scope, sub)
    return array_to_mask(mask_to_array(mask, sub.size)[proj])


def project_mask(mask, scope, sub):
    """
    The set of restrictions to `sub` of the configurations in `mask`.
    """
    if sub == scope:
        return mask
    proj = projection_index(scope, sub)
    hit = np.zeros(sub.size, dtype=bool)
    hit[proj[mask_to_array(mask, scope.size)]] = True
    return array_to_mask(hit)


class ConfigSet:
    """
    A set of configurations of a scope's frame. The empty set is
    representable; whether it is allowed is up to the caller.
    """
    def __init__(self, scope, mask):
        if mask < 0 or mask > full_mask(scope.size):
            raise FrameError('mask does not fit the frame of {}'.format(scope))
        self.scope = scope
        self.mask = mask

    @classmethod
    def from_configurations(cls, scope, configs):
        mask = 0
        for config in configs:
            mask |= 1 << scope.config_index(config)
        return cls(scope, mask)

    @classmethod
    def full(cls, scope):
        return cls(scope, full_mask(scope.size))

    @classmethod
    def empty(cls, scope):
        return cls(scope, 0)

    def is_empty(self):
        return self.mask == 0

    def is_full(self):
        return self.mask == full_mask(self.scope.size)

    def configurations(self):
        every = self.scope.configurations()
        return [every[pos] for pos in iter_bits(self.mask)]

    def issuperset(self, other):
        self._check_scope(other)
        return other.mask & self.mask == other.mask

    def _check_scope(self, other):
        if self.scope != other.scope:
            raise ScopeError('configuration sets on {} and {}'.format(self.scope, other.scope))

    def __len__(self):
        return popcount(self.mask)

    def __iter__(self):
        return iter(self.configurations())

    def __repr__(self):
        if self.is_empty():
            return '{}'
        if self.is_full():
            return 'Ω' + repr(self.scope)
        return '{' + ', '.join('(' + ','.join(config) + ')' for config in self.configurations()) + '}'

    def __eq__(self, other):
        if isinstance(other, self.__class__):
            return self.scope == other.scope and self.mask == other.mask
        return False

    def __hash__(self):
        return hash((self.scope, self.mask))
