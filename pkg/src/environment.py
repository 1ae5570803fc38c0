"""
environment.py
----------------------------------------

Configuration lookup for Beltree. Settings are held in a
chain of environments: a call may bind overrides in a child
environment, which falls back to one reading ``BELTREE_*``
process variables, which falls back to the defaults.

"""

import os

from .utils import BeltreeError


DEFAULTS = {
    'dense_limit': 16,
    'mass_tolerance': 1e-9,
    'load_tolerance': 1e-6,
    'prune_tolerance': 1e-12,
    'zero_tolerance': 1e-12,
    'joint_limit': 1024,
    'enumeration_limit': 6,
    'report_limit': 64,
}

ENV_PREFIX = 'BELTREE_'


class Undefined(BeltreeError):
    exit_code = 1


class ConfigurationError(BeltreeError):
    """
    Raised when a ``BELTREE_*`` variable cannot be parsed.
    """
    exit_code = 1


class Environment:
    """
    A binding of setting names to values, linked to a parent.
    Names not bound here are searched for in the parents.
    """
    def __init__(self, binding, parent_env=None):
        self.parent_env = parent_env
        self.binding = binding

    def lookup_var(self, varname):
        """
        Return the value bound to `varname`, searching up
        to the top-most parent environment.
        """
        if varname in self.binding:
            return self.binding[varname]
        elif self.parent_env is not None:
            return self.parent_env.lookup_var(varname)
        else:
            raise Undefined('setting "{}" is undefined'.format(varname))

    def define_var(self, varname, value):
        self.binding[varname] = value

    def set_var(self, varname, value):
        """
        Rebind `varname` in the environment where it is found.
        """
        if varname in self.binding:
            self.binding[varname] = value
        elif self.parent_env is not None:
            return self.parent_env.set_var(varname, value)
        else:
            raise Undefined('setting "{}" is undefined'.format(varname))

    def scoped(self, **overrides):
        """
        Child environment binding `overrides` on top of this one.
        """
        return Environment(dict(overrides), self)


class ProcessEnvironment(Environment):
    """
    Reads ``BELTREE_<NAME>`` from the process environment at lookup
    time, so tests and shells can change limits without reloading.
    Values are parsed with the type of the default.
    """
    def __init__(self, parent_env):
        super().__init__({}, parent_env)

    def lookup_var(self, varname):
        raw = os.environ.get(ENV_PREFIX + varname.upper())
        if raw is None:
            return self.parent_env.lookup_var(varname)
        kind = type(self.parent_env.lookup_var(varname))
        try:
            return kind(raw)
        except ValueError:
            raise ConfigurationError('{}{}={!r} is not a valid {}'.format(
                ENV_PREFIX, varname.upper(), raw, kind.__name__))

    def set_var(self, varname, value):
        return self.parent_env.set_var(varname, value)


def make_standard_env():
    """
    Create the standard chain: defaults, then process variables.
    """
    return ProcessEnvironment(Environment(dict(DEFAULTS)))


standard_env = make_standard_env()


def setting(name, env=None):
    """
    Look `name` up in `env`, or in the standard environment.
    """
    return (env or standard_env).lookup_var(name)
