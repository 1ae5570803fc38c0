"""
test_frames.py
----------------------------------------

Variables, models, scopes and configuration sets.
"""

import pytest

from .context import src

from src.frames import ConfigSet, FrameError, Model, ScopeError, Variable, extend_mask, project_mask


@pytest.fixture
def model():
    return Model([Variable('A', ['a0', 'a1']), Variable('B', ['b0', 'b1', 'b2']), Variable('C', ['c0', 'c1'])])


def test_variable_rejects_bad_domains():
    with pytest.raises(FrameError):
        Variable('A', [])
    with pytest.raises(FrameError):
        Variable('A', ['x', 'x'])


def test_model_rejects_duplicate_names():
    with pytest.raises(FrameError):
        Model([Variable('A', ['0', '1']), Variable('A', ['0', '1'])])


def test_scope_keeps_model_order(model):
    scope = model.scope(['C', 'A'])
    assert scope.names == ('A', 'C')
    assert scope.shape == (2, 2)
    assert scope.size == 4


def test_scope_set_operations(model):
    ab = model.scope(['A', 'B'])
    bc = model.scope(['B', 'C'])
    assert ab.union(bc) == model.scope()
    assert ab.intersection(bc).names == ('B',)
    assert ab.difference(bc).names == ('A',)
    assert model.scope(['B']).issubset(ab)
    assert not ab.issubset(bc)


def test_scopes_of_different_models_do_not_mix(model):
    other = Model.binary('AB')
    with pytest.raises(ScopeError):
        model.scope(['A']).union(other.scope(['A']))


def test_unknown_variable(model):
    with pytest.raises(FrameError):
        model.scope(['Z'])


def test_configurations_enumerate_first_variable_slowest(model):
    scope = model.scope(['A', 'B'])
    assert scope.configurations()[:4] == [('a0', 'b0'), ('a0', 'b1'), ('a0', 'b2'), ('a1', 'b0')]
    assert scope.config_index(('a1', 'b2')) == 5
    assert scope.config_index({'A': 'a0', 'B': 'b1'}) == 1


def test_configset_from_configurations(model):
    scope = model.scope(['A'])
    focal = ConfigSet.from_configurations(scope, [('a1',)])
    assert focal.mask == 0b10
    assert len(focal) == 1
    assert not focal.is_full()
    assert len(ConfigSet.empty(scope)) == 0
    assert ConfigSet.full(scope).issuperset(focal)


def test_configset_rejects_masks_outside_the_frame(model):
    with pytest.raises(FrameError):
        ConfigSet(model.scope(['A']), 0b100)


def test_cylinder_and_projection(model):
    scope = model.scope(['A', 'C'])
    sub = model.scope(['A'])
    cylinder = extend_mask(0b01, sub, scope)
    assert ConfigSet(scope, cylinder).configurations() == [('a0', 'c0'), ('a0', 'c1')]
    assert project_mask(cylinder, scope, sub) == 0b01
    one = ConfigSet.from_configurations(scope, [('a1', 'c0')])
    assert project_mask(one.mask, scope, model.scope(['C'])) == 0b01
