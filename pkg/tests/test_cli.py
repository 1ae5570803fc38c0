"""
test_cli.py
----------------------------------------

The beltree command line, driven through `main`.
"""

import json

import pytest

from .context import src

from src.beltree import main
from src.generator import GeneratedDistribution
from src.serialization import load
from src.valuation import BeliefValuation


@pytest.fixture
def generated(tmp_path):
    model = tmp_path / 'model.json'
    joint = tmp_path / 'joint.json'
    assert main(['generate', '--vars', '4', '--seed', '3', '-o', str(model), '--joint', str(joint)]) == 0
    return model, joint


def test_generate_writes_a_network_and_its_joint(generated):
    model, joint = generated
    assert isinstance(load(str(model)), GeneratedDistribution)
    assert isinstance(load(str(joint)), BeliefValuation)


def test_generate_a_hypertree(tmp_path, capsys):
    assert main(['generate', '--vars', '4', '--hypertree']) == 0
    document = json.loads(capsys.readouterr().out)
    assert document['kind'] == 'hypertree'


def test_delta_of_a_model_from_itself_is_zero(generated, capsys):
    model, joint = generated
    assert main(['delta', '-a', str(model), '-b', str(joint)]) == 0
    assert float(capsys.readouterr().out) == pytest.approx(0.0, abs=1e-9)


def test_sample_then_learn(generated, tmp_path, capsys):
    model, _ = generated
    data = tmp_path / 'data.jsonl'
    out = tmp_path / 'learned.json'
    report = tmp_path / 'report.json'
    assert main(['sample', '-m', str(model), '-n', '50', '-o', str(data)]) == 0
    assert len(data.read_text().splitlines()) == 51
    assert main(['learn', '--from-data', str(data), '--out', str(out), '--report', str(report),
                 '--truth', str(model)]) == 0
    summary = json.loads(capsys.readouterr().out)
    assert {'edges', 'truth', 'hamming', 'recovered', 'delta'} <= set(summary)
    assert len(json.loads(report.read_text())['edges']) == 3
    assert load(str(out)).is_valuated


def test_learn_from_the_exact_model_recovers_it(generated, capsys):
    model, _ = generated
    assert main(['learn', '--from-model', str(model), '--truth', str(model)]) == 0
    assert json.loads(capsys.readouterr().out)['recovered']


def test_propagate_and_convert(tmp_path, capsys):
    tree = tmp_path / 'tree.json'
    network = tmp_path / 'network.json'
    assert main(['generate', '--vars', '4', '--hypertree', '--seed', '2', '-o', str(tree)]) == 0
    assert main(['propagate', '-m', str(tree), '--evidence', 'A=1', '--query', 'A', '--query', 'B']) == 0
    marginals = json.loads(capsys.readouterr().out)
    assert set(marginals) == {'A', 'B'}
    assert marginals['A']['masses'] == [{'set': [['1']], 'mass': pytest.approx(1.0)}]
    assert main(['convert', '-m', str(tree), '-o', str(network)]) == 0
    assert json.loads(network.read_text())['kind'] == 'network'


def test_check_loops_passes(capsys):
    assert main(['check', '--loops']) == 0
    verdicts = [json.loads(line) for line in capsys.readouterr().out.splitlines()]
    assert [verdict['suite'] for verdict in verdicts] == ['loops']
    assert verdicts[0]['passed']


@pytest.mark.parametrize('flag, suite', [
    ('--examples', 'loops'),
    ('--theorem4', 'path_dependence'),
    ('--path-dependence', 'path_dependence'),
])
def test_check_flags_select_one_suite(flag, suite, capsys):
    assert main(['check', flag, '--trials', '1']) == 0
    verdicts = [json.loads(line) for line in capsys.readouterr().out.splitlines()]
    assert [verdict['suite'] for verdict in verdicts] == [suite]


def test_repeated_evidence_flags_are_all_applied(tmp_path, capsys):
    tree = tmp_path / 'tree.json'
    assert main(['generate', '--vars', '4', '--hypertree', '--seed', '2', '-o', str(tree)]) == 0
    assert main(['propagate', '-m', str(tree), '--evidence', 'A=0', '--evidence', 'B=1']) == 0
    repeated = json.loads(capsys.readouterr().out)
    assert main(['propagate', '-m', str(tree), '--evidence', 'A=0, B=1']) == 0
    joined = json.loads(capsys.readouterr().out)
    assert repeated == joined
    assert repeated['A']['masses'] == [{'set': [['0']], 'mass': pytest.approx(1.0)}]
    assert repeated['B']['masses'] == [{'set': [['1']], 'mass': pytest.approx(1.0)}]


def test_missing_file_is_a_data_error(tmp_path, capsys):
    assert main(['delta', '-a', str(tmp_path / 'nope.json'), '-b', str(tmp_path / 'nope.json')]) == 2
    assert 'cannot be found' in capsys.readouterr().err


def test_bad_evidence_is_a_usage_error(generated, capsys):
    model, _ = generated
    assert main(['propagate', '-m', str(model), '--evidence', 'A=7']) == 1
    assert '^' in capsys.readouterr().err


@pytest.mark.parametrize('argv', [
    [],
    ['frobnicate'],
    ['learn'],
    ['generate', '--vars', 'many'],
])
def test_usage_errors_exit_with_one(argv):
    with pytest.raises(SystemExit) as info:
        main(argv)
    assert info.value.code == 1


def test_bad_configuration_is_a_numeric_error(capsys):
    assert main(['generate', '--vars', '12']) == 3
