"""
beltree.py
----------------------------------------

This is the main file in the Beltree project. It implements
the command line, one subcommand per task: generating random
tree distributions and hypertrees, sampling from them, learning
trees back, propagating evidence, converting hypertrees to
belief networks, measuring δ and running the property suites.

Pass "--help" or "-h", to the program or to a subcommand, for
the full list of flags. Documents are JSON files; a path of
"-" reads standard input or writes standard output, so

    beltree generate --vars 8 --seed 1 | beltree sample -n 200 | beltree learn --from-data -

runs a whole experiment.

"""

import argparse
import json
import logging
import os
import sys

from . import checks
from ._parser import parse_evidence
from .environment import standard_env
from .generator import (GeneratedDistribution, GeneratorConfig, generate_hypertree_distribution,
                        generate_tree_distribution, sample)
from .learning import MEASURES, EmpiricalSource, learn_tree, recovery_report
from .network import BeliefNetwork, hypertree_to_network, network_joint
from .propagation import MarkovTree, brute_force_joint, markov_tree_from_network, propagate, query
from .serialization import SerializationError, dump_dataset, load_dataset, read, serialize, write
from .utils import BeltreeError, configure_logging
from .valuation import BeliefValuation, delta_divergence


log = logging.getLogger(__name__)

STDIO = '-'

# Additional `check` flags accepted for some suites.
SUITE_ALIASES = {
    'loops': ['--examples'],
    'path_dependence': ['--theorem4'],
}


class FileDoesNotExistsError(BeltreeError):
    pass


class ArgumentParser(argparse.ArgumentParser):
    """
    argparse, exiting with status 1 on usage errors.
    """

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, '{}: error: {}\n'.format(self.prog, message))


def check_if_file_exists(filepath):
    """
    Check if the file at the given path exists.
    """
    if filepath != STDIO and not os.path.isfile(filepath):
        raise FileDoesNotExistsError("File \"{}\" cannot be found and/or does not exists.".format(filepath))


def read_document(path, env=None):
    check_if_file_exists(path)
    if path == STDIO:
        return read(sys.stdin, env, 'standard input')
    with open(path) as fp:
        return read(fp, env, path)


def write_document(value, path):
    if path == STDIO:
        write(value, sys.stdout)
    else:
        with open(path, 'w') as fp:
            write(value, fp)


def print_json(value):
    json.dump(value, sys.stdout, indent=1)
    sys.stdout.write('\n')


def as_joint(document, env=None):
    """
    The joint valuation a loaded document describes.
    """
    if isinstance(document, BeliefValuation):
        return document
    if isinstance(document, GeneratedDistribution):
        document = document.network
    if isinstance(document, BeliefNetwork):
        return network_joint(document, env)
    if isinstance(document, MarkovTree):
        return brute_force_joint(document.factors, env)
    raise SerializationError('a {} document does not describe a distribution'.format(type(document).__name__))


def as_markov_tree(document):
    if isinstance(document, MarkovTree):
        return document
    if isinstance(document, GeneratedDistribution):
        document = document.network
    if isinstance(document, BeliefNetwork):
        return markov_tree_from_network(document)
    raise SerializationError('propagation needs a hypertree or a network, not a {}'.format(
        type(document).__name__))


def run_generate(args, env):
    cfg = GeneratorConfig(n_vars=args.vars, domain_size=args.domain_size, focal=args.focal,
                          q_min=args.q_min, seed=args.seed, bayesian=args.bayesian)
    if args.hypertree:
        generated = generate_hypertree_distribution(cfg)
        joint = brute_force_joint(generated.factors, env) if args.joint else None
    else:
        generated = generate_tree_distribution(cfg)
        joint = generated.joint
    write_document(generated, args.out)
    if args.joint:
        write_document(joint, args.joint)


def run_sample(args, env):
    joint = as_joint(read_document(args.model, env), env)
    data = sample(joint, args.n, seed=args.seed)
    log.info('drew %d records from %d focal sets', len(data), len(joint.masses))
    if args.out == STDIO:
        dump_dataset(data, sys.stdout)
    else:
        with open(args.out, 'w') as fp:
            dump_dataset(data, fp)


def _read_dataset(path, env):
    check_if_file_exists(path)
    if path == STDIO:
        return load_dataset(sys.stdin, env)
    with open(path) as fp:
        return load_dataset(fp, env)


def run_learn(args, env):
    if args.from_model:
        source = as_joint(read_document(args.from_model, env), env)
    else:
        source = EmpiricalSource(_read_dataset(args.from_data, env), smoothing=args.smoothing)
    learned = learn_tree(source, args.measure, root=args.root, env=env)
    if args.report:
        with open(args.report, 'w') as fp:
            json.dump({
                'measure': args.measure,
                'root': learned.root,
                'edges': [list(edge) for edge in learned.edges],
                'dependence': learned.matrix.as_dict(),
                'ties': [{'value': tie['value'], 'pairs': [list(pair) for pair in tie['pairs']]}
                         for tie in learned.ties],
            }, fp, indent=1)
    if args.out:
        write_document(learned.network, args.out)
    if args.truth:
        truth = read_document(args.truth, env)
        if not isinstance(truth, GeneratedDistribution):
            raise SerializationError('{} has no generating tree to compare with'.format(args.truth))
        print_json(recovery_report(learned, truth.tree_edges, as_joint(truth, env), env))
    elif not args.out:
        write_document(learned.network, STDIO)


def run_propagate(args, env):
    tree = as_markov_tree(read_document(args.model, env))
    evidence = parse_evidence(', '.join(args.evidence), tree.model) if args.evidence else []
    results = propagate(tree, evidence)
    names = args.query or list(tree.model.names)
    print_json({name: serialize(query(results, name, args.normalize, env))['valuation'] for name in names})


def run_convert(args, env):
    tree = read_document(args.model, env)
    if not isinstance(tree, MarkovTree):
        raise SerializationError('convert needs a hypertree document')
    write_document(hypertree_to_network(tree, env), args.out)


def run_delta(args, env):
    approx = as_joint(read_document(args.approx, env), env)
    reference = as_joint(read_document(args.reference, env), env)
    print(delta_divergence(approx, reference))


def run_check(args, env):
    names = [name for name in checks.SUITES if getattr(args, name)] or list(checks.SUITES)
    verdicts = checks.run_suites(names, args.trials, args.seed, env)
    for verdict in verdicts:
        print(json.dumps(verdict))
    if not all(verdict['passed'] for verdict in verdicts):
        return 3
    return 0


def build_parser():
    description = """
    Beltree learns and propagates Dempster-Shafer belief networks. It
    generates random tree-structured belief distributions, samples set-valued
    records from them, learns the tree back with a dependence measure,
    converts valuated hypertrees into belief networks and runs evidence
    through Markov trees. Documentation can be found in the ``doc/`` directory.
        """
    verbose = dict(action='count', help='Log progress to standard error; repeat for debug output.')
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument('-v', '--verbose', default=argparse.SUPPRESS, **verbose)

    parser = ArgumentParser(prog='beltree', description=description)
    parser.add_argument('-v', '--verbose', default=0, **verbose)
    commands = parser.add_subparsers(dest='command', metavar='command')
    commands.required = True

    generate = commands.add_parser('generate', parents=[common],
                                   help='Generate a random tree distribution or valuated hypertree.')
    generate.add_argument('--vars', type=int, default=5, help='Number of variables (2 to 10).')
    generate.add_argument('--domain-size', type=int, default=2, help='Values per variable.')
    generate.add_argument('--focal', type=int, default=2, help='Informative focal sets per node valuation.')
    generate.add_argument('--q-min', type=float, default=0.05, help='Lower bound on every joint commonality.')
    generate.add_argument('--seed', type=int, default=0)
    generate.add_argument('--bayesian', action='store_true', help='Generate Bayesian node valuations.')
    generate.add_argument('--hypertree', action='store_true',
                          help='Generate a valuated hypertree instead of a tree network.')
    generate.add_argument('-o', '--out', default=STDIO, help='Where to write the model (default: stdout).')
    generate.add_argument('--joint', help='Also write the joint valuation to this file.')
    generate.set_defaults(func=run_generate)

    sampler = commands.add_parser('sample', parents=[common], help='Draw focal sets from a distribution.')
    sampler.add_argument('-m', '--model', default=STDIO, help='Joint, network or hypertree document.')
    sampler.add_argument('-n', type=int, default=200, help='Number of records.')
    sampler.add_argument('--seed', type=int, default=0)
    sampler.add_argument('-o', '--out', default=STDIO, help='Where to write the JSON lines dataset.')
    sampler.set_defaults(func=run_sample)

    learn = commands.add_parser('learn', parents=[common], help='Learn a tree network.')
    sources = learn.add_mutually_exclusive_group(required=True)
    sources.add_argument('--from-model', help='Learn from the exact joint of a document.')
    sources.add_argument('--from-data', help='Learn from a JSON lines dataset.')
    learn.add_argument('--measure', choices=MEASURES, default='dep-bn')
    learn.add_argument('--root', help='Variable to orient the tree from (default: the first).')
    learn.add_argument('--smoothing', action=argparse.BooleanOptionalAction, default=True,
                       help='Mix estimated marginals with the vacuous valuation.')
    learn.add_argument('--out', help='Where to write the learned network.')
    learn.add_argument('--report', help='Where to write the dependence matrix, arms and ties.')
    learn.add_argument('--truth', help='Generated model to compare the learned tree with.')
    learn.set_defaults(func=run_learn)

    prop = commands.add_parser('propagate', parents=[common], help='Propagate evidence in a Markov tree.')
    prop.add_argument('-m', '--model', default=STDIO, help='Hypertree or network document.')
    prop.add_argument('--evidence', action='append',
                      help='Observations such as "A=0, B=0|1@0.8"; repeatable.')
    prop.add_argument('--query', action='append', help='Variable to report; repeatable (default: all).')
    prop.add_argument('--normalize', action=argparse.BooleanOptionalAction, default=True,
                      help='Normalize away the conflict of the reported marginals.')
    prop.set_defaults(func=run_propagate)

    convert = commands.add_parser('convert', parents=[common], help='Convert a hypertree to a belief network.')
    convert.add_argument('-m', '--model', default=STDIO, help='Hypertree document.')
    convert.add_argument('-o', '--out', default=STDIO)
    convert.set_defaults(func=run_convert)

    delta = commands.add_parser('delta', parents=[common], help='δ of an approximation from a reference.')
    delta.add_argument('-a', '--approx', required=True, help='The approximating distribution.')
    delta.add_argument('-b', '--reference', required=True, help='The reference distribution.')
    delta.set_defaults(func=run_delta)

    check = commands.add_parser('check', parents=[common], help='Run property suites (default: all).')
    for name, suite in checks.SUITES.items():
        flags = ['--{}'.format(name.replace('_', '-'))] + SUITE_ALIASES.get(name, [])
        check.add_argument(*flags, dest=name, action='store_true',
                           help=' '.join(suite.__doc__.split()).replace('%', '%%'))
    check.add_argument('--trials', type=int, help='Trials per suite (default: per suite).')
    check.add_argument('--seed', type=int, default=0)
    check.set_defaults(func=run_check)
    return parser


def main(argv=None):
    """
    The main function in this module. Parses the command line,
    runs the subcommand and returns the exit status.
    """
    parser = build_parser()
    args = parser.parse_args(argv)
    configure_logging(args.verbose)
    try:
        status = args.func(args, standard_env)
    except BeltreeError as err:
        log.debug('failed', exc_info=True)
        sys.stderr.write('beltree: {}\n'.format(err))
        return err.exit_code
    return status or 0


if __name__ == '__main__':
    sys.exit(main())
