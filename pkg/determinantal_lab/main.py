"""
Main CLI interface for the Determinantal Lab.
"""

import argparse
import logging
import sys
from typing import Callable, Dict, List, Optional

try:
    # Try relative imports first (when run as module)
    from . import __version__
    from .core.checks import THEOREM
    from .core.coupling import (check_domination, complete_coupling, complete_coupling_zn,
                                find_disjoint_union_coupling, gram_schmidt_lines, orthogonal_sum_laws)
    from .core.errors import CommandLineError, LabError
    from .core.experiments import DEFAULT_TOLERANCE, GRAM_SCHMIDT_VECTORS, ExperimentRunner
    from .core.extalg import oracle_cylinder, xi
    from .core.graphs import spanning_trees, transfer_current, tree_count
    from .core.ground import GroundSet
    from .core.kernels import (ConditionSpec, Kernel, condition, dilate, dual, ensure_valid,
                               projection_kernel, subspace_condition, validate)
    from .core.measure import cylinder_prob, entropy, enumerate_distribution
    from .core.sampler import DEFAULT_SEED, sample_many
    from .core.zoo import bernoulli, renewal_truncated, toeplitz_from_arc, toeplitz_from_symbol, zn_character
    from .reporting.report_generator import ReportGenerator
    from .utils.config import ExperimentConfig
    from .utils.file_handler import FileHandler
    from .utils.validators import InputValidator
except ImportError:
    # Fall back to absolute imports (when run directly)
    from determinantal_lab import __version__
    from determinantal_lab.core.checks import THEOREM
    from determinantal_lab.core.coupling import (check_domination, complete_coupling, complete_coupling_zn,
                                                 find_disjoint_union_coupling, gram_schmidt_lines,
                                                 orthogonal_sum_laws)
    from determinantal_lab.core.errors import CommandLineError, LabError
    from determinantal_lab.core.experiments import DEFAULT_TOLERANCE, GRAM_SCHMIDT_VECTORS, ExperimentRunner
    from determinantal_lab.core.extalg import oracle_cylinder, xi
    from determinantal_lab.core.graphs import spanning_trees, transfer_current, tree_count
    from determinantal_lab.core.ground import GroundSet
    from determinantal_lab.core.kernels import (ConditionSpec, Kernel, condition, dilate, dual, ensure_valid,
                                                projection_kernel, subspace_condition, validate)
    from determinantal_lab.core.measure import cylinder_prob, entropy, enumerate_distribution
    from determinantal_lab.core.sampler import DEFAULT_SEED, sample_many
    from determinantal_lab.core.zoo import (bernoulli, renewal_truncated, toeplitz_from_arc,
                                            toeplitz_from_symbol, zn_character)
    from determinantal_lab.reporting.report_generator import ReportGenerator
    from determinantal_lab.utils.config import ExperimentConfig
    from determinantal_lab.utils.file_handler import FileHandler
    from determinantal_lab.utils.validators import InputValidator

logger = logging.getLogger(__name__)

INPUT_FILE_FLAGS = ('kernel', 'subspace', 'graph', 'lower', 'upper', 'first', 'second', 'vectors', 'config')
OUTPUT_FILE_FLAGS = ('out', 'report', 'summary')
CSV_COMMANDS = ('enumerate', 'sample', 'ust')
UST_CHECK_LIMIT = 20


class LabArgumentParser(argparse.ArgumentParser):
    """Argument parser that raises instead of exiting on bad syntax."""

    def error(self, message: str):
        raise CommandLineError(message)


def parse_labels(value: str) -> List[str]:
    return [item.strip() for item in value.split(',') if item.strip()]


def parse_int_list(value: str) -> List[int]:
    try:
        return [int(item) for item in parse_labels(value)]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got '{value}'") from None


def parse_complex_list(value: str) -> List[complex]:
    try:
        return [complex(item.replace(' ', '')) for item in parse_labels(value)]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated complex numbers, got '{value}'") from None


def add_common_arguments(parser: argparse.ArgumentParser) -> None:
    """Flags shared by every subcommand."""
    parser.add_argument(
        '--seed',
        type=int,
        help=f'Random seed, an unsigned 64-bit integer (default: {DEFAULT_SEED})'
    )
    parser.add_argument(
        '--tol',
        type=float,
        help=f'Numerical tolerance override (default: {DEFAULT_TOLERANCE:g}, or the value in the input file)'
    )
    parser.add_argument(
        '--out', '-o',
        help='Output file path (default: stdout)'
    )
    parser.add_argument(
        '--format', '-f',
        choices=['json', 'csv'],
        default='json',
        help='Artifact format; csv applies to enumerate, sample and ust (default: json)'
    )
    parser.add_argument(
        '--quiet', '-q',
        action='store_true',
        help='Suppress progress output and console summaries'
    )
    parser.add_argument(
        '--verbose', '-V',
        action='store_true',
        help='Enable debug logging and tracebacks'
    )


def add_kernel_source(parser: argparse.ArgumentParser) -> None:
    source = parser.add_mutually_exclusive_group(required=True)
    source.add_argument('--kernel', '-k', help='Kernel JSON file {labels, re, im, tolerance}')
    source.add_argument('--subspace', '-s', help='Subspace JSON file with orthonormal basis columns')


def add_condition_arguments(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        '--include',
        type=parse_labels,
        default=[],
        help='Comma-separated labels required in the set'
    )
    parser.add_argument(
        '--exclude',
        type=parse_labels,
        default=[],
        help='Comma-separated labels required outside the set'
    )


def create_parser() -> LabArgumentParser:
    """Create and configure the argument parser."""
    parser = LabArgumentParser(
        prog='determinantal-lab',
        description="Determinantal probability measures on finite ground sets",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Examples:
  %(prog)s validate --kernel identity3.json
  %(prog)s enumerate --kernel kernel.json --format csv
  %(prog)s sample --kernel kernel.json --n 1000 --seed 7 --out draws.txt
  %(prog)s ust --graph k3.json --enumerate
  %(prog)s couple zn --n 4
  %(prog)s experiments negative-association --n 6 --trials 200 --seed 7
        """
    )
    parser.add_argument('--version', action='version', version=f'%(prog)s {__version__}')
    commands = parser.add_subparsers(dest='command', metavar='command', required=True)

    validate_parser = commands.add_parser('validate', help='Check that a kernel is a positive contraction')
    add_kernel_source(validate_parser)
    add_common_arguments(validate_parser)

    prob_parser = commands.add_parser('prob', help='Cylinder probability P[A ⊆ S, B ∩ S = ∅]')
    add_kernel_source(prob_parser)
    add_condition_arguments(prob_parser)
    add_common_arguments(prob_parser)

    enumerate_parser = commands.add_parser('enumerate', help='Exact law of every subset')
    add_kernel_source(enumerate_parser)
    enumerate_parser.add_argument(
        '--cutoff',
        type=float,
        default=0.0,
        help='Omit subsets with probability at or below this value from JSON (default: 0)'
    )
    add_common_arguments(enumerate_parser)

    entropy_parser = commands.add_parser('entropy', help='Shannon entropy in nats')
    add_kernel_source(entropy_parser)
    add_common_arguments(entropy_parser)

    sample_parser = commands.add_parser('sample', help='Exact sequential sampling')
    add_kernel_source(sample_parser)
    sample_parser.add_argument('--n', '-n', type=int, default=1, help='Number of draws (default: 1)')
    sample_parser.add_argument(
        '--randomize-order',
        action='store_true',
        help='Visit the ground set in a random order per draw'
    )
    sample_parser.add_argument(
        '--debug',
        action='store_true',
        help='Check that the diagonal of every intermediate kernel stays in [0, 1]'
    )
    sample_parser.add_argument('--summary', help='Write the JSON run summary to this file')
    add_common_arguments(sample_parser)

    condition_parser = commands.add_parser('condition', help='Condition on included and excluded elements')
    add_kernel_source(condition_parser)
    add_condition_arguments(condition_parser)
    condition_parser.add_argument(
        '--route',
        choices=['schur', 'subspace'],
        default='schur',
        help='Schur complement on the kernel, or subspace arithmetic on a projection (default: schur)'
    )
    add_common_arguments(condition_parser)

    dual_parser = commands.add_parser('dual', help='Kernel of the complement, I - Q')
    add_kernel_source(dual_parser)
    add_common_arguments(dual_parser)

    dilate_parser = commands.add_parser('dilate', help='Projection dilation of a contraction')
    add_kernel_source(dilate_parser)
    add_common_arguments(dilate_parser)

    ust_parser = commands.add_parser('ust', help='Uniform (weighted) spanning trees of a graph')
    ust_parser.add_argument('--graph', '-g', required=True, help='Graph JSON file {vertices, edges}')
    ust_parser.add_argument('--enumerate', action='store_true', help='List every spanning tree with its probability')
    ust_parser.add_argument('--sample', type=int, help='Draw this many random spanning trees')
    add_common_arguments(ust_parser)

    couple_parser = commands.add_parser('couple', help='Coupling feasibility searches')
    modes = couple_parser.add_subparsers(dest='mode', metavar='mode', required=True)
    dominate_parser = modes.add_parser('dominate', help='Monotone coupling of two laws (max-flow)')
    dominate_parser.add_argument('--lower', required=True, help='Kernel file of the smaller law')
    dominate_parser.add_argument('--upper', required=True, help='Kernel file of the larger law')
    union_parser = modes.add_parser('union', help='Disjoint union coupling for orthogonal subspaces')
    union_parser.add_argument('--first', required=True, help='Subspace file H1')
    union_parser.add_argument('--second', required=True, help='Subspace file H2, orthogonal to H1')
    zn_parser = modes.add_parser('zn', help='Complete coupling of the characters of Z_n')
    zn_parser.add_argument('--n', '-n', type=int, required=True, help='Group order')
    lines_parser = modes.add_parser('lines', help='Complete coupling of Gram-Schmidt lines')
    lines_parser.add_argument(
        '--vectors',
        help='JSON file {re, im} with one vector per row (default: the built-in four-vector example)'
    )
    for mode_parser in (dominate_parser, union_parser, zn_parser, lines_parser):
        mode_parser.add_argument('--check-only', action='store_true', help='Report feasibility without the witness')
        add_common_arguments(mode_parser)

    experiments_parser = commands.add_parser('experiments', help='Run a randomized check suite')
    experiments_parser.add_argument('suite', choices=ExperimentRunner.available_suites(), help='Suite name')
    experiments_parser.add_argument('--config', '-c', help='JSON file with suite parameters')
    experiments_parser.add_argument('--report', '-r', help='Write the check report to this file')
    experiments_parser.add_argument('--n', '-n', type=int, help='Ground set size')
    experiments_parser.add_argument('--trials', '-t', type=int, help='Number of random instances')
    experiments_parser.add_argument(
        '--ensemble',
        choices=['projection', 'contraction', 'toeplitz'],
        help='Random kernel ensemble'
    )
    experiments_parser.add_argument('--max-support', type=int, help='Largest event support')
    experiments_parser.add_argument('--draws', type=int, help='Draws per sampler instance')
    add_common_arguments(experiments_parser)

    oracle_parser = commands.add_parser('oracle', help='Exterior-algebra terms and cylinder probability')
    oracle_parser.add_argument('--subspace', '-s', required=True, help='Subspace JSON file')
    add_condition_arguments(oracle_parser)
    add_common_arguments(oracle_parser)

    zoo_parser = commands.add_parser('zoo', help='Write a named kernel family')
    families = zoo_parser.add_subparsers(dest='family', metavar='family', required=True)
    bernoulli_parser = families.add_parser('bernoulli', help='Independent sites, Q = pI')
    bernoulli_parser.add_argument('--p', type=float, required=True, help='Inclusion probability')
    renewal_parser = families.add_parser('renewal', help='Truncated two-heads renewal kernel')
    renewal_parser.add_argument('--a', type=float, required=True, help='Tail probability in (0, 1)')
    toeplitz_parser = families.add_parser('toeplitz', help='Truncated Toeplitz kernel of a trigonometric symbol')
    toeplitz_parser.add_argument(
        '--coefficients',
        type=parse_complex_list,
        required=True,
        help='Fourier coefficients c0,c1,... (complex like 0.1+0.05j)'
    )
    arc_parser = families.add_parser('arc', help='Truncated Toeplitz kernel of an arc indicator')
    arc_parser.add_argument('--start', type=float, required=True, help='Arc start in [0, 1)')
    arc_parser.add_argument('--end', type=float, required=True, help='Arc end, at most start + 1')
    zn_family_parser = families.add_parser('zn', help='Projection onto characters of Z_n')
    zn_family_parser.add_argument(
        '--frequencies',
        type=parse_int_list,
        required=True,
        help='Comma-separated character frequencies'
    )
    for family_parser in (bernoulli_parser, renewal_parser, toeplitz_parser, arc_parser, zn_family_parser):
        family_parser.add_argument('--n', '-n', type=int, required=True, help='Ground set size')
        add_common_arguments(family_parser)

    return parser


def validate_arguments(args: argparse.Namespace) -> List[str]:
    """Validate command line arguments."""
    errors = []

    for name in INPUT_FILE_FLAGS:
        path = getattr(args, name, None)
        if path is not None:
            is_valid, error = InputValidator.validate_file_path(path, ['.json'])
            if not is_valid:
                errors.append(f"Invalid {name} file: {error}")

    for name in OUTPUT_FILE_FLAGS:
        path = getattr(args, name, None)
        if path is not None:
            is_valid, error = InputValidator.validate_output_path(path)
            if not is_valid:
                errors.append(f"Invalid {name} path: {error}")

    if args.seed is not None:
        is_valid, error = InputValidator.validate_seed(args.seed)
        if not is_valid:
            errors.append(f"Invalid seed: {error}")

    if args.tol is not None:
        is_valid, error = InputValidator.validate_tolerance(args.tol)
        if not is_valid:
            errors.append(f"Invalid tolerance: {error}")

    if args.format == 'csv' and args.command not in CSV_COMMANDS:
        errors.append(f"--format csv is only supported by {', '.join(CSV_COMMANDS)}")

    counts = {'sample': ('n',), 'experiments': ('n', 'trials', 'max_support', 'draws'), 'ust': ('sample',)}
    for name in counts.get(args.command, ()):
        value = getattr(args, name, None)
        if value is not None:
            is_valid, error = InputValidator.validate_count(value)
            if not is_valid:
                errors.append(f"Invalid --{name.replace('_', '-')}: {error}")

    if args.command == 'zoo' and args.family == 'bernoulli':
        is_valid, error = InputValidator.validate_probability(args.p)
        if not is_valid:
            errors.append(f"Invalid --p: {error}")

    if args.command == 'zoo' and args.family == 'renewal':
        is_valid, error = InputValidator.validate_probability(args.a, open_interval=True)
        if not is_valid:
            errors.append(f"Invalid --a: {error}")

    return errors


def configure_logging(args: argparse.Namespace) -> None:
    if args.verbose:
        level = logging.DEBUG
    elif args.quiet:
        level = logging.WARNING
    else:
        level = logging.INFO
    logging.basicConfig(level=level, stream=sys.stderr,
                        format='%(levelname)s %(name)s: %(message)s', force=True)


def seed_of(args: argparse.Namespace) -> int:
    return DEFAULT_SEED if args.seed is None else args.seed


def emit(args: argparse.Namespace, text: str, path: Optional[str] = None) -> None:
    """Write an artifact to ``path``, else ``--out``, else stdout."""
    target = path or args.out
    if target:
        FileHandler.write_text(target, text)
        logger.info("Wrote %s", target)
    else:
        sys.stdout.write(text)


def load_kernel(args: argparse.Namespace) -> Kernel:
    """Kernel from ``--kernel``, or the projection kernel of ``--subspace``."""
    handler = FileHandler()
    if getattr(args, 'kernel', None):
        kernel = handler.read_kernel(args.kernel)
    else:
        kernel = projection_kernel(handler.read_subspace(args.subspace))
    if args.tol is not None:
        kernel = kernel.with_tolerance(args.tol)
    return kernel


def condition_spec(args: argparse.Namespace, ground: GroundSet) -> ConditionSpec:
    is_valid, error = InputValidator.validate_labels(args.include + args.exclude, ground.labels)
    if not is_valid:
        raise CommandLineError(error)
    return ConditionSpec.from_labels(ground, args.include, args.exclude)


def run_validate(args: argparse.Namespace, reporter: ReportGenerator) -> int:
    kernel = load_kernel(args)
    report = validate(kernel)
    emit(args, reporter.render(reporter.envelope('validate', {'report': report.to_dict()}, kernel)))
    reporter.print_validation(report)
    if not report.passed:
        print(f"Error: kernel is not a positive contraction: {report.problems[0]}", file=sys.stderr)
        return 1
    return 0


def run_prob(args: argparse.Namespace, reporter: ReportGenerator) -> int:
    kernel = load_kernel(args)
    ensure_valid(kernel)
    given = condition_spec(args, kernel.ground)
    probability = cylinder_prob(kernel, given.include, given.exclude)
    payload = {'include': args.include, 'exclude': args.exclude, 'probability': probability}
    emit(args, reporter.render(reporter.envelope('prob', payload, kernel)))
    return 0


def run_enumerate(args: argparse.Namespace, reporter: ReportGenerator) -> int:
    kernel = load_kernel(args)
    ensure_valid(kernel)
    table = enumerate_distribution(kernel)
    if args.format == 'csv':
        emit(args, table.to_csv())
    else:
        payload = reporter.envelope('enumerate', {'distribution': table.to_dict(cutoff=args.cutoff)}, kernel)
        emit(args, reporter.render(payload))
    reporter.print_distribution(table)
    return 0


def run_entropy(args: argparse.Namespace, reporter: ReportGenerator) -> int:
    kernel = load_kernel(args)
    ensure_valid(kernel)
    emit(args, reporter.render(reporter.envelope('entropy', {'entropy': entropy(kernel), 'unit': 'nats'}, kernel)))
    return 0


def run_sample(args: argparse.Namespace, reporter: ReportGenerator) -> int:
    kernel = load_kernel(args)
    run = sample_many(kernel, args.n, seed_of(args), randomize_order=args.randomize_order, debug=args.debug)
    if args.format == 'csv':
        emit(args, run.to_frame().to_csv(index=False))
    else:
        emit(args, FileHandler.render_samples(run))

    summary = reporter.envelope('sample', run.summary(), kernel)
    if args.summary:
        emit(args, reporter.render(summary), args.summary)
    elif args.out:
        sys.stdout.write(reporter.render(summary))
    else:
        reporter.print_lines("SAMPLE SUMMARY", [
            f"Draws: {run.count}",
            f"Distinct outcomes: {summary['distinct_outcomes']}",
            f"Mean size: {summary['mean_size']:.4f}",
        ])
    return 0


def run_condition(args: argparse.Namespace, reporter: ReportGenerator) -> int:
    if args.route == 'subspace':
        if not args.subspace:
            raise CommandLineError("--route subspace requires --subspace")
        subspace = FileHandler().read_subspace(args.subspace)
        conditioned = subspace_condition(subspace, condition_spec(args, subspace.ground))
        payload = {'route': 'subspace', **FileHandler.subspace_to_dict(conditioned)}
        emit(args, reporter.render(reporter.envelope('condition', payload, projection_kernel(subspace))))
        return 0

    kernel = load_kernel(args)
    conditioned = condition(kernel, condition_spec(args, kernel.ground))
    payload = {'route': 'schur', **FileHandler.kernel_to_dict(conditioned)}
    emit(args, reporter.render(reporter.envelope('condition', payload, kernel)))
    return 0


def run_dual(args: argparse.Namespace, reporter: ReportGenerator) -> int:
    kernel = load_kernel(args)
    payload = FileHandler.kernel_to_dict(dual(kernel))
    emit(args, reporter.render(reporter.envelope('dual', payload, kernel)))
    return 0


def run_dilate(args: argparse.Namespace, reporter: ReportGenerator) -> int:
    kernel = load_kernel(args)
    payload = FileHandler.subspace_to_dict(dilate(kernel))
    emit(args, reporter.render(reporter.envelope('dilate', payload, kernel)))
    return 0


def run_ust(args: argparse.Namespace, reporter: ReportGenerator) -> int:
    graph = FileHandler().read_graph(args.graph)
    graph.require_connected()
    kernel = transfer_current(graph)
    if args.tol is not None:
        kernel = kernel.with_tolerance(args.tol)
    labels = kernel.ground.labels
    payload = {
        'edges': list(labels),
        'tree_count': tree_count(graph),
        'marginals': {label: float(kernel.entries[i, i].real) for i, label in enumerate(labels)},
        'transfer_current': FileHandler.kernel_to_dict(kernel),
    }

    if args.enumerate:
        table = enumerate_distribution(kernel)
        if args.format == 'csv':
            emit(args, table.to_csv())
            return 0
        payload['trees'] = [
            {'edges': kernel.ground.labels_of(mask), 'probability': table.probability(mask)}
            for mask in table.support(1e-12)
        ]

    if args.sample:
        run = sample_many(kernel, args.sample, seed_of(args))
        if args.format == 'csv':
            emit(args, run.to_frame().to_csv(index=False))
            return 0
        frequencies: Dict[str, float] = {}
        for line in run.to_lines():
            frequencies[line] = frequencies.get(line, 0.0) + 1.0 / run.count
        payload['samples'] = {'count': run.count, 'seed': run.seed, 'frequencies': frequencies}
        if len(labels) <= UST_CHECK_LIMIT:
            trees = set(spanning_trees(graph))
            payload['samples']['non_trees'] = sum(1 for mask in run.outcomes if mask not in trees)

    emit(args, reporter.render(reporter.envelope('ust', payload, kernel)))
    reporter.print_lines("SPANNING TREES", [
        f"Edges: {len(labels)}",
        f"Weighted tree count: {payload['tree_count']:.6g}",
    ] + [f"  {label}: {value:.6f}" for label, value in payload['marginals'].items()])
    return 0


def run_couple(args: argparse.Namespace, reporter: ReportGenerator) -> int:
    handler = FileHandler()
    extra = {}
    if args.mode == 'dominate':
        lower = handler.read_kernel(args.lower)
        upper = handler.read_kernel(args.upper)
        ensure_valid(lower)
        ensure_valid(upper)
        result = check_domination(enumerate_distribution(lower), enumerate_distribution(upper))
    elif args.mode == 'union':
        first = handler.read_subspace(args.first)
        second = handler.read_subspace(args.second)
        result = find_disjoint_union_coupling(*orthogonal_sum_laws(first, second))
    elif args.mode == 'zn':
        result = complete_coupling_zn(args.n)
    else:
        vectors = handler.read_vectors(args.vectors).T if args.vectors else GRAM_SCHMIDT_VECTORS
        lines = gram_schmidt_lines(vectors)
        extra['lines'] = FileHandler.vectors_payload(lines.T)
        result = complete_coupling(GroundSet.of_size(lines.shape[0]), lines)

    payload = {'mode': args.mode, **extra, **result.to_dict(include_witness=not args.check_only)}
    emit(args, reporter.render(reporter.envelope('couple', payload)))
    reporter.print_lines(f"COUPLING ({args.mode})", [
        f"Feasible: {reporter.verdict_marks[result.feasible]} {result.feasible}",
        f"Max violation: {result.max_violation:.3e}",
    ])
    return 0


def run_experiments(args: argparse.Namespace, reporter: ReportGenerator) -> int:
    config = ExperimentConfig.load(args.config) if args.config else ExperimentConfig()
    config = config.merged({
        'n': args.n,
        'trials': args.trials,
        'seed': args.seed,
        'ensemble': args.ensemble,
        'max_support': args.max_support,
        'draws': args.draws,
    })
    runner = ExperimentRunner(
        seed=DEFAULT_SEED if config.seed is None else config.seed,
        n=config.n,
        trials=config.trials,
        ensemble=config.ensemble,
        max_support=config.max_support,
        draws=config.draws,
        tolerance=DEFAULT_TOLERANCE if args.tol is None else args.tol,
    )
    report = runner.run(args.suite)
    emit(args, reporter.render(reporter.envelope('experiments', report.to_dict())), args.report)
    reporter.print_check(report)
    if report.kind == THEOREM and not report.passed:
        print(f"Error: suite {report.suite} failed (worst margin {report.worst_margin:.3e})", file=sys.stderr)
        return 2
    return 0


def run_oracle(args: argparse.Namespace, reporter: ReportGenerator) -> int:
    subspace = FileHandler().read_subspace(args.subspace)
    kernel = projection_kernel(subspace)
    if args.tol is not None:
        kernel = kernel.with_tolerance(args.tol)
    given = condition_spec(args, subspace.ground)
    via_oracle = oracle_cylinder(subspace, given.include, given.exclude)
    via_determinant = cylinder_prob(kernel, given.include, given.exclude)
    payload = {
        'xi': xi(subspace).to_dict(),
        'include': args.include,
        'exclude': args.exclude,
        'oracle_probability': via_oracle,
        'determinant_probability': via_determinant,
        'difference': abs(via_oracle - via_determinant),
    }
    emit(args, reporter.render(reporter.envelope('oracle', payload, kernel)))
    return 0


def run_zoo(args: argparse.Namespace, reporter: ReportGenerator) -> int:
    builders: Dict[str, Callable[[], Kernel]] = {
        'bernoulli': lambda: bernoulli(args.n, args.p),
        'renewal': lambda: renewal_truncated(args.n, args.a),
        'toeplitz': lambda: toeplitz_from_symbol(args.n, args.coefficients),
        'arc': lambda: toeplitz_from_arc(args.n, args.start, args.end),
        'zn': lambda: zn_character(args.n, args.frequencies),
    }
    kernel = builders[args.family]()
    if args.tol is not None:
        kernel = kernel.with_tolerance(args.tol)
    payload = {'family': args.family, **FileHandler.kernel_to_dict(kernel)}
    emit(args, reporter.render(reporter.envelope('zoo', payload, kernel)))
    return 0


COMMANDS: Dict[str, Callable[[argparse.Namespace, ReportGenerator], int]] = {
    'validate': run_validate,
    'prob': run_prob,
    'enumerate': run_enumerate,
    'entropy': run_entropy,
    'sample': run_sample,
    'condition': run_condition,
    'dual': run_dual,
    'dilate': run_dilate,
    'ust': run_ust,
    'couple': run_couple,
    'experiments': run_experiments,
    'oracle': run_oracle,
    'zoo': run_zoo,
}


def _one_line(error: BaseException) -> str:
    return ' '.join(str(error).split())


def run(argv: Optional[List[str]] = None) -> int:
    """
    Parse ``argv`` and execute one subcommand.

    Returns:
        0 on success, 1 on input or domain errors, 2 when a theorem suite fails
    """
    parser = create_parser()
    try:
        args = parser.parse_args(argv)
    except CommandLineError as e:
        print(f"Error: {_one_line(e)}", file=sys.stderr)
        return 1
    except SystemExit as e:
        # --help and --version
        return e.code if isinstance(e.code, int) else 0

    errors = validate_arguments(args)
    if errors:
        for error in errors:
            print(f"Error: {error}", file=sys.stderr)
        return 1

    configure_logging(args)
    reporter = ReportGenerator(quiet=args.quiet)

    try:
        return COMMANDS[args.command](args, reporter)
    except (LabError, FileNotFoundError) as e:
        print(f"Error: {_one_line(e)}", file=sys.stderr)
        return 1
    except KeyboardInterrupt:
        print("\nRun interrupted by user", file=sys.stderr)
        return 1
    except Exception as e:
        if args.verbose:
            import traceback
            traceback.print_exc()
        else:
            print(f"Unexpected error: {_one_line(e)}", file=sys.stderr)
        return 1


def main():
    """Main entry point."""
    sys.exit(run(sys.argv[1:]))


if __name__ == '__main__':
    main()
