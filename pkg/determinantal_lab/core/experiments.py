"""
Named experiment suites over seeded random instances.

Instance ``i`` of suite ``s`` run with seed ``k`` draws from its own
generator seeded by ``derive_seed(k, s, i)``, so a suite's report depends
only on (seed, suite, parameters).
"""

import itertools
import logging
import math
import time
from typing import Callable, Dict, Iterator, List, Optional, Sequence, Tuple

import numpy as np

from .checks import (CONCAVITY_GROUND_LIMIT, CONJECTURE, THEOREM, CheckReport, bk_search,
                     check_commuting_domination, check_conditional_na, check_conditional_projection,
                     check_negative_association, check_tail_correlation, concentration_check,
                     entropy_concavity_experiment)
from .coupling import (BRUTE_FORCE_LIMIT, LP_TOL, check_domination, codim1_coupling_check,
                       complete_coupling, complete_coupling_zn, dominates_by_events,
                       find_disjoint_union_coupling, gram_schmidt_lines, orthogonal_sum_laws)
from .ensembles import (ENSEMBLES, battery, nested_projections, orthogonal_decomposition, random_contraction,
                        random_kernel, random_projection, random_toeplitz)
from .errors import DomainError, InternalConsistencyError
from .extalg import oracle_cylinder
from .graphs import (CONDITIONED_TOL, EXPECTATION_TOL, complete_graph, conditioned_kirchhoff, expected_kirchhoff,
                     random_connected_graph, star_space, transfer_current)
from .ground import GroundSet, indices_of
from .kernels import (ConditionSpec, Kernel, Subspace, condition, dilate, dual, projection_kernel, reweight,
                      subspace_condition)
from .measure import cylinder_prob, enumerate_distribution, tv_distance
from .sampler import DEFAULT_SEED, chisquare_gof, empirical_table, gap_statistics, sample_many, site_frequencies
from .zoo import renewal_truncated
from ..utils.hashing import HashingUtils

logger = logging.getLogger(__name__)

DEFAULT_TOLERANCE = 1e-9
SAMPLER_TV_LIMIT = 0.005
SAMPLER_P_FLOOR = 1e-4
RENEWAL_A = 0.4
RENEWAL_SITES = 30
RENEWAL_MARGINAL_BAND = 0.01
RENEWAL_GAP_BAND = 0.02
ENTROPY_TOEPLITZ_EXTRA_SITES = 2
CONDITIONING_TOL = 1e-8
CONDITIONING_FLOOR = 1e-6
DILATION_TOL = 1e-8
GRAM_SCHMIDT_VECTORS = np.array([
    [1, 1, -3, 1],
    [1, -1, 5, 2],
    [1, 1, -2, -2],
    [-3, 2, 1, 4],
], dtype=float).T


def merge_reports(suite: str, kind: str, reports: List[CheckReport], seed: int,
                  details: Optional[Dict] = None) -> CheckReport:
    """Combine per-instance reports in instance order."""
    flags = []
    counterexample = None
    for index, report in enumerate(reports):
        for flag in report.flags:
            flags.append(dict(flag, instance=index))
        if report.counterexample is not None and counterexample is None:
            if kind == THEOREM and not report.passed:
                counterexample = dict(report.counterexample, instance=index)
    if kind == CONJECTURE and flags:
        counterexample = min(flags, key=lambda flag: flag['margin']).get('payload')
    merged = dict(details or {})
    merged['margins'] = [report.worst_margin for report in reports]
    return CheckReport(
        suite=suite,
        kind=kind,
        instances=len(reports),
        worst_margin=min((r.worst_margin for r in reports), default=math.inf),
        passed=all(r.passed for r in reports),
        counterexample=counterexample,
        flags=flags,
        seed=seed,
        details=merged,
    )


def _random_split(rng: np.random.Generator, positions: List[int], max_support: int):
    """Two disjoint nonempty masks drawn from ``positions``."""
    order = [positions[i] for i in rng.permutation(len(positions))]
    first_size = int(rng.integers(1, min(max_support, len(order) - 1) + 1))
    second_size = int(rng.integers(1, min(max_support, len(order) - first_size) + 1))
    first = sum(1 << p for p in order[:first_size])
    second = sum(1 << p for p in order[first_size:first_size + second_size])
    return first, second


def _random_nonempty_mask(rng: np.random.Generator, positions: List[int], limit: int) -> int:
    order = [positions[i] for i in rng.permutation(len(positions))]
    size = int(rng.integers(1, min(limit, len(order)) + 1))
    return sum(1 << p for p in order[:size])


def _max_abs(values: np.ndarray) -> float:
    return float(np.max(np.abs(values), initial=0.0))


Step = Tuple[int, bool]


def _condition_steps(size: int, limit: int) -> Iterator[Tuple[Step, ...]]:
    """Every way of forcing 1..limit elements inside (True) or outside (False)."""
    for count in range(1, min(limit, size) + 1):
        for positions in itertools.combinations(range(size), count):
            for sides in itertools.product((True, False), repeat=count):
                yield tuple(zip(positions, sides))


def _spec_of(steps: Sequence[Step]) -> ConditionSpec:
    include = sum(1 << position for position, inside in steps if inside)
    exclude = sum(1 << position for position, inside in steps if not inside)
    return ConditionSpec(include, exclude)


def _two_step_error(kernel: Kernel, dilation: Subspace, steps: Tuple[Step, ...],
                    once: Kernel, once_subspace: Subspace) -> float:
    """Condition on the first step and the rest separately, in both orders."""
    labels = kernel.ground.labels
    worst = 0.0
    for first, second in ((steps[:1], steps[1:]), (steps[1:], steps[:1])):
        step = condition(kernel, _spec_of(first))
        given = ConditionSpec.from_labels(step.ground,
                                          [labels[p] for p, inside in second if inside],
                                          [labels[p] for p, inside in second if not inside])
        worst = max(worst, _max_abs(condition(step, given).entries - once.entries))
        stepped = subspace_condition(subspace_condition(dilation, _spec_of(first)), _spec_of(second))
        worst = max(worst, _max_abs(stepped.projector() - once_subspace.projector()))
    return worst


def _conditioning_instance(name: str, kernel: Kernel, limit: int) -> CheckReport:
    """
    Schur conditioning against enumeration, against subspace conditioning of
    the dilation, and against conditioning in two steps.
    """
    table = enumerate_distribution(kernel)
    dilation = dilate(kernel)
    worst = 0.0
    worst_spec = None
    checked = skipped = 0
    for steps in _condition_steps(kernel.size, limit):
        given = _spec_of(steps)
        if cylinder_prob(kernel, given.include, given.exclude) <= CONDITIONING_FLOOR:
            skipped += 1
            continue
        once = condition(kernel, given)
        error = tv_distance(enumerate_distribution(once), table.conditional(given.include, given.exclude))
        rest = indices_of(kernel.ground.full_mask & ~given.touched)
        once_subspace = subspace_condition(dilation, given)
        error = max(error, _max_abs(once_subspace.projector()[np.ix_(rest, rest)] - once.entries))
        if len(steps) > 1:
            error = max(error, _two_step_error(kernel, dilation, steps, once, once_subspace))
        checked += 1
        if worst_spec is None or error > worst:
            worst, worst_spec = error, given
    details = {'kernel': name, 'size': kernel.size, 'conditions': checked, 'skipped': skipped,
               'max_error': worst}
    if worst_spec is not None:
        details['worst'] = {'include': kernel.ground.labels_of(worst_spec.include),
                            'exclude': kernel.ground.labels_of(worst_spec.exclude)}
    return CheckReport('conditioning', THEOREM, 1, CONDITIONING_TOL - worst, worst <= CONDITIONING_TOL,
                       details=details)


class ExperimentRunner:
    """Runs the registered suites with a resolved parameter set."""

    SUITES: Dict[str, Dict] = {}

    def __init__(self, seed: int = DEFAULT_SEED, n: Optional[int] = None, trials: Optional[int] = None,
                 ensemble: Optional[str] = None, max_support: Optional[int] = None,
                 draws: Optional[int] = None, tolerance: float = DEFAULT_TOLERANCE):
        self.seed = seed
        self.overrides = {'n': n, 'trials': trials, 'ensemble': ensemble,
                          'max_support': max_support, 'draws': draws}
        self.tolerance = tolerance

    @classmethod
    def suite(cls, name: str, kind: str, **defaults):
        def register(function: Callable) -> Callable:
            cls.SUITES[name] = {'function': function, 'kind': kind, 'defaults': defaults,
                                'summary': (function.__doc__ or '').strip().splitlines()[0]}
            return function
        return register

    @classmethod
    def available_suites(cls) -> List[str]:
        return sorted(cls.SUITES)

    def parameters(self, name: str) -> Dict:
        entry = self.SUITES[name]
        params = dict(entry['defaults'])
        params.update({k: v for k, v in self.overrides.items() if v is not None and k in params})
        return params

    def rng(self, name: str, index: int) -> np.random.Generator:
        return np.random.default_rng(HashingUtils.derive_seed(self.seed, name, index))

    def run(self, name: str) -> CheckReport:
        """
        Run one suite.

        Raises:
            DomainError: On an unknown suite name
        """
        if name not in self.SUITES:
            raise DomainError(f"Unknown suite '{name}'; choose from {', '.join(self.available_suites())}")
        entry = self.SUITES[name]
        params = self.parameters(name)
        logger.info("Running suite %s with %s", name, params)
        started = time.perf_counter()
        report = entry['function'](self, **params)
        report.seed = self.seed
        report.details['parameters'] = params
        logger.info("Suite %s: %s over %d instances, worst margin %.3e (%.1fs)", name,
                    'passed' if report.passed else 'FAILED', report.instances,
                    report.worst_margin, time.perf_counter() - started)
        return report


suite = ExperimentRunner.suite


@suite('triple-oracle', THEOREM, n=6, trials=200)
def _triple_oracle(runner: ExperimentRunner, n: int, trials: int) -> CheckReport:
    """Determinant, exterior-algebra and enumeration routes agree on elementary masses."""
    reports = []
    for index in range(trials):
        rng = runner.rng('triple-oracle', index)
        size = int(rng.integers(1, n + 1))
        subspace = random_projection(size, rng)
        kernel = projection_kernel(subspace)
        full = subspace.ground.full_mask
        enumerated = enumerate_distribution(kernel).mass
        error = 0.0
        for mask in range(1 << size):
            determinant = cylinder_prob(kernel, mask, full & ~mask)
            exterior = oracle_cylinder(subspace, mask, full & ~mask)
            error = max(error, abs(determinant - enumerated[mask]), abs(exterior - enumerated[mask]))
        reports.append(CheckReport('triple-oracle', THEOREM, 1, -error, error <= runner.tolerance,
                                   details={'size': size, 'rank': subspace.rank}))
    return merge_reports('triple-oracle', THEOREM, reports, runner.seed)


def _seeded_kernels(runner: ExperimentRunner, name: str, n: int, trials: int,
                    smallest: int = 1) -> List[Tuple[str, Kernel]]:
    """``trials`` seeded kernels cycling through the ensembles."""
    kernels = []
    for index in range(trials):
        rng = runner.rng(name, index)
        ensemble = ENSEMBLES[index % len(ENSEMBLES)]
        kernels.append((f"{ensemble}-{index}", random_kernel(ensemble, int(rng.integers(smallest, n + 1)), rng)))
    return kernels


@suite('duality', THEOREM, n=6, trials=30)
def _duality(runner: ExperimentRunner, n: int, trials: int) -> CheckReport:
    """I - Q is an involution whose law is the complement of the law of Q."""
    reports = []
    for name, kernel in battery() + _seeded_kernels(runner, 'duality', n, trials):
        complement = dual(kernel)
        involution = _max_abs(dual(complement).entries - kernel.entries)
        law = tv_distance(enumerate_distribution(complement), enumerate_distribution(kernel).complement_pushforward())
        error = max(involution, law)
        reports.append(CheckReport('duality', THEOREM, 1, runner.tolerance - error, error <= runner.tolerance,
                                   details={'kernel': name, 'involution': involution, 'tv': law}))
    return merge_reports('duality', THEOREM, reports, runner.seed)


@suite('conditioning', THEOREM, n=6, trials=10)
def _conditioning(runner: ExperimentRunner, n: int, trials: int) -> CheckReport:
    """Schur, subspace and two-step conditioning agree with the enumerated conditional law."""
    reports = [_conditioning_instance(name, kernel, 2) for name, kernel in battery()]
    for name, kernel in _seeded_kernels(runner, 'conditioning', max(n, 2), trials, smallest=2):
        reports.append(_conditioning_instance(name, kernel, kernel.size - 1))
    return merge_reports('conditioning', THEOREM, reports, runner.seed)


@suite('dilation', THEOREM, n=5, trials=30)
def _dilation(runner: ExperimentRunner, n: int, trials: int) -> CheckReport:
    """The dilated projection on E ∪ Ê restricts to P^Q on E."""
    reports = []
    for name, kernel in battery() + _seeded_kernels(runner, 'dilation', n, trials):
        size = kernel.size
        dilation = dilate(kernel)
        projector = dilation.projector()
        compression = _max_abs(projector[:size, :size] - kernel.entries)
        idempotence = _max_abs(projector @ projector - projector)
        marginal = enumerate_distribution(projection_kernel(dilation)).pushforward(range(size))
        law = tv_distance(marginal, enumerate_distribution(kernel))
        error = max(compression, idempotence, law)
        reports.append(CheckReport('dilation', THEOREM, 1, DILATION_TOL - error, error <= DILATION_TOL,
                                   details={'kernel': name, 'size': size, 'tv': law,
                                            'compression': compression, 'idempotence': idempotence}))
    return merge_reports('dilation', THEOREM, reports, runner.seed)


@suite('negative-association', THEOREM, n=8, trials=100, max_support=4)
def _negative_association(runner: ExperimentRunner, n: int, trials: int, max_support: int) -> CheckReport:
    """Increasing events on disjoint parts are negatively correlated."""
    reports = []
    for index in range(trials):
        rng = runner.rng('negative-association', index)
        size = int(rng.integers(2, n + 1))
        variant = index % 4
        if variant == 0:
            kernel = random_contraction(size, rng)
        elif variant == 1:
            kernel = projection_kernel(random_projection(size, rng))
        elif variant == 2:
            kernel = projection_kernel(reweight(random_projection(size, rng), rng.uniform(0.2, 5.0, size)))
        else:
            kernel = random_toeplitz(size, rng)
        split = _random_split(rng, list(range(size)), max_support)
        reports.append(check_negative_association(kernel, split, runner.tolerance))
    return merge_reports('negative-association', THEOREM, reports, runner.seed)


@suite('conditional-na', THEOREM, n=7, trials=50, max_support=4)
def _conditional_na(runner: ExperimentRunner, n: int, trials: int, max_support: int) -> CheckReport:
    """Negative association survives conditioning on inclusions and exclusions."""
    reports = []
    for index in range(trials):
        rng = runner.rng('conditional-na', index)
        size = int(rng.integers(4, max(n, 4) + 1))
        kernel = random_contraction(size, rng)
        order = [int(i) for i in rng.permutation(size)]
        fixed = int(rng.integers(1, 3))
        include = exclude = 0
        for position in order[:fixed]:
            if rng.random() < 0.5:
                include |= 1 << position
            else:
                exclude |= 1 << position
        split = _random_split(rng, order[fixed:], max_support)
        reports.append(check_conditional_na(kernel, ConditionSpec(include, exclude), split, runner.tolerance))
    return merge_reports('conditional-na', THEOREM, reports, runner.seed)


@suite('bk', CONJECTURE, n=5, trials=20, ensemble='contraction')
def _bk(runner: ExperimentRunner, n: int, trials: int, ensemble: str) -> CheckReport:
    """Disjoint occurrence versus product of probabilities (open question probe)."""
    reports = []
    for index in range(trials):
        rng = runner.rng('bk', index)
        kernel = random_kernel(ensemble, int(rng.integers(2, n + 1)), rng)
        reports.append(bk_search(kernel, 50, HashingUtils.derive_seed(runner.seed, 'bk-events', index)))
    return merge_reports('bk', CONJECTURE, reports, runner.seed)


@suite('tail-correlation', THEOREM, n=8, trials=50, max_support=3)
def _tail_correlation(runner: ExperimentRunner, n: int, trials: int, max_support: int) -> CheckReport:
    """Correlations between K- and F-measurable events obey the leakage bound."""
    reports = []
    for index in range(trials):
        rng = runner.rng('tail-correlation', index)
        size = int(rng.integers(2, n + 1))
        subspace = random_projection(size, rng)
        k_mask, _ = _random_split(rng, list(range(size)), max_support)
        rest = [i for i in range(size) if not k_mask >> i & 1]
        f_mask = _random_nonempty_mask(rng, rest, len(rest))
        reports.append(check_tail_correlation(subspace, k_mask, f_mask, runner.tolerance))
    return merge_reports('tail-correlation', THEOREM, reports, runner.seed)


@suite('entropy-concavity', CONJECTURE, n=6, trials=1000, ensemble=None)
def _entropy_concavity(runner: ExperimentRunner, n: int, trials: int, ensemble: Optional[str]) -> CheckReport:
    """
    Entropy of the midpoint kernel versus the mean entropy (conjecture probe).

    Without an ensemble, ``trials`` contraction pairs on ``n`` elements are
    followed by ``trials // 5`` Toeplitz pairs on ``n + 2`` elements.
    """
    if ensemble is not None:
        return entropy_concavity_experiment(trials, n, ensemble, runner.seed)
    toeplitz_size = min(n + ENTROPY_TOEPLITZ_EXTRA_SITES, CONCAVITY_GROUND_LIMIT)
    runs = {
        'contraction': (n, entropy_concavity_experiment(trials, n, 'contraction', runner.seed)),
        'toeplitz': (toeplitz_size, entropy_concavity_experiment(max(trials // 5, 1), toeplitz_size,
                                                                 'toeplitz', runner.seed)),
    }
    flags = [dict(flag, ensemble=name) for name, (_, report) in runs.items() for flag in report.flags]
    return CheckReport(
        suite='entropy-concavity',
        kind=CONJECTURE,
        instances=sum(report.instances for _, report in runs.values()),
        worst_margin=min(report.worst_margin for _, report in runs.values()),
        passed=not flags,
        counterexample=min(flags, key=lambda flag: flag['margin'])['payload'] if flags else None,
        flags=flags,
        seed=runner.seed,
        details={'runs': {name: {'n': size, 'pairs': report.instances, 'worst_margin': report.worst_margin,
                                 'flagged': len(report.flags)}
                          for name, (size, report) in runs.items()}},
    )


@suite('concentration', THEOREM, n=8, trials=20, ensemble='contraction')
def _concentration(runner: ExperimentRunner, n: int, trials: int, ensemble: str) -> CheckReport:
    """Counts in a fixed set obey the Hoeffding-type tail bound."""
    reports = []
    for index in range(trials):
        rng = runner.rng('concentration', index)
        size = int(rng.integers(1, n + 1))
        kernel = random_kernel(ensemble, size, rng)
        subset = _random_nonempty_mask(rng, list(range(size)), size)
        reports.append(concentration_check(kernel, subset, runner.tolerance))
    return merge_reports('concentration', THEOREM, reports, runner.seed)


@suite('domination', THEOREM, n=6, trials=100)
def _domination(runner: ExperimentRunner, n: int, trials: int) -> CheckReport:
    """Nested subspaces give stochastically ordered measures."""
    reports = []
    for index in range(trials):
        rng = runner.rng('domination', index)
        size = int(rng.integers(1, n + 1))
        inner, outer = nested_projections(size, rng)
        p = enumerate_distribution(projection_kernel(inner))
        q = enumerate_distribution(projection_kernel(outer))
        result = check_domination(p, q)
        passed = result.feasible
        details = {'size': size, 'ranks': [inner.rank, outer.rank]}
        if size <= BRUTE_FORCE_LIMIT:
            verdict, _ = dominates_by_events(p, q)
            details['brute_force_agrees'] = verdict == result.feasible
            passed = passed and verdict == result.feasible
        if result.feasible and outer.rank == inner.rank + 1:
            codim = codim1_coupling_check(inner, outer.basis[:, inner.rank], result.witness)
            details['codim1_deviation'] = codim.max_deviation
            passed = passed and codim.passed
        reports.append(CheckReport('domination', THEOREM, 1, -result.max_violation, passed, details=details))
    return merge_reports('domination', THEOREM, reports, runner.seed)


@suite('commuting-domination', THEOREM, n=5, trials=50)
def _commuting_domination(runner: ExperimentRunner, n: int, trials: int) -> CheckReport:
    """Commuting kernels Q1 <= Q2 give stochastically ordered measures."""
    return check_commuting_domination(trials, n, runner.seed)


@suite('union-coupling', THEOREM, n=7, trials=200)
def _union_coupling(runner: ExperimentRunner, n: int, trials: int) -> CheckReport:
    """Disjoint couplings of P^H1 and P^H2 with union law P^(H1+H2) exist."""
    reports = []
    index = 0
    for size in range(min(4, n), n + 1):
        for _ in range(trials):
            rng = runner.rng('union-coupling', index)
            index += 1
            first, second = orthogonal_decomposition(size, rng)
            result = find_disjoint_union_coupling(*orthogonal_sum_laws(first, second))
            disjoint = result.details.get('non_disjoint_mass', 0.0) <= LP_TOL
            agree = result.details.get('supports_agree', True)
            reports.append(CheckReport('union-coupling', THEOREM, 1, -result.max_violation,
                                       result.feasible and disjoint and agree,
                                       details={'size': size, 'ranks': [first.rank, second.rank],
                                                'supports_agree': agree}))
    return merge_reports('union-coupling', THEOREM, reports, runner.seed)


@suite('complete-coupling', THEOREM, n=6)
def _complete_coupling(runner: ExperimentRunner, n: int) -> CheckReport:
    """Complete couplings of the character decomposition of Z_n exist."""
    reports = []
    for size in range(2, n + 1):
        result = complete_coupling_zn(size)
        reports.append(CheckReport('complete-coupling', THEOREM, 1, -result.max_violation, result.feasible,
                                   details={'n': size, 'variables': result.details['variables']}))
    lines = gram_schmidt_lines(GRAM_SCHMIDT_VECTORS)
    control = complete_coupling(GroundSet.of_size(4), lines)
    reports.append(CheckReport('complete-coupling', THEOREM, 1, control.max_violation - LP_TOL, not control.feasible,
                               counterexample=None if not control.feasible else {'check': 'gram-schmidt-control'},
                               details={'control': 'gram-schmidt'}))
    return merge_reports('complete-coupling', THEOREM, reports, runner.seed,
                         details={'gram_schmidt_control_feasible': control.feasible,
                                  'gram_schmidt_control_violation': control.max_violation})


@suite('conditional-projection', THEOREM, n=6, trials=20)
def _conditional_projection(runner: ExperimentRunner, n: int, trials: int) -> CheckReport:
    """Averaged contracted-deleted projections equal the compressed projection."""
    reports = []
    for index in range(trials):
        rng = runner.rng('conditional-projection', index)
        size = int(rng.integers(2, n + 1))
        subspace = random_projection(size, rng)
        window = _random_nonempty_mask(rng, list(range(size)), size - 1)
        reports.append(check_conditional_projection(subspace, window, runner.tolerance))
    return merge_reports('conditional-projection', THEOREM, reports, runner.seed)


@suite('foster', THEOREM, n=8, trials=50)
def _foster(runner: ExperimentRunner, n: int, trials: int) -> CheckReport:
    """The transfer current diagonal sums to |V| - 1 on connected graphs."""
    reports = []
    for index in range(trials):
        rng = runner.rng('foster', index)
        graph = random_connected_graph(int(rng.integers(2, n + 1)), rng)
        trace = float(np.sum(transfer_current(graph).diagonal()))
        error = abs(trace - (len(graph.vertices) - 1))
        reports.append(CheckReport('foster', THEOREM, 1, -error, error <= runner.tolerance,
                                   details={'vertices': len(graph.vertices), 'edges': len(graph.edges)}))
    return merge_reports('foster', THEOREM, reports, runner.seed)


def _expected_kirchhoff_instance(name: str, subspace: Subspace, label: str) -> CheckReport:
    details = {'subspace': name, 'size': subspace.ground.size, 'element': label}
    try:
        expectation = expected_kirchhoff(subspace, label)
    except InternalConsistencyError as e:
        logger.warning("Expected Kirchhoff identity failed on %s at %s: %s", name, label, e)
        return CheckReport('kirchhoff', THEOREM, 1, -1.0, False, details=dict(details, error=str(e)))
    error = _max_abs(expectation - subspace.projector()[:, subspace.ground.index(label)])
    return CheckReport('kirchhoff', THEOREM, 1, EXPECTATION_TOL - error, error <= EXPECTATION_TOL, details=details)


def _conditioned_kirchhoff_instance(name: str, subspace: Subspace, window: int, chosen: int,
                                    element: int) -> CheckReport:
    """P_{H^F_S} e at e against the enumerated marginal of e given B ∩ F = S."""
    ground = subspace.ground
    details = {'subspace': name, 'window': ground.labels_of(window), 'chosen': ground.labels_of(chosen),
               'element': ground.labels[element]}
    try:
        vector = conditioned_kirchhoff(subspace, window, chosen, element)
    except InternalConsistencyError as e:
        logger.warning("Conditioned Kirchhoff identity failed on %s: %s", name, e)
        return CheckReport('kirchhoff', THEOREM, 1, -1.0, False, details=dict(details, error=str(e)))
    table = enumerate_distribution(projection_kernel(subspace)).conditional(chosen, window & ~chosen)
    rest = indices_of(ground.full_mask & ~window)
    error = float(abs(vector[element] - table.marginals()[rest.index(element)]))
    return CheckReport('kirchhoff', THEOREM, 1, CONDITIONED_TOL - error, error <= CONDITIONED_TOL, details=details)


@suite('kirchhoff', THEOREM, n=10, trials=20)
def _kirchhoff(runner: ExperimentRunner, n: int, trials: int) -> CheckReport:
    """Averaged Kirchhoff vectors equal P_H e, also given the state of one edge."""
    stars = [(f"k{size}", star_space(complete_graph(size))) for size in (3, 4)]
    reports = [_expected_kirchhoff_instance(name, subspace, label)
               for name, subspace in stars for label in subspace.ground.labels]
    for index in range(trials):
        rng = runner.rng('kirchhoff', index)
        subspace = random_projection(int(rng.integers(2, max(n, 2) + 1)), rng)
        label = subspace.ground.labels[int(rng.integers(subspace.ground.size))]
        reports.append(_expected_kirchhoff_instance(f"projection-{index}", subspace, label))
    for name, subspace in stars:
        size = subspace.ground.size
        for edge in range(size):
            window = 1 << edge
            for chosen in (0, window):
                for element in range(size):
                    if element != edge:
                        reports.append(_conditioned_kirchhoff_instance(name, subspace, window, chosen, element))
    return merge_reports('kirchhoff', THEOREM, reports, runner.seed)


def _sampler_instance(name: str, kernel, draws: int, seed: int) -> CheckReport:
    run = sample_many(kernel, draws, seed=seed)
    empirical = empirical_table(run)
    exact = enumerate_distribution(kernel)
    distance = tv_distance(empirical, exact)
    statistic, dof, p_value = chisquare_gof(empirical, exact)
    passed = distance <= SAMPLER_TV_LIMIT and p_value >= SAMPLER_P_FLOOR
    return CheckReport(name, THEOREM, 1, SAMPLER_TV_LIMIT - distance, passed,
                       details={'size': kernel.size, 'tv': distance, 'chi_square': statistic,
                                'dof': dof, 'p_value': p_value})


@suite('sampler-exactness', THEOREM, n=5, trials=20, draws=1_000_000)
def _sampler_exactness(runner: ExperimentRunner, n: int, trials: int, draws: int) -> CheckReport:
    """Empirical laws of seeded draws match enumeration (K4 and random contractions)."""
    reports = [_sampler_instance('sampler-exactness', transfer_current(complete_graph(4)), draws,
                                 HashingUtils.derive_seed(runner.seed, 'sampler-exactness-draws', 0))]
    for index in range(trials):
        rng = runner.rng('sampler-exactness', index)
        kernel = random_contraction(int(rng.integers(1, n + 1)), rng)
        reports.append(_sampler_instance('sampler-exactness', kernel, draws,
                                         HashingUtils.derive_seed(runner.seed, 'sampler-exactness-draws', index + 1)))
    return merge_reports('sampler-exactness', THEOREM, reports, runner.seed)


@suite('renewal', THEOREM, n=RENEWAL_SITES, draws=100_000)
def _renewal(runner: ExperimentRunner, n: int, draws: int) -> CheckReport:
    """Site marginals and interior gap means of the truncated renewal kernel."""
    if n < 20:
        raise DomainError(f"The renewal suite needs at least 20 sites, got {n}")
    a = RENEWAL_A
    kernel = renewal_truncated(n, a)
    run = sample_many(kernel, draws, seed=HashingUtils.derive_seed(runner.seed, 'renewal', 0))
    marginal = (1 - a) / (1 + a)
    mean_gap = (1 + a) / (1 - a)
    marginal_error = float(np.max(np.abs(site_frequencies(run) - marginal)))
    start, stop = n // 3, n - 10
    observed_gap, gaps = gap_statistics(run, start, stop)
    gap_error = abs(observed_gap - mean_gap) / mean_gap
    margin = min(RENEWAL_MARGINAL_BAND - marginal_error, RENEWAL_GAP_BAND - gap_error)
    return CheckReport(
        suite='renewal',
        kind=THEOREM,
        instances=1,
        worst_margin=margin,
        passed=margin >= 0,
        details={
            'a': a,
            'expected_marginal': marginal,
            'max_marginal_error': marginal_error,
            'expected_mean_gap': mean_gap,
            'observed_mean_gap': observed_gap,
            'gaps_observed': gaps,
            'interior': [start, stop],
        },
    )
