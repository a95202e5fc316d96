"""
Exact-enumeration checks of correlation inequalities.

Every check returns a ``CheckReport`` whose ``worst_margin`` is the signed
slack of the inequality (negative means violated). Theorem checks fail when
the margin drops below minus the tolerance; conjecture probes never fail,
they raise flags instead.
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .coupling import BRUTE_FORCE_LIMIT, check_domination, dominates_by_events
from .ensembles import ENSEMBLES, commuting_pair, random_kernel
from .errors import CapacityError, DomainError
from .events import (MAX_EVENT_SUPPORT, IncreasingEvent, enumerate_increasing_events,
                     local_indicator_matrix, random_increasing_event)
from .graphs import contracted_deleted
from .ground import GroundSet, expand_mask, indices_of, membership_bits, popcount, submasks
from .kernels import ConditionSpec, Kernel, Subspace, condition, projection_kernel
from .measure import DistributionTable, entropy, enumerate_distribution, marginal_count_stats
from ..utils.file_handler import FileHandler
from ..utils.hashing import HashingUtils

logger = logging.getLogger(__name__)

THEOREM = 'theorem'
CONJECTURE = 'conjecture'

CORRELATION_TOL = 1e-9
FLAG_TOL = 1e-8
NA_GROUND_LIMIT = 8
BK_GROUND_LIMIT = 6
TAIL_GROUND_LIMIT = 10
TAIL_K_LIMIT = 3
CONCAVITY_GROUND_LIMIT = 10
PROJECTION_GROUND_LIMIT = 10
COMMUTING_GROUND_LIMIT = 6
MASS_CUTOFF = 1e-12


def _finite(value: float) -> Optional[float]:
    return float(value) if math.isfinite(value) else None


@dataclass
class CheckReport:
    """Outcome of one check or of a whole suite."""

    suite: str
    kind: str
    instances: int
    worst_margin: float
    passed: bool
    counterexample: Optional[Dict] = None
    flags: List[Dict] = field(default_factory=list)
    seed: Optional[int] = None
    details: Dict = field(default_factory=dict)

    def to_dict(self) -> Dict:
        return {
            'suite': self.suite,
            'kind': self.kind,
            'instances': self.instances,
            'worst_margin': _finite(self.worst_margin),
            'passed': self.passed,
            'counterexample': self.counterexample,
            'flags': self.flags,
            'seed': self.seed,
            'details': self.details,
        }


def _local_codes(n: int, positions: Sequence[int]) -> np.ndarray:
    """For every mask on n elements, the mask of S ∩ positions re-indexed locally."""
    masks = np.arange(1 << n, dtype=np.int64)
    codes = np.zeros(1 << n, dtype=np.int64)
    for new_position, old_position in enumerate(positions):
        codes |= ((masks >> old_position) & 1) << new_position
    return codes


def joint_law(table: DistributionTable, first: Sequence[int], second: Sequence[int]) -> np.ndarray:
    """Matrix of P[S ∩ first = x, S ∩ second = y] over local masks x, y."""
    n = table.ground.size
    rows = _local_codes(n, first)
    columns = _local_codes(n, second)
    joint = np.zeros((1 << len(first), 1 << len(second)))
    np.add.at(joint, (rows, columns), table.mass)
    return joint


def _event_payload(ground: GroundSet, event: IncreasingEvent) -> Dict:
    return {
        'support': ground.labels_of(event.support),
        'members': [ground.labels_of(m) for m in sorted(event.family)],
    }


def _event_from_payload(ground: GroundSet, payload: Dict) -> IncreasingEvent:
    return IncreasingEvent(
        ground,
        ground.mask_of(payload['support']),
        frozenset(ground.mask_of(member) for member in payload['members']),
    )


def _global_event(ground: GroundSet, positions: Sequence[int], family) -> IncreasingEvent:
    return IncreasingEvent(ground, ground.mask_of(list(positions)),
                           frozenset(expand_mask(m, positions) for m in family))


def correlation_margin(table: DistributionTable, first: IncreasingEvent, second: IncreasingEvent) -> float:
    """P(A1) P(A2) - P(A1 ∩ A2)."""
    in_first = first.indicator()
    in_second = second.indicator()
    return (table.event_probability(in_first) * table.event_probability(in_second)
            - table.event_probability(in_first & in_second))


def check_negative_association(kernel: Kernel, split: Tuple[int, int], tol: float = CORRELATION_TOL,
                               suite: str = 'negative-association') -> CheckReport:
    """
    P(A1 ∩ A2) <= P(A1) P(A2) for every pair of increasing events on the
    two parts of ``split``.

    Args:
        kernel: Valid kernel on at most 8 elements
        split: Disjoint masks (K1, K2), each of at most 4 elements
        tol: Allowed violation

    Raises:
        DomainError: If the parts overlap
        CapacityError: If the ground or a part is too large
    """
    ground = kernel.ground
    first, second = split
    ground.check_mask(first)
    ground.check_mask(second)
    if first & second:
        raise DomainError("The two parts of the split overlap")
    if ground.size > NA_GROUND_LIMIT:
        raise CapacityError(f"Negative association is checked on at most {NA_GROUND_LIMIT} elements")
    if max(popcount(first), popcount(second)) > MAX_EVENT_SUPPORT:
        raise CapacityError(f"Each part may hold at most {MAX_EVENT_SUPPORT} elements")

    positions1, positions2 = indices_of(first), indices_of(second)
    table = enumerate_distribution(kernel)
    joint = joint_law(table, positions1, positions2)
    events1 = local_indicator_matrix(len(positions1))
    events2 = local_indicator_matrix(len(positions2))

    together = events1 @ joint @ events2.T
    separate = np.outer(events1 @ joint.sum(axis=1), events2 @ joint.sum(axis=0))
    margins = separate - together
    row, column = np.unravel_index(int(np.argmin(margins)), margins.shape)
    worst = float(margins[row, column])
    passed = worst >= -tol

    counterexample = None
    if not passed:
        event1 = _global_event(ground, positions1, enumerate_increasing_events(len(positions1))[row])
        event2 = _global_event(ground, positions2, enumerate_increasing_events(len(positions2))[column])
        counterexample = {
            'check': 'correlation',
            'kernel': FileHandler.kernel_to_dict(kernel),
            'event1': _event_payload(ground, event1),
            'event2': _event_payload(ground, event2),
            'margin': worst,
        }
    return CheckReport(
        suite=suite,
        kind=THEOREM,
        instances=1,
        worst_margin=worst,
        passed=passed,
        counterexample=counterexample,
        details={
            'split': [ground.labels_of(first), ground.labels_of(second)],
            'event_pairs': int(margins.size),
        },
    )


def check_conditional_na(kernel: Kernel, given: ConditionSpec, split: Tuple[int, int],
                         tol: float = CORRELATION_TOL) -> CheckReport:
    """
    Negative association of the conditioned measure. Elements fixed by the
    condition are dropped from both parts.

    Raises:
        ImpossibleEventError: If the condition has probability zero
    """
    conditioned = condition(kernel, given)
    kept = indices_of(kernel.ground.full_mask & ~given.touched)
    local = {old: new for new, old in enumerate(kept)}

    def relocate(mask: int) -> int:
        return sum(1 << local[i] for i in indices_of(mask & ~given.touched))

    report = check_negative_association(conditioned, (relocate(split[0]), relocate(split[1])), tol,
                                        suite='conditional-na')
    report.details['condition'] = {
        'include': kernel.ground.labels_of(given.include),
        'exclude': kernel.ground.labels_of(given.exclude),
    }
    return report


def disjoint_occurrence(first: IncreasingEvent, second: IncreasingEvent) -> np.ndarray:
    """Indicator of A1 □ A2: S contains disjoint G1 ∈ A1 and G2 ∈ A2."""
    in_first = first.indicator()
    in_second = second.indicator()
    result = np.zeros(in_first.size, dtype=bool)
    for mask in range(in_first.size):
        result[mask] = any(in_first[sub] and in_second[mask ^ sub] for sub in submasks(mask))
    return result


def bk_slack(table: DistributionTable, first: IncreasingEvent, second: IncreasingEvent) -> float:
    """P(A1) P(A2) - P(A1 □ A2)."""
    return (table.event_probability(first.indicator()) * table.event_probability(second.indicator())
            - table.event_probability(disjoint_occurrence(first, second)))


def bk_search(kernel: Kernel, trials: int, seed: int, flag_tol: float = FLAG_TOL) -> CheckReport:
    """
    Probe the BK inequality on random pairs of increasing events.

    Negative slack beyond ``flag_tol`` is recorded as a flag, not a failure.

    Raises:
        CapacityError: If the ground exceeds 6 elements
    """
    ground = kernel.ground
    if ground.size > BK_GROUND_LIMIT:
        raise CapacityError(f"BK search is limited to {BK_GROUND_LIMIT} elements")
    if trials < 1:
        raise DomainError(f"Trial count must be at least 1, got {trials}")
    table = enumerate_distribution(kernel)

    worst = math.inf
    flags = []
    for trial in range(trials):
        rng = np.random.default_rng(HashingUtils.derive_seed(seed, 'bk', trial))
        first = random_increasing_event(ground, ground.full_mask, rng)
        second = random_increasing_event(ground, ground.full_mask, rng)
        slack = bk_slack(table, first, second)
        worst = min(worst, slack)
        if slack < -flag_tol:
            flags.append({
                'instance': trial,
                'margin': slack,
                'payload': {
                    'check': 'bk',
                    'kernel': FileHandler.kernel_to_dict(kernel),
                    'event1': _event_payload(ground, first),
                    'event2': _event_payload(ground, second),
                    'margin': slack,
                },
            })
    if flags:
        logger.warning("BK probe flagged %d of %d event pairs", len(flags), trials)
    return CheckReport(
        suite='bk',
        kind=CONJECTURE,
        instances=trials,
        worst_margin=worst,
        passed=not flags,
        counterexample=min(flags, key=lambda flag: flag['margin'])['payload'] if flags else None,
        flags=flags,
        seed=seed,
    )


def _tail_tables(subspace: Subspace, k_mask: int, f_mask: int) -> Tuple[np.ndarray, float]:
    """Joint law of (S ∩ K, S ∩ F) and Σ_{e∈K} ‖P_[F] P_H e‖²."""
    table = enumerate_distribution(projection_kernel(subspace))
    k_positions, f_positions = indices_of(k_mask), indices_of(f_mask)
    projector = subspace.projector()
    leakage = float(np.sum(np.abs(projector[np.ix_(f_positions, k_positions)]) ** 2))
    return joint_law(table, k_positions, f_positions), leakage


def check_tail_correlation(subspace: Subspace, k_mask: int, f_mask: int,
                           tol: float = CORRELATION_TOL) -> CheckReport:
    """
    |P(A1 ∩ A2) - P(A1) P(A2)| <= (2^|K| |K| Σ_{e∈K} ‖P_[F] P_H e‖²)^{1/2}
    for every A1 generated by S ∩ K and A2 generated by S ∩ F, together with
    the variance bound for each cylinder {S ∩ K = C}.

    For a fixed A1 the supremum over A2 is half the total variation between
    the joint law and the product of marginals, so it is computed exactly.

    Raises:
        DomainError: If K or F is empty, or they overlap
        CapacityError: If |E| > 10 or |K| > 3
    """
    ground = subspace.ground
    ground.check_mask(k_mask)
    ground.check_mask(f_mask)
    if not k_mask or not f_mask:
        raise DomainError("K and F must be nonempty")
    if k_mask & f_mask:
        raise DomainError("K and F must be disjoint")
    if ground.size > TAIL_GROUND_LIMIT:
        raise CapacityError(f"Tail correlation is checked on at most {TAIL_GROUND_LIMIT} elements")
    k = popcount(k_mask)
    if k > TAIL_K_LIMIT:
        raise CapacityError(f"|K| is limited to {TAIL_K_LIMIT}")

    joint, leakage = _tail_tables(subspace, k_mask, f_mask)
    law_k = joint.sum(axis=1)
    law_f = joint.sum(axis=0)

    events = membership_bits(1 << k).astype(float)
    deviation = events @ joint - np.outer(events @ law_k, law_f)
    correlation = 0.5 * np.abs(deviation).sum(axis=1)
    bound = math.sqrt((1 << k) * k * leakage)
    correlation_margins = bound - correlation

    seen = law_f > MASS_CUTOFF
    variances = (joint[:, seen] ** 2 / law_f[seen]).sum(axis=1) - law_k ** 2
    variance_bound = k * leakage
    variance_margins = variance_bound - variances

    worst_event = int(np.argmin(correlation_margins))
    worst_cylinder = int(np.argmin(variance_margins))
    worst = float(min(correlation_margins[worst_event], variance_margins[worst_cylinder]))
    passed = worst >= -tol

    k_positions = indices_of(k_mask)
    counterexample = None
    if not passed:
        members = [ground.labels_of(expand_mask(code, k_positions))
                   for code in range(1 << k) if events[worst_event, code]]
        counterexample = {
            'check': 'tail-correlation',
            'subspace': FileHandler.subspace_to_dict(subspace),
            'K': ground.labels_of(k_mask),
            'F': ground.labels_of(f_mask),
            'event': members,
            'margin': worst,
        }
    return CheckReport(
        suite='tail-correlation',
        kind=THEOREM,
        instances=1,
        worst_margin=worst,
        passed=passed,
        counterexample=counterexample,
        details={
            'K': ground.labels_of(k_mask),
            'F': ground.labels_of(f_mask),
            'bound': bound,
            'max_correlation': float(correlation.max()),
            'variance_bound': variance_bound,
            'variances': {
                ','.join(ground.labels_of(sum(1 << k_positions[i] for i in indices_of(code)))): float(v)
                for code, v in enumerate(variances)
            },
        },
    )


def concavity_margin(first: Kernel, second: Kernel) -> float:
    """ent((Q1 + Q2) / 2) - (ent(Q1) + ent(Q2)) / 2."""
    average = Kernel(first.ground, (first.entries + second.entries) / 2, first.tolerance)
    return entropy(average) - (entropy(first) + entropy(second)) / 2


def entropy_concavity_experiment(trials: int, n: int, ensemble: str = 'contraction', seed: int = 0,
                                 flag_tol: float = FLAG_TOL) -> CheckReport:
    """
    Minimum entropy concavity margin over random kernel pairs.

    Raises:
        CapacityError: If n > 10
        DomainError: On an unknown ensemble or a nonpositive count
    """
    if n > CONCAVITY_GROUND_LIMIT:
        raise CapacityError(f"Entropy concavity is probed on at most {CONCAVITY_GROUND_LIMIT} elements")
    if n < 1 or trials < 1:
        raise DomainError("Need n >= 1 and at least one trial")
    if ensemble not in ENSEMBLES:
        raise DomainError(f"Unknown ensemble '{ensemble}'; choose from {', '.join(ENSEMBLES)}")

    worst = math.inf
    flags = []
    for trial in range(trials):
        rng = np.random.default_rng(HashingUtils.derive_seed(seed, 'entropy-concavity', trial))
        first = random_kernel(ensemble, n, rng)
        second = random_kernel(ensemble, n, rng)
        margin = concavity_margin(first, second)
        worst = min(worst, margin)
        if margin < -flag_tol:
            flags.append({
                'instance': trial,
                'margin': margin,
                'payload': {
                    'check': 'entropy-concavity',
                    'first': FileHandler.kernel_to_dict(first),
                    'second': FileHandler.kernel_to_dict(second),
                    'margin': margin,
                },
            })
    if flags:
        logger.warning("Entropy concavity probe flagged %d of %d pairs", len(flags), trials)
    return CheckReport(
        suite='entropy-concavity',
        kind=CONJECTURE,
        instances=trials,
        worst_margin=worst,
        passed=not flags,
        counterexample=min(flags, key=lambda flag: flag['margin'])['payload'] if flags else None,
        flags=flags,
        seed=seed,
        details={'n': n, 'ensemble': ensemble},
    )


def concentration_check(kernel: Kernel, subset: int, tol: float = CORRELATION_TOL) -> CheckReport:
    """
    P[| |S ∩ A| - E|S ∩ A| | >= a] <= 2 exp(-2 a² / |A|) on a = 0.5, 1, ..., |A|.
    """
    kernel.ground.check_mask(subset)
    size = popcount(subset)
    if size == 0:
        raise DomainError("A must be nonempty")
    stats = marginal_count_stats(kernel, subset)
    grid = np.arange(1, 2 * size + 1) / 2
    tails = np.array([stats.tail(a) for a in grid])
    bounds = 2 * np.exp(-2 * grid ** 2 / size)
    margins = bounds - tails
    worst_index = int(np.argmin(margins))
    worst = float(margins[worst_index])
    passed = worst >= -tol
    counterexample = None
    if not passed:
        counterexample = {
            'check': 'concentration',
            'kernel': FileHandler.kernel_to_dict(kernel),
            'A': kernel.ground.labels_of(subset),
            'deviation': float(grid[worst_index]),
            'margin': worst,
        }
    return CheckReport(
        suite='concentration',
        kind=THEOREM,
        instances=1,
        worst_margin=worst,
        passed=passed,
        counterexample=counterexample,
        details={
            'A': kernel.ground.labels_of(subset),
            'mean': stats.mean,
            'grid': [float(a) for a in grid],
            'tails': [float(t) for t in tails],
            'bounds': [float(b) for b in bounds],
        },
    )


def check_conditional_projection(subspace: Subspace, window: int, tol: float = CORRELATION_TOL) -> CheckReport:
    """
    Σ_S P[B ∩ F = S] P_{H^F_S} = P_[F]^⊥ P_H P_[F]^⊥.

    Raises:
        CapacityError: If |E| > 10
    """
    ground = subspace.ground
    ground.check_mask(window)
    if ground.size > PROJECTION_GROUND_LIMIT:
        raise CapacityError(f"Conditioned projections are averaged on at most {PROJECTION_GROUND_LIMIT} elements")

    table = enumerate_distribution(projection_kernel(subspace))
    traces = np.arange(table.mass.size) & window
    average = np.zeros((ground.size, ground.size), dtype=complex)
    patterns = 0
    for chosen in submasks(window):
        probability = float(table.mass[traces == chosen].sum())
        if probability <= MASS_CUTOFF:
            continue
        average += probability * contracted_deleted(subspace, window, chosen).projector()
        patterns += 1

    outside = np.diag([0.0 if window >> i & 1 else 1.0 for i in range(ground.size)])
    target = outside @ subspace.projector() @ outside
    error = float(np.max(np.abs(average - target), initial=0.0))
    return CheckReport(
        suite='conditional-projection',
        kind=THEOREM,
        instances=1,
        worst_margin=-error,
        passed=error <= tol,
        counterexample=None if error <= tol else {
            'check': 'conditional-projection',
            'subspace': FileHandler.subspace_to_dict(subspace),
            'F': ground.labels_of(window),
            'margin': -error,
        },
        details={'F': ground.labels_of(window), 'patterns': patterns, 'max_error': error},
    )


def check_commuting_domination(trials: int, n: int, seed: int) -> CheckReport:
    """
    For commuting kernels Q1 <= Q2 the max-flow must find a monotone coupling
    of P^{Q1} and P^{Q2}; on at most 4 elements the verdict is also compared
    with the increasing-event test.
    """
    if not 1 <= n <= COMMUTING_GROUND_LIMIT:
        raise CapacityError(f"Commuting domination is checked for 1 <= n <= {COMMUTING_GROUND_LIMIT}")
    if trials < 1:
        raise DomainError(f"Trial count must be at least 1, got {trials}")

    worst = math.inf
    failures = []
    disagreements = 0
    for trial in range(trials):
        rng = np.random.default_rng(HashingUtils.derive_seed(seed, 'commuting-domination', trial))
        lower, upper = commuting_pair(n, rng)
        p, q = enumerate_distribution(lower), enumerate_distribution(upper)
        result = check_domination(p, q)
        margin = -result.max_violation
        worst = min(worst, margin)
        agrees = True
        if n <= BRUTE_FORCE_LIMIT:
            agrees = dominates_by_events(p, q)[0] == result.feasible
            disagreements += not agrees
        if not (result.feasible and agrees):
            failures.append({
                'check': 'commuting-domination',
                'first': FileHandler.kernel_to_dict(lower),
                'second': FileHandler.kernel_to_dict(upper),
                'margin': margin,
            })
    return CheckReport(
        suite='commuting-domination',
        kind=THEOREM,
        instances=trials,
        worst_margin=worst,
        passed=not failures,
        counterexample=failures[0] if failures else None,
        seed=seed,
        details={'n': n, 'failures': len(failures), 'brute_force_disagreements': disagreements},
    )


def reevaluate(payload: Dict) -> float:
    """
    Recompute the margin of a counterexample payload from its stored inputs.

    Raises:
        DomainError: On an unknown check name
    """
    check = payload.get('check')
    if check in ('correlation', 'bk'):
        kernel = FileHandler.kernel_from_dict(payload['kernel'])
        table = enumerate_distribution(kernel)
        first = _event_from_payload(kernel.ground, payload['event1'])
        second = _event_from_payload(kernel.ground, payload['event2'])
        if check == 'bk':
            return bk_slack(table, first, second)
        return correlation_margin(table, first, second)
    if check == 'entropy-concavity':
        return concavity_margin(FileHandler.kernel_from_dict(payload['first']),
                                FileHandler.kernel_from_dict(payload['second']))
    if check == 'tail-correlation':
        subspace = FileHandler.subspace_from_dict(payload['subspace'])
        ground = subspace.ground
        return check_tail_correlation(subspace, ground.mask_of(payload['K']),
                                      ground.mask_of(payload['F'])).worst_margin
    if check == 'concentration':
        kernel = FileHandler.kernel_from_dict(payload['kernel'])
        stats = marginal_count_stats(kernel, kernel.ground.mask_of(payload['A']))
        a = payload['deviation']
        return 2 * math.exp(-2 * a ** 2 / stats.size) - stats.tail(a)
    if check == 'conditional-projection':
        subspace = FileHandler.subspace_from_dict(payload['subspace'])
        return check_conditional_projection(subspace, subspace.ground.mask_of(payload['F'])).worst_margin
    if check == 'commuting-domination':
        p = enumerate_distribution(FileHandler.kernel_from_dict(payload['first']))
        q = enumerate_distribution(FileHandler.kernel_from_dict(payload['second']))
        return -check_domination(p, q).max_violation
    raise DomainError(f"Cannot re-evaluate a payload of kind '{check}'")
