"""
Heuristic calibration by repeated undersampling.

The test set is undersampled until its positive ratio matches pi0 and the
plain (uncalibrated) metric is averaged over many runs. Used as an independent
check of the closed-form calibrated metrics.
"""
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from calibration import UNCALIBRATED_METRICS, calibrated_name, evaluate
from errors import InvalidConfigError, UnachievableTargetError
from logger import debug, info
from metrics import check_prior
from utils import make_rng, ordered_map, spawn_seeds

# pi0 closer than this to the data's prior counts as "already there"
PRIOR_EQUAL_TOLERANCE = 1e-12


@dataclass
class RunningMoments:
    """
    Mergeable mean/variance accumulator (pairwise update of count, mean, M2).
    std is the population standard deviation.
    """
    count: int = 0
    mean: float = 0.0
    m2: float = 0.0

    def push(self, value):
        self.merge(RunningMoments(1, float(value), 0.0))
        return self

    def merge(self, other):
        if other.count == 0:
            return self
        total = self.count + other.count
        delta = other.mean - self.mean
        self.mean += delta * other.count / total
        self.m2 += other.m2 + delta * delta * self.count * other.count / total
        self.count = total
        return self

    @property
    def variance(self):
        return self.m2 / self.count if self.count else 0.0

    @property
    def std(self):
        return math.sqrt(max(self.variance, 0.0))


@dataclass(frozen=True)
class OracleResult:
    metric: str
    mean: float
    std: float
    runs: int
    pi0_target: float
    achieved_pi: float
    closed_form: Optional[float] = None

    def to_dict(self):
        return {
            'metric': self.metric,
            'mean': self.mean,
            'std': self.std,
            'runs': self.runs,
            'pi0_target': self.pi0_target,
            'achieved_pi': self.achieved_pi,
            'closed_form': self.closed_form,
        }


def _round_half_up(value):
    return int(math.floor(value + 0.5))


def target_counts(n_pos, n_neg, pi0):
    """
    Class counts kept by undersampling to pi0.

    Negatives are removed when pi0 > pi, positives when pi0 < pi; the kept
    count of the reduced class is rounded half up.

    Returns:
        tuple: (positives kept, negatives kept)

    Raises:
        UnachievableTargetError: if the reduced class would be empty
    """
    pi0 = check_prior(pi0, 'pi0')
    pi = n_pos / (n_pos + n_neg)

    if abs(pi0 - pi) <= PRIOR_EQUAL_TOLERANCE:
        return n_pos, n_neg

    if pi0 > pi:
        keep_pos, keep_neg = n_pos, min(n_neg, _round_half_up(n_pos * (1.0 - pi0) / pi0))
    else:
        keep_pos, keep_neg = min(n_pos, _round_half_up(n_neg * pi0 / (1.0 - pi0))), n_neg

    if keep_pos < 1 or keep_neg < 1:
        raise UnachievableTargetError(
            f"pi0={pi0} from {n_pos} positives / {n_neg} negatives would keep "
            f"{keep_pos} positives and {keep_neg} negatives"
        )
    return keep_pos, keep_neg


def undersample_to_prior(data, pi0, seed):
    """
    Subset of data whose positive ratio is the closest achievable to pi0.

    Sampling is uniform without replacement, rows keep their original order,
    and the result is a deterministic function of seed.

    Args:
        data (LabeledScores): Source set, both classes required
        pi0 (float): Target positive ratio
        seed: int or numpy.random.SeedSequence
    """
    data.require_both_classes("undersampling")
    keep_pos, keep_neg = target_counts(data.n_pos, data.n_neg, pi0)
    if keep_pos == data.n_pos and keep_neg == data.n_neg:
        return data

    rng = make_rng(seed)
    positives = np.flatnonzero(data.labels == 1)
    negatives = np.flatnonzero(data.labels == 0)
    if keep_pos < positives.size:
        positives = rng.choice(positives, size=keep_pos, replace=False)
    if keep_neg < negatives.size:
        negatives = rng.choice(negatives, size=keep_neg, replace=False)

    return data.subset(np.sort(np.concatenate([positives, negatives])))


def oracle_estimate(data, pi0, metric='auc_pr', runs=200, seed=0, threshold=0.5, workers=1):
    """
    Mean and standard deviation of the uncalibrated metric over `runs`
    independent undersamples to pi0.

    Per-run seeds are spawned from seed, and values are accumulated in run
    order, so the result does not depend on workers.

    Returns:
        OracleResult: closed_form holds the calibrated counterpart at pi0 on
        the full data (None for prior-free metrics)

    Raises:
        DegenerateClassError: data has a single class
        UnachievableTargetError: pi0 would leave no minority example
        MetricDomainError: a pointwise metric is undefined in some run
    """
    if metric not in UNCALIBRATED_METRICS:
        raise InvalidConfigError(f"oracle metric must be one of {', '.join(UNCALIBRATED_METRICS)}, got {metric!r}")
    runs = int(runs)
    if runs < 1:
        raise InvalidConfigError(f"runs must be >= 1, got {runs}")

    data.require_both_classes("undersampling")
    keep_pos, keep_neg = target_counts(data.n_pos, data.n_neg, pi0)
    info("Oracle: %d runs of %s at pi0=%s (%d pos / %d neg kept)", runs, metric, pi0, keep_pos, keep_neg)

    def one_run(run_seed):
        subset = undersample_to_prior(data, pi0, run_seed)
        return evaluate(subset, metric_set=[metric], threshold=threshold).value(metric)

    values = ordered_map(one_run, spawn_seeds(seed, runs), workers=workers)

    moments = RunningMoments()
    for value in values:
        moments.push(value)

    cal = calibrated_name(metric)
    closed_form = None
    if cal is not None:
        closed_form = evaluate(data, pi0=pi0, metric_set=[cal], threshold=threshold).values.get(cal)

    result = OracleResult(
        metric=metric,
        mean=moments.mean,
        std=moments.std,
        runs=runs,
        pi0_target=float(pi0),
        achieved_pi=keep_pos / (keep_pos + keep_neg),
        closed_form=closed_form,
    )
    debug("Oracle result: %s", result)
    return result
