"""
Rank agreement between metrics over pools of models.

For every pool the metrics rank the pool's models; the Spearman correlation
between two metrics' rankings is averaged over pools into a matrix.
"""
import math
import re
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy import stats

from calibration import ALL_METRICS, evaluate, is_calibrated
from errors import CalMetricsError, ConstantVectorError, InvalidConfigError
from logger import debug, info, warning
from metrics import LabeledScores, check_prior
from synthetic import SyntheticSpec, generate, optimal_score
from utils import make_rng, ordered_map, seed_to_int, spawn_seeds

_RULE_PATTERN = re.compile(r'^\s*([0-9]*\.?[0-9]+(?:[eE][-+]?[0-9]+)?)\s*(\*?\s*pi)?\s*$')


@dataclass(frozen=True)
class PriorRule:
    """
    How pi0 is chosen for a pool: an absolute value or a multiple of the
    pool's empirical prior.
    """
    value: float
    relative: bool = False

    @classmethod
    def parse(cls, text):
        """'0.5' -> absolute 0.5; '1.01pi' or '10*pi' -> multiple of pi"""
        match = _RULE_PATTERN.match(str(text))
        if not match:
            raise InvalidConfigError(f"cannot parse prior rule {text!r}; use e.g. 0.5 or 1.01pi")
        value = float(match.group(1))
        if value <= 0:
            raise InvalidConfigError(f"prior rule must be positive, got {text!r}")
        return cls(value=value, relative=match.group(2) is not None)

    def resolve(self, pi):
        """
        Raises:
            InvalidPriorError: the resolved pi0 is outside (0, 1)
        """
        return check_prior(self.value * pi if self.relative else self.value, 'pi0')

    def __str__(self):
        return f"{self.value:g}pi" if self.relative else f"{self.value:g}"


@dataclass(frozen=True)
class RankedMetric:
    metric: str
    rule: Optional[PriorRule] = None

    def __post_init__(self):
        if self.metric not in ALL_METRICS:
            raise InvalidConfigError(f"unknown metric {self.metric!r}")
        if is_calibrated(self.metric) and self.rule is None:
            raise InvalidConfigError(f"{self.metric} needs a prior rule")
        if not is_calibrated(self.metric) and self.rule is not None:
            raise InvalidConfigError(f"{self.metric} does not depend on pi0")

    @classmethod
    def parse(cls, text):
        """'auc_roc' or 'calibrated_auc_pr@1.01pi'"""
        name, _, rule = str(text).strip().partition('@')
        return cls(name.strip(), PriorRule.parse(rule) if rule else None)

    @property
    def label(self):
        return self.metric if self.rule is None else f"{self.metric}@{self.rule}"


DEFAULT_RANK_COLUMNS = tuple(RankedMetric.parse(text) for text in (
    'auc_roc',
    'auc_pr',
    'auc_pr_gain',
    'best_f1',
    'calibrated_auc_pr@0.5',
    'calibrated_auc_pr_gain@0.5',
    'calibrated_best_f1@0.5',
    'calibrated_auc_pr@1.01pi',
    'calibrated_auc_pr_gain@1.01pi',
    'calibrated_best_f1@1.01pi',
))

# reference a decade above the data's prior, for strongly imbalanced pools
IMBALANCED_RANK_COLUMNS = tuple(RankedMetric.parse(text) for text in (
    'auc_roc',
    'auc_pr',
    'auc_pr_gain',
    'best_f1',
    'calibrated_auc_pr@10pi',
    'calibrated_auc_pr_gain@10pi',
    'calibrated_best_f1@10pi',
))

RANK_COLUMN_SETS = {
    'default': DEFAULT_RANK_COLUMNS,
    'imbalanced': IMBALANCED_RANK_COLUMNS,
}


@dataclass(frozen=True, eq=False)
class ModelPool:
    """Several models' scores on one shared labeled dataset"""
    dataset_id: str
    labels: np.ndarray
    scores: np.ndarray
    model_names: tuple = ()

    def __post_init__(self):
        labels = np.asarray(self.labels)
        scores = np.atleast_2d(np.asarray(self.scores, dtype=np.float64))
        if scores.shape[0] < 2:
            raise InvalidConfigError(f"pool {self.dataset_id} needs at least 2 models, got {scores.shape[0]}")
        if scores.shape[1] != labels.shape[0]:
            raise InvalidConfigError(
                f"pool {self.dataset_id}: score vectors have length {scores.shape[1]}, labels {labels.shape[0]}"
            )
        names = tuple(self.model_names) or tuple(f"model_{j}" for j in range(scores.shape[0]))
        if len(names) != scores.shape[0]:
            raise InvalidConfigError(f"pool {self.dataset_id}: {len(names)} names for {scores.shape[0]} models")
        object.__setattr__(self, 'labels', labels)
        object.__setattr__(self, 'scores', scores)
        object.__setattr__(self, 'model_names', names)

    @property
    def m(self):
        return int(self.scores.shape[0])

    @property
    def pi(self):
        return float(np.mean(self.labels))

    def model(self, j):
        return LabeledScores(self.labels, self.scores[j])


@dataclass
class CorrelationMatrix:
    names: list
    matrix: np.ndarray
    datasets: int
    skipped: int = 0
    skipped_ids: list = field(default_factory=list)

    def value(self, row, col):
        return float(self.matrix[self.names.index(row), self.names.index(col)])


def spearman(a, b):
    """
    Spearman rank correlation, average ranks for ties.

    Raises:
        ConstantVectorError: either vector is constant
    """
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape or a.ndim != 1:
        raise InvalidConfigError(f"vectors must be 1-d and equal in length, got {a.shape} and {b.shape}")
    if a.shape[0] < 2:
        raise InvalidConfigError("at least two values are needed for a rank correlation")
    if np.all(a == a[0]) or np.all(b == b[0]):
        raise ConstantVectorError("rank correlation of a constant vector is undefined")

    ra = stats.rankdata(a) - (a.shape[0] + 1) / 2.0
    rb = stats.rankdata(b) - (b.shape[0] + 1) / 2.0
    rho = float(np.dot(ra, rb) / math.sqrt(np.dot(ra, ra) * np.dot(rb, rb)))
    return min(1.0, max(-1.0, rho))


def metric_vector(pool, metric, pi0_rule=None, threshold=0.5):
    """
    Metric value of every model in the pool.

    Args:
        metric (str | RankedMetric): metric name, or a parsed column
        pi0_rule (PriorRule): needed for calibrated metrics

    Raises:
        DegenerateClassError, InvalidPriorError
        MetricDomainError: a pointwise metric is undefined for some model
    """
    if isinstance(metric, RankedMetric):
        metric, pi0_rule = metric.metric, metric.rule
    pi0 = pi0_rule.resolve(pool.pi) if (pi0_rule is not None and is_calibrated(metric)) else None
    if is_calibrated(metric) and pi0 is None:
        raise InvalidConfigError(f"{metric} needs a prior rule")
    return np.array([
        evaluate(pool.model(j), pi0=pi0, metric_set=[metric], threshold=threshold).value(metric)
        for j in range(pool.m)
    ])


def _pool_correlations(pool, columns, threshold):
    vectors = [metric_vector(pool, column, threshold=threshold) for column in columns]
    k = len(columns)
    matrix = np.eye(k)
    for i in range(k):
        for j in range(i + 1, k):
            matrix[i, j] = matrix[j, i] = spearman(vectors[i], vectors[j])
    return matrix


def correlation_matrix(pools, columns=DEFAULT_RANK_COLUMNS, threshold=0.5, workers=1):
    """
    Average over pools of the pairwise Spearman correlations between columns.

    Pools on which a column cannot be computed (single-class labels, pi0
    outside (0, 1), constant metric vector, pointwise metric undefined for a
    model) are skipped and counted.

    Returns:
        CorrelationMatrix

    Raises:
        InvalidConfigError: no pool, or every pool skipped
    """
    pools = list(pools)
    columns = [c if isinstance(c, RankedMetric) else RankedMetric.parse(c) for c in columns]
    if not pools:
        raise InvalidConfigError("at least one pool is required")
    info("Correlation matrix of %d columns over %d pools", len(columns), len(pools))

    def per_pool(pool):
        try:
            return _pool_correlations(pool, columns, threshold)
        except CalMetricsError as e:
            warning("Pool %s skipped: %s", pool.dataset_id, e)
            return None

    results = ordered_map(per_pool, pools, workers=workers)
    kept = [m for m in results if m is not None]
    skipped_ids = [p.dataset_id for p, m in zip(pools, results) if m is None]
    if not kept:
        raise InvalidConfigError(f"every pool was skipped ({len(pools)})")

    matrix = np.mean(np.stack(kept), axis=0)
    # exact symmetry and unit diagonal whatever the summation order
    matrix = (matrix + matrix.T) / 2.0
    np.fill_diagonal(matrix, 1.0)
    debug("Correlation matrix built from %d pools, %d skipped", len(kept), len(skipped_ids))
    return CorrelationMatrix(
        names=[c.label for c in columns],
        matrix=matrix,
        datasets=len(kept),
        skipped=len(skipped_ids),
        skipped_ids=skipped_ids,
    )


def synth_model_pool(spec, m, noise_grid, seed, dataset_id=None):
    """
    m models of graded quality on one synthetic dataset: the optimal score plus
    i.i.d. Gaussian noise with per-model standard deviation noise_grid[j].

    Args:
        spec (SyntheticSpec): Dataset to score
        m (int): Number of models, must equal len(noise_grid)
        noise_grid (list): Noise standard deviations (score units), >= 0
        seed: Noise seed, independent of spec.seed
    """
    m = int(m)
    noise_grid = [float(s) for s in noise_grid]
    if m < 2:
        raise InvalidConfigError(f"a pool needs at least 2 models, got {m}")
    if len(noise_grid) != m:
        raise InvalidConfigError(f"noise_grid has {len(noise_grid)} levels for {m} models")
    if any(s < 0 or not math.isfinite(s) for s in noise_grid):
        raise InvalidConfigError("noise levels must be finite and >= 0")

    dataset = generate(spec)
    base = optimal_score(dataset.x, spec)
    rng = make_rng(seed)
    scores = np.stack([base + sigma * rng.standard_normal(spec.n) for sigma in noise_grid])
    return ModelPool(
        dataset_id=dataset_id or f"synthetic-{spec.seed}",
        labels=dataset.labels,
        scores=scores,
        model_names=tuple(f"noise_{sigma:g}" for sigma in noise_grid),
    )


def default_noise_grid(spec, m, max_scale=3.0):
    """m noise levels from 0 to max_scale times the within-class score spread |mu1 - mu0|"""
    return np.linspace(0.0, max_scale * abs(spec.mu1 - spec.mu0), int(m)).tolist()


def synth_pools(count, m, n, pi, seed=0, mu1=3.0, mu0=1.0, max_scale=3.0):
    """
    count independent synthetic pools of m noise-graded models each.
    Dataset and noise seeds are spawned from seed.
    """
    pools = []
    for i, pool_seed in enumerate(spawn_seeds(seed, int(count))):
        data_seed, noise_seed = pool_seed.spawn(2)
        spec = SyntheticSpec(mu1=mu1, mu0=mu0, pi=pi, n=n, seed=seed_to_int(data_seed))
        pools.append(synth_model_pool(spec, m, default_noise_grid(spec, m, max_scale), noise_seed,
                                      dataset_id=f"synthetic-{i:03d}"))
    return pools
