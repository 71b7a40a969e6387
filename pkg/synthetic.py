"""
Two-Gaussian benchmark: y ~ Bernoulli(pi), x | y ~ N(mu_y, 1).

Also holds the optimal (likelihood-ratio) scorer and the two experiment
drivers: a sweep over the class prior and a sweep over problem difficulty
measured by the KL divergence between the class-conditional densities.
"""
import math
from dataclasses import dataclass, field, asdict

import numpy as np
import pandas as pd
from scipy import stats

from calibration import evaluate
from config import DEFAULT_MU0, DEFAULT_MU1, DEFAULT_PI_RANGE
from errors import InvalidConfigError
from logger import debug, info
from metrics import LabeledScores, check_prior
from utils import make_rng, ordered_map, retry_on_degenerate, seed_to_int, spawn_seeds

DEFAULT_EXPERIMENT_METRICS = (
    'auc_pr',
    'auc_pr_gain',
    'best_f1',
    'calibrated_auc_pr',
    'calibrated_auc_pr_gain',
    'calibrated_best_f1',
)


@dataclass(frozen=True)
class SyntheticSpec:
    """Unit variance is fixed; only the means and the Bernoulli parameter vary"""
    mu1: float = DEFAULT_MU1
    mu0: float = DEFAULT_MU0
    pi: float = 0.5
    n: int = 100000
    seed: int = 0

    def __post_init__(self):
        if int(self.n) < 2:
            raise InvalidConfigError(f"n must be >= 2, got {self.n}")
        if not (math.isfinite(self.mu1) and math.isfinite(self.mu0)):
            raise InvalidConfigError("mu1 and mu0 must be finite")
        check_prior(self.pi, 'pi')
        object.__setattr__(self, 'n', int(self.n))


@dataclass(frozen=True, eq=False)
class SyntheticDataset:
    spec: SyntheticSpec
    labels: np.ndarray
    x: np.ndarray

    def scores(self):
        """Optimal scores (log likelihood ratio) of every example"""
        return optimal_score(self.x, self.spec)

    def labeled_scores(self, raw_feature=False):
        """
        LabeledScores with optimal scores, or with the raw feature x.

        Raises:
            ValueError: via LabeledScores if the draw is empty
        """
        return LabeledScores(self.labels, self.x if raw_feature else self.scores())


def generate(spec):
    """n i.i.d. draws, deterministic given spec.seed"""
    rng = make_rng(spec.seed)
    labels = (rng.random(spec.n) < spec.pi).astype(np.int8)
    x = rng.standard_normal(spec.n) + np.where(labels == 1, spec.mu1, spec.mu0)
    debug("Generated %d points (mu1=%s, mu0=%s, pi=%s): %d positives",
          spec.n, spec.mu1, spec.mu0, spec.pi, int(labels.sum()))
    return SyntheticDataset(spec=spec, labels=labels, x=x)


def optimal_score(x, spec):
    """
    log N(x; mu1, 1) - log N(x; mu0, 1) = x (mu1 - mu0) + (mu0^2 - mu1^2) / 2.

    Strictly increasing in x when mu1 > mu0, constant when mu1 == mu0.
    """
    return np.asarray(x, dtype=np.float64) * (spec.mu1 - spec.mu0) + (spec.mu0 ** 2 - spec.mu1 ** 2) / 2.0


def kl_divergence(spec):
    """KL between two unit-variance Gaussians: (mu1 - mu0)^2 / 2"""
    return 0.5 * (spec.mu1 - spec.mu0) ** 2


@dataclass(frozen=True)
class ExperimentRow:
    sweep_value: float
    metric: str
    mean: float
    ci_half_width: float


@dataclass
class ExperimentTable:
    """One row per (sweep value, metric), in grid order then metric order"""
    rows: list
    metadata: dict = field(default_factory=dict)

    def to_frame(self):
        return pd.DataFrame(
            [asdict(r) for r in self.rows],
            columns=['sweep_value', 'metric', 'mean', 'ci_half_width'],
        )

    def series(self, metric):
        """(sweep values, means, ci half widths) for one metric in grid order"""
        rows = [r for r in self.rows if r.metric == metric]
        return (
            np.array([r.sweep_value for r in rows]),
            np.array([r.mean for r in rows]),
            np.array([r.ci_half_width for r in rows]),
        )

    def to_dict(self):
        return {
            'metadata': self.metadata,
            'rows': [asdict(r) for r in self.rows],
        }


def _check_metrics(metrics):
    metrics = list(metrics)
    if not metrics:
        raise InvalidConfigError("at least one metric is required")
    return metrics


@retry_on_degenerate(max_retries=1)
def _evaluate_draw(mu1, mu0, pi, n, metrics, pi0, threshold, *, seed):
    spec = SyntheticSpec(mu1=mu1, mu0=mu0, pi=pi, n=n, seed=seed_to_int(seed))
    data = generate(spec).labeled_scores()
    data.require_both_classes("a synthetic draw")
    ref = data.n_pos / data.n if pi0 is None else pi0
    report = evaluate(data, pi0=ref, metric_set=metrics, threshold=threshold)
    return {m: report.value(m) for m in metrics}


def _summarize(sweep_values, cells, metrics, runs, ci_level):
    z = float(stats.norm.ppf(0.5 + ci_level / 2.0))
    rows = []
    for i, value in enumerate(sweep_values):
        for metric in metrics:
            samples = np.array([cells[i * runs + r][metric] for r in range(runs)])
            mean = float(samples.mean())
            ci = float(z * samples.std(ddof=1) / math.sqrt(runs)) if runs > 1 else 0.0
            rows.append(ExperimentRow(float(value), metric, mean, ci))
    return rows


def _check_runs(runs):
    runs = int(runs)
    if runs < 1:
        raise InvalidConfigError(f"runs must be >= 1, got {runs}")
    return runs


def prior_sweep(pi_grid, runs=10, pi0=0.5, n=100000, seed=0,
                mu1=DEFAULT_MU1, mu0=DEFAULT_MU0, metrics=DEFAULT_EXPERIMENT_METRICS,
                threshold=0.5, ci_level=0.95, workers=1):
    """
    Metrics of the optimal scorer as the class prior moves along pi_grid.

    Args:
        pi_grid (list): Bernoulli parameters, each in (0, 1)
        runs (int): Independent draws per grid point
        pi0 (float): Reference prior; None uses each draw's own empirical prior
        n (int): Points per draw

    Returns:
        ExperimentTable: mean and normal-approximation CI per (pi, metric)

    Raises:
        MetricDomainError: a pointwise metric is undefined in some draw
    """
    runs = _check_runs(runs)
    pi_grid = [check_prior(p, 'grid prior') for p in pi_grid]
    pi0 = None if pi0 is None else check_prior(pi0, 'pi0')
    metrics = _check_metrics(metrics)
    info("Prior sweep over %d priors x %d runs (n=%d, pi0=%s)", len(pi_grid), runs, n, pi0)

    tasks = []
    for pi, grid_seed in zip(pi_grid, spawn_seeds(seed, len(pi_grid))):
        for run_seed in spawn_seeds(grid_seed, runs):
            tasks.append((pi, run_seed))

    cells = ordered_map(
        lambda task: _evaluate_draw(mu1, mu0, task[0], n, metrics, pi0, threshold, seed=task[1]),
        tasks,
        workers=workers,
    )

    return ExperimentTable(
        rows=_summarize(pi_grid, cells, metrics, runs, ci_level),
        metadata={
            'experiment': 'prior_sweep',
            'runs': runs,
            'pi0': pi0,
            'n': int(n),
            'mu1': mu1,
            'mu0': mu0,
            'seed': int(seed),
            'ci_level': ci_level,
        },
    )


def difficulty_sweep(kl_grid, runs=10, pi0=0.5, n=100000, seed=0,
                     mu0=DEFAULT_MU0, pi_range=DEFAULT_PI_RANGE, metrics=DEFAULT_EXPERIMENT_METRICS,
                     threshold=0.5, ci_level=0.95, workers=1):
    """
    Metrics of the optimal scorer as the class-conditional densities get closer.

    For each KL value mu1 = mu0 + sqrt(2 KL); every run draws its own prior
    uniformly from pi_range.

    Returns:
        ExperimentTable: mean and normal-approximation CI per (KL, metric)
    """
    runs = _check_runs(runs)
    kl_grid = [float(k) for k in kl_grid]
    pi0 = None if pi0 is None else check_prior(pi0, 'pi0')
    if any(k < 0 or not math.isfinite(k) for k in kl_grid):
        raise InvalidConfigError(f"KL values must be finite and >= 0, got {kl_grid}")
    low, high = (check_prior(p, 'pi_range bound') for p in pi_range)
    if low > high:
        raise InvalidConfigError(f"pi_range must be increasing, got {pi_range}")
    metrics = _check_metrics(metrics)
    info("Difficulty sweep over %d KL values x %d runs (n=%d, pi0=%s)", len(kl_grid), runs, n, pi0)

    tasks = []
    for kl, grid_seed in zip(kl_grid, spawn_seeds(seed, len(kl_grid))):
        mu1 = mu0 + math.sqrt(2.0 * kl)
        for run_seed in spawn_seeds(grid_seed, runs):
            prior_seed, draw_seed = run_seed.spawn(2)
            pi = float(make_rng(prior_seed).uniform(low, high))
            tasks.append((mu1, pi, draw_seed))

    cells = ordered_map(
        lambda task: _evaluate_draw(task[0], mu0, task[1], n, metrics, pi0, threshold, seed=task[2]),
        tasks,
        workers=workers,
    )

    return ExperimentTable(
        rows=_summarize(kl_grid, cells, metrics, runs, ci_level),
        metadata={
            'experiment': 'difficulty_sweep',
            'runs': runs,
            'pi0': pi0,
            'n': int(n),
            'mu0': mu0,
            'pi_range': [low, high],
            'seed': int(seed),
            'ci_level': ci_level,
            'sampled_pi': [round(t[1], 6) for t in tasks],
        },
    )

