#!/usr/bin/env python3
"""
Tests for the two-Gaussian benchmark and the prior / difficulty sweeps
"""
import math
import sys

import numpy as np
import pytest

from calibration import evaluate
from config import DEFAULT_KL_GRID, DEFAULT_PRIOR_GRID
from errors import DegenerateClassError, InvalidConfigError, InvalidPriorError, MetricDomainError
from synthetic import (
    SyntheticSpec,
    difficulty_sweep,
    generate,
    kl_divergence,
    optimal_score,
    prior_sweep,
)


class TestGenerate:
    def test_prior_close_to_bernoulli_parameter(self):
        dataset = generate(SyntheticSpec(pi=0.5, n=100000, seed=1))
        assert dataset.labels.mean() == pytest.approx(0.5, abs=0.01)

    def test_class_conditional_means(self):
        spec = SyntheticSpec(mu1=2.0, mu0=1.8, pi=0.3, n=100000, seed=2)
        dataset = generate(spec)
        for label, mu in ((1, spec.mu1), (0, spec.mu0)):
            x = dataset.x[dataset.labels == label]
            assert abs(x.mean() - mu) <= 4.0 / math.sqrt(x.size)

    def test_same_seed_same_dataset(self):
        a = generate(SyntheticSpec(n=1000, seed=9))
        b = generate(SyntheticSpec(n=1000, seed=9))
        assert np.array_equal(a.labels, b.labels) and np.array_equal(a.x, b.x)

    def test_identical_means_are_indistinguishable(self):
        spec = SyntheticSpec(mu1=1.8, mu0=1.8, n=100000, seed=3)
        data = generate(spec).labeled_scores(raw_feature=True)
        assert evaluate(data, metric_set=['auc_roc']).values['auc_roc'] == pytest.approx(0.5, abs=0.01)

    @pytest.mark.parametrize('kwargs', [{'n': 1}, {'pi': 0.0}, {'pi': 1.0}, {'mu1': float('inf')}])
    def test_rejects_bad_spec(self, kwargs):
        with pytest.raises((InvalidConfigError, InvalidPriorError)):
            SyntheticSpec(**kwargs)


class TestOptimalScore:
    def test_zero_at_midpoint(self):
        assert optimal_score(np.array([1.9]), SyntheticSpec(mu1=2.0, mu0=1.8))[0] == pytest.approx(0.0, abs=1e-12)

    def test_constant_for_equal_means(self):
        scores = optimal_score(np.linspace(-3, 3, 7), SyntheticSpec(mu1=1.0, mu0=1.0))
        assert np.all(scores == scores[0])

    def test_increasing(self):
        scores = optimal_score(np.linspace(-3, 3, 50), SyntheticSpec(mu1=2.0, mu0=1.8))
        assert np.all(np.diff(scores) > 0)

    def test_ranks_like_raw_feature(self):
        dataset = generate(SyntheticSpec(pi=0.2, n=20000, seed=4))
        metrics = ['auc_roc', 'auc_pr', 'auc_pr_gain', 'best_f1', 'calibrated_auc_pr']
        raw = evaluate(dataset.labeled_scores(raw_feature=True), pi0=0.5, metric_set=metrics).values
        opt = evaluate(dataset.labeled_scores(), pi0=0.5, metric_set=metrics).values
        for name in metrics:
            assert opt[name] == pytest.approx(raw[name], abs=1e-12)


def test_kl_divergence():
    assert kl_divergence(SyntheticSpec(mu1=1.0, mu0=1.0)) == 0.0
    assert kl_divergence(SyntheticSpec(mu1=2.0, mu0=1.8)) == pytest.approx(0.02, abs=1e-12)
    assert kl_divergence(SyntheticSpec(mu1=3.0, mu0=1.0)) == 2.0


class TestPriorSweep:
    def test_table_shape(self):
        table = prior_sweep([0.5, 0.2], runs=3, n=2000, seed=1, metrics=['auc_pr', 'calibrated_auc_pr'])
        frame = table.to_frame()
        assert list(frame.columns) == ['sweep_value', 'metric', 'mean', 'ci_half_width']
        assert len(frame) == 4
        assert list(zip(frame.sweep_value, frame.metric)) == [
            (0.5, 'auc_pr'), (0.5, 'calibrated_auc_pr'), (0.2, 'auc_pr'), (0.2, 'calibrated_auc_pr'),
        ]
        assert (frame.ci_half_width >= 0).all()
        assert table.metadata['runs'] == 3

    def test_empirical_reference_reproduces_raw_values(self):
        table = prior_sweep([0.3, 0.05], runs=3, pi0=None, n=3000, seed=2,
                            metrics=['auc_pr', 'calibrated_auc_pr', 'best_f1', 'calibrated_best_f1'])
        for raw, cal in (('auc_pr', 'calibrated_auc_pr'), ('best_f1', 'calibrated_best_f1')):
            _, raw_means, _ = table.series(raw)
            _, cal_means, _ = table.series(cal)
            assert np.allclose(raw_means, cal_means, rtol=0, atol=1e-12)

    def test_deterministic_and_worker_independent(self):
        kwargs = dict(runs=2, n=2000, seed=3, metrics=['auc_pr', 'calibrated_auc_pr'])
        a = prior_sweep([0.5, 0.1], **kwargs)
        b = prior_sweep([0.5, 0.1], workers=4, **kwargs)
        assert a.to_dict() == b.to_dict()
        c = prior_sweep([0.5, 0.1], **{**kwargs, 'seed': 4})
        assert a.to_dict() != c.to_dict()

    def test_degenerate_draws_fail_after_one_retry(self):
        with pytest.raises(DegenerateClassError):
            prior_sweep([0.001], runs=3, n=10, seed=0, metrics=['auc_pr'])

    def test_undefined_pointwise_metric_fails(self):
        with pytest.raises(MetricDomainError):
            prior_sweep([0.5], runs=1, n=200, seed=0, metrics=['precision'], threshold=1e6)

    def test_rejects_bad_grid_and_runs(self):
        with pytest.raises(InvalidPriorError):
            prior_sweep([0.5, 1.2], runs=1, n=100)
        with pytest.raises(InvalidConfigError):
            prior_sweep([0.5], runs=0, n=100)
        with pytest.raises(InvalidPriorError):
            prior_sweep([0.5], runs=1, n=100, pi0=0.0)

    @pytest.mark.slow
    def test_calibrated_metrics_flat_raw_decline(self):
        table = prior_sweep(DEFAULT_PRIOR_GRID, runs=10, pi0=0.5, n=100000, seed=0)
        grid, cal, cal_ci = table.series('calibrated_auc_pr')
        _, raw, raw_ci = table.series('auc_pr')
        assert cal.max() - cal.min() <= 0.03
        assert raw[list(grid).index(0.5)] - raw[list(grid).index(0.01)] >= 0.2
        i = list(grid).index(0.5)
        assert abs(cal[i] - raw[i]) <= cal_ci[i] + raw_ci[i] + 1e-12


class TestDifficultySweep:
    def test_zero_kl_gives_reference_prior(self):
        table = difficulty_sweep([0.0], runs=3, pi0=0.3, n=2000, seed=1, pi_range=(0.1, 0.5),
                                 metrics=['calibrated_auc_pr'])
        _, means, _ = table.series('calibrated_auc_pr')
        assert means[0] == pytest.approx(0.3, abs=1e-12)

    def test_sampled_priors_in_range(self):
        table = difficulty_sweep([0.02, 0.0], runs=4, n=2000, seed=5, pi_range=(0.1, 0.4), metrics=['auc_pr'])
        sampled = table.metadata['sampled_pi']
        assert len(sampled) == 8
        assert all(0.1 <= p <= 0.4 for p in sampled)

    def test_rejects_negative_kl(self):
        with pytest.raises(InvalidConfigError):
            difficulty_sweep([0.01, -0.01], runs=1, n=100)

    @pytest.mark.slow
    def test_calibrated_metrics_decrease_with_kl(self):
        table = difficulty_sweep(DEFAULT_KL_GRID, runs=10, pi0=0.5, n=100000, seed=0)
        grid, means, ci = table.series('calibrated_auc_pr')
        for i in range(len(grid) - 1):
            assert means[i + 1] <= means[i] + ci[i] + ci[i + 1]
        assert grid[-1] == 0.0
        assert means[-1] == pytest.approx(0.5, abs=0.02)


if __name__ == '__main__':
    sys.exit(pytest.main([__file__, '-v']))
