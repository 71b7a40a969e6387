#!/usr/bin/env python3
"""
Tests for Spearman rank agreement between metrics over model pools
"""
import os
import sys

import numpy as np
import pytest

import data_io
from errors import ConstantVectorError, InvalidConfigError, InvalidPriorError, MetricDomainError
from rank_analysis import (
    DEFAULT_RANK_COLUMNS,
    IMBALANCED_RANK_COLUMNS,
    ModelPool,
    PriorRule,
    RANK_COLUMN_SETS,
    RankedMetric,
    correlation_matrix,
    metric_vector,
    spearman,
    synth_model_pool,
    synth_pools,
)
from synthetic import SyntheticSpec, generate, optimal_score

TINY_POOL = os.path.join(os.path.dirname(os.path.abspath(__file__)), 'fixtures', 'tiny_pool.csv')


@pytest.fixture
def tiny_pool():
    return data_io.read_pool_csv(TINY_POOL)


class TestSpearman:
    def test_identical(self):
        assert spearman([3.0, 1.0, 2.0, 5.0], [3.0, 1.0, 2.0, 5.0]) == 1.0

    def test_reversed(self):
        assert spearman([1, 2, 3, 4, 5], [5, 4, 3, 2, 1]) == pytest.approx(-1.0, abs=1e-15)

    def test_hand_example(self):
        assert spearman([1, 2, 3, 4], [1, 3, 2, 4]) == pytest.approx(0.8, abs=1e-12)

    def test_ties_get_average_ranks(self):
        assert spearman([1, 1, 2, 3], [10, 10, 20, 30]) == pytest.approx(1.0, abs=1e-12)
        # ranks (1.5, 1.5, 3, 4) against (1, 2, 3, 4)
        assert spearman([1, 1, 2, 3], [1, 2, 3, 4]) == pytest.approx(0.9486832980505138, abs=1e-12)

    def test_increasing_transform_invariance(self):
        rng = np.random.default_rng(0)
        a, b = rng.standard_normal(30), rng.standard_normal(30)
        assert spearman(np.exp(a), b ** 3) == pytest.approx(spearman(a, b), abs=1e-12)

    def test_constant_vector(self):
        with pytest.raises(ConstantVectorError):
            spearman([1, 1, 1], [1, 2, 3])

    def test_length_checks(self):
        with pytest.raises(InvalidConfigError):
            spearman([1, 2, 3], [1, 2])
        with pytest.raises(InvalidConfigError):
            spearman([1], [2])


class TestRules:
    def test_parse(self):
        assert PriorRule.parse('0.5') == PriorRule(0.5, relative=False)
        assert PriorRule.parse('1.01pi') == PriorRule(1.01, relative=True)
        assert PriorRule.parse('10*pi') == PriorRule(10.0, relative=True)
        assert str(PriorRule.parse('1.01pi')) == '1.01pi'

    def test_parse_errors(self):
        for text in ('pi', 'abc', '-0.5', '0'):
            with pytest.raises(InvalidConfigError):
                PriorRule.parse(text)

    def test_resolve(self):
        assert PriorRule.parse('1.01pi').resolve(0.2) == pytest.approx(0.202)
        assert PriorRule.parse('0.5').resolve(0.01) == 0.5
        with pytest.raises(InvalidPriorError):
            PriorRule.parse('10pi').resolve(0.2)

    def test_ranked_metric(self):
        column = RankedMetric.parse('calibrated_auc_pr@1.01pi')
        assert column.metric == 'calibrated_auc_pr'
        assert column.label == 'calibrated_auc_pr@1.01pi'
        assert RankedMetric.parse('auc_roc').label == 'auc_roc'
        with pytest.raises(InvalidConfigError):
            RankedMetric.parse('calibrated_auc_pr')
        with pytest.raises(InvalidConfigError):
            RankedMetric.parse('auc_roc@0.5')
        with pytest.raises(InvalidConfigError):
            RankedMetric.parse('auc_lift')

    def test_default_columns(self):
        labels = [c.label for c in DEFAULT_RANK_COLUMNS]
        assert len(labels) == 10 == len(set(labels))

    def test_imbalanced_columns(self):
        labels = [c.label for c in IMBALANCED_RANK_COLUMNS]
        assert len(labels) == len(set(labels))
        assert 'calibrated_auc_pr@10pi' in labels
        assert all(c.rule is None or c.rule == PriorRule(10.0, relative=True) for c in IMBALANCED_RANK_COLUMNS)
        assert RANK_COLUMN_SETS['default'] is DEFAULT_RANK_COLUMNS


class TestPools:
    def test_read_pool_csv(self, tiny_pool):
        assert tiny_pool.dataset_id == 'tiny_pool'
        assert tiny_pool.model_names == ('perfect', 'good', 'noisy', 'inverted')
        assert tiny_pool.m == 4 and tiny_pool.pi == pytest.approx(0.3)

    def test_pool_needs_two_models(self):
        with pytest.raises(InvalidConfigError):
            ModelPool('one', np.array([1, 0]), np.array([[0.4, 0.2]]))

    def test_dominance(self, tiny_pool):
        values = metric_vector(tiny_pool, 'auc_roc')
        assert values.tolist() == pytest.approx([1.0, 20 / 21, 11 / 21, 0.0], abs=1e-12)

    def test_calibrated_needs_rule(self, tiny_pool):
        with pytest.raises(InvalidConfigError):
            metric_vector(tiny_pool, 'calibrated_auc_pr')
        values = metric_vector(tiny_pool, 'calibrated_auc_pr', PriorRule.parse('1pi'))
        assert np.allclose(values, metric_vector(tiny_pool, 'auc_pr'), rtol=0, atol=1e-12)

    def test_absolute_half_on_balanced_pool_matches_raw(self):
        rng = np.random.default_rng(11)
        labels = np.r_[np.ones(500, dtype=int), np.zeros(500, dtype=int)]
        scores = np.stack([labels + scale * rng.standard_normal(labels.size) for scale in (0.3, 1.0, 3.0)])
        pool = ModelPool('balanced', labels, scores)
        for metric in ('auc_pr', 'auc_pr_gain', 'best_f1'):
            calibrated = metric_vector(pool, f'calibrated_{metric}', PriorRule.parse('0.5'))
            assert np.allclose(calibrated, metric_vector(pool, metric), rtol=0, atol=1e-12)

    def test_undefined_precision_is_not_ranked(self):
        pool = ModelPool('silent', np.array([1, 0, 1, 0]), np.array([[0.1, 0.2, 0.3, 0.4], [0.9, 0.1, 0.8, 0.2]]))
        with pytest.raises(MetricDomainError):
            metric_vector(pool, 'precision', threshold=0.5)

    def test_noise_free_model_is_optimal_scorer(self):
        spec = SyntheticSpec(mu1=3.0, mu0=1.0, pi=0.2, n=1000, seed=4)
        pool = synth_model_pool(spec, 3, [0.0, 1.0, 2.0], seed=1)
        assert np.array_equal(pool.scores[0], optimal_score(generate(spec).x, spec))

    def test_heavy_noise_is_random(self):
        spec = SyntheticSpec(mu1=3.0, mu0=1.0, pi=0.5, n=20000, seed=5)
        pool = synth_model_pool(spec, 2, [0.0, 1e4], seed=2)
        assert metric_vector(pool, 'auc_roc')[1] == pytest.approx(0.5, abs=0.02)

    def test_quality_decreases_with_noise(self):
        totals = np.zeros(5)
        for seed in range(10):
            spec = SyntheticSpec(mu1=3.0, mu0=1.0, pi=0.2, n=2000, seed=seed)
            pool = synth_model_pool(spec, 5, [0.0, 2.0, 4.0, 8.0, 16.0], seed=100 + seed)
            totals += metric_vector(pool, 'auc_roc')
        assert np.all(np.diff(totals) < 0)

    def test_synth_pools_deterministic(self):
        a = synth_pools(2, 3, 500, 0.2, seed=1)
        b = synth_pools(2, 3, 500, 0.2, seed=1)
        assert [p.dataset_id for p in a] == ['synthetic-000', 'synthetic-001']
        assert all(np.array_equal(x.scores, y.scores) and np.array_equal(x.labels, y.labels) for x, y in zip(a, b))


class TestCorrelationMatrix:
    def test_self_correlation(self, tiny_pool):
        result = correlation_matrix([tiny_pool], columns=['auc_roc', 'auc_roc'])
        assert result.matrix.tolist() == [[1.0, 1.0], [1.0, 1.0]]
        assert result.datasets == 1 and result.skipped == 0

    def test_symmetric_unit_diagonal(self, tiny_pool):
        columns = ['auc_roc', 'auc_pr', 'best_f1', 'calibrated_auc_pr@0.5']
        result = correlation_matrix([tiny_pool], columns=columns)
        assert np.array_equal(result.matrix, result.matrix.T)
        assert np.all(np.diag(result.matrix) == 1.0)
        assert np.all(np.abs(result.matrix) <= 1.0)
        assert result.names == columns

    def test_failing_pools_are_skipped(self, tiny_pool):
        tied = ModelPool('tied', tiny_pool.labels, np.stack([tiny_pool.scores[0], tiny_pool.scores[0]]))
        result = correlation_matrix([tiny_pool, tied], columns=['auc_roc', 'auc_pr'])
        assert result.datasets == 1 and result.skipped == 1
        assert result.skipped_ids == ['tied']

        with pytest.raises(InvalidConfigError):
            correlation_matrix([tied], columns=['auc_roc', 'auc_pr'])
        with pytest.raises(InvalidConfigError):
            correlation_matrix([tiny_pool], columns=['auc_roc', 'calibrated_auc_pr@10pi'])
        with pytest.raises(InvalidConfigError):
            correlation_matrix([], columns=['auc_roc'])

    def test_undefined_metric_skips_pool(self):
        pool = ModelPool('silent', np.array([1, 0, 1, 0]), np.array([[0.1, 0.2, 0.3, 0.4], [0.9, 0.1, 0.8, 0.2]]))
        with pytest.raises(InvalidConfigError):
            correlation_matrix([pool], columns=['precision', 'auc_roc'])

    def test_imbalanced_column_set(self):
        pools = synth_pools(2, 5, 5000, 0.02, seed=9)
        result = correlation_matrix(pools, columns=IMBALANCED_RANK_COLUMNS)
        assert result.datasets == 2
        assert result.names == [c.label for c in IMBALANCED_RANK_COLUMNS]

    def test_pool_order_and_workers_do_not_matter(self):
        pools = synth_pools(3, 6, 2000, 0.1, seed=3)
        columns = ['auc_roc', 'auc_pr', 'calibrated_auc_pr@0.5']
        a = correlation_matrix(pools, columns=columns)
        b = correlation_matrix(pools[::-1], columns=columns, workers=3)
        assert np.allclose(a.matrix, b.matrix, rtol=0, atol=1e-12)

    def test_near_prior_reference_tracks_raw_metric(self):
        pools = synth_pools(3, 10, 5000, 0.1, seed=7)
        result = correlation_matrix(pools, columns=['auc_pr', 'calibrated_auc_pr@1.01pi'])
        assert result.value('auc_pr', 'calibrated_auc_pr@1.01pi') >= 0.99

    @pytest.mark.slow
    def test_default_columns_on_imbalanced_pools(self):
        pools = synth_pools(20, 30, 20000, 0.005, seed=0)
        result = correlation_matrix(pools)
        assert result.datasets == 20
        assert result.value('calibrated_auc_pr@1.01pi', 'auc_pr') >= 0.95
        assert result.value('calibrated_auc_pr@0.5', 'auc_roc') > result.value('calibrated_auc_pr@0.5', 'auc_pr')

    @pytest.mark.slow
    def test_best_f1_follows_auc_pr_on_imbalanced_pools(self):
        pools = synth_pools(20, 30, 20000, 0.005, seed=0)
        result = correlation_matrix(pools, columns=IMBALANCED_RANK_COLUMNS)
        assert result.value('best_f1', 'auc_pr') >= result.value('best_f1', 'auc_roc')
        assert result.value('calibrated_best_f1@10pi', 'calibrated_auc_pr@10pi') >= result.value('calibrated_best_f1@10pi', 'auc_roc')


if __name__ == '__main__':
    sys.exit(pytest.main([__file__, '-v']))
