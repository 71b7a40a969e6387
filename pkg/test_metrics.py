#!/usr/bin/env python3
"""
Tests for the core metrics: containers, confusion counts and pointwise metrics
"""
import sys

import numpy as np
import pytest

from errors import DegenerateClassError, InvalidPriorError, MetricDomainError
from metrics import (
    ConfusionCounts,
    LabeledScores,
    PriorConfig,
    confusion_at_threshold,
    empirical_prior,
    f1,
    fpr,
    precision,
    precision_gain,
    recall,
    recall_gain,
    replicate_positives,
)

EXAMPLE = LabeledScores(np.array([1, 0, 1, 0]), np.array([0.9, 0.8, 0.4, 0.2]))


def counts(tp=0, fp=0, tn=0, fn=0):
    return ConfusionCounts(tp=tp, fp=fp, tn=tn, fn=fn)


def random_data(rng, n):
    labels = rng.integers(0, 2, size=n)
    labels[0], labels[1] = 1, 0
    return LabeledScores(labels, rng.integers(0, 20, size=n) / 4.0)


class TestLabeledScores:
    def test_rejects_bad_labels(self):
        with pytest.raises(ValueError):
            LabeledScores(np.array([1, 2]), np.array([0.1, 0.2]))
        with pytest.raises(ValueError):
            LabeledScores(np.array([0.5, 1.0]), np.array([0.1, 0.2]))

    def test_rejects_non_finite_scores(self):
        with pytest.raises(ValueError):
            LabeledScores(np.array([1, 0]), np.array([0.1, np.nan]))
        with pytest.raises(ValueError):
            LabeledScores(np.array([1, 0]), np.array([np.inf, 0.2]))

    def test_rejects_length_mismatch_and_empty(self):
        with pytest.raises(ValueError):
            LabeledScores(np.array([1, 0, 1]), np.array([0.1, 0.2]))
        with pytest.raises(ValueError):
            LabeledScores(np.array([], dtype=int), np.array([]))

    def test_bool_labels_and_immutability(self):
        data = LabeledScores(np.array([True, False]), np.array([1, 2]))
        assert data.n_pos == 1 and data.n_neg == 1
        assert data.scores.dtype == np.float64
        with pytest.raises(ValueError):
            data.scores[0] = 5.0

    def test_subset_keeps_order(self):
        sub = EXAMPLE.subset([3, 0])
        assert sub.labels.tolist() == [0, 1]
        assert sub.scores.tolist() == [0.2, 0.9]


class TestEmpiricalPrior:
    def test_balanced(self):
        assert empirical_prior(EXAMPLE) == 0.5

    def test_one_in_ten(self):
        data = LabeledScores(np.array([1] + [0] * 9), np.arange(10.0))
        assert empirical_prior(data) == pytest.approx(0.1, abs=1e-15)

    def test_single_class_strict_and_lenient(self):
        data = LabeledScores(np.array([1, 1, 1]), np.array([0.1, 0.2, 0.3]))
        with pytest.raises(DegenerateClassError):
            empirical_prior(data)
        assert empirical_prior(data, strict=False) == 1.0


class TestPriorConfig:
    @pytest.mark.parametrize('pi0', [0.0, 1.0, -0.1, 1.5, float('nan')])
    def test_rejects_degenerate_priors(self, pi0):
        with pytest.raises(InvalidPriorError):
            PriorConfig(pi0=pi0, pi=0.5)

    def test_for_data_uses_empirical_prior(self):
        cfg = PriorConfig.for_data(EXAMPLE, 0.2)
        assert cfg.pi == 0.5 and cfg.pi0 == 0.2


class TestConfusion:
    def test_hand_example(self):
        assert confusion_at_threshold(EXAMPLE, 0.5) == counts(tp=1, fp=1, fn=1, tn=1)

    def test_threshold_above_max_predicts_nothing(self):
        assert confusion_at_threshold(EXAMPLE, np.inf) == counts(tp=0, fp=0, fn=2, tn=2)

    def test_threshold_below_min_predicts_everything(self):
        assert confusion_at_threshold(EXAMPLE, 0.0) == counts(tp=2, fp=2, fn=0, tn=0)

    def test_ties_at_threshold_are_negative(self):
        assert confusion_at_threshold(EXAMPLE, 0.9) == counts(tp=0, fp=0, fn=2, tn=2)

    def test_partition_and_monotonicity(self):
        rng = np.random.default_rng(7)
        for _ in range(20):
            data = random_data(rng, 40)
            previous = None
            for tau in np.linspace(-1, 6, 30):
                c = confusion_at_threshold(data, tau)
                assert c.tp + c.fn == data.n_pos
                assert c.fp + c.tn == data.n_neg
                if previous is not None:
                    assert c.tp <= previous.tp and c.fp <= previous.fp
                previous = c


class TestPointwise:
    def test_precision(self):
        assert precision(counts(tp=1, fp=1)) == 0.5
        assert precision(counts(tp=0, fp=5)) == 0.0
        assert precision(counts(tp=0, fp=0, fn=3)) is None

    def test_recall(self):
        assert recall(counts(tp=1, fn=1)) == 0.5
        assert recall(counts(tp=3, fn=0)) == 1.0
        assert recall(counts(tp=1, fn=3)) == 0.25
        with pytest.raises(DegenerateClassError):
            recall(counts(fp=1, tn=1))

    def test_fpr(self):
        assert fpr(counts(fp=1, tn=1)) == 0.5
        assert fpr(counts(fp=0, tn=9)) == 0.0
        assert fpr(counts(fp=3, tn=1)) == 0.75
        with pytest.raises(DegenerateClassError):
            fpr(counts(tp=1, fn=1))

    def test_f1(self):
        assert f1(0.7, 0.7) == pytest.approx(0.7, abs=1e-15)
        assert f1(1.0, 0.5) == pytest.approx(2 / 3, abs=1e-15)
        assert f1(0.0, 0.0) == 0.0
        assert f1(0.3, 0.8) == f1(0.8, 0.3)
        with pytest.raises(MetricDomainError):
            f1(1.2, 0.5)

    def test_precision_gain(self):
        assert precision_gain(0.25, 0.25) == 0.0
        assert precision_gain(1.0, 0.37) == 1.0
        assert precision_gain(0.5, 0.25) == pytest.approx(2 / 3, abs=1e-15)
        assert precision_gain(0.1, 0.25) < 0
        with pytest.raises(MetricDomainError):
            precision_gain(0.0, 0.25)

    def test_recall_gain(self):
        assert recall_gain(0.2, 0.2) == 0.0
        assert recall_gain(1.0, 0.2) == 1.0
        assert recall_gain(0.5, 0.2) == pytest.approx(0.75, abs=1e-15)
        with pytest.raises(MetricDomainError):
            recall_gain(0.0, 0.2)


class TestReplication:
    @pytest.mark.parametrize('k', [2, 3, 5])
    def test_rates_unchanged(self, k):
        rng = np.random.default_rng(k)
        data = random_data(rng, 60)
        big = replicate_positives(data, k)
        assert big.n_pos == k * data.n_pos and big.n_neg == data.n_neg
        for tau in np.unique(data.scores):
            a = confusion_at_threshold(data, tau)
            b = confusion_at_threshold(big, tau)
            assert recall(a) == recall(b)
            assert fpr(a) == fpr(b)

    def test_k_one_is_identity(self):
        same = replicate_positives(EXAMPLE, 1)
        assert same.labels.tolist() == EXAMPLE.labels.tolist()


if __name__ == '__main__':
    sys.exit(pytest.main([__file__, '-v']))
