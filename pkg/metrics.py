"""
Core binary-classification metrics: labeled score containers, confusion counts
at a threshold and the pointwise metrics (precision, recall, FPR, F1 and the
precision/recall gains)
"""
import math
from dataclasses import dataclass

import numpy as np

from errors import DegenerateClassError, InvalidPriorError, MetricDomainError
from logger import debug


@dataclass(frozen=True, eq=False)
class LabeledScores:
    """
    Ground-truth labels paired with real-valued model scores.

    labels are 0/1 integers (bools accepted), scores finite reals. Arrays are
    copied and made read-only on construction.
    """
    labels: np.ndarray
    scores: np.ndarray

    def __post_init__(self):
        labels = np.asarray(self.labels)
        scores = np.asarray(self.scores)

        if labels.ndim != 1 or scores.ndim != 1:
            raise ValueError("labels and scores must be one-dimensional")
        if labels.shape[0] != scores.shape[0]:
            raise ValueError(f"labels ({labels.shape[0]}) and scores ({scores.shape[0]}) differ in length")
        if labels.shape[0] == 0:
            raise ValueError("at least one example is required")
        if labels.dtype.kind not in 'biu':
            raise ValueError(f"labels must be integers in {{0, 1}}, got dtype {labels.dtype}")
        if np.any((labels != 0) & (labels != 1)):
            bad = labels[(labels != 0) & (labels != 1)][0]
            raise ValueError(f"labels must be 0 or 1, got {bad}")
        if scores.dtype.kind not in 'biuf':
            raise ValueError(f"scores must be real numbers, got dtype {scores.dtype}")

        scores = scores.astype(np.float64)
        if not np.all(np.isfinite(scores)):
            raise ValueError("scores must be finite")

        labels = labels.astype(np.int8)
        labels.flags.writeable = False
        scores.flags.writeable = False
        object.__setattr__(self, 'labels', labels)
        object.__setattr__(self, 'scores', scores)

    @property
    def n(self):
        return int(self.labels.shape[0])

    @property
    def n_pos(self):
        return int(self.labels.sum())

    @property
    def n_neg(self):
        return self.n - self.n_pos

    def require_both_classes(self, what="this operation"):
        """Raise DegenerateClassError unless both classes are present"""
        if self.n_pos == 0 or self.n_neg == 0:
            raise DegenerateClassError(
                f"{what} needs both classes (positives={self.n_pos}, negatives={self.n_neg})"
            )

    def subset(self, indices):
        """Rows at the given indices, in the given order"""
        indices = np.asarray(indices, dtype=np.intp)
        return LabeledScores(self.labels[indices], self.scores[indices])


@dataclass(frozen=True)
class ConfusionCounts:
    tp: int
    fp: int
    tn: int
    fn: int

    def __post_init__(self):
        for name in ('tp', 'fp', 'tn', 'fn'):
            value = getattr(self, name)
            if value < 0:
                raise ValueError(f"{name} must be non-negative, got {value}")
            object.__setattr__(self, name, int(value))

    @property
    def n_pos(self):
        return self.tp + self.fn

    @property
    def n_neg(self):
        return self.fp + self.tn

    @property
    def n(self):
        return self.n_pos + self.n_neg


def check_prior(value, name="pi"):
    """Validate a prior in the open interval (0, 1)"""
    value = float(value)
    if not (0.0 < value < 1.0) or math.isnan(value):
        raise InvalidPriorError(f"{name} must lie in (0, 1), got {value}")
    return value


@dataclass(frozen=True)
class PriorConfig:
    """
    Reference prior pi0 and the empirical positive ratio pi of the evaluated set.
    """
    pi0: float
    pi: float

    def __post_init__(self):
        object.__setattr__(self, 'pi0', check_prior(self.pi0, 'pi0'))
        object.__setattr__(self, 'pi', check_prior(self.pi, 'pi'))

    @classmethod
    def for_data(cls, data, pi0):
        """pi is always taken from the data, never supplied by the caller"""
        return cls(pi0=pi0, pi=empirical_prior(data))


def empirical_prior(data, strict=True):
    """
    Positive class ratio N+/N.

    Args:
        data (LabeledScores): Evaluated set
        strict (bool): Raise when one class is empty (the prior is then unusable
            for calibration)
    """
    if strict:
        data.require_both_classes("a usable prior")
    return data.n_pos / data.n


def confusion_at_threshold(data, tau):
    """
    Confusion counts for the rule "predict positive iff score > tau".
    Ties at the threshold are negative.
    """
    predicted = data.scores > tau
    positive = data.labels == 1
    tp = int(np.count_nonzero(predicted & positive))
    fp = int(np.count_nonzero(predicted & ~positive))
    fn = int(np.count_nonzero(~predicted & positive))
    tn = int(np.count_nonzero(~predicted & ~positive))
    return ConfusionCounts(tp=tp, fp=fp, tn=tn, fn=fn)


def precision(c):
    """TP/(TP+FP); None when nothing is predicted positive"""
    if c.tp + c.fp == 0:
        return None
    return c.tp / (c.tp + c.fp)


def recall(c):
    """TP/(TP+FN), also the true positive rate"""
    if c.n_pos == 0:
        raise DegenerateClassError("recall is undefined without positive examples")
    return c.tp / (c.tp + c.fn)


def fpr(c):
    """FP/(FP+TN)"""
    if c.n_neg == 0:
        raise DegenerateClassError("false positive rate is undefined without negative examples")
    return c.fp / (c.fp + c.tn)


def f1(prec, rec):
    """Harmonic mean of precision and recall, 0 when both are 0"""
    for name, value in (('precision', prec), ('recall', rec)):
        if value is None or not (0.0 <= value <= 1.0):
            raise MetricDomainError(f"{name} must lie in [0, 1], got {value}")
    if prec + rec == 0:
        return 0.0
    return 2.0 * prec * rec / (prec + rec)


def _gain(value, pi, name):
    pi = check_prior(pi)
    if value is None or value <= 0:
        raise MetricDomainError(f"{name} gain is undefined at {name} {value}")
    return (value - pi) / ((1.0 - pi) * value)


def precision_gain(prec, pi):
    """(Prec - pi) / ((1 - pi) Prec); 0 for the always-positive baseline, 1 at Prec = 1"""
    return _gain(prec, pi, 'precision')


def recall_gain(rec, pi):
    """(Rec - pi) / ((1 - pi) Rec)"""
    return _gain(rec, pi, 'recall')


def replicate_positives(data, k):
    """
    Repeat every positive example k times.
    Changes the prior but neither TPR nor FPR at any threshold.
    """
    k = int(k)
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    positives = np.flatnonzero(data.labels == 1)
    extra = np.tile(positives, k - 1)
    debug("Replicating %d positives x%d", positives.size, k)
    return data.subset(np.concatenate([np.arange(data.n), extra]))
