"""
Calibrated precision and the calibrated composite metrics.

Calibration reweights false positives by pi(1 - pi0) / (pi0(1 - pi)) so that
precision-based metrics take the value they would have if the evaluated set's
positive ratio pi were the reference ratio pi0. With pi0 == pi nothing changes.
"""
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

import curves
from errors import InvalidConfigError, MetricDomainError
from logger import debug
from metrics import (
    PriorConfig,
    check_prior,
    confusion_at_threshold,
    f1,
    precision,
    precision_gain,
    recall,
    recall_gain,
)
from utils import ordered_map

UNCALIBRATED_METRICS = (
    'precision',
    'recall',
    'f1',
    'best_f1',
    'auc_roc',
    'auc_pr',
    'auc_pr_gain',
)

CALIBRATED_METRICS = (
    'calibrated_precision',
    'calibrated_f1',
    'calibrated_best_f1',
    'calibrated_auc_pr',
    'calibrated_auc_pr_gain',
)

ALL_METRICS = UNCALIBRATED_METRICS + CALIBRATED_METRICS

# Metrics that depend on the operating threshold rather than on the sweep
POINTWISE_METRICS = ('precision', 'recall', 'f1', 'calibrated_precision', 'calibrated_f1')


def calibrated_name(metric):
    """'auc_pr' -> 'calibrated_auc_pr'; None for prior-free metrics (recall, auc_roc)"""
    name = f"calibrated_{metric}"
    return name if name in CALIBRATED_METRICS else None


def is_calibrated(metric):
    return metric in CALIBRATED_METRICS


def calibration_weight(cfg):
    """
    Factor applied to FP: pi(1 - pi0) / (pi0(1 - pi)).

    Examples:
        pi == pi0        -> 1
        pi=0.1, pi0=0.5  -> 1/9
    """
    return cfg.pi * (1.0 - cfg.pi0) / (cfg.pi0 * (1.0 - cfg.pi))


def calibrated_precision(c, cfg):
    """
    TP / (TP + w FP); None when TP = FP = 0.

    Equal to precision(c) when pi == pi0.
    """
    if c.tp + c.fp == 0:
        return None
    return c.tp / (c.tp + calibration_weight(cfg) * c.fp)


def calibrated_precision_from_rates(tpr, fpr, pi0):
    """
    Same value as calibrated_precision written with rates only:
    1 / (1 + ((1 - pi0) / pi0) * FPR / TPR). pi does not appear.
    """
    pi0 = check_prior(pi0, 'pi0')
    if tpr <= 0:
        raise MetricDomainError(f"rate form needs TPR > 0, got {tpr}")
    return 1.0 / (1.0 + ((1.0 - pi0) / pi0) * (fpr / tpr))


def calibrated_f1(c, cfg):
    """F1 with the calibrated precision; an empty prediction set scores 0"""
    prec = calibrated_precision(c, cfg)
    return f1(0.0 if prec is None else prec, recall(c))


def calibrated_gains(c, cfg):
    """
    (precision gain, recall gain) with calibrated precision and pi0 in place of pi.

    The precision gain equals the uncalibrated precision_gain(precision(c), pi).

    Raises:
        MetricDomainError: zero (or undefined) calibrated precision, or zero recall
    """
    prec = calibrated_precision(c, cfg)
    if prec is None or prec <= 0:
        raise MetricDomainError(f"calibrated precision gain undefined at precision {prec}")
    return precision_gain(prec, cfg.pi0), recall_gain(recall(c), cfg.pi0)


def best_f1(data_or_sweep, prior_cfg=None):
    """
    Maximum (calibrated) F1 over all sweep thresholds.

    When calibrated, the threshold maximizing the calibrated F1 is chosen.

    Returns:
        tuple: (value, threshold); predict positive iff score > threshold
    """
    sw = data_or_sweep if isinstance(data_or_sweep, curves.Sweep) else curves.build_sweep(data_or_sweep)
    rec, prec = curves.precision_path(sw, prior_cfg)
    denom = prec + rec
    with np.errstate(divide='ignore', invalid='ignore'):
        scores = np.where(denom > 0, 2.0 * prec * rec / denom, 0.0)
    k = int(np.argmax(scores))
    return float(scores[k]), float(sw.thresholds[k + 1])


@dataclass
class MetricReport:
    """
    Named metric values for one dataset or group.

    values only holds defined metrics; pointwise metrics that are 0/0 at the
    operating threshold are listed in undefined instead.
    """
    n: int
    n_pos: int
    pi: float
    values: dict
    group: Optional[str] = None
    pi0: Optional[float] = None
    thresholds: dict = field(default_factory=dict)
    clamped: list = field(default_factory=list)
    undefined: list = field(default_factory=list)

    def value(self, metric):
        """
        Value of one metric for callers that aggregate it.

        Raises:
            MetricDomainError: the metric is 0/0 at the operating threshold
            InvalidConfigError: the metric was not evaluated
        """
        if metric in self.undefined:
            raise MetricDomainError(
                f"{metric} is undefined at the operating threshold (nothing predicted positive)"
                + (f" in group {self.group!r}" if self.group is not None else "")
            )
        if metric not in self.values:
            raise InvalidConfigError(f"{metric} was not evaluated")
        return self.values[metric]

    def to_dict(self):
        ordered = [m for m in ALL_METRICS if m in self.values]
        return {
            'group': self.group,
            'n': self.n,
            'n_pos': self.n_pos,
            'pi': self.pi,
            'pi0': self.pi0,
            'values': {m: self.values[m] for m in ordered},
            'thresholds': {k: self.thresholds[k] for k in sorted(self.thresholds)},
            'clamped': sorted(self.clamped),
            'undefined': sorted(self.undefined),
        }

    @classmethod
    def from_dict(cls, data):
        return cls(
            group=data.get('group'),
            n=int(data['n']),
            n_pos=int(data['n_pos']),
            pi=float(data['pi']),
            pi0=None if data.get('pi0') is None else float(data['pi0']),
            values={k: float(v) for k, v in data.get('values', {}).items()},
            thresholds={k: float(v) for k, v in data.get('thresholds', {}).items()},
            clamped=list(data.get('clamped', [])),
            undefined=list(data.get('undefined', [])),
        )


def resolve_metric_set(metric_set, pi0):
    """
    Validate requested metric names, in canonical order.

    None means every uncalibrated metric plus, when pi0 is given, every
    calibrated one.
    """
    if metric_set is None:
        return list(UNCALIBRATED_METRICS) + (list(CALIBRATED_METRICS) if pi0 is not None else [])

    requested = set(metric_set)
    unknown = sorted(requested - set(ALL_METRICS))
    if unknown:
        raise InvalidConfigError(f"unknown metric(s): {', '.join(unknown)}; known: {', '.join(ALL_METRICS)}")
    if pi0 is None and any(is_calibrated(m) for m in requested):
        raise InvalidConfigError("calibrated metrics need an explicit reference prior pi0")
    return [m for m in ALL_METRICS if m in requested]


def evaluate(data, pi0=None, metric_set=None, group=None, threshold=0.5):
    """
    Compute the requested metrics on one labeled score set.

    pi is always the empirical prior of data; pi0 has no default.

    Args:
        data (LabeledScores): Evaluated set, both classes required
        pi0 (float): Reference prior for calibrated metrics
        metric_set (iterable): Metric names, see ALL_METRICS
        group (str): Group / period label recorded in the report
        threshold (float): Operating threshold of the pointwise metrics

    Returns:
        MetricReport

    Raises:
        DegenerateClassError, InvalidConfigError, InvalidPriorError
    """
    metrics = resolve_metric_set(metric_set, pi0)
    data.require_both_classes(f"evaluating group {group!r}" if group is not None else "evaluation")

    calibrated = any(is_calibrated(m) for m in metrics)
    cfg = PriorConfig.for_data(data, pi0) if calibrated else None

    values, thresholds, clamped, undefined = {}, {}, [], []

    if any(m in POINTWISE_METRICS for m in metrics):
        c = confusion_at_threshold(data, threshold)
        thresholds['operating'] = float(threshold)
        prec = precision(c)
        cal_prec = calibrated_precision(c, cfg) if cfg is not None else None
        pointwise = {
            'precision': prec,
            'recall': recall(c),
            'f1': f1(0.0 if prec is None else prec, recall(c)),
            'calibrated_precision': cal_prec,
            'calibrated_f1': calibrated_f1(c, cfg) if cfg is not None else None,
        }
        for m in metrics:
            if m in pointwise:
                if pointwise[m] is None:
                    undefined.append(m)
                else:
                    values[m] = float(pointwise[m])

    sw = None
    if any(m not in POINTWISE_METRICS for m in metrics):
        sw = curves.build_sweep(data)

    for m in metrics:
        if m in POINTWISE_METRICS:
            continue
        prior_cfg = cfg if is_calibrated(m) else None
        base = m[len('calibrated_'):] if is_calibrated(m) else m

        if base == 'best_f1':
            values[m], thresholds[m] = best_f1(sw, prior_cfg)
        elif base == 'auc_roc':
            values[m] = curves.roc_from_sweep(sw).auc
        elif base == 'auc_pr':
            values[m] = curves.pr_from_sweep(sw, prior_cfg).auc
        elif base == 'auc_pr_gain':
            gain_curve = curves.prgain_from_sweep(sw, prior_cfg)
            values[m] = gain_curve.auc
            if gain_curve.clamped:
                clamped.append(m)

    debug("Evaluated %d metrics for group %s (n=%d, pi=%.6f)", len(values), group, data.n, data.n_pos / data.n)
    return MetricReport(
        group=group,
        n=data.n,
        n_pos=data.n_pos,
        pi=data.n_pos / data.n,
        pi0=float(pi0) if calibrated else None,
        values=values,
        thresholds=thresholds,
        clamped=clamped,
        undefined=undefined,
    )


def evaluate_groups(groups, pi0=None, metric_set=None, threshold=0.5, workers=1):
    """
    evaluate() per group with one shared pi0 and a per-group pi.

    Args:
        groups (dict): group id -> LabeledScores

    Returns:
        list[MetricReport]: sorted by group id whatever the scheduling
    """
    names = sorted(groups)
    return ordered_map(
        lambda name: evaluate(groups[name], pi0=pi0, metric_set=metric_set, group=name, threshold=threshold),
        names,
        workers=workers,
    )


# Drift attribution verdicts
DRIFT_STABLE = 'stable'
DRIFT_PRIOR = 'prior'
DRIFT_LIKELIHOOD = 'likelihood'


@dataclass(frozen=True)
class DriftEntry:
    metric: str
    raw_delta: float
    calibrated_delta: float
    verdict: str


@dataclass
class DriftReport:
    reference_group: Optional[str]
    group: Optional[str]
    pi_reference: float
    pi: float
    pi0: float
    entries: list

    def to_dict(self):
        return {
            'reference_group': self.reference_group,
            'group': self.group,
            'pi_reference': self.pi_reference,
            'pi': self.pi,
            'pi0': self.pi0,
            'entries': [
                {
                    'metric': e.metric,
                    'raw_delta': e.raw_delta,
                    'calibrated_delta': e.calibrated_delta,
                    'verdict': e.verdict,
                }
                for e in self.entries
            ],
        }


def attribute_drift(reference, current, tolerance=0.01):
    """
    Tell a change of class ratio from a change of P(x|y) between two reports.

    For each metric present raw and calibrated in both reports:
      stable      both deltas within tolerance
      prior       calibrated delta within tolerance, raw delta not
      likelihood  calibrated delta beyond tolerance

    Raises:
        InvalidConfigError: reports without calibrated values or with different pi0
    """
    if reference.pi0 is None or current.pi0 is None:
        raise InvalidConfigError("drift attribution needs calibrated metrics in both reports")
    if reference.pi0 != current.pi0:
        raise InvalidConfigError(f"reports use different pi0 ({reference.pi0} vs {current.pi0})")

    entries = []
    for metric in UNCALIBRATED_METRICS:
        cal = calibrated_name(metric)
        if cal is None:
            continue
        if not all(m in r.values for m in (metric, cal) for r in (reference, current)):
            continue

        raw_delta = current.values[metric] - reference.values[metric]
        cal_delta = current.values[cal] - reference.values[cal]
        if abs(cal_delta) > tolerance:
            verdict = DRIFT_LIKELIHOOD
        elif abs(raw_delta) > tolerance:
            verdict = DRIFT_PRIOR
        else:
            verdict = DRIFT_STABLE
        entries.append(DriftEntry(metric, raw_delta, cal_delta, verdict))

    return DriftReport(
        reference_group=reference.group,
        group=current.group,
        pi_reference=reference.pi,
        pi=current.pi,
        pi0=current.pi0,
        entries=entries,
    )
