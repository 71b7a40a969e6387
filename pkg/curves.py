"""
ROC, PR and PR-Gain curves built from one threshold sweep over the distinct
score values, with their areas.

Integration rules:
- ROC and PR-Gain: trapezoids (linear interpolation is valid in both spaces)
- PR: right-step sum (average-precision style), linear PR interpolation is not
"""
from dataclasses import dataclass, field

import numpy as np
from scipy import integrate

from errors import InvalidConfigError, PriorMismatchError
from logger import debug
from metrics import ConfusionCounts

KIND_ROC = 'roc'
KIND_PR = 'pr'
KIND_PRGAIN = 'prgain'
CURVE_KINDS = (KIND_ROC, KIND_PR, KIND_PRGAIN)

# Tolerance for PriorConfig.pi vs the empirical prior of the data
PRIOR_MATCH_TOLERANCE = 1e-12


@dataclass(frozen=True, eq=False)
class Sweep:
    """
    Confusion counts at every distinct-score threshold, descending.

    Index 0 is the all-negative point. thresholds[k] reproduces point k under
    the strict rule "score > threshold".
    """
    tps: np.ndarray
    fps: np.ndarray
    thresholds: np.ndarray
    n_pos: int
    n_neg: int

    @property
    def pi(self):
        return self.n_pos / (self.n_pos + self.n_neg)

    def __len__(self):
        return int(self.tps.shape[0])

    def counts(self):
        """The sweep as a list of ConfusionCounts"""
        return [
            ConfusionCounts(tp=int(tp), fp=int(fp), tn=self.n_neg - int(fp), fn=self.n_pos - int(tp))
            for tp, fp in zip(self.tps, self.fps)
        ]


@dataclass(frozen=True, eq=False)
class Curve:
    """
    Ordered (x, y) points with their area.

    auc is clamped to [0, 1]; auc_raw keeps the unclamped PR-Gain area and
    clamped tells whether clamping happened.
    """
    kind: str
    points: np.ndarray
    auc: float
    auc_raw: float = None
    clamped: bool = False
    pi: float = None
    pi0: float = None
    thresholds: np.ndarray = field(default=None, repr=False)

    @property
    def x(self):
        return self.points[:, 0]

    @property
    def y(self):
        return self.points[:, 1]


def build_sweep(data):
    """
    One pass over the scores sorted descending: O(N log N).

    Raises:
        DegenerateClassError: if either class is empty
    """
    data.require_both_classes("a threshold sweep")

    order = np.argsort(-data.scores, kind='mergesort')
    scores = data.scores[order]
    labels = data.labels[order].astype(np.int64)

    # last index of each run of equal scores
    group_ends = np.r_[np.flatnonzero(np.diff(scores)), scores.shape[0] - 1]
    cum_tp = np.cumsum(labels)
    tps = cum_tp[group_ends]
    fps = group_ends + 1 - tps

    thresholds = np.r_[scores[0], np.nextafter(scores[group_ends], -np.inf)]
    sweep_ = Sweep(
        tps=np.r_[0, tps].astype(np.int64),
        fps=np.r_[0, fps].astype(np.int64),
        thresholds=thresholds,
        n_pos=data.n_pos,
        n_neg=data.n_neg,
    )
    debug("Sweep over %d examples: %d distinct thresholds", data.n, len(sweep_) - 1)
    return sweep_


def sweep(data):
    """
    ConfusionCounts per distinct score value (descending), prepended with the
    all-negative point.
    """
    return build_sweep(data).counts()


def _check_prior_cfg(sw, prior_cfg):
    if prior_cfg is None:
        return
    if abs(prior_cfg.pi - sw.pi) > PRIOR_MATCH_TOLERANCE:
        raise PriorMismatchError(
            f"PriorConfig.pi={prior_cfg.pi} but the evaluated data has prior {sw.pi}"
        )


def _weight_and_reference(sw, prior_cfg):
    """FP weight and the prior the gains are referred to"""
    if prior_cfg is None:
        return 1.0, sw.pi
    from calibration import calibration_weight  # Lazy import to avoid circular dependency
    return calibration_weight(prior_cfg), prior_cfg.pi0


def precision_path(sw, prior_cfg=None):
    """
    Recall and (calibrated) precision at every sweep point after the
    all-negative one, where precision is always defined.
    """
    w, _ = _weight_and_reference(sw, prior_cfg)
    tps = sw.tps[1:].astype(np.float64)
    fps = sw.fps[1:].astype(np.float64)
    return tps / sw.n_pos, tps / (tps + w * fps)


def roc_from_sweep(sw):
    tpr = sw.tps / sw.n_pos
    fpr = sw.fps / sw.n_neg
    auc = float(integrate.trapezoid(tpr, fpr))
    return Curve(KIND_ROC, np.column_stack([fpr, tpr]), auc, auc_raw=auc,
                 pi=sw.pi, thresholds=sw.thresholds)


def pr_from_sweep(sw, prior_cfg=None):
    _check_prior_cfg(sw, prior_cfg)
    rec, prec = precision_path(sw, prior_cfg)

    # right-step sum; the recall-0 point borrows the first precision and has no area
    auc = float(np.sum(np.diff(np.r_[0.0, rec]) * prec))
    points = np.column_stack([np.r_[0.0, rec], np.r_[prec[0], prec]])
    return Curve(KIND_PR, points, auc, auc_raw=auc, pi=sw.pi,
                 pi0=None if prior_cfg is None else prior_cfg.pi0,
                 thresholds=np.r_[sw.thresholds[1], sw.thresholds[1:]])


def gain_path(data_or_sweep, prior_cfg=None):
    """
    Precision gain and recall gain at every sweep point with TP > 0.

    Uncalibrated gains use pi; calibrated ones use the calibrated precision and
    pi0. No restriction to the unit gain square.
    """
    sw = data_or_sweep if isinstance(data_or_sweep, Sweep) else build_sweep(data_or_sweep)
    _check_prior_cfg(sw, prior_cfg)
    w, ref = _weight_and_reference(sw, prior_cfg)

    mask = sw.tps > 0
    tps = sw.tps[mask].astype(np.float64)
    fps = sw.fps[mask].astype(np.float64)
    prec = tps / (tps + w * fps)
    rec = tps / sw.n_pos
    prec_gain = (prec - ref) / ((1.0 - ref) * prec)
    rec_gain = (rec - ref) / ((1.0 - ref) * rec)
    return prec_gain, rec_gain


def prgain_from_sweep(sw, prior_cfg=None):
    _check_prior_cfg(sw, prior_cfg)
    w, ref = _weight_and_reference(sw, prior_cfg)

    tps = sw.tps.astype(np.float64)
    fps = sw.fps.astype(np.float64)
    rec = tps / sw.n_pos

    def gains(tp, fp):
        prec = tp / (tp + w * fp)
        r = tp / sw.n_pos
        return (r - ref) / ((1.0 - ref) * r), (prec - ref) / ((1.0 - ref) * prec)

    # only recall gain >= 0, i.e. recall >= reference prior; the last point (recall 1) always qualifies
    first = int(np.argmax(rec >= ref))
    xs, ys = [], []
    if rec[first] > ref:
        # crossing of recall gain = 0, interpolated in (TP, FP) space
        tp_x = ref * sw.n_pos
        alpha = (tp_x - tps[first - 1]) / (tps[first] - tps[first - 1])
        fp_x = fps[first - 1] + alpha * (fps[first] - fps[first - 1])
        _, prec_gain_x = gains(tp_x, fp_x)
        xs.append(0.0)
        ys.append(prec_gain_x)

    rec_gain, prec_gain = gains(tps[first:], fps[first:])
    xs.extend(rec_gain.tolist())
    ys.extend(prec_gain.tolist())

    points = np.column_stack([xs, ys])
    auc_raw = float(integrate.trapezoid(points[:, 1], points[:, 0])) if len(xs) > 1 else 0.0
    auc = min(max(auc_raw, 0.0), 1.0)
    if auc != auc_raw:
        debug("PR-Gain area %.6f clamped to %.6f", auc_raw, auc)

    return Curve(KIND_PRGAIN, points, auc, auc_raw=auc_raw, clamped=auc != auc_raw,
                 pi=sw.pi, pi0=None if prior_cfg is None else prior_cfg.pi0)


def roc_curve(data):
    """(FPR, TPR) curve; AUC by trapezoids"""
    return roc_from_sweep(build_sweep(data))


def pr_curve(data, prior_cfg=None):
    """
    (Recall, Precision) curve, calibrated when prior_cfg is given.

    Raises:
        PriorMismatchError: prior_cfg.pi is not the data's empirical prior
    """
    return pr_from_sweep(build_sweep(data), prior_cfg)


def prgain_curve(data, prior_cfg=None):
    """(recall gain, precision gain) curve restricted to recall gain in [0, 1]; AUC by trapezoids"""
    return prgain_from_sweep(build_sweep(data), prior_cfg)


def curve(data, kind, prior_cfg=None):
    """Dispatch on kind ('roc', 'pr', 'prgain'); ROC ignores prior_cfg"""
    if kind == KIND_ROC:
        return roc_curve(data)
    if kind == KIND_PR:
        return pr_curve(data, prior_cfg)
    if kind == KIND_PRGAIN:
        return prgain_curve(data, prior_cfg)
    raise InvalidConfigError(f"unknown curve kind {kind!r}, expected one of {CURVE_KINDS}")
