"""Depth and surface-normal evaluation over a selectable pixel set."""

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, EmptyEvaluation

DELTA_THRESHOLDS = (1.05, 1.10, 1.25, 1.25 ** 2, 1.25 ** 3)
NORMAL_THRESHOLDS_DEG = (11.25, 22.5, 30.0)

OBSERVED = "observed"
UNOBSERVED = "unobserved"
ALL = "all"


@dataclass(frozen=True)
class MetricsReport:
    rel: float          # median of |pred - truth| / truth
    rmse: float         # meters
    delta: tuple        # percentages for the five DELTA_THRESHOLDS
    n_eval: int


@dataclass(frozen=True)
class NormalReport:
    mean_deg: float
    median_deg: float
    pct: tuple          # percentages under NORMAL_THRESHOLDS_DEG


def eval_mask(truth, eval_set, raw_mask=None):
    """Pixels entering evaluation: valid in truth, split by the raw-input
    observation mask for the observed/unobserved subsets."""
    mask = truth.valid.copy()
    if eval_set == ALL:
        return mask
    if raw_mask is None:
        raise ValueError(f"eval_set {eval_set!r} needs the raw-input mask")
    if raw_mask.shape != truth.shape:
        raise DimensionMismatch("raw mask does not match truth")
    if eval_set == OBSERVED:
        return mask & raw_mask
    if eval_set == UNOBSERVED:
        return mask & ~raw_mask
    raise ValueError(f"unknown eval_set {eval_set!r}")


def depth_metrics(pred, truth, eval_set=ALL, raw_mask=None,
                  literal_delta=False):
    """Rel / RMSE / delta-threshold metrics over the selected pixels.

    By default delta uses the field-standard max-ratio form
    max(pred/truth, truth/pred) < t; literal_delta=True instead thresholds
    |pred - truth| / truth directly.
    """
    if pred.shape != truth.shape:
        raise DimensionMismatch("prediction and truth differ in shape")
    mask = eval_mask(truth, eval_set, raw_mask) & pred.valid
    n = int(np.count_nonzero(mask))
    if n == 0:
        raise EmptyEvaluation(f"no pixels to evaluate for {eval_set!r}")
    p = pred.data[mask]
    t = truth.data[mask]
    err = np.abs(p - t) / t
    rel = float(np.median(err))
    rmse = float(np.sqrt(np.mean((p - t) ** 2)))
    if literal_delta:
        ratio = err  # threshold the relative error itself
    else:
        with np.errstate(divide="ignore", invalid="ignore"):
            ratio = np.maximum(p / t, t / p)
        ratio[~np.isfinite(ratio)] = np.inf
    delta = tuple(100.0 * float(np.count_nonzero(ratio < thr)) / n
                  for thr in DELTA_THRESHOLDS)
    return MetricsReport(rel, rmse, delta, n)


def normal_metrics(pred, truth, mask):
    """Angular error statistics between two unit-normal maps."""
    if pred.shape != truth.shape:
        raise DimensionMismatch("prediction and truth differ in shape")
    mask = np.asarray(mask, bool)
    if mask.shape != pred.shape:
        raise DimensionMismatch("mask does not match normal maps")
    n = int(np.count_nonzero(mask))
    if n == 0:
        raise EmptyEvaluation("no pixels to evaluate")
    dots = np.einsum("ic,ic->i", pred.data[mask], truth.data[mask])
    ang = np.degrees(np.arccos(np.clip(dots, -1.0, 1.0)))
    pct = tuple(100.0 * float(np.count_nonzero(ang < thr)) / n
                for thr in NORMAL_THRESHOLDS_DEG)
    return NormalReport(float(np.mean(ang)), float(np.median(ang)), pct)
