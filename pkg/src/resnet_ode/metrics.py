"""Error functionals over sets of states and the log-log order estimator."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class ErrorReport:
    max_linf: float
    mean_l2: float
    count: int


def _diff(outputs, references) -> np.ndarray:
    a = np.atleast_2d(np.asarray(outputs, dtype=float))
    b = np.atleast_2d(np.asarray(references, dtype=float))
    if a.shape != b.shape:
        raise ValueError(f"shape mismatch: {a.shape} vs {b.shape}")
    if a.size == 0:
        raise ValueError("empty input")
    return a - b


def max_linf_error(outputs, references) -> float:
    """Largest component-wise deviation over all pairs."""
    return float(np.max(np.abs(_diff(outputs, references))))


def mean_l2_error(outputs, references) -> float:
    """Mean over pairs of the Euclidean norm of the difference (not RMS)."""
    return float(np.mean(np.linalg.norm(_diff(outputs, references), axis=1)))


def error_report(outputs, references) -> ErrorReport:
    d = _diff(outputs, references)
    return ErrorReport(float(np.max(np.abs(d))), float(np.mean(np.linalg.norm(d, axis=1))), len(d))


def target_mean_l2_error(targets, reference) -> float:
    """Mean L2 distance between scheme targets and reference targets on shared inputs."""
    if targets.y1.shape != reference.y1.shape or not np.array_equal(targets.y1, reference.y1):
        raise ValueError("target and reference sets do not share inputs")
    if targets.dt != reference.dt:
        raise ValueError("target and reference sets use different time lags")
    return mean_l2_error(targets.y2, reference.y2)


def fit_order(dts, errors) -> float:
    """Least-squares slope of log(error) against log(dt)."""
    dts = np.asarray(dts, dtype=float)
    errors = np.asarray(errors, dtype=float)
    if dts.shape != errors.shape or dts.ndim != 1:
        raise ValueError("dts and errors must be 1-D sequences of equal length")
    if len(dts) < 3:
        raise ValueError("at least three points are needed to fit an order")
    if np.any(dts <= 0) or np.any(errors <= 0):
        raise ValueError("step sizes and errors must be positive")
    if np.any(np.diff(dts) >= 0):
        raise ValueError("step sizes must be strictly decreasing")
    slope, _ = np.polyfit(np.log(dts), np.log(errors), 1)
    return float(slope)
