"""Stationary workload of a fluid queue fed by a Gaussian input path.

The initial workload comes from the truncated supremum over the lookback
window [-S, 0]; the trajectory on [0, T] then follows the running-maximum
recursion of the equivalent forward representation, which keeps every
value nonnegative by construction.  A time-reversed one-sided supremum
estimator gives an independent route to the marginal law of Q(0).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .sampling import GridSpec, PathSample, sample_path
from .variance import VarianceModel

__all__ = [
    "QueueConfig",
    "WorkloadPath",
    "reich_q0",
    "forward_workload",
    "stationary_workload",
    "one_sided_sup_q0",
]


@dataclass(frozen=True)
class QueueConfig:
    c: float             # drain rate, volume per unit time
    truncation_S: float  # lookback horizon for the initial supremum

    def __post_init__(self):
        if self.c <= 0.0:
            raise ValueError("drain rate c must be positive")
        if self.truncation_S <= 0.0:
            raise ValueError("truncation_S must be positive")


@dataclass(frozen=True)
class WorkloadPath:
    times: np.ndarray      # uniform grid on [0, T]
    q_values: np.ndarray   # nonnegative workload values
    q_zero: float
    argmax_location: float  # time of the supremum attaining Q(0)
    truncation_flag: bool   # argmax hugged the lookback boundary


def reich_q0(path: PathSample, c: float):
    """Initial workload max_{s in [-S,0]} (-X(s) + c s) and its argmax.

    The grid includes s=0 where the candidate is 0, so the result is
    nonnegative; ties resolve to the earliest (most negative) s.
    """
    if c <= 0.0:
        raise ValueError("c must be positive")
    nl = path.grid.n_left
    t = path.grid.times()[:nl + 1]
    vals = -path.values[:nl + 1] + c * t
    i = int(np.argmax(vals))  # first occurrence = earliest s
    return float(vals[i]), float(t[i])


def forward_workload(path: PathSample, c: float, q0: float,
                     argmax_location: float = float("nan"),
                     truncation_flag: bool = False) -> WorkloadPath:
    """Workload on [0, T] from the forward running-maximum recursion.

    Q(t_k) = q0 + X(t_k) - c t_k + max(0, M_k) with
    M_k = max_{0<j<=k} (-q0 - (X(t_j) - c t_j)).
    """
    if q0 < 0.0:
        raise ValueError("q0 must be nonnegative")
    nl = path.grid.n_left
    t = path.grid.times()[nl:]
    y = path.values[nl:] - c * t
    q = np.empty_like(y)
    q[0] = q0
    if y.size > 1:
        m = np.maximum.accumulate(-q0 - y[1:])
        q[1:] = q0 + y[1:] + np.maximum(0.0, m)
    return WorkloadPath(times=t, q_values=q, q_zero=q0,
                        argmax_location=argmax_location,
                        truncation_flag=truncation_flag)


def _check_multiple(value: float, h: float, name: str) -> int:
    n = int(round(value / h))
    if abs(n * h - value) > 1e-9 * max(1.0, abs(value)):
        raise ValueError(f"{name}={value} is not an integer multiple of h={h}")
    return n


def stationary_workload(model: VarianceModel, cfg: QueueConfig, T: float,
                        h: float, seed) -> WorkloadPath:
    """One stationary workload trajectory on [0, T] at drain rate cfg.c."""
    nl = _check_multiple(cfg.truncation_S, h, "truncation_S")
    nr = _check_multiple(T, h, "T")
    if nr < 1:
        raise ValueError("T must cover at least one step")
    path = sample_path(model, GridSpec(h=h, n_left=nl, n_right=nr), seed)
    q0, sloc = reich_q0(path, cfg.c)
    flag = sloc < -0.9 * cfg.truncation_S
    return forward_workload(path, cfg.c, q0, argmax_location=sloc,
                            truncation_flag=flag)


def one_sided_sup_q0(model: VarianceModel, c: float, horizon: float,
                     h: float, seed) -> float:
    """Q(0) via time reversal: max over t in [0, horizon] of X(t) - c t."""
    if c <= 0.0:
        raise ValueError("c must be positive")
    n = _check_multiple(horizon, h, "horizon")
    path = sample_path(model, GridSpec(h=h, n_left=0, n_right=n), seed)
    t = path.grid.times()
    return float(np.max(path.values - c * t))
