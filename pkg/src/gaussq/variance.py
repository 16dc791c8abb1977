"""Variance-function families for stationary-increment Gaussian inputs.

Three parametric families are built in:

* ``fbm``          sigma^2(t) = |t|^(2H)
* ``power_sum``    sigma^2(t) = a t^(2 lam) + b t^(2 alpha),          lam <= alpha
* ``power_ratio``  sigma^2(t) = a t^(2 lam) / (1 + t^(2 (lam-alpha))), lam > alpha

Each is continuous, vanishes at zero, is strictly increasing on [0, inf)
and regularly varying with index ``lam`` at zero and ``alpha`` at infinity.
Between them the two non-fBm families reach every (lam, alpha) in (0,1)^2.

Besides the closed forms, this module carries numeric validators for the
regularity conditions the rest of the library relies on: boundedness of
sigma^2(t) |log t|^(1+eps) near zero, log-log slope estimation of the
power-law indices, and the two-sided Potter-style ratio bound.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .stats import loglog_slope

__all__ = [
    "ModelError",
    "VarianceModel",
    "ConditionCReport",
    "PotterReport",
    "check_condition_C",
    "estimate_rv_index",
    "potter_check",
]


class ModelError(ValueError):
    """Raised for invalid variance-model parameters."""


@dataclass(frozen=True)
class VarianceModel:
    """A parametric variance function with declared power-law indices.

    ``lambda0`` is the regular-variation index of sigma at zero and
    ``alpha_inf`` the index at infinity; both lie in (0, 1), which makes
    sigma(x)/x blow up at zero and vanish at infinity (the property the
    time-scale solver depends on).
    """

    kind: str  # "fbm" | "power_sum" | "power_ratio"
    lambda0: float
    alpha_inf: float
    hurst: float | None = None
    a: float = 1.0
    b: float = 1.0

    def __post_init__(self) -> None:
        if self.kind not in ("fbm", "power_sum", "power_ratio"):
            raise ModelError(f"unknown model kind {self.kind!r}")
        for name in ("lambda0", "alpha_inf"):
            v = getattr(self, name)
            if not (0.0 < v < 1.0):
                raise ModelError(f"{name}={v} must lie in (0, 1)")
        if self.a <= 0.0 or self.b <= 0.0:
            raise ModelError("scale coefficients must be positive")
        if self.kind == "fbm":
            if self.hurst is None or not (0.0 < self.hurst < 1.0):
                raise ModelError("fbm requires hurst in (0, 1)")
            if self.hurst != self.lambda0 or self.hurst != self.alpha_inf:
                raise ModelError("fbm requires lambda0 == alpha_inf == hurst")
        elif self.kind == "power_sum":
            if self.lambda0 > self.alpha_inf:
                raise ModelError(
                    "power_sum needs lambda0 <= alpha_inf; the index at zero "
                    "would otherwise be min(lambda0, alpha_inf)"
                )
        else:  # power_ratio
            if self.lambda0 <= self.alpha_inf:
                raise ModelError("power_ratio needs lambda0 > alpha_inf")

    # -- constructors -------------------------------------------------------

    @classmethod
    def fbm(cls, hurst: float) -> "VarianceModel":
        return cls(kind="fbm", lambda0=hurst, alpha_inf=hurst, hurst=hurst)

    @classmethod
    def power_sum(cls, lambda0: float, alpha_inf: float,
                  a: float = 1.0, b: float = 1.0) -> "VarianceModel":
        return cls(kind="power_sum", lambda0=lambda0, alpha_inf=alpha_inf,
                   a=a, b=b)

    @classmethod
    def power_ratio(cls, lambda0: float, alpha_inf: float,
                    a: float = 1.0) -> "VarianceModel":
        return cls(kind="power_ratio", lambda0=lambda0, alpha_inf=alpha_inf,
                   a=a)

    @classmethod
    def from_dict(cls, doc: dict) -> "VarianceModel":
        kind = doc.get("kind")
        if kind == "fbm":
            return cls.fbm(float(doc["hurst"]))
        if kind == "power_sum":
            return cls.power_sum(float(doc["lambda0"]), float(doc["alpha_inf"]),
                                 a=float(doc.get("a", 1.0)),
                                 b=float(doc.get("b", 1.0)))
        if kind == "power_ratio":
            return cls.power_ratio(float(doc["lambda0"]), float(doc["alpha_inf"]),
                                   a=float(doc.get("a", 1.0)))
        raise ModelError(f"unknown model kind {kind!r}")

    @classmethod
    def from_json(cls, text: str) -> "VarianceModel":
        return cls.from_dict(json.loads(text))

    def to_dict(self) -> dict:
        doc = {"kind": self.kind, "lambda0": self.lambda0,
               "alpha_inf": self.alpha_inf}
        if self.kind == "fbm":
            doc["hurst"] = self.hurst
        elif self.kind == "power_sum":
            doc.update(a=self.a, b=self.b)
        else:
            doc["a"] = self.a
        return doc

    # -- closed forms -------------------------------------------------------

    def sigma2(self, t):
        """Variance sigma^2(|t|); accepts scalars or arrays."""
        u = np.abs(np.asarray(t, dtype=float))
        if self.kind == "fbm":
            out = u ** (2.0 * self.hurst)
        elif self.kind == "power_sum":
            out = self.a * u ** (2.0 * self.lambda0) \
                + self.b * u ** (2.0 * self.alpha_inf)
        else:
            out = self.a * u ** (2.0 * self.lambda0) \
                / (1.0 + u ** (2.0 * (self.lambda0 - self.alpha_inf)))
        if np.ndim(t) == 0:
            return float(out)
        return out

    def sigma(self, t):
        return np.sqrt(self.sigma2(t))

    def covariance(self, s, t):
        """Cov(X(s), X(t)) induced by stationary increments."""
        return 0.5 * (self.sigma2(s) + self.sigma2(t) - self.sigma2(np.asarray(t) - np.asarray(s)))

    def increment_autocovariance(self, h: float, k):
        """Autocovariance at lag k of the step-h stationary increment sequence.

        Second difference of sigma^2 on the step grid; sigma^2(-h) is read as
        sigma^2(h), which stationarity of increments forces.
        """
        if h <= 0.0:
            raise ValueError("h must be positive")
        ka = np.asarray(k, dtype=float)
        out = 0.5 * (self.sigma2((ka + 1.0) * h)
                     - 2.0 * self.sigma2(ka * h)
                     + self.sigma2(np.abs(ka - 1.0) * h))
        if np.ndim(k) == 0:
            return float(out)
        return out


def _sigma2_fn(model) -> Callable:
    """Accept a VarianceModel or a bare sigma^2 callable (test hook)."""
    if callable(model) and not isinstance(model, VarianceModel):
        return model
    return model.sigma2


@dataclass(frozen=True)
class ConditionCReport:
    t_grid: np.ndarray
    values: np.ndarray
    limit_estimate: float
    passed: bool


def check_condition_C(model, epsilon: float = 0.5,
                      t_grid: Sequence[float] | None = None) -> ConditionCReport:
    """Probe whether sigma^2(t) |log t|^(1+eps) stays bounded as t -> 0.

    Pass rule: all values finite and the variation over the last quarter of
    the grid (the smallest t) is below 5% of (1 + overall max).  This flags
    the log-divergent counterexample while passing every power-law family.
    """
    if epsilon <= 0.0:
        raise ValueError("epsilon must be positive")
    if t_grid is None:
        t_grid = np.logspace(-1, -8, 29)
    t = np.asarray(t_grid, dtype=float)
    if t.size < 4 or np.any(t <= 0) or np.any(np.diff(t) >= 0):
        raise ValueError("t_grid must be >= 4 positive values decreasing toward 0")
    fn = _sigma2_fn(model)
    vals = np.asarray(fn(t), dtype=float) * np.abs(np.log(t)) ** (1.0 + epsilon)
    tail = vals[-max(1, t.size // 4):]
    passed = bool(np.all(np.isfinite(vals))
                  and (tail.max() - tail.min()) < 0.05 * (1.0 + vals.max()))
    return ConditionCReport(t_grid=t, values=vals,
                            limit_estimate=float(tail.mean()), passed=passed)


def estimate_rv_index(model, end: str,
                      x_grid: Sequence[float] | None = None) -> float:
    """Least-squares slope of log sigma(x) vs log x toward the chosen end.

    ``end`` is "zero" or "infinity"; the default grid spans three decades
    with 16 log-spaced points.
    """
    if end not in ("zero", "infinity"):
        raise ValueError("end must be 'zero' or 'infinity'")
    if x_grid is None:
        x_grid = np.logspace(-6, -3, 16) if end == "zero" else np.logspace(3, 6, 16)
    x = np.asarray(x_grid, dtype=float)
    if x.size < 4:
        raise ValueError("x_grid needs at least 4 points")
    fn = _sigma2_fn(model)
    sig = np.sqrt(np.asarray(fn(x), dtype=float))
    return loglog_slope(x, sig)


@dataclass(frozen=True)
class PotterReport:
    epsilon: float
    lower_exp: float
    upper_exp: float
    C_fitted: float
    max_ratio_excess: float
    passed: bool


def potter_check(model: VarianceModel, epsilon: float, a: float = 1.0,
                 t_grid: Sequence[float] | None = None,
                 x_grid: Sequence[float] | None = None) -> PotterReport:
    """Grid check of the two-sided ratio bound sigma(tx) <= C sigma(x) t^(l or u).

    With l = min(lambda-eps, alpha+eps) and u = max(alpha+eps, lambda+eps),
    the bound reads sigma(tx)/sigma(x) <= C max(t^l, t^u) for small x.  The
    fitted C is the grid supremum of the ratio; the check passes when that
    supremum is finite and stable under grid refinement.
    """
    lam, alp = model.lambda0, model.alpha_inf
    if not (0.0 < epsilon < lam):
        raise ValueError("need 0 < epsilon < lambda0")
    if a <= 0.0:
        raise ValueError("a must be positive")
    lo = min(lam - epsilon, alp + epsilon)
    up = max(alp + epsilon, lam + epsilon)

    def sup_ratio(tg, xg):
        t = np.asarray(tg, dtype=float)[:, None]
        x = np.asarray(xg, dtype=float)[None, :]
        bound = np.maximum(t ** lo, t ** up)
        return float(np.max(model.sigma(t * x) / (model.sigma(x) * bound)))

    if t_grid is None:
        t_grid = np.logspace(-3, 3, 61)
    if x_grid is None:
        x_grid = np.logspace(-6, math.log10(a), 41)
    c1 = sup_ratio(t_grid, x_grid)
    t2 = np.logspace(math.log10(min(t_grid)), math.log10(max(t_grid)),
                     2 * len(t_grid) - 1)
    x2 = np.logspace(math.log10(min(x_grid)), math.log10(max(x_grid)),
                     2 * len(x_grid) - 1)
    c2 = sup_ratio(t2, x2)
    passed = bool(np.isfinite(c1) and np.isfinite(c2)
                  and abs(c2 - c1) <= 0.1 * max(c1, 1e-12))
    return PotterReport(epsilon=epsilon, lower_exp=lo, upper_exp=up,
                        C_fitted=max(c1, c2),
                        max_ratio_excess=max(0.0, max(c1, c2) - 1.0),
                        passed=passed)
