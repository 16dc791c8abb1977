"""Seeded Monte Carlo experiments for the traffic-limit behavior.

All experiments share one vectorized engine: sample a batch of increment
sequences covering [-S, t_max * delta(c)] at step h = delta(c)/points_per_unit,
anchor at zero, take the lookback supremum for the initial workload, run
the forward reflection, and read the rescaled marginals
Q(delta(c) t) / sigma(delta(c)) at the requested time points.

The reference law (the unit-rate queue fed by fractional Brownian motion)
has no closed form except in the Brownian case, so it is simulated with
the same engine at matched resolution; comparing simulation to simulation
cancels first-order discretization bias.

Replication streams are keyed by (master seed, domain, cell index, chunk
index) through a counter-based generator, so reports are bit-identical
across runs and safe to parallelize by chunk.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .sampling import sample_increments
from .scaling import solve_delta
from .stats import dkw_threshold, ks_two_sample
from .variance import VarianceModel

__all__ = [
    "ExperimentConfig",
    "ConvergenceReport",
    "ExperimentError",
    "WorkloadMarginals",
    "rescaled_workload_samples",
    "reference_fbm_queue_samples",
    "rescaled_input_samples",
    "run_workload_flt",
    "run_input_flt",
    "run_omega_gamma_decay",
    "run_modulus_diagnostic",
    "DecayReport",
    "ModulusReport",
]

# stream-domain tags for seed derivation
_DOM_WORKLOAD = 0
_DOM_REFERENCE = 1
_DOM_INPUT = 2
_DOM_INPUT_REF = 3
_DOM_DECAY = 4
_DOM_MODULUS = 5

_CHUNK_ELEMENTS = 1 << 24  # cap on reps * embedding_size per sampling call

KS_ALPHA = 0.01
MONOTONE_SLACK = 0.02
ASYMPTOTIC_INFLATION = 1.5
MAX_TRUNCATION_RATE = 0.05


class ExperimentError(RuntimeError):
    """An experiment run violated one of its own validity gates."""


def _key(master: int, domain: int, cell: int, chunk: int) -> tuple:
    return (int(master) & 0xFFFFFFFF, domain, cell, chunk)


def _chunks(total: int, n_grid: int):
    size = max(1, min(total, _CHUNK_ELEMENTS // max(1, 2 * n_grid)))
    start, idx = 0, 0
    while start < total:
        cnt = min(size, total - start)
        yield idx, start, cnt
        start += cnt
        idx += 1


@dataclass(frozen=True)
class ExperimentConfig:
    model: VarianceModel
    regime: str                      # "heavy" (c -> 0) or "light" (c -> inf)
    c_values: tuple
    time_points: tuple               # rescaled times, must include 0
    replications: int = 2000
    points_per_unit: int = 16        # grid steps per rescaled time unit
    kappa: float = 30.0              # lookback multiplier
    gamma: float | None = None       # growth exponent for decay diagnostics
    master_seed: int = 0

    def __post_init__(self):
        if self.regime not in ("heavy", "light"):
            raise ValueError("regime must be 'heavy' or 'light'")
        cs = tuple(float(c) for c in self.c_values)
        if not cs or any(c <= 0 for c in cs):
            raise ValueError("c_values must be positive")
        ordered = all(a >= b for a, b in zip(cs, cs[1:])) if self.regime == "heavy" \
            else all(a <= b for a, b in zip(cs, cs[1:]))
        if not ordered:
            raise ValueError("c_values must be sorted toward the regime limit")
        tps = tuple(float(t) for t in self.time_points)
        if 0.0 not in tps or any(t < 0 for t in tps):
            raise ValueError("time_points must be nonnegative and include 0")
        if self.points_per_unit < 16:
            raise ValueError("points_per_unit must be >= 16")
        if self.replications < 1 or self.kappa <= 0:
            raise ValueError("bad replications or kappa")
        object.__setattr__(self, "c_values", cs)
        object.__setattr__(self, "time_points", tps)

    @classmethod
    def from_dict(cls, doc: dict) -> "ExperimentConfig":
        return cls(model=VarianceModel.from_dict(doc["model"]),
                   regime=doc["regime"],
                   c_values=tuple(doc["c_values"]),
                   time_points=tuple(doc["time_points"]),
                   replications=int(doc.get("replications", 2000)),
                   points_per_unit=int(doc.get("points_per_unit", 16)),
                   kappa=float(doc.get("kappa", 30.0)),
                   gamma=doc.get("gamma"),
                   master_seed=int(doc.get("master_seed", 0)))

    @classmethod
    def from_json(cls, text: str) -> "ExperimentConfig":
        return cls.from_dict(json.loads(text))


@dataclass(frozen=True)
class WorkloadMarginals:
    """Rescaled workload marginals for one (model, c) cell."""

    time_points: tuple
    samples: np.ndarray      # (replications, n_time_points)
    increment: np.ndarray    # Q(t_max) - Q(0), rescaled
    delta: float
    truncation_rate: float
    truncated_mass: float


def rescaled_workload_samples(model: VarianceModel, c: float,
                              time_points: Sequence[float],
                              replications: int, points_per_unit: int,
                              kappa: float, master_seed: int,
                              domain: int = _DOM_WORKLOAD,
                              cell: int = 0) -> WorkloadMarginals:
    """Monte Carlo draws of Q(delta(c) t) / sigma(delta(c)) at the given t.

    The lookback horizon is kappa * delta(c) * (1 + t_max) and the grid
    step delta(c)/points_per_unit, keeping both comparable across c.
    """
    sol = solve_delta(model, c)
    if abs(sol.residual) > 1e-10:
        raise ExperimentError("normalizing identity violated by the solver")
    d = sol.delta
    ppu = points_per_unit
    h = d / ppu
    tps = [float(t) for t in time_points]
    t_max = max(tps)
    n_left = int(round(kappa * ppu * (1.0 + t_max)))
    n_right = max(1, int(round(t_max * ppu)))
    n = n_left + n_right
    idx = np.array([int(round(t * ppu)) for t in tps])
    s_horizon = n_left * h
    t_model = (np.arange(n + 1) - n_left) * h
    left_t = t_model[:n_left + 1]
    norm = model.sigma(d)

    out = np.empty((replications, len(tps)))
    incr = np.empty(replications)
    trunc = 0
    mass = 0.0
    for ci, start, cnt in _chunks(replications, n):
        inc, rep = sample_increments(model, h, n,
                                     _key(master_seed, domain, cell, ci),
                                     reps=cnt)
        mass = max(mass, rep.truncated_mass)
        x = np.concatenate([np.zeros((cnt, 1)), np.cumsum(inc, axis=1)], axis=1)
        x -= x[:, n_left:n_left + 1]
        cand = -x[:, :n_left + 1] + c * left_t
        q0 = cand.max(axis=1)
        arg = cand.argmax(axis=1)
        trunc += int(np.sum(left_t[arg] < -0.9 * s_horizon))
        y = x[:, n_left:] - c * t_model[n_left:]
        q = np.empty((cnt, n_right + 1))
        q[:, 0] = q0
        m = np.maximum.accumulate(-q0[:, None] - y[:, 1:], axis=1)
        q[:, 1:] = q0[:, None] + y[:, 1:] + np.maximum(0.0, m)
        out[start:start + cnt] = q[:, idx] / norm
        incr[start:start + cnt] = (q[:, n_right] - q0) / norm
    return WorkloadMarginals(time_points=tuple(tps), samples=out,
                             increment=incr, delta=d,
                             truncation_rate=trunc / replications,
                             truncated_mass=mass)


def reference_fbm_queue_samples(H: float, time_points: Sequence[float],
                                replications: int, points_per_unit: int,
                                kappa: float, seed: int) -> WorkloadMarginals:
    """The limiting unit-rate fBm queue, simulated at matched resolution."""
    if not (0.0 < H < 1.0):
        raise ValueError("H must lie strictly in (0, 1)")
    return rescaled_workload_samples(VarianceModel.fbm(H), 1.0, time_points,
                                     replications, points_per_unit, kappa,
                                     seed, domain=_DOM_REFERENCE)


def rescaled_input_samples(model: VarianceModel, c: float,
                           time_points: Sequence[float], replications: int,
                           points_per_unit: int, master_seed: int,
                           domain: int = _DOM_INPUT, cell: int = 0):
    """Marginals of X(delta(c) t) / sigma(delta(c)) at nonnegative t."""
    d = solve_delta(model, c).delta
    ppu = points_per_unit
    h = d / ppu
    tps = [float(t) for t in time_points]
    n = max(1, int(round(max(tps) * ppu)))
    idx = np.array([int(round(t * ppu)) for t in tps])
    norm = model.sigma(d)
    out = np.empty((replications, len(tps)))
    for ci, start, cnt in _chunks(replications, n):
        inc, _ = sample_increments(model, h, n,
                                   _key(master_seed, domain, cell, ci),
                                   reps=cnt)
        x = np.concatenate([np.zeros((cnt, 1)), np.cumsum(inc, axis=1)], axis=1)
        out[start:start + cnt] = x[:, idx] / norm
    return out, d


@dataclass(frozen=True)
class ConvergenceReport:
    regime: str
    kind: str                        # "workload" or "input"
    per_c: list
    reference_summary: dict
    verdict: bool

    def to_dict(self) -> dict:
        return {"regime": self.regime, "kind": self.kind,
                "per_c": self.per_c,
                "reference_summary": self.reference_summary,
                "verdict": self.verdict}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    def csv_rows(self):
        """Rows (c, delta, t, ks, threshold, pass) for the delimited output."""
        rows = []
        for entry in self.per_c:
            thr = entry["threshold"]
            for t_label, ks in entry["ks_by_timepoint"].items():
                rows.append((entry["c"], entry["delta"], t_label, ks, thr,
                             ks <= thr))
        return rows


def _verdict(per_c, time_labels) -> bool:
    """Final c passes all thresholds and KS is nonincreasing up to slack."""
    if not per_c:
        return False
    last = per_c[-1]
    if any(ks > last["threshold"] for ks in last["ks_by_timepoint"].values()):
        return False
    for label in time_labels:
        seq = [e["ks_by_timepoint"][label] for e in per_c]
        if any(b > a + MONOTONE_SLACK for a, b in zip(seq, seq[1:])):
            return False
    return True


def run_workload_flt(config: ExperimentConfig) -> ConvergenceReport:
    """Workload convergence experiment toward the limiting fBm queue.

    The reference Hurst index is alpha (heavy traffic) or lambda (light
    traffic); each c contributes marginal KS statistics per time point plus
    the (0, t_max) increment statistic.  Runs with boundary-hugging
    lookback suprema in more than 5% of replications abort.
    """
    model = config.model
    H = model.alpha_inf if config.regime == "heavy" else model.lambda0
    n_rep = config.replications
    ref = reference_fbm_queue_samples(H, config.time_points, n_rep,
                                      config.points_per_unit, config.kappa,
                                      config.master_seed)
    base_thr = dkw_threshold(n_rep, n_rep, KS_ALPHA)
    thr = base_thr if model.kind == "fbm" else ASYMPTOTIC_INFLATION * base_thr
    labels = [f"{t:g}" for t in config.time_points] + ["increment"]
    per_c = []
    for i, c in enumerate(config.c_values):
        res = rescaled_workload_samples(model, c, config.time_points, n_rep,
                                        config.points_per_unit, config.kappa,
                                        config.master_seed, cell=i)
        if res.truncation_rate > MAX_TRUNCATION_RATE:
            raise ExperimentError(
                f"truncation rate {res.truncation_rate:.1%} at c={c}; "
                "increase kappa to extend the lookback window")
        ks = {f"{t:g}": ks_two_sample(res.samples[:, j], ref.samples[:, j])
              for j, t in enumerate(config.time_points)}
        ks["increment"] = ks_two_sample(res.increment, ref.increment)
        per_c.append({"c": c, "delta": res.delta, "ks_by_timepoint": ks,
                      "threshold": thr,
                      "truncation_rate": res.truncation_rate,
                      "embedding_truncated_mass": res.truncated_mass})
    summary = {"H_used": H,
               "sample_moments": {
                   "mean": ref.samples.mean(axis=0).tolist(),
                   "var": ref.samples.var(axis=0).tolist()}}
    return ConvergenceReport(regime=config.regime, kind="workload",
                             per_c=per_c, reference_summary=summary,
                             verdict=_verdict(per_c, labels))


def run_input_flt(config: ExperimentConfig) -> ConvergenceReport:
    """Finite-dimensional convergence of the rescaled input process.

    Compares marginals of X(delta(c) t)/sigma(delta(c)) and the increment
    over the two largest time points against fractional Brownian motion
    with the regime's Hurst index, and re-asserts that the subtracted
    drift c delta(c) t / sigma(delta(c)) equals t to within 1e-10.
    """
    model = config.model
    H = model.alpha_inf if config.regime == "heavy" else model.lambda0
    n_rep = config.replications
    tps = config.time_points
    ref, _ = rescaled_input_samples(VarianceModel.fbm(H), 1.0, tps, n_rep,
                                    config.points_per_unit,
                                    config.master_seed, domain=_DOM_INPUT_REF)
    base_thr = dkw_threshold(n_rep, n_rep, KS_ALPHA)
    thr = base_thr if model.kind == "fbm" else ASYMPTOTIC_INFLATION * base_thr
    positive = sorted(t for t in tps if t > 0)
    pair = tuple(positive[-2:]) if len(positive) >= 2 else None
    labels = [f"{t:g}" for t in tps if t > 0]
    per_c = []
    for i, c in enumerate(config.c_values):
        samples, d = rescaled_input_samples(model, c, tps, n_rep,
                                            config.points_per_unit,
                                            config.master_seed, cell=i)
        drift_err = max(abs(c * d * t / model.sigma(d) - t) for t in tps)
        if drift_err > 1e-10:
            raise ExperimentError("drift identity violated")
        ks = {}
        for j, t in enumerate(tps):
            if t == 0.0:
                continue  # both marginals are identically zero at t = 0
            ks[f"{t:g}"] = ks_two_sample(samples[:, j], ref[:, j])
        if pair is not None:
            j0, j1 = tps.index(pair[0]), tps.index(pair[1])
            ks["increment"] = ks_two_sample(samples[:, j1] - samples[:, j0],
                                            ref[:, j1] - ref[:, j0])
        per_c.append({"c": c, "delta": d, "ks_by_timepoint": ks,
                      "threshold": thr, "truncation_rate": 0.0,
                      "embedding_truncated_mass": 0.0,
                      "drift_error": drift_err})
    if pair is not None:
        labels.append("increment")
    summary = {"H_used": H,
               "sample_moments": {"mean": ref.mean(axis=0).tolist(),
                                  "var": ref.var(axis=0).tolist()}}
    return ConvergenceReport(regime=config.regime, kind="input",
                             per_c=per_c, reference_summary=summary,
                             verdict=_verdict(per_c, labels))


@dataclass(frozen=True)
class DecayReport:
    gamma: float
    eta: float
    T_grid: tuple
    p_values: tuple

    def to_dict(self) -> dict:
        return {"gamma": self.gamma, "eta": self.eta,
                "T_grid": list(self.T_grid), "p_values": list(self.p_values)}


def run_omega_gamma_decay(model: VarianceModel, regime: str, c: float,
                          gamma: float, T_grid: Sequence[float],
                          replications: int, seed: int, eta: float = 0.5,
                          points_per_unit: int = 16,
                          window_factor: float = 2.0) -> DecayReport:
    """Tail-decay probe of the rescaled input under a polynomial envelope.

    Estimates p_T = P(sup_{|t| >= T} |X^{(c)}(t)| / (1 + |t|^gamma) >= eta)
    on a window [-W, W] with W = window_factor * max(T_grid).  Decay in T
    is expected only when gamma exceeds max(lambda, alpha); smaller gamma
    is the negative control.
    """
    if regime not in ("heavy", "light"):
        raise ValueError("regime must be 'heavy' or 'light'")
    if gamma <= 0 or eta <= 0:
        raise ValueError("gamma and eta must be positive")
    ts = sorted(float(t) for t in T_grid)
    if not ts or ts[0] <= 0:
        raise ValueError("T_grid must be positive")
    w = window_factor * ts[-1]
    ppu = points_per_unit
    d = solve_delta(model, c).delta
    h = d / ppu
    n_side = int(round(w * ppu))
    n = 2 * n_side
    t_resc = (np.arange(n + 1) - n_side) / ppu
    norm = model.sigma(d)
    env = 1.0 + np.abs(t_resc) ** gamma
    counts = np.zeros(len(ts))
    for ci, start, cnt in _chunks(replications, n):
        inc, _ = sample_increments(model, h, n,
                                   _key(seed, _DOM_DECAY, 0, ci), reps=cnt)
        x = np.concatenate([np.zeros((cnt, 1)), np.cumsum(inc, axis=1)], axis=1)
        x -= x[:, n_side:n_side + 1]
        ratio = np.abs(x) / (norm * env)
        for j, T in enumerate(ts):
            mask = np.abs(t_resc) >= T
            counts[j] += np.sum(ratio[:, mask].max(axis=1) >= eta)
    return DecayReport(gamma=gamma, eta=eta, T_grid=tuple(ts),
                       p_values=tuple(counts / replications))


@dataclass(frozen=True)
class ModulusReport:
    eta: float
    T: float
    zeta_grid: tuple
    p_values: tuple
    entropy_bounds: tuple

    def to_dict(self) -> dict:
        return {"eta": self.eta, "T": self.T,
                "zeta_grid": list(self.zeta_grid),
                "p_values": list(self.p_values),
                "entropy_bounds": list(self.entropy_bounds)}


def run_modulus_diagnostic(model: VarianceModel, c: float,
                           zeta_grid: Sequence[float], eta: float,
                           replications: int, seed: int, T: float = 1.0,
                           points_per_unit: int = 256) -> ModulusReport:
    """Oscillation probe: P(sup_{|t-s| <= zeta} |X^{(c)}(t)-X^{(c)}(s)| >= eta).

    Reported alongside the entropy-integral bound at radius 2 zeta^lambda
    (capped at the d-diameter), the theoretical companion of the modulus
    probability.
    """
    from .entropy import modulus_bound

    zs = list(zeta_grid)
    if any(b >= a for a, b in zip(zs, zs[1:])):
        raise ValueError("zeta_grid must be decreasing")
    if any(z <= 0 or z > T for z in zs):
        raise ValueError("zeta values must lie in (0, T]")
    ppu = points_per_unit
    d = solve_delta(model, c).delta
    h = d / ppu
    n = int(round(T * ppu))
    norm = model.sigma(d)
    w_max = max(1, int(round(zs[0] * ppu)))
    lag_counts = np.zeros((len(zs),))
    widths = [max(1, int(round(z * ppu))) for z in zs]
    for ci, start, cnt in _chunks(replications, n):
        inc, _ = sample_increments(model, h, n,
                                   _key(seed, _DOM_MODULUS, 0, ci), reps=cnt)
        x = np.concatenate([np.zeros((cnt, 1)), np.cumsum(inc, axis=1)],
                           axis=1) / norm
        lag_max = np.empty((cnt, w_max))
        for lag in range(1, w_max + 1):
            lag_max[:, lag - 1] = np.abs(x[:, lag:] - x[:, :-lag]).max(axis=1)
        run_max = np.maximum.accumulate(lag_max, axis=1)
        for j, wdt in enumerate(widths):
            lag_counts[j] += np.sum(run_max[:, wdt - 1] >= eta)
    bounds = tuple(modulus_bound(model, T,
                                 min(2.0 * z ** model.lambda0, model.sigma(T)))
                   for z in zs)
    return ModulusReport(eta=eta, T=T, zeta_grid=tuple(zs),
                         p_values=tuple(lag_counts / replications),
                         entropy_bounds=bounds)
