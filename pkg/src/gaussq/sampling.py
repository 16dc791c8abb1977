"""Exact sampling of stationary-increment Gaussian paths on uniform grids.

The increment sequence is stationary with autocovariance given by the
second difference of the variance function, so one draw of the whole
sequence covers the grid; the path is anchored to zero at the grid origin
by subtracting the running sum there, which preserves joint stationarity
of the increments across the anchor.

Sampling is circulant-embedding (Davies-Harte) with a dense Cholesky
fallback for short sequences; negative embedding eigenvalues are clipped
and the clipped relative mass is reported, aborting above a hard ceiling.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .variance import VarianceModel

__all__ = [
    "GridSpec",
    "PathSample",
    "EmbeddingReport",
    "EmbeddingError",
    "embedding_spectrum",
    "sample_increments",
    "sample_path",
    "sample_path_with_report",
    "rng_from_key",
]

DENSE_THRESHOLD = 512
MASS_CEILING = 1e-6


class EmbeddingError(RuntimeError):
    """Circulant embedding exceeded the truncation budget."""


def rng_from_key(key) -> np.random.Generator:
    """Counter-based generator from an integer or tuple-of-ints key."""
    if isinstance(key, (tuple, list)):
        entropy = tuple(int(k) & 0xFFFFFFFF for k in key)
    else:
        entropy = int(key) & 0xFFFFFFFFFFFFFFFF
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(entropy)))


@dataclass(frozen=True)
class GridSpec:
    """Uniform grid t_k = (k - n_left) h, k = 0 .. n_left + n_right."""

    h: float
    n_left: int
    n_right: int

    def __post_init__(self):
        if self.h <= 0.0:
            raise ValueError("h must be positive")
        if self.n_left < 0 or self.n_right < 1:
            raise ValueError("need n_left >= 0 and n_right >= 1")

    @property
    def n_points(self) -> int:
        return self.n_left + self.n_right + 1

    def times(self) -> np.ndarray:
        return (np.arange(self.n_points) - self.n_left) * self.h


@dataclass(frozen=True)
class EmbeddingReport:
    embedding_size: int
    min_eigenvalue: float
    truncated_mass: float
    method: str  # "circulant" | "dense"

    def to_dict(self) -> dict:
        return {"embedding_size": self.embedding_size,
                "min_eigenvalue": self.min_eigenvalue,
                "truncated_mass": self.truncated_mass,
                "method": self.method}


@dataclass(frozen=True)
class PathSample:
    grid: GridSpec
    values: np.ndarray
    seed_trace: str


def embedding_spectrum(gamma) -> np.ndarray:
    """Eigenvalues of the circulant extension of an autocovariance sequence.

    ``gamma`` holds lags 0..m; the circular sequence is
    (g0, ..., gm, g_{m-1}, ..., g1) of length 2m.
    """
    g = np.asarray(gamma, dtype=float)
    m = g.size - 1
    if m < 1:
        raise ValueError("need at least lags 0 and 1")
    circ = np.concatenate([g, g[m - 1:0:-1]])
    w = np.fft.fft(circ)
    scale = max(float(np.abs(w).max()), 1e-300)
    if float(np.abs(w.imag).max()) > 1e-10 * scale:
        raise RuntimeError("embedding spectrum has non-real residue")
    return w.real


def _sample_circulant(gamma, rng, reps):
    w = embedding_spectrum(gamma)
    big = w.size
    m = big // 2
    min_eig = float(w.min())
    if min_eig < 0.0:
        mass = float(-w[w < 0].sum() / np.abs(w).sum())
    else:
        mass = 0.0
    wpos = np.clip(w, 0.0, None)
    z = np.empty((reps, big), dtype=complex)
    z[:, 0] = rng.standard_normal(reps)
    z[:, m] = rng.standard_normal(reps)
    if m > 1:
        u = rng.standard_normal((reps, m - 1))
        v = rng.standard_normal((reps, m - 1))
        z[:, 1:m] = (u + 1j * v) / np.sqrt(2.0)
        z[:, m + 1:] = z[:, 1:m][:, ::-1].conj()
    x = np.fft.ifft(np.sqrt(wpos) * z, axis=1)[:, :m].real * np.sqrt(big)
    rep = EmbeddingReport(embedding_size=big, min_eigenvalue=min_eig,
                          truncated_mass=mass, method="circulant")
    return x, rep


def _sample_dense(gamma, rng, reps, n):
    idx = np.abs(np.arange(n)[:, None] - np.arange(n)[None, :])
    cov = np.asarray(gamma)[idx]
    min_eig = float(np.linalg.eigvalsh(cov).min())
    chol = np.linalg.cholesky(cov + 1e-12 * cov[0, 0] * np.eye(n))
    x = rng.standard_normal((reps, n)) @ chol.T
    rep = EmbeddingReport(embedding_size=n, min_eigenvalue=min_eig,
                          truncated_mass=0.0, method="dense")
    return x, rep


def sample_increments(model: VarianceModel, h: float, n: int, seed,
                      reps: int | None = None, method: str = "auto",
                      dense_threshold: int = DENSE_THRESHOLD,
                      mass_ceiling: float = MASS_CEILING):
    """Draw the stationary Gaussian increment sequence on a step-h grid.

    Returns (values, EmbeddingReport); ``values`` has shape (n,) when
    ``reps`` is None, else (reps, n).  The draw is exact unless the
    circulant spectrum has negative eigenvalues, in which case they are
    clipped and the relative clipped mass is reported; mass above
    ``mass_ceiling`` aborts.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if method not in ("auto", "circulant", "dense"):
        raise ValueError(f"unknown method {method!r}")
    if method == "auto":
        method = "dense" if n <= dense_threshold else "circulant"
    single = reps is None
    r = 1 if single else int(reps)
    rng = rng_from_key(seed)
    gamma = model.increment_autocovariance(h, np.arange(n + 1))
    if method == "dense":
        x, rep = _sample_dense(gamma, rng, r, n)
    elif np.abs(gamma[1:]).max() <= 1e-15 * gamma[0]:
        # uncorrelated increments (Brownian case): the circulant spectrum is
        # flat, so draw the i.i.d. sequence directly instead of transforming
        x = np.sqrt(gamma[0]) * rng.standard_normal((r, n))
        rep = EmbeddingReport(embedding_size=2 * n,
                              min_eigenvalue=float(gamma[0]),
                              truncated_mass=0.0, method="circulant")
    else:
        x, rep = _sample_circulant(gamma, rng, r)
        if rep.truncated_mass > mass_ceiling:
            raise EmbeddingError(
                f"truncated mass {rep.truncated_mass:.3e} exceeds ceiling "
                f"{mass_ceiling:.1e} for model kind={model.kind} h={h} n={n}")
    return (x[0] if single else x), rep


def sample_path_with_report(model: VarianceModel, grid: GridSpec, seed,
                            **kwargs):
    """One path draw on the grid, anchored at the origin, plus its report."""
    inc, rep = sample_increments(model, grid.h, grid.n_left + grid.n_right,
                                 seed, **kwargs)
    x = np.concatenate([[0.0], np.cumsum(inc)])
    x -= x[grid.n_left]
    return PathSample(grid=grid, values=x, seed_trace=repr(seed)), rep


def sample_path(model: VarianceModel, grid: GridSpec, seed, **kwargs) -> PathSample:
    return sample_path_with_report(model, grid, seed, **kwargs)[0]
