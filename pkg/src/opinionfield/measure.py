"""Empirical-law diagnostics: exact 1-d Wasserstein-2 and Gaussian KDE."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "EmpiricalMeasure",
    "wasserstein2_1d",
    "kde",
    "silverman_bandwidth",
    "write_kde_csv",
]

_SQRT_TWO_PI = np.sqrt(2.0 * np.pi)


@dataclass(frozen=True)
class EmpiricalMeasure:
    """Uniformly weighted sample multiset."""

    samples: np.ndarray

    def __post_init__(self) -> None:
        s = np.asarray(self.samples, dtype=float)
        if s.ndim != 1 or s.size == 0:
            raise ValueError("an empirical measure needs a non-empty 1-d sample set")
        if not np.all(np.isfinite(s)):
            raise ValueError("samples must be finite")
        object.__setattr__(self, "samples", s)

    @property
    def size(self) -> int:
        return self.samples.size


def _samples(obj) -> np.ndarray:
    if isinstance(obj, EmpiricalMeasure):
        return obj.samples
    return np.asarray(obj, dtype=float)


def wasserstein2_1d(a, b) -> float:
    """Exact W2 between equal-size empirical measures via the sorted coupling.

    In one dimension the monotone (sorted) pairing is the optimal transport
    plan for the quadratic cost, so

        W2 = sqrt( (1/m) * sum_k (a_(k) - b_(k))^2 ).
    """
    xa, xb = _samples(a), _samples(b)
    if xa.size != xb.size:
        raise ValueError(f"sample counts differ: {xa.size} != {xb.size}; resample first")
    if xa.size == 0:
        raise ValueError("empty sample sets")
    return float(np.sqrt(np.mean((np.sort(xa) - np.sort(xb)) ** 2)))


def silverman_bandwidth(samples) -> float:
    """Silverman's rule of thumb: 1.06 * std * m^(-1/5)."""
    s = _samples(samples)
    if s.size < 2:
        raise ValueError("bandwidth rule needs at least two samples")
    sd = float(s.std(ddof=1))
    if sd == 0.0:
        raise ValueError("degenerate sample set: zero variance, pass a bandwidth explicitly")
    return 1.06 * sd * s.size ** (-0.2)


def kde(samples, bandwidth: float | None = None, grid=None) -> np.ndarray:
    """Gaussian kernel density estimate on a grid.

    f(x) = (1 / (m h)) * sum_k N((x - x_k) / h) with the standard normal
    density N. The default bandwidth is Silverman's rule.
    """
    s = _samples(samples)
    if s.size == 0:
        raise ValueError("need at least one sample")
    h = silverman_bandwidth(s) if bandwidth is None else float(bandwidth)
    if h <= 0:
        raise ValueError(f"bandwidth must be positive, got {h}")
    if grid is None:
        lo, hi = s.min() - 3 * h, s.max() + 3 * h
        grid = np.linspace(lo, hi, 201)
    g = np.asarray(grid, dtype=float)
    z = (g[:, None] - s[None, :]) / h
    return np.exp(-0.5 * z**2).sum(axis=1) / (s.size * h * _SQRT_TWO_PI)


def write_kde_csv(time: float, grid, densities, path) -> None:
    """CSV snapshot: time,grid_x,density."""
    g = np.asarray(grid, dtype=float)
    d = np.asarray(densities, dtype=float)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        fh.write("time,grid_x,density\n")
        t = repr(float(time))
        for x, y in zip(g, d):
            fh.write(f"{t},{float(x)!r},{float(y)!r}\n")
