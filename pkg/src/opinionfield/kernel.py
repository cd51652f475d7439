"""Compactly supported interaction kernel and its mean-field drift.

The kernel acts on the signed opinion gap ``beta = x_i - x_j``. It is a
bump function with scale ``theta1`` and range offset ``theta2``:

    phi(beta) = theta1 * exp(-0.01 / (1 - (beta - theta2)**2))

restricted to ``beta > 0`` (influence is one-sided: only agents below pull)
and to ``|beta - theta2| < 1``, outside of which the exponent would change
sign and diverge; there the kernel is defined to be exactly zero, which is
also its continuous limit from inside the support.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "KernelParams",
    "phi",
    "dphi_dxi",
    "d2phi_dxi2",
    "mean_field_drift",
]


@dataclass(frozen=True)
class KernelParams:
    """Interaction kernel parameters: theta1 = scale (>= 0), theta2 = range."""

    theta1: float
    theta2: float = 0.0

    def __post_init__(self) -> None:
        if self.theta1 < 0:
            raise ValueError(f"kernel scale theta1 must be >= 0, got {self.theta1}")


def _support_mask(params: KernelParams, beta: np.ndarray) -> np.ndarray:
    xi = beta - params.theta2
    return (beta > 0.0) & (np.abs(xi) < 1.0)


def _eval_on_support(params: KernelParams, beta, func):
    """Evaluate func on the kernel support, zero elsewhere (scalar or array)."""
    arr = np.asarray(beta, dtype=float)
    scalar = arr.ndim == 0
    arr = np.atleast_1d(arr)
    out = np.zeros_like(arr)
    mask = _support_mask(params, arr)
    if mask.any():
        out[mask] = func(arr[mask] - params.theta2)
    if scalar:
        return float(out[0])
    return out

def phi(params: KernelParams, beta):
    """Kernel value at signed gap beta; zero for beta <= 0 and off-support."""

    def _inner(xi):
        return params.theta1 * np.exp(-0.01 / (1.0 - xi**2))

    return _eval_on_support(params, beta, _inner)


def dphi_dxi(params: KernelParams, xi_opinion, xj_opinion):
    """d phi / d x_i evaluated at beta = x_i - x_j (zero off-support).

    Closed form on the support, with xi = beta - theta2 and h = 1 - xi**2:

        -0.02 * theta1 * exp(-0.01/h) * h**-2 * xi
    """

    def _inner(xi):
        h = 1.0 - xi**2
        return -0.02 * params.theta1 * np.exp(-0.01 / h) * xi / h**2

    beta = np.asarray(xi_opinion, dtype=float) - np.asarray(xj_opinion, dtype=float)
    return _eval_on_support(params, beta, _inner)


def d2phi_dxi2(params: KernelParams, xi_opinion, xj_opinion):
    """d^2 phi / d x_i^2 at beta = x_i - x_j (zero off-support).

    Differentiating dphi_dxi once more gives, with xi = beta - theta2 and
    h = 1 - xi**2:

        -0.02 * theta1 * exp(-0.01/h) * (h**-2 + 4 xi**2 h**-3 - 0.02 xi**2 h**-4)
    """

    def _inner(xi):
        h = 1.0 - xi**2
        bracket = 1.0 / h**2 + 4.0 * xi**2 / h**3 - 0.02 * xi**2 / h**4
        return -0.02 * params.theta1 * np.exp(-0.01 / h) * bracket

    beta = np.asarray(xi_opinion, dtype=float) - np.asarray(xj_opinion, dtype=float)
    return _eval_on_support(params, beta, _inner)


def mean_field_drift(params: KernelParams, i: int, x) -> float:
    """Empirical mean-field interaction felt by agent i.

    Returns (1/n) * sum_j phi(x_i - x_j) * (x_i - x_j) over the whole
    population (the j = i term vanishes). The negative of this quantity,
    scaled by the decay alpha(s), enters the drift of the controlled
    opinion dynamics.
    """
    x = np.asarray(x, dtype=float)
    if x.ndim != 1 or x.size == 0:
        raise ValueError("opinion vector must be one-dimensional and non-empty")
    if not 0 <= i < x.size:
        raise ValueError(f"agent index {i} out of range for n={x.size}")
    diffs = x[i] - x
    return float(np.mean(phi(params, diffs) * diffs))


def mean_field_drift_all(params: KernelParams, x, frozen=None, workers: int = 1):
    """Mean-field drift for every agent at once.

    ``frozen`` optionally supplies the opinions the population is measured
    against (the law the agents see); defaults to ``x`` itself. Chunking by
    ``workers`` never changes the result: each agent's row sum is computed
    independently.
    """
    x = np.asarray(x, dtype=float)
    n = x.size
    if params.theta1 == 0.0:
        return np.zeros(n)
    ref = x if frozen is None else np.asarray(frozen, dtype=float)

    def _rows(sl: slice) -> np.ndarray:
        diffs = x[sl, None] - ref[None, :]
        return np.mean(phi(params, diffs) * diffs, axis=1)

    if workers <= 1 or n < 2 * workers:
        return _rows(slice(0, n))

    from concurrent.futures import ThreadPoolExecutor

    bounds = np.linspace(0, n, workers + 1).astype(int)
    chunks = [slice(a, b) for a, b in zip(bounds[:-1], bounds[1:]) if b > a]
    out = np.empty(n)
    with ThreadPoolExecutor(max_workers=workers) as pool:
        for sl, res in zip(chunks, pool.map(_rows, chunks)):
            out[sl] = res
    return out
