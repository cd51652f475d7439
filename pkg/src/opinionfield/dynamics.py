"""Euler-Maruyama integration of the interacting opinion systems.

Two drift models are supported:

* ``"fj"`` — anchored dynamics with decay alpha(s) and a quadratic control
  push:  dx = [-alpha(s) x - alpha(s) F(x) + x u^2] ds + sigma x dB,
  where F is the kernel mean-field term;
* ``"kernel"`` — the plain interacting-particle system
  dx = -F(x) ds + sigma x dB (controls ignored).

Updates are simultaneous: every agent steps from the same pre-step state.
Brownian increments come from a counter-based generator keyed by
(seed, agent, step), so trajectories are bit-identical for any worker count.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from .kernel import KernelParams, mean_field_drift_all
from .rng import counter_normals
from .schedule import as_schedule

__all__ = [
    "SimConfig",
    "Trajectory",
    "PolicyFailure",
    "step",
    "simulate",
    "simulate_ensemble",
    "integrating_factor",
    "PicardResult",
    "picard_law_iteration",
    "write_trajectory_csv",
]


@dataclass
class SimConfig:
    """Everything a simulation run needs besides the policy and the graph."""

    n: int
    horizon: float
    eps: float
    sigma: float | np.ndarray = 0.0
    alpha: object = 0.0  # constant or (times, values) table
    kernel: KernelParams = field(default_factory=lambda: KernelParams(0.0))
    x0: np.ndarray | None = None
    seed: int = 0
    clamp: bool = False
    model: str = "fj"  # "fj" or "kernel"
    workers: int = 1

    def __post_init__(self) -> None:
        if self.n < 1:
            raise ValueError("n must be >= 1")
        if self.horizon <= 0 or self.eps <= 0:
            raise ValueError("horizon and step must be positive")
        if self.eps > self.horizon + 1e-15:
            raise ValueError("step eps must not exceed the horizon")
        if self.model not in ("fj", "kernel"):
            raise ValueError(f"unknown model {self.model!r}")
        if self.x0 is None:
            self.x0 = np.full(self.n, 0.5)
        self.x0 = np.asarray(self.x0, dtype=float)
        if self.x0.shape != (self.n,):
            raise ValueError(f"x0 must have shape ({self.n},)")
        if np.any((self.x0 < 0) | (self.x0 > 1)):
            raise ValueError("initial opinions must lie in [0, 1]")
        self.sigma = np.broadcast_to(np.asarray(self.sigma, dtype=float), (self.n,)).copy()
        if np.any(self.sigma < 0):
            raise ValueError("sigma must be nonnegative")
        self.alpha = as_schedule(self.alpha)
        if self.workers < 1:
            raise ValueError("workers must be >= 1")

    @property
    def n_steps(self) -> int:
        return int(round(self.horizon / self.eps))


@dataclass
class Trajectory:
    """Grid-indexed record of one simulated path for all agents."""

    times: np.ndarray        # (K+1,)
    opinions: np.ndarray     # (n, K+1)
    controls: np.ndarray     # (n, K+1)
    brownian: np.ndarray     # (n, K+1), B(0) = 0
    step_costs: np.ndarray   # (n, K+1)
    out_of_range: int = 0    # post-update exits from [0, 1] (counted even unclamped)

    def __post_init__(self) -> None:
        k = self.times.shape[0]
        for name in ("opinions", "controls", "brownian", "step_costs"):
            m = getattr(self, name)
            if m.shape[1] != k:
                raise ValueError(f"{name} has {m.shape[1]} columns, expected {k}")
        if np.any(self.brownian[:, 0] != 0.0):
            raise ValueError("Brownian paths must start at 0")
        if np.any(np.diff(self.times) <= 0):
            raise ValueError("times must be strictly increasing")

    @property
    def n(self) -> int:
        return self.opinions.shape[0]

    def terminal_opinions(self) -> np.ndarray:
        return self.opinions[:, -1]


class PolicyFailure(RuntimeError):
    """A control policy raised during simulation; carries the step index."""

    def __init__(self, step_index: int, cause: BaseException):
        super().__init__(f"policy failed at step {step_index}: {cause}")
        self.step_index = step_index
        self.cause = cause


def integrating_factor(sigma: float, brownian_value: float, s: float):
    """exp(-sigma B(s) + sigma^2 s / 2): strictly positive for all arguments."""
    return np.exp(-sigma * brownian_value + 0.5 * sigma**2 * s)


def _drift(cfg: SimConfig, x, u, s: float, frozen=None) -> np.ndarray:
    mf = mean_field_drift_all(cfg.kernel, x, frozen=frozen, workers=cfg.workers)
    if cfg.model == "kernel":
        return -mf
    a = cfg.alpha.value(s)
    return -a * x - a * mf + x * u**2


def step(x, brownian, u, cfg: SimConfig, dW, s: float = 0.0):
    """One simultaneous Euler-Maruyama update from the pre-step state x.

    ``dW`` is the vector of Brownian increments over the step, N(0, eps)
    per agent, supplied by the caller. ``brownian`` (the running B values)
    is accepted for signature parity with the control contexts; the update
    itself only uses the increments.
    """
    x = np.asarray(x, dtype=float)
    u = np.asarray(u, dtype=float)
    dW = np.asarray(dW, dtype=float)
    if not (x.shape == u.shape == dW.shape == (cfg.n,)):
        raise ValueError("state, control and noise vectors must all have length n")
    x_new = x + _drift(cfg, x, u, s) * cfg.eps + cfg.sigma * x * dW
    if cfg.clamp:
        x_new = np.clip(x_new, 0.0, 1.0)
    return x_new


def _run(cfg: SimConfig, policy, graph=None, frozen=None) -> Trajectory:
    from .cost import step_cost_matrix

    n, k_steps = cfg.n, cfg.n_steps
    times = np.arange(k_steps + 1) * cfg.eps
    draws = np.sqrt(cfg.eps) * counter_normals(cfg.seed, range(n), range(k_steps)).T
    brownian = np.zeros((n, k_steps + 1))
    np.cumsum(draws, axis=1, out=brownian[:, 1:])
    # integrate with the differences of the stored path, so the stored
    # Brownian values and the applied increments agree exactly
    dW = np.diff(brownian, axis=1)

    opinions = np.empty((n, k_steps + 1))
    controls = np.zeros((n, k_steps + 1))
    opinions[:, 0] = cfg.x0
    x = cfg.x0.copy()
    out_of_range = 0
    for k in range(k_steps + 1):
        try:
            u = np.broadcast_to(
                np.asarray(policy(k, times[k], x, brownian[:, k]), dtype=float), (n,)
            )
        except PolicyFailure:
            raise
        except Exception as exc:
            raise PolicyFailure(k, exc) from exc
        controls[:, k] = u
        if k == k_steps:
            break
        ref = None if frozen is None else frozen[:, k]
        drift = _drift(cfg, x, u, times[k], frozen=ref)
        x = x + drift * cfg.eps + cfg.sigma * x * dW[:, k]
        out_of_range += int(np.count_nonzero((x < 0.0) | (x > 1.0)))
        if cfg.clamp:
            x = np.clip(x, 0.0, 1.0)
        opinions[:, k + 1] = x

    step_costs = step_cost_matrix(graph, opinions, cfg.x0, controls)
    return Trajectory(times, opinions, controls, brownian, step_costs, out_of_range)


def simulate(cfg: SimConfig, policy, graph=None) -> Trajectory:
    """Integrate the configured system under a closed-loop policy.

    ``policy(k, s, x, brownian)`` returns the control vector applied on
    [s, s + eps); it is also evaluated at the terminal grid point so the
    control matrix covers the whole grid. ``graph`` feeds the per-step
    running costs (agents without a graph have no disagreement or
    stubbornness terms).
    """
    return _run(cfg, policy, graph=graph)


def simulate_ensemble(cfg: SimConfig, policy, paths: int, graph=None) -> list[Trajectory]:
    """Independent Monte-Carlo repetitions; path p reseeds with child_seed(seed, p)."""
    from .rng import child_seed

    out = []
    for p in range(paths):
        out.append(_run(replace(cfg, seed=child_seed(cfg.seed, p)), policy, graph=graph))
    return out


@dataclass
class PicardResult:
    trajectory: Trajectory
    distances: list[float]       # terminal-time W2 between successive law iterates
    sup_distances: list[float]   # sup over the grid of the same W2
    converged: bool
    iterations: int


def picard_law_iteration(cfg: SimConfig, policy, tol: float, max_iter: int,
                         graph=None) -> PicardResult:
    """Fixed-point iteration on the empirical law of the particle system.

    Starting from the constant-in-time law concentrated on x0, each sweep
    re-simulates every agent against the frozen opinion matrix of the
    previous sweep, reusing the same noise, and records the Wasserstein-2
    distance between successive terminal-time empirical laws. Stops when
    the distance drops below ``tol``; hitting ``max_iter`` first returns
    ``converged=False`` rather than raising.
    """
    from .measure import wasserstein2_1d

    if tol <= 0:
        raise ValueError("tol must be positive")
    if max_iter < 1:
        raise ValueError("max_iter must be >= 1")

    frozen = np.tile(cfg.x0[:, None], (1, cfg.n_steps + 1))
    prev = _run(cfg, policy, graph=graph, frozen=frozen)
    distances: list[float] = []
    sup_distances: list[float] = []
    for m in range(max_iter):
        cur = _run(cfg, policy, graph=graph, frozen=prev.opinions)
        distances.append(wasserstein2_1d(prev.terminal_opinions(), cur.terminal_opinions()))
        sup_distances.append(
            max(
                wasserstein2_1d(prev.opinions[:, k], cur.opinions[:, k])
                for k in range(cur.opinions.shape[1])
            )
        )
        prev = cur
        if distances[-1] < tol:
            return PicardResult(cur, distances, sup_distances, True, m + 1)
    return PicardResult(prev, distances, sup_distances, False, max_iter)


def write_trajectory_csv(traj: Trajectory, path) -> None:
    """Step-major CSV: step,time,agent,opinion,control,brownian,step_cost."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        fh.write("step,time,agent,opinion,control,brownian,step_cost\n")
        for k in range(traj.times.size):
            t = repr(float(traj.times[k]))
            for i in range(traj.n):
                row = (
                    repr(float(traj.opinions[i, k])),
                    repr(float(traj.controls[i, k])),
                    repr(float(traj.brownian[i, k])),
                    repr(float(traj.step_costs[i, k])),
                )
                fh.write(f"{k},{t},{i},{','.join(row)}\n")
