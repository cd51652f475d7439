"""Quadratic running cost, path totals, and directional-derivative checks.

The running cost of agent i at a grid point is

    1/2 [ sum_{j in eta_i} w_ij (x_i - x_j)^2 + k_i (x_i - x0_i)^2 + u_i^2 ]

and path totals integrate it with a left-endpoint Riemann sum, matching the
Euler-Maruyama convention that controls are decided at the left endpoint.

The variational process and the Gateaux derivative are verified in the
frozen-law regime: the other agents' paths and the interaction term felt by
the probed agent are held fixed, which removes the law-derivative terms
exactly and leaves dV = [(-alpha + u^2) V + 2 x u v] ds + sigma V dB.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .graph import Graph
from .kernel import mean_field_drift_all
from .rng import child_seed

__all__ = [
    "CostReport",
    "running_cost",
    "total_cost",
    "variational_step",
    "gateaux_derivative",
]


@dataclass
class CostReport:
    """Per-agent Monte-Carlo cost summary; total = (disagreement + stubbornness + effort) / 2."""

    agent: int
    total: float
    disagreement: float
    stubbornness: float
    effort: float
    paths: int
    standard_error: float

    def to_dict(self) -> dict:
        return {
            "agent": self.agent,
            "total": self.total,
            "disagreement": self.disagreement,
            "stubbornness": self.stubbornness,
            "effort": self.effort,
            "paths": self.paths,
            "standard_error": self.standard_error,
        }


def _components(graph: Graph | None, x, x0, u, i: int) -> tuple[float, float, float]:
    x = np.asarray(x, dtype=float)
    u = np.asarray(u, dtype=float)
    x0 = np.asarray(x0, dtype=float)
    if graph is None:
        disagreement, stub = 0.0, 0.0
    else:
        idx = graph.neighbors(i)
        w = graph.neighbor_weights(i)
        disagreement = float(np.dot(w, (x[i] - x[idx]) ** 2))
        stub = float(graph.stubbornness[i] * (x[i] - x0[i]) ** 2)
    return disagreement, stub, float(u[i] ** 2)


def running_cost(graph: Graph | None, x, x0, u, i: int) -> float:
    """Instantaneous cost of agent i at one grid point."""
    d, s, e = _components(graph, x, x0, u, i)
    return 0.5 * (d + s + e)


def step_cost_matrix(graph: Graph | None, opinions, x0, controls) -> np.ndarray:
    """running_cost for every (agent, grid point); vectorized over the grid."""
    opinions = np.asarray(opinions, dtype=float)
    controls = np.asarray(controls, dtype=float)
    x0 = np.asarray(x0, dtype=float)
    effort = controls**2
    if graph is None:
        return 0.5 * effort
    w = graph.dense_weights()
    # sum_j w_ij (x_i - x_j)^2 = x_i^2 rowsum - 2 x_i (Wx)_i + (W x^2)_i
    rowsum = w.sum(axis=1)[:, None]
    wx = w @ opinions
    wx2 = w @ opinions**2
    disagreement = opinions**2 * rowsum - 2.0 * opinions * wx + wx2
    stub = graph.stubbornness[:, None] * (opinions - x0[:, None]) ** 2
    return 0.5 * (disagreement + stub + effort)


def total_cost(trajectories, graph: Graph | None, i: int) -> CostReport:
    """Left-endpoint time integral of the running cost, averaged over paths."""
    trajs = list(trajectories)
    if not trajs:
        raise ValueError("need at least one trajectory")
    shape = trajs[0].opinions.shape
    totals, dis, stu, eff = [], [], [], []
    for traj in trajs:
        if traj.opinions.shape != shape:
            raise ValueError("trajectories must share a common shape")
        eps = float(traj.times[1] - traj.times[0])
        d_sum = s_sum = e_sum = 0.0
        x0 = traj.opinions[:, 0]
        for k in range(traj.times.size - 1):
            d, s, e = _components(graph, traj.opinions[:, k], x0, traj.controls[:, k], i)
            d_sum += d * eps
            s_sum += s * eps
            e_sum += e * eps
        dis.append(d_sum)
        stu.append(s_sum)
        eff.append(e_sum)
        totals.append(0.5 * (d_sum + s_sum + e_sum))
    totals = np.asarray(totals)
    se = float(totals.std(ddof=1) / np.sqrt(len(totals))) if len(totals) > 1 else 0.0
    return CostReport(
        agent=i,
        total=float(totals.mean()),
        disagreement=float(np.mean(dis)),
        stubbornness=float(np.mean(stu)),
        effort=float(np.mean(eff)),
        paths=len(totals),
        standard_error=se,
    )


def variational_step(v, x, u, vdir, cfg, dW, s: float = 0.0, sigma: float | None = None):
    """One Euler-Maruyama step of the frozen-law variational process.

    dV = [(-alpha(s) + u^2) V + 2 x u v] ds + sigma V dB, obtained from the
    anchored dynamics with the interaction path frozen, so the coefficient
    derivatives are d(mu)/dx = -alpha + u^2, d(mu)/du = 2 x u,
    d(sigma x)/dx = sigma, d(sigma x)/du = 0. ``sigma`` defaults to the
    config's first diffusion entry.
    """
    a = cfg.alpha.value(s)
    if sigma is None:
        sigma = float(np.asarray(cfg.sigma, dtype=float).flat[0])
    drift = (-a + np.asarray(u) ** 2) * v + 2.0 * np.asarray(x) * np.asarray(u) * vdir
    return v + drift * cfg.eps + sigma * v * np.asarray(dW)


def _window_indices(cfg, window) -> tuple[int, int]:
    s0, s1 = window
    k0 = int(round(s0 / cfg.eps))
    k1 = int(round(s1 / cfg.eps))
    if not 0 <= k0 < k1 <= cfg.n_steps:
        raise ValueError(f"window {window} does not fit the grid")
    return k0, k1


def _agent_path(cfg, u_path, mf_path, dw, sigma, x_start):
    """Integrate one agent against a frozen interaction path."""
    k_steps = cfg.n_steps
    x = np.empty(k_steps + 1)
    x[0] = x_start
    for k in range(k_steps):
        s = k * cfg.eps
        a = cfg.alpha.value(s)
        drift = -a * x[k] - a * mf_path[k] + x[k] * u_path[k] ** 2
        x[k + 1] = x[k] + drift * cfg.eps + sigma * x[k] * dw[k]
    return x


def gateaux_derivative(cfg, graph: Graph | None, u_path, v_path, window,
                       paths: int = 1, agent: int = 0, fd_delta: float = 1e-4):
    """Directional derivative of the windowed cost, two ways.

    The probed agent follows the anchored dynamics against an interaction
    path and neighbor opinions frozen from a zero-control reference run of
    the whole population. The control ``u_path`` is perturbed by
    ``delta * v_path`` on the window only, and the cost is integrated over
    the window.

    Returns ``(analytic, finite_difference)`` where the analytic value uses
    the variational process and the finite difference uses central
    differencing with common random numbers. Both are averaged over
    ``paths`` Monte-Carlo repetitions.
    """
    from .dynamics import simulate

    u_path = np.asarray(u_path, dtype=float)
    v_path = np.asarray(v_path, dtype=float)
    k_steps = cfg.n_steps
    if u_path.shape != (k_steps,) or v_path.shape != (k_steps,):
        raise ValueError(f"control paths must have length {k_steps}")
    k0, k1 = _window_indices(cfg, window)
    sigma_i = float(np.asarray(cfg.sigma, dtype=float)[agent])
    kk = graph.stubbornness[agent] if graph is not None else 0.0
    nbr = graph.neighbors(agent) if graph is not None else np.array([], dtype=int)
    nbr_w = graph.neighbor_weights(agent) if graph is not None else np.array([])

    analytic_vals = np.empty(paths)
    fd_vals = np.empty(paths)
    for p in range(paths):
        from dataclasses import replace

        pcfg = replace(cfg, seed=child_seed(cfg.seed, p)) if paths > 1 else cfg
        env = simulate(pcfg, lambda k, s, x, b: np.zeros(pcfg.n), graph=graph)
        mf_path = np.array([
            mean_field_drift_all(pcfg.kernel, env.opinions[:, k])[agent]
            for k in range(k_steps + 1)
        ])
        dw = np.diff(env.brownian[agent])

        def windowed_cost(u_ctrl):
            x = _agent_path(pcfg, u_ctrl, mf_path, dw, sigma_i, pcfg.x0[agent])
            total = 0.0
            for k in range(k0, k1):
                gap = 0.0
                if nbr.size:
                    gap = float(np.dot(nbr_w, (x[k] - env.opinions[nbr, k]) ** 2))
                total += 0.5 * (gap + kk * (x[k] - pcfg.x0[agent]) ** 2
                                + u_ctrl[k] ** 2) * pcfg.eps
            return total

        # analytic: variational process from the window start
        x_base = _agent_path(pcfg, u_path, mf_path, dw, sigma_i, pcfg.x0[agent])
        v_val = 0.0
        analytic = 0.0
        for k in range(k0, k1):
            gap_lin = 0.0
            if nbr.size:
                gap_lin = float(np.dot(nbr_w, x_base[k] - env.opinions[nbr, k]))
            integrand = v_val * (gap_lin + kk * (x_base[k] - pcfg.x0[agent])) \
                + u_path[k] * v_path[k]
            analytic += integrand * pcfg.eps
            v_val = variational_step(v_val, x_base[k], u_path[k], v_path[k],
                                     pcfg, dw[k], s=k * pcfg.eps, sigma=sigma_i)

        bump = np.zeros_like(u_path)
        bump[k0:k1] = v_path[k0:k1]
        fd = (windowed_cost(u_path + fd_delta * bump)
              - windowed_cost(u_path - fd_delta * bump)) / (2.0 * fd_delta)
        analytic_vals[p] = analytic
        fd_vals[p] = fd

    return float(analytic_vals.mean()), float(fd_vals.mean())
