"""Closed-form feedback control from the stationarity of the f-function.

At each (agent, time) point the stationarity condition collapses to a
quadratic T1 u^2 + T2 u + T3 = 0 in the control u, with

    IF  = exp(-sigma B + sigma^2 s / 2)            (integrating factor)
    T1  = 4 IF^2 dl^2                              (> 0 whenever dl != 0)
    T2  = -(1 + 2 x IF dl) (Sw + k - alpha IF K1 dl)
    T3  = 4 IF dl (Swd + k (x - x0) + IF dl + IF dl/ds - alpha IF (1 + K0) dl)

where dl is the multiplier increment over the step, dl/ds its rate,
Sw = sum_j w_ij, Swd = sum_j w_ij (x_i - x_j), and K0 / K1 are the
population-mean kernel sums

    K0 = (1/n) sum_j [ phi'(x_i - x_j) (x_i - x_j) + phi(x_i - x_j) ]
    K1 = (1/n) sum_j [ phi''(x_i - x_j) (x_i - x_j) + 2 phi'(x_i - x_j) ].

Root selection prefers the "-" branch; a negative "-" root falls back to
the "+" root, and if both are negative the control clamps to zero
(admissible strategies are nonnegative).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .dynamics import integrating_factor
from .graph import Graph
from .kernel import KernelParams, d2phi_dxi2, dphi_dxi, mean_field_drift, phi
from .schedule import PiecewiseLinear

__all__ = [
    "DomainError",
    "MultiplierModel",
    "ControlContext",
    "ControlSolution",
    "ComplexRootsError",
    "coefficients",
    "optimal_control",
    "foc_residual",
    "f_value",
    "sensitivity_case1_dxi",
    "sensitivity_case2_dxj",
    "fd_sensitivity_case1",
    "fd_sensitivity_case2",
    "OptimalPolicy",
]


class DomainError(ValueError):
    """A sensitivity formula was evaluated outside its validity region."""


class ComplexRootsError(ArithmeticError):
    """The control quadratic has no real stationary point.

    Signals that the multiplier / step configuration makes the discriminant
    negative; carries the coefficients and, when raised inside a simulation,
    the offending agent and step.
    """

    def __init__(self, t1: float, t2: float, t3: float,
                 agent: int | None = None, step: int | None = None):
        self.t1, self.t2, self.t3 = t1, t2, t3
        self.agent, self.step = agent, step
        where = ""
        if agent is not None:
            where = f" (agent {agent}" + (f", step {step})" if step is not None else ")")
        super().__init__(
            f"negative discriminant{where}: T1={t1!r}, T2={t2!r}, T3={t3!r}"
        )


class MultiplierModel:
    """Lagrange-multiplier path lambda(s): linear or tabulated."""

    def __init__(self, kind: str, lambda0: float = 0.0, rate: float = 0.0,
                 times=None, values=None):
        if kind == "linear":
            self.kind = "linear"
            self.lambda0 = float(lambda0)
            self._rate = float(rate)
            self._table = None
        elif kind == "tabulated":
            self.kind = "tabulated"
            self._table = PiecewiseLinear(times, values)
            self.lambda0 = float(self._table.values[0])
            self._rate = None
        else:
            raise ValueError(f"unknown multiplier kind {kind!r}")

    @classmethod
    def linear(cls, lambda0: float, rate: float) -> "MultiplierModel":
        return cls("linear", lambda0=lambda0, rate=rate)

    @classmethod
    def tabulated(cls, times, values) -> "MultiplierModel":
        return cls("tabulated", times=times, values=values)

    def value(self, s: float) -> float:
        if self._table is not None:
            return self._table.value(s)
        return self.lambda0 + self._rate * s

    def rate(self, s: float) -> float:
        if self._table is not None:
            return self._table.rate(s)
        return self._rate

    def increment(self, s: float, eps: float) -> float:
        if self._table is not None:
            return self._table.increment(s, eps)
        return self._rate * eps


@dataclass
class ControlContext:
    """Everything the feedback formula needs at one (agent, time) point."""

    s: float
    eps: float
    i: int
    x: np.ndarray          # full opinion vector
    x0_i: float
    B_i: float
    sigma_i: float
    alpha_s: float
    neighbor_idx: np.ndarray
    neighbor_w: np.ndarray
    k_i: float
    kernel: KernelParams
    dlambda: float
    dlambda_ds: float

    def __post_init__(self) -> None:
        if self.eps <= 0:
            raise ValueError("eps must be positive")
        self.x = np.asarray(self.x, dtype=float)
        self.neighbor_idx = np.asarray(self.neighbor_idx, dtype=int)
        self.neighbor_w = np.asarray(self.neighbor_w, dtype=float)

    @classmethod
    def from_graph(cls, graph: Graph, kernel: KernelParams, multiplier: MultiplierModel,
                   i: int, x, x0, brownian_i: float, sigma_i: float,
                   s: float, eps: float, alpha_s: float) -> "ControlContext":
        x = np.asarray(x, dtype=float)
        x0 = np.asarray(x0, dtype=float)
        return cls(
            s=s, eps=eps, i=i, x=x, x0_i=float(x0[i]), B_i=float(brownian_i),
            sigma_i=float(sigma_i), alpha_s=float(alpha_s),
            neighbor_idx=graph.neighbors(i), neighbor_w=graph.neighbor_weights(i),
            k_i=float(graph.stubbornness[i]), kernel=kernel,
            dlambda=multiplier.increment(s, eps), dlambda_ds=multiplier.rate(s),
        )

    # -- shared pieces -------------------------------------------------

    def integrating_factor(self) -> float:
        return float(integrating_factor(self.sigma_i, self.B_i, self.s))

    def weight_sum(self) -> float:
        return float(self.neighbor_w.sum())

    def weighted_gap_sum(self) -> float:
        xi = self.x[self.i]
        return float(np.dot(self.neighbor_w, xi - self.x[self.neighbor_idx]))

    def kernel_sums(self) -> tuple[float, float]:
        """(K0, K1) population means defined in the module docstring."""
        diffs = self.x[self.i] - self.x
        p = phi(self.kernel, diffs)
        dp = dphi_dxi(self.kernel, self.x[self.i], self.x)
        d2p = d2phi_dxi2(self.kernel, self.x[self.i], self.x)
        k0 = float(np.mean(dp * diffs + p))
        k1 = float(np.mean(d2p * diffs + 2.0 * dp))
        return k0, k1


@dataclass
class ControlSolution:
    """Solved feedback control at one point, with selection provenance."""

    T1: float
    T2: float
    T3: float
    discriminant: float
    roots: tuple[float, ...]
    chosen: float
    branch: str          # "minus" | "plus" | "linear" | "zero"
    degenerate: bool = False

    def to_dict(self) -> dict:
        return {
            "T1": self.T1,
            "T2": self.T2,
            "T3": self.T3,
            "discriminant": self.discriminant,
            "roots": list(self.roots),
            "chosen": self.chosen,
            "branch": self.branch,
            "degenerate": self.degenerate,
        }


def coefficients(ctx: ControlContext) -> tuple[float, float, float]:
    """The quadratic coefficients (T1, T2, T3) at the context point."""
    if_ = ctx.integrating_factor()
    dl, dlds, a = ctx.dlambda, ctx.dlambda_ds, ctx.alpha_s
    xi = float(ctx.x[ctx.i])
    k0, k1 = ctx.kernel_sums()
    sw = ctx.weight_sum()
    swd = ctx.weighted_gap_sum()

    t1 = 4.0 * if_**2 * dl**2
    t2 = -(1.0 + 2.0 * xi * if_ * dl) * (sw + ctx.k_i + if_ * (-a * k1) * dl)
    t3 = 4.0 * if_ * dl * (
        swd + ctx.k_i * (xi - ctx.x0_i) + if_ * dl + if_ * dlds
        + if_ * (-a - a * k0) * dl
    )
    return t1, t2, t3


_ADMISSIBLE_TOL = 1e-12


def _solve_quadratic(t1: float, t2: float, t3: float) -> ControlSolution:
    t1, t2, t3 = float(t1), float(t2), float(t3)
    disc = t2 * t2 - 4.0 * t1 * t3
    scale = 1.0 + abs(t2) + abs(t3)
    if abs(t1) < 1e-12 * scale:
        # linear fallback T2 u + T3 = 0
        if abs(t2) < 1e-12 * (1.0 + abs(t3)):
            return ControlSolution(t1, t2, t3, disc, (), 0.0, "zero", True)
        root = -t3 / t2
        return ControlSolution(t1, t2, t3, disc, (root,), max(root, 0.0), "linear", True)
    if disc < 0.0:
        raise ComplexRootsError(t1, t2, t3)
    sq = float(np.sqrt(disc))
    if t2 >= 0.0:
        q = -0.5 * (t2 + sq)
        minus_root = q / t1          # (-T2 - sqrt(D)) / (2 T1)
        plus_root = t3 / q if q != 0.0 else -t2 / (2.0 * t1)
    else:
        q = -0.5 * (t2 - sq)
        plus_root = q / t1           # (-T2 + sqrt(D)) / (2 T1)
        minus_root = t3 / q if q != 0.0 else -t2 / (2.0 * t1)
    roots = (minus_root, plus_root)
    if minus_root >= -_ADMISSIBLE_TOL:
        return ControlSolution(t1, t2, t3, disc, roots, max(minus_root, 0.0), "minus")
    if plus_root >= -_ADMISSIBLE_TOL:
        return ControlSolution(t1, t2, t3, disc, roots, max(plus_root, 0.0), "plus")
    return ControlSolution(t1, t2, t3, disc, roots, 0.0, "zero", True)


def optimal_control(ctx: ControlContext) -> ControlSolution:
    """Solve the feedback quadratic and select the admissible root.

    Selection prefers the "-" branch, falls back to "+" when the "-" root
    is negative, and clamps to zero (degenerate) when both are. Raises
    ComplexRootsError when the discriminant is negative.
    """
    t1, t2, t3 = coefficients(ctx)
    return _solve_quadratic(t1, t2, t3)


def _f_partials(ctx: ControlContext, u: float) -> tuple[float, float, float, float]:
    """(f_x, f_xx, f_u, f_xu) of the f-function at control u."""
    if_ = ctx.integrating_factor()
    dl, dlds, a = ctx.dlambda, ctx.dlambda_ds, ctx.alpha_s
    xi = float(ctx.x[ctx.i])
    k0, k1 = ctx.kernel_sums()
    f_x = (
        ctx.weighted_gap_sum() + ctx.k_i * (xi - ctx.x0_i)
        + if_ * dl + if_ * dlds
        + if_ * (-a - a * k0 + u**2) * dl
    )
    f_xx = ctx.weight_sum() + ctx.k_i + if_ * (-a * k1) * dl
    f_u = u * (1.0 + 2.0 * xi * if_ * dl)
    f_xu = 2.0 * if_ * dl
    return f_x, f_xx, f_u, f_xu


def foc_residual(ctx: ControlContext, u: float) -> float:
    """First-order-condition residual at control u; zero at the optimum.

    Expanding the stationarity condition through the four partials of the
    f-function gives exactly the control quadratic:

        2 f_x f_xu - f_u f_xx  ==  T1 u^2 + T2 u + T3,

    so the residual vanishes precisely at the feedback roots and equals T3
    at u = 0. This route never touches coefficients() and serves as an
    independent check on it.
    """
    f_x, f_xx, f_u, f_xu = _f_partials(ctx, u)
    return 2.0 * f_x * f_xu - f_u * f_xx


def f_value(ctx: ControlContext, u: float) -> float:
    """The full f-function: running cost plus multiplier and drift terms."""
    if_ = ctx.integrating_factor()
    dl, dlds, a = ctx.dlambda, ctx.dlambda_ds, ctx.alpha_s
    xi = float(ctx.x[ctx.i])
    gaps = xi - ctx.x[ctx.neighbor_idx]
    running = 0.5 * (
        float(np.dot(ctx.neighbor_w, gaps**2))
        + ctx.k_i * (xi - ctx.x0_i) ** 2
        + u**2
    )
    h_val = xi * if_
    mf = mean_field_drift(ctx.kernel, ctx.i, ctx.x)
    drift = -a * xi - a * mf + xi * u**2
    return (
        running
        + h_val * dl
        + 0.5 * h_val * ctx.sigma_i**2 * dl
        + dlds * h_val
        + if_ * drift * dl
    )


# -- sensitivity of the feedback root ----------------------------------


def _require_case1(ctx: ControlContext) -> None:
    if np.ptp(ctx.x) > 1e-12:
        raise DomainError("Case-I sensitivity needs all opinions equal")
    if ctx.dlambda == 0.0:
        raise DomainError("Case-I sensitivity needs a nonzero multiplier increment")


def sensitivity_case1_dxi(ctx: ControlContext) -> float:
    """d(chosen root)/d(own opinion) at an all-equal-opinion point.

    The derivative is taken along a uniform shift of the whole profile
    (which preserves the all-equal regime, where every kernel term is
    identically zero) and follows the branch the root selection picks, so
    it matches central finite differences of optimal_control. With
    w = k = 0 the root does not depend on the opinion at all and the
    sensitivity is exactly zero.
    """
    _require_case1(ctx)
    t1, t2, t3 = coefficients(ctx)
    sol = _solve_quadratic(t1, t2, t3)
    if sol.branch in ("zero", "linear"):
        return 0.0
    if_ = ctx.integrating_factor()
    dl = ctx.dlambda
    swk = ctx.weight_sum() + ctx.k_i
    dt2 = -swk * 2.0 * if_ * dl
    dt3 = 4.0 * if_ * dl * ctx.k_i
    disc = sol.discriminant
    if disc <= 0.0:
        raise DomainError("sensitivity undefined at a double root")
    ddisc = 2.0 * t2 * dt2 - 4.0 * t1 * dt3
    sign = -1.0 if sol.branch == "minus" else 1.0
    return float((-dt2 + sign * ddisc / (2.0 * np.sqrt(disc))) / (2.0 * t1))


def sensitivity_case2_dxj(ctx: ControlContext) -> float:
    """Closed-form d(root)/d(neighbor opinion) when every neighbor sits above.

    Evaluates

        -4 [ sum_j w_ij (x_j - x_i)^(-3/2) ] (sum_j w_ij)
           * exp(-3 sigma B / 2 + 3 sigma^2 s / 4) * dl^(3/2),

    negative whenever the weights and the multiplier increment are
    positive. Requires x_j > x_i strictly for every neighbor (the kernel
    vanishes on that side by construction) and dl >= 0 for the real
    three-halves power.
    """
    if ctx.dlambda < 0.0:
        raise DomainError("dlambda^(3/2) is undefined over the reals for dlambda < 0")
    xi = float(ctx.x[ctx.i])
    gaps = ctx.x[ctx.neighbor_idx] - xi
    if np.any(gaps[ctx.neighbor_w > 0] <= 0.0):
        raise DomainError("Case-II sensitivity needs every weighted neighbor above agent i")
    sw = ctx.weight_sum()
    if sw == 0.0:
        return 0.0
    inv_pow = float(np.dot(ctx.neighbor_w, gaps ** (-1.5)))
    envelope = np.exp(-1.5 * ctx.sigma_i * ctx.B_i + 0.75 * ctx.sigma_i**2 * ctx.s)
    return float(-4.0 * inv_pow * sw * envelope * ctx.dlambda**1.5)


def _shifted(ctx: ControlContext, h: float, only_neighbors: bool = False) -> ControlContext:
    x = ctx.x.copy()
    if only_neighbors:
        x[ctx.neighbor_idx] = x[ctx.neighbor_idx] + h
    else:
        x = x + h
    return ControlContext(
        s=ctx.s, eps=ctx.eps, i=ctx.i, x=x, x0_i=ctx.x0_i, B_i=ctx.B_i,
        sigma_i=ctx.sigma_i, alpha_s=ctx.alpha_s, neighbor_idx=ctx.neighbor_idx,
        neighbor_w=ctx.neighbor_w, k_i=ctx.k_i, kernel=ctx.kernel,
        dlambda=ctx.dlambda, dlambda_ds=ctx.dlambda_ds,
    )


def fd_sensitivity_case1(ctx: ControlContext, h: float = 1e-6) -> float:
    """Central finite difference of the chosen root under a uniform shift."""
    lo = optimal_control(_shifted(ctx, -h)).chosen
    hi = optimal_control(_shifted(ctx, +h)).chosen
    return (hi - lo) / (2.0 * h)


def fd_sensitivity_case2(ctx: ControlContext, h: float = 1e-6) -> float:
    """Central finite difference of the chosen root, shifting the neighbors."""
    lo = optimal_control(_shifted(ctx, -h, only_neighbors=True)).chosen
    hi = optimal_control(_shifted(ctx, +h, only_neighbors=True)).chosen
    return (hi - lo) / (2.0 * h)


# -- vectorized policy for simulation ----------------------------------


@dataclass
class OptimalPolicy:
    """Closed-loop policy evaluating the feedback root for every agent.

    The per-step solutions can be recorded for the control log. Raises
    ComplexRootsError annotated with (agent, step) on a negative
    discriminant.
    """

    graph: Graph
    kernel: KernelParams
    multiplier: MultiplierModel
    x0: np.ndarray
    sigma: np.ndarray
    alpha: object
    eps: float
    record: bool = False
    log: list = field(default_factory=list)

    def __call__(self, k: int, s: float, x: np.ndarray, brownian: np.ndarray) -> np.ndarray:
        n = x.size
        w = self.graph.dense_weights()
        if_ = np.exp(-self.sigma * brownian + 0.5 * self.sigma**2 * s)
        dl = self.multiplier.increment(s, self.eps)
        dlds = self.multiplier.rate(s)
        a = self.alpha.value(s) if hasattr(self.alpha, "value") else float(self.alpha)

        diffs = x[:, None] - x[None, :]
        p = phi(self.kernel, diffs)
        dp = dphi_dxi(self.kernel, x[:, None], x[None, :])
        d2p = d2phi_dxi2(self.kernel, x[:, None], x[None, :])
        k0 = np.mean(dp * diffs + p, axis=1)
        k1 = np.mean(d2p * diffs + 2.0 * dp, axis=1)
        sw = w.sum(axis=1)
        swd = x * sw - w @ x
        kk = self.graph.stubbornness

        t1 = 4.0 * if_**2 * dl**2
        t2 = -(1.0 + 2.0 * x * if_ * dl) * (sw + kk + if_ * (-a * k1) * dl)
        t3 = 4.0 * if_ * dl * (
            swd + kk * (x - self.x0) + if_ * dl + if_ * dlds
            + if_ * (-a - a * k0) * dl
        )

        u = np.empty(n)
        for i in range(n):
            try:
                sol = _solve_quadratic(float(t1[i]), float(t2[i]), float(t3[i]))
            except ComplexRootsError as exc:
                raise ComplexRootsError(exc.t1, exc.t2, exc.t3, agent=i, step=k) from None
            u[i] = sol.chosen
            if self.record:
                self.log.append((k, float(s), i, sol))
        return u
