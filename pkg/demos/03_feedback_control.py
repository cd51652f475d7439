# %% [markdown]
# # The closed-form feedback control
#
# At each (agent, time) point the stationarity condition is a quadratic
# T1 u^2 + T2 u + T3 = 0 in the control. This walk-through builds one
# context, inspects the coefficients and the selected root, confirms the
# first-order condition, and probes how the root responds to opinions.

# %%
import numpy as np

from opinionfield import (
    ControlContext,
    KernelParams,
    MultiplierModel,
    build_erdos_renyi,
    coefficients,
    f_value,
    foc_residual,
    optimal_control,
    sensitivity_case1_dxi,
    sensitivity_case2_dxj,
)

graph = build_erdos_renyi(6, 0.9, w=0.8, k=0.5, seed=2)
mult = MultiplierModel.linear(0.0, 1.0)
kp = KernelParams(1.0, 0.0)
x = np.array([0.55, 0.62, 0.48, 0.71, 0.52, 0.60])
print("neighbors of agent 0:", [int(j) for j in graph.neighbors(0)])

ctx = ControlContext.from_graph(graph, kp, mult, i=0, x=x, x0=np.full(6, 0.5),
                                brownian_i=0.1, sigma_i=0.2, s=0.4, eps=0.05,
                                alpha_s=0.8)
t1, t2, t3 = coefficients(ctx)
sol = optimal_control(ctx)
print(f"T1={t1:.5f}  T2={t2:.5f}  T3={t3:.5f}")
print(f"roots={tuple(round(r, 5) for r in sol.roots)}  chosen={sol.chosen:.5f} ({sol.branch})")
print(f"foc residual at the root: {foc_residual(ctx, sol.chosen):.2e}")
print(f"f at the root {f_value(ctx, sol.chosen):.5f} vs f at 0 {f_value(ctx, 0.0):.5f}")

# %% [markdown]
# Sensitivities. At a flat opinion profile the chosen root rises with the
# common opinion level whenever some coupling or stubbornness is present;
# when every neighbor sits above the agent, the closed form says stronger
# neighbors make the agent more hesitant (negative response).

# %%
flat = ControlContext.from_graph(graph, kp, mult, i=0, x=np.full(6, 0.6),
                                 x0=np.full(6, 0.5), brownian_i=0.0, sigma_i=0.0,
                                 s=0.4, eps=0.05, alpha_s=0.8)
print("case-1 sensitivity (flat profile):", f"{sensitivity_case1_dxi(flat):+.5f}")

below = np.full(6, 0.3)
below[list(graph.neighbors(0))] = 0.55
ctx2 = ControlContext.from_graph(graph, kp, mult, i=0, x=below, x0=np.full(6, 0.5),
                                 brownian_i=0.0, sigma_i=0.0, s=0.4, eps=0.05,
                                 alpha_s=0.8)
print("case-2 sensitivity (all neighbors above):", f"{sensitivity_case2_dxj(ctx2):+.5f}")
