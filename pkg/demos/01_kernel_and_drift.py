# %% [markdown]
# # The interaction kernel and its mean-field pull
#
# The kernel phi acts on the signed opinion gap beta = x_i - x_j: only
# agents sitting *below* me pull on me (beta > 0), and only within the
# range window |beta - theta2| < 1. This script sketches the kernel, checks
# its closed-form derivatives against finite differences, and evaluates the
# population drift it induces.

# %%
import numpy as np

from opinionfield import KernelParams, dphi_dxi, d2phi_dxi2, mean_field_drift, phi

kp = KernelParams(theta1=2.0, theta2=0.0)

betas = np.linspace(-0.5, 1.5, 9)
print("beta:  ", np.round(betas, 3))
print("phi:   ", np.round(phi(kp, betas), 4))

# %% [markdown]
# The closed-form first and second derivatives agree with central finite
# differences everywhere away from the support boundary.

# %%
for beta in (0.2, 0.5, 0.8):
    h = 1e-6
    fd1 = (phi(kp, beta + h) - phi(kp, beta - h)) / (2 * h)
    print(f"beta={beta}: dphi={dphi_dxi(kp, beta, 0.0):+.6f}  fd={fd1:+.6f}  "
          f"d2phi={d2phi_dxi2(kp, beta, 0.0):+.4f}")

# %% [markdown]
# The mean-field drift of an agent is the population average of
# phi(gap) * gap. An agent above the crowd feels a positive pull (which
# enters the dynamics with a minus sign: it is dragged down toward the
# crowd); the lowest agent feels nothing.

# %%
x = np.array([0.9, 0.55, 0.5, 0.45, 0.1])
for i, xi in enumerate(x):
    print(f"agent {i} at {xi:.2f}: mean-field term {mean_field_drift(kp, i, x):+.4f}")
