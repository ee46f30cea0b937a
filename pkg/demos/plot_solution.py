"""
The periodic solution at one amplitude
======================================

Solve at rho = 1e-2, then look at the solution in space-time and at how
fast its Fourier coefficients decay.
"""

import numpy as np
import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt

from wavebif import ModelParams, kernel_field, solve_point
from wavebif.spectral import evaluate
from wavebif.verification import spectral_decay

params = ModelParams()
pt = solve_point(1e-2, params)
print(f"alpha = {pt.alpha:.10e}, omega = {pt.omega:.12f}")
print(f"residuals: be1 {pt.resid_be1:.1e}, be2 {pt.resid_be2:.1e}, "
      f"range {pt.resid_range:.1e}, pde {pt.resid_pde:.1e}")

# u = rho cos t sin x + v, in the rescaled time t -> omega t
u = kernel_field(pt.rho, params.trunc_t, params.trunc_x) + pt.v
t = np.linspace(0, 2 * np.pi, 200)
x = np.linspace(0, np.pi, 100)
values = evaluate(u, t[:, None], x[None, :])
correction = evaluate(pt.v, t[:, None], x[None, :])

# the coefficients fall off geometrically: each shell max(|n|, k) = j
# is smaller by a fixed factor, until rounding level
dec = spectral_decay(u)
print(f"decay: {dec['rate']:.2f} decades per shell, geometric = {dec['geometric']}")

fig, axes = plt.subplots(1, 3, figsize=(13, 4))
axes[0].contourf(x, t, values, 30)
axes[0].set_title("u(t, x)")
axes[1].contourf(x, t, correction, 30)
axes[1].set_title("v(t, x)")
shells = np.array(dec["shells"])
axes[2].semilogy(np.arange(1, len(shells) + 1), np.maximum(shells, 1e-300), "o")
axes[2].set_xlabel("shell j = max(|n|, k)")
axes[2].set_title("largest |coefficient|")
for ax in axes[:2]:
    ax.set_xlabel("x")
    ax.set_ylabel("t")
fig.tight_layout()
fig.savefig("solution.png", dpi=120)
print("wrote solution.png")
