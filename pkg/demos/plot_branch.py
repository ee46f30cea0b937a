"""
Following the branch of periodic solutions down to zero amplitude
=================================================================

Each amplitude rho fixes a damping alpha and a frequency omega for which
the damped wave equation has a periodic solution
u = rho cos(omega t) sin(x) + v. Here we trace that branch and look at
how alpha, omega and v scale with rho.
"""

import numpy as np
import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt

from wavebif import ModelParams, theta_constant, trace_branch

# cubic nonlinearity (p = 1) with mass sqrt(2), the default parameters
params = ModelParams()
rhos = np.logspace(-2, -3.5, 7)

# warm-started continuation from the largest amplitude downwards
points = trace_branch(rhos, params)

print(f"{'rho':>10} {'alpha':>12} {'omega^2-(1+m)':>14} {'||v||':>10} {'pde resid':>10}")
for pt in points:
    print(f"{pt.rho:10.3e} {pt.alpha:12.5e} {pt.omega_sq_shift:14.3e} "
          f"{pt.v_norm:10.3e} {pt.resid_pde:10.1e}")

rho = np.array([pt.rho for pt in points])
alpha = np.array([pt.alpha for pt in points])
shift = np.abs([pt.omega_sq_shift for pt in points])
vnorm = np.array([pt.v_norm for pt in points])

# slopes on log-log axes: alpha ~ rho^2, v ~ rho^3, the frequency shift ~ rho^4
for name, y in [("alpha", alpha), ("|omega^2-(1+m)|", shift), ("||v||", vnorm)]:
    print(f"slope of {name}: {np.polyfit(np.log(rho), np.log(y), 1)[0]:.3f}")

# the leading term theta (1+m) rho^2, with the 1/pi^2 from the kernel norm
lead = theta_constant(1) * (1 + params.m) * rho**2 / np.pi**2
print("alpha / leading term:", alpha / lead)

fig, ax = plt.subplots(figsize=(6, 4))
ax.loglog(rho, alpha, "o-", label="alpha")
ax.loglog(rho, lead, "k--", label="leading term")
ax.loglog(rho, shift, "s-", label="|omega^2 - (1+m)|")
ax.loglog(rho, vnorm, "^-", label="||v|| in X^s")
ax.set_xlabel("rho")
ax.legend()
fig.tight_layout()
fig.savefig("branch.png", dpi=120)
print("wrote branch.png")
