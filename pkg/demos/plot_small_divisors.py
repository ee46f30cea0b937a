"""
Small divisors of the wave operator
===================================

The Fourier symbol of the linear part is
k^2 + m - omega^2 n^2 + i omega alpha n k^2. At alpha = 0 and
omega^2 = 1 + m it vanishes on the kernel modes (+-1, 1); whether it
vanishes anywhere else depends on the arithmetic of m.
"""

import numpy as np
import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt

from wavebif.linear import divisor_array, kernel_scan

# irrational masses: only the kernel modes are resonant
for m in [np.sqrt(2), np.e - 2, np.pi - 3]:
    ks = kernel_scan(m, 500, 500)
    print(f"m = {m:.6f}: zeros {sorted(ks.zeros)}, "
          f"smallest other |divisor| {ks.min_nonzero:.3e} at {ks.argmin}")

# a rational mass picks up extra resonances
ks = kernel_scan(1.0, 50, 50)
print(f"m = 1: {len(ks.zeros)} zeros with |n|, k <= 50, e.g. {sorted(ks.zeros)[:6]}")

# the damping term adds i omega alpha n k^2, which lifts every n != 0
# divisor off zero; picture |divisor| over a window of modes
m = np.sqrt(2)
omega = np.sqrt(1 + m)
fig, axes = plt.subplots(1, 2, figsize=(9, 4), sharey=True)
for ax, alpha in zip(axes, [0.0, 0.05]):
    d = np.abs(divisor_array(40, 40, m, omega, alpha))
    im = ax.imshow(np.log10(d + 1e-16).T, origin="lower", aspect="auto",
                   extent=[-40.5, 40.5, 0.5, 40.5])
    ax.set_title(f"log10 |divisor|, alpha = {alpha}")
    ax.set_xlabel("n")
axes[0].set_ylabel("k")
fig.colorbar(im, ax=axes)
fig.savefig("divisors.png", dpi=120)
print("wrote divisors.png")
