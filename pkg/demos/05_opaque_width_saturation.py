#!/usr/bin/env python3
"""Saturation of the effective barrier width for opaque barriers.

For tunneling below a rectangular barrier the effective width entering
the asymptotic transmission time saturates at 2 / kappa as the geometric
width grows: the traversal clock stops responding to extra thickness.
The script sweeps the width at a fixed sub-barrier energy and plots
d_eff(d) against the 2 / kappa plateau.
"""

import os

import numpy as np

from tunnelsplit import ELECTRON_MASS, HBAR
from tunnelsplit.potentials import Rectangular
from tunnelsplit.timing import rect_closed_forms

OUT = os.path.join(os.path.dirname(__file__), "output")
os.makedirs(OUT, exist_ok=True)

mass = 0.067 * ELECTRON_MASS
v0 = 0.3
kap0 = np.sqrt(2.0 * mass * v0) / HBAR
kap = 0.5
k = float(np.sqrt(kap0**2 - kap**2))   # fixed energy below the top

widths = np.linspace(0.25, 30.0, 240)
d_eff = np.array([rect_closed_forms(Rectangular(v0, 100.0, 100.0 + d),
                                    k, mass).d_eff for d in widths])

print(f"sub-barrier k = {k:.4f} 1/nm, decay constant kappa = {kap} 1/nm")
print(f"{'d [nm]':>8} {'d_eff [nm]':>11}")
for d in (0.5, 1.0, 2.0, 4.0, 8.0, 16.0, 30.0):
    de = rect_closed_forms(Rectangular(v0, 100.0, 100.0 + d), k, mass).d_eff
    print(f"{d:8.1f} {de:11.4f}")
print(f"plateau 2/kappa = {2.0 / kap:.4f} nm")

np.savetxt(os.path.join(OUT, "width_saturation.csv"),
           np.column_stack([widths, d_eff]), delimiter=",",
           header="d,d_eff", comments="")

try:
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt
except ImportError:
    raise SystemExit(0)

fig, ax = plt.subplots(figsize=(7, 4))
ax.plot(widths, d_eff, label="effective width")
ax.plot(widths, widths, "k:", lw=0.8, label="geometric width")
ax.axhline(2.0 / kap, color="crimson", ls="--", lw=1, label="2 / kappa")
ax.set_xlabel("barrier width d [nm]")
ax.set_ylabel("d_eff [nm]")
ax.set_ylim(0, 8)
ax.legend()
fig.tight_layout()
fig.savefig(os.path.join(OUT, "05_width_saturation.png"), dpi=130)
print("wrote", os.path.join(OUT, "05_width_saturation.png"))
