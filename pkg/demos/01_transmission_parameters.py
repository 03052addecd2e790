#!/usr/bin/env python3
"""Tunneling parameters of a rectangular barrier, well and point potential.

Tabulates T(k), the transmission phase J(k) and the reflection phase
parameter F(k) over the wavenumber window of the reference wave packet,
and plots them.  For these mirror-symmetric potentials F is locked to 0
or pi; it flips only at transmission resonances.
"""

import os

import numpy as np

from tunnelsplit import ELECTRON_MASS, HBAR
from tunnelsplit.packets import default_kgrid, k_tables
from tunnelsplit.potentials import Delta, Rectangular

OUT = os.path.join(os.path.dirname(__file__), "output")
os.makedirs(OUT, exist_ok=True)

mass = 0.067 * ELECTRON_MASS
k0 = np.sqrt(2.0 * mass * 0.25) / HBAR       # 0.25 eV mean kinetic energy
grid = default_kgrid(k0, 7.5)

potentials = {
    "barrier": Rectangular(0.3, 500.0, 505.0),
    "well": Rectangular(-0.3, 500.0, 505.0),
    "point": Delta(0.05, 500.0),
}

tables = {name: k_tables(p, grid, mass) for name, p in potentials.items()}

print(f"{'k [1/nm]':>10} " + " ".join(f"{n + ' T':>12}" for n in tables))
for i in range(0, grid.n_points, grid.n_points // 12):
    row = " ".join(f"{tables[n].T[i]:12.6f}" for n in tables)
    print(f"{tables['barrier'].ks[i]:10.4f} {row}")

for name, tb in tables.items():
    path = os.path.join(OUT, f"params_{name}.csv")
    np.savetxt(path, np.column_stack([tb.ks, tb.T, tb.J, tb.F, tb.dJ]),
               delimiter=",", header="k,T,J,F,dJ_dk", comments="")
    print("wrote", path)

try:
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt
except ImportError:
    raise SystemExit(0)

fig, axes = plt.subplots(3, 1, figsize=(7, 9), sharex=True)
for name, tb in tables.items():
    axes[0].plot(tb.ks, tb.T, label=name)
    axes[1].plot(tb.ks, tb.J, label=name)
    axes[2].plot(tb.ks, np.mod(tb.F, 2 * np.pi), ".", ms=2, label=name)
axes[0].set_ylabel("T(k)")
axes[1].set_ylabel("J(k) [rad]")
axes[2].set_ylabel("F(k) mod 2pi")
axes[2].set_xlabel("k [1/nm]")
axes[0].axvline(k0, color="gray", lw=0.8, ls="--")
axes[0].legend()
fig.tight_layout()
fig.savefig(os.path.join(OUT, "01_parameters.png"), dpi=130)
print("wrote", os.path.join(OUT, "01_parameters.png"))
