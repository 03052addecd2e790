#!/usr/bin/env python3
"""Splitting one stationary scattering state into its two components.

At a fixed wavenumber the unit-incidence state separates into a
reflection part (a standing wave left of the barrier midpoint, zero
beyond, carrying no flux) and a transmission part carrying the full
constant flux (hbar k / m) T.  The script prints the flux bookkeeping and
plots the three densities around the barrier.
"""

import os

import numpy as np

from tunnelsplit import ELECTRON_MASS, HBAR, XGrid
from tunnelsplit.potentials import Rectangular, geometry
from tunnelsplit.scattering import tunneling_params
from tunnelsplit.splitting import stationary_triple

OUT = os.path.join(os.path.dirname(__file__), "output")
os.makedirs(OUT, exist_ok=True)

mass = 0.067 * ELECTRON_MASS
barrier = Rectangular(0.3, 500.0, 505.0)
geo = geometry(barrier)
k = np.sqrt(2.0 * mass * 0.25) / HBAR

grid = XGrid(geo.a - 20.0, geo.b + 20.0, 45001)
trip = stationary_triple(barrier, float(k), grid, mass)
tp = tunneling_params(barrier, float(k), mass)
x = grid.values()


def flux_profile(psi):
    d = (psi[2:] - psi[:-2]) / (2.0 * grid.dx)
    return HBAR / mass * np.imag(np.conj(psi[1:-1]) * d)


print(f"k = {k:.4f} 1/nm, T = {tp.T:.6f}")
print(f"expected transmitted flux hbar k T / m = {HBAR * k * tp.T / mass:.8f} nm/fs")
print(f"measured, min/max over x:               "
      f"{flux_profile(trip.phi_tr).min():.8f} / {flux_profile(trip.phi_tr).max():.8f}")
print(f"reflection-part flux, max |j|:          "
      f"{np.max(np.abs(flux_profile(trip.phi_ref))):.2e}")
print(f"reflection part beyond the midpoint:    "
      f"{np.max(np.abs(trip.phi_ref[x >= geo.x_mid])):.1e}")

np.savetxt(os.path.join(OUT, "stationary_split.csv"),
           np.column_stack([x, np.abs(trip.phi_full) ** 2,
                            np.abs(trip.phi_tr) ** 2,
                            np.abs(trip.phi_ref) ** 2]),
           delimiter=",", header="x,dens_full,dens_tr,dens_ref", comments="")
print("wrote", os.path.join(OUT, "stationary_split.csv"))

try:
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt
except ImportError:
    raise SystemExit(0)

fig, ax = plt.subplots(figsize=(8, 4.5))
ax.plot(x, np.abs(trip.phi_full) ** 2, "k--", lw=1, label="full")
ax.plot(x, np.abs(trip.phi_tr) ** 2, "o", ms=2, mfc="none", label="transmission")
ax.plot(x, np.abs(trip.phi_ref) ** 2, "-", label="reflection")
ax.axvspan(geo.a, geo.b, color="orange", alpha=0.2)
ax.axvline(geo.x_mid, color="gray", lw=0.8, ls=":")
ax.set_xlabel("x [nm]")
ax.set_ylabel("|psi|^2")
ax.legend()
fig.tight_layout()
fig.savefig(os.path.join(OUT, "02_stationary_split.png"), dpi=130)
print("wrote", os.path.join(OUT, "02_stationary_split.png"))
