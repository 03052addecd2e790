#!/usr/bin/env python3
"""Wave-packet snapshots for the reference barrier and well scenarios.

A Gaussian packet (half-width 7.5 nm, mean kinetic energy 0.25 eV,
effective mass 0.067 electron masses) is launched 500 nm from a 5 nm wide
rectangular barrier (0.3 eV) or well (-0.3 eV).  The full density and its
transmission/reflection components are plotted before (t = 0), during
(0.4 ps) and just after the peak of the collision.
"""

import os

import numpy as np

from tunnelsplit import ELECTRON_MASS, HBAR
from tunnelsplit.packets import Propagator, default_xgrid, gaussian_profile
from tunnelsplit.potentials import Rectangular, geometry

OUT = os.path.join(os.path.dirname(__file__), "output")
os.makedirs(OUT, exist_ok=True)

mass = 0.067 * ELECTRON_MASS
l0 = 7.5
k0 = float(np.sqrt(2.0 * mass * 0.25) / HBAR)
prof = gaussian_profile(k0, l0)

scenarios = {
    "barrier": (Rectangular(0.3, 500.0, 505.0), (0.0, 400.0, 420.0)),
    "well": (Rectangular(-0.3, 500.0, 505.0), (0.0, 400.0, 430.0)),
}

try:
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt
except ImportError:
    plt = None

for name, (pot, times) in scenarios.items():
    xg = default_xgrid(pot, k0, l0, mass, max(times))
    prop = Propagator(pot, prof, xg, mass)
    x = xg.values()
    w = xg.trapezoid_weights()
    print(f"-- {name}: <T> = {prop.expected_norm('tr'):.4f}, "
          f"<R> = {prop.expected_norm('ref'):.4f}")
    if plt is not None:
        fig, axes = plt.subplots(len(times), 1, figsize=(8, 9), sharex=True)
    for ax_i, t in enumerate(times):
        full = prop.field(t, "full").values
        tr = prop.field(t, "tr").values
        ref = prop.field(t, "ref").values
        n_tr = float(w @ np.abs(tr) ** 2)
        n_ref = float(w @ np.abs(ref) ** 2)
        print(f"   t = {t:5.0f} fs: |tr|^2 integrates to {n_tr:.6f}, "
              f"|ref|^2 to {n_ref:.6f}")
        np.savetxt(os.path.join(OUT, f"evolution_{name}_t{int(t):04d}.csv"),
                   np.column_stack([x, np.abs(full) ** 2, np.abs(tr) ** 2,
                                    np.abs(ref) ** 2]),
                   delimiter=",",
                   header="x,dens_full,dens_tr,dens_ref", comments="")
        if plt is None:
            continue
        ax = axes[ax_i]
        ax.plot(x, np.abs(full) ** 2, "k--", lw=1, label="full")
        ax.plot(x, np.abs(tr) ** 2, "o", ms=1.5, mfc="none",
                label="transmission")
        ax.plot(x, np.abs(ref) ** 2, "-", lw=1, label="reflection")
        geo = geometry(pot)
        ax.axvspan(geo.a, geo.b, color="orange", alpha=0.25)
        ax.set_ylabel(f"t = {t:.0f} fs")
        ax.set_xlim(-150.0, 900.0)
    if plt is not None:
        axes[0].legend(loc="upper right")
        axes[-1].set_xlabel("x [nm]")
        fig.suptitle(f"{name}: density of the full state and its components")
        fig.tight_layout()
        path = os.path.join(OUT, f"03_evolution_{name}.png")
        fig.savefig(path, dpi=130)
        print("wrote", path)
