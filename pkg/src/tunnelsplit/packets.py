"""Gaussian spectral profiles, wave-packet synthesis and k-space moments.

Time-dependent fields are built by spectral superposition over the
stationary states of the chosen channel,

    psi_ch(x, t) = (2 pi)^{-1/2} int A(k) phi_ch(x; k) e^{-i E(k) t / hbar} dk,

with trapezoid quadrature on the profile's k-grid (k > 0 only: profiles
are restricted to packets with negligible negative-momentum weight, which
the completed-scattering setup requires anyway).  The full-channel states
are delta-normalized, so the full norm is 1 and the transmission and
reflection norms are the weighted averages <T> and <R>, each constant in
time.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .model import HBAR, KGrid, WaveField, XGrid, five_point_derivative
from .potentials import Delta, PotentialSpec, Rectangular, geometry, is_symmetric
from .scattering import params_table
from .splitting import stationary_fields

__all__ = [
    "SpectralProfile",
    "GridLeakageError",
    "gaussian_profile",
    "default_kgrid",
    "default_xgrid",
    "packet_halfwidth",
    "Propagator",
    "synthesize",
    "KTables",
    "k_tables",
    "OutMoments",
    "SplitInMoments",
    "out_asymptote_moments",
    "split_in_asymptote_moments",
    "interference_density",
    "get_threads",
]

_EDGE_POWER = 1e-12
_K_FLOOR = 1e-4
_MIN_K0L0 = 3.0


class GridLeakageError(RuntimeError):
    """Probability has leaked off the spatial grid; enlarge the window."""


def get_threads(requested: int | None = None) -> int:
    """Worker count: explicit argument, else TUNNELSPLIT_THREADS, else 1."""
    if requested is not None and requested > 0:
        return requested
    env = os.environ.get("TUNNELSPLIT_THREADS", "")
    try:
        return max(1, int(env))
    except ValueError:
        return 1


@dataclass(eq=False)
class SpectralProfile:
    """Complex incident amplitude A(k) on a KGrid, unit L2 norm."""

    grid: KGrid
    amplitude: np.ndarray
    k0: float
    l0: float

    def weights(self) -> np.ndarray:
        return self.grid.trapezoid_weights()

    def power(self) -> np.ndarray:
        """Quadrature-weighted |A|^2, summing to 1."""
        return self.weights() * np.abs(self.amplitude) ** 2


def default_kgrid(k0: float, l0: float, n_points: int = 1024) -> KGrid:
    """Grid covering k0 +- 8 sigma_k (sigma_k = 1/(2 l0)), floored at k > 0."""
    half = 8.0 / (2.0 * l0)
    return KGrid(max(_K_FLOOR, k0 - half), k0 + half, n_points)


def gaussian_profile(k0: float, l0: float, grid: KGrid | None = None,
                     n_points: int = 1024) -> SpectralProfile:
    """Gaussian amplitude exp(-l0^2 (k-k0)^2), renormalized on the grid.

    Requires k0*l0 >= 3 so that the neglected k <= 0 weight is below the
    completed-scattering tolerance.  The grid edges must carry negligible
    power (< 1e-12 of the peak); the lower edge is exempt when it sits at
    the k > 0 floor.
    """
    if k0 * l0 < _MIN_K0L0:
        raise ValueError(
            f"k0*l0 = {k0 * l0:.3f} < {_MIN_K0L0}: the packet would carry "
            "non-negligible negative momenta")
    if grid is None:
        grid = default_kgrid(k0, l0, n_points)
    ks = grid.values()
    amp = np.exp(-l0**2 * (ks - k0) ** 2).astype(complex)
    power = np.abs(amp) ** 2
    peak = power.max()
    if power[-1] > _EDGE_POWER * peak:
        raise ValueError("profile power is not negligible at k_max; "
                         "widen the wavenumber grid")
    if grid.k_min > 1.5 * _K_FLOOR and power[0] > _EDGE_POWER * peak:
        raise ValueError("profile power is not negligible at k_min; "
                         "widen the wavenumber grid")
    nrm = math.sqrt(float(np.dot(grid.trapezoid_weights(), power)))
    return SpectralProfile(grid=grid, amplitude=amp / nrm, k0=k0, l0=l0)


def packet_halfwidth(l0: float, t: float, mass: float) -> float:
    """Free-spreading half-width l(t) = l0 sqrt(1 + (hbar t / 2 m l0^2)^2)."""
    return l0 * math.sqrt(1.0 + (HBAR * t / (2.0 * mass * l0**2)) ** 2)


def default_xgrid(p: PotentialSpec, k0: float, l0: float, mass: float,
                  t_max: float, L1: float = 0.0, L2: float = 0.0,
                  dx: float = 0.25, pad: float = 30.0) -> XGrid:
    """Window sized so the packet stays on-grid up to t_max (and so the
    reflected center of mass can be tracked down to a - L1)."""
    geo = geometry(p)
    sigma_end = packet_halfwidth(l0, t_max, mass)
    v_hi = HBAR * (k0 + 1.0 / l0) / mass
    tail = 8.0 * max(sigma_end, l0) + pad
    # the reflected packet returns along x = 2a - v t after bouncing
    x_lo = min(-(8.0 * l0 + pad), geo.a - L1 - tail,
               2.0 * geo.a - v_hi * t_max - tail)
    x_hi = max(geo.b + L2, v_hi * t_max) + tail
    n = int(math.ceil((x_hi - x_lo) / dx)) + 1
    return XGrid(x_lo, x_lo + (n - 1) * dx, n)


# ---------------------------------------------------------------------------
# stationary-state basis and synthesis

@lru_cache(maxsize=2)
def _basis_matrices(p: PotentialSpec, kgrid: KGrid, xgrid: XGrid,
                    mass: float, threads: int):
    ks = kgrid.values()
    n_x, n_k = xgrid.n_points, ks.size
    full = np.empty((n_x, n_k), dtype=complex)
    ref = np.empty((n_x, n_k), dtype=complex)

    def fill(span):
        lo, hi = span
        for i in range(lo, hi):
            full[:, i], ref[:, i] = stationary_fields(
                p, float(ks[i]), xgrid, mass)

    if threads > 1:
        bounds = np.linspace(0, n_k, threads + 1).astype(int)
        spans = list(zip(bounds[:-1], bounds[1:]))
        with ThreadPoolExecutor(max_workers=threads) as pool:
            list(pool.map(fill, spans))
    else:
        fill((0, n_k))
    full.flags.writeable = False
    ref.flags.writeable = False
    return full, ref


class Propagator:
    """Precomputed stationary basis for one (potential, profile, window).

    Exposes the synthesized field at arbitrary times; building the basis is
    the expensive step, each time sample afterwards is a matrix-vector
    product.
    """

    def __init__(self, potential: PotentialSpec, profile: SpectralProfile,
                 xgrid: XGrid, mass: float, threads: int | None = None):
        self.potential = potential
        self.profile = profile
        self.xgrid = xgrid
        self.mass = mass
        self._full, self._ref = _basis_matrices(
            potential, profile.grid, xgrid, mass, get_threads(threads))
        ks = profile.grid.values()
        self._energies = (HBAR * ks) ** 2 / (2.0 * mass)
        self._coeff0 = (profile.amplitude * profile.weights()
                        / math.sqrt(2.0 * math.pi))
        tbl = params_table(potential, profile.grid, mass)
        pw = profile.power()
        self._t_bar = float(np.dot(pw, tbl.T))
        self._r_bar = float(np.dot(pw, tbl.R))

    def expected_norm(self, channel: str) -> float:
        if channel == "full":
            return 1.0
        if channel == "tr":
            return self._t_bar
        if channel == "ref":
            return self._r_bar
        raise ValueError(f"unknown channel {channel!r}")

    def _coeffs(self, times: np.ndarray) -> np.ndarray:
        phases = np.exp(-1j * np.outer(self._energies / HBAR, times))
        return self._coeff0[:, None] * phases

    def fields(self, times, channel: str) -> np.ndarray:
        """Field values, shape (n_x, n_times)."""
        times = np.atleast_1d(np.asarray(times, dtype=float))
        c = self._coeffs(times)
        if channel == "full":
            return self._full @ c
        if channel == "ref":
            return self._ref @ c
        if channel == "tr":
            return self._full @ c - self._ref @ c
        raise ValueError(f"unknown channel {channel!r}")

    def field(self, t: float, channel: str,
              check_leak: bool = True) -> WaveField:
        vals = self.fields([t], channel)[:, 0]
        wf = WaveField(grid=self.xgrid, values=vals, time=t, channel=channel)
        if check_leak:
            w = self.xgrid.trapezoid_weights()
            measured = float(np.dot(w, np.abs(vals) ** 2))
            deficit = self.expected_norm(channel) - measured
            if deficit > 1e-6:
                raise GridLeakageError(
                    f"{deficit:.3e} probability is off-grid for channel "
                    f"{channel!r} at t = {t} fs; enlarge the x window")
        return wf

    def norms_and_means(self, times, channel: str):
        """Norms and center-of-mass positions for a batch of times."""
        fields = self.fields(times, channel)
        dens = np.abs(fields) ** 2
        w = self.xgrid.trapezoid_weights()
        norms = w @ dens
        means = (w * self.xgrid.values()) @ dens / norms
        return norms, means


def synthesize(p: PotentialSpec, prof: SpectralProfile, grid: XGrid,
               t: float, channel: str, mass: float,
               threads: int | None = None) -> WaveField:
    """One synthesized field; the stationary basis is cached across calls
    that share (potential, k-grid, x-grid, mass)."""
    return Propagator(p, prof, grid, mass, threads).field(t, channel)


def interference_density(full: WaveField, tr: WaveField,
                         ref: WaveField) -> np.ndarray:
    """Pointwise |psi_full|^2 - |psi_tr|^2 - |psi_ref|^2."""
    if not (full.grid == tr.grid == ref.grid):
        raise ValueError("fields must share one grid")
    if not (full.time == tr.time == ref.time):
        raise ValueError("fields must share one time")
    return (np.abs(full.values) ** 2 - np.abs(tr.values) ** 2
            - np.abs(ref.values) ** 2)


# ---------------------------------------------------------------------------
# spectral tables and weighted moments

@dataclass(eq=False)
class KTables:
    """Tunneling parameters and their k-derivatives on the profile grid.

    ``dLam`` is the derivative of the odd-branch phase representative; it
    stays finite through transmission resonances because it is evaluated
    as -w'/(1 + w^2) (closed forms override it for rectangular and point
    potentials).
    """

    ks: np.ndarray
    T: np.ndarray
    R: np.ndarray
    J: np.ndarray
    F: np.ndarray
    w: np.ndarray
    dT: np.ndarray
    dJ: np.ndarray
    dF: np.ndarray
    dLam: np.ndarray
    Lam: np.ndarray


def k_tables(p: PotentialSpec, kgrid: KGrid, mass: float) -> KTables:
    """Parameter table plus 5-point-stencil derivatives; closed forms are
    used for the rectangular and point potentials where available."""
    base = params_table(p, kgrid, mass)
    h = kgrid.spacing
    dT = five_point_derivative(base.T, h)
    lam = np.arctan2(np.sign(base.w) * np.sqrt(base.T), np.sqrt(base.R))

    if is_symmetric(p):
        dF = np.zeros_like(base.F)
    else:
        dF = five_point_derivative(base.F, h)

    if isinstance(p, (Rectangular, Delta)):
        from .timing import delta_closed_forms, rect_closed_forms
        if isinstance(p, Rectangular):
            cf = rect_closed_forms(p, base.ks, mass)
        else:
            cf = delta_closed_forms(p.strength, base.ks, mass)
        dLam = -cf.x_start
        dJ = cf.d_eff + dLam
    else:
        dw = five_point_derivative(base.w, h)
        dLam = -dw / (1.0 + base.w**2)
        dJ = five_point_derivative(base.J, h)

    return KTables(ks=base.ks, T=base.T, R=base.R, J=base.J, F=base.F,
                   w=base.w, dT=dT, dJ=dJ, dF=dF, dLam=dLam, Lam=lam)


@dataclass(frozen=True)
class OutMoments:
    """Averages over the transmitted / reflected spectral weights.

    ``k_ref`` is the signed mean wavenumber of the reflected packet
    (negative); ``k_ref_in`` = -k_ref is the in-asymptote mean that enters
    the time formulas.
    """

    t_bar: float
    r_bar: float
    k_in: float
    k_tr: float | None
    k_ref: float | None
    k_ref_in: float | None
    jp_tr: float | None
    jmf_ref: float | None
    tp_in: float
    dk_tr: float | None
    dk_ref: float | None


@dataclass(frozen=True)
class SplitInMoments:
    """Weighted in-asymptote derivatives of the odd-branch phase and the
    average starting points they define."""

    lamp_tr: float | None
    lamp_ref: float | None
    x_start_tr: float | None
    x_start_ref: float | None


_WEIGHT_FLOOR = 1e-12


def out_asymptote_moments(prof: SpectralProfile, tables: KTables) -> OutMoments:
    pw = prof.power()
    t_bar = float(pw @ tables.T)
    r_bar = float(pw @ tables.R)
    k_in = float(pw @ tables.ks)
    tp_in = float(pw @ tables.dT)

    if t_bar > _WEIGHT_FLOOR:
        wt = pw * tables.T / t_bar
        k_tr = float(wt @ tables.ks)
        jp_tr = float(wt @ tables.dJ)
        dk_tr = k_tr - k_in
    else:
        k_tr = jp_tr = dk_tr = None
    if r_bar > _WEIGHT_FLOOR:
        wr = pw * tables.R / r_bar
        k_ref_in = float(wr @ tables.ks)
        jmf_ref = float(wr @ (tables.dJ - tables.dF))
        dk_ref = k_ref_in - k_in
        k_ref = -k_ref_in
    else:
        k_ref_in = jmf_ref = dk_ref = k_ref = None
    return OutMoments(t_bar=t_bar, r_bar=r_bar, k_in=k_in, k_tr=k_tr,
                      k_ref=k_ref, k_ref_in=k_ref_in, jp_tr=jp_tr,
                      jmf_ref=jmf_ref, tp_in=tp_in, dk_tr=dk_tr,
                      dk_ref=dk_ref)


def split_in_asymptote_moments(prof: SpectralProfile,
                               tables: KTables) -> SplitInMoments:
    # weight vectors are built exactly as in out_asymptote_moments so that
    # <J'> - <Lam'> cancels bitwise when the integrands coincide pointwise
    pw = prof.power()
    t_bar = float(pw @ tables.T)
    r_bar = float(pw @ tables.R)
    if t_bar > _WEIGHT_FLOOR:
        wt = pw * tables.T / t_bar
        lamp_tr = float(wt @ tables.dLam)
    else:
        lamp_tr = None
    if r_bar > _WEIGHT_FLOOR:
        wr = pw * tables.R / r_bar
        lamp_ref = float(wr @ tables.dLam)
    else:
        lamp_ref = None
    return SplitInMoments(
        lamp_tr=lamp_tr,
        lamp_ref=lamp_ref,
        x_start_tr=None if lamp_tr is None else -lamp_tr,
        x_start_ref=None if lamp_ref is None else -lamp_ref,
    )
