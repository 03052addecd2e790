"""Center-of-mass tracking, exact and asymptotic characteristic times.

Exact times are root differences of the channel center-of-mass trajectory
<x>(t): the transmission time is the largest root of <x>_tr(t) = b + L2
minus the smallest root of <x>_tr(t) = a - L1, and the reflection time is
the largest minus the smallest root of <x>_ref(t) = a - L1.  Because the
channel norms are constant these differences are non-negative for any
L1, L2 >= 0.

Asymptotic times come from the in/out asymptote moments,

    tau_tr  = m (<J'>_tr  - <Lam'>_tr  + L1 + L2) / (hbar <k>_tr),
    tau_ref = m (<J'-F'>_ref - <Lam'>_ref + 2 L1) / (hbar <k>_ref),

and may be negative; the L-independent parts define effective barrier
widths d_eff.  For a single rectangular layer (barrier or well) d_eff(k)
and the average starting point x_start(k) = -Lam'(k) have closed forms,
written here as entire functions of gamma = 2 m V0 / hbar^2 - k^2 so one
expression covers E < V0, E = V0 and E > V0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .model import HBAR, XGrid
from .packets import (
    KTables,
    OutMoments,
    Propagator,
    SpectralProfile,
    SplitInMoments,
    default_xgrid,
    k_tables,
    out_asymptote_moments,
    packet_halfwidth,
    split_in_asymptote_moments,
)
from .potentials import Delta, PotentialSpec, Rectangular, geometry, is_symmetric
from .scattering import propagation_entries

__all__ = [
    "ClosedForms",
    "rect_closed_forms",
    "delta_closed_forms",
    "cm_trajectory",
    "ExactTimes",
    "exact_times",
    "AsymptoticTimes",
    "asymptotic_times",
    "asymptotic_from_moments",
    "EffectiveWidths",
    "effective_widths",
    "SwpaTimes",
    "swpa_phase_times",
    "TimingReport",
    "timing_report",
]

_WEIGHT_FLOOR = 1e-12


# ---------------------------------------------------------------------------
# closed forms for rectangular and point potentials

def _sinhc2(gamma, d):
    """(sinhc(gamma, d) - d) / gamma, entire in gamma."""
    gamma = np.asarray(gamma, dtype=float)
    z = gamma * d * d
    small = np.abs(z) < 1e-2
    out = np.empty_like(gamma)
    if np.any(small):
        zs = z[small]
        out[small] = d**3 * (1.0 / 6.0 + zs / 120.0 + zs**2 / 5040.0
                             + zs**3 / 362880.0)
    if np.any(~small):
        _, s = propagation_entries(gamma[~small], d)
        out[~small] = (s - d) / gamma[~small]
    return out


def _cminus(gamma, d):
    """(d*coshc(gamma, d) - sinhc(gamma, d)) / gamma, entire in gamma."""
    gamma = np.asarray(gamma, dtype=float)
    z = gamma * d * d
    small = np.abs(z) < 1e-2
    out = np.empty_like(gamma)
    if np.any(small):
        zs = z[small]
        out[small] = d**3 * (1.0 / 3.0 + zs / 30.0 + zs**2 / 840.0
                             + zs**3 / 45360.0)
    if np.any(~small):
        c, s = propagation_entries(gamma[~small], d)
        out[~small] = (d * c - s) / gamma[~small]
    return out


@dataclass(frozen=True)
class ClosedForms:
    """Effective width and average starting point at given wavenumbers."""

    d_eff: np.ndarray | float
    x_start: np.ndarray | float


def rect_closed_forms(p: Rectangular, k, mass: float) -> ClosedForms:
    """d_eff(k) and x_start(k) for a single rectangular layer.

    With sig0 = 2 m V0 / hbar^2, gamma = sig0 - k^2, S = sinhc(gamma, d):

        d_eff   = 4 (k^2 + sig0 gamma S_half^2)(d + sig0 (S-d)/gamma)
                  / (4 k^2 + sig0^2 S^2)
        x_start = -2 sig0 (S + k^2 (d C - S)/gamma) / (4 k^2 + sig0^2 S^2)

    which reduce to the hyperbolic (E < V0) and trigonometric (E > V0)
    branch expressions and stay finite at E = V0.
    """
    karr = np.atleast_1d(np.asarray(k, dtype=float))
    d = p.b - p.a
    sig0 = 2.0 * mass * p.v0 / HBAR**2
    gamma = sig0 - karr**2
    _, s_half = propagation_entries(gamma, 0.5 * d)
    _, s_full = propagation_entries(gamma, d)
    denom = 4.0 * karr**2 + sig0**2 * s_full**2
    d_eff = 4.0 * (karr**2 + sig0 * gamma * s_half**2) \
        * (d + sig0 * _sinhc2(gamma, d)) / denom
    x_start = -2.0 * sig0 * (s_full + karr**2 * _cminus(gamma, d)) / denom
    if np.isscalar(k):
        return ClosedForms(d_eff=float(d_eff[0]), x_start=float(x_start[0]))
    return ClosedForms(d_eff=d_eff, x_start=x_start)


def delta_closed_forms(strength: float, k, mass: float) -> ClosedForms:
    """d_eff = 0 identically; x_start = -m hbar^2 W / (hbar^4 k^2 + m^2 W^2).

    The transmission and odd-branch phases coincide pointwise for the
    point potential, so the effective width vanishes for every k.
    """
    karr = np.atleast_1d(np.asarray(k, dtype=float))
    x_start = (-mass * HBAR**2 * strength
               / (HBAR**4 * karr**2 + mass**2 * strength**2))
    if np.isscalar(k):
        return ClosedForms(d_eff=0.0, x_start=float(x_start[0]))
    return ClosedForms(d_eff=np.zeros_like(karr), x_start=x_start)


# ---------------------------------------------------------------------------
# center-of-mass tracking and exact times

def cm_trajectory(p: PotentialSpec, prof: SpectralProfile, channel: str,
                  times, mass: float, xgrid: XGrid | None = None,
                  threads: int | None = None) -> list[tuple[float, float]]:
    """(t, <x>) samples of the channel center of mass."""
    if channel not in ("tr", "ref"):
        raise ValueError("trajectories are defined for the 'tr' and 'ref' "
                         "channels")
    times = np.atleast_1d(np.asarray(times, dtype=float))
    if xgrid is None:
        xgrid = default_xgrid(p, prof.k0, prof.l0, mass, float(times.max()))
    prop = Propagator(p, prof, xgrid, mass, threads)
    if prop.expected_norm(channel) < _WEIGHT_FLOOR:
        raise ValueError(f"channel {channel!r} carries no probability")
    _, means = prop.norms_and_means(times, channel)
    return list(zip(times.tolist(), means.tolist()))


@dataclass(frozen=True)
class ExactTimes:
    """Root-difference times; None marks a crossing that never occurs."""

    dt_tr: float | None
    dt_ref: float | None
    t1_tr: float | None = None
    t2_tr: float | None = None
    t1_ref: float | None = None
    t2_ref: float | None = None


def _mean_at(prop: Propagator, channel: str, t: float) -> float:
    _, m = prop.norms_and_means([t], channel)
    return float(m[0])


def _bisect_crossing(prop, channel, target, t_lo, t_hi, f_lo, refine):
    while t_hi - t_lo > refine:
        t_mid = 0.5 * (t_lo + t_hi)
        f_mid = _mean_at(prop, channel, t_mid) - target
        if (f_mid > 0) == (f_lo > 0):
            t_lo, f_lo = t_mid, f_mid
        else:
            t_hi = t_mid
    return 0.5 * (t_lo + t_hi)


def _crossing_times(prop: Propagator, channel: str, target: float,
                    t_hi: float, step: float, refine: float,
                    v_bound: float) -> list[float]:
    """All roots of <x>(t) = target on [0, t_hi], bracketed on a coarse
    grid, re-scanned at ``step`` near the target, bisected to ``refine``."""
    stride = 8
    coarse = np.arange(0.0, t_hi + stride * step, stride * step)
    _, means = prop.norms_and_means(coarse, channel)
    f = means - target
    margin = 1.5 * v_bound * stride * step
    near = (np.abs(f) < margin)
    flips = np.sign(f[:-1]) != np.sign(f[1:])
    hot = near[:-1] | near[1:] | flips

    roots = []
    for i in np.flatnonzero(hot):
        fine = np.arange(coarse[i], coarse[i + 1] + 0.5 * step, step)
        _, fm = prop.norms_and_means(fine, channel)
        g = fm - target
        for j in range(g.size - 1):
            if g[j] == 0.0:
                roots.append(float(fine[j]))
            elif (g[j] > 0) != (g[j + 1] > 0):
                roots.append(_bisect_crossing(
                    prop, channel, target, float(fine[j]), float(fine[j + 1]),
                    float(g[j]), refine))
    return sorted(set(round(r, 6) for r in roots))


def exact_times(p: PotentialSpec, prof: SpectralProfile, L1: float, L2: float,
                mass: float, bracket_step: float = 1.0, refine: float = 0.01,
                xgrid: XGrid | None = None, dx: float = 0.25,
                threads: int | None = None) -> ExactTimes:
    """Exact transmission and reflection times for the interval
    [a - L1, b + L2] by center-of-mass timing."""
    if L1 < 0 or L2 < 0:
        raise ValueError("L1 and L2 must be non-negative")
    if not is_symmetric(p):
        raise ValueError("exact channel times require a symmetric potential")
    geo = geometry(p)
    tables = k_tables(p, prof.grid, mass)
    om = out_asymptote_moments(prof, tables)
    sm = split_in_asymptote_moments(prof, tables)

    target_in = geo.a - L1
    target_out = geo.b + L2
    x0_tr = sm.x_start_tr or 0.0
    x0_ref = sm.x_start_ref or 0.0
    if target_in < max(x0_tr, x0_ref) + 2.0 * prof.l0:
        raise ValueError("a - L1 intrudes into the packet's start region")

    v_bound = HBAR * prof.grid.k_max / mass
    t_hi = 0.0
    if om.k_tr is not None:
        v_tr = HBAR * om.k_tr / mass
        t_est = (target_out - x0_tr) / v_tr
        t_hi = max(t_hi, (target_out - x0_tr
                          + 8.0 * packet_halfwidth(prof.l0, t_est, mass)
                          + 30.0) / v_tr)
    if om.k_ref_in is not None:
        v_ref = HBAR * om.k_ref_in / mass
        path = (geo.a - x0_ref) + (geo.a - target_in)
        t_est = path / v_ref
        t_hi = max(t_hi, (path + 8.0 * packet_halfwidth(prof.l0, t_est, mass)
                          + 30.0) / v_ref)
    t_hi *= 1.15

    for _ in range(3):
        grid = xgrid or default_xgrid(p, prof.k0, prof.l0, mass, t_hi, L1, L2,
                                      dx=dx)
        prop = Propagator(p, prof, grid, mass, threads)

        t1_tr = t2_tr = t1_ref = t2_ref = None
        dt_tr = dt_ref = None
        if om.k_tr is not None:
            roots_in = _crossing_times(prop, "tr", target_in, t_hi,
                                       bracket_step, refine, v_bound)
            roots_out = _crossing_times(prop, "tr", target_out, t_hi,
                                        bracket_step, refine, v_bound)
            if roots_in and roots_out:
                t1_tr, t2_tr = roots_in[0], roots_out[-1]
                dt_tr = t2_tr - t1_tr
            if not roots_out or _mean_at(prop, "tr", t_hi) < target_out:
                t_hi *= 1.5   # transmitted CM not safely past Z2 yet
                if xgrid is None:
                    continue
        if om.k_ref_in is not None:
            roots = _crossing_times(prop, "ref", target_in, t_hi,
                                    bracket_step, refine, v_bound)
            if roots:
                t1_ref, t2_ref = roots[0], roots[-1]
                dt_ref = t2_ref - t1_ref
            elif L1 == 0.0:
                dt_ref = 0.0   # the reflected CM never enters the barrier
        return ExactTimes(dt_tr=dt_tr, dt_ref=dt_ref, t1_tr=t1_tr,
                          t2_tr=t2_tr, t1_ref=t1_ref, t2_ref=t2_ref)
    raise RuntimeError("transmitted center of mass did not clear b + L2 "
                       "within the extended horizon")


# ---------------------------------------------------------------------------
# asymptotic times, effective widths, comparison phase times

@dataclass(frozen=True)
class AsymptoticTimes:
    tau_tr: float | None
    tau_ref: float | None
    tau_tr_as: float | None
    tau_ref_as: float | None


def asymptotic_from_moments(om: OutMoments, sm: SplitInMoments, L1: float,
                            L2: float, mass: float) -> AsymptoticTimes:
    tau_tr = tau_tr_as = tau_ref = tau_ref_as = None
    if om.k_tr is not None and sm.lamp_tr is not None:
        scale = mass / (HBAR * om.k_tr)
        tau_tr_as = scale * (om.jp_tr - sm.lamp_tr)
        tau_tr = scale * (om.jp_tr - sm.lamp_tr + L1 + L2)
    if om.k_ref_in is not None and sm.lamp_ref is not None:
        scale = mass / (HBAR * om.k_ref_in)
        tau_ref_as = scale * (om.jmf_ref - sm.lamp_ref)
        tau_ref = scale * (om.jmf_ref - sm.lamp_ref + 2.0 * L1)
    return AsymptoticTimes(tau_tr=tau_tr, tau_ref=tau_ref,
                           tau_tr_as=tau_tr_as, tau_ref_as=tau_ref_as)


def asymptotic_times(p: PotentialSpec, prof: SpectralProfile, L1: float,
                     L2: float, mass: float) -> AsymptoticTimes:
    """Asymptote-based transmission/reflection times (may be negative)."""
    tables = k_tables(p, prof.grid, mass)
    om = out_asymptote_moments(prof, tables)
    sm = split_in_asymptote_moments(prof, tables)
    return asymptotic_from_moments(om, sm, L1, L2, mass)


@dataclass(frozen=True)
class EffectiveWidths:
    d_eff_tr: float | None
    d_eff_ref: float | None


def effective_widths(prof: SpectralProfile, tables: KTables) -> EffectiveWidths:
    """<J'>_tr - <Lam'>_tr and <J'-F'>_ref - <Lam'>_ref."""
    om = out_asymptote_moments(prof, tables)
    sm = split_in_asymptote_moments(prof, tables)
    d_tr = None if om.jp_tr is None else om.jp_tr - sm.lamp_tr
    d_ref = None if om.jmf_ref is None else om.jmf_ref - sm.lamp_ref
    return EffectiveWidths(d_eff_tr=d_tr, d_eff_ref=d_ref)


@dataclass(frozen=True)
class SwpaTimes:
    dt_tr: float | None
    dt_ref: float | None


def swpa_phase_times(prof: SpectralProfile, tables: KTables, L1: float,
                     L2: float, a: float, mass: float) -> SwpaTimes:
    """Legacy phase times that clock the full packet's center of mass.

    Reported for comparison only: they depend on the start distance ``a``
    through their last terms and can go negative; they are not
    characteristic times of the particle.
    """
    om = out_asymptote_moments(prof, tables)
    dt_tr = dt_ref = None
    if om.k_tr is not None:
        dt_tr = mass / HBAR * (
            (om.jp_tr + L2) / om.k_tr + L1 / om.k_in
            + a * (1.0 / om.k_tr - 1.0 / om.k_in))
    if om.k_ref_in is not None:
        dt_ref = mass / HBAR * (
            (om.jmf_ref + L1) / om.k_ref_in + L1 / om.k_in
            + a * (1.0 / om.k_ref_in - 1.0 / om.k_in))
    return SwpaTimes(dt_tr=dt_tr, dt_ref=dt_ref)


# ---------------------------------------------------------------------------
# combined report

@dataclass(frozen=True)
class TimingReport:
    scenario: str
    L1: float
    L2: float
    t_bar: float
    r_bar: float
    k_tr: float | None
    k_ref: float | None
    exact_tr: float | None
    exact_ref: float | None
    tau_tr: float | None
    tau_ref: float | None
    tau_tr_as: float | None
    tau_ref_as: float | None
    d_eff_tr: float | None
    d_eff_ref: float | None
    x_start_tr: float | None
    x_start_ref: float | None
    swpa_tr: float | None
    swpa_ref: float | None


def timing_report(p: PotentialSpec, prof: SpectralProfile, mass: float,
                  L1: float = 0.0, L2: float = 0.0, scenario: str = "",
                  include_exact: bool = True,
                  threads: int | None = None) -> TimingReport:
    """Run the full timing pipeline for one scenario."""
    geo = geometry(p)
    tables = k_tables(p, prof.grid, mass)
    om = out_asymptote_moments(prof, tables)
    sm = split_in_asymptote_moments(prof, tables)
    asym = asymptotic_from_moments(om, sm, L1, L2, mass)
    widths = effective_widths(prof, tables)
    swpa = swpa_phase_times(prof, tables, L1, L2, geo.a, mass)
    if include_exact:
        ex = exact_times(p, prof, L1, L2, mass, threads=threads)
    else:
        ex = ExactTimes(dt_tr=None, dt_ref=None)
    return TimingReport(
        scenario=scenario, L1=L1, L2=L2, t_bar=om.t_bar, r_bar=om.r_bar,
        k_tr=om.k_tr, k_ref=om.k_ref,
        exact_tr=ex.dt_tr, exact_ref=ex.dt_ref,
        tau_tr=asym.tau_tr, tau_ref=asym.tau_ref,
        tau_tr_as=asym.tau_tr_as, tau_ref_as=asym.tau_ref_as,
        d_eff_tr=widths.d_eff_tr, d_eff_ref=widths.d_eff_ref,
        x_start_tr=sm.x_start_tr, x_start_ref=sm.x_start_ref,
        swpa_tr=swpa.dt_tr, swpa_ref=swpa.dt_ref,
    )
