import numpy as np
import pytest

from tunnelsplit.model import HBAR, XGrid
from tunnelsplit.potentials import PiecewiseConstant, Rectangular, geometry
from tunnelsplit.scattering import TunnelingParams, tunneling_params
from tunnelsplit.splitting import (
    select_odd_branch,
    split_amplitudes,
    stationary_triple,
)

from conftest import BARRIER, K0, MASS, POINT, STACK, WELL

GEO = geometry(BARRIER)


def _fine_grid(p, margin=12.0, dx=1e-4):
    g = geometry(p)
    n = int((g.d + 2 * margin) / dx) + 1
    return XGrid(g.a - margin, g.b + margin, n)


def _disc_flux(psi, dx):
    d = (psi[2:] - psi[:-2]) / (2.0 * dx)
    return HBAR / MASS * np.imag(np.conj(psi[1:-1]) * d)


def test_lambda_is_quarter_pi_at_half_transmission():
    tp = TunnelingParams(k=1.0, T=0.5, R=0.5, J=0.0, F=0.0)
    geo = geometry(Rectangular(0.1, 1.0, 2.0))
    assert split_amplitudes(tp, "plus", geo).lam == pytest.approx(np.pi / 4)
    assert split_amplitudes(tp, "minus", geo).lam == pytest.approx(-np.pi / 4)


def test_full_reflection_limit():
    tp = TunnelingParams(k=1.0, T=0.0, R=1.0, J=0.2, F=0.0)
    geo = geometry(Rectangular(0.1, 1.0, 2.0))
    sp = split_amplitudes(tp, "plus", geo)
    assert sp.lam == pytest.approx(0.0)
    assert sp.a_in_ref == pytest.approx(1.0 * np.exp(0j), abs=1e-12)


def test_paper_barrier_lambda_value():
    tp = tunneling_params(BARRIER, K0, MASS)
    sp = split_amplitudes(tp, "plus", GEO)
    expected = np.arctan(np.sqrt(tp.T / tp.R))
    assert sp.lam == pytest.approx(expected, abs=1e-14)
    assert sp.lam == pytest.approx(0.3429, abs=2e-4)


def test_split_amplitude_invariants_across_grid():
    for p in (BARRIER, WELL, STACK):
        geo = geometry(p)
        for k in np.linspace(0.2, 1.15, 23):
            tp = tunneling_params(p, float(k), MASS)
            if tp.R <= 1e-12:
                continue
            branch = select_odd_branch(p, tp, MASS)
            sp = split_amplitudes(tp, branch, geo)
            assert abs(sp.a_in_ref) ** 2 == pytest.approx(tp.R, abs=1e-10)
            assert abs(sp.b_out_ref) ** 2 == pytest.approx(tp.R, abs=1e-10)
            assert sp.a_in_ref.real == pytest.approx(tp.R, abs=1e-10)
            # flux-coincidence condition for the transmitted part
            b_out = sp.b_out_ref
            assert (sp.a_in_ref - sp.b_out_ref * np.conj(b_out)).real == \
                pytest.approx(0.0, abs=1e-10)
            # the incident amplitudes of the two channels share the unit wave
            a_in_tr = 1.0 - sp.a_in_ref
            assert abs(a_in_tr) ** 2 + abs(sp.a_in_ref) ** 2 == \
                pytest.approx(1.0, abs=1e-10)


def test_zero_reflection_flag():
    tp = TunnelingParams(k=1.0, T=1.0, R=0.0, J=0.1, F=0.0)
    sp = split_amplitudes(tp, "plus", GEO)
    assert sp.zero
    assert sp.a_in_ref == 0.0 and sp.b_out_ref == 0.0


def test_select_odd_branch_follows_sign_rule():
    # F = 0 picks the upper root, F = pi the lower one
    tp = tunneling_params(BARRIER, K0, MASS)
    assert abs(np.sin(tp.F)) < 1e-10 and np.cos(tp.F) > 0
    assert select_odd_branch(BARRIER, tp, MASS) == "plus"
    k_pi = 1.05   # above-barrier, sin(kappa d) < 0 sector
    tp_pi = tunneling_params(BARRIER, k_pi, MASS)
    assert np.cos(tp_pi.F) < 0
    assert select_odd_branch(BARRIER, tp_pi, MASS) == "minus"


def test_select_odd_branch_residual_contrast():
    from tunnelsplit.splitting import _parity_residual
    tp = tunneling_params(BARRIER, K0, MASS)
    res = {b: _parity_residual(split_amplitudes(tp, b, GEO), GEO, K0)
           for b in ("plus", "minus")}
    assert res["plus"] < 1e-8
    assert res["minus"] > 0.1


def test_select_odd_branch_detects_corrupt_phase():
    tp = tunneling_params(BARRIER, 1.05, MASS)  # true F = pi
    corrupted = TunnelingParams(k=tp.k, T=tp.T, R=tp.R, J=tp.J, F=0.0)
    with pytest.raises(RuntimeError):
        select_odd_branch(BARRIER, corrupted, MASS)


def test_select_odd_branch_requires_symmetry():
    asym = PiecewiseConstant(500.0, ((0.1, 2.0), (0.2, 3.0)))
    tp = tunneling_params(asym, K0, MASS)
    with pytest.raises(ValueError):
        select_odd_branch(asym, tp, MASS)


@pytest.mark.parametrize("p,k", [
    (BARRIER, K0),                                  # under the barrier
    (BARRIER, 0.95),                                # just under the top edge
    (BARRIER, float(np.sqrt(2 * MASS * 0.3) / HBAR)),  # exactly at the top
    (BARRIER, 1.1),                                 # above, F = pi sector
    (WELL, K0),
    (WELL, 1.03),                                   # near the well resonance
    (STACK, K0),
    (POINT, K0),
])
def test_stationary_triple_flux_laws(p, k):
    grid = _fine_grid(p)
    trip = stationary_triple(p, k, grid, MASS)
    tp = tunneling_params(p, k, MASS)
    scale = HBAR * k / MASS
    j_ref = _disc_flux(trip.phi_ref, grid.dx)
    j_tr = _disc_flux(trip.phi_tr, grid.dx)
    assert np.max(np.abs(j_ref)) < 1e-8 * scale
    assert np.max(np.abs(j_tr - scale * tp.T)) < 1e-8
    # decomposition is exact by construction
    assert np.max(np.abs(trip.phi_full - trip.phi_tr - trip.phi_ref)) \
        < 1e-12 * np.max(np.abs(trip.phi_full))


def test_stationary_triple_vanishes_beyond_midpoint():
    grid = _fine_grid(BARRIER)
    trip = stationary_triple(BARRIER, K0, grid, MASS)
    x = grid.values()
    geo = geometry(BARRIER)
    assert np.all(trip.phi_ref[x >= geo.x_mid] == 0.0)
    # the density vanishes linearly toward x_mid (continuous at the join)
    inside = np.flatnonzero(x < geo.x_mid)
    last = inside[-1]
    slope = abs(trip.phi_ref[last - 1] - trip.phi_ref[last - 2]) / grid.dx
    dist = geo.x_mid - x[last]
    assert abs(trip.phi_ref[last]) < 3.0 * slope * max(dist, grid.dx)


def test_stationary_triple_outer_interior_continuity():
    # the interior closed form must meet the outer standing wave at x = a,
    # evaluated directly from the two formulas (1e-10 relative)
    from tunnelsplit.scattering import kappa_squared, propagation_entries
    from tunnelsplit.splitting import _snapped_f
    geo = geometry(BARRIER)
    for k in (0.4, K0, 0.95, float(np.sqrt(2 * MASS * 0.3) / HBAR), 1.1):
        tp = tunneling_params(BARRIER, k, MASS)
        branch = select_odd_branch(BARRIER, tp, MASS)
        sp = split_amplitudes(tp, branch, geo)
        sq_r = np.sqrt(tp.R)
        outer = 2.0 * sq_r * np.exp(1j * sp.phi_plus) * np.cos(
            k * geo.a + sp.phi_minus)
        kap2 = float(kappa_squared(0.3, k, MASS))
        theta = k * geo.a + sp.phi_minus
        c_half, s_half = propagation_entries(kap2, 0.5 * geo.d)
        coeff = (kap2 * np.cos(theta) * float(s_half)
                 - k * np.sin(theta) * float(c_half))
        _, s_at_a = propagation_entries(kap2, geo.a - geo.x_mid)
        interior = 2.0 * sq_r * np.exp(1j * sp.phi_plus) * coeff * float(s_at_a)
        assert abs(outer - interior) <= 1e-10 * abs(outer)


def test_stationary_triple_multilayer_interior_is_odd():
    # linear extrapolation of the marched interior solution hits zero at
    # the midpoint
    geo = geometry(STACK)
    grid = _fine_grid(STACK, dx=2e-4)
    trip = stationary_triple(STACK, K0, grid, MASS)
    x = grid.values()
    inside = np.flatnonzero(x < geo.x_mid)
    i1, i0 = inside[-1], inside[-2]
    slope = (trip.phi_ref[i1] - trip.phi_ref[i0]) / grid.dx
    extrap = trip.phi_ref[i1] + slope * (geo.x_mid - x[i1])
    assert abs(extrap) < 1e-8 * np.max(np.abs(trip.phi_ref))


def test_stationary_triple_rejects_asymmetric():
    asym = PiecewiseConstant(500.0, ((0.1, 2.0), (0.2, 3.0)))
    with pytest.raises(ValueError):
        stationary_triple(asym, K0, _fine_grid(asym, dx=1e-3), MASS)


def test_stationary_triple_requires_covering_grid():
    with pytest.raises(ValueError):
        stationary_triple(BARRIER, K0, XGrid(501.0, 504.0, 101), MASS)
