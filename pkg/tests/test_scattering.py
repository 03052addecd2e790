import numpy as np
import pytest

from tunnelsplit.model import HBAR, KGrid
from tunnelsplit.potentials import Delta, Rectangular
from tunnelsplit.scattering import (
    auxiliary_amplitudes,
    ode_oracle,
    oracle_table,
    params_table,
    scattering_amplitudes,
    transfer_matrix,
    tunneling_params,
)

from conftest import BARRIER, K0, MASS, POINT, STACK, WELL

FREE = Rectangular(0.0, 500.0, 505.0)
GRID = KGrid(K0 - 8.0 / 15.0, K0 + 8.0 / 15.0, 256)


def rect_T_closed_form(v0, d, k):
    """Independent closed form for a single layer, both energy regimes."""
    kap0sq = 2.0 * MASS * abs(v0) / HBAR**2
    if v0 > 0 and k**2 < kap0sq:
        kap = np.sqrt(kap0sq - k**2)
        osc = np.sinh(kap * d)
    else:
        kap = np.sqrt(k**2 - np.sign(v0) * kap0sq)
        osc = np.sin(kap * d)
    return 1.0 / (1.0 + kap0sq**2 * osc**2 / (4.0 * k**2 * kap**2))


def test_free_layer_is_identity():
    tm = transfer_matrix(FREE, K0, MASS)
    assert tm.q == pytest.approx(1.0, abs=1e-12)
    assert abs(tm.p) < 1e-12
    tp = tunneling_params(FREE, K0, MASS)
    assert tp.T == pytest.approx(1.0, abs=1e-12)
    assert tp.J == pytest.approx(K0 * 5.0, abs=1e-12)


def test_flux_conservation_invariant():
    for p in (BARRIER, WELL, STACK):
        for k in np.linspace(GRID.k_min, GRID.k_max, 33):
            tm = transfer_matrix(p, float(k), MASS)
            assert abs(tm.q) ** 2 - abs(tm.p) ** 2 == pytest.approx(
                1.0, abs=1e-10)


def test_barrier_transmission_matches_closed_form():
    # frozen from the textbook formula evaluated at the scenario's k0
    expected = rect_T_closed_form(0.3, 5.0, K0)
    assert expected == pytest.approx(0.11295641420206144, abs=1e-15)
    tp = tunneling_params(BARRIER, K0, MASS)
    assert tp.T == pytest.approx(expected, abs=1e-12)
    assert tp.T == pytest.approx(0.113, abs=5e-4)
    assert tp.R == 1.0 - tp.T


def test_well_transmission_matches_closed_form():
    tp = tunneling_params(WELL, K0, MASS)
    assert tp.T == pytest.approx(rect_T_closed_form(-0.3, 5.0, K0), abs=1e-12)


def test_delta_transmission_jump_condition():
    tp = tunneling_params(POINT, K0, MASS)
    expected = 1.0 / (1.0 + MASS**2 * 0.05**2 / (HBAR**4 * K0**2))
    assert tp.T == pytest.approx(expected, abs=1e-14)


def test_rejects_nonpositive_k():
    with pytest.raises(ValueError):
        transfer_matrix(BARRIER, 0.0, MASS)
    with pytest.raises(ValueError):
        transfer_matrix(BARRIER, -0.5, MASS)


def test_energy_equal_to_layer_top_is_finite():
    k_top = float(np.sqrt(2.0 * MASS * 0.3) / HBAR)
    tp = tunneling_params(BARRIER, k_top, MASS)
    # analytic kappa -> 0 limit: T = 1 / (1 + (kap0^2 d / 2k)^2)
    kap0sq = 2.0 * MASS * 0.3 / HBAR**2
    expected = 1.0 / (1.0 + (kap0sq * 5.0 / (2.0 * k_top)) ** 2)
    assert tp.T == pytest.approx(expected, rel=1e-10)


def test_scattering_amplitudes_free_and_unitarity():
    amp = scattering_amplitudes(transfer_matrix(FREE, K0, MASS))
    assert amp.a_in == 1.0 and amp.b_in == 0.0
    assert amp.a_out == pytest.approx(1.0, abs=1e-12)
    assert abs(amp.b_out) < 1e-12
    for k in (0.3, K0, 1.1):
        amp = scattering_amplitudes(transfer_matrix(BARRIER, k, MASS))
        assert abs(amp.a_out) ** 2 + abs(amp.b_out) ** 2 == pytest.approx(
            1.0, abs=1e-10)
    amp = scattering_amplitudes(transfer_matrix(BARRIER, K0, MASS))
    assert abs(amp.b_out) ** 2 == pytest.approx(0.887, abs=5e-4)


def test_amplitude_flux_balance():
    for p in (BARRIER, WELL, POINT):
        tm = transfer_matrix(p, K0, MASS)
        for amp in (scattering_amplitudes(tm), *auxiliary_amplitudes(tm)):
            balance = (abs(amp.a_in) ** 2 + abs(amp.b_in) ** 2
                       - abs(amp.a_out) ** 2 - abs(amp.b_out) ** 2)
            assert balance == pytest.approx(0.0, abs=1e-10)


def test_auxiliary_amplitudes_sum_to_left_incidence():
    for p in (BARRIER, WELL, POINT, STACK):
        tm = transfer_matrix(p, K0, MASS)
        full = scattering_amplitudes(tm)
        ref, tr = auxiliary_amplitudes(tm)
        for name in ("a_in", "b_out", "a_out", "b_in"):
            assert getattr(ref, name) + getattr(tr, name) == pytest.approx(
                getattr(full, name), abs=1e-14)


def test_auxiliary_free_case():
    tm = transfer_matrix(FREE, K0, MASS)
    ref, tr = auxiliary_amplitudes(tm)
    assert abs(ref.a_in) < 1e-12 and abs(ref.b_in) < 1e-12
    assert tr.a_in == pytest.approx(1.0, abs=1e-12)


def test_auxiliary_reflection_weight_is_R():
    tm = transfer_matrix(BARRIER, K0, MASS)
    tp = tunneling_params(BARRIER, K0, MASS)
    ref, _ = auxiliary_amplitudes(tm)
    assert ref.a_in.imag == pytest.approx(0.0, abs=1e-14)
    assert ref.a_in.real == pytest.approx(tp.R, abs=1e-10)


def test_symmetric_F_is_zero_or_pi():
    for p in (BARRIER, WELL, STACK, POINT):
        tb = params_table(p, GRID, MASS)
        good = tb.R > 1e-12
        f_mod = np.mod(tb.F[good], 2.0 * np.pi)
        res = np.minimum(np.minimum(np.abs(f_mod),
                                    np.abs(f_mod - 2.0 * np.pi)),
                         np.abs(f_mod - np.pi))
        assert np.max(res) < 1e-8


def test_J_is_continuous_after_unwrapping():
    for p in (BARRIER, WELL, STACK):
        tb = params_table(p, GRID, MASS)
        assert np.max(np.abs(np.diff(tb.J))) < np.pi


def test_F_interpolated_across_resonance():
    # the well has a transmission resonance inside this grid; F must stay
    # finite and the staircase must only step by pi at the zeros of R
    tb = params_table(WELL, GRID, MASS)
    assert np.all(np.isfinite(tb.F))
    assert np.min(tb.R) < 1e-4


def test_free_table_has_interpolated_F():
    tb = params_table(FREE, GRID, MASS)
    assert np.all(tb.T == pytest.approx(1.0, abs=1e-12))
    assert np.all(np.isfinite(tb.F))


def test_signed_amplitude_ratio_squares_to_R_over_T():
    for p in (BARRIER, WELL, STACK):
        tb = params_table(p, GRID, MASS)
        assert np.max(np.abs(tb.w**2 * tb.T - tb.R)) < 1e-10


# ---------------------------------------------------------------------------
# ODE oracle

def test_oracle_agrees_with_transfer_matrix():
    for p in (BARRIER, WELL, STACK):
        tb = params_table(p, GRID, MASS)
        ob = oracle_table(p, GRID, MASS)
        assert np.max(np.abs(tb.T - ob.T)) < 1e-8
        assert np.max(np.abs(tb.J - ob.J)) < 1e-7


def test_oracle_free_case():
    tp = ode_oracle(FREE, K0, MASS)
    assert tp.T == pytest.approx(1.0, abs=1e-10)


def test_oracle_well_matches_above_barrier_closed_form():
    tp = ode_oracle(WELL, K0, MASS)
    assert tp.T == pytest.approx(rect_T_closed_form(-0.3, 5.0, K0), abs=1e-9)


def test_oracle_rejects_insufficient_steps():
    with pytest.raises(ValueError):
        ode_oracle(BARRIER, K0, MASS, n_steps=8)


def test_oracle_rejects_point_potential():
    with pytest.raises(ValueError):
        ode_oracle(POINT, K0, MASS)


def test_delta_against_narrow_layer_limit():
    # a tall, narrow rectangle converges to the point potential
    eps = 1e-3
    tall = Rectangular(0.05 / eps, 500.0, 500.0 + eps)
    tp_rect = ode_oracle(tall, K0, MASS)
    tp_delta = tunneling_params(POINT, K0, MASS)
    assert tp_rect.T == pytest.approx(tp_delta.T, abs=1e-5)
