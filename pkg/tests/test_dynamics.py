import numpy as np
import pytest

from capwaves.dynamics import (
    DiagonalState,
    RegularityError,
    Trajectory,
    WaterState,
    auxiliary_fields,
    diagonal_from_water,
    evolve,
    hamiltonian,
    rhs_diagonal,
    rhs_full,
    scaling_transform,
)
from capwaves.spectral import FourierGrid, SpectralField, random_holomorphic


def flat_state(n=64, L=1.0):
    g = FourierGrid(n, L)
    return WaterState(SpectralField.zeros(g), SpectralField.zeros(g))


def single_mode_state(delta, n=64, L=1.0, mode=-1):
    g = FourierGrid(n, L)
    W = SpectralField.from_modes(g, {mode: delta})
    Q = SpectralField.from_modes(g, {mode: delta})
    return WaterState(W, Q)


def random_state(eps, seed=0, n=64, L=1.0, band=None):
    g = FourierGrid(n, L)
    r = np.random.default_rng(seed)
    W = random_holomorphic(g, r, eps, band=band)
    Q = random_holomorphic(g, r, eps, band=band)
    return WaterState(W, Q)


def coeff_norm(f):
    return np.max(np.abs(f.coeffs))


# -- auxiliary fields ----------------------------------------------------------

def test_flat_state_aux_and_rhs_vanish():
    s = flat_state()
    aux = auxiliary_fields(s)
    for f in (aux.F, aux.R, aux.Y, aux.b, aux.a, aux.M, aux.c):
        assert coeff_norm(f) < 1e-15
    assert abs(aux.J.mode(0) - 1.0) < 1e-14
    Wt, Qt = rhs_full(s)
    assert coeff_norm(Wt) < 1e-15 and coeff_norm(Qt) < 1e-15


def test_m_two_forms_agree():
    # the two displayed forms of M agree on spectrally resolved states
    s = random_state(1e-2, seed=1, n=128, band=(1, 8))
    aux = auxiliary_fields(s)
    rel = coeff_norm(aux.M - aux.M_alt) / coeff_norm(aux.M)
    assert rel < 1e-10


def test_aux_reality_invariants():
    s = random_state(5e-2, seed=2)
    aux = auxiliary_fields(s)
    for f in (aux.b, aux.a, aux.c, aux.J):
        vals = f.values()
        assert np.max(np.abs(vals.imag)) < 1e-10 * max(1.0, np.max(np.abs(vals)))


def test_f_small_amplitude_expansion():
    delta = 1e-3
    s = single_mode_state(delta)
    aux = auxiliary_fields(s)
    expected = SpectralField.from_modes(s.grid, {-1: -1j * delta})
    assert coeff_norm(aux.F - expected) <= 10 * delta ** 2


def test_gate_violation_raises():
    # |W_a| ~ 0.6 at the worst point violates |1+W_a| >= 0.5
    s = single_mode_state(0.9)
    with pytest.raises(RegularityError):
        auxiliary_fields(s)


# -- right-hand sides ----------------------------------------------------------

def rhs_linear(s):
    return -1.0 * s.Q.derivative(), (-1j * s.sigma) * s.W.derivative(2)


def test_rhs_linearization_scaling():
    resid = {}
    for eps in (1e-3, 2e-3):
        s = random_state(eps, seed=3)
        Wt, Qt = rhs_full(s)
        lW, lQ = rhs_linear(s)
        resid[eps] = np.sqrt((Wt - lW).l2_norm() ** 2 + (Qt - lQ).l2_norm() ** 2)
    ratio = resid[2e-3] / resid[1e-3]
    assert abs(ratio - 4.0) < 0.6  # 4 +- 15%


def test_rhs_scaling_equivariance():
    lam = 2.0
    s = random_state(1e-2, seed=4, L=2.0)
    Wt, Qt = rhs_full(s)
    s2 = scaling_transform(s, lam)
    Wt2, Qt2 = rhs_full(s2)
    # dW'/dt' = lam^{1/2} dW/dt, dQ'/dt' = lam dQ/dt on matched coefficients
    errW = np.max(np.abs(Wt2.coeffs - lam ** 0.5 * Wt.coeffs))
    errQ = np.max(np.abs(Qt2.coeffs - lam * Qt.coeffs))
    assert errW < 1e-10 * max(np.abs(Wt2.coeffs).max(), 1e-16)
    assert errQ < 1e-10 * max(np.abs(Qt2.coeffs).max(), 1e-16)


def test_rhs_outputs_holomorphic():
    s = random_state(1e-2, seed=5)
    for f in rhs_full(s):
        assert f.holomorphic
        assert f.positive_spectrum_fraction() <= 1e-13


def test_diagonal_flat_zero():
    s = flat_state()
    d = diagonal_from_water(s)
    Wt, Rt = rhs_diagonal(d)
    assert coeff_norm(Wt) < 1e-14 and coeff_norm(Rt) < 1e-14


def test_diagonal_consistency_with_full():
    # chain rule: Wd_t = (W_t)_a, R_t = (Q_t)_a/(1+W_a) - Q_a (W_t)_a/(1+W_a)^2
    from capwaves.spectral import field_from_fine, fine_values

    s = random_state(1e-3, seed=6, n=128, band=(1, 16))
    Wt, Qt = rhs_full(s)
    g = s.grid
    w = fine_values(s.W.derivative(), 2)
    q = fine_values(s.Q.derivative(), 2)
    wta = fine_values(Wt.derivative(), 2)
    qta = fine_values(Qt.derivative(), 2)
    Rt_chain = field_from_fine(g, qta / (1 + w) - q * wta / (1 + w) ** 2)

    d = diagonal_from_water(s)
    Wdt, Rt = rhs_diagonal(d)
    errW = coeff_norm(Wdt - Wt.derivative()) / max(coeff_norm(Wt.derivative()), 1e-16)
    errR = coeff_norm(Rt - Rt_chain) / max(coeff_norm(Rt_chain), 1e-16)
    assert errW < 1e-8
    assert errR < 1e-8


def test_diagonal_term_deletion():
    # with M and b forced to zero the Wd equation is -(1+Wd) R_a / (1+conj(Wd))
    from capwaves.spectral import field_from_fine, fine_values, scrub_positive

    s = random_state(1e-2, seed=7)
    d = diagonal_from_water(s)
    aux = auxiliary_fields(d)
    aux.M = SpectralField.zeros(d.grid)
    aux.b = SpectralField.zeros(d.grid)
    Wt, _ = rhs_diagonal(d, aux)
    w = fine_values(d.Wd, 2)
    ra = fine_values(aux.R.derivative(), 2)
    expected = scrub_positive(
        field_from_fine(d.grid, -(1 + w) * ra / (1 + np.conj(w))))
    assert coeff_norm(Wt - expected) < 1e-12


# -- Hamiltonian ---------------------------------------------------------------

def test_hamiltonian_flat_zero():
    assert abs(hamiltonian(flat_state())) < 1e-14


def test_hamiltonian_single_mode_expansion():
    # kinetic 2 pi L delta^2 plus the equipartition tension part
    delta = 1e-3
    s = single_mode_state(delta)
    quad = 2 * np.pi * delta ** 2 + 2 * np.pi * delta ** 2
    assert abs(hamiltonian(s) - quad) <= 10 * delta * quad


def test_hamiltonian_short_run_drift():
    s = random_state(1e-3, seed=8, n=64, band=(1, 6))
    h0 = hamiltonian(s)
    traj = evolve(s, t_end=1.0, dt=2e-3, snap_dt=0.5)
    h1 = hamiltonian(traj.final)
    assert abs(h1 - h0) <= 1e-9 * abs(h0)


def test_hamiltonian_drift_is_fourth_order():
    s = random_state(1e-2, seed=88, n=64, band=(1, 6))
    h0 = hamiltonian(s)
    drifts = []
    for dt in (4e-3, 2e-3):
        traj = evolve(s.copy(), t_end=1.0, dt=dt, snap_dt=0.5)
        drifts.append(abs(hamiltonian(traj.final) - h0))
    assert drifts[1] < drifts[0] / 8


# -- evolution -----------------------------------------------------------------

def test_linear_mode_exact_phase():
    # W = Q = eps e^{i(t-a)} solves the linear system; the integrating-factor
    # scheme reproduces it to machine phase accuracy
    eps = 0.01
    s = single_mode_state(eps, mode=-1)
    traj = evolve(s, t_end=2.0, dt=1e-3, nonlinear=False)
    got = traj.final.Q.mode(-1)
    expected = eps * np.exp(1j * 2.0)
    assert abs(got - expected) <= 1e-10 * eps * 2.0
    gotW = traj.final.W.mode(-1)
    assert abs(gotW - expected) <= 1e-10 * eps * 2.0


def test_linear_dispersion_mode_minus_four():
    # pure right-moving component at k=-4: Qhat = |k|^{1/2} What
    eps = 0.01
    g = FourierGrid(64)
    W = SpectralField.from_modes(g, {-4: eps})
    Q = SpectralField.from_modes(g, {-4: 2 * eps})
    s = WaterState(W, Q)
    t_end = 0.1  # phase 0.8 rad, unambiguous
    traj = evolve(s, t_end=t_end, dt=1e-3, nonlinear=False)
    phase = np.angle(traj.final.Q.mode(-4) / s.Q.mode(-4))
    freq = phase / t_end
    assert abs(freq - 8.0) < 1e-9  # tau = |-4|^{3/2} = 8


def test_fourth_order_self_convergence():
    s = random_state(1e-2, seed=9, n=64, band=(1, 5))
    ref = evolve(s.copy(), 1.0, dt=1.0 / 512).final
    errs = []
    for dt in (1.0 / 64, 1.0 / 128):
        end = evolve(s.copy(), 1.0, dt=dt).final
        errs.append(np.sqrt(coeff_norm(end.W - ref.W) ** 2
                            + coeff_norm(end.Q - ref.Q) ** 2))
    ratio = errs[0] / errs[1]
    assert abs(ratio - 16.0) <= 0.3 * 16.0


def test_translation_equivariance():
    s = random_state(1e-2, seed=10)
    d = s.grid.dalpha
    one_step = evolve(s.copy(), 0.01, dt=0.01).final
    shifted = WaterState(s.W.shift(d), s.Q.shift(d), s.t, s.sigma)
    one_step_shifted = evolve(shifted, 0.01, dt=0.01).final
    errW = coeff_norm(one_step_shifted.W - one_step.W.shift(d))
    errQ = coeff_norm(one_step_shifted.Q - one_step.Q.shift(d))
    assert max(errW, errQ) < 1e-11


def test_holomorphy_preserved_along_flow():
    s = random_state(1e-2, seed=11)
    traj = evolve(s, 0.5, dt=5e-3, snap_dt=0.1)
    for snap in traj.snapshots:
        assert snap.W.positive_spectrum_fraction() <= 1e-13
        assert snap.Q.positive_spectrum_fraction() <= 1e-13


def test_evolve_detects_gate_failure():
    s = single_mode_state(0.4)  # large but initially inside the gate
    traj = evolve(s, 20.0, dt=0.01, snap_dt=0.5)
    assert traj.status in ("regularity", "blowup") or traj.status == "completed"
    if traj.status != "completed":
        assert traj.failure_time is not None


# -- scaling transform -----------------------------------------------------------

def test_scaling_identity_and_flat():
    s = random_state(1e-2, seed=12)
    s1 = scaling_transform(s, 1.0)
    assert np.array_equal(s1.W.coeffs, s.W.coeffs)
    f = scaling_transform(flat_state(), 2.0)
    assert coeff_norm(f.W) == 0.0


def test_scaling_rejects_non_dyadic():
    with pytest.raises(ValueError):
        scaling_transform(flat_state(), 3.0)


def test_scaling_critical_norm_invariant():
    s = random_state(1e-2, seed=13, L=2.0)
    n0 = s.W.sobolev_norm(1.5)
    for lam in (2.0, 4.0, 0.5):
        s2 = scaling_transform(s, lam)
        assert abs(s2.W.sobolev_norm(1.5) - n0) < 1e-10 * n0
