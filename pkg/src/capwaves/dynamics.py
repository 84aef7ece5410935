"""Capillary water-wave dynamics in holomorphic coordinates.

State variables are the holomorphic pair (W, Q) = (surface parametrization
minus identity, complex velocity potential trace).  The evolution is

    W_t + F (1 + W_a) = 0
    Q_t + F Q_a + P[|Q_a|^2 / J] + i sigma P[ W_aa / (J^{1/2}(1+W_a))
                                  - conj(W_aa) / (J^{1/2}(1+conj(W_a))) ] = 0

with F = P[(Q_a - conj(Q_a))/J], J = |1+W_a|^2.  The differentiated system
diagonalizes in (Wd, R) = (W_a, Q_a/(1+W_a)).

Discretization notes: every projected bracket is evaluated pointwise on
the doubled collocation grid and truncated at the projection; plain
products between fields use the padded binary product of the spectral
module.  Time stepping is a Lawson (integrating-factor) RK4 in the
variables Z_+- = Qhat +- sqrt(sigma*|k|) What, whose linear phases
exp(+-i sqrt(sigma) |k|^{3/2} dt) are applied exactly, so the surface
tension term imposes no step-size restriction.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .spectral import (
    FourierGrid,
    SpectralField,
    field_from_fine,
    fine_values,
    product,
    project_antiholomorphic,
    project_holomorphic,
    scrub_positive,
)

GATE_MIN_JACOBIAN = 0.5  # smallest allowed |1 + W_a| on the surface


class RegularityError(RuntimeError):
    """The state left the small-data regime (or produced non-finite data)."""

    def __init__(self, message: str, t: float | None = None):
        super().__init__(message)
        self.t = t


@dataclass
class WaterState:
    W: SpectralField
    Q: SpectralField
    t: float = 0.0
    sigma: float = 1.0

    def __post_init__(self):
        if self.W.grid != self.Q.grid:
            raise ValueError("W and Q must share a grid")

    @property
    def grid(self) -> FourierGrid:
        return self.W.grid

    def copy(self) -> "WaterState":
        return WaterState(self.W.copy(), self.Q.copy(), self.t, self.sigma)

    def check_gate(self):
        w = fine_values(self.W.derivative(), 2)
        m = float(np.min(np.abs(1.0 + w)))
        if not np.isfinite(m) or m < GATE_MIN_JACOBIAN:
            raise RegularityError(f"|1+W_a| dropped to {m:.3g}", self.t)
        return m


@dataclass
class DiagonalState:
    Wd: SpectralField     # bold-W = W_a
    R: SpectralField      # Q_a / (1 + W_a)
    t: float = 0.0
    sigma: float = 1.0

    @property
    def grid(self) -> FourierGrid:
        return self.Wd.grid


@dataclass
class AuxiliaryFields:
    F: SpectralField
    J: SpectralField
    R: SpectralField
    Y: SpectralField
    b: SpectralField
    a: SpectralField
    M: SpectralField
    c: SpectralField
    M_alt: SpectralField      # the quotient form of M; equals M up to dealiasing
    min_jacobian: float


def _P_fine(grid, vals) -> SpectralField:
    return project_holomorphic(field_from_fine(grid, vals))


def _Pbar_fine(grid, vals) -> SpectralField:
    return project_antiholomorphic(field_from_fine(grid, vals))


def diagonal_from_water(s: WaterState) -> DiagonalState:
    g = s.grid
    w = fine_values(s.W.derivative(), 2)
    q = fine_values(s.Q.derivative(), 2)
    R = scrub_positive(field_from_fine(g, q / (1.0 + w)))
    return DiagonalState(s.W.derivative(), R, s.t, s.sigma)


def auxiliary_fields(s: WaterState | DiagonalState) -> AuxiliaryFields:
    """All derived fields of the differentiated system.

    Accepts either representation; only (W_a, R) are actually used.
    """
    g = s.grid
    if isinstance(s, WaterState):
        wd = s.W.derivative()
        w = fine_values(wd, 2)
        q = fine_values(s.Q.derivative(), 2)
        rv = q / (1.0 + w)
    else:
        wd = s.Wd
        w = fine_values(wd, 2)
        rv = fine_values(s.R, 2)
        q = rv * (1.0 + w)

    minjac = float(np.min(np.abs(1.0 + w)))
    if not np.isfinite(minjac) or minjac < GATE_MIN_JACOBIAN:
        raise RegularityError(f"|1+W_a| dropped to {minjac:.3g}", s.t)

    wb = np.conj(w)
    J = np.abs(1.0 + w) ** 2

    F = _P_fine(g, (q - np.conj(q)) / J)
    R = scrub_positive(field_from_fine(g, rv))
    Y = scrub_positive(field_from_fine(g, w / (1.0 + w)))
    b_half = _P_fine(g, q / J)
    b = b_half + b_half.conj()          # 2 Re P[Q_a / J]

    rva = fine_values(R.derivative(), 2)
    rv = fine_values(R, 2)              # re-truncated R, consistent with R_a
    a_f = 1j * (_Pbar_fine(g, np.conj(rv) * rva)
                - _P_fine(g, rv * np.conj(rva)))

    yv = fine_values(Y, 2)
    yva = fine_values(Y.derivative(), 2)
    M = (_Pbar_fine(g, np.conj(rv) * yva - rva * np.conj(yv))
         + _P_fine(g, rv * np.conj(yva) - np.conj(rva) * yv))
    M_alt = field_from_fine(
        g, rva / (1.0 + wb) + np.conj(rva) / (1.0 + w)) - b.derivative()

    zc = fine_values(wd.derivative(), 2) / (np.sqrt(J) * (1.0 + w))
    c = field_from_fine(g, 2.0 * np.imag(zc))

    Jf = field_from_fine(g, J)
    return AuxiliaryFields(F=F, J=Jf, R=R, Y=Y, b=b, a=a_f, M=M, c=c,
                           M_alt=M_alt, min_jacobian=minjac)


def rhs_full(s: WaterState) -> tuple[SpectralField, SpectralField]:
    """(dW/dt, dQ/dt) of the fully nonlinear system, projected holomorphic."""
    g = s.grid
    wd = s.W.derivative()
    w = fine_values(wd, 2)
    q = fine_values(s.Q.derivative(), 2)
    minjac = float(np.min(np.abs(1.0 + w)))
    if not np.isfinite(minjac) or minjac < GATE_MIN_JACOBIAN:
        raise RegularityError(f"|1+W_a| dropped to {minjac:.3g}", s.t)

    J = np.abs(1.0 + w) ** 2
    F = _P_fine(g, (q - np.conj(q)) / J)
    Fv = fine_values(F, 2)

    Wt = field_from_fine(g, -Fv * (1.0 + w))

    waa = fine_values(wd.derivative(), 2)
    zc = waa / (np.sqrt(J) * (1.0 + w))
    tension = _P_fine(g, zc - np.conj(zc))
    Qt = field_from_fine(g, -Fv * q) \
        - _P_fine(g, np.abs(q) ** 2 / J) - (1j * s.sigma) * tension

    return scrub_positive(Wt), scrub_positive(Qt)


def rhs_diagonal(d: DiagonalState,
                 aux: AuxiliaryFields | None = None) -> tuple[SpectralField, SpectralField]:
    """(dWd/dt, dR/dt) of the self-contained diagonal system."""
    if aux is None:
        aux = auxiliary_fields(d)
    g = d.grid
    w = fine_values(d.Wd, 2)
    wb = np.conj(w)
    J = np.abs(1.0 + w) ** 2
    bv = fine_values(aux.b, 2)
    rv = fine_values(aux.R, 2)
    rav = fine_values(aux.R.derivative(), 2)
    Mv = fine_values(aux.M, 2)
    av = fine_values(aux.a, 2)

    wda = fine_values(d.Wd.derivative(), 2)
    Wt = field_from_fine(
        g, -bv * wda - (1.0 + w) * rav / (1.0 + wb) + (1.0 + w) * Mv)

    # both tension brackets carry the outer 1/(1+Wd): this is what the
    # chain rule through R = Q_a/(1+W_a) produces from the (W,Q) system
    zc = wda / (np.sqrt(J) * (1.0 + w))
    Pz = project_holomorphic(field_from_fine(g, zc))
    Pz_bar = project_holomorphic(field_from_fine(g, np.conj(zc)))
    tension = (fine_values(Pz.derivative(), 2)
               - fine_values(Pz_bar.derivative(), 2)) / (1.0 + w)
    Rt = field_from_fine(g, -bv * rav - 1j * av / (1.0 + w)
                         - 1j * d.sigma * tension)

    return scrub_positive(Wt), scrub_positive(Rt)


def hamiltonian(s: WaterState) -> float:
    """Conserved energy: integral of Im(Q conj(Q_a)) + 4 sigma (J^{1/2} - 1
    - Re W_a).

    The tension weight 4*sigma is the one conserved by the implemented
    evolution (equipartition with the kinetic term on linear eigenmodes);
    kinetic part by exact mode sum, tension part by fine quadrature.
    """
    s.check_gate()
    g = s.grid
    kin = g.circumference * float(
        np.sum(-g.k * np.abs(s.Q.coeffs) ** 2))
    w = fine_values(s.W.derivative(), 4)
    integrand = np.abs(1.0 + w) - 1.0 - np.real(w)
    tension = 4.0 * s.sigma * float(np.mean(integrand)) * g.circumference
    return kin + tension


def scaling_transform(s: WaterState, lam: float) -> WaterState:
    """(W,Q)(t,a) -> (W/lam (lam^{3/2} t, lam a), Q/sqrt(lam) (...)) with the
    period rescaled; lam must be an integer power of two."""
    j = np.log2(lam)
    if abs(j - round(j)) > 1e-12:
        raise ValueError(f"scaling factor must be a power of two, got {lam}")
    g = s.grid
    g2 = FourierGrid(g.n_modes, g.period_scale / lam)
    W2 = SpectralField(g2, s.W.coeffs / lam, s.W.holomorphic)
    Q2 = SpectralField(g2, s.Q.coeffs / np.sqrt(lam), s.Q.holomorphic)
    return WaterState(W2, Q2, t=s.t / lam ** 1.5, sigma=s.sigma)


# ---------------------------------------------------------------------------
# time stepping
# ---------------------------------------------------------------------------

@dataclass
class Trajectory:
    snapshots: list[WaterState] = field(default_factory=list)
    status: str = "completed"          # completed | regularity | blowup | stopped
    failure_time: float | None = None
    reason: str = ""

    @property
    def final(self) -> WaterState:
        return self.snapshots[-1]

    def times(self) -> np.ndarray:
        return np.array([s.t for s in self.snapshots])


class _LawsonStepper:
    """Integrating-factor RK4 on the diagonal linear variables."""

    def __init__(self, grid: FourierGrid, sigma: float, dt: float):
        k = grid.k
        absk = np.abs(k)
        self.c = np.where(absk > 0, np.sqrt(sigma * absk), 1.0)
        omega = np.sqrt(sigma) * absk ** 1.5
        self.e_half = np.exp(1j * omega * dt / 2)
        self.e_full = self.e_half ** 2
        self.dt = dt
        self.grid = grid
        self.sigma = sigma

    def to_z(self, What, Qhat):
        return Qhat + self.c * What, Qhat - self.c * What

    def from_z(self, zp, zm):
        return (zp - zm) / (2 * self.c), (zp + zm) / 2

    def phase(self, zp, zm, e):
        return zp * e, zm * np.conj(e)

    def nonlinear(self, zp, zm, t, nonlinear_rhs):
        What, Qhat = self.from_z(zp, zm)
        g = self.grid
        W = SpectralField(g, What, holomorphic=True)
        Q = SpectralField(g, Qhat, holomorphic=True)
        state = WaterState(W, Q, t, self.sigma)
        Wt, Qt = nonlinear_rhs(state)
        # subtract the exactly-integrated linear part
        nW = Wt.coeffs + 1j * g.k * Qhat
        nQ = Qt.coeffs - 1j * self.sigma * g.k ** 2 * What
        return self.to_z(nW, nQ)

    def step(self, zp, zm, t, nonlinear_rhs):
        dt = self.dt
        np1 = self.nonlinear(zp, zm, t, nonlinear_rhs)
        u2 = self.phase(zp + dt / 2 * np1[0], zm + dt / 2 * np1[1], self.e_half)
        n2 = self.nonlinear(*u2, t + dt / 2, nonlinear_rhs)
        half = self.phase(zp, zm, self.e_half)
        u3 = (half[0] + dt / 2 * n2[0], half[1] + dt / 2 * n2[1])
        n3 = self.nonlinear(*u3, t + dt / 2, nonlinear_rhs)
        full = self.phase(zp, zm, self.e_full)
        n3p = self.phase(*n3, self.e_half)
        u4 = (full[0] + dt * n3p[0], full[1] + dt * n3p[1])
        n4 = self.nonlinear(*u4, t + dt, nonlinear_rhs)
        n1p = self.phase(*np1, self.e_full)
        n2p = self.phase(*n2, self.e_half)
        zp_out = full[0] + dt / 6 * (n1p[0] + 2 * n2p[0] + 2 * n3p[0] + n4[0])
        zm_out = full[1] + dt / 6 * (n1p[1] + 2 * n2p[1] + 2 * n3p[1] + n4[1])
        return zp_out, zm_out


def default_dt(s: WaterState, x_norm: float = 0.0, safety: float = 0.5) -> float:
    """dt ~ safety * max|k|^{-1/2} / (1 + X-norm): the linear phases are
    exact, so only the nonlinearity limits the step."""
    return safety / (np.sqrt(s.grid.max_abs_k) * (1.0 + x_norm))


def _linear_rhs(state: WaterState):
    return (-1.0) * state.Q.derivative(), (-1j * state.sigma) * state.W.derivative(2)


def evolve(
    s: WaterState,
    t_end: float,
    dt: float,
    snap_dt: float | None = None,
    nonlinear: bool = True,
    stop_condition=None,
    sup_ceiling: float = 10.0,
) -> Trajectory:
    """Advance the state to t_end with fixed step dt.

    Snapshots are recorded every snap_dt (>= dt; default: only the start
    and the end).  ``stop_condition(state) -> str|None`` is polled at
    snapshot times; a non-None reason halts the run with status
    ``stopped``.  Gate violations, non-finite data and sup-norm blowup
    beyond ``sup_ceiling`` end the run with the failure time recorded.
    """
    grid = s.grid
    stepper = _LawsonStepper(grid, s.sigma, dt)
    rhs = rhs_full if nonlinear else _linear_rhs
    n_steps = int(round((t_end - s.t) / dt))
    snap_every = max(1, int(round((snap_dt or (t_end - s.t)) / dt)))

    traj = Trajectory()
    traj.snapshots.append(s.copy())
    zp, zm = stepper.to_z(s.W.coeffs.copy(), s.Q.coeffs.copy())
    t = s.t
    for i in range(n_steps):
        try:
            zp, zm = stepper.step(zp, zm, t, rhs)
        except RegularityError as err:
            traj.status = "regularity"
            traj.failure_time = t
            traj.reason = str(err)
            return traj
        t = s.t + (i + 1) * dt
        if (i + 1) % snap_every == 0 or i == n_steps - 1:
            What, Qhat = stepper.from_z(zp, zm)
            if not (np.all(np.isfinite(What)) and np.all(np.isfinite(Qhat))):
                traj.status = "blowup"
                traj.failure_time = t
                traj.reason = "non-finite coefficients"
                return traj
            snap = WaterState(
                SpectralField(grid, What, True), SpectralField(grid, Qhat, True),
                t, s.sigma)
            if snap.W.sup_norm(fine=1) > sup_ceiling:
                traj.status = "blowup"
                traj.failure_time = t
                traj.reason = "sup-norm ceiling exceeded"
                return traj
            traj.snapshots.append(snap)
            if stop_condition is not None:
                reason = stop_condition(snap)
                if reason:
                    traj.status = "stopped"
                    traj.failure_time = t
                    traj.reason = reason
                    return traj
    return traj
