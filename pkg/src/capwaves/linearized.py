"""Linearized flow around a background water-wave trajectory.

The linearized pair (w, q) evolves by

    w_t + F w_a + (1+Wd) P[m - conj m] = 0
    q_t + F q_a + Q_a P[m - conj m] + P[n + conj n] + i sigma P[p - conj p] = 0

with the coefficient fields

    m = (q_a - R w_a)/J + conj(R) w_a/(1+Wd)^2
    n = conj(R) (q_a - R w_a)/(1+Wd)
    p = w_aa/(J^{1/2}(1+Wd)) - (3 Wd_a/(2 J^{1/2}(1+Wd)^2)
        - conj(Wd_a)/(2 J^{3/2})) w_a .

In diagonal variables (w, r = q - R w) the system takes the short form

    (d_t + b d_a) w + r_a/(1+conj Wd) + R_a w/(1+conj Wd) = G0
    (d_t + b d_a) r - i a w/(1+Wd) + i sigma P[L w/(1+Wd)] = K0

with the self-adjoint operator L = d_a J^{-1/2} d_a - i c d_a - i P[c_a],
G0 = (1+Wd)(P conj(m) + Pbar m) and K0 = Pbar n - P conj(n) + i sigma
P conj(p).

The scaling derivative ((S-1)W, (S-1/2)Q), S = (3/2) t d_t + a d_a, is an
exact solution of the linearized flow; a d_a is formed pointwise with the
principal angle, so it is meaningful for data localized away from the
periodic seam.

Co-evolution advances the linearized pair with the same Lawson stages as
the background, which makes it the exact tangent of the discrete flow.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .dynamics import (
    AuxiliaryFields,
    RegularityError,
    Trajectory,
    WaterState,
    _LawsonStepper,
    auxiliary_fields,
    rhs_full,
)
from .spectral import (
    SpectralField,
    field_from_fine,
    fine_values,
    project_antiholomorphic,
    project_holomorphic,
    scrub_positive,
)


@dataclass
class LinearizedState:
    w: SpectralField
    q: SpectralField
    t: float = 0.0

    def __post_init__(self):
        if self.w.grid != self.q.grid:
            raise ValueError("w and q must share a grid")

    @property
    def grid(self):
        return self.w.grid

    def copy(self):
        return LinearizedState(self.w.copy(), self.q.copy(), self.t)

    def r(self, bg: WaterState) -> SpectralField:
        """Diagonal variable r = q - R w."""
        aux = auxiliary_fields(bg)
        g = self.grid
        vals = fine_values(self.q, 2) - fine_values(aux.R, 2) * fine_values(self.w, 2)
        return scrub_positive(field_from_fine(g, vals))


def _coefficients(bg: WaterState):
    g = bg.grid
    wd = bg.W.derivative()
    w = fine_values(wd, 2)
    q = fine_values(bg.Q.derivative(), 2)
    J = np.abs(1.0 + w) ** 2
    minjac = float(np.min(np.abs(1.0 + w)))
    if not np.isfinite(minjac) or minjac < 0.5:
        raise RegularityError(f"|1+W_a| dropped to {minjac:.3g}", bg.t)
    R = q / (1.0 + w)
    F = project_holomorphic(field_from_fine(g, (q - np.conj(q)) / J))
    return g, w, q, J, R, F


def linearized_rhs(ls: LinearizedState, bg: WaterState):
    """(dw/dt, dq/dt) of the linearized system around bg."""
    g, wv, qv, J, Rv, F = _coefficients(bg)
    wa = fine_values(ls.w.derivative(), 2)
    qa = fine_values(ls.q.derivative(), 2)
    waa = fine_values(ls.w.derivative(2), 2)
    wda = fine_values(bg.W.derivative(2), 2)

    m = (qa - Rv * wa) / J + np.conj(Rv) * wa / (1.0 + wv) ** 2
    n = np.conj(Rv) * (qa - Rv * wa) / (1.0 + wv)
    p = waa / (np.sqrt(J) * (1.0 + wv)) \
        - (3.0 * wda / (2.0 * np.sqrt(J) * (1.0 + wv) ** 2)
           - np.conj(wda) / (2.0 * J ** 1.5)) * wa

    Pm = project_holomorphic(field_from_fine(g, m - np.conj(m)))
    Pn = project_holomorphic(field_from_fine(g, n + np.conj(n)))
    Pp = project_holomorphic(field_from_fine(g, p - np.conj(p)))
    Fv = fine_values(F, 2)
    Pmv = fine_values(Pm, 2)

    wt = field_from_fine(g, -Fv * wa - (1.0 + wv) * Pmv)
    qt = field_from_fine(g, -Fv * qa - qv * Pmv) - Pn - (1j * bg.sigma) * Pp
    return scrub_positive(wt), scrub_positive(qt)


def operator_L(bg: WaterState, w: SpectralField,
               aux: AuxiliaryFields | None = None) -> SpectralField:
    """L w = d_a(J^{-1/2} w_a) - i c w_a - i P[c_a] w."""
    if aux is None:
        aux = auxiliary_fields(bg)
    g = bg.grid
    Jv = fine_values(aux.J, 2)
    cv = fine_values(aux.c, 2)
    wa = fine_values(w.derivative(), 2)
    t1 = field_from_fine(g, Jv ** -0.5 * wa).derivative()
    pca = project_holomorphic(aux.c.derivative())
    t2 = field_from_fine(
        g, 1j * cv * wa + 1j * fine_values(pca, 2) * fine_values(w, 2))
    return t1 - t2


def linearized_rhs_diagonal(ls_w: SpectralField, ls_r: SpectralField,
                            bg: WaterState,
                            aux: AuxiliaryFields | None = None,
                            use_pb_variant: bool = False):
    """(dw/dt, dr/dt) of the diagonal (w, r) system.

    ``use_pb_variant`` replaces the coefficient R_a/(1+conj Wd) of w by
    P[b_a] (the alternative arrangement differing by a cubic change in
    the perturbative term).
    """
    if aux is None:
        aux = auxiliary_fields(bg)
    g = bg.grid
    wdv = fine_values(bg.W.derivative(), 2)
    J = np.abs(1.0 + wdv) ** 2
    Rv = fine_values(aux.R, 2)
    Rav = fine_values(aux.R.derivative(), 2)
    bv = fine_values(aux.b, 2)
    av = fine_values(aux.a, 2)
    wdav = fine_values(bg.W.derivative(2), 2)

    wa = fine_values(ls_w.derivative(), 2)
    wv = fine_values(ls_w, 2)
    ra = fine_values(ls_r.derivative(), 2)

    # m, n, p expressed through (w, r)
    m = (ra + Rav * wv) / J + np.conj(Rv) * wa / (1.0 + wdv) ** 2
    n = np.conj(Rv) * (ra + Rav * wv) / (1.0 + wdv)
    waa = fine_values(ls_w.derivative(2), 2)
    p = waa / (np.sqrt(J) * (1.0 + wdv)) \
        - (3.0 * wdav / (2.0 * np.sqrt(J) * (1.0 + wdv) ** 2)
           - np.conj(wdav) / (2.0 * J ** 1.5)) * wa

    G0 = field_from_fine(
        g, (1.0 + wdv) * (fine_values(project_holomorphic(
            field_from_fine(g, np.conj(m))), 2)
            + fine_values(project_antiholomorphic(field_from_fine(g, m)), 2)))
    K0 = project_antiholomorphic(field_from_fine(g, n)) \
        - project_holomorphic(field_from_fine(g, np.conj(n))) \
        + 1j * bg.sigma * project_holomorphic(field_from_fine(g, np.conj(p)))

    if use_pb_variant:
        # replace R_a/(1+conj Wd) by P[b_a] and absorb the (cubic) change
        # into the perturbative term: G0 += w (Pbar[R_a conj Y] - P[R conj Y_a])
        pba = fine_values(project_holomorphic(aux.b.derivative()), 2)
        w_coef = pba * wv
        Yv = fine_values(aux.Y, 2)
        Yav = fine_values(aux.Y.derivative(), 2)
        corr = project_antiholomorphic(field_from_fine(g, Rav * np.conj(Yv))) \
            - project_holomorphic(field_from_fine(g, Rv * np.conj(Yav)))
        G0 = G0 + field_from_fine(g, wv * fine_values(corr, 2))
    else:
        w_coef = Rav * wv / (1.0 + np.conj(wdv))

    Lw = operator_L(bg, ls_w, aux)
    Lv = fine_values(Lw, 2)
    PLw = project_holomorphic(field_from_fine(g, Lv / (1.0 + wdv)))

    wt = field_from_fine(g, -bv * wa - ra / (1.0 + np.conj(wdv)) - w_coef) \
        + G0
    rt = field_from_fine(g, -bv * ra + 1j * av * wv / (1.0 + wdv)) \
        - (1j * bg.sigma) * PLw + K0
    return scrub_positive(wt), scrub_positive(rt)


# ---------------------------------------------------------------------------
# scaling derivative
# ---------------------------------------------------------------------------

def multiply_by_alpha(f: SpectralField, roll_start: float = 0.7,
                      roll_end: float = 0.95) -> SpectralField:
    """Pointwise alpha * f with the principal angle in (-pi L, pi L].

    The angle is rolled smoothly to zero near the periodic seam (between
    roll_start and roll_end times the half-circumference), which removes
    the sawtooth kink; for data localized in the central window this is
    exactly alpha * f.
    """
    g = f.grid
    half = g.circumference / 2.0
    n2 = 2 * g.n_modes
    alpha_fine = g.circumference * np.arange(n2) / n2
    alpha_fine = np.mod(alpha_fine + half, g.circumference) - half
    x = np.abs(alpha_fine) / half
    taper = np.where(
        x <= roll_start, 1.0,
        np.where(x >= roll_end, 0.0,
                 np.cos(0.5 * np.pi * (x - roll_start) / (roll_end - roll_start)) ** 2))
    return field_from_fine(g, alpha_fine * taper * fine_values(f, 2))


def scaling_derivative(s: WaterState) -> LinearizedState:
    """(w, q) = ((S-1)W, (S-1/2)Q) with S = (3/2) t d_t + alpha d_a."""
    Wt, Qt = rhs_full(s)
    w = 1.5 * s.t * Wt + multiply_by_alpha(s.W.derivative()) - s.W
    q = 1.5 * s.t * Qt + multiply_by_alpha(s.Q.derivative()) - 0.5 * s.Q
    return LinearizedState(scrub_positive(w), scrub_positive(q), s.t)


# ---------------------------------------------------------------------------
# co-evolution
# ---------------------------------------------------------------------------

@dataclass
class CoevolvedTrajectory:
    background: Trajectory
    linearized: list[LinearizedState] = field(default_factory=list)

    @property
    def final(self) -> LinearizedState:
        return self.linearized[-1]


def coevolve(ls0: LinearizedState, bg0: WaterState, t_end: float, dt: float,
             snap_dt: float | None = None) -> CoevolvedTrajectory:
    """Advance the linearized pair alongside the background with shared
    Lawson stages (the exact tangent of the discrete background flow)."""
    grid = bg0.grid
    stepper = _LawsonStepper(grid, bg0.sigma, dt)
    n_steps = int(round((t_end - bg0.t) / dt))
    snap_every = max(1, int(round((snap_dt or (t_end - bg0.t)) / dt)))

    def wrap(zb, zl, t):
        Wb, Qb = stepper.from_z(*zb)
        wl, ql = stepper.from_z(*zl)
        bg = WaterState(SpectralField(grid, Wb, True),
                        SpectralField(grid, Qb, True), t, bg0.sigma)
        ls = LinearizedState(SpectralField(grid, wl, True),
                             SpectralField(grid, ql, True), t)
        return bg, ls

    def nonlin(zb, zl, t):
        bg, ls = wrap(zb, zl, t)
        Wt, Qt = rhs_full(bg)
        wt, qt = linearized_rhs(ls, bg)
        k = grid.k
        nb = stepper.to_z(Wt.coeffs + 1j * k * bg.Q.coeffs,
                          Qt.coeffs - 1j * bg.sigma * k ** 2 * bg.W.coeffs)
        nl = stepper.to_z(wt.coeffs + 1j * k * ls.q.coeffs,
                          qt.coeffs - 1j * bg.sigma * k ** 2 * ls.w.coeffs)
        return nb, nl

    def phase(z, e):
        return z[0] * e, z[1] * np.conj(e)

    traj = Trajectory()
    out = CoevolvedTrajectory(traj)
    traj.snapshots.append(bg0.copy())
    out.linearized.append(ls0.copy())

    zb = stepper.to_z(bg0.W.coeffs.copy(), bg0.Q.coeffs.copy())
    zl = stepper.to_z(ls0.w.coeffs.copy(), ls0.q.coeffs.copy())
    t = bg0.t
    eh, ef = stepper.e_half, stepper.e_full
    for i in range(n_steps):
        try:
            nb1, nl1 = nonlin(zb, zl, t)
            u2b = phase((zb[0] + dt / 2 * nb1[0], zb[1] + dt / 2 * nb1[1]), eh)
            u2l = phase((zl[0] + dt / 2 * nl1[0], zl[1] + dt / 2 * nl1[1]), eh)
            nb2, nl2 = nonlin(u2b, u2l, t + dt / 2)
            hb, hl = phase(zb, eh), phase(zl, eh)
            u3b = (hb[0] + dt / 2 * nb2[0], hb[1] + dt / 2 * nb2[1])
            u3l = (hl[0] + dt / 2 * nl2[0], hl[1] + dt / 2 * nl2[1])
            nb3, nl3 = nonlin(u3b, u3l, t + dt / 2)
            fb, fl = phase(zb, ef), phase(zl, ef)
            nb3p, nl3p = phase(nb3, eh), phase(nl3, eh)
            u4b = (fb[0] + dt * nb3p[0], fb[1] + dt * nb3p[1])
            u4l = (fl[0] + dt * nl3p[0], fl[1] + dt * nl3p[1])
            nb4, nl4 = nonlin(u4b, u4l, t + dt)
            nb1p, nl1p = phase(nb1, ef), phase(nl1, ef)
            nb2p, nl2p = phase(nb2, eh), phase(nl2, eh)
            zb = (fb[0] + dt / 6 * (nb1p[0] + 2 * nb2p[0] + 2 * nb3p[0] + nb4[0]),
                  fb[1] + dt / 6 * (nb1p[1] + 2 * nb2p[1] + 2 * nb3p[1] + nb4[1]))
            zl = (fl[0] + dt / 6 * (nl1p[0] + 2 * nl2p[0] + 2 * nl3p[0] + nl4[0]),
                  fl[1] + dt / 6 * (nl1p[1] + 2 * nl2p[1] + 2 * nl3p[1] + nl4[1]))
        except RegularityError as err:
            traj.status = "regularity"
            traj.failure_time = t
            traj.reason = str(err)
            return out
        t = bg0.t + (i + 1) * dt
        if (i + 1) % snap_every == 0 or i == n_steps - 1:
            bg, ls = wrap(zb, zl, t)
            traj.snapshots.append(bg)
            out.linearized.append(ls)
    return out
