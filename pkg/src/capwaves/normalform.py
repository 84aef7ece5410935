"""Quadratic and cubic normal-form machinery for the nonlinear flow.

The transformed variables

    Wt = W + Bh(W,W) + Ch(Q,Q) + Ba(W, conj W) + Ca(Q, conj Q)
    Qt = Q + Ah(W,Q) + Aa(W, conj Q) + Da(Q, conj W)

satisfy Wt_t + Qt_a = cubic and Qt_t + i Wt_aa = cubic; the residuals are
computed both analytically (chain rule through the full right-hand side)
and by centered time differencing along a short evolution.

The low-high-high cubic correction removes the worst cubic terms (an
undifferentiated low-frequency W factor against two high factors):

    W_[3],0 = -Re(W) * d/da W_[2],   Q_[3],0 = -Re(W) * d/da Q_[2]

restricted by dyadic masks P_{>>lam}[ (Re W)_lam * (...)_{>>lam} ], where
">>" means a gap of at least two dyadic steps.  The unit coefficient is
pinned by the verified low-frequency limits of the transform symbols
(the total undifferentiated-W content of the cubic sources is
-Re(W) * d/da G2 / K2), which the correction must cancel.

All transforms assume sigma = 1 (the symbols were derived for the scaled
equation); calling them on a state with sigma != 1 raises.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .dynamics import WaterState, evolve, rhs_full
from .multilinear import apply_multilinear, nf_symbol
from .spectral import (
    SpectralField,
    dyadic_blocks,
    field_from_fine,
    fine_values,
    product,
    project_holomorphic,
)


def _check_sigma(s: WaterState):
    if abs(s.sigma - 1.0) > 1e-14:
        raise ValueError(
            "normal-form symbols are derived for sigma = 1; rescale first")


# ---------------------------------------------------------------------------
# multilinear expansion sources
# ---------------------------------------------------------------------------

def quadratic_sources(s: WaterState):
    """(G2, K2, K2h, K2a): the quadratic terms of the expanded system,
    split into holomorphic and mixed parts."""
    _check_sigma(s)
    g = s.grid
    wa = s.W.derivative()
    qa = s.Q.derivative()
    waa = wa.derivative()
    w, q = fine_values(wa, 2), fine_values(qa, 2)
    ww = fine_values(waa, 2)

    def P(vals):
        return project_holomorphic(field_from_fine(g, vals))

    G2 = P(q * np.conj(w) - np.conj(q) * w)
    K2h = field_from_fine(g, -q * q + 1.5j * ww * w)
    K2a = P(-np.abs(q) ** 2 + 0.5j * (ww * np.conj(w) - np.conj(ww) * w))
    return G2, K2h + K2a, K2h, K2a


def cubic_sources(s: WaterState):
    """(G3, K3, G3r, K3r): cubic terms and their resonant leading parts."""
    _check_sigma(s)
    g = s.grid
    wa = s.W.derivative()
    qa = s.Q.derivative()
    waa = wa.derivative()
    w, q = fine_values(wa, 2), fine_values(qa, 2)
    ww = fine_values(waa, 2)
    wb, qb, wwb = np.conj(w), np.conj(q), np.conj(ww)

    def P(vals):
        return project_holomorphic(field_from_fine(g, vals))

    mixed = P(qb * w - q * wb)          # P[conj(Q_a) W_a - Q_a conj(W_a)]
    mixv = fine_values(mixed, 2)
    re_w = np.real(w)

    G3 = P(w * (q * w - mixv) - (q - qb) * (4.0 * re_w ** 2 - np.abs(w) ** 2))
    K3 = P(q * (q * w - mixv) + 2.0 * re_w * np.abs(q) ** 2
           - 1j * (ww * (1.875 * w ** 2 + 0.75 * np.abs(w) ** 2 + 0.375 * wb ** 2)
                   - wwb * (0.75 * np.abs(w) ** 2 + 0.375 * w ** 2)))

    k2h = -q * q + 1.5j * ww * w
    qv0 = fine_values(s.Q, 2)
    G3r = P(-0.375j * k2h * np.conj(qv0))
    K3r = P(-0.875 * wb * k2h + w * np.abs(q) ** 2
            - 1j * (0.75 * ww * np.abs(w) ** 2 - 0.375 * wwb * w ** 2))
    return G3, K3, G3r, K3r


def gkt_cubic(s: WaterState):
    """Transformed cubic source terms (Gt3, Kt3) of the normal-form system."""
    _check_sigma(s)
    W, Q = s.W, s.Q
    G2, K2, _, _ = quadratic_sources(s)
    G3, K3, _, _ = cubic_sources(s)
    ap = apply_multilinear
    Gt3 = (2.0 * ap(nf_symbol("Bh"), G2, W) + 2.0 * ap(nf_symbol("Ch"), K2, Q)
           + ap(nf_symbol("Ba"), G2, W) + ap(nf_symbol("Ba"), W, G2)
           + ap(nf_symbol("Ca"), K2, Q) + ap(nf_symbol("Ca"), Q, K2) + G3)
    Kt3 = (ap(nf_symbol("Ah"), W, K2) + ap(nf_symbol("Ah"), G2, Q)
           + ap(nf_symbol("Aa"), G2, Q) + ap(nf_symbol("Aa"), W, K2)
           + ap(nf_symbol("Da"), K2, W) + ap(nf_symbol("Da"), Q, G2) + K3)
    return Gt3, Kt3


# ---------------------------------------------------------------------------
# the quadratic transform and its residuals
# ---------------------------------------------------------------------------

def quadratic_correction(W: SpectralField, Q: SpectralField):
    """(W_[2], Q_[2]): the quadratic normal-form corrections."""
    ap = apply_multilinear
    W2 = (ap(nf_symbol("Bh"), W, W) + ap(nf_symbol("Ch"), Q, Q)
          + ap(nf_symbol("Ba"), W, W) + ap(nf_symbol("Ca"), Q, Q))
    Q2 = (ap(nf_symbol("Ah"), W, Q) + ap(nf_symbol("Aa"), W, Q)
          + ap(nf_symbol("Da"), Q, W))
    return W2, Q2


def _correction_rate(W, Q, Wt, Qt):
    """Chain-rule time derivative of (W_[2], Q_[2]) given (dW/dt, dQ/dt)."""
    ap = apply_multilinear
    dW2 = (2.0 * ap(nf_symbol("Bh"), Wt, W) + 2.0 * ap(nf_symbol("Ch"), Qt, Q)
           + ap(nf_symbol("Ba"), Wt, W) + ap(nf_symbol("Ba"), W, Wt)
           + ap(nf_symbol("Ca"), Qt, Q) + ap(nf_symbol("Ca"), Q, Qt))
    dQ2 = (ap(nf_symbol("Ah"), Wt, Q) + ap(nf_symbol("Ah"), W, Qt)
           + ap(nf_symbol("Aa"), Wt, Q) + ap(nf_symbol("Aa"), W, Qt)
           + ap(nf_symbol("Da"), Qt, W) + ap(nf_symbol("Da"), Q, Wt))
    return dW2, dQ2


@dataclass
class NFBundle:
    Wt: SpectralField
    Qt: SpectralField
    residual_G: SpectralField
    residual_K: SpectralField
    diagnostics: dict = field(default_factory=dict)


def nf_transform(s: WaterState) -> NFBundle:
    """Transformed variables plus the analytic equation residuals
    (d/dt Wt + d/da Qt, d/dt Qt + i d^2/da^2 Wt); both are cubic in the
    state size."""
    _check_sigma(s)
    W, Q = s.W, s.Q
    W2, Q2 = quadratic_correction(W, Q)
    Wt_f, Qt_f = W + W2, Q + Q2

    dW, dQ = rhs_full(s)
    dW2, dQ2 = _correction_rate(W, Q, dW, dQ)
    res_G = dW + dW2 + Qt_f.derivative()
    res_K = dQ + dQ2 + 1j * Wt_f.derivative(2)

    # the symbols are undefined at output frequency zero, so the zero mode
    # of the residual is convention bookkeeping: norms are taken mean-free
    diag = {
        "res_G_l2": res_G.meanfree().l2_norm(),
        "res_K_l2": res_K.meanfree().l2_norm(),
        "res_zero_mode": float(abs(res_G.mode(0)) + abs(res_K.mode(0))),
        "correction_l2": np.hypot(W2.l2_norm(), Q2.l2_norm()),
    }
    return NFBundle(Wt_f, Qt_f, res_G, res_K, diag)


def nf_residual_numeric(s: WaterState, dt: float = 1e-3, cubic: bool = False):
    """Equation residuals by centered time differencing of the transform
    along the evolution (truncation error ~ dt^2)."""
    def transformed(state):
        W2, Q2 = quadratic_correction(state.W, state.Q)
        Wt_f, Qt_f = state.W + W2, state.Q + Q2
        if cubic:
            W3, Q3 = cubic_correction_lhh(state)
            Wt_f, Qt_f = Wt_f + W3, Qt_f + Q3
        return Wt_f, Qt_f

    back = evolve(s.copy(), s.t + 2 * dt, dt=dt, snap_dt=dt)
    s0, s1, s2 = back.snapshots[0], back.snapshots[1], back.snapshots[2]
    T0, T1, T2 = transformed(s0), transformed(s1), transformed(s2)
    dWt = (T2[0] - T0[0]) * (1.0 / (2 * dt))
    dQt = (T2[1] - T0[1]) * (1.0 / (2 * dt))
    res_G = dWt + T1[1].derivative()
    res_K = dQt + 1j * T1[0].derivative(2)
    return res_G, res_K


# ---------------------------------------------------------------------------
# low-high-high cubic correction
# ---------------------------------------------------------------------------

DYADIC_GAP = 2  # ">>" means at least this many dyadic steps


def cubic_correction_lhh(s: WaterState):
    """(W_[3],0, Q_[3],0): the masked low-high-high cubic corrections."""
    _check_sigma(s)
    g = s.grid
    reW = s.W.real_part()
    out_W = SpectralField.zeros(g)
    out_Q = SpectralField.zeros(g)
    gap = 2 ** DYADIC_GAP
    for lam in dyadic_blocks(g):
        hi_cut = gap * lam
        if hi_cut >= g.n_modes // 2:
            break
        low = reW.dyadic_block(lam)
        if np.all(low.coeffs == 0):
            continue
        Wh = s.W.highpass(hi_cut / g.period_scale)
        Qh = s.Q.highpass(hi_cut / g.period_scale)
        W2h, Q2h = quadratic_correction(Wh, Qh)
        term_W = product(low, W2h.derivative()).highpass(hi_cut / g.period_scale)
        term_Q = product(low, Q2h.derivative()).highpass(hi_cut / g.period_scale)
        out_W = out_W + project_holomorphic(term_W)
        out_Q = out_Q + project_holomorphic(term_Q)
    return (-1.0) * out_W, (-1.0) * out_Q
