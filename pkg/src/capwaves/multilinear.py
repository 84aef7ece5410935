"""Paraproduct-type bilinear and trilinear forms and the symbol library.

Two bilinear types act on holomorphic inputs u, v:

  * holomorphic (2,0):   out(zeta) = sum_{zeta=xi+eta} m(xi,eta) u(xi) v(eta)
  * mixed (1,1):         out goes to k = zeta - eta for u at zeta, conj(v)
                         with v at eta, followed by the projector P.

We adopt "output spectrum <= 0 (half zero mode)" uniformly for mixed
forms; this is the convention that makes the quadratic normal form cancel
the quadratic sources mode by mode.

The quadratic normal-form symbols are stored in their printed (xi, eta)
form, where for mixed kinds xi is the *output* frequency zeta - eta and
eta is the conjugated factor's frequency; evaluators used in field
application receive raw input frequencies and perform that substitution.

The energy-correction families (m1, m2, m3) and (A, B, C, D) were pinned
by their defining cancellation property (the time derivative of the
correction functional reproduces the targeted cubic error under the flat
flows); the closed forms below solve those linear systems identically.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .spectral import SpectralField, project_holomorphic

# ---------------------------------------------------------------------------
# symbol descriptors and application
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class MultilinearSymbol:
    """Homogeneous multilinear symbol descriptor.

    evaluator receives the inputs' pre-conjugation frequencies (arrays
    broadcast together) and must be positively homogeneous of degree
    ``order``; conj marks which input slots enter conjugated.
    """

    arity: int
    order: int
    conj: tuple[bool, ...]
    evaluator: Callable[..., np.ndarray]
    project_output: bool = True

    def __post_init__(self):
        if self.arity not in (2, 3):
            raise ValueError("arity must be 2 or 3")
        if len(self.conj) != self.arity:
            raise ValueError("conjugation pattern does not match arity")

    @property
    def conj_type(self) -> tuple[int, int]:
        nconj = sum(self.conj)
        return (self.arity - nconj, nconj)


class GridMismatch(ValueError):
    pass


class DegenerateSymbol(ValueError):
    """Raised when a symbol is evaluated on a (near-)resonant tuple."""


def apply_multilinear(sym: MultilinearSymbol, *inputs: SpectralField) -> SpectralField:
    if len(inputs) != sym.arity:
        raise ValueError(f"expected {sym.arity} inputs, got {len(inputs)}")
    g = inputs[0].grid
    for f in inputs[1:]:
        if f.grid != g:
            raise GridMismatch("inputs on different grids")
    if sym.arity == 2:
        return _apply_bilinear(sym, *inputs)
    return _apply_trilinear(sym, *inputs)


def _slot_data(f: SpectralField, conj: bool):
    """(pre-conj frequencies, effective mode numbers, coefficients) of the
    active modes of one input slot."""
    idx = np.nonzero(f.coeffs)[0]
    m = f.grid.modes[idx]
    k = f.grid.k[idx]
    c = f.coeffs[idx]
    if conj:
        return k, -m, np.conj(c)
    return k, m, c


def _accumulate(grid, out_modes, values) -> SpectralField:
    n = grid.n_modes
    keep = np.abs(out_modes) < n // 2
    acc = np.zeros(n, dtype=np.complex128)
    np.add.at(acc, out_modes[keep] % n, values[keep])
    return SpectralField(grid, acc)


def _apply_bilinear(sym, f, g) -> SpectralField:
    k1, m1, c1 = _slot_data(f, sym.conj[0])
    k2, m2, c2 = _slot_data(g, sym.conj[1])
    if len(k1) == 0 or len(k2) == 0:
        return SpectralField.zeros(f.grid)
    K1, K2 = np.meshgrid(k1, k2, indexing="ij")
    vals = sym.evaluator(K1, K2) * np.outer(c1, c2)
    out_modes = (m1[:, None] + m2[None, :]).ravel()
    out = _accumulate(f.grid, out_modes, vals.ravel())
    if sym.project_output:
        out = project_holomorphic(out)
    return out


def _apply_trilinear(sym, f, g, h) -> SpectralField:
    k1, m1, c1 = _slot_data(f, sym.conj[0])
    k2, m2, c2 = _slot_data(g, sym.conj[1])
    k3, m3, c3 = _slot_data(h, sym.conj[2])
    grid = f.grid
    n = grid.n_modes
    acc = np.zeros(n, dtype=np.complex128)
    # chunk over the first slot to bound memory at O(N^2)
    for a in range(len(k1)):
        K2, K3 = np.meshgrid(k2, k3, indexing="ij")
        vals = sym.evaluator(k1[a], K2, K3) * (c1[a] * np.outer(c2, c3))
        out_modes = (m1[a] + m2[:, None] + m3[None, :]).ravel()
        vals = vals.ravel()
        keep = np.abs(out_modes) < n // 2
        np.add.at(acc, out_modes[keep] % n, vals[keep])
    out = SpectralField(grid, acc)
    if sym.project_output:
        out = project_holomorphic(out)
    return out


# ---------------------------------------------------------------------------
# quadratic normal-form symbols (printed closed forms)
# ---------------------------------------------------------------------------

def _den(xi, eta):
    return 9.0 * (xi + eta) ** 2 - 4.0 * xi * eta  # = 9 xi^2 + 14 xi eta + 9 eta^2


def _bh(xi, eta):
    return -1j * (xi + eta) * (2.25 * (xi + eta) ** 2 - 2.0 * xi * eta) / _den(xi, eta)


def _ch(xi, eta):
    return -1.5j * (xi + eta) ** 2 / _den(xi, eta)


def _ah(xi, eta):
    return 1j * (3.0 * xi ** 3 - 1.5 * xi ** 2 * eta - 5.0 * xi * eta ** 2
                 - 4.5 * eta ** 3) / _den(xi, eta)


def _aa(xi, eta):
    return 3j * (xi + eta) * (xi ** 2 + 1.5 * xi * eta + 1.5 * eta ** 2) / _den(xi, eta)


def _ba(xi, eta):
    return -1j * (xi + eta) * (4.5 * xi ** 2 + 9.5 * xi * eta + 6.0 * eta ** 2) / _den(xi, eta)


def _ca(xi, eta):
    return -3j * (xi + eta) ** 2 / _den(xi, eta)


def _da(xi, eta):
    return -1j * (xi + eta) * (4.5 * (xi + eta) ** 2 - 4.0 * xi * eta) / _den(xi, eta)


_NF_KINDS = {
    "Bh": (_bh, 1, "holomorphic"),
    "Ch": (_ch, 0, "holomorphic"),
    "Ah": (_ah, 1, "holomorphic"),
    "Aa": (_aa, 1, "mixed"),
    "Ba": (_ba, 1, "mixed"),
    "Ca": (_ca, 0, "mixed"),
    "Da": (_da, 1, "mixed"),
}


def nf_quadratic_symbol(kind: str, xi, eta):
    """Printed normal-form symbol value at (xi, eta).

    For mixed kinds the printed arguments are (output frequency, frequency
    of the conjugated factor); use :func:`nf_symbol` to obtain a field
    evaluator in raw input frequencies.  Returns 0 at the origin.
    """
    fn, _, _ = _NF_KINDS[kind]
    scalar = np.isscalar(xi) and np.isscalar(eta)
    out = _origin_safe(fn, xi, eta)
    return complex(out) if scalar else out


def nf_symbol(kind: str) -> MultilinearSymbol:
    """Field-applicable symbol with evaluator over raw input frequencies.

    Holomorphic kinds carry no outer projection (spectra <= 0 convolve to
    <= 0); mixed kinds are composed with P per the output-spectrum
    convention.
    """
    fn, order, flavor = _NF_KINDS[kind]
    if flavor == "holomorphic":
        def ev(k1, k2, fn=fn):
            return _origin_safe(fn, k1, k2)
        conj = (False, False)
        proj = False
    else:
        def ev(k1, k2, fn=fn):
            # unconjugated at k1, conjugated at k2: printed args (k1-k2, k2)
            return _origin_safe(fn, k1 - k2, k2)
        conj = (False, True)
        proj = True
    return MultilinearSymbol(2, order, conj, ev, project_output=proj)


def _origin_safe(fn, xi, eta):
    xi = np.asarray(xi, dtype=float)
    eta = np.asarray(eta, dtype=float)
    deg = (xi == 0) & (eta == 0)
    out = np.asarray(fn(np.where(deg, 1.0, xi), np.where(deg, 1.0, eta)))
    return np.where(deg, 0.0, out)


def nf_symbol_system_residual(xi: float, eta: float) -> np.ndarray:
    """Relative residuals of the 3 holomorphic and 4 mixed symbol equations
    at (xi, eta); all seven vanish for the printed closed forms."""
    bh, ch, ah = _bh(xi, eta), _ch(xi, eta), _ah(xi, eta)
    ah_swap = _ah(eta, xi)
    s = xi + eta
    res = []
    # holomorphic system
    res.append(2 * eta * bh - 2 * xi ** 2 * ch - s * ah)
    res.append(0.5 * (xi * ah + eta * ah_swap) + s ** 2 * ch + 1j * xi * eta)
    res.append(0.5 * (eta ** 2 * ah + xi ** 2 * ah_swap) - s ** 2 * bh
               - 0.75j * xi * eta * s)
    # mixed system in (zeta, eta) variables with zeta = xi + eta
    zeta = s
    aa, ba, ca, da = _aa(xi, eta), _ba(xi, eta), _ca(xi, eta), _da(xi, eta)
    res.append(1j * eta * ba + 1j * zeta ** 2 * ca + 1j * (zeta - eta) * aa - zeta * eta)
    res.append(-1j * zeta * ba - 1j * eta ** 2 * ca + 1j * (zeta - eta) * da + zeta * eta)
    res.append(-1j * zeta * aa + 1j * eta * da - 1j * (zeta - eta) ** 2 * ca - zeta * eta)
    res.append(-1j * eta ** 2 * aa + 1j * zeta ** 2 * da - 1j * (zeta - eta) ** 2 * ba
               - 0.5 * zeta * eta * (zeta + eta))
    scale = max(abs(xi), abs(eta)) ** 3 + abs(xi * eta) * max(abs(xi), abs(eta))
    return np.abs(np.array(res)) / scale


# ---------------------------------------------------------------------------
# resonance analysis
# ---------------------------------------------------------------------------

@dataclass
class ResonanceReport:
    freqs: tuple[float, ...]
    omegas: np.ndarray          # all signed combinations
    min_abs_omega: float
    lower_bound: float          # the paper's comparison quantity
    product_identity: tuple[float, float] | None = None  # (lhs, rhs), bilinear only


def dispersion(k):
    """tau = |k|^{3/2}: linear dispersion relation of the capillary system."""
    return np.abs(k) ** 1.5


def resonance_tools(freqs: Sequence[float]) -> ResonanceReport:
    """Signed combinations of |xi_j|^{3/2} and the associated lower bounds.

    For a bilinear pair (xi, eta) the report carries both sides of

        prod_{+-} |xi|^{3/2} +- |eta|^{3/2} +- |xi+eta|^{3/2}
            = xi^2 eta^2 (9 xi^2 + 14 xi eta + 9 eta^2),

    and the worst-case gap comparison lambda_0 lambda_1^{1/2}.  For a
    trilinear tuple (inputs xi_1..xi_3, output xi_0 = sum) the comparison
    quantity is lambda_1 lambda_2^{1/2} with magnitudes sorted ascending.
    """
    f = tuple(float(x) for x in freqs)
    if len(f) == 2:
        xi, eta = f
        parts = np.array([dispersion(xi), dispersion(eta), dispersion(xi + eta)])
        omegas = np.array([parts[0] + s1 * parts[1] + s2 * parts[2]
                           for s1 in (+1, -1) for s2 in (+1, -1)])
        lhs = float(np.prod(omegas))
        rhs = xi ** 2 * eta ** 2 * (9 * xi ** 2 + 14 * xi * eta + 9 * eta ** 2)
        lo, hi = sorted((abs(xi), abs(eta)))
        bound = lo * np.sqrt(hi)
        return ResonanceReport(f, omegas, float(np.min(np.abs(omegas))), bound,
                               (lhs, rhs))
    if len(f) == 3:
        x1, x2, x3 = f
        x0 = x1 + x2 + x3
        parts = np.array([dispersion(x0), dispersion(x1), dispersion(x2), dispersion(x3)])
        omegas = np.array([
            s0 * parts[0] + s1 * parts[1] + s2 * parts[2] + s3 * parts[3]
            for s0 in (+1, -1) for s1 in (+1, -1)
            for s2 in (+1, -1) for s3 in (+1, -1)
        ])
        mags = sorted((abs(x1), abs(x2), abs(x3)))
        bound = mags[0] * np.sqrt(mags[1])
        return ResonanceReport(f, omegas, float(np.min(np.abs(omegas))), bound)
    raise ValueError("resonance_tools expects 2 or 3 frequencies")


def cubic_nf_symbol(signs: Sequence[int], xi0: float, xi1: float, xi2: float,
                    xi3: float, rel_cutoff: float = 1e-9) -> complex:
    """Cubic normal-form symbol -i / (s0|xi0|^{3/2} - s1|xi1|^{3/2}
    - s2|xi2|^{3/2} + s3|xi3|^{3/2}).

    The subscript signs mirror the conjugation pattern of the quadrilinear
    form.  Raises DegenerateSymbol when the signed denominator falls below
    rel_cutoff relative to the largest |xi_j|^{3/2}.
    """
    s0, s1, s2, s3 = signs
    den = (s0 * dispersion(xi0) - s1 * dispersion(xi1)
           - s2 * dispersion(xi2) + s3 * dispersion(xi3))
    scale = max(dispersion(x) for x in (xi0, xi1, xi2, xi3))
    if abs(den) < rel_cutoff * scale:
        raise DegenerateSymbol(
            f"resonant tuple {(xi0, xi1, xi2, xi3)} with signs {tuple(signs)}")
    return -1j / den


# ---------------------------------------------------------------------------
# linearized-energy correction symbols (section on the linearized flow)
# ---------------------------------------------------------------------------
#
# C1 family: C1 = 2 Re int[ L_{m1}(w,q) Rbar + L_{m2}(w,w) Wbar
#                           + L_{m3}(q,q) Wbar ] with the conjugated
# background at the sum frequency; args (xi, eta) = (w freq, q freq) for
# m1 and the two equal-slot frequencies for m2, m3.
#
# C2 family: C2 = Re int[ A(R,w,rbar) + B(R,r,wbar) + C(W,w,wbar)
#                         + D(W,r,rbar) ]; args (xi, eta) = (background
# freq, unconjugated linearized freq), conjugated linearized at xi+eta.
# The printed normalization fixes A(1,1) = 3/2.


def _m1(xi, eta):
    return (6.0 * xi ** 3 - 3.0 * xi ** 2 * eta - 10.0 * xi * eta ** 2
            - 9.0 * eta ** 3) / (2.0 * _den(xi, eta))


def _m2(xi, eta):
    return (9.0 * xi ** 4 + 19.0 * xi ** 3 * eta + 24.0 * xi ** 2 * eta ** 2
            + 19.0 * xi * eta ** 3 + 9.0 * eta ** 4) / (4.0 * _den(xi, eta))


def _m3(xi, eta):
    return 1.5 * (xi + eta) ** 3 / _den(xi, eta)


def _c2A(xi, eta):
    return 6.0 * (xi + eta) ** 3 / _den(xi, eta)


def _c2B(xi, eta):
    return 2.0 * (xi + eta) * (2.0 * xi ** 2 + 3.0 * xi * eta + 3.0 * eta ** 2) / _den(xi, eta)


def _c2C(xi, eta):
    return -(xi + eta) * xi * (6.0 * xi ** 2 + 6.0 * xi * eta + 4.0 * eta ** 2) / _den(xi, eta)


def _c2D(xi, eta):
    return 4.0 * xi * (xi + eta) ** 2 / _den(xi, eta)


_LIN_KINDS = {
    "m1": _m1, "m2": _m2, "m3": _m3,
    "A": _c2A, "B": _c2B, "C": _c2C, "D": _c2D,
}


def lin_correction_symbol(kind: str, xi, eta):
    """Closed-form correction symbol; 0 at the origin."""
    fn = _LIN_KINDS[kind]
    scalar = np.isscalar(xi) and np.isscalar(eta)
    out = _origin_safe(fn, xi, eta)
    return float(out.real) if scalar else out


def lin_correction_system_residual(xi: float, eta: float) -> np.ndarray:
    """Relative residuals of the C1 (3-equation) and C2 (4-equation)
    cancellation systems with the closed forms substituted.

    The systems encode d/dt(correction) = cubic error term under the flat
    flows; both families solve them identically.
    """
    z = xi + eta
    m1, m1s = _m1(xi, eta), _m1(eta, xi)
    m2, m3 = _m2(xi, eta), _m3(xi, eta)
    r = []
    # C1 system
    r.append(-z ** 2 * m1 - 2 * eta * m2 + 2 * xi ** 2 * m3 - 0.5 * xi * eta ** 2)
    r.append(0.5 * (eta ** 2 * m1 + xi ** 2 * m1s) + z * m2 - 0.5 * xi * eta * z)
    r.append(-0.5 * (xi * m1 + eta * m1s) + z * m3 - xi * eta)
    # C2 system (printed normalization: defining property carries a 3/2)
    A, B, C, D = _c2A(xi, eta), _c2B(xi, eta), _c2C(xi, eta), _c2D(xi, eta)
    r.append(xi ** 2 * A + z * C + eta ** 2 * D)
    r.append(xi ** 2 * B - eta * C - z ** 2 * D)
    r.append(z ** 2 * A - eta ** 2 * B + xi * C - 2 * xi * eta * z)
    r.append(-eta * A + z * B - xi * D)
    scale = max(abs(xi), abs(eta)) ** 3 + abs(xi * eta) * max(abs(xi), abs(eta))
    return np.abs(np.array(r)) / scale
