"""Periodic Fourier substrate: grids, holomorphic fields, projections, norms.

Fields live on a circle of circumference 2*pi*L sampled at N equispaced
points, with Fourier representation

    f(alpha) = sum_m  fhat(m) * exp(i * k_m * alpha),   k_m = m / L,

for integer mode numbers m in [-N/2, N/2).  A field is *holomorphic* when
its spectrum is confined to k <= 0 (the trace class of bounded analytic
extensions to the lower half plane).  The projector P keeps negative
frequencies in full and half of the zero mode, so that P f + conj(P f) = f
for real f.

Conventions baked in here:
  * N is a power of two and the Nyquist mode is always zeroed, which keeps
    d/dalpha skew-adjoint on the retained modes.
  * Homogeneous |D|^s multipliers and Hdot^s norms drop the zero mode for
    s != 0 (negative exponents diverge there).
  * Binary products are dealiased by zero-padding to 2N and truncating
    back; composite nonlinearities are formed by repeated padded products.
  * Dyadic blocks are sharp cutoffs on integer mode magnitude.
"""

from __future__ import annotations

import numpy as np

_TWO_PI = 2.0 * np.pi


class FourierGrid:
    """Collocation grid on a circle of circumference 2*pi*period_scale."""

    def __init__(self, n_modes: int, period_scale: float = 1.0):
        if n_modes < 4 or (n_modes & (n_modes - 1)) != 0:
            raise ValueError(f"n_modes must be a power of two >= 4, got {n_modes}")
        if period_scale <= 0:
            raise ValueError("period_scale must be positive")
        self.n_modes = n_modes
        self.period_scale = float(period_scale)
        self.modes = np.fft.fftfreq(n_modes, d=1.0 / n_modes).astype(np.int64)
        self.k = self.modes / self.period_scale
        self.alpha = self.circumference * np.arange(n_modes) / n_modes
        self.nyquist_index = n_modes // 2

    @property
    def circumference(self) -> float:
        return _TWO_PI * self.period_scale

    @property
    def dalpha(self) -> float:
        return self.circumference / self.n_modes

    @property
    def max_abs_k(self) -> float:
        return (self.n_modes // 2 - 1) / self.period_scale

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, FourierGrid)
            and self.n_modes == other.n_modes
            and self.period_scale == other.period_scale
        )

    def __hash__(self):
        return hash((self.n_modes, self.period_scale))

    def __repr__(self):
        return f"FourierGrid(n_modes={self.n_modes}, period_scale={self.period_scale})"

    def alpha_principal(self) -> np.ndarray:
        """Collocation angles folded to the principal window (-pi*L, pi*L]."""
        half = self.circumference / 2.0
        a = np.mod(self.alpha + half, self.circumference) - half
        # fold maps -pi*L to +pi*L; keep the right-open convention
        a[a == -half] = half
        return a


def _zero_nyquist(grid: FourierGrid, coeffs: np.ndarray) -> np.ndarray:
    coeffs[grid.nyquist_index] = 0.0
    return coeffs


class SpectralField:
    """Complex periodic function stored by Fourier coefficients.

    ``holomorphic`` is a bookkeeping flag: it is set by constructors that
    guarantee spectrum <= 0 (projection, products of holomorphic fields,
    Fourier multipliers) and checked cheaply in ``assert_holomorphic``.
    """

    __slots__ = ("grid", "coeffs", "holomorphic")

    def __init__(self, grid: FourierGrid, coeffs: np.ndarray, holomorphic: bool = False):
        c = np.asarray(coeffs, dtype=np.complex128).copy()
        if c.shape != (grid.n_modes,):
            raise ValueError("coefficient array does not match grid")
        _zero_nyquist(grid, c)
        self.grid = grid
        self.coeffs = c
        self.holomorphic = holomorphic

    # -- constructors ------------------------------------------------------

    @classmethod
    def zeros(cls, grid: FourierGrid, holomorphic: bool = True) -> "SpectralField":
        return cls(grid, np.zeros(grid.n_modes, dtype=np.complex128), holomorphic)

    @classmethod
    def from_values(cls, grid: FourierGrid, values: np.ndarray) -> "SpectralField":
        vals = np.asarray(values, dtype=np.complex128)
        if vals.shape != (grid.n_modes,):
            raise ValueError("value array does not match grid")
        return cls(grid, np.fft.fft(vals) / grid.n_modes)

    @classmethod
    def from_modes(cls, grid: FourierGrid, amplitudes: dict[int, complex]) -> "SpectralField":
        c = np.zeros(grid.n_modes, dtype=np.complex128)
        holo = True
        for m, a in amplitudes.items():
            if abs(m) > grid.n_modes // 2 - 1:
                raise ValueError(f"mode {m} outside resolved band")
            c[m % grid.n_modes] = a
            holo = holo and (m <= 0)
        return cls(grid, c, holomorphic=holo)

    # -- basic queries -----------------------------------------------------

    def values(self, fine: int = 1) -> np.ndarray:
        """Physical values, optionally on a ``fine``-times oversampled grid."""
        if fine == 1:
            return np.fft.ifft(self.coeffs) * self.grid.n_modes
        return _pad_values(self.grid, self.coeffs, fine)

    def mode(self, m: int) -> complex:
        return complex(self.coeffs[m % self.grid.n_modes])

    def copy(self, holomorphic: bool | None = None) -> "SpectralField":
        return SpectralField(
            self.grid, self.coeffs,
            self.holomorphic if holomorphic is None else holomorphic,
        )

    def positive_spectrum_fraction(self) -> float:
        """max |coeff on k > 0| relative to the field's sup of |coeffs|."""
        pos = np.abs(self.coeffs[self.grid.modes > 0]).max(initial=0.0)
        scale = np.abs(self.coeffs).max(initial=0.0)
        return float(pos / scale) if scale > 0 else 0.0

    def assert_holomorphic(self, tol: float = 1e-12):
        if self.positive_spectrum_fraction() > tol:
            raise ValueError("field has positive-frequency content above tolerance")

    # -- algebra -----------------------------------------------------------

    def __add__(self, other: "SpectralField") -> "SpectralField":
        self._check(other)
        return SpectralField(self.grid, self.coeffs + other.coeffs,
                             self.holomorphic and other.holomorphic)

    def __sub__(self, other: "SpectralField") -> "SpectralField":
        self._check(other)
        return SpectralField(self.grid, self.coeffs - other.coeffs,
                             self.holomorphic and other.holomorphic)

    def __mul__(self, scalar) -> "SpectralField":
        return SpectralField(self.grid, self.coeffs * scalar, self.holomorphic)

    __rmul__ = __mul__

    def __neg__(self) -> "SpectralField":
        return SpectralField(self.grid, -self.coeffs, self.holomorphic)

    def _check(self, other: "SpectralField"):
        if self.grid != other.grid:
            raise ValueError("grid mismatch")

    def conj(self) -> "SpectralField":
        n = self.grid.n_modes
        c = np.conj(self.coeffs[(-np.arange(n)) % n])
        return SpectralField(self.grid, c, holomorphic=False)

    def real_part(self) -> "SpectralField":
        return 0.5 * (self + self.conj())

    def imag_part(self) -> "SpectralField":
        return (-0.5j) * (self - self.conj())

    # -- multipliers -------------------------------------------------------

    def derivative(self, order: int = 1) -> "SpectralField":
        mult = (1j * self.grid.k) ** order
        return SpectralField(self.grid, self.coeffs * mult, self.holomorphic)

    def fractional(self, s: float) -> "SpectralField":
        """|D|^s: coefficients scaled by |k|^s, zero mode mapped to zero."""
        absk = np.abs(self.grid.k)
        mult = np.zeros_like(absk)
        nz = absk > 0
        mult[nz] = absk[nz] ** s
        return SpectralField(self.grid, self.coeffs * mult, self.holomorphic)

    def shift(self, d: float) -> "SpectralField":
        """Translate: alpha -> alpha - d."""
        return SpectralField(self.grid, self.coeffs * np.exp(-1j * self.grid.k * d),
                             self.holomorphic)

    def lowpass(self, cut: float) -> "SpectralField":
        """Sharp cutoff keeping physical frequencies |k| < cut."""
        mask = np.abs(self.grid.k) < cut
        return SpectralField(self.grid, np.where(mask, self.coeffs, 0.0), self.holomorphic)

    def highpass(self, cut: float) -> "SpectralField":
        mask = np.abs(self.grid.k) >= cut
        return SpectralField(self.grid, np.where(mask, self.coeffs, 0.0), self.holomorphic)

    def dyadic_block(self, lam: int) -> "SpectralField":
        return dyadic_block(self, lam)

    # -- norms and integrals -------------------------------------------------

    def sobolev_norm(self, s: float) -> float:
        """Hdot^s norm: sqrt(2 pi L * sum |k|^{2s} |fhat|^2), zero mode
        excluded unless s == 0."""
        w = np.abs(self.grid.k)
        amp2 = np.abs(self.coeffs) ** 2
        if s == 0:
            total = amp2.sum()
        else:
            nz = w > 0
            total = (w[nz] ** (2 * s) * amp2[nz]).sum()
        return float(np.sqrt(self.grid.circumference * total))

    def l2_norm(self) -> float:
        return self.sobolev_norm(0.0)

    def sup_norm(self, fine: int = 4) -> float:
        return float(np.abs(self.values(fine=fine)).max())

    def besov0_norm(self) -> float:
        """B^0_{2,inf} realized as sup over dyadic blocks of the block
        coefficient-l2 mass (a single mode of amplitude a contributes |a|)."""
        best = 0.0
        lam = 1
        absm = np.abs(self.grid.modes)
        while lam < self.grid.n_modes // 2:
            sel = (absm >= lam) & (absm < 2 * lam)
            best = max(best, float(np.sqrt((np.abs(self.coeffs[sel]) ** 2).sum())))
            lam *= 2
        return best

    def integral(self) -> complex:
        return complex(self.coeffs[0] * self.grid.circumference)

    def meanfree(self) -> "SpectralField":
        c = self.coeffs.copy()
        c[0] = 0.0
        return SpectralField(self.grid, c, self.holomorphic)


# -- projector and products ------------------------------------------------

def project_holomorphic(f: SpectralField) -> SpectralField:
    """P = (Id - i*Hilbert)/2: keep k < 0, half the zero mode, kill k > 0."""
    mask = np.where(f.grid.modes < 0, 1.0, np.where(f.grid.modes == 0, 0.5, 0.0))
    return SpectralField(f.grid, f.coeffs * mask, holomorphic=True)


def project_antiholomorphic(f: SpectralField) -> SpectralField:
    """Pbar: keep k > 0, half the zero mode."""
    mask = np.where(f.grid.modes > 0, 1.0, np.where(f.grid.modes == 0, 0.5, 0.0))
    return SpectralField(f.grid, f.coeffs * mask, holomorphic=False)


def scrub_positive(f: SpectralField) -> SpectralField:
    """Zero the k > 0 coefficients, leaving k <= 0 (including the mean)
    untouched.

    Use this to remove positive-frequency truncation junk from fields that
    are holomorphic by analyticity (quotients, composite expressions); the
    genuine projector P additionally halves the zero mode and is reserved
    for the P brackets appearing in the equations.
    """
    return SpectralField(f.grid, np.where(f.grid.modes > 0, 0.0, f.coeffs),
                         holomorphic=True)


def _pad_values(grid: FourierGrid, coeffs: np.ndarray, factor: int) -> np.ndarray:
    n = grid.n_modes
    nf = factor * n
    padded = np.zeros(nf, dtype=np.complex128)
    half = n // 2
    padded[:half] = coeffs[:half]
    padded[nf - half:] = coeffs[half:]
    return np.fft.ifft(padded) * nf


def _truncate_values(grid: FourierGrid, values: np.ndarray) -> np.ndarray:
    nf = values.shape[0]
    n = grid.n_modes
    chat = np.fft.fft(values) / nf
    half = n // 2
    out = np.zeros(n, dtype=np.complex128)
    out[:half] = chat[:half]
    out[half:] = chat[nf - half:]
    return out


def fine_values(f: SpectralField, factor: int = 2) -> np.ndarray:
    return _pad_values(f.grid, f.coeffs, factor)


def field_from_fine(grid: FourierGrid, values: np.ndarray) -> SpectralField:
    return SpectralField(grid, _truncate_values(grid, values))


def product(f: SpectralField, g: SpectralField, *more: SpectralField) -> SpectralField:
    """Dealiased pointwise product, formed as repeated padded binary products."""
    f._check(g)
    out = _binary_product(f, g)
    for h in more:
        out = _binary_product(out, h)
    return out


def _binary_product(f: SpectralField, g: SpectralField) -> SpectralField:
    vals = fine_values(f, 2) * fine_values(g, 2)
    res = field_from_fine(f.grid, vals)
    if f.holomorphic and g.holomorphic:
        # spectra <= 0 convolve to <= 0; scrub roundoff and keep the flag
        res = SpectralField(f.grid, np.where(f.grid.modes > 0, 0.0, res.coeffs), True)
    return res


def quotient(f: SpectralField, g: SpectralField) -> SpectralField:
    """Pointwise f/g on the doubled grid, truncated back (pseudo-spectral)."""
    f._check(g)
    vals = fine_values(f, 2) / fine_values(g, 2)
    return field_from_fine(f.grid, vals)


def reciprocal(g: SpectralField, shift: complex = 1.0) -> SpectralField:
    """Pointwise 1/(shift + g) on the doubled grid."""
    vals = 1.0 / (shift + fine_values(g, 2))
    return field_from_fine(g.grid, vals)


def dyadic_block(f: SpectralField, lam: int) -> SpectralField:
    """Select integer modes with |m| in [lam, 2*lam); lam a dyadic integer."""
    if lam < 1 or (lam & (lam - 1)) != 0:
        raise ValueError(f"block start must be a power of two, got {lam}")
    if lam >= f.grid.n_modes // 2:
        raise ValueError(f"block {lam} above the Nyquist band")
    absm = np.abs(f.grid.modes)
    mask = (absm >= lam) & (absm < 2 * lam)
    return SpectralField(f.grid, np.where(mask, f.coeffs, 0.0), f.holomorphic)


def dyadic_blocks(grid: FourierGrid) -> list[int]:
    """All dyadic block starts within the resolved band."""
    out, lam = [], 1
    while lam < grid.n_modes // 2:
        out.append(lam)
        lam *= 2
    return out


def pairing_l2(f: SpectralField, g: SpectralField) -> complex:
    """Complex L^2 pairing: integral of f * conj(g)."""
    f._check(g)
    return complex(self_dot(f.coeffs, g.coeffs) * f.grid.circumference)


def self_dot(a: np.ndarray, b: np.ndarray) -> complex:
    return complex(np.sum(a * np.conj(b)))


def random_holomorphic(
    grid: FourierGrid,
    rng: np.random.Generator,
    amplitude: float = 1.0,
    band: tuple[int, int] | None = None,
    decay: float = 1.0,
) -> SpectralField:
    """Random holomorphic field with |m|^-decay envelope on negative modes."""
    lo, hi = band if band is not None else (1, grid.n_modes // 4)
    c = np.zeros(grid.n_modes, dtype=np.complex128)
    for m in range(lo, hi + 1):
        z = rng.normal() + 1j * rng.normal()
        c[-m % grid.n_modes] = amplitude * z / (np.sqrt(2.0) * m ** decay)
    return SpectralField(grid, c, holomorphic=True)
