"""Initial-condition builders.

Packet data is built directly in Fourier space (a Gaussian envelope
around a carrier frequency, supported on k < 0), which keeps the
spectrum cleanly separated from the zero mode and the band edge; the
physical profile is a localized wave packet centered at a chosen angle.
"""

from __future__ import annotations

import numpy as np

from .dynamics import WaterState
from .spectral import FourierGrid, SpectralField


def mode_state(grid: FourierGrid, eps: float, mode: int = -1,
               phase: complex = 1.0, right_moving: bool = True,
               sigma: float = 1.0) -> WaterState:
    """Single-mode data; right_moving matches Q to the Z_+ branch."""
    if mode >= 0:
        raise ValueError("holomorphic data needs a negative mode")
    W = SpectralField.from_modes(grid, {mode: eps * phase})
    amp = np.sqrt(sigma * abs(mode) / grid.period_scale) if right_moving else 1.0
    Q = SpectralField.from_modes(grid, {mode: eps * phase * amp})
    return WaterState(W, Q, sigma=sigma)


def packet_state(grid: FourierGrid, eps: float, carrier: float = -1.0,
                 rel_width: float = 0.25, center: float = 0.0,
                 right_moving: bool = True, sigma: float = 1.0) -> WaterState:
    """Localized packet: Gaussian spectral envelope around ``carrier``.

    sup|W| is normalized to eps; Q is matched to the right-moving branch
    (Qhat = sqrt(sigma |k|) What) unless right_moving is False.
    """
    if carrier >= 0:
        raise ValueError("carrier frequency must be negative")
    dk = abs(carrier) * rel_width
    prof = np.where(grid.k < 0, np.exp(-((grid.k - carrier) / dk) ** 2), 0.0)
    prof = prof * np.exp(-1j * grid.k * center)
    W = SpectralField(grid, prof.astype(np.complex128), True)
    if right_moving:
        Q = SpectralField(grid, W.coeffs * np.sqrt(sigma * np.abs(grid.k)), True)
    else:
        Q = W.copy()
    scale = eps / max(W.sup_norm(), 1e-300)
    return WaterState(W * scale, Q * scale, sigma=sigma)


def multimode_state(grid: FourierGrid, amplitudes_w: dict[int, complex],
                    amplitudes_q: dict[int, complex], sigma: float = 1.0) -> WaterState:
    return WaterState(SpectralField.from_modes(grid, amplitudes_w),
                      SpectralField.from_modes(grid, amplitudes_q), sigma=sigma)


def seeded_random_state(grid: FourierGrid, eps: float, seed: int,
                        band: tuple[int, int] | None = None,
                        decay: float = 1.0, sigma: float = 1.0) -> WaterState:
    from .spectral import random_holomorphic
    rng = np.random.default_rng(seed)
    W = random_holomorphic(grid, rng, eps, band=band, decay=decay)
    Q = random_holomorphic(grid, rng, eps, band=band, decay=decay)
    return WaterState(W, Q, sigma=sigma)
