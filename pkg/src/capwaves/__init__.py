"""capwaves: pseudo-spectral laboratory for 2D deep-water capillary waves
in holomorphic coordinates."""

from .spectral import FourierGrid, SpectralField, project_holomorphic, product

__all__ = ["FourierGrid", "SpectralField", "project_holomorphic", "product"]
__version__ = "0.1.0"
