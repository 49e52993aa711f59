"""cone-forge: computable checks for special-holonomy cone geometry."""

from . import bessel, edge, g2, lattice, spectra, stenzel

__version__ = "0.1.0"

__all__ = ["bessel", "edge", "g2", "lattice", "spectra", "stenzel"]
