"""qutrit-qrng: simulation and analysis of a spin-1 quantum random number generator."""

__version__ = "0.1.0"
