"""Fock quantization of linear symplectic systems and alien number operators."""

__version__ = "0.1.0"
