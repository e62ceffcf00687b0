"""Jamming simulation and loss-of-orthogonality detection for OFDM physical channels."""
from .kernels import BACKEND

__version__ = "0.1.0"
__all__ = ["BACKEND", "__version__"]
