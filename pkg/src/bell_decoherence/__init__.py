"""
Two-qubit disentanglement under classical correlated Gaussian noise.
"""

from .core import __version__

__all__ = ["__version__"]
