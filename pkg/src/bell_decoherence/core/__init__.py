"""
Bell Decoherence Core Module
Operator algebra, concurrence, noise models, analytic solutions and propagators.
"""

__version__ = "1.0.0"
__author__ = "Bell Decoherence Team"
