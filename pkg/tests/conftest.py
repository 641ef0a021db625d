"""
Shared fixtures for Bell Decoherence tests.
"""

import os
import sys

import numpy as np
import pytest

# Add src to path for imports
sys.path.insert(0, os.path.join(os.path.dirname(__file__), '..', 'src'))

from bell_decoherence.core.interfaces import BellState  # noqa: E402
from bell_decoherence.core.operator_algebra import bell_state  # noqa: E402


def make_xcorr_state(rng: np.random.Generator) -> np.ndarray:
    """Random X_corr density matrix: populations a (uu, dd), b (ud, du), coherences z, w."""
    a = rng.uniform(0.0, 0.5)
    b = 0.5 - a
    z = b * rng.uniform() * np.exp(2j * np.pi * rng.uniform())
    w = a * rng.uniform() * np.exp(2j * np.pi * rng.uniform())
    rho = np.zeros((4, 4), dtype=complex)
    rho[0, 0] = rho[1, 1] = b
    rho[2, 2] = rho[3, 3] = a
    rho[0, 1], rho[1, 0] = z, np.conj(z)
    rho[2, 3], rho[3, 2] = w, np.conj(w)
    return rho


@pytest.fixture
def rng():
    """Seeded random generator."""
    return np.random.default_rng(20240613)


@pytest.fixture
def bell_states():
    """Density matrices of the four Bell states."""
    return {state: bell_state(state) for state in BellState}


@pytest.fixture
def xcorr_states(rng):
    """A batch of random X_corr states."""
    return [make_xcorr_state(rng) for _ in range(200)]


@pytest.fixture
def random_mixed_state(rng):
    """Factory for full-rank states weight * Bell + (1 - weight) * Ginibre."""
    def factory(state=BellState.PHI_PLUS, weight=0.7):
        a = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
        ginibre = a @ a.conj().T
        return weight * bell_state(state) + (1 - weight) * ginibre / np.trace(ginibre).real

    return factory


@pytest.fixture
def make_scenario():
    """Factory for validated scenarios; keyword overrides use dotted keys via '__'."""
    from bell_decoherence.utils.config import scenario_from_flat

    def factory(**overrides):
        flat = {
            "geometry": "dephasing",
            "state": "all",
            "noise.kind": "white",
            "noise.T": 1.0,
            "t_max": 1.0,
            "n_points": 11,
            "methods": "analytic",
        }
        flat.update({key.replace("__", "."): value for key, value in overrides.items()})
        return scenario_from_flat(flat)

    return factory
