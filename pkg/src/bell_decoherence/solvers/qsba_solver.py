"""
Quasi-static bath solver for strong transverse OU noise.
"""

from typing import List

import numpy as np

from .base_solver import BaseSolver, SolverCapability
from ..core.analytic_solutions import qsba_concurrence, qsba_validity
from ..core.exceptions import MethodGeometryError
from ..core.interfaces import Geometry, Method, MethodTrace, NoiseKind
from ..utils.config import Scenario
from ..utils.logger import get_logger

logger = get_logger(__name__)


class QSBASolver(BaseSolver):
    """Power-law decay for uncorrelated (gamma = 0) or fully correlated (gamma = 1) noise."""

    def _define_capabilities(self) -> SolverCapability:
        return SolverCapability(
            method=Method.QSBA,
            supported_regimes=[(Geometry.TRANSVERSE, NoiseKind.OU)],
            gammas=(0.0, 1.0),
            notes=["valid for sigma/omega <= 0.3"],
        )

    def _solve(self, scenario: Scenario, n_jobs: int) -> List[MethodTrace]:
        if scenario.omega <= 0:
            raise MethodGeometryError("qsba needs a positive omega")
        spec = scenario.noise_spec()
        sigma1, sigma2 = spec.amplitudes
        valid = qsba_validity(sigma1, sigma2, scenario.omega)
        times = scenario.times()
        correlated = scenario.gamma == 1.0
        return [
            MethodTrace(
                Method.QSBA, state, times,
                np.asarray(qsba_concurrence(state, correlated, sigma1, sigma2, scenario.omega, times)),
                metadata={"valid": valid, "correlated": correlated},
            )
            for state in scenario.state
        ]
