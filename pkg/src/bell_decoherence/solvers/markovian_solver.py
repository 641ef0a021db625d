"""
Markovian limit of OU noise: white-noise forms with rates taken from the
noise spectrum.
"""

from typing import List

import numpy as np

from .base_solver import BaseSolver, SolverCapability
from ..core.analytic_solutions import dephasing_concurrence, markovian_transverse_T, transverse_white_concurrence
from ..core.exceptions import MethodGeometryError
from ..core.interfaces import Geometry, Method, MethodTrace, NoiseKind
from ..core.noise_models import markovian_rates
from ..utils.config import Scenario


class MarkovianSolver(BaseSolver):
    """Long-time limit: Gamma(t) ~ t/T2 for dephasing, T = 1/S(Omega) for transverse noise."""

    def _define_capabilities(self) -> SolverCapability:
        return SolverCapability(
            method=Method.MARKOVIAN,
            supported_regimes=[(Geometry.DEPHASING, NoiseKind.OU), (Geometry.TRANSVERSE, NoiseKind.OU)],
        )

    def _solve(self, scenario: Scenario, n_jobs: int) -> List[MethodTrace]:
        spec = scenario.noise_spec()
        times = scenario.times()
        sigma1, sigma2 = spec.amplitudes

        if scenario.geometry == Geometry.DEPHASING:
            _, cross_rate = markovian_rates(spec)
            auto_rate = 0.5 * (sigma1**2 + sigma2**2) * spec.tc
            return [
                MethodTrace(Method.MARKOVIAN, state, times,
                            np.asarray(dephasing_concurrence(state, auto_rate * times, cross_rate * times)),
                            metadata={"T2": 1.0 / auto_rate if auto_rate else np.inf})
                for state in scenario.state
            ]

        if sigma1 != sigma2:
            raise MethodGeometryError("markovian transverse limit needs equal amplitudes")
        T = markovian_transverse_T(spec, scenario.omega)
        return [
            MethodTrace(Method.MARKOVIAN, state, times,
                        np.asarray(transverse_white_concurrence(state, scenario.gamma, T, times)),
                        metadata={"T": T})
            for state in scenario.state
        ]
