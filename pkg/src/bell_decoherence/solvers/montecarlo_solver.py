"""
Monte Carlo solver: exact evolution averaged over sampled noise.
"""

from typing import List

from .base_solver import BaseSolver, SolverCapability
from ..core.interfaces import Geometry, Method, MethodTrace, NoiseKind
from ..core.stochastic_propagator import ensemble_average
from ..utils.config import Scenario


class MonteCarloSolver(BaseSolver):

    def _define_capabilities(self) -> SolverCapability:
        return SolverCapability(
            method=Method.MONTECARLO,
            supported_regimes=[(g, k) for g in Geometry for k in NoiseKind],
        )

    def _solve(self, scenario: Scenario, n_jobs: int) -> List[MethodTrace]:
        result = ensemble_average(scenario, n_jobs=n_jobs)
        metadata = {"trajectories": result.n_trajectories, "seed": result.seed, "dt": result.dt}
        return [
            MethodTrace(Method.MONTECARLO, state, result.times, result.concurrence[i],
                        stderr=result.stderr[i], metadata=metadata)
            for i, state in enumerate(result.states)
        ]
