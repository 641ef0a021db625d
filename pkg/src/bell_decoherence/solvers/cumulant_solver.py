"""
Second-order cumulant solver.
"""

from typing import List

import numpy as np

from .base_solver import BaseSolver, SolverCapability
from ..core.entanglement import (
    LABEL_ANTIPARALLEL, LABEL_LONGITUDINAL, LABEL_PARALLEL,
    concurrence_from_expectations, concurrence_wootters,
)
from ..core.exceptions import NotADensityMatrixError, NumericalError
from ..core.interfaces import Geometry, Method, MethodTrace, NoiseKind
from ..core.operator_algebra import bell_state
from ..core.stochastic_propagator import cumulant_propagator, heisenberg_expectation, schrodinger_evolve
from ..utils.config import Scenario
from ..utils.logger import get_logger

logger = get_logger(__name__)

CUMULANT_PSD_TOL = 1e-8


class CumulantSolver(BaseSolver):
    """Concurrence from exp(K2) composed with the free rotation."""

    def _define_capabilities(self) -> SolverCapability:
        return SolverCapability(
            method=Method.CUMULANT2,
            supported_regimes=[(g, k) for g in Geometry for k in NoiseKind],
            notes=["exact for dephasing; second-order approximation otherwise"],
        )

    def _solve(self, scenario: Scenario, n_jobs: int) -> List[MethodTrace]:
        spec = scenario.noise_spec()
        times = scenario.times()
        # axially symmetric noise keeps Bell states in X_corr
        symmetric = spec.kind == NoiseKind.OU or spec.has_isotropic_white_strength() or not spec.axes[0]
        rho0s = {state: bell_state(state) for state in scenario.state}
        values = {state: np.empty(len(times)) for state in scenario.state}

        for k, t in enumerate(times):
            propagator = cumulant_propagator(spec, scenario.omega, float(t))
            for state, rho0 in rho0s.items():
                if symmetric:
                    values[state][k] = concurrence_from_expectations(
                        heisenberg_expectation(propagator, LABEL_ANTIPARALLEL, rho0),
                        heisenberg_expectation(propagator, LABEL_PARALLEL, rho0),
                        heisenberg_expectation(propagator, LABEL_LONGITUDINAL, rho0),
                    )
                else:
                    rho = schrodinger_evolve(propagator, rho0)
                    try:
                        values[state][k] = concurrence_wootters(rho, psd_tol=CUMULANT_PSD_TOL).value
                    except NotADensityMatrixError as e:
                        raise NumericalError(f"cumulant state at t={t:g} is not physical: {e}") from e

        traces = []
        for state in scenario.state:
            concurrence = values[state]
            if np.any(concurrence > 1.0):
                logger.warning(f"cumulant concurrence for {state.value} exceeds 1 by "
                               f"{float(np.max(concurrence)) - 1.0:.3g}; clipped")
                concurrence = np.minimum(concurrence, 1.0)
            traces.append(MethodTrace(Method.CUMULANT2, state, times, concurrence))
        return traces
