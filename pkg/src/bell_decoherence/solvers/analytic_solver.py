"""
Closed-form solver: pure dephasing under white or OU noise, isotropic and
transverse white noise.
"""

from typing import List

import numpy as np

from .base_solver import BaseSolver, SolverCapability
from ..core.analytic_solutions import (
    dephasing_concurrence, isotropic_white_concurrence, transverse_white_concurrence,
)
from ..core.exceptions import MethodGeometryError
from ..core.interfaces import Geometry, Method, MethodTrace, NoiseKind
from ..core.noise_models import dephasing_decay
from ..utils.config import Scenario
from ..utils.logger import get_logger

logger = get_logger(__name__)


class AnalyticSolver(BaseSolver):
    """Exact concurrence from closed-form expressions."""

    def _define_capabilities(self) -> SolverCapability:
        return SolverCapability(
            method=Method.ANALYTIC,
            supported_regimes=[
                (Geometry.DEPHASING, NoiseKind.WHITE),
                (Geometry.DEPHASING, NoiseKind.OU),
                (Geometry.ISOTROPIC, NoiseKind.WHITE),
                (Geometry.TRANSVERSE, NoiseKind.WHITE),
            ],
            notes=["white-noise forms need equal strengths on the enabled axes"],
        )

    def _solve(self, scenario: Scenario, n_jobs: int) -> List[MethodTrace]:
        spec = scenario.noise_spec()
        times = scenario.times()
        traces = []

        if scenario.geometry == Geometry.DEPHASING:
            auto = 0.5 * (dephasing_decay(spec, times, "auto", 1) + dephasing_decay(spec, times, "auto", 2))
            cross = dephasing_decay(spec, times, "cross")
            for state in scenario.state:
                concurrence = np.asarray(dephasing_concurrence(state, auto, cross))
                traces.append(MethodTrace(Method.ANALYTIC, state, times, concurrence))
            return traces

        if not spec.has_isotropic_white_strength():
            raise MethodGeometryError("analytic white-noise forms need equal T on every enabled axis")
        T = float(spec.white_times()[np.asarray(spec.axes)][0])
        formula = (isotropic_white_concurrence if scenario.geometry == Geometry.ISOTROPIC
                   else transverse_white_concurrence)
        for state in scenario.state:
            concurrence = np.asarray(formula(state, scenario.gamma, T, times))
            traces.append(MethodTrace(Method.ANALYTIC, state, times, concurrence, metadata={"T": T}))
        logger.debug(f"Analytic {scenario.geometry.value}: {len(traces)} traces")
        return traces
