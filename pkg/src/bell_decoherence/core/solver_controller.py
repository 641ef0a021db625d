"""
Solver Controller for Bell Decoherence.
Registers solvers per method and dispatches scenarios to them.
"""

import uuid
from typing import Dict, List, Optional, Type

import numpy as np

from .exceptions import BellDecoherenceError, MethodGeometryError, NumericalError
from .interfaces import ConcurrenceTrace, Geometry, Method, MethodTrace, NoiseKind
from .trace_processor import TraceProcessor
from ..solvers.base_solver import BaseSolver
from ..utils.config import Scenario
from ..utils.logger import get_logger

logger = get_logger(__name__)


class SolverController:
    """Controls and coordinates all solvers in the system."""

    def __init__(self, trace_processor: Optional[TraceProcessor] = None):
        self.solvers: Dict[str, BaseSolver] = {}
        self.solver_types: Dict[Method, Type[BaseSolver]] = {}
        self.trace_processor = trace_processor or TraceProcessor()

    def register_solver_type(self, method: Method, solver_class: Type[BaseSolver]):
        """Register a solver type for dynamic instantiation."""
        self.solver_types[Method(method)] = solver_class

    def create_solver(self, method: Method, solver_id: Optional[str] = None) -> str:
        """Create and register a new solver instance."""
        method = Method(method)
        if method not in self.solver_types:
            raise MethodGeometryError(f"Unknown solver method: {method.value}")

        if solver_id is None:
            solver_id = f"{method.value}_{uuid.uuid4().hex[:8]}"

        self.solvers[solver_id] = self.solver_types[method](solver_id)
        return solver_id

    def get_solver(self, solver_id: str) -> Optional[BaseSolver]:
        """Get solver by ID."""
        return self.solvers.get(solver_id)

    def get_solvers_by_capability(
        self, geometry: Geometry, noise_kind: NoiseKind, gamma: Optional[float] = None
    ) -> List[BaseSolver]:
        """Get all solvers that can handle the given regime."""
        return [s for s in self.solvers.values() if s.can_handle(geometry, noise_kind, gamma)]

    def _solver_for(self, method: Method) -> BaseSolver:
        for solver in self.solvers.values():
            if solver.method == method:
                return solver
        return self.solvers[self.create_solver(method)]

    def run_scenario(self, scenario: Scenario, n_jobs: int = 1) -> ConcurrenceTrace:
        """Evaluate every requested method and return one trace table.

        All method/geometry pairings are checked before any solver runs.
        """
        solvers = [self._solver_for(method) for method in scenario.methods]
        for solver in solvers:
            solver.check_scenario(scenario)

        traces: List[MethodTrace] = []
        for solver in solvers:
            logger.info(f"Running {solver.method.value} on {scenario.geometry.value} "
                        f"{scenario.noise.kind.value} noise")
            try:
                result = solver.solve(scenario, n_jobs=n_jobs)
            except BellDecoherenceError:
                raise
            except (FloatingPointError, np.linalg.LinAlgError, ZeroDivisionError) as e:
                raise NumericalError(f"{solver.method.value}: {e}") from e
            for trace in result:
                if not np.all(np.isfinite(trace.concurrence)):
                    raise NumericalError(f"{solver.method.value} produced non-finite concurrence")
            traces.extend(result)

        trace = self.trace_processor.build_trace(traces)
        validation = self.trace_processor.validate_trace(trace)
        for warning in validation.warnings:
            logger.warning(warning)
        if not validation.is_valid:
            raise NumericalError("; ".join(validation.errors))
        return trace


def create_default_controller() -> SolverController:
    """Controller with every built-in solver registered."""
    from ..solvers.analytic_solver import AnalyticSolver
    from ..solvers.cumulant_solver import CumulantSolver
    from ..solvers.markovian_solver import MarkovianSolver
    from ..solvers.montecarlo_solver import MonteCarloSolver
    from ..solvers.qsba_solver import QSBASolver

    controller = SolverController()
    controller.register_solver_type(Method.ANALYTIC, AnalyticSolver)
    controller.register_solver_type(Method.QSBA, QSBASolver)
    controller.register_solver_type(Method.CUMULANT2, CumulantSolver)
    controller.register_solver_type(Method.MONTECARLO, MonteCarloSolver)
    controller.register_solver_type(Method.MARKOVIAN, MarkovianSolver)
    return controller
