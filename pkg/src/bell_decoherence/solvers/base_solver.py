"""
Base solver class for Bell Decoherence.
Provides common functionality for all concurrence solvers.
"""

from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, List, Optional, Tuple

from ..core.exceptions import MethodGeometryError
from ..core.interfaces import Geometry, ISolver, Method, MethodTrace, NoiseKind
from ..utils.config import Scenario
from ..utils.logger import get_logger

logger = get_logger(__name__)


class SolverStatus(Enum):
    """Status of solver execution."""
    IDLE = "idle"
    BUSY = "busy"
    ERROR = "error"


@dataclass
class SolverCapability:
    """Defines which scenarios a solver can evaluate."""
    method: Method
    supported_regimes: List[Tuple[Geometry, NoiseKind]]
    gammas: Optional[Tuple[float, ...]] = None
    notes: List[str] = field(default_factory=list)


class BaseSolver(ISolver, ABC):
    """Base class for all concurrence solvers."""

    def __init__(self, solver_id: str):
        self.solver_id = solver_id
        self.status = SolverStatus.IDLE
        self.capabilities = self._define_capabilities()
        self.runs = 0

    @abstractmethod
    def _define_capabilities(self) -> SolverCapability:
        """Define what this solver can do."""
        pass

    @abstractmethod
    def _solve(self, scenario: Scenario, n_jobs: int) -> List[MethodTrace]:
        """Evaluate the scenario. Must be implemented by subclasses."""
        pass

    @property
    def method(self) -> Method:
        return self.capabilities.method

    def can_handle(self, geometry: Geometry, noise_kind: NoiseKind, gamma: Optional[float] = None) -> bool:
        """Check if this solver can handle the given geometry, noise kind and correlation."""
        if (Geometry(geometry), NoiseKind(noise_kind)) not in self.capabilities.supported_regimes:
            return False
        if gamma is not None and self.capabilities.gammas is not None:
            return gamma in self.capabilities.gammas
        return True

    def check_scenario(self, scenario: Scenario) -> None:
        """Raise MethodGeometryError if the scenario is outside this solver's regimes."""
        if not self.can_handle(scenario.geometry, scenario.noise.kind, scenario.gamma):
            raise MethodGeometryError(
                f"method '{self.method.value}' does not support {scenario.geometry.value} "
                f"{scenario.noise.kind.value} noise with gamma={scenario.gamma:g}"
            )

    def solve(self, scenario: Scenario, n_jobs: int = 1) -> List[MethodTrace]:
        self.check_scenario(scenario)
        self.status = SolverStatus.BUSY
        try:
            traces = self._solve(scenario, n_jobs)
        except Exception:
            self.status = SolverStatus.ERROR
            raise
        self.status = SolverStatus.IDLE
        self.runs += 1
        return traces

    def get_capabilities(self) -> Dict[str, Any]:
        return {
            "method": self.method.value,
            "regimes": [(g.value, k.value) for g, k in self.capabilities.supported_regimes],
            "gammas": self.capabilities.gammas,
            "notes": list(self.capabilities.notes),
        }

    def get_status(self) -> Dict[str, Any]:
        """Get current solver status and metrics."""
        return {
            "solver_id": self.solver_id,
            "status": self.status.value,
            "capabilities": self.capabilities,
            "runs": self.runs
        }
