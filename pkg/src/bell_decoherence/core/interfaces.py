"""
Core interfaces for Bell Decoherence.
Defines enums, result dataclasses and abstract base classes shared by the
solvers, the trace processor and the CLI.
"""

from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
import pandas as pd


class BellState(str, Enum):
    """The four maximally entangled two-qubit states."""
    PSI_MINUS = "psi_minus"
    PSI_PLUS = "psi_plus"
    PHI_PLUS = "phi_plus"
    PHI_MINUS = "phi_minus"

    @classmethod
    def parse(cls, label: Union[str, "BellState"]) -> "BellState":
        """Accept enum members, values ('psi_minus') and short forms ('psi-', 'Ψ−')."""
        if isinstance(label, cls):
            return label
        text = str(label).strip().lower().replace("−", "-")
        aliases = {
            "psi-": cls.PSI_MINUS, "ψ-": cls.PSI_MINUS,
            "psi+": cls.PSI_PLUS, "ψ+": cls.PSI_PLUS,
            "phi+": cls.PHI_PLUS, "φ+": cls.PHI_PLUS,
            "phi-": cls.PHI_MINUS, "φ-": cls.PHI_MINUS,
        }
        if text in aliases:
            return aliases[text]
        try:
            return cls(text)
        except ValueError:
            from .exceptions import InvalidLabelError
            raise InvalidLabelError(
                f"Unknown Bell state '{label}'; expected one of {[s.value for s in cls]}"
            ) from None

    @property
    def is_psi(self) -> bool:
        return self in (BellState.PSI_MINUS, BellState.PSI_PLUS)


class Geometry(str, Enum):
    """Which spin components the noise couples to."""
    DEPHASING = "dephasing"
    ISOTROPIC = "isotropic"
    TRANSVERSE = "transverse"

    @property
    def axes(self) -> Tuple[bool, bool, bool]:
        return _GEOMETRY_AXES[self]

    @classmethod
    def from_axes(cls, axes: Sequence[bool]) -> Optional["Geometry"]:
        for geometry, flags in _GEOMETRY_AXES.items():
            if tuple(bool(a) for a in axes) == flags:
                return geometry
        return None


_GEOMETRY_AXES = {
    Geometry.DEPHASING: (False, False, True),
    Geometry.ISOTROPIC: (True, True, True),
    Geometry.TRANSVERSE: (True, True, False),
}


class NoiseKind(str, Enum):
    """Temporal color of the noise."""
    WHITE = "white"
    OU = "ou"


class Method(str, Enum):
    """Concurrence evaluation routes."""
    ANALYTIC = "analytic"
    QSBA = "qsba"
    CUMULANT2 = "cumulant2"
    MONTECARLO = "montecarlo"
    MARKOVIAN = "markovian"


class Basis(str, Enum):
    """Spherical-tensor basis used by decompositions."""
    PRODUCT = "product"
    COUPLED = "coupled"


class ConcurrenceMethod(str, Enum):
    """How a concurrence value was computed."""
    WOOTTERS = "wootters"
    XCORR = "xcorr_closed_form"


@dataclass(frozen=True)
class ConcurrenceValue:
    """Concurrence of one two-qubit state."""
    value: float
    method: ConcurrenceMethod

    def __float__(self) -> float:
        return self.value


@dataclass
class MethodTrace:
    """Concurrence time series produced by one solver for one initial state."""
    method: Method
    state: BellState
    times: np.ndarray
    concurrence: np.ndarray
    stderr: Optional[np.ndarray] = None
    metadata: Dict[str, Any] = field(default_factory=dict)


@dataclass
class ValidationResult:
    """Result of trace validation."""
    is_valid: bool
    errors: List[str]
    warnings: List[str]
    row_count: int
    group_count: int


# Rows of (t, method, state, concurrence, stderr).
ConcurrenceTrace = pd.DataFrame


class ISolver(ABC):
    """Interface for concurrence solvers."""

    @abstractmethod
    def solve(self, scenario: Any, n_jobs: int = 1) -> List[MethodTrace]:
        """Evaluate concurrence on the scenario's time grid for each requested state."""
        pass

    @abstractmethod
    def get_capabilities(self) -> Dict[str, Any]:
        """Return supported geometries and noise kinds."""
        pass


class ITraceProcessor(ABC):
    """Interface for concurrence trace handling."""

    @abstractmethod
    def validate_trace(self, trace: ConcurrenceTrace) -> ValidationResult:
        """Check trace structure and value ranges."""
        pass

    @abstractmethod
    def write_csv(self, trace: ConcurrenceTrace, path: Union[str, Path]) -> Path:
        """Write the trace as CSV."""
        pass

    @abstractmethod
    def read_csv(self, path: Union[str, Path]) -> ConcurrenceTrace:
        """Load a trace written by write_csv."""
        pass
