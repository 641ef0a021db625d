"""
Spin operators, spherical tensors and Bell states for two spin-1/2 qubits.

Two-qubit operators are dense 4x4 complex arrays in the product basis ordered
(up-down, down-up, up-up, down-down). That ordering is also the wire format of
dumped matrices. Superoperators are 16x16 arrays acting on row-major
vectorized operators, so that vec(A X B) = kron(A, B.T) vec(X).
"""

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Dict, Iterator, Tuple, Union

import numpy as np
from numpy.typing import NDArray

from .exceptions import InvalidLabelError, NotADensityMatrixError
from .interfaces import Basis, BellState
from ..utils.logger import get_logger

logger = get_logger(__name__)

TwoQubitOperator = NDArray[np.complex128]
SuperOperator = NDArray[np.complex128]

BASIS_ORDER = ("ud", "du", "uu", "dd")
# position k of the working basis holds Kronecker index _KRON_INDEX[k]
_KRON_INDEX = np.array([1, 2, 0, 3])

HERMITIAN_TOL = 1e-10
TRACE_TOL = 1e-10
PSD_TOL = 1e-12

_I2 = np.eye(2, dtype=complex)
PAULI = np.array([
    [[0, 1], [1, 0]],
    [[0, -1j], [1j, 0]],
    [[1, 0], [0, -1]],
], dtype=complex)
SPIN_HALF = PAULI / 2


def _freeze(array: np.ndarray) -> np.ndarray:
    array.flags.writeable = False
    return array


def from_kronecker(op: np.ndarray) -> TwoQubitOperator:
    """Reorder 4x4 operators (trailing axes) from Kronecker order (uu, ud, du, dd) to the working basis."""
    return np.asarray(op, dtype=complex)[..., _KRON_INDEX[:, None], _KRON_INDEX]


def to_kronecker(op: np.ndarray) -> np.ndarray:
    """Inverse of from_kronecker."""
    std = np.empty((4, 4), dtype=complex)
    std[np.ix_(_KRON_INDEX, _KRON_INDEX)] = op
    return std


def embed(first: np.ndarray, second: np.ndarray) -> TwoQubitOperator:
    """first (x) second as a two-qubit operator in the working basis."""
    return from_kronecker(np.kron(first, second))


@lru_cache(maxsize=None)
def spin_operators(qubit_index: int) -> Tuple[TwoQubitOperator, TwoQubitOperator, TwoQubitOperator]:
    """Jx, Jy, Jz of the indexed qubit with identity on the other one."""
    if qubit_index not in (1, 2):
        raise ValueError(f"qubit_index must be 1 or 2, got {qubit_index}")
    if qubit_index == 1:
        return tuple(_freeze(embed(j, _I2)) for j in SPIN_HALF)
    return tuple(_freeze(embed(_I2, j)) for j in SPIN_HALF)


@lru_cache(maxsize=None)
def spherical_tensor(l: int, m: int) -> np.ndarray:
    """Single-qubit spherical tensor T_lm as a 2x2 matrix."""
    if l not in (0, 1) or abs(m) > l:
        raise InvalidLabelError(f"Invalid spherical tensor indices l={l}, m={m}")
    jx, jy, jz = SPIN_HALF
    if l == 0:
        tensor = _I2 / 2  # Tr(T^dag T) = 1/2 like the rank-1 tensors
    elif m == 0:
        tensor = jz.copy()
    elif m == 1:
        tensor = -(jx + 1j * jy) / math.sqrt(2)
    else:
        tensor = (jx - 1j * jy) / math.sqrt(2)
    return _freeze(tensor)


@dataclass(frozen=True)
class ProductLabel:
    """T_{l1 m1} (x) T_{l2 m2}."""
    l1: int
    m1: int
    l2: int
    m2: int

    def __post_init__(self):
        for l, m in ((self.l1, self.m1), (self.l2, self.m2)):
            if l not in (0, 1) or abs(m) > l:
                raise InvalidLabelError(f"Invalid product label {self}")

    @property
    def total_m(self) -> int:
        return self.m1 + self.m2

    def __str__(self) -> str:
        return f"T{self.l1}{self.m1:+d}xT{self.l2}{self.m2:+d}"


@dataclass(frozen=True)
class CoupledLabel:
    """T_{L M (1 1)}, the rank-L tensor coupled from two rank-1 tensors."""
    L: int
    M: int

    def __post_init__(self):
        if self.L not in (0, 1, 2) or abs(self.M) > self.L:
            raise InvalidLabelError(f"Invalid coupled label L={self.L}, M={self.M}")

    @property
    def total_m(self) -> int:
        return self.M

    def __str__(self) -> str:
        return f"T{self.L}{self.M:+d}(11)"


@dataclass(frozen=True)
class IdentityLabel:
    """The 4x4 identity."""

    @property
    def total_m(self) -> int:
        return 0

    def __str__(self) -> str:
        return "1"


IDENTITY = IdentityLabel()

SphericalTensorLabel = Union[ProductLabel, CoupledLabel, IdentityLabel]

_S2, _S3, _S6 = math.sqrt(2), math.sqrt(3), math.sqrt(6)

# <1 m1; 1 m2 | L M>, keyed by (L, M) then (m1, m2)
CLEBSCH_GORDAN_11: Dict[Tuple[int, int], Dict[Tuple[int, int], float]] = {
    (2, 2): {(1, 1): 1.0},
    (2, 1): {(1, 0): 1 / _S2, (0, 1): 1 / _S2},
    (2, 0): {(1, -1): 1 / _S6, (0, 0): 2 / _S6, (-1, 1): 1 / _S6},
    (2, -1): {(0, -1): 1 / _S2, (-1, 0): 1 / _S2},
    (2, -2): {(-1, -1): 1.0},
    (1, 1): {(1, 0): 1 / _S2, (0, 1): -1 / _S2},
    (1, 0): {(1, -1): 1 / _S2, (-1, 1): -1 / _S2},
    (1, -1): {(0, -1): 1 / _S2, (-1, 0): -1 / _S2},
    (0, 0): {(1, -1): 1 / _S3, (0, 0): -1 / _S3, (-1, 1): 1 / _S3},
}


def product_tensor(l1: int, m1: int, l2: int, m2: int) -> TwoQubitOperator:
    """T_{l1 m1} (x) T_{l2 m2}."""
    return tensor_operator(ProductLabel(l1, m1, l2, m2))


def coupled_tensor(L: int, M: int) -> TwoQubitOperator:
    """T_{LM(11)} = sum over m1+m2=M of <1 m1; 1 m2|L M> T_{1 m1} (x) T_{1 m2}."""
    return tensor_operator(CoupledLabel(L, M))


@lru_cache(maxsize=None)
def tensor_operator(label: SphericalTensorLabel) -> TwoQubitOperator:
    """Build the operator for any tensor label."""
    if isinstance(label, IdentityLabel):
        return _freeze(np.eye(4, dtype=complex))
    if isinstance(label, ProductLabel):
        return _freeze(embed(spherical_tensor(label.l1, label.m1),
                             spherical_tensor(label.l2, label.m2)))
    if isinstance(label, CoupledLabel):
        op = np.zeros((4, 4), dtype=complex)
        for (m1, m2), coefficient in CLEBSCH_GORDAN_11[(label.L, label.M)].items():
            op += coefficient * tensor_operator(ProductLabel(1, m1, 1, m2))
        return _freeze(op)
    raise InvalidLabelError(f"Unsupported tensor label: {label!r}")


def _product_labels() -> Tuple[ProductLabel, ...]:
    labels = []
    for l1 in (0, 1):
        for m1 in range(l1, -l1 - 1, -1):
            for l2 in (0, 1):
                for m2 in range(l2, -l2 - 1, -1):
                    labels.append(ProductLabel(l1, m1, l2, m2))
    return tuple(labels)


PRODUCT_LABELS: Tuple[ProductLabel, ...] = _product_labels()

# The rank-0 product label T00 (x) T00 equals identity/4, so the coupled basis
# carries the identity under its own label instead.
COUPLED_LABELS: Tuple[SphericalTensorLabel, ...] = (
    (IDENTITY,)
    + tuple(ProductLabel(0, 0, 1, m) for m in (1, 0, -1))
    + tuple(ProductLabel(1, m, 0, 0) for m in (1, 0, -1))
    + tuple(CoupledLabel(L, M) for L in (0, 1, 2) for M in range(L, -L - 1, -1))
)


def basis_labels(basis: Basis) -> Tuple[SphericalTensorLabel, ...]:
    return PRODUCT_LABELS if Basis(basis) == Basis.PRODUCT else COUPLED_LABELS


@dataclass(frozen=True)
class DecompositionCoefficients:
    """Hilbert-Schmidt expansion coefficients of an operator in one tensor basis."""
    basis: Basis
    coefficients: Dict[SphericalTensorLabel, complex]

    def __getitem__(self, label: SphericalTensorLabel) -> complex:
        return self.coefficients[label]

    def __iter__(self) -> Iterator[SphericalTensorLabel]:
        return iter(self.coefficients)

    def nonzero(self, tol: float = 1e-12) -> Dict[SphericalTensorLabel, complex]:
        return {label: c for label, c in self.coefficients.items() if abs(c) > tol}

    def recompose(self) -> TwoQubitOperator:
        op = np.zeros((4, 4), dtype=complex)
        for label, coefficient in self.coefficients.items():
            op += coefficient * tensor_operator(label)
        return op


def _check_shape(op: np.ndarray) -> np.ndarray:
    op = np.asarray(op, dtype=complex)
    if op.shape != (4, 4):
        raise ValueError(f"Expected a 4x4 two-qubit operator, got shape {op.shape}")
    return op


def decompose(op: TwoQubitOperator, basis: Basis = Basis.PRODUCT) -> DecompositionCoefficients:
    """Project op onto the tensor basis: c = Tr(T^dag op) / Tr(T^dag T)."""
    op = _check_shape(op)
    coefficients = {}
    for label in basis_labels(basis):
        tensor = tensor_operator(label)
        coefficients[label] = complex(np.vdot(tensor, op) / np.vdot(tensor, tensor).real)
    return DecompositionCoefficients(basis=Basis(basis), coefficients=coefficients)


def bell_state(label: Union[BellState, str]) -> TwoQubitOperator:
    """Density matrix of a Bell state."""
    state = BellState.parse(label)
    ket = np.zeros(4, dtype=complex)
    if state.is_psi:
        ket[0], ket[1] = 1.0, (-1.0 if state == BellState.PSI_MINUS else 1.0)
    else:
        ket[2], ket[3] = 1.0, (-1.0 if state == BellState.PHI_MINUS else 1.0)
    ket /= math.sqrt(2)
    return np.outer(ket, ket.conj())


def is_density_matrix(op: np.ndarray, psd_tol: float = PSD_TOL) -> bool:
    try:
        check_density_matrix(op, psd_tol=psd_tol)
    except (NotADensityMatrixError, ValueError):
        return False
    return True


def check_density_matrix(op: np.ndarray, psd_tol: float = PSD_TOL) -> TwoQubitOperator:
    """Return op as a complex array or raise NotADensityMatrixError."""
    op = _check_shape(op)
    if np.max(np.abs(op - op.conj().T)) > HERMITIAN_TOL:
        raise NotADensityMatrixError("Operator is not Hermitian")
    trace = np.trace(op)
    if abs(trace - 1.0) > TRACE_TOL:
        raise NotADensityMatrixError(f"Trace is {trace.real:.12g}, expected 1")
    smallest = np.linalg.eigvalsh((op + op.conj().T) / 2)[0]
    if smallest < -psd_tol:
        raise NotADensityMatrixError(f"Negative eigenvalue {smallest:.3e} beyond tolerance {psd_tol:.1e}")
    return op


def partial_trace(op: TwoQubitOperator, keep: int) -> np.ndarray:
    """Reduced 2x2 operator of qubit `keep`."""
    if keep not in (1, 2):
        raise ValueError(f"keep must be 1 or 2, got {keep}")
    blocks = to_kronecker(_check_shape(op)).reshape(2, 2, 2, 2)
    if keep == 1:
        return np.einsum('ijkj->ik', blocks)
    return np.einsum('ijik->jk', blocks)


def purity(op: TwoQubitOperator) -> float:
    op = _check_shape(op)
    return float(np.real(np.einsum('ij,ji->', op, op)))


def format_operator(op: TwoQubitOperator) -> str:
    """Dump a 4x4 operator row-major as 're+imj' entries with 17 significant digits."""
    op = _check_shape(op)
    lines = [f"# basis: {' '.join(BASIS_ORDER)}"]
    for row in op:
        lines.append(" ".join(f"{z.real:.17g}{z.imag:+.17g}j" for z in row))
    return "\n".join(lines) + "\n"


def parse_operator(text: str) -> TwoQubitOperator:
    """Inverse of format_operator."""
    rows = []
    for line in text.splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        rows.append([complex(token) for token in line.split()])
    return _check_shape(np.array(rows, dtype=complex))


# Superoperators

def vectorize(op: TwoQubitOperator) -> np.ndarray:
    return _check_shape(op).reshape(16)


def unvectorize(vector: np.ndarray) -> TwoQubitOperator:
    return np.asarray(vector, dtype=complex).reshape(4, 4)


def commutator_superoperator(op: TwoQubitOperator) -> SuperOperator:
    """Matrix of A -> [op, A]."""
    op = _check_shape(op)
    identity = np.eye(4, dtype=complex)
    return np.kron(op, identity) - np.kron(identity, op.T)


def apply_superoperator(superop: SuperOperator, op: TwoQubitOperator) -> TwoQubitOperator:
    return unvectorize(superop @ vectorize(op))


@lru_cache(maxsize=None)
def spin_superoperators(qubit_index: int) -> Tuple[SuperOperator, SuperOperator, SuperOperator]:
    """Commutator superoperators of Jx, Jy, Jz of one qubit."""
    return tuple(_freeze(commutator_superoperator(j)) for j in spin_operators(qubit_index))


def total_spin_superoperator(axis: int) -> SuperOperator:
    """Commutator superoperator of J_axis^(1) + J_axis^(2)."""
    return spin_superoperators(1)[axis] + spin_superoperators(2)[axis]


def total_spin_squared_superoperator(qubits: Tuple[int, ...] = (1, 2)) -> SuperOperator:
    """sum_i (sum_n J_i^(n))^2 over the given qubits, as a superoperator."""
    result = np.zeros((16, 16), dtype=complex)
    for axis in range(3):
        component = sum(spin_superoperators(n)[axis] for n in qubits)
        result += component @ component
    return result
