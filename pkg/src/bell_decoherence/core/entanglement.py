"""
Concurrence of two-qubit states.

Two routes are provided: the general Wootters construction and the closed form
valid for X_corr states (identity plus T1m1 (x) T1m2 with m1+m2 in {0, +-2}),
which only needs three tensor expectation values.
"""

from typing import Tuple, Union

import numpy as np

from .exceptions import NotXCorrError
from .interfaces import Basis, ConcurrenceMethod, ConcurrenceValue
from .operator_algebra import (
    IDENTITY, PAULI, PSD_TOL, ProductLabel, SphericalTensorLabel, TwoQubitOperator,
    check_density_matrix, decompose, embed, tensor_operator,
)

XCORR_TOL = 1e-9

LABEL_ANTIPARALLEL = ProductLabel(1, 1, 1, -1)
LABEL_PARALLEL = ProductLabel(1, 1, 1, 1)
LABEL_LONGITUDINAL = ProductLabel(1, 0, 1, 0)

_SIGMA_YY = embed(PAULI[1], PAULI[1])


def _allowed_in_xcorr(label: SphericalTensorLabel) -> bool:
    if label == IDENTITY or label == ProductLabel(0, 0, 0, 0):
        return True
    return (isinstance(label, ProductLabel) and label.l1 == 1 and label.l2 == 1
            and label.total_m in (0, 2, -2))


def spin_flip(rho: TwoQubitOperator) -> TwoQubitOperator:
    """(sigma_y (x) sigma_y) rho* (sigma_y (x) sigma_y)."""
    return _SIGMA_YY @ np.conj(rho) @ _SIGMA_YY


def tensor_expectation(rho: TwoQubitOperator, label: SphericalTensorLabel) -> complex:
    """<T_label> = Tr(T_label rho)."""
    return complex(np.einsum('ij,ji->', tensor_operator(label), rho))


def is_xcorr(op: TwoQubitOperator, tol: float = XCORR_TOL) -> bool:
    """True when every product-basis coefficient outside the X_corr set is below tol."""
    op = check_density_matrix(op)
    coefficients = decompose(op, Basis.PRODUCT)
    return all(abs(c) <= tol for label, c in coefficients.coefficients.items()
               if not _allowed_in_xcorr(label))


def concurrence_wootters(rho: TwoQubitOperator, psd_tol: float = PSD_TOL) -> ConcurrenceValue:
    """Wootters concurrence max{0, r1-r2-r3-r4}."""
    rho = check_density_matrix(rho, psd_tol=psd_tol)
    rho = (rho + rho.conj().T) / 2
    weights, vectors = np.linalg.eigh(rho)
    sqrt_rho = (vectors * np.sqrt(np.clip(weights, 0.0, None))) @ vectors.conj().T

    # same spectrum as rho * tau(rho), but Hermitian
    product = sqrt_rho @ spin_flip(rho) @ sqrt_rho
    eigenvalues = np.linalg.eigvalsh((product + product.conj().T) / 2)
    r = np.sort(np.sqrt(np.clip(eigenvalues, 0.0, None)))[::-1]

    value = max(0.0, float(r[0] - r[1] - r[2] - r[3]))
    return ConcurrenceValue(value=value, method=ConcurrenceMethod.WOOTTERS)


def concurrence_from_expectations(
    antiparallel: Union[complex, np.ndarray],
    parallel: Union[complex, np.ndarray],
    longitudinal: Union[complex, np.ndarray],
) -> Union[float, np.ndarray]:
    """X_corr concurrence from <T11xT1-1>, <T11xT11> and <T10xT10>.

    Accepts scalars or equally shaped arrays.
    """
    u = np.abs(np.asarray(antiparallel))
    w = np.abs(np.asarray(parallel))
    v = np.real(np.asarray(longitudinal))
    value = 2.0 * np.maximum(0.0, np.maximum(2 * u - 0.25 - v, 2 * w - 0.25 + v))
    return float(value) if value.ndim == 0 else value


def xcorr_elements(rho: TwoQubitOperator) -> Tuple[complex, complex, float, float]:
    """Matrix elements (z, w, a, b) of an X_corr state.

    z = rho[ud, du] and w = rho[uu, dd] are the antiparallel and parallel
    coherences, a and b the parallel and antiparallel populations.
    """
    u = tensor_expectation(rho, LABEL_ANTIPARALLEL)
    w = tensor_expectation(rho, LABEL_PARALLEL)
    v = tensor_expectation(rho, LABEL_LONGITUDINAL).real
    return -2 * np.conj(u), 2 * np.conj(w), 0.25 + v, 0.25 - v


def concurrence_xcorr(rho: TwoQubitOperator, tol: float = XCORR_TOL) -> ConcurrenceValue:
    """Closed-form concurrence; refuses states outside X_corr."""
    if not is_xcorr(rho, tol):
        raise NotXCorrError("State is not an X_corr state; use concurrence_wootters")
    value = concurrence_from_expectations(
        tensor_expectation(rho, LABEL_ANTIPARALLEL),
        tensor_expectation(rho, LABEL_PARALLEL),
        tensor_expectation(rho, LABEL_LONGITUDINAL),
    )
    return ConcurrenceValue(value=value, method=ConcurrenceMethod.XCORR)
