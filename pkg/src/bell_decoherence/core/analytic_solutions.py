"""
Closed-form concurrence evolution.

Covers pure dephasing under any Gaussian noise, isotropic and transverse white
noise, and the quasi-static limit of strong transverse OU noise. White-noise
results are kept as unclamped exponential sums so that limits and roots are
exact; the public concurrence functions clamp at zero.
"""

import math
from dataclasses import dataclass, field
from typing import List, Optional, Tuple, Union

import numpy as np
from scipy import linalg, optimize

from .exceptions import MethodGeometryError, NumericalError, UnsupportedNoiseError
from .interfaces import BellState, Geometry, NoiseKind
from .noise_models import DecayFunctions, NoiseSpec, spectral_density, transverse_decay
from .operator_algebra import (
    IDENTITY, ProductLabel, SuperOperator, TwoQubitOperator,
    spin_superoperators, tensor_operator, total_spin_squared_superoperator,
    total_spin_superoperator, vectorize,
)
from ..utils.logger import get_logger

logger = get_logger(__name__)

QSBA_VALIDITY_LIMIT = 0.3
SUDDEN_DEATH_RTOL = 1e-12
_BRACKET_DOUBLINGS = 60


@dataclass(frozen=True)
class ExponentialSum:
    """f(t) = constant + sum_k coefficient_k exp(-rate_k t)."""
    constant: float
    terms: Tuple[Tuple[float, float], ...] = ()

    def __call__(self, t: Union[float, np.ndarray]) -> Union[float, np.ndarray]:
        t = np.asarray(t, dtype=float)
        value = np.full(t.shape, self.constant)
        for coefficient, rate in self.terms:
            value = value + coefficient * np.exp(-rate * t)
        return value.item() if value.ndim == 0 else value

    @property
    def floor(self) -> float:
        """Limit as t -> infinity."""
        return self.constant + sum(c for c, rate in self.terms if rate == 0.0)

    def concurrence(self, t: Union[float, np.ndarray]) -> Union[float, np.ndarray]:
        value = np.clip(self(t), 0.0, 1.0)
        return value.item() if np.ndim(value) == 0 else value


@dataclass(frozen=True)
class RegimeParams:
    """Parameters of one analytically solvable regime."""
    geometry: Geometry
    gamma: float = 0.0
    T: Optional[float] = None
    omega: float = 0.0
    sigma1: Optional[float] = None
    sigma2: Optional[float] = None
    decay: Optional[DecayFunctions] = None

    def __post_init__(self):
        if not 0.0 <= self.gamma <= 1.0:
            raise ValueError(f"gamma must lie in [0, 1], got {self.gamma}")
        if self.T is not None and self.T <= 0:
            raise ValueError(f"T must be positive, got {self.T}")

    @property
    def eta(self) -> float:
        return eta(self.gamma)

    @property
    def tau(self) -> Tuple[float, float, float]:
        """(tau_1, tau_2, tau) of the quasi-static limit."""
        sigma1, sigma2 = self.sigma1, (self.sigma1 if self.sigma2 is None else self.sigma2)
        return self.omega / sigma1**2, self.omega / sigma2**2, self.omega / (2 * sigma1 * sigma2)


def eta(gamma: float) -> float:
    return math.sqrt(1.0 + 8.0 * gamma**2) / 3.0


def _check_t(t) -> np.ndarray:
    t = np.asarray(t, dtype=float)
    if np.any(t < 0):
        raise ValueError("time must be non-negative")
    return t


def _output(value: np.ndarray) -> Union[float, np.ndarray]:
    return value.item() if np.ndim(value) == 0 else value


# Pure dephasing

def dephasing_concurrence(state: Union[BellState, str], gamma_auto, gamma_cross) -> Union[float, np.ndarray]:
    """C_Psi = exp(-2[G - Gx]), C_Phi = exp(-2[G + Gx]); exact for Gaussian dephasing.

    gamma_auto is the mean (Gamma_1 + Gamma_2)/2 of the two autocorrelated
    decay functions.
    """
    state = BellState.parse(state)
    gamma_auto = np.asarray(gamma_auto, dtype=float)
    gamma_cross = np.asarray(gamma_cross, dtype=float)
    exponent = gamma_auto - gamma_cross if state.is_psi else gamma_auto + gamma_cross
    return _output(np.minimum(1.0, np.exp(-2.0 * exponent)))


def dephasing_white_form(state: Union[BellState, str], gamma: float, T: float) -> ExponentialSum:
    state = BellState.parse(state)
    rate = 2.0 * (1.0 - gamma) / T if state.is_psi else 2.0 * (1.0 + gamma) / T
    return ExponentialSum(0.0, ((1.0, rate),))


# White noise

def isotropic_white_form(state: Union[BellState, str], gamma: float, T: float) -> ExponentialSum:
    state = BellState.parse(state)
    if state == BellState.PSI_MINUS:
        return ExponentialSum(-0.5, ((1.5, 4.0 * (1.0 - gamma) / T),))
    return ExponentialSum(-0.5, (
        (1.0 / 6.0, 4.0 * (1.0 - gamma) / T),
        (4.0 / 3.0, (4.0 + 2.0 * gamma) / T),
    ))


def transverse_white_form(state: Union[BellState, str], gamma: float, T: float) -> ExponentialSum:
    state = BellState.parse(state)
    h = eta(gamma)
    fast, slow = 3.0 * (1.0 + h) / T, 3.0 * (1.0 - h) / T
    if state == BellState.PSI_MINUS:
        return ExponentialSum(-0.5, (
            ((9 * h - 1 - 8 * gamma) / (12 * h), fast),
            ((9 * h + 1 + 8 * gamma) / (12 * h), slow),
        ))
    if state == BellState.PSI_PLUS:
        return ExponentialSum(-0.5, (
            ((9 * h - 1 + 8 * gamma) / (12 * h), fast),
            ((9 * h + 1 - 8 * gamma) / (12 * h), slow),
        ))
    return ExponentialSum(-0.5, (
        (1.0, 2.0 / T),
        ((3 * h + 1) / (12 * h), fast),
        ((3 * h - 1) / (12 * h), slow),
    ))


def isotropic_white_concurrence(state, gamma: float, T: float, t) -> Union[float, np.ndarray]:
    return isotropic_white_form(state, gamma, T).concurrence(_check_t(t))


def transverse_white_concurrence(state, gamma: float, T: float, t) -> Union[float, np.ndarray]:
    return transverse_white_form(state, gamma, T).concurrence(_check_t(t))


def closed_form(state: Union[BellState, str], regime: RegimeParams) -> ExponentialSum:
    """Unclamped white-noise concurrence of a Bell state."""
    if regime.T is None:
        raise UnsupportedNoiseError("Closed forms need a white-noise timescale T")
    builders = {
        Geometry.DEPHASING: dephasing_white_form,
        Geometry.ISOTROPIC: isotropic_white_form,
        Geometry.TRANSVERSE: transverse_white_form,
    }
    return builders[Geometry(regime.geometry)](state, regime.gamma, regime.T)


def sudden_death_time(state: Union[BellState, str], regime: RegimeParams) -> float:
    """Earliest t with C(t) = 0, or inf when entanglement only vanishes asymptotically."""
    if Geometry(regime.geometry) == Geometry.DEPHASING:
        return math.inf
    form = closed_form(state, regime)
    upper = 10.0 * regime.T
    for _ in range(_BRACKET_DOUBLINGS):
        if form(upper) <= 0.0:
            break
        if form.floor >= 0.0:
            return math.inf
        upper *= 2.0
    else:
        raise NumericalError(f"Could not bracket the sudden-death time of {state}")
    if form(upper) == 0.0:
        return upper
    return optimize.bisect(form, 0.0, upper, rtol=SUDDEN_DEATH_RTOL, xtol=1e-300, maxiter=2000)


# Quasi-static bath

def qsba_validity(sigma1: float, sigma2: Optional[float], omega: float) -> bool:
    """True when sigma/Omega stays within the quasi-static regime."""
    sigma = max(sigma1, sigma1 if sigma2 is None else sigma2)
    return omega > 0 and sigma / omega <= QSBA_VALIDITY_LIMIT


def qsba_coherence_factor(m: int, sigma: float, omega: float, t) -> Union[complex, np.ndarray]:
    """Average of exp(-i m phi) over a static transverse field: 1/(1 - i m sigma^2 t / Omega)."""
    t = _check_t(t)
    value = 1.0 / (1.0 - 1j * m * sigma**2 * t / omega)
    return value.item() if value.ndim == 0 else value


def qsba_concurrence(
    state: Union[BellState, str], correlated: bool, sigma1: float, sigma2: Optional[float], omega: float, t
) -> Union[float, np.ndarray]:
    """Power-law concurrence decay under strong quasi-static transverse noise."""
    state = BellState.parse(state)
    t = _check_t(t)
    if omega <= 0:
        raise ValueError(f"omega must be positive, got {omega}")
    sigma2 = sigma1 if sigma2 is None else sigma2
    if not qsba_validity(sigma1, sigma2, omega):
        logger.warning(f"QSBA used outside its validity domain: sigma/Omega = {max(sigma1, sigma2) / omega:.3g}")
    if correlated:
        if state.is_psi:
            return _output(np.ones_like(t))
        tau = omega / (2.0 * sigma1 * sigma2)
        return _output(1.0 / np.sqrt(1.0 + (t / tau) ** 2))
    value = np.abs(qsba_coherence_factor(1, sigma1, omega, t)) * np.abs(qsba_coherence_factor(1, sigma2, omega, t))
    return _output(np.asarray(value))


# Transverse white-noise eigensystem

@dataclass(frozen=True)
class EigenPair:
    eigenvalue: float
    operator: TwoQubitOperator
    total_m: int
    name: str = ""


@dataclass(frozen=True)
class EigenSystem:
    gamma: float
    pairs: List[EigenPair] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.pairs)

    def __iter__(self):
        return iter(self.pairs)

    def eigenvalues(self) -> np.ndarray:
        return np.array([pair.eigenvalue for pair in self.pairs])


def transverse_L_superoperator(gamma: float) -> SuperOperator:
    """gamma J^2 + (1 - gamma)(Jz1 Jz2 + Jz2 Jz1) as a superoperator."""
    z1, z2 = spin_superoperators(1)[2], spin_superoperators(2)[2]
    return gamma * total_spin_squared_superoperator() + (1.0 - gamma) * (z1 @ z2 + z2 @ z1)


def _product(m1: int, m2: int) -> TwoQubitOperator:
    return tensor_operator(ProductLabel(1, m1, 1, m2))


def transverse_L_eigensystem(gamma: float) -> EigenSystem:
    """Nine eigenpairs of the transverse superoperator on the l1 = l2 = 1 sector."""
    if not 0.0 <= gamma <= 1.0:
        raise ValueError(f"gamma must lie in [0, 1], got {gamma}")
    h = eta(gamma)
    u, v, w = _product(1, -1), _product(0, 0), _product(-1, 1)
    pairs = [
        EigenPair(2 * (1 + 2 * gamma), _product(1, 1), 2, "T11xT11"),
        EigenPair(2 * (1 + 2 * gamma), _product(-1, -1), -2, "T1-1xT1-1"),
    ]
    for m in (1, -1):
        pairs.append(EigenPair(6 * gamma, _product(0, m) + _product(m, 0), m, f"sym M={m:+d}"))
        pairs.append(EigenPair(2 * gamma, _product(0, m) - _product(m, 0), m, f"antisym M={m:+d}"))
    # stable forms of (1 -+ 3 eta)/(2 gamma) that stay finite at gamma = 0
    pairs.extend([
        EigenPair(-2 * (1 - 2 * gamma), w - u, 0, "antisym M=0"),
        EigenPair(-1 + 4 * gamma + 3 * h, 2 * gamma / (1 + 3 * h) * (u + w) + v, 0, "sym M=0 +"),
        EigenPair(-1 + 4 * gamma - 3 * h, u + w - 4 * gamma / (1 + 3 * h) * v, 0, "sym M=0 -"),
    ])
    return EigenSystem(gamma=gamma, pairs=pairs)


def _projector(op: TwoQubitOperator) -> np.ndarray:
    vector = vectorize(op)
    vector = vector / np.linalg.norm(vector)
    return np.outer(vector, vector.conj())


def assemble_transverse_propagator(gamma: float, omega: float, T: float, t: float) -> SuperOperator:
    """Heisenberg-picture propagator of transverse white noise, built from the eigensystem.

    Two-qubit eigenoperators decay as exp(-(t/T)[4(1-gamma) - M^2 + lambda]),
    single-qubit tensors T1m x 1 as exp(-(t/T)(2 - m^2)); every tensor picks
    up the phase exp(i M Omega t).
    """
    if t < 0:
        raise ValueError("time must be non-negative")
    s = t / T
    propagator = _projector(tensor_operator(IDENTITY)).astype(complex)
    for m in (1, 0, -1):
        factor = np.exp(-s * (2 - m**2) + 1j * m * omega * t)
        propagator += factor * _projector(tensor_operator(ProductLabel(1, m, 0, 0)))
        propagator += factor * _projector(tensor_operator(ProductLabel(0, 0, 1, m)))
    for pair in transverse_L_eigensystem(gamma):
        rate = 4 * (1 - gamma) - pair.total_m**2 + pair.eigenvalue
        propagator += np.exp(-s * rate + 1j * pair.total_m * omega * t) * _projector(pair.operator)
    return propagator


# Fully correlated transverse noise

def effective_dephasing_propagator(spec: NoiseSpec, omega: float, t: float) -> SuperOperator:
    """exp(i(Omega t + S) Jz) exp(-Gamma_perp (J^2 - Jz^2)) for fully correlated transverse noise."""
    if spec.geometry != Geometry.TRANSVERSE or spec.gamma != 1.0:
        raise MethodGeometryError("The effective dephasing propagator needs fully correlated transverse noise")
    gamma_perp, shift = transverse_decay(spec, omega, t)
    jz = total_spin_superoperator(2)
    rotation = linalg.expm(1j * (omega * t + shift) * jz)
    return rotation @ linalg.expm(-gamma_perp * (total_spin_squared_superoperator() - jz @ jz))


def markovian_transverse_T(spec: NoiseSpec, omega: float) -> float:
    """Equivalent white-noise timescale 1/S(Omega) of transverse OU noise."""
    if spec.kind != NoiseKind.OU:
        raise UnsupportedNoiseError("markovian_transverse_T is only defined for ou noise")
    return 1.0 / spectral_density(spec, omega)
