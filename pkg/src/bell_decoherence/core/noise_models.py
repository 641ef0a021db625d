"""
Classical Gaussian noise acting on the two qubits.

Each qubit n sees a field omega^(n)(t) with independent Cartesian components.
Components share the same stationary kernel: white, kappa = (2/T) delta, or
Ornstein-Uhlenbeck, kappa = sigma^2 exp(-|tau|/tc). The two qubits are paired
through a common process: omega^(n) = sqrt(gamma) c + sqrt(1 - gamma) a_n,
so that the cross-correlator is gamma times the autocorrelator.
"""

from dataclasses import dataclass
from typing import Iterable, Optional, Tuple, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator
from scipy import integrate, signal

from .exceptions import UnsupportedNoiseError
from .interfaces import Geometry, NoiseKind
from ..utils.logger import get_logger

logger = get_logger(__name__)

ArrayLike = Union[float, np.ndarray]

_SERIES_CUTOFF = 1e-3


class NoiseSpec(BaseModel):
    """Statistics of the noise on both qubits."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    kind: NoiseKind
    sigma: float = Field(0.0, ge=0)
    sigma2: Optional[float] = Field(None, ge=0)
    tc: Optional[float] = Field(None, gt=0)
    T: Optional[float] = Field(None, gt=0)
    T_axes: Optional[Tuple[float, float, float]] = None
    axes: Tuple[bool, bool, bool] = (False, False, True)
    gamma: float = Field(0.0, ge=0, le=1)

    @model_validator(mode="after")
    def _check_kind_parameters(self) -> "NoiseSpec":
        if self.kind == NoiseKind.OU and self.tc is None:
            raise ValueError("noise.tc is required for ou noise")
        if self.kind == NoiseKind.WHITE:
            if self.T is None and self.T_axes is None:
                raise ValueError("noise.T is required for white noise")
            if self.T_axes is not None and min(self.T_axes) <= 0:
                raise ValueError("noise.T_axes entries must be positive")
        if not any(self.axes):
            raise ValueError("at least one noise axis must be enabled")
        if self.axes[0] != self.axes[1]:
            raise ValueError("x and y noise axes must be enabled together")
        return self

    @classmethod
    def for_geometry(cls, geometry: Union[Geometry, str], **kwargs) -> "NoiseSpec":
        return cls(axes=Geometry(geometry).axes, **kwargs)

    @property
    def geometry(self) -> Optional[Geometry]:
        return Geometry.from_axes(self.axes)

    @property
    def amplitudes(self) -> Tuple[float, float]:
        """OU amplitudes (sigma1, sigma2)."""
        return self.sigma, (self.sigma if self.sigma2 is None else self.sigma2)

    @property
    def max_sigma(self) -> float:
        return max(self.amplitudes)

    def white_times(self) -> np.ndarray:
        """Per-axis white-noise timescales (Tx, Ty, Tz)."""
        if self.T_axes is not None:
            return np.asarray(self.T_axes, dtype=float)
        return np.full(3, self.T, dtype=float)

    def has_isotropic_white_strength(self) -> bool:
        times = self.white_times()[np.asarray(self.axes)]
        return bool(np.allclose(times, times[0], rtol=1e-14, atol=0.0))

    def pair_weights(self, axis: int = 2) -> np.ndarray:
        """2x2 matrix of kernel weights between qubits n and m for one axis.

        OU: sigma_n sigma_m (times gamma off-diagonal). White: 1/T_axis
        (times gamma off-diagonal). Zero when the axis is disabled.
        """
        if not self.axes[axis]:
            return np.zeros((2, 2))
        mixing = np.array([[1.0, self.gamma], [self.gamma, 1.0]])
        if self.kind == NoiseKind.OU:
            amplitudes = np.asarray(self.amplitudes)
            return mixing * np.outer(amplitudes, amplitudes)
        return mixing / self.white_times()[axis]


@dataclass(frozen=True)
class NoiseTrajectoryPair:
    """One realization of both qubits' fields.

    samples has shape (2, n_steps, 3): qubit, step, Cartesian axis. Step k
    holds the field over [k dt, (k+1) dt); disabled axes are zero.
    """
    dt: float
    samples: np.ndarray

    @property
    def n_steps(self) -> int:
        return self.samples.shape[1]

    def qubit(self, index: int) -> np.ndarray:
        if index not in (1, 2):
            raise ValueError(f"qubit index must be 1 or 2, got {index}")
        return self.samples[index - 1]


@dataclass(frozen=True)
class DecayFunctions:
    """Decay integrals at one time."""
    gamma_1: float
    gamma_2: float
    gamma_cross: float
    gamma_perp: float
    delta_omega: float

    @property
    def gamma_mean(self) -> float:
        return 0.5 * (self.gamma_1 + self.gamma_2)


def _check_times(t: ArrayLike) -> np.ndarray:
    t = np.asarray(t, dtype=float)
    if np.any(t < 0):
        raise ValueError("time must be non-negative")
    return t


def _scalar_or_array(value: np.ndarray) -> ArrayLike:
    return value.item() if np.ndim(value) == 0 else value


def _require_ou(spec: NoiseSpec, operation: str) -> None:
    if spec.kind != NoiseKind.OU:
        raise UnsupportedNoiseError(f"{operation} is only defined for ou noise")


def ou_shape(x: ArrayLike) -> np.ndarray:
    """g(x) = x - 1 + exp(-x) for real or complex x, with a series near 0."""
    x = np.asarray(x)
    small = np.abs(x) < _SERIES_CUTOFF
    safe = np.where(small, 1.0, x)
    direct = safe + np.expm1(-safe)
    series = x**2 / 2 - x**3 / 6 + x**4 / 24 - x**5 / 120
    return np.where(small, series, direct)


def _correlator_weight(spec: NoiseSpec, correlator: str, qubit: int, axis: int) -> float:
    weights = spec.pair_weights(axis)
    if correlator == "auto":
        if qubit not in (1, 2):
            raise ValueError(f"qubit must be 1 or 2, got {qubit}")
        return float(weights[qubit - 1, qubit - 1])
    if correlator == "cross":
        return float(weights[0, 1])
    raise ValueError(f"correlator must be 'auto' or 'cross', got {correlator!r}")


def autocorrelation(spec: NoiseSpec, tau: ArrayLike, qubit: int = 1) -> ArrayLike:
    """kappa(tau) = sigma^2 exp(-|tau|/tc)."""
    _require_ou(spec, "autocorrelation")
    sigma = spec.amplitudes[qubit - 1]
    return _scalar_or_array(sigma**2 * np.exp(-np.abs(np.asarray(tau, dtype=float)) / spec.tc))


def spectral_density(spec: NoiseSpec, omega: ArrayLike, qubit: int = 1) -> ArrayLike:
    """S(w) = sigma^2 tc / (1 + w^2 tc^2), normalized so that 1/T2 = S(0)."""
    _require_ou(spec, "spectral_density")
    sigma = spec.amplitudes[qubit - 1]
    omega = np.asarray(omega, dtype=float)
    return _scalar_or_array(sigma**2 * spec.tc / (1.0 + (omega * spec.tc) ** 2))


def dephasing_decay(spec: NoiseSpec, t: ArrayLike, correlator: str = "auto", qubit: int = 1) -> ArrayLike:
    """Gamma(t): double integral of the z-axis kernel over 0 < t2 < t1 < t."""
    t = _check_times(t)
    weight = _correlator_weight(spec, correlator, qubit, axis=2)
    if spec.kind == NoiseKind.OU:
        value = weight * spec.tc**2 * ou_shape(t / spec.tc)
    else:
        value = weight * t
    return _scalar_or_array(np.real(value))


def transverse_decay(
    spec: NoiseSpec, omega: float, t: ArrayLike, correlator: str = "auto", qubit: int = 1
) -> Tuple[ArrayLike, ArrayLike]:
    """(Gamma_perp, DeltaOmega * t) for the transverse kernel rotating at omega.

    Both are integrals of (t - tau) kappa(tau) {cos, sin}(omega tau) over
    [0, t]; for OU they equal the real and imaginary parts of g(z t)/z^2 with
    z = 1/tc - i omega.
    """
    t = _check_times(t)
    weight = _correlator_weight(spec, correlator, qubit, axis=0)
    if spec.kind == NoiseKind.WHITE:
        return _scalar_or_array(weight * t), _scalar_or_array(np.zeros_like(t))
    z = 1.0 / spec.tc - 1j * omega
    integral = weight * ou_shape(z * t) / z**2
    return _scalar_or_array(np.real(integral)), _scalar_or_array(np.imag(integral))


def transverse_decay_quadrature(
    spec: NoiseSpec, omega: float, t: ArrayLike, correlator: str = "auto", qubit: int = 1
) -> Tuple[ArrayLike, ArrayLike]:
    """Adaptive-quadrature evaluation of transverse_decay for OU noise."""
    _require_ou(spec, "transverse_decay_quadrature")
    times = _check_times(t)
    weight = _correlator_weight(spec, correlator, qubit, axis=0)
    options = dict(epsabs=1e-14, epsrel=1e-12, limit=1000)
    perp = np.zeros_like(times)
    shift = np.zeros_like(times)
    for index, upper in np.ndenumerate(times):
        if upper == 0.0:
            continue

        def envelope(tau, upper=upper):
            return (upper - tau) * np.exp(-tau / spec.tc)

        if omega == 0.0:
            perp[index] = integrate.quad(envelope, 0.0, upper, **options)[0]
        else:
            perp[index] = integrate.quad(envelope, 0.0, upper, weight='cos', wvar=omega, maxp1=200, **options)[0]
            shift[index] = integrate.quad(envelope, 0.0, upper, weight='sin', wvar=omega, maxp1=200, **options)[0]
    return _scalar_or_array(weight * perp), _scalar_or_array(weight * shift)


def markovian_rates(spec: NoiseSpec) -> Tuple[float, float]:
    """(1/T2, 1/T2x) = (sigma^2 tc, gamma sigma1 sigma2 tc)."""
    _require_ou(spec, "markovian_rates")
    sigma_1, sigma_2 = spec.amplitudes
    return sigma_1**2 * spec.tc, spec.gamma * sigma_1 * sigma_2 * spec.tc


def decay_functions(spec: NoiseSpec, t: float, omega: float = 0.0) -> DecayFunctions:
    """All decay integrals of a noise spec at a single time."""
    gamma_perp, phase = transverse_decay(spec, omega, t) if spec.axes[0] else (0.0, 0.0)
    return DecayFunctions(
        gamma_1=dephasing_decay(spec, t, "auto", 1) if spec.axes[2] else 0.0,
        gamma_2=dephasing_decay(spec, t, "auto", 2) if spec.axes[2] else 0.0,
        gamma_cross=dephasing_decay(spec, t, "cross") if spec.axes[2] else 0.0,
        gamma_perp=gamma_perp,
        delta_omega=phase / t if t > 0 else 0.0,
    )


# Sampling

def trajectory_seed(master_seed: int, index: int) -> np.random.SeedSequence:
    """Seed of trajectory `index`, independent of generation order."""
    return np.random.SeedSequence(entropy=int(master_seed), spawn_key=(int(index),))


def _standard_normals(seed: Union[int, np.random.SeedSequence], n_steps: int) -> np.ndarray:
    # (process a/b/c, axis, step)
    return np.random.default_rng(seed).standard_normal((3, 3, n_steps))


def _unit_processes(spec: NoiseSpec, normals: np.ndarray, dt: float) -> np.ndarray:
    """Unit-variance processes from standard normals along the last axis."""
    if spec.kind == NoiseKind.WHITE or normals.shape[-1] == 1:
        return normals
    decay = np.exp(-dt / spec.tc)
    start = normals[..., :1]
    # exact OU update x_{k+1} = decay x_k + sqrt(1 - decay^2) xi_k, started stationary
    rest, _ = signal.lfilter([np.sqrt(-np.expm1(-2 * dt / spec.tc))], [1.0, -decay],
                             normals[..., 1:], axis=-1, zi=decay * start)
    return np.concatenate([start, rest], axis=-1)


def _field_scale(spec: NoiseSpec, dt: float) -> np.ndarray:
    """Per-qubit, per-axis standard deviation, shape (2, 1, 3)."""
    mask = np.asarray(spec.axes, dtype=float)
    if spec.kind == NoiseKind.OU:
        scale = np.outer(spec.amplitudes, mask)
    else:
        scale = np.vstack([np.sqrt(2.0 / (spec.white_times() * dt)) * mask] * 2)
    return scale[:, None, :]


def _mix(spec: NoiseSpec, units: np.ndarray, dt: float) -> np.ndarray:
    """(..., 3 processes, 3 axes, n) unit processes -> (..., 2 qubits, n, 3 axes) fields."""
    shared = np.sqrt(spec.gamma) * units[..., 2, :, :]
    private = np.sqrt(1.0 - spec.gamma)
    fields = np.stack([shared + private * units[..., 0, :, :],
                       shared + private * units[..., 1, :, :]], axis=-3)
    return np.swapaxes(fields, -1, -2) * _field_scale(spec, dt)


def _check_grid(n_steps: int, dt: float) -> None:
    if n_steps <= 0:
        raise ValueError(f"n_steps must be positive, got {n_steps}")
    if dt <= 0:
        raise ValueError(f"dt must be positive, got {dt}")


def sample_pair(
    spec: NoiseSpec, n_steps: int, dt: float, seed: Union[int, np.random.SeedSequence]
) -> NoiseTrajectoryPair:
    """Draw one realization of both qubits' fields."""
    _check_grid(n_steps, dt)
    if spec.kind == NoiseKind.OU and dt > spec.tc / 10:
        logger.debug(f"dt={dt:g} is coarse compared with tc={spec.tc:g}")
    units = _unit_processes(spec, _standard_normals(seed, n_steps), dt)
    return NoiseTrajectoryPair(dt=dt, samples=_mix(spec, units, dt))


def sample_batch(
    spec: NoiseSpec, n_steps: int, dt: float, master_seed: int, indices: Iterable[int]
) -> np.ndarray:
    """Fields of many trajectories, shape (batch, 2, n_steps, 3).

    Row j equals sample_pair(spec, n_steps, dt, trajectory_seed(master_seed, indices[j])).
    """
    _check_grid(n_steps, dt)
    normals = np.stack([_standard_normals(trajectory_seed(master_seed, k), n_steps) for k in indices])
    return _mix(spec, _unit_processes(spec, normals, dt), dt)
