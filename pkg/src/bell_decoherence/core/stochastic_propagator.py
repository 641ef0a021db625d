"""
Noise-averaged evolution of two-qubit states.

Two routes: exact unitary evolution along sampled noise trajectories, averaged
over an ensemble, and the second-order cumulant superoperator. Superoperators
are Heisenberg-picture maps A -> U(t)^dag A U(t) on row-major vectorized
operators; schrodinger_evolve applies their Hilbert-Schmidt adjoint to states.
"""

import math
from dataclasses import dataclass, field
from typing import TYPE_CHECKING, Any, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
from joblib import Parallel, delayed
from scipy import linalg

from .entanglement import concurrence_wootters
from .exceptions import NumericalError
from .interfaces import BellState, NoiseKind
from .noise_models import NoiseSpec, NoiseTrajectoryPair, ou_shape, sample_batch
from .operator_algebra import (
    PAULI, SphericalTensorLabel, SuperOperator, TwoQubitOperator,
    bell_state, check_density_matrix, from_kronecker, spin_superoperators,
    tensor_operator, total_spin_superoperator, unvectorize, vectorize,
)
from ..utils.logger import get_logger

if TYPE_CHECKING:
    from ..utils.config import Scenario

logger = get_logger(__name__)

ENSEMBLE_PSD_TOL = 1e-8
MIN_BATCHES = 2
MIN_BATCH_SIZE = 100


def rotation_superoperator(omega: float, t: float) -> SuperOperator:
    """exp(i Omega t [Jz, .]); diagonal in the working basis."""
    return np.diag(np.exp(1j * omega * t * np.diag(total_spin_superoperator(2)).real))


def _white_rotating_integrals(omega: float, t: float) -> Tuple[float, float, float]:
    """Integrals over [0, t] of cos^2, sin^2 and sin*cos of Omega t'."""
    if omega == 0.0:
        return t, 0.0, 0.0
    cos_sq = t / 2 + math.sin(2 * omega * t) / (4 * omega)
    return cos_sq, t - cos_sq, math.sin(omega * t) ** 2 / (2 * omega)


def cumulant2_superoperator(spec: NoiseSpec, omega: float, t: float) -> SuperOperator:
    """Second cumulant K2(t) of the rotating-frame noise, as a 16x16 matrix.

    Uses stationarity to reduce the double time integrals to single integrals
    of (t - tau) kappa(tau) {1, cos, sin}(Omega tau), in closed form for OU
    and exactly for white noise.
    """
    if t < 0:
        raise ValueError("time must be non-negative")
    x = [spin_superoperators(n)[0] for n in (1, 2)]
    y = [spin_superoperators(n)[1] for n in (1, 2)]
    z = [spin_superoperators(n)[2] for n in (1, 2)]
    k2 = np.zeros((16, 16), dtype=complex)

    if spec.axes[2]:
        weights = spec.pair_weights(2)
        g0 = spec.tc**2 * float(ou_shape(t / spec.tc)) if spec.kind == NoiseKind.OU else t
        for n in range(2):
            for m in range(2):
                k2 -= weights[n, m] * g0 * (z[n] @ z[m])

    if spec.axes[0]:
        if spec.kind == NoiseKind.OU:
            weights = spec.pair_weights(0)
            rate = 1.0 / spec.tc - 1j * omega
            integral = complex(ou_shape(rate * t) / rate**2)
            for n in range(2):
                for m in range(2):
                    k2 -= weights[n, m] * (
                        integral.real * (x[n] @ x[m] + y[n] @ y[m])
                        - integral.imag * (x[n] @ y[m] - y[n] @ x[m])
                    )
        else:
            inv_tx, inv_ty = 1.0 / spec.white_times()[:2]
            cos_sq, sin_sq, sin_cos = _white_rotating_integrals(omega, t)
            mixing = np.array([[1.0, spec.gamma], [spec.gamma, 1.0]])
            for n in range(2):
                for m in range(2):
                    k2 -= mixing[n, m] * (
                        (cos_sq * inv_tx + sin_sq * inv_ty) * (x[n] @ x[m])
                        + (sin_sq * inv_tx + cos_sq * inv_ty) * (y[n] @ y[m])
                        + sin_cos * (inv_ty - inv_tx) * (x[n] @ y[m] + y[n] @ x[m])
                    )
    return k2


def cumulant_propagator(spec: NoiseSpec, omega: float, t: float) -> SuperOperator:
    """exp(K2(t)) composed with the free rotation."""
    return linalg.expm(cumulant2_superoperator(spec, omega, t)) @ rotation_superoperator(omega, t)


def cumulant2_propagator(scenario: "Scenario", t: float) -> SuperOperator:
    return cumulant_propagator(scenario.noise_spec(), scenario.omega, t)


def heisenberg_expectation(
    superop: SuperOperator,
    label: Union[SphericalTensorLabel, TwoQubitOperator],
    rho0: TwoQubitOperator,
) -> complex:
    """Tr(rho0 U[T]) with U applied to the tensor instead of the state."""
    tensor = label if isinstance(label, np.ndarray) else tensor_operator(label)
    evolved = unvectorize(superop @ vectorize(tensor))
    return complex(np.einsum('ij,ji->', rho0, evolved))


def schrodinger_evolve(superop: SuperOperator, rho0: TwoQubitOperator) -> TwoQubitOperator:
    """State at time t, so that Tr(A rho(t)) = Tr(U[A] rho0) for every A."""
    rho0 = np.asarray(rho0, dtype=complex)
    return unvectorize(superop.T @ vectorize(rho0.T)).T


# Monte Carlo

def _step_unitaries(fields: np.ndarray, omega: float, dt: float) -> np.ndarray:
    """exp(-i dt (Omega Jz + w.J)) for fields of shape (..., 3); returns (..., 2, 2)."""
    b = np.array(fields, dtype=float, copy=True)
    b[..., 2] += omega
    half = 0.5 * dt * np.linalg.norm(b, axis=-1)
    # sin(half)/|b| written through sinc so that b = 0 needs no special case
    scale = 0.5 * dt * np.sinc(half / np.pi)
    generator = np.einsum('...i,ijk->...jk', b * scale[..., None], PAULI)
    return np.cos(half)[..., None, None] * np.eye(2) - 1j * generator


def _two_qubit_unitary(first: np.ndarray, second: np.ndarray) -> np.ndarray:
    """Batched u1 (x) u2 in the working basis."""
    kron = np.einsum('...ij,...kl->...ikjl', first, second)
    return from_kronecker(kron.reshape(kron.shape[:-4] + (4, 4)))


def _evolve_batch(
    spec: NoiseSpec,
    omega: float,
    rho0s: np.ndarray,
    record_steps: np.ndarray,
    dt: float,
    seed: int,
    indices: np.ndarray,
) -> np.ndarray:
    """Mean state over one batch of trajectories, shape (states, times, 4, 4)."""
    n_steps = int(record_steps[-1])
    fields = sample_batch(spec, max(n_steps, 1), dt, seed, indices)
    batch = len(indices)
    unitary = np.broadcast_to(np.eye(4, dtype=complex), (batch, 4, 4)).copy()
    means = np.empty((len(rho0s), len(record_steps), 4, 4), dtype=complex)

    slot = 0
    for step in range(n_steps + 1):
        while slot < len(record_steps) and record_steps[slot] == step:
            means[:, slot] = np.einsum('bij,sjk,blk->sil', unitary, rho0s, unitary.conj()) / batch
            slot += 1
        if step == n_steps:
            break
        u1 = _step_unitaries(fields[:, 0, step], omega, dt)
        u2 = _step_unitaries(fields[:, 1, step], omega, dt)
        unitary = _two_qubit_unitary(u1, u2) @ unitary
    return means


def evolve_trajectory(
    omega: float, trajectory: NoiseTrajectoryPair, rho0: TwoQubitOperator
) -> List[TwoQubitOperator]:
    """Pure-state evolution along one realization; element k is rho(k dt)."""
    rho = check_density_matrix(rho0)
    states = [rho]
    u1 = _step_unitaries(trajectory.qubit(1), omega, trajectory.dt)
    u2 = _step_unitaries(trajectory.qubit(2), omega, trajectory.dt)
    for step_unitary in _two_qubit_unitary(u1, u2):
        rho = step_unitary @ rho @ step_unitary.conj().T
        states.append(rho)
    return states


def simulation_dt(
    spec: NoiseSpec, omega: float, grid_spacing: float, dt: Optional[float] = None
) -> Tuple[float, int]:
    """Integration step aligned to the output grid, and substeps per grid interval."""
    if grid_spacing <= 0:
        raise ValueError(f"grid spacing must be positive, got {grid_spacing}")
    if dt is None:
        if spec.kind == NoiseKind.OU:
            scale = max(omega, spec.max_sigma)
            dt = spec.tc / 50 if scale == 0 else min(spec.tc / 50, 2 * math.pi / (40 * scale))
        else:
            dt = float(np.min(spec.white_times()[np.asarray(spec.axes)])) / 200
    if dt <= 0:
        raise ValueError(f"dt must be positive, got {dt}")
    substeps = max(1, math.ceil(grid_spacing / dt - 1e-9))
    return grid_spacing / substeps, substeps


@dataclass
class EnsembleResult:
    """Ensemble-averaged states and concurrences on a time grid."""
    times: np.ndarray
    states: List[BellState]
    density_matrices: np.ndarray
    concurrence: np.ndarray
    stderr: np.ndarray
    n_trajectories: int
    seed: int
    n_batches: int
    dt: float
    metadata: Dict[str, Any] = field(default_factory=dict)

    def for_state(self, state: Union[BellState, str]) -> Tuple[np.ndarray, np.ndarray]:
        index = self.states.index(BellState.parse(state))
        return self.concurrence[index], self.stderr[index]


def _uniform_grid(times: Sequence[float]) -> Tuple[np.ndarray, float]:
    times = np.asarray(times, dtype=float)
    if times.ndim != 1 or len(times) < 2 or times[0] != 0.0:
        raise ValueError("time grid must start at 0 and hold at least two points")
    spacing = np.diff(times)
    if np.any(spacing <= 0) or not np.allclose(spacing, spacing[0], rtol=1e-9, atol=0.0):
        raise ValueError("time grid must be uniform and increasing")
    return times, float(spacing[0])


def _concurrences(states: np.ndarray) -> np.ndarray:
    flat = states.reshape(-1, 4, 4)
    values = [concurrence_wootters(rho, psd_tol=ENSEMBLE_PSD_TOL).value for rho in flat]
    return np.asarray(values).reshape(states.shape[:-2])


def run_ensemble(
    spec: NoiseSpec,
    omega: float,
    states: Sequence[Union[BellState, str]],
    times: Sequence[float],
    n_trajectories: int,
    seed: int,
    n_batches: int = 20,
    dt: Optional[float] = None,
    n_jobs: int = 1,
) -> EnsembleResult:
    """Average exact trajectory evolution over a noise ensemble.

    All initial states share the same trajectories. Trajectories are split
    into fixed batches; batch means are reduced in batch order, so the result
    does not depend on n_jobs. Standard errors come from the spread of the
    batch-mean concurrences.
    """
    states = [BellState.parse(s) for s in states]
    times, spacing = _uniform_grid(times)
    if n_batches < MIN_BATCHES or n_trajectories // n_batches < MIN_BATCH_SIZE:
        raise ValueError(
            f"need at least {MIN_BATCHES} batches of {MIN_BATCH_SIZE} trajectories, "
            f"got {n_trajectories} trajectories in {n_batches} batches"
        )
    step, substeps = simulation_dt(spec, omega, spacing, dt)
    record_steps = np.arange(len(times)) * substeps
    rho0s = np.stack([bell_state(s) for s in states])
    chunks = np.array_split(np.arange(n_trajectories), n_batches)
    logger.info(
        f"Monte Carlo: {n_trajectories} trajectories in {n_batches} batches, "
        f"dt={step:.4g}, {int(record_steps[-1])} steps, n_jobs={n_jobs}"
    )

    batch_means = Parallel(n_jobs=n_jobs, prefer="threads")(
        delayed(_evolve_batch)(spec, omega, rho0s, record_steps, step, seed, chunk) for chunk in chunks
    )
    batch_means = np.stack(batch_means)
    weights = np.array([len(chunk) for chunk in chunks], dtype=float) / n_trajectories

    mean = np.zeros(batch_means.shape[1:], dtype=complex)
    for weight, batch_mean in zip(weights, batch_means):
        mean += weight * batch_mean

    if not np.all(np.isfinite(mean)):
        raise NumericalError("Monte Carlo ensemble produced non-finite density matrices")

    concurrence = _concurrences(mean)
    batch_concurrence = _concurrences(batch_means)
    stderr = np.std(batch_concurrence, axis=0, ddof=1) / math.sqrt(n_batches)
    logger.debug(f"Monte Carlo finished: max stderr {float(np.max(stderr)):.3g}")

    return EnsembleResult(
        times=times,
        states=states,
        density_matrices=mean,
        concurrence=concurrence,
        stderr=stderr,
        n_trajectories=n_trajectories,
        seed=seed,
        n_batches=n_batches,
        dt=step,
        metadata={"substeps": substeps},
    )


def ensemble_average(scenario: "Scenario", n_jobs: int = 1) -> EnsembleResult:
    """Monte Carlo ensemble for every initial state of a scenario."""
    return run_ensemble(
        spec=scenario.noise_spec(),
        omega=scenario.omega,
        states=scenario.state,
        times=scenario.times(),
        n_trajectories=scenario.trajectories,
        seed=scenario.seed,
        n_batches=scenario.batches,
        dt=scenario.dt,
        n_jobs=n_jobs,
    )
