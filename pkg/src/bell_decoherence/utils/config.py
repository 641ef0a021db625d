"""
Scenario configuration for Bell Decoherence.
Loads flat dotted-key JSON scenarios or bundled presets and validates them.
"""

import json
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

from ..core.analytic_solutions import QSBA_VALIDITY_LIMIT
from ..core.exceptions import ConfigError
from ..core.interfaces import BellState, Geometry, Method, NoiseKind
from ..core.noise_models import NoiseSpec
from ..core.stochastic_propagator import MIN_BATCH_SIZE
from .logger import get_logger

logger = get_logger(__name__)

MIN_TRAJECTORIES = 2000


class NoiseConfig(BaseModel):
    """noise.* keys of a scenario."""
    model_config = ConfigDict(extra="forbid", frozen=True)

    kind: NoiseKind
    sigma: float = Field(0.0, ge=0)
    sigma2: Optional[float] = Field(None, ge=0)
    tc: Optional[float] = Field(None, gt=0)
    T: Optional[float] = Field(None, gt=0)
    T_axes: Optional[Tuple[float, float, float]] = None

    @model_validator(mode="after")
    def _check_kind(self) -> "NoiseConfig":
        if self.kind == NoiseKind.OU and self.tc is None:
            raise ValueError("noise.tc is required for ou noise")
        if self.kind == NoiseKind.WHITE and self.T is None and self.T_axes is None:
            raise ValueError("noise.T is required for white noise")
        if self.T_axes is not None and min(self.T_axes) <= 0:
            raise ValueError("noise.T_axes entries must be positive")
        return self


class Scenario(BaseModel):
    """One runnable scenario: noise, initial states, time grid and methods."""
    model_config = ConfigDict(extra="forbid", frozen=True)

    geometry: Geometry
    state: Tuple[BellState, ...]
    noise: NoiseConfig
    omega: float = 0.0
    gamma: float = Field(0.0, ge=0, le=1)
    t_max: float = Field(gt=0)
    n_points: int = Field(ge=2)
    methods: Tuple[Method, ...]
    trajectories: int = Field(0, ge=0)
    seed: int = Field(0, ge=0, lt=2**64)
    batches: int = Field(20, ge=2)
    dt: Optional[float] = Field(None, gt=0)

    @field_validator("state", mode="before")
    @classmethod
    def _parse_states(cls, value: Any) -> Tuple[BellState, ...]:
        if isinstance(value, str):
            if value.strip().lower() == "all":
                return tuple(BellState)
            value = [item for item in value.split(",") if item.strip()]
        states = tuple(BellState.parse(item) for item in value)
        if not states:
            raise ValueError("at least one state is required")
        return tuple(dict.fromkeys(states))

    @field_validator("methods", mode="before")
    @classmethod
    def _parse_methods(cls, value: Any) -> Tuple[str, ...]:
        if isinstance(value, str):
            value = [item.strip() for item in value.split(",") if item.strip()]
        if not value:
            raise ValueError("at least one method is required")
        return tuple(dict.fromkeys(str(item).strip().lower() for item in value))

    @model_validator(mode="after")
    def _check_trajectories(self) -> "Scenario":
        if Method.MONTECARLO in self.methods:
            if self.trajectories < MIN_TRAJECTORIES:
                raise ValueError(f"trajectories must be at least {MIN_TRAJECTORIES} for montecarlo")
            if self.trajectories // self.batches < MIN_BATCH_SIZE:
                raise ValueError(
                    f"trajectories must fill {self.batches} batches of at least {MIN_BATCH_SIZE}"
                )
        return self

    def noise_spec(self) -> NoiseSpec:
        return NoiseSpec(
            kind=self.noise.kind,
            sigma=self.noise.sigma,
            sigma2=self.noise.sigma2,
            tc=self.noise.tc,
            T=self.noise.T,
            T_axes=self.noise.T_axes,
            axes=self.geometry.axes,
            gamma=self.gamma,
        )

    def times(self) -> np.ndarray:
        return np.linspace(0.0, self.t_max, self.n_points)


def flatten_config(data: Dict[str, Any]) -> Dict[str, Any]:
    """Flatten one level of nesting into dotted keys."""
    if not isinstance(data, dict):
        raise ConfigError("scenario must be a JSON object")
    flat: Dict[str, Any] = {}
    for key, value in data.items():
        if isinstance(value, dict):
            for nested_key, nested_value in value.items():
                if isinstance(nested_value, dict):
                    raise ConfigError("nesting deeper than one level", key=f"{key}.{nested_key}")
                flat[f"{key}.{nested_key}"] = nested_value
        else:
            flat[key] = value
    return flat


def _nest(flat: Dict[str, Any]) -> Dict[str, Any]:
    nested: Dict[str, Any] = {}
    for key, value in flat.items():
        head, dot, tail = key.partition(".")
        if not dot:
            if isinstance(nested.get(head), dict):
                raise ConfigError("given both as a value and as a group", key=head)
            nested[head] = value
            continue
        group = nested.setdefault(head, {})
        if not isinstance(group, dict):
            raise ConfigError("given both as a value and as a group", key=head)
        group[tail] = value
    return nested


def _config_error(error: ValidationError) -> ConfigError:
    first = error.errors()[0]
    key = ".".join(str(part) for part in first["loc"])
    message = first["msg"]
    if message.startswith("Value error, "):
        message = message[len("Value error, "):]
    return ConfigError(message, key=key)


def scenario_from_flat(flat: Dict[str, Any]) -> Scenario:
    """Build and validate a Scenario from dotted keys."""
    try:
        return Scenario.model_validate(_nest(flat))
    except ValidationError as e:
        raise _config_error(e) from None


def scenario_to_flat(scenario: Scenario) -> Dict[str, Any]:
    data = scenario.model_dump(mode="json", exclude_none=True)
    flat = flatten_config(data)
    flat["state"] = ",".join(flat["state"])
    flat["methods"] = ",".join(flat["methods"])
    return flat


_OU_TRANSVERSE = {
    "geometry": "transverse",
    "noise.kind": "ou",
    "noise.sigma": 4.0,
    "noise.tc": 10.0,
    "omega": 40.0,
    "t_max": 5.0,
    "n_points": 51,
    "methods": "qsba,cumulant2,montecarlo",
    "trajectories": 10000,
}

PRESETS: Dict[str, Dict[str, Any]] = {
    "fig1": {
        "geometry": "isotropic",
        "state": "all",
        "noise.kind": "white",
        "noise.T": 1.0,
        "gamma": 0.8,
        "omega": 1.0,
        "t_max": 1.5,
        "n_points": 151,
        "methods": "analytic,cumulant2",
    },
    "fig2": {
        "geometry": "transverse",
        "state": "all",
        "noise.kind": "white",
        "noise.T": 1.0,
        "gamma": 0.8,
        "omega": 1.0,
        "t_max": 1.5,
        "n_points": 151,
        "methods": "analytic,cumulant2",
    },
    "fig3": {
        "geometry": "isotropic",
        "state": "psi_minus",
        "noise.kind": "ou",
        "noise.sigma": 5.0,
        "noise.tc": 10.0,
        "omega": 1.0,
        "gamma": 0.0,
        "t_max": 0.6,
        "n_points": 61,
        "methods": "cumulant2,montecarlo",
        "trajectories": 10000,
        "seed": 3,
    },
    "fig4": dict(_OU_TRANSVERSE, state="phi_plus", gamma=0.0, seed=4),
    "fig5": dict(_OU_TRANSVERSE, state="phi_plus", gamma=1.0, seed=5),
    "fig6": dict(_OU_TRANSVERSE, state="psi_plus", gamma=1.0, seed=6),
}


class ConfigManager:
    """Loads, validates and saves scenarios."""

    def __init__(self, presets: Optional[Dict[str, Dict[str, Any]]] = None):
        self.presets = PRESETS if presets is None else presets
        self._config: Optional[Scenario] = None
        self._source: Optional[str] = None

    def list_presets(self) -> List[str]:
        return sorted(self.presets)

    def get_preset(self, name: str) -> Dict[str, Any]:
        if name not in self.presets:
            raise ConfigError(f"unknown preset; available: {', '.join(self.list_presets())}", key=name)
        return dict(self.presets[name])

    def load_config(self, source: Union[str, Path]) -> Scenario:
        """Load a scenario from a preset name or a JSON file."""
        name = str(source)
        if name in self.presets:
            flat = self.get_preset(name)
        else:
            path = Path(source)
            if not path.is_file():
                raise ConfigError(f"no scenario file or preset named '{name}'")
            try:
                with open(path, 'r', encoding='utf-8') as f:
                    flat = flatten_config(json.load(f))
            except json.JSONDecodeError as e:
                raise ConfigError(f"invalid JSON at line {e.lineno}: {e.msg}") from None

        self._config = scenario_from_flat(flat)
        self._source = name
        logger.info(f"Loaded scenario '{name}'")
        return self._config

    def get_config(self) -> Scenario:
        if self._config is None:
            raise ConfigError("no scenario loaded")
        return self._config

    def validate_config(self) -> Dict[str, Any]:
        """Validate the loaded scenario and return validation results."""
        if self._config is None:
            return {"valid": False, "errors": ["No scenario loaded"], "warnings": []}

        errors = []
        warnings = []
        scenario = self._config
        noise = scenario.noise

        if Method.QSBA in scenario.methods and noise.kind == NoiseKind.OU:
            sigma = max(noise.sigma, noise.sigma if noise.sigma2 is None else noise.sigma2)
            if scenario.omega <= 0:
                errors.append("qsba needs a positive omega")
            elif sigma / scenario.omega > QSBA_VALIDITY_LIMIT:
                warnings.append(f"qsba used outside its validity domain (sigma/omega = {sigma / scenario.omega:.3g})")

        if scenario.dt is not None and noise.kind == NoiseKind.WHITE:
            spec = scenario.noise_spec()
            shortest = float(np.min(spec.white_times()[np.asarray(spec.axes)]))
            if scenario.dt > shortest / 200:
                warnings.append(f"dt={scenario.dt:g} is coarser than T/200 = {shortest / 200:g}")

        if scenario.gamma > 0 and noise.sigma2 is not None and noise.sigma2 != noise.sigma:
            warnings.append("cross-correlation with unequal amplitudes scales as gamma*sigma*sigma2")

        return {
            "valid": len(errors) == 0,
            "errors": errors,
            "warnings": warnings
        }

    def save_config(self, path: Union[str, Path]) -> Path:
        """Write the loaded scenario as flat dotted-key JSON."""
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, 'w', encoding='utf-8') as f:
            json.dump(scenario_to_flat(self.get_config()), f, indent=2, ensure_ascii=False)
        return path
