"""
Concurrence trace handling for Bell Decoherence.
Builds, validates, writes and compares CSV traces of (t, method, state,
concurrence, stderr).
"""

import io
import itertools
from dataclasses import dataclass
from pathlib import Path
from typing import List, Optional, Sequence, Union

import numpy as np
import pandas as pd

from .exceptions import GridMismatchError, ToleranceExceededError
from .interfaces import ConcurrenceTrace, ITraceProcessor, MethodTrace, ValidationResult
from ..utils.logger import get_logger

logger = get_logger(__name__)

COLUMNS = ["t", "method", "state", "concurrence", "stderr"]
GRID_RTOL = 1e-12
STDERR_BAND = 3.0


@dataclass
class PairComparison:
    """Agreement between two (method, state) series; state_b is set only when the states differ."""
    state: str
    method_a: str
    method_b: str
    max_abs_deviation: float
    fraction_within_band: Optional[float]
    sudden_death_a: float = float("inf")
    sudden_death_b: float = float("inf")
    state_b: Optional[str] = None

    @property
    def label(self) -> str:
        return self.state if self.state_b is None else f"{self.state}/{self.state_b}"


@dataclass
class ComparisonReport:
    """Pairwise method comparison across one or more trace files."""
    pairs: List[PairComparison]
    tolerance: Optional[float] = None

    @property
    def max_deviation(self) -> float:
        return max((p.max_abs_deviation for p in self.pairs), default=0.0)

    @property
    def violations(self) -> List[PairComparison]:
        if self.tolerance is None:
            return []
        return [p for p in self.pairs if p.max_abs_deviation > self.tolerance]

    def to_text(self) -> str:
        lines = ["state,method_a,method_b,max_abs_deviation,fraction_within_3se,sudden_death_a,sudden_death_b"]
        for p in self.pairs:
            fraction = "" if p.fraction_within_band is None else f"{p.fraction_within_band:.4f}"
            lines.append(
                f"{p.label},{p.method_a},{p.method_b},{p.max_abs_deviation:.6g},{fraction},"
                f"{p.sudden_death_a:.6g},{p.sudden_death_b:.6g}"
            )
        if self.tolerance is not None:
            status = "FAIL" if self.violations else "OK"
            lines.append(f"# tolerance {self.tolerance:g}: {status}")
        return "\n".join(lines) + "\n"


class TraceProcessor(ITraceProcessor):
    """Main concurrence trace processing class."""

    def __init__(self):
        self.validators = self._initialize_validators()

    def _initialize_validators(self):
        return {
            'columns': self._validate_columns,
            'range': self._validate_range,
            'ordering': self._validate_ordering,
        }

    def build_trace(self, traces: Sequence[MethodTrace]) -> ConcurrenceTrace:
        """Stack method traces into one table, grouped by method then state."""
        frames = []
        for trace in traces:
            stderr = np.full(len(trace.times), np.nan) if trace.stderr is None else np.asarray(trace.stderr)
            frames.append(pd.DataFrame({
                "t": np.asarray(trace.times, dtype=float),
                "method": trace.method.value,
                "state": trace.state.value,
                "concurrence": np.asarray(trace.concurrence, dtype=float),
                "stderr": stderr.astype(float),
            }))
        if not frames:
            return pd.DataFrame(columns=COLUMNS)
        return pd.concat(frames, ignore_index=True)[COLUMNS]

    def validate_trace(self, trace: ConcurrenceTrace) -> ValidationResult:
        """Validate trace structure and value ranges."""
        errors: List[str] = []
        warnings: List[str] = []
        errors.extend(self.validators['columns'](trace))
        group_count = 0
        if not errors:
            group_count = trace.groupby(['method', 'state']).ngroups
            for name in ('range', 'ordering'):
                errors.extend(self.validators[name](trace))
            if trace['concurrence'].gt(1.0).any():
                warnings.append("Some concurrence values exceed 1 within statistical error")
        return ValidationResult(
            is_valid=len(errors) == 0,
            errors=errors,
            warnings=warnings,
            row_count=len(trace),
            group_count=group_count,
        )

    def _validate_columns(self, trace: pd.DataFrame) -> List[str]:
        missing = [c for c in COLUMNS if c not in trace.columns]
        return [f"Missing columns: {', '.join(missing)}"] if missing else []

    def _validate_range(self, trace: pd.DataFrame) -> List[str]:
        errors = []
        values = trace['concurrence'].to_numpy(dtype=float)
        band = STDERR_BAND * trace['stderr'].fillna(0.0).to_numpy(dtype=float)
        if not np.all(np.isfinite(values)):
            errors.append("Concurrence contains non-finite values")
        elif np.any(values < 0) or np.any(values > 1.0 + band + 1e-12):
            errors.append("Concurrence outside [0, 1 + 3 stderr]")
        return errors

    def _validate_ordering(self, trace: pd.DataFrame) -> List[str]:
        errors = []
        for (method, state), group in trace.groupby(['method', 'state'], sort=False):
            if not group['t'].is_monotonic_increasing or group['t'].duplicated().any():
                errors.append(f"Time not strictly increasing for {method}/{state}")
        return errors

    def to_csv_text(self, trace: ConcurrenceTrace) -> str:
        buffer = io.StringIO()
        trace[COLUMNS].to_csv(buffer, index=False, float_format="%.17g", na_rep="", lineterminator="\n")
        return buffer.getvalue()

    def write_csv(self, trace: ConcurrenceTrace, path: Union[str, Path]) -> Path:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, 'w', encoding='utf-8', newline='') as f:
            f.write(self.to_csv_text(trace))
        logger.info(f"Wrote {len(trace)} rows to {path}")
        return path

    def read_csv(self, path: Union[str, Path]) -> ConcurrenceTrace:
        trace = pd.read_csv(path, dtype={"method": str, "state": str}, float_precision="round_trip")
        missing = [c for c in COLUMNS if c not in trace.columns]
        if missing:
            raise ValueError(f"{path}: missing columns {', '.join(missing)}")
        return trace[COLUMNS]

    @staticmethod
    def sudden_death_estimate(times: np.ndarray, concurrence: np.ndarray) -> float:
        """First grid time with C <= 0, or inf."""
        hits = np.flatnonzero(np.asarray(concurrence) <= 0.0)
        return float(times[hits[0]]) if len(hits) else float("inf")

    def compare(
        self, paths: Sequence[Union[str, Path]], tol: Optional[float] = None, across_states: bool = False
    ) -> ComparisonReport:
        """Compare every pair of methods per state across the given files.

        With across_states every pair of (method, state) series is compared,
        including one method on two different states. When the same
        (method, state) appears in several files, methods are labelled
        'method#k' with k the 1-based file position.
        """
        frames = [self.read_csv(p) for p in paths]
        keys = [set(zip(f['method'], f['state'])) for f in frames]
        if any(a & b for a, b in itertools.combinations(keys, 2)):
            frames = [f.assign(method=f['method'] + f"#{k}") for k, f in enumerate(frames, start=1)]
        trace = pd.concat(frames, ignore_index=True)

        pairs = []
        if across_states:
            series = {key: g.sort_values('t') for key, g in trace.groupby(['method', 'state'], sort=False)}
            for (method_a, state_a), (method_b, state_b) in itertools.combinations(series, 2):
                pairs.append(self._compare_pair(
                    state_a, method_a, series[(method_a, state_a)], method_b, series[(method_b, state_b)],
                    state_b=None if state_b == state_a else state_b,
                ))
        else:
            for state, rows in trace.groupby('state', sort=False):
                groups = {method: g.sort_values('t') for method, g in rows.groupby('method', sort=False)}
                for method_a, method_b in itertools.combinations(groups, 2):
                    pairs.append(self._compare_pair(state, method_a, groups[method_a], method_b, groups[method_b]))

        report = ComparisonReport(pairs=pairs, tolerance=tol)
        for violation in report.violations:
            logger.warning(
                f"{violation.label}: {violation.method_a} vs {violation.method_b} deviates by "
                f"{violation.max_abs_deviation:.3g} > {tol:g}"
            )
        return report

    def _compare_pair(
        self,
        state: str,
        method_a: str,
        a: pd.DataFrame,
        method_b: str,
        b: pd.DataFrame,
        state_b: Optional[str] = None,
    ) -> PairComparison:
        t_a, t_b = a['t'].to_numpy(), b['t'].to_numpy()
        label = state if state_b is None else f"{state}/{state_b}"
        if len(t_a) != len(t_b) or not np.allclose(t_a, t_b, rtol=GRID_RTOL, atol=1e-15):
            raise GridMismatchError(f"{label}: {method_a} and {method_b} do not share a time grid")
        c_a, c_b = a['concurrence'].to_numpy(), b['concurrence'].to_numpy()
        deviation = np.abs(c_a - c_b)

        stderr = np.sqrt(a['stderr'].fillna(0.0).to_numpy() ** 2 + b['stderr'].fillna(0.0).to_numpy() ** 2)
        has_stderr = a['stderr'].notna().any() or b['stderr'].notna().any()
        fraction = float(np.mean(deviation <= STDERR_BAND * stderr + 1e-12)) if has_stderr else None

        return PairComparison(
            state=state,
            method_a=method_a,
            method_b=method_b,
            max_abs_deviation=float(np.max(deviation)) if len(deviation) else 0.0,
            fraction_within_band=fraction,
            sudden_death_a=self.sudden_death_estimate(t_a, c_a),
            sudden_death_b=self.sudden_death_estimate(t_b, c_b),
            state_b=state_b,
        )

    def check_tolerance(self, report: ComparisonReport) -> None:
        """Raise ToleranceExceededError when any pair breaks the declared tolerance."""
        if report.violations:
            worst = max(report.violations, key=lambda p: p.max_abs_deviation)
            raise ToleranceExceededError(
                f"{len(report.violations)} method pair(s) exceed tolerance {report.tolerance:g}; "
                f"worst {worst.label} {worst.method_a}/{worst.method_b}: {worst.max_abs_deviation:.3g}"
            )
