"""Forward Euler time stepping under the monotonicity-preserving dt bound."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .mesh import Field, Grid
from .operator import DiscreteOperator

__all__ = [
    "Trajectory",
    "SimulationDivergedError",
    "stable_dt",
    "step",
    "evolve",
    "ComparisonReport",
    "discrete_comparison_check",
]

# grids below this size gain nothing from the FFT path
_FFT_THRESHOLD = 512


class SimulationDivergedError(RuntimeError):
    """Non-finite values appeared during time stepping."""


@dataclass(frozen=True, eq=False)
class Trajectory:
    """Snapshots of one evolution; times strictly increase from the start."""

    grid: Grid
    times: np.ndarray
    states: tuple[Field, ...]
    operator: DiscreteOperator | None = None

    def __post_init__(self) -> None:
        t = np.asarray(self.times, dtype=float)
        if t.ndim != 1 or len(self.states) != t.size:
            raise ValueError("one state per time stamp required")
        if t.size == 0:
            raise ValueError("trajectory must contain at least the initial state")
        if np.any(np.diff(t) <= 0):
            raise ValueError("time stamps must be strictly increasing")
        object.__setattr__(self, "times", t)

    def state_at(self, t: float) -> Field:
        idx = np.nonzero(np.isclose(self.times, t, rtol=0.0, atol=1e-12))[0]
        if idx.size == 0:
            raise KeyError(f"no snapshot at t = {t}")
        return self.states[int(idx[0])]


def stable_dt(op: DiscreteOperator, safety: float) -> float:
    """Largest step keeping the Euler update a convex combination, scaled.

    The update ``u + dt * D u`` has diagonal coefficient ``1 - dt * W``; it
    stays nonnegative exactly when ``dt <= 1 / W``.
    """
    if not 0 < safety <= 1:
        raise ValueError("safety factor must lie in (0, 1]")
    if op.row_sum <= 0:
        raise ValueError("degenerate operator: row sum is not positive")
    return safety / op.row_sum


def _rate_values(
    op: DiscreteOperator, values: np.ndarray, method: str, workers: int = 1
) -> np.ndarray:
    # raw-array path so a blow-up can be diagnosed before Field validation
    # (which refuses non-finite values) gets a chance to reject it
    if method == "auto":
        method = "fft" if op.grid.n >= _FFT_THRESHOLD else "direct"
    if method == "fft":
        return op._fft_values(values, workers=workers)
    if method == "direct":
        return op._direct_values(values)
    raise ValueError(f"unknown apply method {method!r}")


def _apply(op: DiscreteOperator, u: Field, method: str, workers: int = 1) -> Field:
    op._check_field(u)
    return u.with_values(_rate_values(op, u.values, method, workers))


def step(op: DiscreteOperator, u: Field, dt: float, method: str = "auto") -> Field:
    """One forward Euler step; refuses steps beyond the stability bound."""
    if dt <= 0:
        raise ValueError("dt must be positive")
    limit = 1.0 / op.row_sum
    if dt > limit * (1.0 + 1e-12):
        raise ValueError(
            f"dt = {dt:.6g} exceeds the stability bound 1/W = {limit:.6g}"
        )
    rate = _apply(op, u, method)
    return u.with_values(u.values + dt * rate.values, t=u.t + dt)


def _startup_cap(t: float, dt_stable: float) -> float:
    # shorten the first few steps while the front is steepest; the cap is a
    # function of absolute time only, so restarting from a snapshot reproduces
    # the tail of the original step sequence
    return max(0.5 * t, 0.01 * dt_stable)


def evolve(
    op: DiscreteOperator,
    u0: Field,
    t_final: float,
    output_times: tuple[float, ...] | list[float] = (),
    *,
    safety: float = 0.45,
    startup_ramp: bool = True,
    method: str = "auto",
    workers: int = 1,
) -> Trajectory:
    """March ``u0`` to ``t_final``, landing on every requested output time.

    Steps use ``stable_dt(op, safety)``, optionally shortened near the start
    of the evolution, and are truncated (never interpolated) so that each
    snapshot time is hit exactly. The returned trajectory always contains the
    initial state and the state at ``t_final``.
    """
    if t_final < u0.t:
        raise ValueError("t_final precedes the initial time stamp")
    snaps = sorted({float(s) for s in output_times} | {float(t_final)})
    for s_t in snaps:
        if s_t < u0.t:
            raise ValueError(f"output time {s_t} precedes the initial time {u0.t}")

    op._check_field(u0)
    dt_stable = stable_dt(op, safety)
    times = [u0.t]
    states = [u0]
    u = u0

    t = u0.t
    for target in snaps:
        while t < target:
            dt = dt_stable
            if startup_ramp:
                dt = min(dt, _startup_cap(t, dt_stable))
            if t + dt >= target - 1e-15 * max(1.0, abs(target)):
                dt = target - t
                t = target
            else:
                t = t + dt
            new_vals = u.values + dt * _rate_values(op, u.values, method, workers)
            if not np.all(np.isfinite(new_vals)):
                bad = int(np.argmax(~np.isfinite(new_vals)))
                raise SimulationDivergedError(
                    f"non-finite value at t = {t:.6g}, x = {op.grid.points()[bad]:.6g}"
                )
            u = u.with_values(new_vals, t=t)
        if target > times[-1]:
            times.append(target)
            states.append(u)
    return Trajectory(op.grid, np.asarray(times), tuple(states), operator=op)


@dataclass(frozen=True)
class ComparisonReport:
    """Worst-case ordering margin between two trajectories."""

    passed: bool
    margin: float
    tolerance: float
    worst_t: float
    worst_x: float


def discrete_comparison_check(
    upper: Trajectory, lower: Trajectory, tol: float = 1e-12
) -> ComparisonReport:
    """Verify ``upper >= lower - tol`` at every snapshot node.

    Both trajectories must share the grid and the snapshot times, and must be
    ordered at the initial time; the report carries the worst margin and its
    location.
    """
    if upper.grid != lower.grid:
        raise ValueError("trajectories live on different grids")
    if upper.times.shape != lower.times.shape or np.any(upper.times != lower.times):
        raise ValueError("trajectories have different snapshot times")
    init = upper.states[0].values - lower.states[0].values
    if init.min() < -tol:
        raise ValueError("initial data are not ordered within tolerance")

    margin = np.inf
    worst_t = upper.times[0]
    worst_x = upper.grid.x_min
    xs = upper.grid.points()
    for t, us, ls in zip(upper.times, upper.states, lower.states):
        diff = us.values - ls.values
        i = int(np.argmin(diff))
        if diff[i] < margin:
            margin = float(diff[i])
            worst_t = float(t)
            worst_x = float(xs[i])
    return ComparisonReport(
        passed=margin >= -tol,
        margin=margin,
        tolerance=tol,
        worst_t=worst_t,
        worst_x=worst_x,
    )
