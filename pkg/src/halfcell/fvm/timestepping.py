"""Implicit-Euler time stepping with adaptive step control.

The plated inventory is advanced by an explicit update from the implicit
step's interface currents (operator splitting): the electrolyte receives
exactly ``dt * i * a / F`` through each stripping face, and the same amount
leaves the plated voxel, so the split conserves lithium to solver tolerance.
A per-voxel depletion cap shrinks the step instead of letting the explicit
update overshoot into negative inventory.
"""

from __future__ import annotations

import logging
import time as _time
from dataclasses import dataclass, field

import numpy as np

from ..echem.params import MaterialParams
from ..errors import NonConvergence, SimulationError
from ..microgen.phases import PhaseGrid
from .dofmap import Dofmap, build_dofmap
from .newton import NewtonResult, SolverConfig, newton_solve, solve_initial_potential
from .operator import BoundaryDrive, SystemOperator
from .state import CellState, initial_fields

log = logging.getLogger(__name__)


@dataclass
class StepInfo:
    dt: float
    n_iter: int
    retries: int = 0
    clamped_loss: float = 0.0


@dataclass
class Trajectory:
    """Accepted states of one transient solve plus step metadata."""

    mu: float
    states: list = field(default_factory=list)
    dts: list = field(default_factory=list)
    newton_iters: list = field(default_factory=list)
    clamped_loss: float = 0.0
    wall_time: float = 0.0

    @property
    def times(self) -> np.ndarray:
        return np.asarray([s.t for s in self.states])


def _plated_fluxes(op: SystemOperator, x: np.ndarray, n_pl: np.ndarray,
                   beta: float) -> np.ndarray:
    """Per-plated-voxel stripping outflow in mol/s at the given state."""
    currents, slots = op.strip_face_currents(x, n_pl, beta=beta)
    flux = np.zeros(n_pl.size)
    if currents.size:
        np.add.at(flux, slots, currents * op.face_area / op.p.constants.F)
    return flux


def step(op: SystemOperator, state: CellState, dt_suggest: float, mu: float,
         cfg: SolverConfig, observers: tuple = ()) -> tuple[CellState, float, float, StepInfo]:
    """One accepted implicit-Euler step; returns (state', dt_used, dt_next, info).

    Retries with a halved step on Newton failure; raises SimulationError once
    the step size underflows ``dt_min``. The plated inventory update uses the
    same interface currents the implicit step fed into the electrolyte, so
    lithium transfer between the pools is exact.
    """
    dt = min(dt_suggest, cfg.dt_max)
    n_pl = state.n_pl
    retries = 0
    x_prev = state.x
    while True:
        try:
            res: NewtonResult = newton_solve(op, x_prev, dt, x_prev, n_pl, mu, cfg)
        except NonConvergence as exc:
            if dt <= cfg.dt_min * (1.0 + 1e-12):
                raise SimulationError(
                    f"time step underflow at t={state.t:.6g}s (dt={dt:.3e}): {exc}") from exc
            dt = max(dt * cfg.shrink_factor, cfg.dt_min)
            retries += 1
            continue

        clamped = 0.0
        if n_pl.size:
            flux = _plated_fluxes(op, res.x, n_pl, cfg.strip_beta(op, dt))
            n_pl_new = n_pl - dt * flux
            clamped = float(-n_pl_new[n_pl_new < 0].sum())
            n_pl_new = np.maximum(n_pl_new, 0.0)
        else:
            n_pl_new = n_pl.copy()

        new_state = CellState.from_x(res.x, op.dof.n_c, n_pl_new, state.t + dt)
        info = StepInfo(dt, res.n_iter, retries, clamped)
        for obs in observers:
            if hasattr(obs, "on_iterates"):
                obs.on_iterates(res.iterates, state.n_pl, mu, new_state.t)
        if res.n_iter <= cfg.easy_iter_threshold:
            dt_next = min(dt * cfg.grow_factor, cfg.dt_max)
        else:
            dt_next = dt
        return new_state, dt, dt_next, info


def prepare_initial_state(op: SystemOperator, params: MaterialParams, mu: float,
                          cfg: SolverConfig) -> CellState:
    """Uniform concentrations plus one stationary Newton solve for the potentials."""
    state = initial_fields(op.dof, params)
    x = solve_initial_potential(op, state.x, state.n_pl, mu, cfg)
    return CellState.from_x(x, op.dof.n_c, state.n_pl, 0.0)


def run_transient(grid: PhaseGrid, params: MaterialParams, drive: BoundaryDrive,
                  cfg: SolverConfig, t_end: float, observers: tuple = (),
                  schedule: np.ndarray | None = None,
                  op: SystemOperator | None = None,
                  initial: CellState | None = None) -> Trajectory:
    """Solve the transient problem from t = 0 to ``t_end``.

    Without a ``schedule`` the step size adapts freely. With a schedule (an
    increasing array of times) every schedule knot is hit exactly; failed
    steps substep internally but only knot states are recorded. Observers may
    implement ``on_state(state, op, mu)`` and
    ``on_iterates(iterates, n_pl, mu, t)``.
    """
    t_start = _time.perf_counter()
    if op is None:
        dofmap = build_dofmap(grid)
        op = SystemOperator(dofmap, params)
    if op.n_drive_faces == 0 and drive.mu != 0.0:
        raise SimulationError("grid has no working-collector face to apply current on")

    state = initial if initial is not None else prepare_initial_state(op, params, drive.mu, cfg)
    traj = Trajectory(mu=drive.mu)
    traj.states.append(state.copy())
    for obs in observers:
        if hasattr(obs, "on_state"):
            obs.on_state(state, op, drive.mu)

    if schedule is not None:
        knots = np.asarray(schedule, dtype=float)
        if knots[0] <= 0 or np.any(np.diff(knots) <= 0):
            raise ValueError("schedule must be strictly increasing positive times")
        knots = knots[knots <= t_end * (1 + 1e-12)]
        for t_target in knots:
            while state.t < t_target * (1 - 1e-12):
                dt_want = t_target - state.t
                state, dt_used, _, info = step(op, state, dt_want, drive.mu, cfg, observers)
                traj.clamped_loss += info.clamped_loss
                if abs(state.t - t_target) > 1e-12 * max(1.0, t_target):
                    log.debug("substep at t=%.4g (dt=%.3g)", state.t, dt_used)
            traj.states.append(state.copy())
            traj.dts.append(dt_used)
            traj.newton_iters.append(info.n_iter)
            for obs in observers:
                if hasattr(obs, "on_state"):
                    obs.on_state(state, op, drive.mu)
    else:
        dt_next = cfg.dt_init
        while state.t < t_end * (1 - 1e-12):
            dt_want = min(dt_next, t_end - state.t)
            state, dt_used, dt_next, info = step(op, state, dt_want, drive.mu, cfg, observers)
            traj.clamped_loss += info.clamped_loss
            traj.states.append(state.copy())
            traj.dts.append(dt_used)
            traj.newton_iters.append(info.n_iter)
            for obs in observers:
                if hasattr(obs, "on_state"):
                    obs.on_state(state, op, drive.mu)

    traj.wall_time = _time.perf_counter() - t_start
    return traj
