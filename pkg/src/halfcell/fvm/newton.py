"""Damped Newton solver for the implicit-Euler systems."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from ..errors import ConfigError, NonConvergence, NumericsError
from .operator import SystemOperator

#: Step fraction kept away from the positivity boundary.
_POSITIVITY_MARGIN = 0.99
#: Maximum residual-increase halvings per iteration.
_MAX_HALVINGS = 8


@dataclass
class SolverConfig:
    """Newton, linear-solver and adaptive time-step settings."""

    newton_rtol: float = 1e-9
    newton_atol: float = 1e-10
    newton_max_iter: int = 20
    linear_solver: str = "direct"      # "direct" or "krylov"
    linear_rtol: float = 1e-10
    dt_init: float = 0.05
    dt_min: float = 1e-6
    dt_max: float = 2.5
    grow_factor: float = 1.2
    shrink_factor: float = 0.5
    easy_iter_threshold: int = 5
    # evaluate the stripping regularization at the end-of-step inventory;
    # keeps the explicit inventory update nonnegative at any step size
    implicit_plated: bool = True

    def __post_init__(self):
        if not 0.0 < self.shrink_factor < 1.0 < self.grow_factor:
            raise ConfigError("need 0 < shrink_factor < 1 < grow_factor")
        if not self.dt_min <= self.dt_init <= self.dt_max:
            raise ConfigError("need dt_min <= dt_init <= dt_max")
        if self.linear_solver not in ("direct", "krylov"):
            raise ConfigError("linear_solver must be 'direct' or 'krylov'")

    def strip_beta(self, op, dt: float) -> float:
        """Inventory-coupling constant dt * a / F for the stripping faces."""
        if not self.implicit_plated:
            return 0.0
        return dt * op.face_area / op.p.constants.F


@dataclass
class NewtonResult:
    x: np.ndarray
    iterates: list = field(default_factory=list)
    n_iter: int = 0
    residual_norms: list = field(default_factory=list)


def _attainable_floor(op: SystemOperator, x: np.ndarray, inv_dt: float = 0.0) -> float:
    """Cancellation floor of the residual norm at state ``x``.

    Rows of the operator sum terms of magnitude |A_lin| |x|; float evaluation
    cannot push the residual below machine epsilon times that scale, which
    matters on highly conducting phases where coefficients reach 1e9.
    """
    scale = abs(op.A_lin) @ np.abs(x)
    if inv_dt:
        scale[: op.dof.n_c] += np.abs(x[: op.dof.n_c]) * inv_dt
    return 1e-13 * float(np.linalg.norm(scale))


def _linear_solve(J: sp.csr_matrix, rhs: np.ndarray, cfg: SolverConfig) -> np.ndarray:
    if cfg.linear_solver == "direct":
        return spla.splu(J.tocsc()).solve(rhs)
    ilu = spla.spilu(J.tocsc(), drop_tol=1e-6, fill_factor=12)
    M = spla.LinearOperator(J.shape, ilu.solve)
    sol, info = spla.lgmres(J, rhs, M=M, rtol=cfg.linear_rtol, atol=0.0, maxiter=400)
    if info != 0:
        raise NonConvergence(f"iterative linear solver stalled (info={info})")
    return sol


def newton_solve(op: SystemOperator, x_guess: np.ndarray, dt: float, x_prev: np.ndarray,
                 n_pl: np.ndarray, mu: float, cfg: SolverConfig,
                 source: np.ndarray | None = None) -> NewtonResult:
    """Solve the implicit-Euler system for one step of size ``dt``.

    The residual is ``m (x - x_prev)/dt + A(x; mu) + source`` with ``m`` the
    indicator of concentration rows. Convergence is declared at
    ``|F| <= max(atol, rtol |F(x0)|)``. Each iteration damps by halving on
    residual increase (at most 8 times) and caps the step so concentrations
    stay strictly positive. All intermediate iterates are returned; they feed
    the snapshot sets of the reduction stage.
    """
    if dt <= 0:
        raise ValueError("dt must be positive")
    n_c = op.dof.n_c
    inv_dt = 1.0 / dt
    beta = cfg.strip_beta(op, dt)

    def residual(x):
        r = op.apply(x, n_pl, mu, beta=beta)
        r[:n_c] += (x[:n_c] - x_prev[:n_c]) * inv_dt
        if source is not None:
            r += source
        return r

    x = x_guess.copy()
    try:
        r = residual(x)
    except NumericsError as exc:
        raise NonConvergence(f"initial residual not evaluable: {exc}") from exc
    norm0 = float(np.linalg.norm(r))
    tol = max(cfg.newton_atol, cfg.newton_rtol * norm0, _attainable_floor(op, x, inv_dt))
    result = NewtonResult(x, [], 0, [norm0])
    if norm0 <= tol:
        return result

    norm = norm0
    mass_diag = np.zeros(op.dof.n_total)
    mass_diag[:n_c] = inv_dt
    for it in range(1, cfg.newton_max_iter + 1):
        J = op.jacobian(x, n_pl, mu, beta=beta) + sp.diags(mass_diag)
        delta = _linear_solve(J.tocsc(), -r, cfg)

        # positivity guard on the concentration block
        alpha = 1.0
        neg = delta[:n_c] < 0.0
        if np.any(neg):
            limit = np.min(x[:n_c][neg] / -delta[:n_c][neg])
            alpha = min(alpha, _POSITIVITY_MARGIN * limit)
        if alpha <= 0.0:
            raise NonConvergence("positivity guard blocked the Newton step")

        accepted = False
        for _ in range(_MAX_HALVINGS + 1):
            x_try = x + alpha * delta
            try:
                r_try = residual(x_try)
                norm_try = float(np.linalg.norm(r_try))
            except NumericsError:
                norm_try = np.inf
            if np.isfinite(norm_try) and (norm_try <= norm or norm_try <= tol):
                accepted = True
                break
            alpha *= 0.5
        if not accepted:
            # fall forward with the smallest damped step; max_iter guards divergence
            x_try = x + alpha * delta
            try:
                r_try = residual(x_try)
                norm_try = float(np.linalg.norm(r_try))
            except NumericsError as exc:
                raise NonConvergence(f"residual not evaluable under damping: {exc}") from exc

        x, r, norm = x_try, r_try, norm_try
        result.iterates.append(x.copy())
        result.residual_norms.append(norm)
        result.n_iter = it
        if norm <= tol:
            result.x = x
            return result
    raise NonConvergence(
        f"Newton did not reach tolerance {tol:.3e} in {cfg.newton_max_iter} iterations "
        f"(last residual {norm:.3e})")


def solve_initial_potential(op: SystemOperator, x0: np.ndarray, n_pl: np.ndarray,
                            mu: float, cfg: SolverConfig) -> np.ndarray:
    """Newton solve of the stationary potential problem with frozen concentrations.

    Returns the full state vector with the phi block replaced by the solution
    of the potential rows at the given concentrations.
    """
    n_c = op.dof.n_c
    x = x0.copy()
    prows = np.arange(n_c, op.dof.n_total)

    r = op.apply(x, n_pl, mu)[prows]
    norm0 = float(np.linalg.norm(r))
    tol = max(cfg.newton_atol, cfg.newton_rtol * norm0, _attainable_floor(op, x))
    if norm0 <= tol:
        return x
    norm = norm0
    for _ in range(cfg.newton_max_iter):
        J = op.jacobian(x, n_pl, mu).tocsr()[prows][:, prows]
        delta = _linear_solve(J.tocsc(), -r, cfg)
        alpha = 1.0
        for _ in range(_MAX_HALVINGS + 1):
            x_try = x.copy()
            x_try[prows] += alpha * delta
            try:
                r_try = op.apply(x_try, n_pl, mu)[prows]
                norm_try = float(np.linalg.norm(r_try))
            except NumericsError:
                norm_try = np.inf
            if np.isfinite(norm_try) and (norm_try <= norm or norm_try <= tol):
                break
            alpha *= 0.5
        x, r, norm = x_try, r_try, norm_try
        if norm <= tol:
            return x
    raise NonConvergence(f"stationary potential solve stalled at residual {norm:.3e}")
