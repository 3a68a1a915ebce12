"""Discrete minimizing sequences for the action over the coefficient space.

``minimize`` is a limited-memory BFGS (two-loop recursion) with a backtracking
Armijo line search. The sufficient-decrease test uses the directly evaluated
action change of the trial step, so it stays meaningful when the decrease is
far below the rounding level of the action itself. The initial inverse
Hessian is diagonal, ``1/w_j^2`` scaled by the usual ``s.y / y.D.y`` factor,
which absorbs the ``j^2`` growth of the kinetic stiffness across modes. When the quasi-Newton direction
fails to descend the step falls back to the (diagonally scaled) steepest
descent direction. Accepted steps never increase the action.
"""

from dataclasses import dataclass, field
import math
from typing import Callable, Optional

import numpy as np

from .action import action_and_gradient, action_change, check_quadrature
from .model import ModelParams
from .trajectory import FourierTrajectory, random_trajectory

__all__ = [
    "OptimConfig",
    "OptimReport",
    "NonFiniteError",
    "NoConvergenceError",
    "minimize",
    "find_orbit",
    "multistart",
    "start_schedule",
]

_MAX_BACKTRACKS = 60


@dataclass(frozen=True)
class OptimConfig:
    modes: int = 32
    quad: Optional[int] = None  # None -> 8 * modes
    gtol: float = 1e-10
    max_iters: int = 5000
    memory: int = 10
    ls_shrink: float = 0.5
    ls_c1: float = 1e-4
    starts: int = 1
    seed: int = 0
    init_scale: float = 0.1

    def __post_init__(self):
        if self.modes < 1:
            raise ValueError("modes must be >= 1")
        if self.quad is not None:
            check_quadrature(self.modes, self.quad)
        if not (self.gtol > 0):
            raise ValueError("gtol must be > 0")
        if self.max_iters < 0 or self.memory < 1 or self.starts < 1:
            raise ValueError("max_iters >= 0, memory >= 1 and starts >= 1 required")
        if not (0.0 < self.ls_shrink < 1.0):
            raise ValueError("ls_shrink must lie in (0, 1)")
        if not (0.0 < self.ls_c1 < 1.0):
            raise ValueError("ls_c1 must lie in (0, 1)")
        if not (self.init_scale >= 0):
            raise ValueError("init_scale must be >= 0")

    @property
    def quad_points(self) -> int:
        return check_quadrature(self.modes, self.quad)

    def as_dict(self) -> dict:
        return {
            "modes": self.modes,
            "quad": self.quad_points,
            "gtol": self.gtol,
            "max_iters": self.max_iters,
            "memory": self.memory,
            "ls_shrink": self.ls_shrink,
            "ls_c1": self.ls_c1,
            "starts": self.starts,
            "seed": self.seed,
            "init_scale": self.init_scale,
        }


@dataclass(frozen=True, eq=False)
class OptimReport:
    trajectory: FourierTrajectory
    action: float
    grad_norm: float
    iterations: int
    converged: bool
    start_index: int = 0
    message: str = ""
    history: tuple = field(default=(), repr=False)


class NonFiniteError(ArithmeticError):
    """Action or gradient became non-finite; ``iterate`` is the offending trajectory."""

    def __init__(self, message, iterate, iteration):
        super().__init__(message)
        self.iterate = iterate
        self.iteration = iteration


class NoConvergenceError(RuntimeError):
    def __init__(self, message, reports):
        super().__init__(message)
        self.reports = list(reports)

    @property
    def best(self):
        finite = [r for r in self.reports if math.isfinite(r.grad_norm)]
        return min(finite, key=lambda r: r.grad_norm) if finite else None


def _evaluate(p, tr, M, iteration):
    value, ga, gb = action_and_gradient(p, tr, M)
    g = np.concatenate([ga, gb])
    if not (math.isfinite(value) and np.all(np.isfinite(g))):
        raise NonFiniteError(f"non-finite action or gradient at iteration {iteration}",
                             tr, iteration)
    return float(value), g


def minimize(p: ModelParams, init: FourierTrajectory, cfg: OptimConfig = OptimConfig(),
             start_index: int = 0,
             callback: Optional[Callable[[int, FourierTrajectory, float], None]] = None,
             ) -> OptimReport:
    """Run L-BFGS from ``init`` until ``max|grad| <= cfg.gtol`` or ``cfg.max_iters``.

    ``callback(iteration, trajectory, action)`` is invoked on every accepted
    iterate, including the start point. ``history`` on the report is the
    action at the start point plus the accumulated accepted changes, so it is
    non-increasing exactly; ``action`` is recomputed at the final iterate.

    The run also stops, unconverged, if the line search finds no decrease
    along either the quasi-Newton or the scaled steepest-descent direction.
    """
    if init.modes != cfg.modes:
        raise ValueError(f"init has {init.modes} modes, config expects {cfg.modes}")
    M = cfg.quad_points
    tr = init
    z = init.coefficients()
    diag = np.concatenate([init.frequencies, init.frequencies]) ** -2.0

    f, g = _evaluate(p, tr, M, 0)
    tracked = f
    history = [f]
    if callback is not None:
        callback(0, tr, f)
    s_hist, y_hist = [], []
    it = 0
    message = ""
    while True:
        gnorm = float(np.max(np.abs(g)))
        if gnorm <= cfg.gtol:
            message = "gradient tolerance reached"
            break
        if it >= cfg.max_iters:
            message = "iteration limit reached"
            break

        d = -_two_loop(g, s_hist, y_hist, diag)
        slope = float(g @ d)
        if not slope < 0:
            d = -diag * g
            slope = float(g @ d)
        step = _backtrack(p, tr, z, d, slope, cfg, M, it + 1)
        if step is None and s_hist:
            # drop curvature history and retry along scaled steepest descent
            s_hist, y_hist = [], []
            d = -diag * g
            slope = float(g @ d)
            step = _backtrack(p, tr, z, d, slope, cfg, M, it + 1)
        if step is None:
            message = "line search failed to decrease the action"
            break

        z_new, tr_new, f_new, g_new, delta = step
        s = z_new - z
        y = g_new - g
        sy = float(s @ y)
        if sy > 1e-16 * float(np.sqrt((s @ s) * (y @ y))):
            s_hist.append(s)
            y_hist.append(y)
            if len(s_hist) > cfg.memory:
                del s_hist[0], y_hist[0]
        z, tr, f, g = z_new, tr_new, f_new, g_new
        it += 1
        tracked += delta
        history.append(tracked)
        if callback is not None:
            callback(it, tr, f)

    gnorm = float(np.max(np.abs(g)))
    return OptimReport(tr, f, gnorm, it, gnorm <= cfg.gtol, start_index, message, tuple(history))


def _two_loop(g, s_hist, y_hist, diag):
    q = g.copy()
    alphas = []
    for s, y in zip(reversed(s_hist), reversed(y_hist)):
        rho = 1.0 / (y @ s)
        alpha = rho * (s @ q)
        q -= alpha * y
        alphas.append((rho, alpha))
    if s_hist:
        s, y = s_hist[-1], y_hist[-1]
        gamma = (s @ y) / (y @ (diag * y))
    else:
        gamma = 1.0
    r = gamma * diag * q
    for (s, y), (rho, alpha) in zip(zip(s_hist, y_hist), reversed(alphas)):
        beta = rho * (y @ r)
        r += (alpha - beta) * s
    return r


def _backtrack(p, tr, z, d, slope, cfg, M, iteration):
    n = tr.modes
    step = 1.0
    for _ in range(_MAX_BACKTRACKS):
        dz = step * d
        delta = action_change(p, tr, dz[:n], dz[n:], M)
        if delta <= cfg.ls_c1 * step * slope and delta <= 0.0:
            z_new = z + dz
            tr_new = tr.with_coefficients(z_new)
            try:
                f_new, g_new = _evaluate(p, tr_new, M, iteration)
            except NonFiniteError:
                pass
            else:
                return z_new, tr_new, f_new, g_new, delta
        step *= cfg.ls_shrink
    return None


def start_schedule(cfg: OptimConfig) -> list:
    """Seeds for each start: ``None`` (zero coefficients) first, then ``seed + i``."""
    return [None] + [cfg.seed + i for i in range(1, cfg.starts)]


def _start_point(omega, k, cfg, seed):
    if seed is None:
        return FourierTrajectory.zero(omega, k, cfg.modes)
    return random_trajectory(cfg.modes, cfg.init_scale, seed, omega, k)


def _check_problem(omega, k):
    if isinstance(omega, bool) or not isinstance(omega, (int, float, np.floating, np.integer)) \
            or not (math.isfinite(omega) and omega > 0):
        raise ValueError(f"omega must be finite and > 0, got {omega!r}")
    if isinstance(k, bool) or not isinstance(k, (int, np.integer)) or k < 1:
        raise ValueError(f"k must be an integer >= 1, got {k!r}")


def multistart(p: ModelParams, omega: float, k: int, cfg: OptimConfig = OptimConfig(),
               schedule: Optional[list] = None) -> list:
    """Independent runs from each start, deduplicated and sorted by action.

    Runs whose coefficients agree to 1e-6 in sup-norm are the same orbit; the
    lowest start index is kept. Unconverged and non-finite runs are kept (the
    latter with ``action = nan``) and sorted after the converged ones.
    """
    _check_problem(omega, k)
    if schedule is None:
        schedule = start_schedule(cfg)
    reports = []
    for index, seed in enumerate(schedule):
        init = _start_point(omega, k, cfg, seed)
        try:
            reports.append(minimize(p, init, cfg, start_index=index))
        except NonFiniteError as exc:
            reports.append(OptimReport(exc.iterate, math.nan, math.nan, exc.iteration,
                                       False, index, str(exc)))

    unique = []
    for rep in sorted(reports, key=lambda r: r.start_index):
        z = rep.trajectory.coefficients()
        if any(np.max(np.abs(z - u.trajectory.coefficients())) <= 1e-6 for u in unique):
            continue
        unique.append(rep)

    def order(r):
        return (not r.converged, math.isnan(r.action),
                r.action if math.isfinite(r.action) else math.inf, r.start_index)

    return sorted(unique, key=order)


def find_orbit(p: ModelParams, omega: float, k: int,
               cfg: OptimConfig = OptimConfig()) -> OptimReport:
    """Best converged orbit over the start schedule (lowest action, then start index)."""
    reports = multistart(p, omega, k, cfg)
    converged = [r for r in reports if r.converged]
    if not converged:
        err = NoConvergenceError("", reports)
        best = err.best
        detail = f"best gradient norm {best.grad_norm:.3e}" if best else "all starts non-finite"
        err.args = (f"no start converged for omega={omega!r}, k={k} ({detail})",)
        raise err
    return converged[0]

