"""Independent checks that a coefficient vector is a genuine periodic motion.

Nothing here looks at how a trajectory was produced: every check consumes the
stored coefficients only, so an orbit file can be re-verified in isolation.

* strong-form residuals of the Lagrange equations on the quadrature grid;
* shooting: RK4 from the trajectory's state at t = 0 over one period, closure
  of position, winding and velocities;
* energy drift along the shooting path;
* flatness of the momentum-integral profile
  ``(m x^2 + J) phidot(t) + int_t^omega dL/dphi ds``, constant on a solution;
* the Poincare-type and coercivity inequalities as property checks.
"""

from dataclasses import asdict, dataclass
import math
from typing import NamedTuple, Optional

import numpy as np

from . import _kernels
from .action import action, check_quadrature, coercivity_bound
from .model import ModelParams, State, dl_dphi, el_residual, energy
from .trajectory import FourierTrajectory, evaluate, grid, sample

__all__ = [
    "IntegrationError",
    "IntegratedPath",
    "Thresholds",
    "VerifyReport",
    "LambdaProfile",
    "PoincareSides",
    "integrate_el",
    "path_energy_drift",
    "shooting_check",
    "el_residual_profile",
    "lambda_profile",
    "symmetry_error",
    "poincare_check",
    "verify",
]

DEFAULT_RK_STEPS = 16384


class IntegrationError(ArithmeticError):
    def __init__(self, step):
        super().__init__(f"non-finite state at integration step {step}")
        self.step = step


@dataclass(frozen=True, eq=False)
class IntegratedPath:
    h: float
    states: np.ndarray  # shape (steps + 1, 4): x, phi, xdot, phidot

    @property
    def times(self) -> np.ndarray:
        return np.arange(self.states.shape[0]) * self.h

    def state(self, i) -> State:
        return State(*(float(v) for v in self.states[i]))

    def as_state(self) -> State:
        """All samples as one array-valued :class:`State`."""
        return State(*self.states.T)


def integrate_el(p: ModelParams, s0: State, t_end: float, steps: int) -> IntegratedPath:
    """Classical RK4 on the Lagrange equations with fixed step ``t_end / steps``."""
    if steps < 16:
        raise ValueError(f"integrate_el needs steps >= 16, got {steps}")
    h = t_end / steps
    states, bad = _kernels.rk4_path(np.asarray(s0, dtype=np.float64), h, steps, p.m, p.J, p.g)
    if bad >= 0:
        raise IntegrationError(bad)
    return IntegratedPath(h, states)


def path_energy_drift(p: ModelParams, path: IntegratedPath) -> float:
    """``max |E(t) - E(0)| / (1 + |E(0)|)`` along the path."""
    e = energy(p, path.as_state())
    return float(np.max(np.abs(e - e[0])) / (1.0 + abs(e[0])))


def shooting_check(p: ModelParams, tr: FourierTrajectory, steps: int = DEFAULT_RK_STEPS):
    """Integrate one period from ``tr`` at t = 0; return ``(mismatch, energy_drift)``."""
    s0, _ = evaluate(tr, 0.0)
    path = integrate_el(p, s0, tr.omega, steps)
    end = path.states[-1]
    mismatch = max(abs(end[0] - s0.x),
                   abs(end[1] - s0.phi - 2.0 * math.pi * tr.k),
                   abs(end[2] - s0.xdot),
                   abs(end[3] - s0.phidot))
    return float(mismatch), path_energy_drift(p, path)


def el_residual_profile(p: ModelParams, tr: FourierTrajectory, M=None) -> float:
    """Sup over the grid of ``|r_x|`` and ``|r_phi|`` for the trajectory's exact jet."""
    M = check_quadrature(tr.modes, M)
    smp = sample(tr, M)
    r_x, r_phi = el_residual(p, smp.states, smp.accels)
    return float(max(np.max(np.abs(r_x)), np.max(np.abs(r_phi))))


class LambdaProfile(NamedTuple):
    mean: float
    spread: float
    profile: np.ndarray


def lambda_profile(p: ModelParams, tr: FourierTrajectory, M=None,
                   endpoint_correction: bool = True) -> LambdaProfile:
    """``(m x^2 + J) phidot + int_{t_i}^omega l ds`` on the grid, ``l = dL/dphi``.

    The tail integral is the composite trapezoid over grid nodes ``t_i..omega``.
    ``l`` is periodic but the partial intervals are not, so the plain rule is
    only second order; with ``endpoint_correction`` the leading
    Euler-Maclaurin term ``-(h^2/12)(l'(omega) - l'(t_i))`` is subtracted,
    using the exact derivative of ``l`` along the trajectory.
    """
    M = check_quadrature(tr.modes, M)
    h = tr.omega / M
    smp = sample(tr, M)
    s = smp.states
    l = dl_dphi(p, s)
    lext = np.append(l, l[0])  # l(omega) = l(0) by periodicity
    panels = 0.5 * h * (lext[1:] + lext[:-1])
    tail = np.cumsum(panels[::-1])[::-1]
    if endpoint_correction:
        ldot = -p.m * p.g * (s.xdot * np.cos(s.phi) - s.x * np.sin(s.phi) * s.phidot)
        tail = tail - h * h / 12.0 * (ldot[0] - ldot)
    prof = (p.m * s.x**2 + p.J) * s.phidot + tail
    return LambdaProfile(float(np.mean(prof)), float(np.ptp(prof)), prof)


def symmetry_error(tr: FourierTrajectory, M=None) -> float:
    """Largest violation of oddness, periodicity and winding on the grid."""
    M = check_quadrature(tr.modes, M)
    t = grid(tr.omega, M)
    s, _ = evaluate(tr, t)
    s_shift, _ = evaluate(tr, t + tr.omega)
    s_neg, _ = evaluate(tr, -t)
    return float(max(np.max(np.abs(s_shift.x - s.x)),
                     np.max(np.abs(s_shift.phi - s.phi - 2.0 * math.pi * tr.k)),
                     np.max(np.abs(s_neg.x + s.x)),
                     np.max(np.abs(s_neg.phi + s.phi))))


class PoincareSides(NamedTuple):
    lhs_l2: float
    rhs_l2: float
    lhs_c: float
    rhs_c: float


def poincare_check(coeffs, a: float, points: Optional[int] = None) -> PoincareSides:
    """Both sides of the two Poincare-type inequalities for an odd function on (-a, a).

    ``u(t) = sum_n c_n sin((2n - 1) pi t / (2a))``; this quarter-wave sine
    basis spans the odd H^1 functions on (-a, a) restricted to [0, a].
    Returns ``(|u|^2_L2, a^2/2 |u'|^2_L2, |u|^2_C, a |u'|^2_L2)`` on (0, a),
    by trapezoid quadrature and maximization on a dense grid. ``u^2`` and
    ``u'^2`` are even about both 0 and a, so the trapezoid is spectrally
    accurate on this grid.
    """
    c = np.asarray(coeffs, dtype=np.float64).reshape(-1)
    a = float(a)
    if not a > 0:
        raise ValueError(f"a must be > 0, got {a}")
    if points is None:
        points = max(2048, 16 * c.size + 64)
    t = np.linspace(0.0, a, points + 1)
    freq = (2 * np.arange(1, c.size + 1) - 1) * math.pi / (2.0 * a)
    arg = np.multiply.outer(t, freq)
    u = np.sin(arg) @ c
    du = np.cos(arg) @ (freq * c)
    wts = np.full(points + 1, a / points)
    wts[0] = wts[-1] = 0.5 * a / points
    u_l2 = float(wts @ (u * u))
    du_l2 = float(wts @ (du * du))
    return PoincareSides(u_l2, 0.5 * a * a * du_l2, float(np.max(u * u)), a * du_l2)


@dataclass(frozen=True)
class Thresholds:
    shooting: float = 1e-3
    energy_drift: float = 1e-6
    lambda_spread: float = 1e-4  # relative to |lambda_mean|
    el_residual: float = 1e-6
    symmetry: float = 1e-10
    coercivity_slack: float = 1e-9  # relative to 1 + |action|


@dataclass(frozen=True)
class VerifyReport:
    el_residual_max: float
    shooting_mismatch: float
    energy_drift: float
    lambda_mean: float
    lambda_spread: float
    action: float
    coercivity_margin: Optional[float]  # None unless m = J = g = 1
    symmetry_err: float
    max_abs_x: float
    lambda_form: str
    quad_points: int
    rk_steps: int

    @property
    def lambda_relative_spread(self) -> float:
        if self.lambda_mean == 0.0:
            return math.inf if self.lambda_spread > 0 else 0.0
        return self.lambda_spread / abs(self.lambda_mean)

    def failures(self, th: Thresholds = Thresholds()) -> list:
        """Names of the checks that do not pass ``th`` (empty list means verified)."""
        failed = []
        if not self.el_residual_max <= th.el_residual:
            failed.append("el_residual")
        if not self.shooting_mismatch <= th.shooting:
            failed.append("shooting")
        if not self.energy_drift <= th.energy_drift:
            failed.append("energy_drift")
        if not self.lambda_relative_spread <= th.lambda_spread:
            failed.append("lambda_spread")
        if not self.symmetry_err <= th.symmetry:
            failed.append("symmetry")
        if self.coercivity_margin is not None and \
                not self.coercivity_margin >= -th.coercivity_slack * (1.0 + abs(self.action)):
            failed.append("coercivity")
        return failed

    def as_dict(self) -> dict:
        return asdict(self)


def verify(p: ModelParams, tr: FourierTrajectory, rk_steps: int = DEFAULT_RK_STEPS,
           M=None) -> VerifyReport:
    M = check_quadrature(tr.modes, M)
    try:
        mismatch, drift = shooting_check(p, tr, rk_steps)
    except IntegrationError:
        mismatch, drift = math.inf, math.inf
    lam = lambda_profile(p, tr, M)
    s_val = action(p, tr, M).value
    margin = s_val - coercivity_bound(tr) if p.is_unit else None
    smp = sample(tr, M)
    return VerifyReport(
        el_residual_max=el_residual_profile(p, tr, M),
        shooting_mismatch=mismatch,
        energy_drift=drift,
        lambda_mean=lam.mean,
        lambda_spread=lam.spread,
        action=s_val,
        coercivity_margin=margin,
        symmetry_err=symmetry_error(tr, M),
        max_abs_x=float(np.max(np.abs(smp.states.x))),
        lambda_form="unit" if p.is_unit else "general",
        quad_points=M,
        rk_steps=rk_steps,
    )
