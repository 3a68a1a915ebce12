"""Tube-and-ball mechanics: Lagrangian, partials, energy and Lagrange equations.

A tube rotates in a vertical plane about its centre; a ball of mass ``m``
slides frictionlessly inside it. With ball position ``x`` along the tube and
tube angle ``phi``::

    T = 1/2 (m x^2 + J) phidot^2 + 1/2 m xdot^2
    V = m g x sin(phi)

Every function here is pure and broadcasts over numpy arrays, so a
:class:`State` may hold scalars or equally-shaped arrays (one entry per grid
point). ``phi`` is the unwrapped angle and is never reduced modulo 2 pi.
"""

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

__all__ = [
    "ModelParams",
    "State",
    "Accel",
    "lagrangian",
    "energy",
    "dl_dx",
    "dl_dphi",
    "el_rhs",
    "el_residual",
]


@dataclass(frozen=True)
class ModelParams:
    """Physical constants. The defaults are the unit normalization m = J = g = 1."""

    m: float = 1.0
    J: float = 1.0
    g: float = 1.0

    def __post_init__(self):
        for name in ("m", "J", "g"):
            value = getattr(self, name)
            if not (np.isfinite(value) and value > 0):
                raise ValueError(f"{name} must be finite and > 0, got {value!r}")

    @property
    def is_unit(self) -> bool:
        return self.m == 1.0 and self.J == 1.0 and self.g == 1.0


class State(NamedTuple):
    x: float
    phi: float
    xdot: float
    phidot: float


class Accel(NamedTuple):
    xddot: float
    phiddot: float


def lagrangian(p: ModelParams, s: State):
    return (0.5 * (p.m * s.x**2 + p.J) * s.phidot**2
            + 0.5 * p.m * s.xdot**2
            - p.m * p.g * s.x * np.sin(s.phi))


def energy(p: ModelParams, s: State):
    return (0.5 * (p.m * s.x**2 + p.J) * s.phidot**2
            + 0.5 * p.m * s.xdot**2
            + p.m * p.g * s.x * np.sin(s.phi))


def dl_dx(p: ModelParams, s: State):
    return p.m * s.x * s.phidot**2 - p.m * p.g * np.sin(s.phi)


def dl_dphi(p: ModelParams, s: State):
    return -p.m * p.g * s.x * np.cos(s.phi)


def el_rhs(p: ModelParams, s: State) -> Accel:
    """Accelerations solving the Lagrange equations at state ``s``.

    ``m x^2 + J`` is strictly positive, so the angular equation never degenerates.
    """
    xddot = s.x * s.phidot**2 - p.g * np.sin(s.phi)
    phiddot = ((-2.0 * p.m * s.x * s.xdot * s.phidot - p.m * p.g * s.x * np.cos(s.phi))
               / (p.m * s.x**2 + p.J))
    return Accel(xddot, phiddot)


def el_residual(p: ModelParams, s: State, a: Accel):
    """Residuals ``(r_x, r_phi)`` of the Lagrange equations d/dt(dL/dqdot) - dL/dq.

    Both vanish exactly when the jet ``(s, a)`` satisfies the equations of motion.
    """
    r_x = p.m * a.xddot - dl_dx(p, s)
    r_phi = ((p.m * s.x**2 + p.J) * a.phiddot
             + 2.0 * p.m * s.x * s.xdot * s.phidot
             - dl_dphi(p, s))
    return r_x, r_phi
