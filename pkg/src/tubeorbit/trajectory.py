"""Symmetry-adapted Fourier trajectories.

A trajectory with period ``omega`` and winding number ``k`` is stored as two
sine-coefficient vectors::

    x(t)   = sum_j a_j sin(2 pi j t / omega)
    phi(t) = (2 pi k / omega) t + sum_j b_j sin(2 pi j t / omega)

Oddness in t and the periodicity / winding conditions therefore hold for every
coefficient vector, and the admissible set becomes a plain linear space.
"""

from dataclasses import dataclass
from functools import lru_cache
import math

import numpy as np

from .model import Accel, State

__all__ = [
    "FourierTrajectory",
    "SampledTrajectory",
    "evaluate",
    "sample",
    "sobolev_norms",
    "random_trajectory",
    "basis_tables",
]


def _frozen(values) -> np.ndarray:
    arr = np.array(values, dtype=np.float64).reshape(-1)
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True, eq=False)
class FourierTrajectory:
    omega: float
    k: int
    a: np.ndarray
    b: np.ndarray

    def __post_init__(self):
        omega = float(self.omega)
        if not (math.isfinite(omega) and omega > 0):
            raise ValueError(f"omega must be finite and > 0, got {self.omega!r}")
        if isinstance(self.k, bool) or int(self.k) != self.k or self.k < 1:
            raise ValueError(f"k must be a positive integer, got {self.k!r}")
        a, b = _frozen(self.a), _frozen(self.b)
        if a.size < 1 or a.size != b.size:
            raise ValueError(f"coefficient vectors must have equal length >= 1, got {a.size}, {b.size}")
        if not (np.all(np.isfinite(a)) and np.all(np.isfinite(b))):
            raise ValueError("coefficients must be finite")
        object.__setattr__(self, "omega", omega)
        object.__setattr__(self, "k", int(self.k))
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)

    @classmethod
    def zero(cls, omega, k, modes):
        """The pure winding trajectory x = 0, phi = 2 pi k t / omega."""
        return cls(omega, k, np.zeros(modes), np.zeros(modes))

    @property
    def modes(self) -> int:
        return self.a.size

    @property
    def winding_rate(self) -> float:
        return 2.0 * math.pi * self.k / self.omega

    @property
    def frequencies(self) -> np.ndarray:
        return 2.0 * math.pi * np.arange(1, self.modes + 1) / self.omega

    def coefficients(self) -> np.ndarray:
        """Flat vector ``[a_1..a_N, b_1..b_N]`` used by the optimizer."""
        return np.concatenate([self.a, self.b])

    def with_coefficients(self, z) -> "FourierTrajectory":
        z = np.asarray(z, dtype=np.float64)
        n = self.modes
        if z.shape != (2 * n,):
            raise ValueError(f"expected {2 * n} coefficients, got shape {z.shape}")
        return FourierTrajectory(self.omega, self.k, z[:n], z[n:])

    def __eq__(self, other):
        if not isinstance(other, FourierTrajectory):
            return NotImplemented
        return (self.omega == other.omega and self.k == other.k
                and np.array_equal(self.a, other.a) and np.array_equal(self.b, other.b))

    __hash__ = None


@dataclass(frozen=True, eq=False)
class SampledTrajectory:
    omega: float
    k: int
    times: np.ndarray
    states: State
    accels: Accel

    def __len__(self):
        return self.times.size


def _sincos_cycles(c):
    """``sin(2 pi c)`` and ``cos(2 pi c)`` with the argument reduced to [-1/2, 1/2].

    Half-integer cycle counts give an exact zero sine, so x(0), x(omega/2) and
    the sine part of phi(omega/2) vanish identically.
    """
    r = c - np.round(c)
    arg = 2.0 * math.pi * r
    sn = np.where(2.0 * r == np.round(2.0 * r), 0.0, np.sin(arg))
    return sn, np.cos(arg)


def evaluate(tr: FourierTrajectory, t):
    """Exact values of ``(x, phi, xdot, phidot)`` and ``(xddot, phiddot)`` at ``t``.

    ``t`` may be a scalar or an array; the returned fields follow its shape.
    """
    t = np.asarray(t, dtype=np.float64)
    tau = t / tr.omega
    w = tr.frequencies
    sn, cs = _sincos_cycles(np.multiply.outer(tau, np.arange(1, tr.modes + 1)))
    x = (sn * tr.a).sum(axis=-1)
    xdot = (cs * (w * tr.a)).sum(axis=-1)
    xddot = -(sn * (w * w * tr.a)).sum(axis=-1)
    phi = 2.0 * math.pi * tr.k * tau + (sn * tr.b).sum(axis=-1)
    phidot = tr.winding_rate + (cs * (w * tr.b)).sum(axis=-1)
    phiddot = -(sn * (w * w * tr.b)).sum(axis=-1)
    if t.ndim == 0:
        return (State(float(x), float(phi), float(xdot), float(phidot)),
                Accel(float(xddot), float(phiddot)))
    return State(x, phi, xdot, phidot), Accel(xddot, phiddot)


def grid(omega, M) -> np.ndarray:
    """Uniform grid ``i omega / M`` for i = 0..M-1 (right endpoint excluded)."""
    return np.arange(M) * (omega / M)


def sample(tr: FourierTrajectory, M: int) -> SampledTrajectory:
    if M < 2:
        raise ValueError(f"sample needs M >= 2, got {M}")
    times = grid(tr.omega, M)
    states, accels = evaluate(tr, times)
    return SampledTrajectory(tr.omega, tr.k, times, states, accels)


def sobolev_norms(tr: FourierTrajectory):
    """Exact ``(||xdot||, ||phidot||)`` in L2(0, omega) from Parseval's identity."""
    w = tr.frequencies
    half = 0.5 * tr.omega
    xdot_sq = half * np.sum((tr.a * w) ** 2)
    phidot_sq = tr.omega * tr.winding_rate**2 + half * np.sum((tr.b * w) ** 2)
    return math.sqrt(xdot_sq), math.sqrt(phidot_sq)


def random_trajectory(N: int, scale: float, seed: int, omega: float = 2 * math.pi, k: int = 1):
    """Seeded trajectory with coefficients uniform in ``[-scale/j, scale/j]``."""
    if N < 1:
        raise ValueError(f"N must be >= 1, got {N}")
    if scale < 0 or not math.isfinite(scale):
        raise ValueError(f"scale must be finite and >= 0, got {scale}")
    rng = np.random.default_rng(seed)
    bound = scale / np.arange(1, N + 1)
    a = rng.uniform(-1.0, 1.0, N) * bound
    b = rng.uniform(-1.0, 1.0, N) * bound
    return FourierTrajectory(omega, k, a, b)


@lru_cache(maxsize=64)
def basis_tables(omega: float, N: int, M: int):
    """Read-only grid, frequencies and ``sin``/``cos`` tables of shape (M, N)."""
    t = grid(omega, M)
    w = 2.0 * math.pi * np.arange(1, N + 1) / omega
    S, C = _sincos_cycles(np.multiply.outer(np.arange(M) / M, np.arange(1, N + 1)))
    S = np.ascontiguousarray(S)
    C = np.ascontiguousarray(C)
    for arr in (t, w, S, C):
        arr.flags.writeable = False
    return t, w, S, C
