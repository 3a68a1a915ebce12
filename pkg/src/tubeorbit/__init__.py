"""Periodic orbits of the rotating tube with a sliding ball, by action minimization."""

from ._kernels import BACKEND
from .model import Accel, ModelParams, State, dl_dphi, dl_dx, el_residual, el_rhs, energy, lagrangian
from .trajectory import FourierTrajectory, SampledTrajectory, evaluate, random_trajectory, sample, sobolev_norms
from .action import ActionValue, action, action_gradient, coercivity_bound
from .optimizer import OptimConfig, OptimReport, find_orbit, minimize, multistart

__version__ = "0.1.0"
