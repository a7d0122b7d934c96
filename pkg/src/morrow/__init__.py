"""Projection-based model order reduction toolkit.

Galerkin and least-squares Petrov-Galerkin (LSPG) reduced-order models for
nonlinear ODE systems under linear multistep and Runge-Kutta time
discretization, with POD basis construction, GNAT-style hyper-reduction,
computable error bounds, and an experiment harness.
"""

from .core import Model, TrialSubspace, Trajectory, SolverOptions, reconstruct

__all__ = [
    "Model",
    "TrialSubspace",
    "Trajectory",
    "SolverOptions",
    "reconstruct",
]

__version__ = "0.1.0"
