"""Foundational types shared by every other module.

A ``Model`` is the full-order system dx/dt = f(x, t) with an analytic
Jacobian; a ``TrialSubspace`` is an orthonormal basis Phi together with the
reference state so approximate solutions live on the affine set
x0 + range(Phi).  All types are immutable after construction.
"""

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np


@dataclass(frozen=True)
class Model:
    """Full-order ODE system dx/dt = f(x, t) of dimension ``dim``.

    velocity and jacobian must be deterministic; jacobian(x, t) is expected
    to match central finite differences of velocity (see jacobian_fd_check).
    """

    dim: int
    velocity: Callable[[np.ndarray, float], np.ndarray]
    jacobian: Callable[[np.ndarray, float], np.ndarray]
    initial_state: np.ndarray

    def __post_init__(self):
        if self.dim < 1:
            raise ValueError("model dimension must be positive")
        if self.initial_state.shape != (self.dim,):
            raise ValueError("initial_state shape does not match dim")


@dataclass(frozen=True)
class TrialSubspace:
    """Affine trial subspace x0 + range(Phi) with orthonormal Phi (N x p)."""

    basis: np.ndarray
    reference: np.ndarray

    def __post_init__(self):
        n, p = self.basis.shape
        if not (1 <= p <= n):
            raise ValueError(f"basis must be N x p with 1 <= p <= N, got {n} x {p}")
        if self.reference.shape != (n,):
            raise ValueError("reference dimension does not match basis rows")

    @property
    def p(self) -> int:
        return self.basis.shape[1]

    @property
    def n(self) -> int:
        return self.basis.shape[0]


@dataclass(frozen=True)
class Trajectory:
    """Sequence of states at uniform time spacing dt.

    states[n] is the solution at t = n*dt; dimension N for kind='full',
    p (generalized coordinates) for ROM kinds.
    """

    dt: float
    states: tuple
    kind: str  # {"full", "galerkin", "lspg"}

    def __post_init__(self):
        if self.kind not in ("full", "galerkin", "lspg"):
            raise ValueError(f"unknown trajectory kind {self.kind!r}")

    def __len__(self):
        return len(self.states)

    @property
    def times(self) -> np.ndarray:
        return self.dt * np.arange(len(self.states))


@dataclass(frozen=True)
class SolverOptions:
    """Nonlinear-solver tolerances.

    newton_rel_tol is a residual-norm reduction factor (default 1e-3);
    tests typically tighten both tolerances so that solver error does not
    pollute equivalence checks.
    """

    newton_abs_tol: float = 1e-12
    newton_rel_tol: float = 1e-3
    max_iters: int = 50
    fd_step: float = 1e-6

    def __post_init__(self):
        if self.newton_abs_tol <= 0 or self.newton_rel_tol <= 0:
            raise ValueError("tolerances must be positive")
        if self.max_iters < 1:
            raise ValueError("max_iters must be >= 1")


def reconstruct(sub: TrialSubspace, yhat: np.ndarray) -> np.ndarray:
    """Lift generalized coordinates: x0 + Phi @ yhat."""
    yhat = np.asarray(yhat, dtype=float)
    if yhat.shape != (sub.p,):
        raise ValueError(f"expected coordinates of length {sub.p}, got {yhat.shape}")
    return sub.reference + sub.basis @ yhat


def check_orthonormality(sub: TrialSubspace) -> float:
    """Max entrywise deviation of Phi^T Phi from the identity."""
    g = sub.basis.T @ sub.basis
    return float(np.max(np.abs(g - np.eye(sub.p))))


def jacobian_fd_check(model: Model, x: np.ndarray, t: float,
                      fd_step: float = 1e-6) -> float:
    """Compare the analytic Jacobian against central finite differences.

    Returns the max entrywise deviation relative to the magnitude of the
    finite-difference matrix.  Step per component: fd_step * (1 + |x_i|).
    """
    jac = model.jacobian(x, t)
    fd = np.empty_like(jac)
    for i in range(model.dim):
        h = fd_step * (1.0 + abs(x[i]))
        xp = x.copy(); xp[i] += h
        xm = x.copy(); xm[i] -= h
        fd[:, i] = (model.velocity(xp, t) - model.velocity(xm, t)) / (2.0 * h)
    scale = max(float(np.max(np.abs(fd))), 1e-12)
    return float(np.max(np.abs(jac - fd))) / scale
