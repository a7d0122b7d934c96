"""Galerkin reduced-order model.

The reduced system d yhat/dt = Phi^T f(x0 + Phi yhat, t), yhat(0) = 0 is
realized as a derived Model of dimension p, so every full-order integrator
applies unchanged; commutativity of projection and time discretization makes
the delegated discrete solves identical to projecting the full residual.
"""

import numpy as np

from .core import Model, SolverOptions, TrialSubspace, Trajectory
from . import fom


def make_galerkin_model(model: Model, sub: TrialSubspace) -> Model:
    phi = sub.basis
    x0 = sub.reference

    def velocity(yhat, t):
        return phi.T @ model.velocity(x0 + phi @ yhat, t)

    def jacobian(yhat, t):
        return phi.T @ model.jacobian(x0 + phi @ yhat, t) @ phi

    return Model(dim=sub.p, velocity=velocity, jacobian=jacobian,
                 initial_state=np.zeros(sub.p))


def galerkin_reduced_residual_lmm(gm: Model, ctx: fom.LmmStepContext,
                                  what: np.ndarray) -> np.ndarray:
    """Reduced discrete residual; equals Phi^T r^n(x0 + Phi what)."""
    return fom.lmm_residual(gm, ctx, what)


def integrate_galerkin(model: Model, sub: TrialSubspace, scheme, dt: float,
                       T: float,
                       opts: SolverOptions = SolverOptions()) -> Trajectory:
    gm = make_galerkin_model(model, sub)
    traj = fom.integrate(gm, scheme, dt, T, opts)
    return Trajectory(dt=traj.dt, states=traj.states, kind="galerkin")
