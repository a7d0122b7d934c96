"""Full-order-model time discretization: residuals and Newton step solves.

For a linear multistep scheme the per-step unknown w satisfies

    r^n(w) = alpha_0 w - dt beta_0 f(w, t^n)
             + sum_{j>=1} alpha_j x^{n-j} - dt sum_{j>=1} beta_j f(x^{n-j}, t^{n-j}) = 0

and for a Runge-Kutta scheme the stage unknowns w_i (velocity values) satisfy

    r_i^n(w_1..w_s) = w_i - f(x^{n-1} + dt sum_j a_ij w_j, t^{n-1} + c_i dt) = 0

with the explicit state update x^n = x^{n-1} + dt sum_i b_i w_i.
"""

from dataclasses import dataclass

import numpy as np
from scipy.linalg import lu_factor, lu_solve

from .core import Model, SolverOptions, Trajectory
from .schemes import ButcherTableau, LmmScheme, classify


class StepSolveError(RuntimeError):
    """Newton non-convergence; carries the last iterate and residual norm."""

    def __init__(self, msg, last_iterate=None, residual_norm=None,
                 time_index=None):
        super().__init__(msg)
        self.last_iterate = last_iterate
        self.residual_norm = residual_norm
        self.time_index = time_index


@dataclass(frozen=True)
class LmmStepContext:
    """History and coefficients for one linear-multistep step.

    history[j-1] holds x^{n-j} (most recent first); its length must equal
    min(k, n), consistent with the scheme's startup coefficients.
    """

    history: tuple
    n: int
    dt: float
    scheme: LmmScheme

    def __post_init__(self):
        alpha, _ = self.scheme.coeffs(self.n)
        if len(self.history) != len(alpha) - 1:
            raise ValueError(
                f"history length {len(self.history)} inconsistent with "
                f"coefficients at n={self.n} (expected {len(alpha) - 1})")


@dataclass(frozen=True)
class RkStageSet:
    stage_values: tuple   # s vectors w_i
    base_state: np.ndarray  # x^{n-1}
    t_base: float
    dt: float
    tableau: ButcherTableau


def lmm_residual(model: Model, ctx: LmmStepContext, w: np.ndarray) -> np.ndarray:
    alpha, beta = ctx.scheme.coeffs(ctx.n)
    tn = ctx.n * ctx.dt
    r = alpha[0] * w - ctx.dt * beta[0] * model.velocity(w, tn)
    for j in range(1, len(alpha)):
        xj = ctx.history[j - 1]
        r = r + alpha[j] * xj
        if beta[j] != 0.0:
            r = r - ctx.dt * beta[j] * model.velocity(xj, (ctx.n - j) * ctx.dt)
    return r


def lmm_residual_jacobian(model: Model, ctx: LmmStepContext,
                          w: np.ndarray) -> np.ndarray:
    alpha, beta = ctx.scheme.coeffs(ctx.n)
    jac = alpha[0] * np.eye(model.dim)
    if beta[0] != 0.0:
        jac = jac - ctx.dt * beta[0] * model.jacobian(w, ctx.n * ctx.dt)
    return jac


def solve_lmm_step(model: Model, ctx: LmmStepContext,
                   opts: SolverOptions) -> np.ndarray:
    alpha, beta = ctx.scheme.coeffs(ctx.n)
    if beta[0] == 0.0:
        # residual is affine in w: one direct update, no Newton
        rhs = np.zeros(model.dim)
        for j in range(1, len(alpha)):
            xj = ctx.history[j - 1]
            rhs -= alpha[j] * xj
            if beta[j] != 0.0:
                rhs += ctx.dt * beta[j] * model.velocity(
                    xj, (ctx.n - j) * ctx.dt)
        return rhs / alpha[0]

    w = ctx.history[0].copy()  # warm start from previous state
    r = lmm_residual(model, ctx, w)
    r0 = np.linalg.norm(r)
    tol = max(opts.newton_abs_tol, opts.newton_rel_tol * r0)
    if r0 <= tol:
        return w
    for _ in range(opts.max_iters):
        jac = lmm_residual_jacobian(model, ctx, w)
        w = w - lu_solve(lu_factor(jac), r)
        r = lmm_residual(model, ctx, w)
        if np.linalg.norm(r) <= tol:
            return w
    raise StepSolveError(
        f"Newton failed to converge in {opts.max_iters} iterations "
        f"(|r| = {np.linalg.norm(r):.3e})",
        last_iterate=w, residual_norm=float(np.linalg.norm(r)),
        time_index=ctx.n)


def rk_stage_residual(model: Model, stages: RkStageSet, i: int) -> np.ndarray:
    """Residual of stage i (1-based) given all stage values."""
    tab = stages.tableau
    arg = stages.base_state.copy()
    for j in range(tab.s):
        if tab.a[i - 1, j] != 0.0:
            arg = arg + stages.dt * tab.a[i - 1, j] * stages.stage_values[j]
    ti = stages.t_base + tab.c[i - 1] * stages.dt
    return stages.stage_values[i - 1] - model.velocity(arg, ti)


def _solve_rk_stage(model, base_state, t_base, tableau, dt, prev_stages, i,
                    opts):
    """Newton solve of the stagewise residual for explicit/DIRK stage i
    (0-based): w = f(x + dt a_ii w + dt sum_{j<i} a_ij w_j, t_i)."""
    known = base_state.copy()
    for j in range(i):
        if tableau.a[i, j] != 0.0:
            known = known + dt * tableau.a[i, j] * prev_stages[j]
    ti = t_base + tableau.c[i] * dt
    aii = tableau.a[i, i]
    if aii == 0.0:
        return model.velocity(known, ti)

    w = model.velocity(base_state, t_base)  # standard warm start
    eye = np.eye(model.dim)
    r = w - model.velocity(known + dt * aii * w, ti)
    tol = max(opts.newton_abs_tol, opts.newton_rel_tol * np.linalg.norm(r))
    for _ in range(opts.max_iters):
        if np.linalg.norm(r) <= tol:
            return w
        jac = eye - dt * aii * model.jacobian(known + dt * aii * w, ti)
        w = w - lu_solve(lu_factor(jac), r)
        r = w - model.velocity(known + dt * aii * w, ti)
    if np.linalg.norm(r) <= tol:
        return w
    raise StepSolveError(
        f"RK stage {i + 1} Newton failed (|r| = {np.linalg.norm(r):.3e})",
        last_iterate=w, residual_norm=float(np.linalg.norm(r)))


def _solve_rk_coupled(model, base_state, t_base, tableau, dt, opts):
    """Coupled Newton on the stacked s*N system for fully implicit tableaus."""
    s, ndof = tableau.s, model.dim
    w = np.tile(model.velocity(base_state, t_base), s)

    def residual_and_jac(wvec):
        ws = wvec.reshape(s, ndof)
        r = np.empty((s, ndof))
        jac = np.zeros((s * ndof, s * ndof))
        for i in range(s):
            arg = base_state + dt * (tableau.a[i] @ ws)
            ti = t_base + tableau.c[i] * dt
            r[i] = ws[i] - model.velocity(arg, ti)
            jf = model.jacobian(arg, ti)
            for j in range(s):
                blk = jac[i * ndof:(i + 1) * ndof, j * ndof:(j + 1) * ndof]
                if i == j:
                    blk += np.eye(ndof)
                if tableau.a[i, j] != 0.0:
                    blk -= dt * tableau.a[i, j] * jf
        return r.ravel(), jac

    r, jac = residual_and_jac(w)
    tol = max(opts.newton_abs_tol, opts.newton_rel_tol * np.linalg.norm(r))
    for _ in range(opts.max_iters):
        if np.linalg.norm(r) <= tol:
            break
        w = w - lu_solve(lu_factor(jac), r)
        r, jac = residual_and_jac(w)
    else:
        if np.linalg.norm(r) > tol:
            raise StepSolveError(
                f"coupled RK Newton failed (|r| = {np.linalg.norm(r):.3e})",
                last_iterate=w, residual_norm=float(np.linalg.norm(r)))
    return [w[i * ndof:(i + 1) * ndof].copy() for i in range(s)]


def solve_rk_step(model: Model, base_state: np.ndarray,
                  tableau: ButcherTableau, dt: float, opts: SolverOptions,
                  t_base: float = 0.0):
    """Solve one RK step; returns (stage_values, next_state)."""
    kind = classify(tableau).tag
    if kind == "fully_implicit":
        stage_values = _solve_rk_coupled(model, base_state, t_base, tableau,
                                         dt, opts)
    else:
        stage_values = []
        for i in range(tableau.s):
            stage_values.append(_solve_rk_stage(
                model, base_state, t_base, tableau, dt, stage_values, i, opts))
    next_state = base_state + dt * sum(
        bi * wi for bi, wi in zip(tableau.b, stage_values))
    return stage_values, next_state


def _num_steps(dt: float, T: float) -> int:
    if T == 0.0:
        return 0
    steps = T / dt
    if abs(steps - round(steps)) > 1e-9 * max(1.0, abs(steps)):
        raise ValueError(f"T/dt = {steps} is not an integer")
    return int(round(steps))


def integrate(model: Model, scheme, dt: float, T: float,
              opts: SolverOptions = SolverOptions()) -> Trajectory:
    """Integrate the model from t=0 to t=T; scheme is an LmmScheme or a
    ButcherTableau."""
    nsteps = _num_steps(dt, T)
    states = [model.initial_state.copy()]
    try:
        if isinstance(scheme, ButcherTableau):
            for n in range(1, nsteps + 1):
                _, nxt = solve_rk_step(model, states[-1], scheme, dt, opts,
                                       t_base=(n - 1) * dt)
                states.append(nxt)
        elif isinstance(scheme, LmmScheme):
            for n in range(1, nsteps + 1):
                hist = tuple(states[n - j] for j in range(1, min(scheme.k, n) + 1))
                ctx = LmmStepContext(history=hist, n=n, dt=dt, scheme=scheme)
                states.append(solve_lmm_step(model, ctx, opts))
        else:
            raise TypeError(f"unsupported scheme type {type(scheme)!r}")
    except StepSolveError as err:
        if err.time_index is None:
            err.time_index = len(states)
        raise
    return Trajectory(dt=dt, states=tuple(states), kind="full")


def write_trajectory_csv(traj: Trajectory, path, labels=None):
    """Export as CSV with header t,x_0,...  Values use shortest decimal
    representation that round-trips binary64."""
    d = len(traj.states[0])
    if labels is None:
        labels = [f"x_{i}" for i in range(d)]
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("t," + ",".join(labels) + "\n")
        for n, x in enumerate(traj.states):
            t = n * traj.dt
            fh.write(repr(float(t)) + ","
                     + ",".join(repr(float(v)) for v in x) + "\n")


def read_trajectory_csv(path, kind="full") -> Trajectory:
    data = np.genfromtxt(path, delimiter=",", skip_header=1)
    data = np.atleast_2d(data)
    t = data[:, 0]
    dt = float(t[1] - t[0]) if len(t) > 1 else 0.0
    return Trajectory(dt=dt, states=tuple(row[1:] for row in data), kind=kind)
