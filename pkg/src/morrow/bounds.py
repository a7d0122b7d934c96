"""Computable error bounds for Galerkin and LSPG reduced-order models.

Local linear-multistep bounds at step n take the form

    |dx^n| <= sum_l gamma1_l^n * ||(I - Proj) f(x0 + Phi y^{n-l})||
              + sum_{l>=1} gamma2_l^n * |dx^{n-l}|

with gamma1_l = |beta_l| dt / h, gamma2_l = (|alpha_l| + |beta_l| kappa dt)/h
and h = |alpha_0| - |beta_0| kappa dt, where Proj is the orthogonal projector
Phi Phi^T (Galerkin) or the oblique projector Phi (Psi^T Phi)^{-1} Psi^T
(LSPG).  Global bounds propagate the local ones by forward recursion, which
is numerically identical to the path-sum over coefficient tuples.  All
kappa-dependent bounds are valid modulo under-estimation of the Lipschitz
constant.
"""

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import lu_factor, lu_solve

from .core import Model, SolverOptions, TrialSubspace, Trajectory, reconstruct
from . import fom, lspg as lspg_mod
from .schemes import ButcherTableau, LmmScheme, classify


class BoundHypothesisError(ValueError):
    """A theorem hypothesis (time-step cap, invertibility, ...) failed."""


@dataclass
class LocalStepTerms:
    """Per-step ingredients of the local linear-multistep bound."""

    n: int
    h: float
    gamma1: np.ndarray      # l = 0..k_eff
    gamma2: np.ndarray      # l = 1..k_eff
    terms: np.ndarray       # ||(I - Proj^n) f(x0 + Phi y^{n-l})||, l = 0..k_eff
    residual_norm: float    # ||rbar^n(Phi y^n)|| (FOM residual, ROM history)
    proj_norm: float        # ||P^n||_2 (1 for Galerkin)

    @property
    def proj_contrib(self) -> float:
        return float(self.gamma1 @ self.terms)


@dataclass
class BoundReport:
    mode: str
    kind: str
    per_step_local: np.ndarray   # local contribution c^n (index 0 unused)
    per_step_bound: np.ndarray   # global bound B^n, B^0 = 0
    term_projection: np.ndarray  # l=0 raw projection term per step
    coeff: np.ndarray            # gamma1_0 per step
    details: dict = field(default_factory=dict)

    @property
    def global_bound(self) -> float:
        return float(self.per_step_bound[-1])


@dataclass
class AuxiliaryIncrementReport:
    mu: np.ndarray
    mu_bar: np.ndarray
    f_norms: np.ndarray
    aux_states: list
    bound_increment_form: np.ndarray   # (1 + k dt) sum mu^{n-j} / h^{j+1}
    bound_relative_form: np.ndarray    # dt (1 + k dt) sum mu_bar .. ||f||
    degenerate: np.ndarray             # flags where the increment vanished


def estimate_lipschitz(model: Model, sample_states, t_grid) -> float:
    """Sampled local Lipschitz estimate.

    Max of pairwise velocity quotients and spectral norms of the Jacobian
    at the samples; a lower bound on the true constant, reported as such.
    """
    samples = [np.asarray(x, float) for x in sample_states]
    if len(samples) < 2:
        raise ValueError("need at least 2 sample states")
    kappa = 0.0
    for t in t_grid:
        fs = [model.velocity(x, t) for x in samples]
        for i in range(len(samples)):
            kappa = max(kappa, float(np.linalg.norm(
                model.jacobian(samples[i], t), 2)))
            for j in range(i + 1, len(samples)):
                dx = np.linalg.norm(samples[i] - samples[j])
                if dx > 0:
                    kappa = max(kappa, float(
                        np.linalg.norm(fs[i] - fs[j]) / dx))
    return kappa


def _oblique_projector(sub: TrialSubspace, psi: np.ndarray) -> np.ndarray:
    """P = Phi (Psi^T Phi)^{-1} Psi^T."""
    phi = sub.basis
    m = psi.T @ phi
    sv = np.linalg.svd(m, compute_uv=False)
    if sv[-1] <= 1e-13 * sv[0]:
        raise BoundHypothesisError(
            f"Psi^T Phi is numerically singular (sigma_min = {sv[-1]:.3e})")
    return phi @ np.linalg.solve(m, psi.T)


def local_aposteriori_lmm(traj: Trajectory, kind: str, model: Model,
                          sub: TrialSubspace, scheme: LmmScheme,
                          kappa: float, W=None):
    """Per-step local a posteriori bound terms along a ROM trajectory.

    kind selects the projector: 'galerkin' uses I - Phi Phi^T, 'lspg' uses
    the oblique projector built from the test basis at the converged step
    (W required).  Raises if the time-step condition h^n > 0 fails.
    """
    if kind not in ("galerkin", "lspg"):
        raise ValueError(f"unknown ROM kind {kind!r}")
    if kind == "lspg" and W is None:
        raise ValueError("lspg bounds need the weighting operator")
    dt = traj.dt
    phi = sub.basis
    lifted = [reconstruct(sub, y) for y in traj.states]
    out = []
    for n in range(1, len(traj.states)):
        alpha, beta = scheme.coeffs(n)
        h = abs(alpha[0]) - abs(beta[0]) * kappa * dt
        if h <= 0.0:
            raise BoundHypothesisError(
                f"time-step condition violated at n={n}: "
                f"dt must be < |alpha_0|/(|beta_0| kappa) = "
                f"{abs(alpha[0]) / (abs(beta[0]) * kappa):.3e}")
        k_eff = len(alpha) - 1

        hist = tuple(lifted[n - j] for j in range(1, k_eff + 1))
        ctx = fom.LmmStepContext(history=hist, n=n, dt=dt, scheme=scheme)
        rbar = fom.lmm_residual(model, ctx, lifted[n])

        if kind == "galerkin":
            def deflate(v):
                return v - phi @ (phi.T @ v)
            proj_norm = 1.0
        else:
            psi = lspg_mod.compute_test_basis(
                model, sub, W, ctx, traj.states[n]).matrix
            proj = _oblique_projector(sub, psi)

            def deflate(v, proj=proj):
                return v - proj @ v
            proj_norm = float(np.linalg.norm(proj, 2))

        terms = np.empty(k_eff + 1)
        for ell in range(k_eff + 1):
            fval = model.velocity(lifted[n - ell], (n - ell) * dt)
            terms[ell] = np.linalg.norm(deflate(fval))
        gamma1 = np.abs(beta) * dt / h
        gamma2 = (np.abs(alpha[1:]) + np.abs(beta[1:]) * kappa * dt) / h
        out.append(LocalStepTerms(
            n=n, h=h, gamma1=gamma1, gamma2=gamma2, terms=terms,
            residual_norm=float(np.linalg.norm(rbar)), proj_norm=proj_norm))
    return out


def _propagate(local_terms, mode, kind):
    nsteps = len(local_terms)
    bound = np.zeros(nsteps + 1)
    local = np.zeros(nsteps + 1)
    term0 = np.zeros(nsteps + 1)
    coeff0 = np.zeros(nsteps + 1)
    for lt in local_terms:
        c = lt.proj_contrib
        b = c
        for ell in range(1, len(lt.gamma2) + 1):
            b += lt.gamma2[ell - 1] * bound[lt.n - ell]
        bound[lt.n] = b
        local[lt.n] = c
        term0[lt.n] = lt.terms[0]
        coeff0[lt.n] = lt.gamma1[0]
    return BoundReport(mode=mode, kind=kind, per_step_local=local,
                       per_step_bound=bound, term_projection=term0,
                       coeff=coeff0)


def global_aposteriori_lmm(local_terms, kind="galerkin") -> BoundReport:
    """Forward recursion B^n = c^n + sum_l gamma2_l^n B^{n-l}, B^0 = 0;
    equal to the path-sum over coefficient tuples (proved by the
    enumeration cross-check in the test suite)."""
    return _propagate(local_terms, "aposteriori", kind)


def _expm1_div(a: float, kappa: float) -> float:
    """(exp(a * kappa) - 1) / kappa with the kappa -> 0 limit a."""
    if kappa == 0.0:
        return a
    return math.expm1(a * kappa) / kappa


def _starred_constants(local_terms, scheme, kappa, dt):
    """Extremal coefficients over the run, per the simplified bounds."""
    a0s = b0s = None
    hmin = np.inf
    a_s = b_s = 0.0
    vmax = -np.inf
    beta_max = 0.0
    for lt in local_terms:
        alpha, beta = scheme.coeffs(lt.n)
        if lt.h < hmin:
            hmin, a0s, b0s = lt.h, abs(alpha[0]), abs(beta[0])
        beta_max = max(beta_max, float(np.max(np.abs(beta))))
        for ell in range(1, len(alpha)):
            v = abs(alpha[ell]) + abs(beta[ell]) * kappa * dt
            if v > vmax:
                vmax, a_s, b_s = v, abs(alpha[ell]), abs(beta[ell])
    return a0s, b0s, a_s, b_s, beta_max


def simplified_global_bounds(local_terms, scheme, kappa, dt, mode,
                             kind="galerkin", epsilon=0.5) -> BoundReport:
    """Closed-form global bounds built from extremal coefficients.

    mode in {aposteriori, timestep_independent, residual_form}; each mode
    checks its own hypotheses (epsilon in (0,1), dt cap, k|alpha*| =
    |alpha_0*| for timestep_independent, beta_l = 0 for l >= 1 for
    residual_form) and raises BoundHypothesisError naming the failure.
    """
    if not 0.0 < epsilon < 1.0:
        raise BoundHypothesisError(f"epsilon must lie in (0,1), got {epsilon}")
    k = scheme.k
    nsteps = len(local_terms)
    a0s, b0s, a_s, b_s, beta_max = _starred_constants(
        local_terms, scheme, kappa, dt)
    if kappa * b0s > 0.0 and dt > a0s * (1.0 - epsilon) / (kappa * b0s):
        raise BoundHypothesisError(
            f"dt = {dt} exceeds |alpha_0*|(1-eps)/(kappa |beta_0*|) = "
            f"{a0s * (1.0 - epsilon) / (kappa * b0s):.3e}")

    # exponent coefficient eps^-1 (|beta*|/|alpha*| + |beta_0*|/|alpha_0*|)
    c = (b_s / a_s if a_s > 0 else 0.0) + b0s / a0s
    c /= epsilon

    if kind == "galerkin":
        # max over steps of the l=0 orthogonal-projection term
        max_term = max(lt.terms[0] for lt in local_terms)
    else:
        # max over steps and l <= l*_eps of the oblique-projection terms,
        # where l*_eps tracks the arg-max of gamma1_l * term_l per step
        l_eps = max(int(np.argmax(lt.gamma1 * lt.terms))
                    for lt in local_terms)
        max_term = max(float(np.max(lt.terms[:l_eps + 1]))
                       for lt in local_terms)
    max_res = max(lt.residual_norm for lt in local_terms)

    bounds = np.zeros(nsteps + 1)
    for n in range(1, nsteps + 1):
        tn = n * dt
        if mode == "timestep_independent":
            if abs(k * a_s - a0s) > 1e-12:
                raise BoundHypothesisError(
                    f"k|alpha*| = {k * a_s} != |alpha_0*| = {a0s}")
            denom = k * b_s + b0s
            bounds[n] = ((k + 1) * beta_max / denom
                         * _expm1_div(tn * c, kappa) * max_term)
        elif mode in ("aposteriori", "residual_form"):
            denom = (k * a_s - a0s) + (k * b_s + b0s) * kappa * dt
            growth = (k * a_s / a0s) ** n
            if denom == 0.0:
                if kappa > 0.0:
                    raise BoundHypothesisError(
                        "degenerate amplification denominator")
                frac = tn * c / ((k * b_s + b0s) * dt)
            else:
                frac = math.expm1(tn * kappa * c) / denom
            if mode == "aposteriori":
                bounds[n] = (k + 1) * beta_max * dt * growth * frac * max_term
            else:
                for lt in local_terms:
                    alpha, beta = scheme.coeffs(lt.n)
                    if np.any(beta[1:] != 0.0):
                        raise BoundHypothesisError(
                            "residual_form requires beta_l = 0 for l >= 1 "
                            f"(violated at n={lt.n})")
                bounds[n] = (k + 1) * growth * frac * max_res
        else:
            raise ValueError(f"unknown mode {mode!r}")

    term0 = np.zeros(nsteps + 1)
    coeff0 = np.zeros(nsteps + 1)
    for lt in local_terms:
        term0[lt.n] = lt.terms[0]
        coeff0[lt.n] = lt.gamma1[0]
    return BoundReport(mode=mode, kind=kind,
                       per_step_local=np.zeros(nsteps + 1),
                       per_step_bound=bounds, term_projection=term0,
                       coeff=coeff0,
                       details={"alpha0_star": a0s, "beta0_star": b0s,
                                "alpha_star": a_s, "beta_star": b_s,
                                "beta_max": beta_max, "epsilon": epsilon})


def backward_euler_aposteriori(traj, model, sub, kappa, W=None) -> BoundReport:
    """Closed-sum specialization: B^n = dt sum_j h^{-(j+1)} term^{n-j},
    h = 1 - kappa dt; requires dt < 1/kappa."""
    from .schemes import make_lmm
    if kappa * traj.dt >= 1.0:
        raise BoundHypothesisError("backward Euler bound needs dt < 1/kappa")
    kind = traj.kind if traj.kind in ("galerkin", "lspg") else "galerkin"
    local_terms = local_aposteriori_lmm(traj, kind, model, sub,
                                        make_lmm("backward_euler"), kappa, W)
    h = 1.0 - kappa * traj.dt
    nsteps = len(local_terms)
    terms = np.array([lt.terms[0] for lt in local_terms])  # index m-1 -> step m
    bounds = np.zeros(nsteps + 1)
    for n in range(1, nsteps + 1):
        bounds[n] = traj.dt * sum(
            terms[n - j - 1] / h ** (j + 1) for j in range(n))
    rep = _propagate(local_terms, "backward_euler", kind)
    rep.per_step_bound = bounds
    return rep


def auxiliary_increment_bound(model, lspg_traj, sub, dt, kappa,
                              opts: SolverOptions = SolverOptions()
                              ) -> AuxiliaryIncrementReport:
    """Single-step projection errors mu^j along the LSPG backward-Euler
    trajectory, via the full-space auxiliary step
    xbar^j = dt f(x0 + xbar^j) + Phi y^{j-1}."""
    if kappa * dt >= 1.0:
        raise BoundHypothesisError("auxiliary bound needs dt < 1/kappa")
    phi = sub.basis
    x0 = sub.reference
    h = 1.0 - kappa * dt
    n = len(lspg_traj.states) - 1
    mu = np.zeros(n + 1)
    mu_bar = np.zeros(n + 1)
    f_norms = np.zeros(n + 1)
    degenerate = np.zeros(n + 1, dtype=bool)
    aux_states = [None]
    eye = np.eye(model.dim)
    for j in range(1, n + 1):
        anchor = phi @ lspg_traj.states[j - 1]
        xbar = anchor.copy()  # warm start
        tj = j * dt
        for _ in range(opts.max_iters):
            g = xbar - dt * model.velocity(x0 + xbar, tj) - anchor
            if np.linalg.norm(g) <= opts.newton_abs_tol:
                break
            jac = eye - dt * model.jacobian(x0 + xbar, tj)
            xbar = xbar - lu_solve(lu_factor(jac), g)
        else:
            if np.linalg.norm(g) > max(opts.newton_abs_tol, 1e-8):
                raise fom.StepSolveError(
                    f"auxiliary Newton failed at step {j}", time_index=j)
        aux_states.append(xbar)
        d_rom = phi @ (lspg_traj.states[j] - lspg_traj.states[j - 1])
        d_aux = xbar - anchor
        mu[j] = np.linalg.norm(d_rom - d_aux)
        f_norms[j] = np.linalg.norm(model.velocity(x0 + xbar, tj))
        nd = np.linalg.norm(d_aux)
        if nd < 1e-14:
            # zero auxiliary increment: ratio undefined, report 0 + flag
            mu_bar[j] = 0.0
            degenerate[j] = True
        else:
            mu_bar[j] = mu[j] / nd

    b_inc = np.zeros(n + 1)
    b_rel = np.zeros(n + 1)
    for m in range(1, n + 1):
        b_inc[m] = (1.0 + kappa * dt) * sum(
            mu[m - j] / h ** (j + 1) for j in range(m))
        b_rel[m] = dt * (1.0 + kappa * dt) * sum(
            mu_bar[m - j] * f_norms[m - j] / h ** (j + 1) for j in range(m))
    return AuxiliaryIncrementReport(
        mu=mu, mu_bar=mu_bar, f_norms=f_norms, aux_states=aux_states,
        bound_increment_form=b_inc, bound_relative_form=b_rel,
        degenerate=degenerate)


def _rk_dinv(tableau, kappa, dt):
    """D with d_ij = delta_ij - kappa dt |a_ij|; checked to be inverse-
    nonnegative via the strict row-sum condition."""
    absa = np.abs(tableau.a).astype(float)
    row_sum = kappa * dt * np.max(np.sum(absa, axis=1))
    if row_sum >= 1.0:
        raise BoundHypothesisError(
            f"kappa dt max_i sum_j |a_ij| = {row_sum:.3e} >= 1; "
            "D may not be inverse-nonnegative")
    d = np.eye(tableau.s) - kappa * dt * absa
    dinv = np.linalg.inv(d)
    if np.min(dinv) < -1e-12:
        raise BoundHypothesisError("D^{-1} has negative entries")
    return dinv


def rk_aposteriori_bound(traj, kind, tableau, kappa, model, sub, W=None,
                         opts=SolverOptions(), mode="stagewise") -> BoundReport:
    """Global a posteriori bound for Runge-Kutta schemes.

    Stage velocities are recomputed deterministically from the stored ROM
    states.  Galerkin uses the orthogonal projector on every stage; LSPG
    uses the per-stage oblique projector; mode='general' adds the
    cross-stage coupling term (zero for explicit/DIRK tableaus).
    """
    if kind not in ("galerkin", "lspg"):
        raise ValueError(f"unknown ROM kind {kind!r}")
    dt = traj.dt
    phi = sub.basis
    x0 = sub.reference
    dinv = _rk_dinv(tableau, kappa, dt)
    s = tableau.s
    # weight of stage i: sum_k |b_k| [D^-1]_{ki}
    wstage = np.abs(tableau.b) @ dinv
    amp = 1.0 + kappa * dt * float(np.sum(wstage))
    tag = classify(tableau).tag

    from .galerkin import make_galerkin_model
    gm = make_galerkin_model(model, sub) if kind == "galerkin" else None

    nsteps = len(traj.states) - 1
    svals = np.zeros(nsteps + 1)
    term0 = np.zeros(nsteps + 1)
    for n in range(1, nsteps + 1):
        y_prev = traj.states[n - 1]
        t_base = (n - 1) * dt
        base_full = reconstruct(sub, y_prev)
        if kind == "galerkin":
            stage_coords, _ = fom.solve_rk_step(gm, y_prev, tableau, dt, opts,
                                                t_base=t_base)
        elif tag == "fully_implicit":
            stage_coords, _ = lspg_mod.solve_lspg_rk_coupled(
                model, sub, W, base_full, t_base, tableau, dt, opts)
        else:
            stage_coords = []
            for i in range(s):
                ctx = lspg_mod.RkStageContext(
                    base_full=base_full, t_base=t_base, dt=dt,
                    tableau=tableau, i=i,
                    prev_stage_coords=tuple(stage_coords))
                yi, _ = lspg_mod.solve_lspg_rk_stage(model, sub, W, ctx, opts)
                stage_coords.append(yi)

        sn = 0.0
        args, times = [], []
        for i in range(s):
            arg = base_full + dt * phi @ (tableau.a[i] @ np.asarray(stage_coords))
            ti = t_base + tableau.c[i] * dt
            args.append(arg)
            times.append(ti)
        for i in range(s):
            fval = model.velocity(args[i], times[i])
            if kind == "galerkin":
                term = np.linalg.norm(fval - phi @ (phi.T @ fval))
            else:
                jf = model.jacobian(args[i], times[i])
                psi_ii = W.gram_mat(
                    (np.eye(model.dim) - dt * tableau.a[i, i] * jf) @ phi)
                proj = _oblique_projector(sub, psi_ii)
                term = np.linalg.norm(fval - proj @ fval)
                if mode == "general":
                    coupling = np.zeros(sub.p)
                    for e in range(s):
                        if e == i or tableau.a[i, e] == 0.0:
                            continue
                        psi_ie = W.gram_mat(-dt * tableau.a[i, e] * (jf @ phi))
                        mismatch = (phi @ stage_coords[e]
                                    - model.velocity(args[e], times[e]))
                        coupling += psi_ie.T @ mismatch
                    m = psi_ii.T @ phi
                    term += np.linalg.norm(phi @ np.linalg.solve(m, coupling))
            sn += wstage[i] * term
            if i == 0:
                term0[n] = term
        svals[n] = sn

    bounds = np.zeros(nsteps + 1)
    for n in range(1, nsteps + 1):
        bounds[n] = amp * bounds[n - 1] + dt * svals[n]
    return BoundReport(mode=f"rk_aposteriori_{mode}", kind=kind,
                       per_step_local=dt * svals, per_step_bound=bounds,
                       term_projection=term0,
                       coeff=np.full(nsteps + 1, dt * float(np.sum(wstage))),
                       details={"amplification": amp, "dinv": dinv})


def apriori_bounds_lmm_rk(fom_traj, rom_traj, kind, model, sub, scheme,
                          kappa, W=None, mode="global",
                          epsilon=0.5, opts=SolverOptions()) -> BoundReport:
    """A priori bounds: projection terms evaluated at FOM states.

    For LSPG the projector (and its norm, which enters the h constants) is
    still built from the ROM solution.  mode 'global' runs the recursion;
    'timestep_independent' evaluates the backward-Euler style closed form
    2 (exp(t^n kappa / eps ...) - 1) / kappa * max term.
    """
    if isinstance(scheme, ButcherTableau):
        return _rk_apriori(fom_traj, rom_traj, kind, model, sub, scheme,
                           kappa, W, opts)
    dt = fom_traj.dt
    if abs(dt - rom_traj.dt) > 1e-14:
        raise ValueError("a priori bounds need FOM and ROM at the same dt")
    phi = sub.basis
    lifted = [reconstruct(sub, y) for y in rom_traj.states]
    nsteps = len(rom_traj.states) - 1
    local_terms = []
    for n in range(1, nsteps + 1):
        alpha, beta = scheme.coeffs(n)
        k_eff = len(alpha) - 1
        if kind == "galerkin":
            def deflate(v):
                return v - phi @ (phi.T @ v)
            proj_norm = 1.0
        else:
            hist = tuple(lifted[n - j] for j in range(1, k_eff + 1))
            ctx = fom.LmmStepContext(history=hist, n=n, dt=dt, scheme=scheme)
            psi = lspg_mod.compute_test_basis(
                model, sub, W, ctx, rom_traj.states[n]).matrix
            proj = _oblique_projector(sub, psi)

            def deflate(v, proj=proj):
                return v - proj @ v
            proj_norm = float(np.linalg.norm(proj, 2))
        h = abs(alpha[0]) - abs(beta[0]) * kappa * dt * proj_norm
        if h <= 0.0:
            raise BoundHypothesisError(
                f"a priori time-step condition violated at n={n}")
        terms = np.empty(k_eff + 1)
        for ell in range(k_eff + 1):
            fval = model.velocity(fom_traj.states[n - ell], (n - ell) * dt)
            terms[ell] = np.linalg.norm(deflate(fval))
        gamma1 = np.abs(beta) * dt / h
        gamma2 = (np.abs(alpha[1:])
                  + np.abs(beta[1:]) * kappa * dt * proj_norm) / h
        local_terms.append(LocalStepTerms(
            n=n, h=h, gamma1=gamma1, gamma2=gamma2, terms=terms,
            residual_norm=0.0, proj_norm=proj_norm))

    if mode == "global":
        rep = _propagate(local_terms, "apriori", kind)
        return rep
    if mode == "timestep_independent":
        # backward-Euler style closed form
        if scheme.k != 1:
            raise BoundHypothesisError(
                "timestep_independent a priori form implemented for "
                "single-step schemes only")
        p_star = max(lt.proj_norm for lt in local_terms)
        if kind == "galerkin":
            max_term = max(lt.terms[0] for lt in local_terms)
            scale = 1.0
        else:
            max_term = max(lt.terms[0] for lt in local_terms)
            scale = p_star
        nloc = len(local_terms)
        bounds = np.zeros(nloc + 1)
        for n in range(1, nloc + 1):
            tn = n * dt
            bounds[n] = 2.0 * _expm1_div(tn * scale / epsilon, kappa) \
                / scale * max_term
        rep = _propagate(local_terms, "apriori_timestep_independent", kind)
        rep.per_step_bound = bounds
        return rep
    raise ValueError(f"unknown a priori mode {mode!r}")


def _rk_apriori(fom_traj, rom_traj, kind, model, sub, tableau, kappa, W,
                opts):
    """RK a priori bounds with FOM stage arguments; LSPG (explicit/DIRK)
    uses per-step matrices Dbar with entries scaled by ||P_i^n||_2."""
    dt = fom_traj.dt
    phi = sub.basis
    s = tableau.s
    nsteps = len(fom_traj.states) - 1
    gm_tag = classify(tableau).tag

    svals = np.zeros(nsteps + 1)
    amps = np.ones(nsteps + 1)
    for n in range(1, nsteps + 1):
        base = fom_traj.states[n - 1]
        t_base = (n - 1) * dt
        stage_vals, _ = fom.solve_rk_step(model, base, tableau, dt, opts,
                                          t_base=t_base)
        proj_norms = np.ones(s)
        projs = [None] * s
        if kind == "lspg":
            if gm_tag == "fully_implicit":
                raise BoundHypothesisError(
                    "a priori LSPG RK bound implemented for explicit/DIRK")
            base_rom = reconstruct(sub, rom_traj.states[n - 1])
            stage_coords = []
            for i in range(s):
                ctx = lspg_mod.RkStageContext(
                    base_full=base_rom, t_base=t_base, dt=dt, tableau=tableau,
                    i=i, prev_stage_coords=tuple(stage_coords))
                yi, _ = lspg_mod.solve_lspg_rk_stage(model, sub, W, ctx, opts)
                stage_coords.append(yi)
                arg_rom = base_rom + dt * phi @ (
                    tableau.a[i] @ np.asarray(stage_coords + [np.zeros(sub.p)] *
                                              (s - len(stage_coords))))
                jf = model.jacobian(arg_rom, t_base + tableau.c[i] * dt)
                psi = W.gram_mat(
                    (np.eye(model.dim) - dt * tableau.a[i, i] * jf) @ phi)
                projs[i] = _oblique_projector(sub, psi)
                proj_norms[i] = np.linalg.norm(projs[i], 2)
            absa = np.abs(tableau.a) * proj_norms[None, :]
            row = kappa * dt * np.max(np.sum(absa, axis=1))
            if row >= 1.0:
                raise BoundHypothesisError("Dbar M-matrix condition failed")
            dinv = np.linalg.inv(np.eye(s) - kappa * dt * absa)
        else:
            dinv = _rk_dinv(tableau, kappa, dt)
        if np.min(dinv) < -1e-12:
            raise BoundHypothesisError("Dbar^{-1} has negative entries")
        wstage = np.abs(tableau.b) @ dinv
        amps[n] = 1.0 + kappa * dt * float(np.sum(wstage))

        sn = 0.0
        for i in range(s):
            arg = base + dt * sum(
                tableau.a[i, j] * stage_vals[j] for j in range(s))
            fval = model.velocity(arg, t_base + tableau.c[i] * dt)
            if kind == "galerkin":
                term = np.linalg.norm(fval - phi @ (phi.T @ fval))
            else:
                term = np.linalg.norm(fval - projs[i] @ fval)
            sn += wstage[i] * term
        svals[n] = sn

    # per-step amplification products (a priori Dbar varies with n)
    bounds = np.zeros(nsteps + 1)
    for n in range(1, nsteps + 1):
        bounds[n] = amps[n] * bounds[n - 1] + dt * svals[n]
    return BoundReport(mode="rk_apriori", kind=kind,
                       per_step_local=dt * svals, per_step_bound=bounds,
                       term_projection=np.zeros(nsteps + 1),
                       coeff=np.zeros(nsteps + 1),
                       details={"amplifications": amps})


def write_bound_report_csv(report: BoundReport, path):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("n,term_projection,coeff,local_bound,global_bound\n")
        for n in range(1, len(report.per_step_bound)):
            fh.write(f"{n},{float(report.term_projection[n])!r},"
                     f"{float(report.coeff[n])!r},"
                     f"{float(report.per_step_local[n])!r},"
                     f"{float(report.per_step_bound[n])!r}\n")


def write_auxiliary_report_csv(report: AuxiliaryIncrementReport, path, dt,
                               kappa):
    """Rows j = 1..n; partial_bound is step j's contribution to the
    final-time relative-form bound."""
    n = len(report.mu) - 1
    h = 1.0 - kappa * dt
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("j,mu,mu_bar,f_norm,partial_bound\n")
        for j in range(1, n + 1):
            partial = dt * (1.0 + kappa * dt) * report.mu_bar[j] \
                * report.f_norms[j] / h ** (n - j + 1)
            fh.write(f"{j},{float(report.mu[j])!r},{float(report.mu_bar[j])!r},"
                     f"{float(report.f_norms[j])!r},{float(partial)!r}\n")
