"""Config-driven experiment harness.

    morrow <subcommand> [--config PATH] [--out DIR] [--seed U64] [--parallel K]

Subcommands: run | fom | pod | rom | sweep | bounds | spectral | verify.
Configs are INI files (see README for the grammar).  Exit codes: 0 success,
1 usage/config error, 2 numerical failure, 3 verification failure.

All artifacts are written deterministically (shortest round-tripping float
representation, LF endings); wall times live in a separate timings.json so
the rest of the output is byte-identical across reruns with the same config
and seed.
"""

import argparse
import configparser
import hashlib
import json
import os
import sys
import time
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import analysis, benchmodels, bounds, fom, galerkin, hyperreduction, \
    lspg, pod
from .core import Model, SolverOptions, TrialSubspace, Trajectory, reconstruct
from .fom import StepSolveError
from .lspg import GaussNewtonError
from .schemes import make_butcher, make_lmm

EXIT_OK, EXIT_USAGE, EXIT_NUMERICAL, EXIT_VERIFY = 0, 1, 2, 3

_LMM_NAMES = ("backward_euler", "forward_euler", "bdf2")


class ConfigError(ValueError):
    pass


def _load_config(path):
    cp = configparser.ConfigParser()
    try:
        with open(path, encoding="utf-8") as fh:
            cp.read_file(fh, source=path)
    except OSError as err:
        raise ConfigError(f"cannot read config: {err}")
    except configparser.Error as err:
        raise ConfigError(f"config parse error: {err}")
    return cp


def _model_from_config(cp, seed):
    sec = cp["model"]
    name = sec.get("name")
    spectrum = sec.get("spectrum")
    spec = benchmodels.BenchmarkSpec(
        name=name,
        n=sec.getint("n", 256),
        viscosity=sec.getfloat("viscosity", 0.005),
        speed=sec.getfloat("speed", 1.0),
        bc=sec.get("bc", "dirichlet0"),
        initial=sec.get("initial", "step"),
        spectrum=None if spectrum is None
        else tuple(float(v) for v in spectrum.split(",")),
        seed=seed)
    builders = {"burgers": benchmodels.burgers1d,
                "advection_diffusion": benchmodels.advection_diffusion,
                "gradient_flow": benchmodels.gradient_flow_spd}
    if name not in builders:
        raise ConfigError(f"unknown model {name!r}")
    return builders[name](spec)


def _scheme_from_config(cp):
    name = cp["time"].get("scheme", "backward_euler")
    if name in _LMM_NAMES:
        return make_lmm(name)
    return make_butcher(name)


def _solver_from_config(cp):
    if not cp.has_section("solver"):
        return SolverOptions()
    sec = cp["solver"]
    return SolverOptions(
        newton_abs_tol=sec.getfloat("newton_abs_tol", 1e-12),
        newton_rel_tol=sec.getfloat("newton_rel_tol", 1e-3),
        max_iters=sec.getint("max_iters", 50),
        fd_step=sec.getfloat("fd_step", 1e-6))


def _sha256(path):
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(65536), b""):
            h.update(chunk)
    return h.hexdigest()


class _Run:
    """Shared state for one invocation: config, output dir, manifest."""

    def __init__(self, args):
        self.args = args
        self.cp = _load_config(args.config) if args.config else None
        self.seed = args.seed if args.seed is not None else (
            self.cp["output"].getint("seed", 0)
            if self.cp and self.cp.has_section("output") else 0)
        out = args.out or (self.cp["output"].get("dir", "out")
                           if self.cp and self.cp.has_section("output")
                           else "out")
        self.out = out
        os.makedirs(out, exist_ok=True)
        self.artifacts = {}
        self.timings = {}
        self.notes = {}

    def path(self, name):
        return os.path.join(self.out, name)

    def record(self, name):
        self.artifacts[name] = _sha256(self.path(name))

    def finalize(self):
        from . import __version__
        manifest = {
            "config": os.path.basename(self.args.config)
            if self.args.config else None,
            "seed": self.seed,
            "version": __version__,
            "artifacts": dict(sorted(self.artifacts.items())),
            "notes": dict(sorted(self.notes.items())),
        }
        with open(self.path("manifest.json"), "w", encoding="utf-8",
                  newline="\n") as fh:
            json.dump(manifest, fh, indent=2, sort_keys=True)
            fh.write("\n")
        with open(self.path("timings.json"), "w", encoding="utf-8",
                  newline="\n") as fh:
            json.dump(self.timings, fh, indent=2, sort_keys=True)
            fh.write("\n")


def _timed(run, key, fn):
    t0 = time.perf_counter()
    result = fn()
    run.timings[key] = time.perf_counter() - t0
    return result


def _is_unstable(traj):
    n0 = np.linalg.norm(np.asarray(traj.states[0], float))
    cap = 1e6 * max(n0, 1.0)
    return any(np.linalg.norm(np.asarray(x, float)) > cap
               for x in traj.states)


def _run_fom(run):
    cp = run.cp
    model = _model_from_config(cp, run.seed)
    scheme = _scheme_from_config(cp)
    dt = cp["time"].getfloat("dt")
    T = cp["time"].getfloat("T")
    opts = _solver_from_config(cp)
    traj = _timed(run, "fom", lambda: fom.integrate(model, scheme, dt, T, opts))
    fom.write_trajectory_csv(traj, run.path("fom_trajectory.csv"))
    run.record("fom_trajectory.csv")
    # initial-condition-centered snapshots for downstream POD
    x0 = np.asarray(traj.states[0], float)
    snaps = np.column_stack([np.asarray(x, float) - x0
                             for x in traj.states[1:]]) \
        if len(traj.states) > 1 else np.zeros((model.dim, 0))
    if snaps.shape[1]:
        pod.write_snapshots_csv(pod.SnapshotSet(vectors=snaps),
                                run.path("snapshots.csv"))
        run.record("snapshots.csv")
    run.notes["fom_unstable"] = _is_unstable(traj)
    return model, traj


def _pod_from_config(run, model, traj):
    cp = run.cp
    x0 = np.asarray(traj.states[0], float)
    snaps = np.column_stack([np.asarray(x, float) - x0
                             for x in traj.states[1:]])
    nu = cp["pod"].getfloat("nu", 1.0 - 1e-6) if cp.has_section("pod") \
        else 1.0 - 1e-6
    result = pod.compute_pod(pod.SnapshotSet(vectors=snaps), nu,
                             reference=x0)
    if cp.has_section("pod") and cp["pod"].get("p") is not None:
        p = cp["pod"].getint("p")
        result = pod.PodResult(
            basis=TrialSubspace(basis=result.basis.basis[:, :p]
                                if p <= result.basis.p else
                                _pod_full(snaps, p, x0),
                                reference=x0),
            singular_values=result.singular_values,
            energy_fractions=result.energy_fractions, nu=nu)
    return result


def _pod_full(snaps, p, x0):
    res = pod.compute_pod(pod.SnapshotSet(vectors=snaps), 1.0, reference=x0)
    return res.basis.basis[:, :p]


def _write_pod(run, result):
    sub = result.basis
    with open(run.path("basis.csv"), "w", encoding="utf-8",
              newline="\n") as fh:
        fh.write(",".join(f"phi_{j}" for j in range(sub.p)) + "\n")
        for row in sub.basis:
            fh.write(",".join(repr(float(v)) for v in row) + "\n")
    run.record("basis.csv")
    with open(run.path("singular_values.csv"), "w", encoding="utf-8",
              newline="\n") as fh:
        fh.write("i,sigma,cumulative_energy\n")
        for i, (s, e) in enumerate(zip(result.singular_values,
                                       result.energy_fractions)):
            fh.write(f"{i},{s!r},{e!r}\n")
    run.record("singular_values.csv")


def _weighting_from_config(run, model, sub, scheme, dt, T, opts):
    cp = run.cp
    kind = cp["rom"].get("kind", "galerkin") if cp.has_section("rom") \
        else "galerkin"
    if kind != "gnat":
        spec = cp["rom"].get("weighting", "identity") \
            if cp.has_section("rom") else "identity"
        if spec == "identity":
            return lspg.scaled_identity(model.dim)
        if spec.startswith("gamma:"):
            return lspg.scaled_identity(model.dim, float(spec[6:]))
        if spec.startswith("collocation:"):
            return lspg.collocation(
                model.dim, hyperreduction.read_sample_set(spec[12:]))
        raise ConfigError(f"unknown weighting {spec!r}")
    # GNAT: residual snapshots from a W=I training run on this config
    nu_r = cp["rom"].getfloat("nu_residual", 1.0)
    snaps = hyperreduction.collect_residual_snapshots(
        model, sub, scheme, dt, T, opts)
    rbasis = hyperreduction.build_residual_basis(snaps, nu_r)
    n_samples = cp["rom"].getint("n_samples", 2 * rbasis.shape[1])
    n_samples = min(max(n_samples, rbasis.shape[1]), model.dim)
    samples = hyperreduction.select_samples(rbasis, n_samples)
    hyperreduction.write_sample_set(samples, run.path("samples.txt"))
    run.record("samples.txt")
    return hyperreduction.gnat_weighting(samples, rbasis)


def _run_rom(run, model, sub, kind=None):
    cp = run.cp
    scheme = _scheme_from_config(cp)
    dt = cp["time"].getfloat("dt")
    T = cp["time"].getfloat("T")
    opts = _solver_from_config(cp)
    kind = kind or (cp["rom"].get("kind", "galerkin")
                    if cp.has_section("rom") else "galerkin")
    if kind == "galerkin":
        traj = _timed(run, "rom", lambda: galerkin.integrate_galerkin(
            model, sub, scheme, dt, T, opts))
        reports = []
    elif kind in ("lspg", "gnat"):
        W = _weighting_from_config(run, model, sub, scheme, dt, T, opts)
        traj, reports = _timed(run, "rom", lambda: lspg.integrate_lspg(
            model, sub, W, scheme, dt, T, opts))
    else:
        raise ConfigError(f"unknown rom kind {kind!r}")
    lifted = Trajectory(dt=traj.dt,
                        states=tuple(reconstruct(sub, y)
                                     for y in traj.states),
                        kind=traj.kind)
    fom.write_trajectory_csv(lifted, run.path("rom_trajectory.csv"))
    run.record("rom_trajectory.csv")
    if reports:
        lspg.write_gn_diagnostics_csv(reports, run.path("gn_diagnostics.csv"))
        run.record("gn_diagnostics.csv")
    run.notes["rom_unstable"] = _is_unstable(lifted)
    return traj, lifted


def _kappa(run, model):
    cp = run.cp
    if cp.has_section("bounds") and cp["bounds"].get("kappa") is not None:
        return cp["bounds"].getfloat("kappa")
    x0 = np.asarray(model.initial_state, float)
    rng = np.random.default_rng(run.seed)
    samples = [x0] + [x0 + 0.1 * rng.standard_normal(model.dim)
                      for _ in range(4)]
    return bounds.estimate_lipschitz(model, samples, [0.0])


def cmd_fom(run):
    _run_fom(run)
    return EXIT_OK


def cmd_pod(run):
    if run.args.snapshots:
        snaps = pod.read_snapshots_csv(run.args.snapshots)
        nu = run.args.nu if run.args.nu is not None else 1.0 - 1e-6
        result = pod.compute_pod(snaps, nu)
    else:
        model, traj = _run_fom(run)
        result = _pod_from_config(run, model, traj)
    _write_pod(run, result)
    return EXIT_OK


def cmd_rom(run):
    model, traj = _run_fom(run)
    result = _pod_from_config(run, model, traj)
    _write_pod(run, result)
    rom_traj, lifted = _run_rom(run, model, result.basis)
    probe = run.cp["output"].getint("probe", 0) \
        if run.cp.has_section("output") else 0
    err = analysis.trajectory_error(
        lifted.times, [x[probe] for x in lifted.states],
        traj.times, [x[probe] for x in traj.states])
    run.notes["probe_error"] = err
    return EXIT_OK


def _sweep_point(run, dt, probe, ref_times, ref_probe, want_bound):
    cp = run.cp
    model = _model_from_config(cp, run.seed)
    scheme = _scheme_from_config(cp)
    T = cp["time"].getfloat("T")
    opts = _solver_from_config(cp)
    kind = cp["rom"].get("kind", "galerkin") if cp.has_section("rom") \
        else "galerkin"
    t0 = time.perf_counter()
    try:
        ref = fom.integrate(model, scheme, dt, T, opts)
        result = _pod_from_config(run, model, ref)
        sub = result.basis
        W = None
        if kind == "galerkin":
            traj = galerkin.integrate_galerkin(model, sub, scheme, dt, T, opts)
        else:
            W = _weighting_from_config(run, model, sub, scheme, dt, T, opts) \
                if kind == "gnat" else lspg.scaled_identity(model.dim)
            traj, _ = lspg.integrate_lspg(model, sub, W, scheme, dt, T, opts)
        lifted_states = [reconstruct(sub, y) for y in traj.states]
        wall = time.perf_counter() - t0
        stable = not any(
            np.linalg.norm(x) > 1e6 * max(np.linalg.norm(lifted_states[0]),
                                          1.0)
            for x in lifted_states)
        err = analysis.trajectory_error(
            traj.times, [x[probe] for x in lifted_states],
            ref_times, ref_probe)
        bval = np.nan
        if want_bound and stable and kind != "gnat":
            try:
                kappa = _kappa(run, model)
                bkind = "galerkin" if kind == "galerkin" else "lspg"
                bw = W if W is not None else lspg.scaled_identity(model.dim)
                lt = bounds.local_aposteriori_lmm(traj, bkind, model, sub,
                                                 scheme, kappa, bw)
                bval = bounds.global_aposteriori_lmm(lt, bkind).global_bound
            except bounds.BoundHypothesisError:
                pass  # dt outside the theorem's cap: no bound, run still valid
        return dt, err, wall, bval, stable
    except (StepSolveError, GaussNewtonError,
            bounds.BoundHypothesisError, FloatingPointError):
        return dt, np.nan, time.perf_counter() - t0, np.nan, False


def cmd_sweep(run):
    cp = run.cp
    if run.args.dt:
        dts = [float(v) for v in run.args.dt.split(",")]
    else:
        dts = [float(v) for v in cp["time"].get("dt_grid").split(",")]
    diffs = np.diff(dts)
    if not (np.all(diffs > 0) or np.all(diffs < 0)):
        raise ConfigError("dt grid must be strictly monotone")
    T_total = cp["time"].getfloat("T")
    for d in dts:
        steps = T_total / d
        if abs(steps - round(steps)) > 1e-9 * max(1.0, abs(steps)):
            raise ConfigError(f"T = {T_total} is not a multiple of dt = {d}")
    if run.args.rom:
        if not cp.has_section("rom"):
            cp.add_section("rom")
        cp["rom"]["kind"] = run.args.rom
    probe = cp["output"].getint("probe", 0) if cp.has_section("output") else 0
    want_bound = cp.has_section("bounds")

    # reference: FOM at the finest dt in the grid
    model = _model_from_config(cp, run.seed)
    scheme = _scheme_from_config(cp)
    T = cp["time"].getfloat("T")
    opts = _solver_from_config(cp)
    ref = fom.integrate(model, scheme, min(dts), T, opts)
    ref_times = ref.times
    ref_probe = [x[probe] for x in ref.states]

    workers = max(1, run.args.parallel)
    with ThreadPoolExecutor(max_workers=workers) as pool:
        rows = list(pool.map(
            lambda dt: _sweep_point(run, dt, probe, ref_times, ref_probe,
                                    want_bound), dts))
    sweep = analysis.SweepResult(
        dt=np.array([r[0] for r in rows]),
        error=np.array([r[1] for r in rows]),
        walltime_s=np.array([r[2] for r in rows]),
        bound=np.array([r[3] for r in rows]),
        stable=np.array([r[4] for r in rows]))
    analysis.write_sweep_csv(sweep, run.path("sweep.csv"))
    # timing-free companion so reruns can be compared byte for byte
    no_time = analysis.SweepResult(dt=sweep.dt, error=sweep.error,
                                   walltime_s=np.zeros_like(sweep.dt),
                                   bound=sweep.bound, stable=sweep.stable)
    analysis.write_sweep_csv(no_time, run.path("sweep_notime.csv"))
    run.record("sweep_notime.csv")
    return EXIT_OK


def cmd_bounds(run):
    cp = run.cp
    model, ref = _run_fom(run)
    result = _pod_from_config(run, model, ref)
    rom_traj, lifted = _run_rom(run, model, result.basis)
    scheme = _scheme_from_config(cp)
    if not hasattr(scheme, "coeffs"):
        raise ConfigError("bound reports require a linear multistep scheme")
    kappa = _kappa(run, model)
    kind = "galerkin" if rom_traj.kind == "galerkin" else "lspg"
    W = lspg.scaled_identity(model.dim)
    lt = bounds.local_aposteriori_lmm(rom_traj, kind, model, result.basis,
                                      scheme, kappa, W)
    rep = bounds.global_aposteriori_lmm(lt, kind)
    bounds.write_bound_report_csv(rep, run.path("bound_report.csv"))
    run.record("bound_report.csv")
    run.notes["kappa"] = kappa
    run.notes["kappa_caveat"] = "valid modulo kappa under-estimation"
    return EXIT_OK


def cmd_spectral(run):
    model, traj = _run_fom(run)
    result = _pod_from_config(run, model, traj)
    sub = result.basis
    x0 = sub.reference
    coords = np.array([sub.basis.T @ (np.asarray(x, float) - x0)
                       for x in traj.states])
    rep = analysis.spectral_analysis(coords, traj.dt)
    with open(run.path("psd.csv"), "w", encoding="utf-8", newline="\n") as fh:
        fh.write("frequency," + ",".join(
            f"mode_{j}" for j in range(rep.psd.shape[1])) + "\n")
        for i, f in enumerate(rep.frequencies):
            fh.write(repr(float(f)) + "," + ",".join(
                repr(float(v)) for v in rep.psd[i]) + "\n")
    run.record("psd.csv")
    with open(run.path("tau95.csv"), "w", encoding="utf-8",
              newline="\n") as fh:
        fh.write("mode,tau95\n")
        for j, tau in enumerate(rep.tau95):
            fh.write(f"{j},{'' if np.isnan(tau) else repr(float(tau))}\n")
    run.record("tau95.csv")
    return EXIT_OK


def cmd_run(run):
    cp = run.cp
    stages = [s.strip() for s in cp["pipeline"].get(
        "stages", "fom,pod,rom").split(",")] if cp.has_section("pipeline") \
        else ["fom", "pod", "rom"]
    handlers = {"fom": cmd_fom, "pod": cmd_pod, "rom": cmd_rom,
                "sweep": cmd_sweep, "bounds": cmd_bounds,
                "spectral": cmd_spectral}
    for stage in stages:
        if stage not in handlers:
            raise ConfigError(f"unknown pipeline stage {stage!r}")
        code = handlers[stage](run)
        if code != EXIT_OK:
            print(f"stage {stage} failed", file=sys.stderr)
            return code
    return EXIT_OK


def _verify_checks(model_name, seed):
    """Equivalence/soundness property rows for the verify subcommand."""
    rows = []
    opts = SolverOptions()
    if model_name == "gradient_flow":
        spec = benchmodels.BenchmarkSpec(name="gradient_flow",
                                         spectrum=tuple(
                                             np.linspace(0.5, 4.0, 12)),
                                         seed=seed)
        model = benchmodels.gradient_flow_spd(spec)
    elif model_name == "burgers":
        model = benchmodels.burgers1d(benchmodels.BenchmarkSpec(
            name="burgers", n=64, seed=seed))
    else:
        model = benchmodels.advection_diffusion(benchmodels.BenchmarkSpec(
            name="advection_diffusion", n=32, viscosity=0.05, seed=seed,
            initial="gaussian"))
    x0 = np.asarray(model.initial_state, float)
    ref = fom.integrate(model, make_lmm("backward_euler"), 1e-2, 0.1, opts)
    snaps = np.column_stack([np.asarray(x) - x0 for x in ref.states[1:]])
    sub = pod.compute_pod(pod.SnapshotSet(vectors=snaps), 1 - 1e-10,
                          reference=x0).basis
    dt, T = 1e-2, 0.1

    # explicit equivalence: Galerkin == LSPG for forward Euler and RK4
    for sch_name, sch in (("forward_euler", make_lmm("forward_euler")),
                          ("rk4", make_butcher("rk4"))):
        w = lspg.scaled_identity(model.dim)
        g = galerkin.integrate_galerkin(model, sub, sch, dt, T, opts)
        l, _ = lspg.integrate_lspg(model, sub, w, sch, dt, T, opts)
        diff = analysis.compare_trajectories(g, l, lift=sub)
        rows.append((f"explicit equivalence ({sch_name})", diff <= 1e-8,
                     f"max diff {diff:.3e}"))

    # dt -> 0 limit: LSPG approaches Galerkin under backward Euler
    diffs = []
    for d in (4e-3, 2e-3, 1e-3):
        g = galerkin.integrate_galerkin(model, sub,
                                        make_lmm("backward_euler"), d,
                                        0.04, opts)
        l, _ = lspg.integrate_lspg(model, sub, lspg.scaled_identity(model.dim),
                                   make_lmm("backward_euler"), d, 0.04, opts)
        diffs.append(analysis.compare_trajectories(g, l, lift=sub))
    rows.append(("limiting equivalence (dt -> 0)",
                 diffs[0] > diffs[1] > diffs[2],
                 "diffs " + ", ".join(f"{d:.3e}" for d in diffs)))

    if model_name == "gradient_flow":
        # SPD weighting: W = Cholesky factor of (I + dt A)^-1
        a = -model.jacobian(x0, 0.0)
        c = np.linalg.cholesky(np.linalg.inv(np.eye(model.dim) + dt * a)).T

        class _CholW:
            dim = model.dim

            def apply(self, v):
                return c @ v

            def apply_mat(self, m):
                return c @ m

            def gram_mat(self, m):
                return c.T @ (c @ m)

        g = galerkin.integrate_galerkin(model, sub,
                                        make_lmm("backward_euler"), dt, T,
                                        opts)
        l, _ = lspg.integrate_lspg(model, sub, _CholW(),
                                   make_lmm("backward_euler"), dt, T, opts)
        diff = analysis.compare_trajectories(g, l, lift=sub)
        rows.append(("SPD-weighted equivalence", diff <= 1e-8,
                     f"max diff {diff:.3e}"))

    # commutativity of projection and discretization
    gm = galerkin.make_galerkin_model(model, sub)
    rng = np.random.default_rng(seed)
    scheme = make_lmm("backward_euler")
    ok = True
    worst = 0.0
    for _ in range(20):
        y = rng.standard_normal(sub.p)
        yh = rng.standard_normal(sub.p)
        ctx_r = fom.LmmStepContext(history=(reconstruct(sub, yh),), n=1,
                                   dt=dt, scheme=scheme)
        ctx_g = fom.LmmStepContext(history=(yh,), n=1, dt=dt, scheme=scheme)
        lhs = fom.lmm_residual(gm, ctx_g, y)
        rhs = sub.basis.T @ fom.lmm_residual(model, ctx_r,
                                             reconstruct(sub, y))
        worst = max(worst, float(np.max(np.abs(lhs - rhs))))
    ok = worst <= 1e-10
    rows.append(("projection/discretization commutativity", ok,
                 f"max residual gap {worst:.3e}"))

    # bound soundness on a linear model
    lin = benchmodels.advection_diffusion(benchmodels.BenchmarkSpec(
        name="advection_diffusion", n=24, viscosity=0.05, seed=seed,
        initial="gaussian"))
    kappa = float(np.linalg.norm(lin.jacobian(lin.initial_state, 0.0), 2))
    dtl = 0.2 / kappa
    refl = fom.integrate(lin, make_lmm("backward_euler"), dtl, 10 * dtl, opts)
    snapsl = np.column_stack([np.asarray(x) - refl.states[0]
                              for x in refl.states[1:]])
    subl = pod.compute_pod(pod.SnapshotSet(vectors=snapsl), 0.95,
                           reference=np.asarray(refl.states[0])).basis
    gl = galerkin.integrate_galerkin(lin, subl, make_lmm("backward_euler"),
                                     dtl, 10 * dtl, opts)
    lt = bounds.local_aposteriori_lmm(gl, "galerkin", lin, subl,
                                      make_lmm("backward_euler"), kappa)
    rep = bounds.global_aposteriori_lmm(lt, "galerkin")
    sound = True
    for n in range(1, len(gl.states)):
        err = np.linalg.norm(np.asarray(refl.states[n])
                             - reconstruct(subl, gl.states[n]))
        if err > rep.per_step_bound[n] * (1 + 1e-9):
            sound = False
    rows.append(("a posteriori bound soundness (linear)", sound,
                 f"final bound {rep.global_bound:.3e}"))
    return rows


def cmd_verify(run):
    model_name = run.args.model or "gradient_flow"
    rows = _verify_checks(model_name, run.seed)
    width = max(len(r[0]) for r in rows)
    all_ok = True
    for name, ok, detail in rows:
        status = "PASS" if ok else "FAIL"
        all_ok &= ok
        print(f"{name.ljust(width)}  {status}  {detail}")
    with open(run.path("verify.txt"), "w", encoding="utf-8",
              newline="\n") as fh:
        for name, ok, detail in rows:
            fh.write(f"{name}\t{'PASS' if ok else 'FAIL'}\t{detail}\n")
    run.record("verify.txt")
    return EXIT_OK if all_ok else EXIT_VERIFY


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="morrow",
        description="model-order-reduction experiment harness")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in ("run", "fom", "pod", "rom", "sweep", "bounds", "spectral",
                 "verify"):
        p = sub.add_parser(name)
        p.add_argument("--config", help="INI experiment config")
        p.add_argument("--out", help="output directory")
        p.add_argument("--seed", type=int, default=None)
        p.add_argument("--parallel", type=int, default=1)
        if name == "pod":
            p.add_argument("--nu", type=float, default=None)
            p.add_argument("--snapshots", help="snapshot CSV path")
        if name == "sweep":
            p.add_argument("--dt", help="comma-separated dt grid")
            p.add_argument("--rom", help="rom kind override")
        if name == "verify":
            p.add_argument("--model", default=None)
    return parser


_NEEDS_CONFIG = {"run", "fom", "rom", "sweep", "bounds", "spectral"}


def main(argv=None):
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as err:
        return EXIT_USAGE if err.code else EXIT_OK
    if args.command in _NEEDS_CONFIG and not args.config:
        print(f"{args.command} requires --config", file=sys.stderr)
        return EXIT_USAGE
    if args.command == "pod" and not args.config and not args.snapshots:
        print("pod requires --config or --snapshots", file=sys.stderr)
        return EXIT_USAGE
    try:
        run = _Run(args)
    except ConfigError as err:
        print(str(err), file=sys.stderr)
        return EXIT_USAGE
    handlers = {"run": cmd_run, "fom": cmd_fom, "pod": cmd_pod,
                "rom": cmd_rom, "sweep": cmd_sweep, "bounds": cmd_bounds,
                "spectral": cmd_spectral, "verify": cmd_verify}
    try:
        code = handlers[args.command](run)
    except ConfigError as err:
        print(str(err), file=sys.stderr)
        code = EXIT_USAGE
    except (StepSolveError, GaussNewtonError,
            bounds.BoundHypothesisError) as err:
        print(f"numerical failure: {err}", file=sys.stderr)
        code = EXIT_NUMERICAL
    finally:
        try:
            run.finalize()
        except OSError:
            pass
    return code


if __name__ == "__main__":
    sys.exit(main())
