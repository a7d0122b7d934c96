"""Experiment metrics: relative trajectory error, increment projection
error, spectral time scales of generalized coordinates, observed
convergence order, trajectory comparison, and dt-sweep bookkeeping."""

from dataclasses import dataclass

import numpy as np

from .core import TrialSubspace, Trajectory, reconstruct


def trajectory_error(times, values, ref_times, ref_values) -> float:
    """l2 relative error of a scalar output series against a reference
    series, after piecewise-linear interpolation onto the reference grid."""
    times = np.asarray(times, float)
    values = np.asarray(values, float)
    ref_times = np.asarray(ref_times, float)
    ref_values = np.asarray(ref_values, float)
    if times.size == 0 or ref_times.size == 0:
        raise ValueError("empty series")
    interp = np.interp(ref_times, times, values)
    denom = np.linalg.norm(ref_values)
    if denom == 0.0:
        raise ValueError("reference series is identically zero")
    return float(np.linalg.norm(interp - ref_values) / denom)


def relative_increment_projection_error(fom_traj: Trajectory,
                                        sub: TrialSubspace):
    """Per-step ||(I - Phi Phi^T) dx^k|| / ||dx^k|| for FOM increments
    dx^k = x(k dt) - x((k-1) dt).

    Returns (ratios, degenerate_mask, max_ratio); zero increments are
    flagged and excluded from the max.
    """
    states = fom_traj.states
    if len(states) < 2:
        raise ValueError("need at least 2 states")
    phi = sub.basis
    n = len(states) - 1
    ratios = np.zeros(n)
    degenerate = np.zeros(n, dtype=bool)
    for k in range(1, n + 1):
        d = np.asarray(states[k]) - np.asarray(states[k - 1])
        nd = np.linalg.norm(d)
        if nd < 1e-14:
            degenerate[k - 1] = True
            continue
        ratios[k - 1] = np.linalg.norm(d - phi @ (phi.T @ d)) / nd
    valid = ratios[~degenerate]
    max_ratio = float(np.max(valid)) if valid.size else 0.0
    return ratios, degenerate, max_ratio


@dataclass
class SpectralReport:
    frequencies: np.ndarray  # positive-frequency grid (bin 0 excluded)
    psd: np.ndarray          # n_freq x p, each column sums to 1
    tau95: np.ndarray        # per-mode 1/f95; NaN when power is zero
    bin_width: float


def spectral_analysis(coords, dt) -> SpectralReport:
    """Periodogram PSD per generalized coordinate (mean removed, single
    taper, energy-normalized) and the per-mode time scale tau95 = 1/f95,
    f95 the smallest grid frequency with >= 95% cumulative energy."""
    coords = np.asarray(coords, float)
    if coords.ndim == 1:
        coords = coords[:, None]
    n, p = coords.shape
    if n < 16:
        raise ValueError("need at least 16 samples")
    freqs = np.fft.rfftfreq(n, d=dt)[1:]
    psd = np.empty((freqs.size, p))
    tau95 = np.empty(p)
    for j in range(p):
        y = coords[:, j] - np.mean(coords[:, j])
        power = np.abs(np.fft.rfft(y)[1:]) ** 2
        total = float(np.sum(power))
        if total < 1e-28:
            psd[:, j] = 0.0
            tau95[j] = np.nan
            continue
        psd[:, j] = power / total
        cum = np.cumsum(psd[:, j])
        i95 = int(np.searchsorted(cum, 0.95))
        tau95[j] = 1.0 / freqs[min(i95, freqs.size - 1)]
    return SpectralReport(frequencies=freqs, psd=psd, tau95=tau95,
                          bin_width=float(freqs[0]))


@dataclass
class RateEstimate:
    order: float
    rates: np.ndarray
    reliable: bool


def richardson_rate(errors, against_reference=True) -> RateEstimate:
    """Observed convergence order from errors under dt halving.

    With a reference solution the rate is log2(e_i / e_{i+1}); without one
    the sequence-difference variant log2((e_i - e_{i+1})/(e_{i+1} - e_{i+2}))
    is used.  Non-monotone sequences flip the reliability flag.
    """
    e = np.asarray(errors, float)
    if e.size < 3:
        raise ValueError("need at least 3 error values")
    if against_reference:
        seq = e
        reliable = bool(np.all(e[:-1] > e[1:]) and np.all(e > 0.0))
    else:
        seq = e[:-1] - e[1:]
        reliable = bool(np.all(seq > 0.0))
    if not reliable:
        seq = np.abs(seq)
        seq[seq == 0.0] = np.finfo(float).tiny
    rates = np.log2(seq[:-1] / seq[1:])
    return RateEstimate(order=float(np.mean(rates)), rates=rates,
                        reliable=reliable)


def compare_trajectories(a: Trajectory, b: Trajectory,
                         lift: TrialSubspace = None) -> float:
    """Max over steps of ||x_a^n - x_b^n||_2; reduced states (dimension p
    of the lift subspace) are reconstructed to full space first."""
    if abs(a.dt - b.dt) > 1e-14 * max(a.dt, b.dt) or \
            len(a.states) != len(b.states):
        raise ValueError("trajectories are on different grids")

    def full(x):
        x = np.asarray(x, float)
        if lift is not None and x.shape[0] == lift.p:
            return reconstruct(lift, x)
        return x

    return max(float(np.linalg.norm(full(xa) - full(xb)))
               for xa, xb in zip(a.states, b.states))


@dataclass
class SweepResult:
    dt: np.ndarray
    error: np.ndarray
    walltime_s: np.ndarray
    bound: np.ndarray  # NaN where no bound was evaluated
    stable: np.ndarray


def write_sweep_csv(sweep: SweepResult, path):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("dt,error,walltime_s,bound,stable\n")
        for i in range(len(sweep.dt)):
            b = "" if np.isnan(sweep.bound[i]) else repr(float(sweep.bound[i]))
            fh.write(f"{float(sweep.dt[i])!r},{float(sweep.error[i])!r},"
                     f"{float(sweep.walltime_s[i])!r},{b},"
                     f"{1 if sweep.stable[i] else 0}\n")


def read_sweep_csv(path) -> SweepResult:
    dts, errs, wts, bounds, stables = [], [], [], [], []
    with open(path, encoding="utf-8") as fh:
        fh.readline()
        for line in fh:
            line = line.strip()
            if not line:
                continue
            dt, err, wt, b, st = line.split(",")
            dts.append(float(dt))
            errs.append(float(err))
            wts.append(float(wt))
            bounds.append(float(b) if b else np.nan)
            stables.append(bool(int(st)))
    return SweepResult(dt=np.array(dts), error=np.array(errs),
                       walltime_s=np.array(wts), bound=np.array(bounds),
                       stable=np.array(stables))
