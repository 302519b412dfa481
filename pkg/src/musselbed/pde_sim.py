"""Direct simulation of the delayed reaction-diffusion system on (0, l*pi)
with no-flux boundaries, plus asymptotic pattern classification.

Method of lines: N grid nodes including both endpoints, second-order
central differences with mirror ghost points (sampled cosine modes are
exact eigenvectors of the discrete Laplacian), classical fixed-step
4th-order time stepping. The delay is handled by choosing dt = tau/K for
integer K, so delayed values at full steps come straight from a ring
buffer of the last K+1 states; half-step stage values use linear
interpolation between adjacent buffered steps. History over [-tau, 0] is
the constant extension of the initial profile.

Positivity of both fields and the invariant-region bound on a (at most
max(sup a0, 1), up to discretization noise) are monitored every step;
losing them beyond tolerance aborts the run with a diagnostic, which in
practice signals a violated time-step bound.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping

import numpy as np
import scipy.fft

from .errors import DomainError, SimulationUnstableError
from .model import Equilibrium, ModelParams, positive_equilibrium, require_hypotheses

__all__ = [
    "SimConfig",
    "InitialCondition",
    "RunningMonitors",
    "FieldTrajectory",
    "PatternClass",
    "MonitorReport",
    "PATTERN_LABELS",
    "grid",
    "time_step",
    "simulate",
    "classify_pattern",
    "monitor_wellposedness",
]

PATTERN_LABELS = (
    "HomogeneousSteady",
    "HomogeneousPeriodic",
    "InhomogeneousSteady",
    "InhomogeneousPeriodic",
    "Undetermined",
)

# Fields may dip this far below zero before the run is considered
# numerically unstable (well beyond the 1e-9 discretization allowance).
_ABORT_NEGATIVE = -1e-6
# Hard blow-up guard.
_ABORT_MAGNITUDE = 1e9


@dataclass(frozen=True)
class SimConfig:
    """Simulation and classification settings.

    dt is derived, not configured: dt = tau/K with K the smallest integer
    satisfying the explicit diffusion bound
    dt <= dt_factor * 0.8*h^2/(2*max(d, 1/gamma)), h = l*pi/grid_points
    (tau = 0 uses the bound directly). dt_factor = 1 honors the bound;
    values above 1 deliberately break it (for instability tests).
    snapshot_stride = None records roughly once per model-time unit.
    Classifier tolerances are relative to the equilibrium scale m*.
    """

    grid_points: int = 256
    horizon: float = 3000.0
    snapshot_stride: int | None = None
    transient_fraction: float = 0.5
    spatial_tol: float = 1e-3
    temporal_tol: float = 1e-3
    dt_factor: float = 1.0

    def __post_init__(self) -> None:
        if self.grid_points < 8:
            raise DomainError(f"grid_points must be at least 8, got {self.grid_points}")
        if self.horizon <= 0.0:
            raise DomainError(f"horizon must be positive, got {self.horizon}")
        if self.snapshot_stride is not None and self.snapshot_stride < 1:
            raise DomainError("snapshot_stride must be a positive integer or None")
        if not 0.0 < self.transient_fraction < 1.0:
            raise DomainError("transient_fraction must lie strictly between 0 and 1")
        if self.spatial_tol <= 0.0 or self.temporal_tol <= 0.0:
            raise DomainError("classifier tolerances must be positive")
        if self.dt_factor <= 0.0:
            raise DomainError("dt_factor must be positive")


@dataclass(frozen=True)
class InitialCondition:
    """Cosine-perturbed initial profiles, held constant over the history
    window t in [-tau, 0]:

        m0(x) = m* + c0_m + c1_m * cos(k_m * x / l),
        a0(x) = a* + c0_a + c1_a * cos(k_a * x / l).

    Both profiles must be nonnegative on the grid (checked at simulation
    setup).
    """

    c0_m: float = 0.0
    c1_m: float = 0.0
    k_m: int = 0
    c0_a: float = 0.0
    c1_a: float = 0.0
    k_a: int = 0

    def profiles(
        self, p: ModelParams, eq: Equilibrium, x: np.ndarray
    ) -> tuple[np.ndarray, np.ndarray]:
        m0 = eq.m_star + self.c0_m + self.c1_m * np.cos(self.k_m * x / p.l)
        a0 = eq.a_star + self.c0_a + self.c1_a * np.cos(self.k_a * x / p.l)
        return m0, a0


@dataclass
class RunningMonitors:
    """Worst-case field values seen at any time step (not just snapshots)."""

    min_m: float = math.inf
    min_a: float = math.inf
    max_m: float = -math.inf
    max_a: float = -math.inf

    def update(self, m: np.ndarray, a: np.ndarray) -> None:
        self.min_m = min(self.min_m, float(m.min()))
        self.min_a = min(self.min_a, float(a.min()))
        self.max_m = max(self.max_m, float(m.max()))
        self.max_a = max(self.max_a, float(a.max()))


@dataclass(frozen=True)
class FieldTrajectory:
    """Snapshots of a simulation run plus every-step extreme-value monitors.

    m and a have shape (snapshots, grid_points); `a_bound` is the
    invariant-region cap max(sup a0, 1) recorded at setup.
    """

    params: ModelParams
    config: SimConfig
    eq: Equilibrium
    x: np.ndarray
    t: np.ndarray
    m: np.ndarray
    a: np.ndarray
    dt: float
    delay_steps: int
    a_bound: float
    monitors: RunningMonitors

    def sup_deviation_m(self) -> np.ndarray:
        """Per-snapshot sup-norm deviation of m from the equilibrium."""
        return np.abs(self.m - self.eq.m_star).max(axis=1)

    def sup_deviation_a(self) -> np.ndarray:
        return np.abs(self.a - self.eq.a_star).max(axis=1)

    def spatial_mean_m(self) -> np.ndarray:
        return self.m.mean(axis=1)


@dataclass(frozen=True)
class PatternClass:
    """Asymptotic pattern classification over the trailing window.

    Amplitudes are relative to the equilibrium scale m*: `oscillation`
    is the half peak-to-peak range of the spatial mean of m;
    `inhomogeneity` is the time-averaged spatial max-min range.
    `dominant_mode` is the strongest cosine mode of the time-averaged
    profile (0 for spatially homogeneous outcomes). `period` is the
    measured oscillation period (None when not oscillating).
    """

    label: str
    dominant_mode: int
    oscillation: float
    inhomogeneity: float
    drift: float
    period: float | None


@dataclass(frozen=True)
class MonitorReport:
    """Worst-case wellposedness violations across a run."""

    min_m: float
    min_a: float
    max_a: float
    a_bound: float
    positivity_ok: bool
    a_bound_ok: bool

    @property
    def ok(self) -> bool:
        return self.positivity_ok and self.a_bound_ok


def grid(p: ModelParams, n_points: int) -> np.ndarray:
    """Simulation grid: n_points nodes on [0, l*pi] including endpoints."""
    return np.linspace(0.0, p.l * math.pi, n_points)


def time_step(p: ModelParams, cfg: SimConfig) -> tuple[float, int]:
    """Derived (dt, delay_steps): dt = tau/K under the diffusion bound, or
    the bound itself (adjusted to land exactly on the horizon) if tau = 0."""
    h_bound = p.l * math.pi / cfg.grid_points
    dt_max = cfg.dt_factor * 0.8 * h_bound**2 / (2.0 * max(p.d, 1.0 / p.gamma))
    if p.tau == 0.0:
        steps = max(1, int(math.ceil(cfg.horizon / dt_max)))
        return cfg.horizon / steps, 0
    k = max(1, int(math.ceil(p.tau / dt_max)))
    return p.tau / k, k


def _laplacian(u: np.ndarray, h: float) -> np.ndarray:
    """Second-order Laplacian with mirror ghost points (no-flux ends)."""
    out = np.empty_like(u)
    out[1:-1] = u[:-2] - 2.0 * u[1:-1] + u[2:]
    out[0] = 2.0 * (u[1] - u[0])
    out[-1] = 2.0 * (u[-2] - u[-1])
    out /= h * h
    return out


def simulate(p: ModelParams, ic: InitialCondition, cfg: SimConfig) -> FieldTrajectory:
    """Run the delayed reaction-diffusion system from a constant-history
    initial condition.

    Aborts with a diagnostic if any field goes non-finite, dips below
    -1e-6, or blows past 1e9 — symptoms of a violated step-size bound.
    """
    require_hypotheses(p, need_h2=False)
    eq = positive_equilibrium(p)
    n = cfg.grid_points
    x = grid(p, n)
    h = x[1] - x[0]
    m0, a0 = ic.profiles(p, eq, x)
    if float(m0.min()) < 0.0 or float(a0.min()) < 0.0:
        raise DomainError(
            "initial profiles must be nonnegative: "
            f"min m0 = {m0.min()}, min a0 = {a0.min()}"
        )
    a_bound = max(float(a0.max()), 1.0)

    dt, k_delay = time_step(p, cfg)
    n_steps = max(1, int(math.ceil(cfg.horizon / dt - 1e-12)))
    stride = cfg.snapshot_stride or max(1, round(1.0 / dt))

    r, gamma, alpha, d = p.r, p.gamma, p.alpha, p.d

    def rhs(state: np.ndarray, delayed: np.ndarray) -> np.ndarray:
        m, a = state
        m_tau, a_tau = delayed
        out = np.empty_like(state)
        out[0] = d * _laplacian(m, h) + m * (r * a_tau - 1.0 / (1.0 + m_tau))
        out[1] = (_laplacian(a, h) + alpha * (1.0 - a) - m * a) / gamma
        return out

    state = np.stack([m0, a0])
    monitors = RunningMonitors()
    monitors.update(state[0], state[1])

    # Ring buffer of the last k_delay+1 states; constant history prefill.
    if k_delay > 0:
        ring = np.repeat(state[None, :, :], k_delay + 1, axis=0)
        size = k_delay + 1
    else:
        ring = None
        size = 0

    snap_t = [0.0]
    snap_m = [state[0].copy()]
    snap_a = [state[1].copy()]

    for step in range(n_steps):
        if ring is not None:
            # state at t - tau is k_delay steps back: slot (step+1) mod size;
            # the following step's lag lives one slot further along
            lag0 = ring[(step + 1) % size]
            lag1 = ring[(step + 2) % size]
            lag_half = 0.5 * (lag0 + lag1)
            k1 = rhs(state, lag0)
            k2 = rhs(state + 0.5 * dt * k1, lag_half)
            k3 = rhs(state + 0.5 * dt * k2, lag_half)
            k4 = rhs(state + dt * k3, lag1)
        else:
            k1 = rhs(state, state)
            s2 = state + 0.5 * dt * k1
            k2 = rhs(s2, s2)
            s3 = state + 0.5 * dt * k2
            k3 = rhs(s3, s3)
            s4 = state + dt * k3
            k4 = rhs(s4, s4)
        state = state + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        if ring is not None:
            ring[(step + 1) % size] = state

        lo = float(state.min())
        hi = float(state.max())
        if not math.isfinite(lo) or not math.isfinite(hi) or lo < _ABORT_NEGATIVE or hi > _ABORT_MAGNITUDE:
            raise SimulationUnstableError(
                f"field left the admissible range at t = {(step + 1) * dt:.6g} "
                f"(min = {lo}, max = {hi}); the time step likely violates the "
                "stability bound",
                report={
                    "t": (step + 1) * dt,
                    "min": lo,
                    "max": hi,
                    "dt": dt,
                    "dt_factor": cfg.dt_factor,
                },
            )
        monitors.update(state[0], state[1])
        if (step + 1) % stride == 0 or step + 1 == n_steps:
            snap_t.append((step + 1) * dt)
            snap_m.append(state[0].copy())
            snap_a.append(state[1].copy())

    return FieldTrajectory(
        params=p,
        config=cfg,
        eq=eq,
        x=x,
        t=np.array(snap_t),
        m=np.array(snap_m),
        a=np.array(snap_a),
        dt=dt,
        delay_steps=k_delay,
        a_bound=a_bound,
        monitors=monitors,
    )


def _estimate_period(t: np.ndarray, series: np.ndarray) -> float | None:
    """Oscillation period from upward mean-crossings (linear-interpolated)."""
    level = float(series.mean())
    above = series > level
    idx = np.nonzero(~above[:-1] & above[1:])[0]
    if len(idx) < 2:
        return None
    crossings = []
    for i in idx:
        y0, y1 = series[i] - level, series[i + 1] - level
        frac = y0 / (y0 - y1)
        crossings.append(t[i] + frac * (t[i + 1] - t[i]))
    return float((crossings[-1] - crossings[0]) / (len(crossings) - 1))


def classify_pattern(
    tr: FieldTrajectory, cfg: SimConfig, omega0: float | None = None
) -> PatternClass:
    """Classify the asymptotic pattern over the trailing window.

    The window is the trailing (1 - transient_fraction) of the run. The
    spatial mean of m gives the temporal-oscillation amplitude and the
    spatial max-min range gives the inhomogeneity measure, both relative
    to m*. Half-window means drifting by more than 10% (relative to m*)
    mean the transient has not settled: Undetermined. When omega0 is
    supplied, the run must cover at least 10 periods 2*pi/omega0.
    """
    t_end = float(tr.t[-1])
    window_start = t_end * cfg.transient_fraction
    if t_end <= 2.0 * (t_end - window_start) - 1e-9:
        raise DomainError("trajectory shorter than twice the trailing window")
    if omega0 is not None and t_end < 10.0 * (2.0 * math.pi / omega0):
        raise DomainError(
            f"horizon {t_end} covers fewer than 10 oscillation periods "
            f"{2.0 * math.pi / omega0:.3g}"
        )
    sel = tr.t >= window_start
    if int(sel.sum()) < 8:
        raise DomainError("too few snapshots in the trailing window")
    t_w = tr.t[sel]
    m_w = tr.m[sel]
    m_star = tr.eq.m_star

    mean_series = m_w.mean(axis=1)
    range_series = m_w.max(axis=1) - m_w.min(axis=1)
    oscillation = float(mean_series.max() - mean_series.min()) / 2.0 / m_star
    inhomogeneity = float(range_series.mean()) / m_star

    half = len(t_w) // 2
    drift = max(
        abs(float(mean_series[half:].mean() - mean_series[:half].mean())),
        abs(float(range_series[half:].mean() - range_series[:half].mean())),
    ) / m_star

    profile = m_w.mean(axis=0)
    # DCT-I: node x_j = j*l*pi/(N-1) makes cosine mode n exactly
    # coefficient index n.
    coeffs = scipy.fft.dct(profile, type=1)
    dominant = int(np.argmax(np.abs(coeffs[1:]))) + 1 if len(coeffs) > 1 else 0

    oscillating = oscillation >= cfg.temporal_tol
    patterned = inhomogeneity >= cfg.spatial_tol
    if drift > 0.10:
        label = "Undetermined"
    elif oscillating and patterned:
        label = "InhomogeneousPeriodic"
    elif oscillating:
        label = "HomogeneousPeriodic"
    elif patterned:
        label = "InhomogeneousSteady"
    else:
        label = "HomogeneousSteady"

    return PatternClass(
        label=label,
        dominant_mode=dominant if patterned else 0,
        oscillation=oscillation,
        inhomogeneity=inhomogeneity,
        drift=drift,
        period=_estimate_period(t_w, mean_series) if oscillating else None,
    )


def monitor_wellposedness(tr: FieldTrajectory) -> MonitorReport:
    """Worst-case positivity and invariant-bound report for a run.

    Positivity allows discretization noise to -1e-9; the a-field cap
    max(sup a0, 1) allows +1e-6.
    """
    mon = tr.monitors
    return MonitorReport(
        min_m=mon.min_m,
        min_a=mon.min_a,
        max_a=mon.max_a,
        a_bound=tr.a_bound,
        positivity_ok=min(mon.min_m, mon.min_a) >= -1e-9,
        a_bound_ok=mon.max_a <= tr.a_bound + 1e-6,
    )
