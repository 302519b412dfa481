"""Shared fixtures: the reference parameter set, its derived analysis
artifacts, and a session-wide cache of the long simulation runs.

The simulation scenarios live here because several test modules share
them (classification, monitors, runtime caps, attractor matching, grid
refinement) and each run costs minutes at the production resolution.
Horizons per scenario are calibrated to the measured relaxation rates
near the organizing point (the slow modes decay at ~1e-4..1e-3 per time
unit, so asymptotic labels need horizons well past the default).
"""

from __future__ import annotations

import time
from dataclasses import dataclass, replace

import pytest
from hypothesis import HealthCheck, settings

from musselbed import (
    FieldTrajectory,
    InitialCondition,
    ModelParams,
    SimConfig,
    normal_form_at,
    positive_equilibrium,
    simulate,
    turing_hopf_point,
)
from musselbed.pde_sim import time_step

settings.register_profile(
    "suite", deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("suite")

# Reference parameter set used throughout: r = 1.10, gamma = 4, alpha =
# 0.654, l = 6 (d and tau are placeholders; analyses pin them at the
# organizing point).
REFERENCE = ModelParams(r=1.1, gamma=4.0, alpha=0.654, d=0.05, tau=1.0, l=6.0)


@pytest.fixture(scope="session")
def params() -> ModelParams:
    return REFERENCE


@pytest.fixture(scope="session")
def eq(params):
    return positive_equilibrium(params)


@pytest.fixture(scope="session")
def th(params, eq):
    return turing_hopf_point(params, eq)


@pytest.fixture(scope="session")
def nf(params):
    return normal_form_at(params)


@pytest.fixture(scope="session")
def asys(nf):
    return nf.asys


@dataclass(frozen=True)
class Scenario:
    """One verification run: delay/diffusion offsets from the organizing
    point, a cosine-perturbed initial condition, and run/window settings."""

    tau_eps: float
    d_eps: float
    ic: InitialCondition
    horizon: float
    transient_fraction: float = 0.5
    snapshot_interval: float = 1.0


_MIXED_IC = InitialCondition(c0_m=0.1, c1_m=0.3, k_m=6, c0_a=-0.1, c1_a=-0.3, k_a=6)
_DECAY_IC = InitialCondition(c1_m=0.1, k_m=6, c1_a=-0.1, k_a=6)

SCENARIOS: dict[str, Scenario] = {
    # Region D1 offsets: everything relaxes back to the constant state.
    # The short run checks the t = 3000 deviation bound; the long run
    # reaches the asymptotic label (slow mode ~8.5e-4 per time unit).
    "decay_checkpoint": Scenario(-0.5, 0.01, _DECAY_IC, horizon=3000.0),
    "decay": Scenario(-0.5, 0.01, _DECAY_IC, horizon=7000.0, transient_fraction=0.9),
    # Region D3 offsets: spatial structure dies (~3.5e-4 per time unit),
    # uniform oscillation survives.
    "oscillation": Scenario(
        0.5, -0.0005, _MIXED_IC, horizon=24000.0, transient_fraction=0.9,
        snapshot_interval=4.0,
    ),
    # Region D5 offsets: oscillation dies (~1.9e-3 per time unit), the
    # stationary mode-6 pattern survives.
    "pattern": Scenario(
        0.5, -0.002, _MIXED_IC, horizon=8000.0, transient_fraction=0.75
    ),
    # Region D4 offsets (both attractors stable). Two initial states that
    # differ only in the mean algae level.
    "bistable_high_algae": Scenario(
        0.5, -0.0009,
        InitialCondition(c0_m=0.3, c1_m=0.5, k_m=6, c1_a=-0.5, k_a=6),
        horizon=24000.0, transient_fraction=0.9, snapshot_interval=4.0,
    ),
    "bistable_low_algae": Scenario(
        0.5, -0.0009,
        InitialCondition(c0_m=0.3, c1_m=0.5, k_m=6, c0_a=-0.1, c1_a=-0.5, k_a=6),
        horizon=20000.0, transient_fraction=0.9, snapshot_interval=4.0,
    ),
}


@dataclass(frozen=True)
class ScenarioRun:
    name: str
    scenario: Scenario
    params: ModelParams
    config: SimConfig
    trajectory: FieldTrajectory
    elapsed: float


@pytest.fixture(scope="session")
def run_scenario(params, th):
    """Session-cached scenario runner: run_scenario(name, grid_points=256).

    Each (name, grid_points) pair simulates once per session; wall-clock
    time is recorded for the runtime-budget checks.
    """
    cache: dict[tuple[str, int], ScenarioRun] = {}

    def run(name: str, grid_points: int = 256) -> ScenarioRun:
        key = (name, grid_points)
        if key not in cache:
            sc = SCENARIOS[name]
            p = replace(params, tau=th.tau0 + sc.tau_eps, d=th.d0 + sc.d_eps)
            probe = SimConfig(grid_points=grid_points, horizon=sc.horizon)
            dt, _ = time_step(p, probe)
            cfg = SimConfig(
                grid_points=grid_points,
                horizon=sc.horizon,
                snapshot_stride=max(1, round(sc.snapshot_interval / dt)),
                transient_fraction=sc.transient_fraction,
            )
            start = time.perf_counter()
            tr = simulate(p, sc.ic, cfg)
            elapsed = time.perf_counter() - start
            cache[key] = ScenarioRun(name, sc, p, cfg, tr, elapsed)
        return cache[key]

    return run
