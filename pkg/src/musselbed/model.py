"""Parameters, scaling, equilibrium, and admissibility checks for a
delayed mussel-algae reaction-diffusion model.

The dimensionless system on the interval (0, l*pi) with no-flux
(Neumann) boundaries is

    dm/dt         = d * Lap(m) + m(t) * ( r*a(t-tau) - 1/(1 + m(t-tau)) ),
    gamma * da/dt = Lap(a) + alpha*(1 - a) - m(t)*a(t),

where m is the (scaled) mussel biomass, a the (scaled) algae
concentration in the water layer, tau >= 0 a maturation/transport delay,
and (r, gamma, alpha, d, l) positive dimensionless groups.

This module owns:
  * the two parameter records (dimensional and dimensionless),
  * `nondimensionalize` mapping measured coefficients onto the groups,
  * the positive spatially uniform equilibrium and its admissibility
    hypotheses (existence + delay-robust kinetics),
  * strict JSON-dict (de)serialization used by the CLI.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

from .errors import ConfigError, DomainError, HypothesisError, InvariantViolationError

# Rejection band around alpha*r = 1, where the positive equilibrium blows up.
_DEGENERACY_TOL = 1e-10

# Closed-form equilibria must satisfy the steady-state equations to this bound.
_EQ_RESIDUAL_TOL = 1e-12

DIMENSIONLESS_KEYS = ("r", "gamma", "alpha", "d", "tau", "l")
DIMENSIONAL_KEYS = (
    "e",
    "c",
    "d_M",
    "k_M",
    "f",
    "H",
    "A_up",
    "D_M",
    "D_A",
    "tau_dimensional",
    "domain_length",
)


@dataclass(frozen=True)
class DimensionalParams:
    """Measured (dimensional) model coefficients.

    Attributes:
        e: conversion efficiency of consumed algae into mussel biomass.
        c: consumption rate constant of the mussel layer.
        d_M: maximal per-capita mussel mortality rate.
        k_M: saturation biomass of the mussel bed (m-scale).
        f: exchange rate between the lower water layer and the reservoir.
        H: height of the lower water layer.
        A_up: algae concentration in the upper reservoir (a-scale).
        D_M: mussel diffusivity.
        D_A: algae diffusivity.
    """

    e: float
    c: float
    d_M: float
    k_M: float
    f: float
    H: float
    A_up: float
    D_M: float
    D_A: float

    def __post_init__(self) -> None:
        for name, value in asdict(self).items():
            if not math.isfinite(value) or value <= 0.0:
                raise DomainError(
                    f"dimensional coefficient {name} must be finite and > 0, got {value!r}"
                )


@dataclass(frozen=True)
class ModelParams:
    """Dimensionless parameter set (r, gamma, alpha, d, tau, l).

    r: scaled algae renewal (must exceed 1 for a positive equilibrium),
    gamma: ratio of algae-transport to mussel time scales,
    alpha: scaled exchange rate,
    d: mussel-to-algae diffusivity ratio (in gamma-weighted units),
    tau: dimensionless delay,
    l: domain size factor (the habitat is the interval (0, l*pi)).
    """

    r: float
    gamma: float
    alpha: float
    d: float
    tau: float
    l: float

    def __post_init__(self) -> None:
        for name in ("r", "gamma", "alpha", "d", "l"):
            value = getattr(self, name)
            if not math.isfinite(value) or value <= 0.0:
                raise DomainError(f"parameter {name} must be finite and > 0, got {value!r}")
        if not math.isfinite(self.tau) or self.tau < 0.0:
            raise DomainError(f"delay tau must be finite and >= 0, got {self.tau!r}")
        if abs(1.0 - self.alpha * self.r) < _DEGENERACY_TOL:
            raise DomainError(
                "alpha*r is within 1e-10 of 1: the positive equilibrium is "
                "degenerate there; parameters rejected as outside the model's "
                "validity region"
            )


@dataclass(frozen=True)
class Equilibrium:
    """The positive spatially uniform steady state (m_star, a_star)."""

    m_star: float
    a_star: float


@dataclass(frozen=True)
class HypothesisReport:
    """Outcome of the two admissibility hypotheses.

    h1_holds: 0 < alpha < 1 < r < 1/alpha (positive equilibrium exists).
    h2_holds: H0^2 < P0 (kinetics stay stable for all delays at the
        spatially uniform mode in the non-diffusive comparison system);
        None when P0 is singular (r = 1).
    H0_value / P0_value: the two sides' defining quantities,
        H0 = (1 - alpha*r)/(1 - alpha), P0 = r*(1 - alpha)/(gamma*(r - 1)).
    diagnostic: human-readable note for singular/edge cases.
    """

    h1_holds: bool
    h2_holds: bool | None
    H0_value: float
    P0_value: float | None
    diagnostic: str = ""


def nondimensionalize(
    dp: DimensionalParams,
    tau_dimensional: float,
    domain_length: float,
) -> tuple[ModelParams, dict]:
    """Map dimensional coefficients onto the dimensionless groups.

    Scales: biomass by k_M, algae by A_up, time by 1/d_M, space by
    sqrt(D_A/omega) with omega = c*k_M/H the algae uptake rate per unit
    water column. The groups then read

        r = e*c*A_up/d_M,  gamma = d_M/omega,  alpha = f/omega,
        d = D_M/(gamma*D_A),  tau = d_M*tau_dimensional,
        l = domain_length/(pi*sqrt(D_A/omega)).

    Args:
        dp: measured coefficients.
        tau_dimensional: physical delay (time units), >= 0.
        domain_length: physical habitat length (space units), > 0.

    Returns:
        (params, scale_report) where scale_report holds the named scale
        factors {"m_scale", "a_scale", "time_scale", "space_scale",
        "omega"} needed to undo the scaling.
    """
    if not math.isfinite(tau_dimensional) or tau_dimensional < 0.0:
        raise DomainError(f"tau_dimensional must be finite and >= 0, got {tau_dimensional!r}")
    if not math.isfinite(domain_length) or domain_length <= 0.0:
        raise DomainError(f"domain_length must be finite and > 0, got {domain_length!r}")

    omega = dp.c * dp.k_M / dp.H
    space_scale = math.sqrt(dp.D_A / omega)
    params = ModelParams(
        r=dp.e * dp.c * dp.A_up / dp.d_M,
        gamma=dp.d_M / omega,
        alpha=dp.f / omega,
        d=dp.D_M / ((dp.d_M / omega) * dp.D_A),
        tau=dp.d_M * tau_dimensional,
        l=domain_length / (math.pi * space_scale),
    )
    scale_report = {
        "m_scale": dp.k_M,
        "a_scale": dp.A_up,
        "time_scale": 1.0 / dp.d_M,
        "space_scale": space_scale,
        "omega": omega,
    }
    return params, scale_report


def hypotheses(p: ModelParams) -> HypothesisReport:
    """Evaluate both admissibility hypotheses at the given parameters.

    Never raises on hypothesis failure: this is the reporting op that
    gates everything else. Singular edge r = 1 reports h2 as undefined.
    """
    alpha, r, gamma = p.alpha, p.r, p.gamma
    h1 = 0.0 < alpha < 1.0 < r and alpha * r < 1.0

    if abs(1.0 - alpha) < 1e-14:
        h0 = math.inf
        diagnostic = "H0 singular at alpha = 1"
    else:
        h0 = (1.0 - alpha * r) / (1.0 - alpha)
        diagnostic = ""

    if abs(r - 1.0) < 1e-12:
        return HypothesisReport(
            h1_holds=h1,
            h2_holds=None,
            H0_value=h0,
            P0_value=None,
            diagnostic=(diagnostic + "; " if diagnostic else "") + "P0 undefined at r = 1",
        )

    p0 = r * (1.0 - alpha) / (gamma * (r - 1.0))
    return HypothesisReport(
        h1_holds=h1,
        h2_holds=bool(h0 * h0 < p0),
        H0_value=h0,
        P0_value=p0,
        diagnostic=diagnostic,
    )


def require_hypotheses(p: ModelParams, *, need_h2: bool = True) -> HypothesisReport:
    """Raise HypothesisError unless (H1) — and by default (H2) — hold."""
    report = hypotheses(p)
    if not report.h1_holds:
        raise HypothesisError(
            "existence hypothesis fails: need 0 < alpha < 1 < r < 1/alpha, "
            f"got alpha={p.alpha}, r={p.r}"
        )
    if need_h2 and report.h2_holds is not True:
        raise HypothesisError(
            "delay-robustness hypothesis fails: need H0^2 < P0, got "
            f"H0^2={report.H0_value**2}, P0={report.P0_value}"
        )
    return report


def positive_equilibrium(p: ModelParams) -> Equilibrium:
    """Closed-form positive spatially uniform steady state.

    m_star = alpha*(r - 1)/(1 - alpha*r),
    a_star = (1 - alpha*r)/(r*(1 - alpha)),
    valid under the existence hypothesis; both components are positive
    there and satisfy the steady-state equations to ~1e-12.
    """
    require_hypotheses(p, need_h2=False)
    alpha, r = p.alpha, p.r
    m_star = alpha * (r - 1.0) / (1.0 - alpha * r)
    a_star = (1.0 - alpha * r) / (r * (1.0 - alpha))
    eq = Equilibrium(m_star=m_star, a_star=a_star)

    res_m = abs(m_star * (r * a_star - 1.0 / (1.0 + m_star)))
    res_a = abs(alpha * (1.0 - a_star) - m_star * a_star)
    scale = max(1.0, m_star, a_star)
    if res_m > _EQ_RESIDUAL_TOL * scale or res_a > _EQ_RESIDUAL_TOL * scale:
        raise InvariantViolationError(
            f"equilibrium closed form violated steady-state residuals: {res_m}, {res_a}"
        )
    return eq


def params_to_dict(p: ModelParams) -> dict:
    """Plain-dict form with exactly the six dimensionless keys."""
    return {k: getattr(p, k) for k in DIMENSIONLESS_KEYS}


def params_from_dict(data: dict) -> tuple[ModelParams, dict | None]:
    """Strictly parse a parameter dict in either interface mode.

    Dimensionless mode: exactly the keys {r, gamma, alpha, d, tau, l}.
    Dimensional mode: exactly the nine coefficient keys plus
    tau_dimensional and domain_length; values are scaled via
    `nondimensionalize` and the scale report is returned alongside.

    Unknown keys, missing keys, and non-numeric values raise ConfigError.
    """
    if not isinstance(data, dict):
        raise ConfigError(f"parameter block must be a JSON object, got {type(data).__name__}")
    keys = set(data)
    for key, value in data.items():
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ConfigError(f"parameter {key!r} must be a number, got {value!r}")

    if keys == set(DIMENSIONLESS_KEYS):
        try:
            return ModelParams(**{k: float(data[k]) for k in DIMENSIONLESS_KEYS}), None
        except DomainError as exc:
            raise ConfigError(str(exc)) from exc
    if keys == set(DIMENSIONAL_KEYS):
        try:
            dp = DimensionalParams(
                **{k: float(data[k]) for k in DIMENSIONAL_KEYS[:9]}
            )
            params, scales = nondimensionalize(
                dp,
                tau_dimensional=float(data["tau_dimensional"]),
                domain_length=float(data["domain_length"]),
            )
        except DomainError as exc:
            raise ConfigError(str(exc)) from exc
        return params, scales

    dimless, dimful = set(DIMENSIONLESS_KEYS), set(DIMENSIONAL_KEYS)
    if keys <= dimless:
        missing = sorted(dimless - keys)
        raise ConfigError(f"missing dimensionless parameter keys: {missing}")
    if keys <= dimful:
        missing = sorted(dimful - keys)
        raise ConfigError(f"missing dimensional parameter keys: {missing}")
    unknown = sorted(keys - dimless - dimful)
    raise ConfigError(
        "parameter block must use exactly the dimensionless keys "
        f"{sorted(dimless)} or the dimensional keys {sorted(dimful)}; "
        f"unrecognized: {unknown if unknown else sorted(keys)}"
    )
