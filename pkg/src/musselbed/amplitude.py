"""Planar amplitude system at the codimension-two point: equilibria with
stability, bifurcation lines, parameter-plane region classification, and
trajectory integration.

The reduced dynamics near the critical point live on the half-plane
(rho >= 0, eta), with rho the Hopf oscillation amplitude and eta the
amplitude of the critical spatial cosine mode:

    d(rho)/dt~ = rho * (eps1 + rho^2 + b*eta^2),
    d(eta)/dt~ = eta * (eps2 + c*rho^2 + d_hat*eta^2),

where t~ = t/epsilon. All stability tags, region narratives, and the
`integrate` op work in *forward* time: with epsilon = -1 the t~-flow is
reversed before anything is reported. (The clock is the reduction's
delay-rescaled one — one time unit here spans tau0 simulation time
units — with the same orientation as simulation time.)

Equilibria: E1 = (0, 0) always; E2 = (sqrt(-eps1), 0) iff eps1 < 0;
E3+- = (0, +-sqrt(-eps2/d_hat)) iff eps2*d_hat < 0; E4+- with both
closed-form radicals iff both radicands are positive. eta -> -eta symmetry
pairs E3 and E4; classification quotients by it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterator

import numpy as np

from .errors import (
    AnalysisError,
    DegenerateNormalFormError,
    DomainError,
    InvariantViolationError,
)
from .normal_form import AmplitudeSystem

__all__ = [
    "REGION_NAMES",
    "LINE_NAMES",
    "AmplitudeEquilibrium",
    "AmplitudeEquilibria",
    "BifurcationLine",
    "RegionLabel",
    "AmplitudeTrajectory",
    "unfolding_case",
    "equilibria",
    "bifurcation_lines",
    "classify_region",
    "integrate",
]

REGION_NAMES = ("D1", "D2", "D3", "D4", "D5", "D6")
LINE_NAMES = ("L1", "L2", "T1", "T2")

# Radicand magnitudes below this count as "on a bifurcation boundary".
_RADICAND_TOL = 1e-14
# Normalized (scale-invariant) distance below which a parameter point is
# reported as lying on a bifurcation line rather than in a region.
_LINE_TOL = 1e-12
# Eigenvalue real parts below this magnitude give a "marginal" tag.
_EIG_TOL = 1e-14


# ---------------------------------------------------------------------------
# vector field


def _forward_field(
    asys: AmplitudeSystem, eps1: float, eps2: float, rho: float, eta: float
) -> tuple[float, float]:
    """Right-hand side in forward time (epsilon folded in)."""
    e = asys.epsilon
    return (
        e * rho * (eps1 + rho * rho + asys.b * eta * eta),
        e * eta * (eps2 + asys.c * rho * rho + asys.d_hat * eta * eta),
    )


def _forward_jacobian(
    asys: AmplitudeSystem, eps1: float, eps2: float, rho: float, eta: float
) -> np.ndarray:
    e = asys.epsilon
    b, c, dh = asys.b, asys.c, asys.d_hat
    return e * np.array(
        [
            [eps1 + 3.0 * rho * rho + b * eta * eta, 2.0 * b * rho * eta],
            [2.0 * c * rho * eta, eps2 + c * rho * rho + 3.0 * dh * eta * eta],
        ]
    )


# ---------------------------------------------------------------------------
# equilibria


@dataclass(frozen=True)
class AmplitudeEquilibrium:
    """One equilibrium of the amplitude system with its forward-time
    eigenvalues and a stability tag from
    {stable node, unstable node, saddle, marginal}."""

    label: str
    rho: float
    eta: float
    eigenvalues: tuple[complex, complex]
    stability: str

    @property
    def state(self) -> tuple[float, float]:
        return (self.rho, self.eta)


@dataclass(frozen=True)
class AmplitudeEquilibria:
    """Equilibrium set at one (tau_eps, d_eps) offset.

    `boundary` lists the equilibrium families whose existence radicand sits
    within tolerance of zero (the offset lies on that family's bifurcation
    boundary); such families are reported as absent but flagged.
    """

    tau_eps: float
    d_eps: float
    eps1: float
    eps2: float
    points: tuple[AmplitudeEquilibrium, ...]
    boundary: tuple[str, ...]

    def __iter__(self) -> Iterator[AmplitudeEquilibrium]:
        return iter(self.points)

    def get(self, label: str) -> AmplitudeEquilibrium | None:
        for pt in self.points:
            if pt.label == label:
                return pt
        return None

    @property
    def E1(self) -> AmplitudeEquilibrium:
        pt = self.get("E1")
        assert pt is not None
        return pt

    @property
    def E2(self) -> AmplitudeEquilibrium | None:
        return self.get("E2")

    @property
    def E3(self) -> tuple[AmplitudeEquilibrium, AmplitudeEquilibrium] | None:
        plus, minus = self.get("E3+"), self.get("E3-")
        if plus is None or minus is None:
            return None
        return (plus, minus)

    @property
    def E4(self) -> tuple[AmplitudeEquilibrium, AmplitudeEquilibrium] | None:
        plus, minus = self.get("E4+"), self.get("E4-")
        if plus is None or minus is None:
            return None
        return (plus, minus)

    def signature(self) -> tuple[tuple[str, str], ...]:
        """(label, stability) pairs quotiented by the eta -> -eta symmetry
        (only the '+' member of each symmetric pair is listed)."""
        return tuple(
            (pt.label.rstrip("+"), pt.stability)
            for pt in self.points
            if not pt.label.endswith("-")
        )


def _stability_tag(eigs: tuple[complex, complex]) -> str:
    re1, re2 = eigs[0].real, eigs[1].real
    if abs(re1) <= _EIG_TOL or abs(re2) <= _EIG_TOL:
        return "marginal"
    if re1 < 0.0 and re2 < 0.0:
        return "stable node"
    if re1 > 0.0 and re2 > 0.0:
        return "unstable node"
    return "saddle"


def _make_point(
    asys: AmplitudeSystem, eps1: float, eps2: float, label: str, rho: float, eta: float
) -> AmplitudeEquilibrium:
    f1, f2 = _forward_field(asys, eps1, eps2, rho, eta)
    if max(abs(f1), abs(f2)) > 1e-12:
        raise InvariantViolationError(
            f"equilibrium {label} at ({rho}, {eta}) leaves residual ({f1}, {f2})"
        )
    eigs = np.linalg.eigvals(_forward_jacobian(asys, eps1, eps2, rho, eta))
    eig_pair = (complex(eigs[0]), complex(eigs[1]))
    return AmplitudeEquilibrium(
        label=label, rho=rho, eta=eta, eigenvalues=eig_pair, stability=_stability_tag(eig_pair)
    )


def equilibria(
    asys: AmplitudeSystem, tau_eps: float, d_eps: float
) -> AmplitudeEquilibria:
    """All equilibria of the amplitude system at the given parameter offset,
    with forward-time stability tags.

    Existence follows the closed forms: E2 iff eps1 < 0, E3 iff
    eps2*d_hat < 0, E4 iff both of (b*eps2 - d_hat*eps1)/(d_hat - b*c)
    and (c*eps1 - eps2)/(d_hat - b*c) are positive. A radicand within
    1e-14 of zero flags that family as on its bifurcation boundary.
    """
    eps1 = asys.eps1_map(tau_eps, d_eps)
    eps2 = asys.eps2_map(tau_eps, d_eps)
    points = [_make_point(asys, eps1, eps2, "E1", 0.0, 0.0)]
    boundary: list[str] = []

    rad2 = -eps1
    if abs(rad2) <= _RADICAND_TOL:
        boundary.append("E2")
    elif rad2 > 0.0:
        points.append(_make_point(asys, eps1, eps2, "E2", math.sqrt(rad2), 0.0))

    rad3 = -eps2 / asys.d_hat
    if abs(rad3) <= _RADICAND_TOL:
        boundary.append("E3")
    elif rad3 > 0.0:
        eta3 = math.sqrt(rad3)
        points.append(_make_point(asys, eps1, eps2, "E3+", 0.0, eta3))
        points.append(_make_point(asys, eps1, eps2, "E3-", 0.0, -eta3))

    denom = asys.d_hat_minus_bc
    rad4_rho = (asys.b * eps2 - asys.d_hat * eps1) / denom
    rad4_eta = (asys.c * eps1 - eps2) / denom
    if min(abs(rad4_rho), abs(rad4_eta)) <= _RADICAND_TOL:
        boundary.append("E4")
    elif rad4_rho > 0.0 and rad4_eta > 0.0:
        rho4, eta4 = math.sqrt(rad4_rho), math.sqrt(rad4_eta)
        points.append(_make_point(asys, eps1, eps2, "E4+", rho4, eta4))
        points.append(_make_point(asys, eps1, eps2, "E4-", rho4, -eta4))

    return AmplitudeEquilibria(
        tau_eps=tau_eps,
        d_eps=d_eps,
        eps1=eps1,
        eps2=eps2,
        points=tuple(points),
        boundary=tuple(boundary),
    )


# ---------------------------------------------------------------------------
# bifurcation lines and region classification


@dataclass(frozen=True)
class BifurcationLine:
    """A bifurcation line through the origin of the (tau_eps, d_eps) plane,
    stored as the kernel of the linear functional
    value(tau_eps, d_eps) = n_tau*tau_eps + n_d*d_eps.

    `slope` reports the line as d_eps = slope * tau_eps; None means the
    vertical line tau_eps = 0.
    """

    name: str
    n_tau: float
    n_d: float
    slope: float | None

    def value(self, tau_eps: float, d_eps: float) -> float:
        return self.n_tau * tau_eps + self.n_d * d_eps

    def normalized_distance(self, tau_eps: float, d_eps: float) -> float:
        """|value| / (||normal|| * ||point||): scale-invariant distance."""
        norm = math.hypot(self.n_tau, self.n_d) * math.hypot(tau_eps, d_eps)
        if norm == 0.0:
            return 0.0
        return abs(self.value(tau_eps, d_eps)) / norm


def _line_from_functional(name: str, n_tau: float, n_d: float) -> BifurcationLine:
    if n_tau == 0.0 and n_d == 0.0:
        raise DegenerateNormalFormError(f"bifurcation line {name} has zero normal")
    slope: float | None
    if n_d == 0.0:
        slope = None
    else:
        slope = -n_tau / n_d + 0.0
    return BifurcationLine(name=name, n_tau=n_tau, n_d=n_d, slope=slope)


def bifurcation_lines(asys: AmplitudeSystem) -> tuple[BifurcationLine, ...]:
    """The four bifurcation lines (L1, L2, T1, T2) through the origin.

    L1/L2 are the kernels of the eps1/eps2 maps (Hopf and pitchfork of the
    trivial equilibrium); T1 = {b*eps2 = d_hat*eps1} and T2 =
    {eps2 = c*eps1} are the secondary pitchfork/Hopf lines where the E4
    radicands change sign.
    """
    e1t, e1d = asys.eps1_map.c_tau, asys.eps1_map.c_d
    e2t, e2d = asys.eps2_map.c_tau, asys.eps2_map.c_d
    det = e1t * e2d - e1d * e2t
    scale = max(abs(e1t), abs(e1d)) * max(abs(e2t), abs(e2d))
    if scale == 0.0 or abs(det) < 1e-12 * scale:
        raise DegenerateNormalFormError(
            "eps1/eps2 maps are parallel or degenerate; bifurcation lines "
            f"are not a transverse arrangement (det = {det})"
        )
    return (
        _line_from_functional("L1", e1t, e1d),
        _line_from_functional("L2", e2t, e2d),
        _line_from_functional(
            "T1", asys.b * e2t - asys.d_hat * e1t, asys.b * e2d - asys.d_hat * e1d
        ),
        _line_from_functional("T2", asys.c * e1t - e2t, asys.c * e1d - e2d),
    )


def unfolding_case(asys: AmplitudeSystem) -> str:
    """Name of the unfolding case by the signs of (b, c, d_hat, d_hat - bc).

    Only the case b > 0, c > 0, d_hat = +1, d_hat - bc < 0 is wired to the
    named region narrative (returned as "Ia"); any other sign pattern is
    returned as the raw signature string.
    """
    if asys.b > 0 and asys.c > 0 and asys.d_hat == 1.0 and asys.d_hat_minus_bc < 0:
        return "Ia"
    return (
        f"b{'+' if asys.b > 0 else '-'}"
        f"c{'+' if asys.c > 0 else '-'}"
        f"d{'+' if asys.d_hat > 0 else '-'}"
        f"k{'+' if asys.d_hat_minus_bc > 0 else '-'}"
    )


@dataclass(frozen=True)
class RegionLabel:
    """Either a region D1..D6 of the parameter plane or, for points within
    tolerance of a bifurcation line, that line's name (L1, L2, T1, T2)."""

    label: str

    @property
    def on_boundary(self) -> bool:
        return self.label in LINE_NAMES


def classify_region(
    asys: AmplitudeSystem, tau_eps: float, d_eps: float
) -> RegionLabel:
    """Region of the (tau_eps, d_eps) plane under the case-Ia narrative.

    The six regions are determined by the signs of eps1, eps2 and the two
    E4 radicand numerators:
      D1: eps1 > 0, eps2 > 0              D2: eps1 < 0, eps2 > 0
      D3: eps1, eps2 < 0, b*eps2 - d_hat*eps1 > 0
      D4: eps1, eps2 < 0, b*eps2 - d_hat*eps1 < 0, c*eps1 - eps2 < 0
      D5: eps1, eps2 < 0, c*eps1 - eps2 > 0
      D6: eps1 > 0, eps2 < 0.
    A point within normalized distance 1e-12 of any of the four lines is
    labeled with the line's name instead (full lines through the origin,
    so a line label can also occur on a ray interior to a region).
    """
    if tau_eps == 0.0 and d_eps == 0.0:
        raise DomainError("the origin of the parameter plane has no region label")
    case = unfolding_case(asys)
    if case != "Ia":
        raise AnalysisError(
            f"region narrative is only wired for unfolding case Ia, got {case}"
        )
    lines = bifurcation_lines(asys)
    for line in lines:
        if line.normalized_distance(tau_eps, d_eps) <= _LINE_TOL:
            return RegionLabel(label=line.name)

    eps1 = asys.eps1_map(tau_eps, d_eps)
    eps2 = asys.eps2_map(tau_eps, d_eps)
    if eps1 > 0.0 and eps2 > 0.0:
        return RegionLabel(label="D1")
    if eps1 < 0.0 and eps2 > 0.0:
        return RegionLabel(label="D2")
    if eps1 > 0.0 and eps2 < 0.0:
        return RegionLabel(label="D6")
    # lower wedge: eps1 < 0 and eps2 < 0
    t1 = asys.b * eps2 - asys.d_hat * eps1
    t2 = asys.c * eps1 - eps2
    if t1 > 0.0:
        return RegionLabel(label="D3")
    if t2 > 0.0:
        return RegionLabel(label="D5")
    return RegionLabel(label="D4")


# ---------------------------------------------------------------------------
# trajectory integration


@dataclass(frozen=True)
class AmplitudeTrajectory:
    """Fixed-step trajectory of the amplitude system in forward time. `diverged` marks a blow-up stop (||state|| > 1e6), expected only
    far outside the local regime."""

    t: np.ndarray
    rho: np.ndarray
    eta: np.ndarray
    diverged: bool

    @property
    def final_state(self) -> tuple[float, float]:
        return (float(self.rho[-1]), float(self.eta[-1]))


def integrate(
    asys: AmplitudeSystem,
    tau_eps: float,
    d_eps: float,
    initial: tuple[float, float],
    horizon: float = 2000.0,
    dt: float = 0.05,
) -> AmplitudeTrajectory:
    """Classical fixed-step 4th-order integration of the amplitude system
    in forward time (the reduction's rescaled clock).

    rho >= 0 is preserved by the field itself (the rho = 0 axis is
    invariant); the initial rho must be nonnegative. Blow-up beyond
    ||state|| > 1e6 stops the run and marks the trajectory diverged.
    """
    rho0, eta0 = float(initial[0]), float(initial[1])
    if rho0 < 0.0:
        raise DomainError(f"initial rho must be nonnegative, got {rho0}")
    if dt <= 0.0 or horizon <= 0.0:
        raise DomainError("horizon and dt must be positive")
    eps1 = asys.eps1_map(tau_eps, d_eps)
    eps2 = asys.eps2_map(tau_eps, d_eps)

    def field(state: np.ndarray) -> np.ndarray:
        return np.array(
            _forward_field(asys, eps1, eps2, float(state[0]), float(state[1]))
        )

    steps = max(1, int(math.ceil(horizon / dt)))
    times = np.empty(steps + 1)
    states = np.empty((steps + 1, 2))
    state = np.array([rho0, eta0])
    times[0] = 0.0
    states[0] = state
    diverged = False
    for k in range(steps):
        k1 = field(state)
        k2 = field(state + 0.5 * dt * k1)
        k3 = field(state + 0.5 * dt * k2)
        k4 = field(state + dt * k3)
        state = state + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        times[k + 1] = (k + 1) * dt
        states[k + 1] = state
        if not np.all(np.isfinite(state)) or float(np.hypot(*state)) > 1e6:
            diverged = True
            times = times[: k + 2]
            states = states[: k + 2]
            break
    return AmplitudeTrajectory(
        t=times, rho=states[:, 0].copy(), eta=states[:, 1].copy(), diverged=diverged
    )
