"""Linear analysis of the delayed mussel-algae model about its positive
uniform equilibrium.

Everything here is driven by the per-mode characteristic function

    E_n(lambda; tau, d) = gamma*lambda^2 + T_n*lambda
                          + (B*lambda + M_n) * exp(-lambda*tau) + D_n,

with s = (n/l)^2 the squared scaled wavenumber of cosine mode n and

    T_n = alpha + m* + (1 + gamma*d) * s,
    M_n = r*a*m* * (1 - alpha*r - r*a* * s),
    D_n = d * (alpha + m* + s) * s,
    B   = -gamma * r^2 * a*^2 * m*.

Provided ops: per-mode coefficients and characteristic values, Hopf
frequencies and critical-delay branches, the diffusion-driven (Turing)
instability threshold in d, both transversality certificates, the joint
delay/diffusion codimension-two point, and a global rightmost-root scan.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, replace

import numpy as np

from .errors import (
    InvariantViolationError,
    NoHopfModeError,
    NonSimpleEigenvalueError,
)
from .model import Equilibrium, ModelParams, require_hypotheses
from .settings import DEFAULT_SETTINGS, NumericalSettings

__all__ = [
    "ModeCoeffs",
    "HopfBranch",
    "DiffusionStability",
    "TuringThreshold",
    "TuringTransversality",
    "THPoint",
    "mode_coeffs",
    "char_value",
    "char_derivative",
    "hopf_frequency",
    "hopf_branch",
    "hopf_branches",
    "spatial_scale",
    "mode_length",
    "gamma_membership",
    "turing_threshold",
    "turing_curve",
    "hopf_transversality",
    "turing_transversality",
    "turing_hopf_point",
    "rightmost_roots",
]


@dataclass(frozen=True)
class ModeCoeffs:
    """Characteristic-function coefficients of one cosine mode."""

    n: int
    T_n: float
    M_n: float
    D_n: float
    B: float


@dataclass(frozen=True)
class HopfBranch:
    """Hopf frequency of a mode and its increasing critical delays.

    taus[j] = tau_n^j = tau_n^0 + 2*pi*j/omega; consecutive spacing is
    exactly 2*pi/omega.
    """

    n: int
    omega: float
    taus: tuple[float, ...]


@dataclass(frozen=True)
class DiffusionStability:
    """Truthy record: does diffusion leave every mode's zero-frequency part
    stable (no Turing instability at any real wavenumber)?

    vertex_s is the minimizing squared wavenumber of the dispersion
    quadratic, vertex_value its minimum; `marginal` flags a vanishing
    minimum (d exactly at the instability threshold).
    """

    holds: bool
    marginal: bool
    vertex_s: float
    vertex_value: float

    def __bool__(self) -> bool:
        return self.holds


@dataclass(frozen=True)
class TuringThreshold:
    """Critical diffusion ratio d0, continuous minimizer k2_star of the
    zero-eigenvalue dispersion curve (in s = (n/l)^2 units), and the
    integer mode n2 that destabilizes first as d decreases through d0."""

    d0: float
    n2: int
    k2_star: float


@dataclass(frozen=True)
class TuringTransversality:
    """Speed of the real eigenvalue through zero as d varies, plus the
    simplicity witness (the characteristic derivative at lambda = 0,
    which must be positive for the zero root to be simple)."""

    dlambda_dd: float
    simplicity_witness: float


@dataclass(frozen=True)
class THPoint:
    """Codimension-two point: Turing threshold d0 with its mode n2, and
    the minimal Hopf delay tau0 with its mode n1 and frequency omega0,
    both critical simultaneously at (tau0, d0)."""

    tau0: float
    d0: float
    n1: int
    n2: int
    omega0: float


# ---------------------------------------------------------------------------
# characteristic function


def mode_coeffs(p: ModelParams, eq: Equilibrium, n: int) -> ModeCoeffs:
    """Coefficients (T_n, M_n, D_n, B) of cosine mode n's characteristic
    function, with the diffusion ratio taken from p.d."""
    if n < 0 or int(n) != n:
        raise ValueError(f"mode index must be a nonnegative integer, got {n!r}")
    m_star, a_star = eq.m_star, eq.a_star
    alpha, r, gamma, d = p.alpha, p.r, p.gamma, p.d
    s = (n / p.l) ** 2
    return ModeCoeffs(
        n=int(n),
        T_n=alpha + m_star + (1.0 + gamma * d) * s,
        M_n=r * a_star * m_star * (1.0 - alpha * r - r * a_star * s),
        D_n=d * (alpha + m_star + s) * s,
        B=-gamma * r**2 * a_star**2 * m_star,
    )


def _char(mc: ModeCoeffs, gamma: float, lam: complex, tau: float) -> complex:
    return (
        gamma * lam * lam
        + mc.T_n * lam
        + (mc.B * lam + mc.M_n) * np.exp(-lam * tau)
        + mc.D_n
    )


def _char_prime(mc: ModeCoeffs, gamma: float, lam: complex, tau: float) -> complex:
    ex = np.exp(-lam * tau)
    return 2.0 * gamma * lam + mc.T_n + mc.B * ex - tau * (mc.B * lam + mc.M_n) * ex


def char_value(p: ModelParams, eq: Equilibrium, n: int, lam: complex, tau: float) -> complex:
    """Evaluate mode n's characteristic function at lambda with delay tau."""
    return complex(_char(mode_coeffs(p, eq, n), p.gamma, lam, tau))


def char_derivative(
    p: ModelParams, eq: Equilibrium, n: int, lam: complex, tau: float
) -> complex:
    """d/d lambda of the characteristic function (used by the root polisher)."""
    return complex(_char_prime(mode_coeffs(p, eq, n), p.gamma, lam, tau))


# ---------------------------------------------------------------------------
# Hopf side


def hopf_frequency(p: ModelParams, eq: Equilibrium, n: int) -> float | None:
    """Positive root omega_n of the delay-free modulus equation for mode n.

    omega_n^2 is the positive root z of

        gamma^2 z^2 + (T_n^2 - 2*gamma*D_n - B^2) z + (D_n^2 - M_n^2) = 0;

    a (unique) positive root exists exactly when |D_n| < M_n, i.e. when
    the mode can lose stability through a pure imaginary pair as the
    delay grows. Returns None when no such root exists. The sign
    condition T_n^2 - 2*gamma*D_n - B^2 > 0 expected under the
    admissibility hypotheses is checked at runtime and a warning is
    emitted if it fails (the root is still returned when real-positive).
    """
    require_hypotheses(p)
    mc = mode_coeffs(p, eq, n)
    gamma = p.gamma
    c_lin = mc.T_n**2 - 2.0 * gamma * mc.D_n - mc.B**2
    if c_lin <= 0.0:
        warnings.warn(
            f"mode {n}: T_n^2 - 2*gamma*D_n - B^2 = {c_lin} is nonpositive; "
            "the admissibility hypotheses were expected to prevent this",
            RuntimeWarning,
            stacklevel=2,
        )
    disc = c_lin**2 - 4.0 * gamma**2 * (mc.D_n**2 - mc.M_n**2)
    if disc < 0.0:
        return None
    z = (-c_lin + math.sqrt(disc)) / (2.0 * gamma**2)
    if z <= 0.0:
        return None
    return math.sqrt(z)


def hopf_branch(
    p: ModelParams, eq: Equilibrium, n: int, j_max: int = 0
) -> HopfBranch:
    """Critical delays tau_n^j, j = 0..j_max, of mode n.

    The pair (cos(omega*tau), sin(omega*tau)) is solved exactly from the
    characteristic equation at lambda = i*omega; the principal angle is
    lifted to (0, 2*pi] so tau_n^0 > 0.
    """
    if j_max < 0:
        raise ValueError(f"j_max must be >= 0, got {j_max}")
    omega = hopf_frequency(p, eq, n)
    if omega is None:
        raise NoHopfModeError(f"mode {n} carries no Hopf frequency at d = {p.d}")
    mc = mode_coeffs(p, eq, n)
    gamma = p.gamma
    w2 = omega * omega
    denom = mc.M_n**2 + w2 * mc.B**2
    cos_v = ((gamma * mc.M_n - mc.B * mc.T_n) * w2 - mc.M_n * mc.D_n) / denom
    sin_v = omega * (mc.M_n * mc.T_n + mc.B * (gamma * w2 - mc.D_n)) / denom
    if abs(cos_v * cos_v + sin_v * sin_v - 1.0) > 1e-8:
        raise InvariantViolationError(
            f"mode {n}: solved (cos, sin) pair is off the unit circle by "
            f"{cos_v**2 + sin_v**2 - 1.0}"
        )
    theta = math.atan2(sin_v, cos_v)
    if theta <= 0.0:
        theta += 2.0 * math.pi
    tau0 = theta / omega
    taus = tuple(tau0 + 2.0 * math.pi * j / omega for j in range(j_max + 1))
    return HopfBranch(n=int(n), omega=omega, taus=taus)


def hopf_branches(
    p: ModelParams, eq: Equilibrium, n_max: int, j_max: int = 0
) -> list[HopfBranch]:
    """Branches for every mode 0..n_max that carries a Hopf frequency."""
    out = []
    for n in range(n_max + 1):
        if hopf_frequency(p, eq, n) is not None:
            out.append(hopf_branch(p, eq, n, j_max))
    return out


def spatial_scale(p: ModelParams, eq: Equilibrium) -> float:
    """Upper bound S on squared scaled wavenumbers s = (n/l)^2 that admit a
    Hopf frequency: omega_n exists iff s < S. Depends on p.d.

    The equivalence assumes the steady dispersion curve D_n + M_n stays
    nonnegative (diffusion ratio at or above the threshold); below the
    threshold the true condition M_n^2 > D_n^2 also admits modes inside
    the steady-unstable band."""
    require_hypotheses(p, need_h2=False)
    m_star, a_star = eq.m_star, eq.a_star
    alpha, r, d = p.alpha, p.r, p.d
    a2 = d * alpha / a_star + r**2 * a_star**2 * m_star
    c0 = alpha * r * (r - 1.0) * a_star
    return (-a2 + math.sqrt(a2 * a2 + 4.0 * d * c0)) / (2.0 * d)


def mode_length(p: ModelParams, eq: Equilibrium, n: int) -> float:
    """Threshold domain factor l_n = n/sqrt(S): mode n admits a Hopf
    frequency exactly when l > l_n."""
    if n < 0:
        raise ValueError(f"mode index must be >= 0, got {n}")
    return n / math.sqrt(spatial_scale(p, eq))


# ---------------------------------------------------------------------------
# Turing side


def _dispersion_quadratic(p: ModelParams, eq: Equilibrium) -> tuple[float, float, float]:
    """Coefficients (A, b, c) of h(s) = D_n + M_n = A*s^2 + b*s + c as a
    function of s = (n/l)^2, at the diffusion ratio p.d."""
    m_star, a_star = eq.m_star, eq.a_star
    alpha, r, d = p.alpha, p.r, p.d
    return (
        d,
        d * alpha / a_star - r**2 * a_star**2 * m_star,
        alpha * r * (r - 1.0) * a_star,
    )


def gamma_membership(p: ModelParams, eq: Equilibrium) -> DiffusionStability:
    """Does the diffusion ratio p.d keep the zero-frequency dispersion curve
    positive for every s >= 0 (no Turing instability)?

    Returns a truthy record; `marginal` is set when the minimum of the
    dispersion quadratic vanishes to ~1e-12 relative (d at the threshold).
    """
    require_hypotheses(p, need_h2=False)
    a_coef, b_coef, c_coef = _dispersion_quadratic(p, eq)
    if b_coef >= 0.0:
        vertex_s, vertex_value = 0.0, c_coef
    else:
        vertex_s = -b_coef / (2.0 * a_coef)
        vertex_value = c_coef - b_coef * b_coef / (4.0 * a_coef)
    marginal = abs(vertex_value) <= 1e-12 * max(1e-300, abs(c_coef))
    return DiffusionStability(
        holds=bool(vertex_value > 0.0 or marginal),
        marginal=bool(marginal),
        vertex_s=float(vertex_s),
        vertex_value=float(vertex_value),
    )


def _critical_d_for_s(p: ModelParams, eq: Equilibrium, s: float) -> float:
    """Diffusion ratio at which squared wavenumber s sits exactly on the
    zero-eigenvalue curve: solves h(d, s) = 0 for d."""
    m_star, a_star = eq.m_star, eq.a_star
    alpha, r = p.alpha, p.r
    c0 = alpha * r * (r - 1.0) * a_star
    return (r**2 * a_star**2 * m_star * s - c0) / (s * s + (alpha / a_star) * s)


def turing_threshold(p: ModelParams, eq: Equilibrium) -> TuringThreshold:
    """Critical diffusion ratio below which some cosine mode is
    steady-state unstable, with the first destabilizing integer mode.

    d0 comes from the closed form in (alpha, r); the continuous tangency
    wavenumber satisfies h(d0, s) = d0*(s - k2_star)^2. The integer mode
    n2 is whichever of the two integers bracketing l*sqrt(k2_star) has
    the larger per-mode critical diffusion (it destabilizes first as d
    decreases); ties resolve to the smaller mode.
    """
    require_hypotheses(p, need_h2=False)
    alpha, r, l = p.alpha, p.r, p.l
    m_star, a_star = eq.m_star, eq.a_star
    u = 1.0 - alpha * r
    d0 = alpha * (r - 1.0) * u * u / ((1.0 - alpha) ** 3 * (2.0 * math.sqrt(u) + 2.0 - alpha * r))
    if not (d0 > 0.0 and math.isfinite(d0)):
        raise InvariantViolationError(f"threshold diffusion came out invalid: {d0}")
    k2_star = (r**2 * a_star**2 * m_star - d0 * alpha / a_star) / (2.0 * d0)
    if k2_star <= 0.0:
        raise InvariantViolationError(
            f"tangency wavenumber nonpositive ({k2_star}); no spatial instability"
        )

    x = l * math.sqrt(k2_star)
    n_lo, n_hi = int(math.floor(x)), int(math.floor(x)) + 1
    candidates = [n for n in (n_lo, n_hi) if n >= 1]
    if not candidates:
        candidates = [1]
    best_n: int | None = None
    best_d = -math.inf
    for n in sorted(candidates):
        dn = _critical_d_for_s(p, eq, (n / l) ** 2)
        # strict improvement beyond a tie band keeps the smaller mode on ties
        if best_n is None or dn > best_d + 1e-12 * max(1.0, abs(best_d)):
            best_n, best_d = n, dn
    if best_n is None or best_d <= 0.0:
        raise InvariantViolationError(
            "no integer mode attains a positive critical diffusion near the tangency"
        )
    return TuringThreshold(d0=d0, n2=best_n, k2_star=k2_star)


def turing_curve(
    p: ModelParams, eq_factory, alpha_values
) -> list[tuple[float, float, float, int, float]]:
    """Threshold curve over a range of exchange rates at fixed (r, gamma, l).

    Args:
        p: template parameters; alpha is replaced per sample.
        eq_factory: callable mapping ModelParams -> Equilibrium.
        alpha_values: iterable of alpha samples (each must satisfy the
            existence hypothesis with p.r).

    Returns:
        Rows (alpha, r, d0, n2, k2_star).
    """
    rows = []
    for alpha in alpha_values:
        p_a = replace(p, alpha=float(alpha))
        eq_a = eq_factory(p_a)
        tt = turing_threshold(p_a, eq_a)
        rows.append((float(alpha), p.r, tt.d0, tt.n2, tt.k2_star))
    return rows


# ---------------------------------------------------------------------------
# transversality certificates


def hopf_transversality(
    p: ModelParams, eq: Equilibrium, n: int, tau_c: float
) -> float:
    """Re(d lambda/d tau)^{-1} along mode n's Hopf branch (same value at
    every critical delay tau_n^j):

        sqrt((T_n^2 - 2*gamma*D_n - B^2)^2 - 4*gamma^2*(D_n^2 - M_n^2))
        / (B^2*omega_n^2 + M_n^2)  > 0.

    Raises NoHopfModeError if the mode has no frequency and
    InvariantViolationError if the certificate is not strictly positive.
    """
    omega = hopf_frequency(p, eq, n)
    if omega is None:
        raise NoHopfModeError(f"mode {n} carries no Hopf frequency at d = {p.d}")
    if tau_c <= 0.0:
        raise ValueError(f"critical delay must be positive, got {tau_c}")
    mc = mode_coeffs(p, eq, n)
    gamma = p.gamma
    c_lin = mc.T_n**2 - 2.0 * gamma * mc.D_n - mc.B**2
    disc = c_lin**2 - 4.0 * gamma**2 * (mc.D_n**2 - mc.M_n**2)
    value = math.sqrt(disc) / (mc.B**2 * omega**2 + mc.M_n**2)
    if not value > 0.0:
        raise InvariantViolationError(
            f"Hopf transversality certificate nonpositive at mode {n}: {value}"
        )
    return value


def turing_transversality(
    p: ModelParams, eq: Equilibrium, n2: int, tau: float
) -> TuringTransversality:
    """Certificate that the zero eigenvalue of mode n2 is simple and moves
    into the right half plane as d decreases:

        d lambda/d d = -(dD_n/dd) / (T_n + B - tau*M_n) < 0,

    with dD_n/dd = (alpha + m* + s)*s and the denominator (the
    characteristic derivative at lambda = 0) the simplicity witness.
    """
    mc = mode_coeffs(p, eq, n2)
    s = (n2 / p.l) ** 2
    witness = mc.T_n + mc.B - tau * mc.M_n
    if witness <= 0.0:
        raise NonSimpleEigenvalueError(
            f"zero eigenvalue at mode {n2} is not certified simple: "
            f"characteristic derivative {witness} <= 0"
        )
    dD_dd = (p.alpha + eq.m_star + s) * s
    value = -dD_dd / witness
    if not value < 0.0:
        raise InvariantViolationError(
            f"Turing transversality expected negative, got {value} at mode {n2}"
        )
    return TuringTransversality(dlambda_dd=value, simplicity_witness=witness)


# ---------------------------------------------------------------------------
# the codimension-two point


def turing_hopf_point(
    p: ModelParams,
    eq: Equilibrium,
    settings: NumericalSettings = DEFAULT_SETTINGS,
) -> THPoint:
    """Joint critical point (tau0, d0): at d = d0 the steady-state
    instability is marginal at mode n2 while tau0 is the smallest critical
    Hopf delay over all admissible modes (attained at mode n1, frequency
    omega0). Both transversality certificates are validated.

    p.d and p.tau are ignored; only (r, gamma, alpha, l) matter.
    """
    require_hypotheses(p)
    tt = turing_threshold(p, eq)
    p0 = replace(p, d=tt.d0)

    s_max = spatial_scale(p0, eq)
    n_cap = int(math.floor(p.l * math.sqrt(s_max))) + 1
    best: tuple[float, int, float] | None = None
    for n in range(n_cap + 1):
        omega = hopf_frequency(p0, eq, n)
        if omega is None:
            continue
        tau_n0 = hopf_branch(p0, eq, n, 0).taus[0]
        if best is None or tau_n0 < best[0] - 1e-15:
            best = (tau_n0, n, omega)
    if best is None:
        raise NoHopfModeError("no spatial mode carries a Hopf frequency at d = d0")
    tau0, n1, omega0 = best

    if n1 == tt.n2:
        raise InvariantViolationError(
            f"Hopf mode and steady-instability mode coincide (n = {n1}); "
            "the codimension-two structure degenerates"
        )

    mc1 = mode_coeffs(p0, eq, n1)
    res_hopf = abs(_char(mc1, p.gamma, 1j * omega0, tau0))
    if res_hopf > settings.residual_tol:
        omega0, tau0 = _polish_imaginary_root(mc1, p.gamma, omega0, tau0)
        res_hopf = abs(_char(mc1, p.gamma, 1j * omega0, tau0))
        if res_hopf > settings.residual_tol:
            raise InvariantViolationError(
                f"Hopf-side characteristic residual {res_hopf} above tolerance"
            )
    mc2 = mode_coeffs(p0, eq, tt.n2)
    res_turing = abs(_char(mc2, p.gamma, 0.0, tau0))
    if res_turing > settings.golden_tol:
        raise InvariantViolationError(
            f"steady-side characteristic residual {res_turing} above tolerance "
            f"(mode {tt.n2})"
        )

    hopf_transversality(p0, eq, n1, tau0)
    turing_transversality(p0, eq, tt.n2, tau0)
    return THPoint(tau0=tau0, d0=tt.d0, n1=n1, n2=tt.n2, omega0=omega0)


def _polish_imaginary_root(
    mc: ModeCoeffs, gamma: float, omega: float, tau: float, iterations: int = 8
) -> tuple[float, float]:
    """Joint Newton polish of (omega, tau) on Re/Im of the characteristic
    function at lambda = i*omega."""
    w, t = omega, tau
    for _ in range(iterations):
        lam = 1j * w
        f = _char(mc, gamma, lam, t)
        # partials: d/d omega = i * E'(lambda), d/d tau = -lambda*(B*lam+M)*exp(-lam*tau)
        dw = 1j * _char_prime(mc, gamma, lam, t)
        dt = -lam * (mc.B * lam + mc.M_n) * np.exp(-lam * t)
        jac = np.array([[dw.real, dt.real], [dw.imag, dt.imag]])
        try:
            step = np.linalg.solve(jac, np.array([f.real, f.imag]))
        except np.linalg.LinAlgError:
            break
        w, t = w - step[0], t - step[1]
        if abs(f) < 1e-15:
            break
    return w, t


# ---------------------------------------------------------------------------
# rightmost roots


def rightmost_roots(
    p: ModelParams,
    eq: Equilibrium,
    n: int,
    tau: float,
    box: tuple[float, float, float, float] = (-2.0, 1.0, 0.0, 20.0),
    max_roots: int = 50,
    settings: NumericalSettings = DEFAULT_SETTINGS,
) -> list[complex]:
    """Characteristic roots of mode n inside a search box, rightmost first.

    Only the closed upper half of the box is scanned; complex roots come
    back with nonnegative imaginary part and their conjugates are
    implied. tau = 0 reduces exactly to the quadratic
    gamma*lambda^2 + (T_n + B)*lambda + (D_n + M_n).

    Newton iteration from a 40 x 40 seed grid; converged roots are
    deduplicated at settings.dedupe_tol and must satisfy
    |E_n| < settings.residual_tol. If no seed converges, an empty list is
    returned with a warning.
    """
    mc = mode_coeffs(p, eq, n)
    gamma = p.gamma
    re_min, re_max, im_min, im_max = box
    if not (re_min < re_max and im_min <= im_max and im_min >= 0.0):
        raise ValueError(f"search box must satisfy re_min < re_max, 0 <= im_min <= im_max: {box}")

    if tau == 0.0:
        roots = np.roots([gamma, mc.T_n + mc.B, mc.D_n + mc.M_n])
        found = []
        for root in roots:
            root = complex(root)
            if abs(root.imag) <= settings.dedupe_tol:
                root = complex(root.real, 0.0)
            elif root.imag < 0.0:
                continue  # conjugate implied
            if re_min <= root.real <= re_max and im_min <= root.imag <= im_max:
                found.append(root)
        return sorted(found, key=lambda z: (-z.real, z.imag))[:max_roots]

    re_seeds = np.linspace(re_min, re_max, 40)
    im_seeds = np.linspace(im_min, im_max, 40)
    lam = (re_seeds[:, None] + 1j * im_seeds[None, :]).ravel()
    active = np.ones(lam.shape, dtype=bool)
    # Seeds may overshoot to large negative real parts mid-iteration,
    # overflowing exp(-lam*tau); the wander/critical-point filter drops
    # them, so silence the transient overflow instead of warning.
    with np.errstate(over="ignore", invalid="ignore"):
        for _ in range(80):
            if not active.any():
                break
            z = lam[active]
            f = _char(mc, gamma, z, tau)
            fp = _char_prime(mc, gamma, z, tau)
            ok = (np.abs(fp) > 1e-14) & np.isfinite(f) & np.isfinite(fp)
            step = np.zeros_like(z)
            step[ok] = f[ok] / fp[ok]
            z = z - step
            # drop seeds that wander far away or hit a critical point
            wander = (
                ~ok
                | (z.real < re_min - 2.0)
                | (z.real > re_max + 2.0)
                | (np.abs(z.imag) > 2.0 * max(1.0, im_max) + 10.0)
            )
            idx = np.flatnonzero(active)
            lam[idx] = z
            active[idx[wander]] = False
            converged = np.abs(f) < 1e-16
            active[idx[converged]] = False

        resid = np.abs(_char(mc, gamma, lam, tau))
    good = lam[resid < settings.residual_tol]
    # fold into the upper half plane and the box
    good = good[np.abs(good.imag) <= im_max + settings.dedupe_tol]
    good = np.where(np.abs(good.imag) <= settings.dedupe_tol, good.real + 0j, good)
    good = np.where(good.imag < 0.0, np.conj(good), good)
    good = good[
        (good.real >= re_min - settings.dedupe_tol)
        & (good.real <= re_max + settings.dedupe_tol)
        & (good.imag >= im_min - settings.dedupe_tol)
    ]
    if good.size == 0:
        warnings.warn(
            f"rightmost-root scan: no Newton seed converged for mode {n} "
            f"(tau = {tau}); returning no roots",
            RuntimeWarning,
            stacklevel=2,
        )
        return []

    unique: list[complex] = []
    for root in sorted(map(complex, good), key=lambda z: (-z.real, z.imag)):
        if all(abs(root - u) > settings.dedupe_tol for u in unique):
            unique.append(root)
    return unique[:max_roots]
