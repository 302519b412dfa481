"""Third-order center-manifold reduction at the joint delay/diffusion
critical point, for the time-rescaled system with unit delay.

At the codimension-two point (tau0, d0) the center space is spanned by a
Hopf pair on cosine mode n1 = 0 (eigenvalues +-i*omega0*tau0 after the
t -> t/tau rescaling) and a simple zero eigenvalue on mode n2. This
module computes, in order:

  * `eigen_data`    — right/left eigenvectors of the 2x2 characteristic
                      matrices, normalized through the delay bilinear
                      form (direct linear solves, validated against the
                      closed-form fraction candidates);
  * `deriv_table`   — all nonzero second/third partial derivatives of the
                      delay-shifted nonlinearity, with the tau0 and
                      1/gamma weights folded in;
  * `appendix_vectors` — the interaction coefficient vectors F_mnk and
                      the eight S-operator rows, evaluated from their
                      closed summation formulas;
  * `h_components`  — the six second-order center-manifold corrections
                      <h_mnk(theta) b, b> at theta in {0, -1}, each a
                      resolvent solve plus center-projection corrections;
  * `nf_coeffs`     — the parameter-derivative coefficients f^{1k}_{j}
                      and the four cubic normal-form coefficients g;
  * `amplitude_system` — the planar (rho, eta) amplitude-equation
                      coefficient set (eps1/eps2 unfolding maps and
                      b, c, d_hat, epsilon).

Spatial projections use the orthonormal cosine basis on (0, l*pi):
b_0 = 1/sqrt(l*pi), b_k(x) = sqrt(2/(l*pi))*cos(k x/l) for k >= 1.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, replace
from types import MappingProxyType
from typing import Mapping

import numpy as np

from .errors import (
    DegenerateNormalFormError,
    InvariantViolationError,
    NonResonanceError,
)
from .model import Equilibrium, ModelParams, positive_equilibrium
from .settings import DEFAULT_SETTINGS, NumericalSettings
from .spectrum import THPoint, char_derivative, char_value, turing_hopf_point

__all__ = [
    "SLOTS",
    "EigenData",
    "DerivTable",
    "AppendixVectors",
    "HEval",
    "NFCoeffs",
    "AmplitudeSystem",
    "ParamMap",
    "NormalFormResult",
    "char_matrix",
    "bilinear_form_exponential",
    "eigen_data",
    "deriv_table",
    "appendix_vectors",
    "h_components",
    "nf_coeffs",
    "amplitude_system",
    "normal_form_at",
]

# Argument slots of the nonlinearity: instantaneous and delayed values.
SLOTS = ("m", "a", "m_tau", "a_tau")
_SLOT_INDEX = {name: i for i, name in enumerate(SLOTS)}

# Weight applied to the cubic self-projection of the inhomogeneous mode
# (the eta^3 coefficient's spatial integral). Unlike every other cubic
# projection, whose basis integral is int b_0^2 b_k^2 = 1/(l*pi), the
# z2^3 term projects through int b_k^4 = 3/(2*l*pi); the extra factor
# 3/2 relative to the uniform 1/(l*pi) rule lives here.
_CUBIC_SELF_WEIGHT = 1.5


# ---------------------------------------------------------------------------
# characteristic matrices of the rescaled system


def _linear_parts(p: ModelParams, eq: Equilibrium) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """(D, L1, L2): diffusion matrix and the instantaneous/delayed Jacobian
    blocks of the reaction kinetics, in the gamma-weighted form."""
    m_star, a_star = eq.m_star, eq.a_star
    alpha, r, gamma = p.alpha, p.r, p.gamma
    diff = np.diag([p.d, 1.0 / gamma])
    l1 = np.array([[0.0, 0.0], [-a_star / gamma, -(alpha + m_star) / gamma]])
    l2 = np.array([[r**2 * a_star**2 * m_star, r * m_star], [0.0, 0.0]])
    return diff, l1, l2


def char_matrix(p: ModelParams, eq: Equilibrium, n: int, lam: complex) -> np.ndarray:
    """2x2 characteristic matrix of cosine mode n for the time-rescaled
    system (delay 1, time unit p.tau):

        lam*I + (n/l)^2 * tau * D - tau * (L1 + L2 * exp(-lam)).
    """
    diff, l1, l2 = _linear_parts(p, eq)
    tau0 = p.tau
    s = (n / p.l) ** 2
    return (
        lam * np.eye(2)
        + s * tau0 * diff
        - tau0 * (l1 + l2 * cmath.exp(-lam))
    ).astype(complex)


def bilinear_form_exponential(
    p: ModelParams,
    eq: Equilibrium,
    psi_vec: np.ndarray,
    psi_rate: complex,
    phi_vec: np.ndarray,
    phi_rate: complex,
) -> complex:
    """Delay bilinear pairing (psi, phi) for exponential eigenfunctions
    psi(s) = psi_vec * exp(psi_rate * s), phi(theta) = phi_vec *
    exp(phi_rate * theta):

        psi(0)*phi(0) + int_{-1}^{0} psi(xi+1) * tau * L2 * phi(xi) dxi,

    the delay integral evaluated in closed form.
    """
    _, _, l2 = _linear_parts(p, eq)
    head = complex(np.dot(psi_vec, phi_vec))
    kernel = complex(np.dot(psi_vec, (p.tau * l2) @ phi_vec))
    rate = psi_rate + phi_rate
    if abs(rate) < 1e-14:
        integral = cmath.exp(psi_rate)
    else:
        # int_{-1}^0 exp(psi_rate*(xi+1)) * exp(phi_rate*xi) dxi
        integral = cmath.exp(psi_rate) * (1.0 - cmath.exp(-rate)) / rate
    return head + kernel * integral


# ---------------------------------------------------------------------------
# eigen-data


@dataclass(frozen=True)
class EigenData:
    """Center-space eigenvectors and adjoint normalizations.

    q = (1, q1) / q_star = (q2, 1): right/left null vectors of the Hopf
    mode's characteristic matrix at lambda = i*omega0*tau0;
    p = (1, p1) / p_star = (p2, 1): same for the zero eigenvalue at mode
    n2. M1, M2 normalize the adjoint eigenfunctions through the delay
    bilinear form. `provenance` records, per ratio, how the direct solve
    relates to the closed-form candidate fraction.
    """

    th: THPoint
    q: np.ndarray
    q_star: np.ndarray
    p: np.ndarray
    p_star: np.ndarray
    M1: complex
    M2: float
    lambda_zero: float
    provenance: Mapping[str, str]

    @property
    def sigma(self) -> float:
        """Rescaled Hopf frequency omega0*tau0."""
        return self.th.omega0 * self.th.tau0

    def phi1(self, theta: float) -> np.ndarray:
        return self.q * cmath.exp(1j * self.sigma * theta)

    def psi1_at0(self) -> np.ndarray:
        return self.M1 * self.q_star

    def psi2_at0(self) -> np.ndarray:
        return self.M2 * self.p_star


def _null_ratio(mat: np.ndarray, *, left: bool) -> complex:
    """Free component of the null vector of a rank-1 2x2 matrix.

    Right: (1, x) with row equation mat[i,0] + mat[i,1]*x = 0, preferring
    the better-conditioned row. Left: (x, 1) with column equation
    x*mat[0,j] + mat[1,j] = 0, preferring the better-conditioned column.
    """
    if left:
        for j in sorted((1, 0), key=lambda j: abs(mat[0, j]), reverse=True):
            if abs(mat[0, j]) > 1e-14:
                return -mat[1, j] / mat[0, j]
    else:
        for i in sorted((1, 0), key=lambda i: abs(mat[i, 1]), reverse=True):
            if abs(mat[i, 1]) > 1e-14:
                return -mat[i, 0] / mat[i, 1]
    raise InvariantViolationError("characteristic matrix has no usable null-vector row")


def _match_provenance(solved: complex, candidate: complex, tol: float) -> str:
    if abs(candidate) < 1e-300:
        return "direct solve; no usable closed-form candidate"
    factor = solved / candidate
    if abs(factor - 1.0) < tol:
        return "direct solve; matches the closed-form fraction"
    if abs(factor + 1.0) < tol:
        return "direct solve; closed-form fraction with sign flipped"
    if abs(factor.imag) < tol * max(1.0, abs(factor.real)):
        return f"direct solve; closed-form fraction rescaled by {factor.real:.6g}"
    return f"direct solve; closed-form fraction rescaled by {factor:.6g}"


def eigen_data(
    p: ModelParams,
    eq: Equilibrium,
    th: THPoint,
    settings: NumericalSettings = DEFAULT_SETTINGS,
) -> EigenData:
    """Eigenvectors, adjoints, and normalization constants at the critical
    point, by direct 2x2 null-vector solves.

    The closed-form candidate fractions

        a*/(i*gamma*omega0 + alpha + m*),
        (i*gamma*omega0 + alpha + m*)/(r*m**exp(-i*omega0*tau0)),
        -a*/((n2/l)^2 + alpha + m*),
        ((n2/l)^2 + alpha + m*)/(r*m*)

    are compared against the solves and the relation recorded in
    `provenance` (the solver result is authoritative). Normalizations
    (psi1, phi1) = 1, (psi2, phi2) = 2... = 1 and the cross-pairing
    (psi1, conj phi1) = 0 are verified through the closed-form delay
    integral before returning.
    """
    p0 = replace(p, tau=th.tau0, d=th.d0)
    m_star, a_star = eq.m_star, eq.a_star
    alpha, r, gamma = p.alpha, p.r, p.gamma
    sigma = th.omega0 * th.tau0
    lam_hopf = 1j * sigma

    mat_h = char_matrix(p0, eq, th.n1, lam_hopf)
    q1 = _null_ratio(mat_h, left=False)
    q2 = _null_ratio(mat_h, left=True)
    # The integer mode n2 sits a hair off the continuous Turing minimum, so
    # its critical eigenvalue is a tiny real number rather than exactly 0.
    # Polish it (Newton in original time units) and build p there: the
    # eigen-pair then satisfies its system to machine precision, while
    # differing from the lambda = 0 idealization only at that same tiny
    # order. The offset is retained as lambda_zero (rescaled units).
    lam2 = 0.0
    for _ in range(12):
        step = char_value(p0, eq, th.n2, lam2, th.tau0) / char_derivative(
            p0, eq, th.n2, lam2, th.tau0
        )
        lam2 -= step.real
        if abs(step) < 1e-16:
            break
    lam_zero = th.tau0 * lam2
    if abs(lam_zero) > settings.golden_tol:
        raise InvariantViolationError(
            f"mode-{th.n2} critical eigenvalue {lam_zero} is not numerically zero"
        )
    mat_t = char_matrix(p0, eq, th.n2, lam_zero)
    p1c = _null_ratio(mat_t, left=False)
    p2c = _null_ratio(mat_t, left=True)
    if abs(p1c.imag) > 1e-10 or abs(p2c.imag) > 1e-10:
        raise InvariantViolationError(
            f"zero-mode eigenvector ratios must be real, got {p1c}, {p2c}"
        )
    p1, p2 = p1c.real, p2c.real

    q = np.array([1.0, q1], dtype=complex)
    q_star = np.array([q2, 1.0], dtype=complex)
    p_vec = np.array([1.0, p1])
    p_star = np.array([p2, 1.0])

    for mat, vec, what in (
        (mat_h, q, "Hopf right"),
        (mat_h.T, q_star, "Hopf left"),
        (mat_t.astype(complex), p_vec.astype(complex), "zero right"),
        (mat_t.T.astype(complex), p_star.astype(complex), "zero left"),
    ):
        res = np.abs(mat @ vec)
        if res.max() > settings.residual_tol:
            raise InvariantViolationError(
                f"{what} eigenvector residual {res.max()} exceeds {settings.residual_tol}"
            )

    s2 = (th.n2 / p.l) ** 2
    denom_h = 1j * gamma * th.omega0 + alpha + m_star
    candidates = {
        "q1": a_star / denom_h,
        "q2": denom_h / (r * m_star * cmath.exp(-lam_hopf)),
        "p1": -a_star / (s2 + alpha + m_star),
        "p2": (s2 + alpha + m_star) / (r * m_star),
    }
    provenance = {
        name: _match_provenance(value, candidates[name], settings.golden_tol)
        for name, value in (("q1", q1), ("q2", q2), ("p1", p1), ("p2", p2))
    }

    tau0 = th.tau0
    m1 = 1.0 / (
        q1
        + q2
        + tau0 * q2 * cmath.exp(-lam_hopf) * (r**2 * a_star**2 * m_star + r * m_star * q1)
    )
    # Normalize the steady pair at its actual (polished) rate so the
    # pairing of the true eigenfunctions is exactly 1; at lambda_zero = 0
    # this reduces to 1/(p1 + p2 + tau0*p2*(r^2 a*^2 m* + r m* p1)).
    pair2 = bilinear_form_exponential(
        p0, eq, p_star.astype(complex), -lam_zero, p_vec.astype(complex), lam_zero
    )
    if abs(complex(pair2).imag) > 1e-10:
        raise InvariantViolationError(f"zero-mode normalization must be real, got {pair2}")
    m2 = 1.0 / float(np.real(pair2))

    norm1 = bilinear_form_exponential(p0, eq, m1 * q_star, -lam_hopf, q, lam_hopf)
    norm2 = bilinear_form_exponential(p0, eq, m2 * p_star, -lam_zero, p_vec, lam_zero)
    cross = bilinear_form_exponential(p0, eq, m1 * q_star, -lam_hopf, np.conj(q), -lam_hopf)
    if abs(norm1 - 1.0) > 1e-10 or abs(norm2 - 1.0) > 1e-10 or abs(cross) > 1e-10:
        raise InvariantViolationError(
            "adjoint normalization failed: "
            f"(psi1,phi1)={norm1}, (psi2,phi2)={norm2}, (psi1,conj phi1)={cross}"
        )

    return EigenData(
        th=th,
        q=q,
        q_star=q_star,
        p=p_vec,
        p_star=p_star,
        M1=complex(m1),
        M2=m2,
        lambda_zero=lam_zero,
        provenance=MappingProxyType(provenance),
    )


# ---------------------------------------------------------------------------
# derivative table


@dataclass(frozen=True)
class DerivTable:
    """Sparse table of the nonzero second/third partial derivatives of the
    rescaled nonlinearity with respect to (m, a, m_tau, a_tau) at the
    origin, each a 2-vector carrying the tau and 1/gamma weights.

    Keys are ascending tuples of slot indices into SLOTS; lookups through
    `second`/`third` symmetrize automatically and return zeros for absent
    entries.
    """

    second_entries: Mapping[tuple[int, int], tuple[float, float]]
    third_entries: Mapping[tuple[int, int, int], tuple[float, float]]
    tau_weight: float

    def second(self, i: int, j: int) -> np.ndarray:
        return np.array(self.second_entries.get(tuple(sorted((i, j))), (0.0, 0.0)))

    def third(self, i: int, j: int, k: int) -> np.ndarray:
        return np.array(self.third_entries.get(tuple(sorted((i, j, k))), (0.0, 0.0)))

    def second_named(self, *names: str) -> np.ndarray:
        return self.second(*(_SLOT_INDEX[n] for n in names))

    def third_named(self, *names: str) -> np.ndarray:
        return self.third(*(_SLOT_INDEX[n] for n in names))


def deriv_table(p: ModelParams, eq: Equilibrium) -> DerivTable:
    """Partial-derivative table of the nonlinearity, weighted by tau = p.tau
    (component 1) and tau/gamma (component 2).

    The quadratic/cubic kinetics leave exactly six nonzero entries:
    second order (m, a_tau) = tau*r, (m, m_tau) = tau/(1+m*)^2,
    (m_tau, m_tau) = -2*tau*m*/(1+m*)^3, (m, a) = (0, -tau/gamma);
    third order (m_tau, m_tau, m_tau) = 6*tau*m*/(1+m*)^4 and
    (m, m_tau, m_tau) = -2*tau/(1+m*)^3. Every other partial is zero.
    """
    tau0, gamma, r = p.tau, p.gamma, p.r
    m_star = eq.m_star
    one = 1.0 + m_star
    idx = _SLOT_INDEX
    second = {
        tuple(sorted((idx["m"], idx["a_tau"]))): (tau0 * r, 0.0),
        tuple(sorted((idx["m"], idx["m_tau"]))): (tau0 / one**2, 0.0),
        (idx["m_tau"], idx["m_tau"]): (-2.0 * tau0 * m_star / one**3, 0.0),
        tuple(sorted((idx["m"], idx["a"]))): (0.0, -tau0 / gamma),
    }
    third = {
        (idx["m_tau"], idx["m_tau"], idx["m_tau"]): (6.0 * tau0 * m_star / one**4, 0.0),
        tuple(sorted((idx["m"], idx["m_tau"], idx["m_tau"]))): (-2.0 * tau0 / one**3, 0.0),
    }
    return DerivTable(
        second_entries=MappingProxyType(second),
        third_entries=MappingProxyType(third),
        tau_weight=tau0,
    )


# ---------------------------------------------------------------------------
# interaction coefficient vectors


@dataclass(frozen=True)
class AppendixVectors:
    """Second/third-order interaction vectors F_mnk along the center
    directions, plus the four 2x2 S-operator matrices (columns are the
    F_{y_i(theta) z_j} vectors; the conjugate-direction matrices are the
    entrywise conjugates of the z1 pair)."""

    F200: np.ndarray
    F110: np.ndarray
    F101: np.ndarray
    F002: np.ndarray
    F020: np.ndarray
    F011: np.ndarray
    F210: np.ndarray
    F102: np.ndarray
    F111: np.ndarray
    F003: np.ndarray
    S_z1_at0: np.ndarray
    S_z1_atm1: np.ndarray
    S_z2_at0: np.ndarray
    S_z2_atm1: np.ndarray


def appendix_vectors(ed: EigenData, dt: DerivTable) -> AppendixVectors:
    """Evaluate the closed summation formulas for every F_mnk vector and
    the eight S-operator rows, using q1, p1 and the phases e^{+-i*sigma}.

    Conjugation identities F020 = conj(F200), F011 = conj(F101) are
    enforced by construction.
    """
    q1 = complex(ed.q[1])
    p1 = float(ed.p[1])
    em = cmath.exp(-1j * ed.sigma)  # e^{-i omega0 tau0}
    ep = cmath.exp(+1j * ed.sigma)
    q1b = q1.conjugate()

    # second-order partials (2-vectors)
    Fmm = dt.second_named("m", "m").astype(complex)
    Fma = dt.second_named("m", "a").astype(complex)
    Fmmt = dt.second_named("m", "m_tau").astype(complex)
    Fmat = dt.second_named("m", "a_tau").astype(complex)
    Faa = dt.second_named("a", "a").astype(complex)
    Famt = dt.second_named("a", "m_tau").astype(complex)
    Faat = dt.second_named("a", "a_tau").astype(complex)
    Fmtmt = dt.second_named("m_tau", "m_tau").astype(complex)
    Fmtat = dt.second_named("m_tau", "a_tau").astype(complex)
    Fatat = dt.second_named("a_tau", "a_tau").astype(complex)

    # third-order partials
    Fmmm = dt.third_named("m", "m", "m").astype(complex)
    Fmma = dt.third_named("m", "m", "a").astype(complex)
    Fmmmt = dt.third_named("m", "m", "m_tau").astype(complex)
    Fmmat = dt.third_named("m", "m", "a_tau").astype(complex)
    Fmaa = dt.third_named("m", "a", "a").astype(complex)
    Fmamt = dt.third_named("m", "a", "m_tau").astype(complex)
    Fmaat = dt.third_named("m", "a", "a_tau").astype(complex)
    Fmmtmt = dt.third_named("m", "m_tau", "m_tau").astype(complex)
    Fmmtat = dt.third_named("m", "m_tau", "a_tau").astype(complex)
    Fmatat = dt.third_named("m", "a_tau", "a_tau").astype(complex)
    Faaa = dt.third_named("a", "a", "a").astype(complex)
    Faamt = dt.third_named("a", "a", "m_tau").astype(complex)
    Faaat = dt.third_named("a", "a", "a_tau").astype(complex)
    Famtmt = dt.third_named("a", "m_tau", "m_tau").astype(complex)
    Famtat = dt.third_named("a", "m_tau", "a_tau").astype(complex)
    Faatat = dt.third_named("a", "a_tau", "a_tau").astype(complex)
    Fmtmtmt = dt.third_named("m_tau", "m_tau", "m_tau").astype(complex)
    Fmtmtat = dt.third_named("m_tau", "m_tau", "a_tau").astype(complex)
    Fmtatat = dt.third_named("m_tau", "a_tau", "a_tau").astype(complex)
    Fatatat = dt.third_named("a_tau", "a_tau", "a_tau").astype(complex)

    F200 = (
        Fmm
        + Faa * q1**2
        + Fmtmt * em**2
        + Fatat * q1**2 * em**2
        + 2.0
        * (
            Fma * q1
            + Fmmt * em
            + Fmat * q1 * em
            + Famt * q1 * em
            + Faat * q1**2 * em
            + Fmtat * q1 * em**2
        )
    )
    F110 = 2.0 * (
        Fmm
        + Faa * q1 * q1b
        + Fmtmt
        + Fatat * q1 * q1b
        + Fma * (q1 + q1b)
        + Fmmt * (em + ep)
        + Fmat * (q1 * em + q1b * ep)
        + Famt * (q1 * ep + q1b * em)
        + Faat * q1 * q1b * (em + ep)
        + Fmtat * (q1 + q1b)
    )
    F101 = 2.0 * (
        Fmm
        + Faa * q1 * p1
        + Fmtmt * em
        + Fatat * q1 * p1 * em
        + Fma * (q1 + p1)
        + Fmmt * (1.0 + em)
        + Fmat * (p1 + q1 * em)
        + Famt * (q1 + p1 * em)
        + Faat * q1 * p1 * (1.0 + em)
        + Fmtat * (q1 + p1) * em
    )
    F002 = (
        Fmm
        + Faa * p1**2
        + Fmtmt
        + Fatat * p1**2
        + 2.0
        * (Fma * p1 + Fmmt + Fmat * p1 + Famt * p1 + Faat * p1**2 + Fmtat * p1)
    )
    F020 = np.conj(F200)
    F011 = np.conj(F101)

    F210 = 3.0 * (
        Fmmm
        + Fmma * (2.0 * q1 + q1b)
        + Fmmmt * (2.0 * em + ep)
        + Fmaa * q1 * (2.0 * q1b + q1)
        + Fmmat * (2.0 * q1 * em + q1b * ep)
        + 2.0 * Fmamt * (q1 * em + q1 * ep + q1b * em)
        + 2.0 * Fmaat * q1 * (q1 * em + q1b * ep + q1b * em)
        + Fmmtmt * (em**2 + 2.0)
        + 2.0 * Fmmtat * (q1 + q1b + q1 * em**2)
        + Fmatat * q1 * (2.0 * q1b + q1 * em**2)
        + Faaa * q1**2 * q1b
        + Faamt * q1 * (2.0 * q1b * em + q1 * ep)
        + Faaat * q1**2 * q1b * (2.0 * em + ep)
        + Famtmt * (2.0 * q1 + q1b * em**2)
        + 2.0 * Famtat * q1 * (q1b + q1b * em**2 + q1)
        + Faatat * q1**2 * q1b * (2.0 + em**2)
        + Fmtmtmt * em
        + Fmtmtat * (2.0 * q1 * em + q1b * em)
        + Fmtatat * q1 * em * (2.0 * q1b + q1)
        + Fatatat * q1**2 * q1b * em
    )
    F102 = 3.0 * (
        Fmmm
        + Fmma * (q1 + 2.0 * p1)
        + Fmmmt * (em + 2.0)
        + Fmaa * p1 * (2.0 * q1 + p1)
        + Fmmat * (2.0 * p1 + q1 * em)
        + 2.0 * Fmamt * (q1 + p1 + p1 * em)
        + 2.0 * Fmaat * p1 * (q1 + p1 + q1 * em)
        + Fmmtmt * (2.0 * em + 1.0)
        + 2.0 * Fmmtat * (p1 + p1 * em + q1 * em)
        + Fmatat * p1 * (p1 + 2.0 * q1 * em)
        + Faaa * q1 * p1**2
        + Faamt * p1 * (2.0 * q1 + p1 * em)
        + Faaat * q1 * p1**2 * (2.0 + em)
        + Famtmt * (q1 + 2.0 * p1 * em)
        + 2.0 * Famtat * p1 * (q1 + q1 * em + p1 * em)
        + Faatat * q1 * p1**2 * (1.0 + 2.0 * em)
        + Fmtmtmt * em
        + Fmtmtat * (q1 * em + 2.0 * p1 * em)
        + Fmtatat * p1 * em * (2.0 * q1 + p1)
        + Fatatat * q1 * p1**2 * em
    )
    F111 = 6.0 * (
        Fmmm
        + Fmma * (q1 + q1b + p1)
        + Fmmmt * (em + ep + 1.0)
        + Fmaa * (q1 * q1b + q1 * p1 + p1 * q1b)
        + Fmmat * (q1 * em + q1b * ep + p1)
        + Fmamt * (q1 * (1.0 + ep) + q1b * (1.0 + em) + p1 * (ep + em))
        + Fmaat * (q1 * p1 * (1.0 + em) + q1 * q1b * (ep + em) + q1b * p1 * (1.0 + ep))
        + Fmmtmt * (ep + em + 1.0)
        + Fmmtat * (q1 * (1.0 + em) + q1b * (1.0 + ep) + p1 * (ep + em))
        + Fmatat * (q1 * q1b + q1b * p1 * ep + q1 * p1 * em)
        + Faaa * q1 * q1b * p1
        + Faamt * (q1 * q1b + q1b * p1 * em + q1 * p1 * ep)
        + Faaat * q1 * q1b * p1 * (1.0 + em + ep)
        + Famtmt * (p1 + q1 * ep + q1b * em)
        + Famtat * (q1 * q1b * (ep + em) + q1 * p1 * (1.0 + ep) + q1b * p1 * (1.0 + em))
        + Faatat * q1 * q1b * p1 * (1.0 + ep + em)
        + Fmtmtmt
        + Fmtmtat * (q1 + q1b + p1)
        + Fmtatat * (q1 * q1b + q1 * p1 + q1b * p1)
        + Fatatat * q1 * q1b * p1
    )
    F003 = (
        Fmmm
        + 3.0 * Fmmmt
        + 3.0 * Fmmtmt
        + Fmtmtmt
        + 3.0 * Fmma * p1
        + 3.0 * Fmmat * p1
        + 6.0 * Fmamt * p1
        + 6.0 * Fmmtat * p1
        + 3.0 * Fmtmtat * p1
        + 3.0 * Famtmt * p1
        + 3.0 * Fmaa * p1**2
        + 6.0 * Fmaat * p1**2
        + 3.0 * Fmatat * p1**2
        + Faaa * p1**3
        + 3.0 * Fmtatat * p1**2
        + 3.0 * Faamt * p1**2
        + 3.0 * Faaat * p1**3
        + 6.0 * Famtat * p1**2
        + 3.0 * Faatat * p1**3
        + Fatatat * p1**3
    )

    # S-operator rows: F_{y_i(theta) z_j} as matrix columns, so that
    # S_{y z_j}(chi) = S_at0 @ chi(0) + S_atm1 @ chi(-1).
    Fy1_0_z1 = 2.0 * (Fmm + Fma * q1 + Fmmt * em + Fmat * q1 * em)
    Fy1_m1_z1 = 2.0 * (Fmmt + Famt * q1 + Fmtmt * em + Fmtat * q1 * em)
    Fy2_0_z1 = 2.0 * (Fma + Faa * q1 + Famt * em + Faat * q1 * em)
    Fy2_m1_z1 = 2.0 * (Fmat + Faat * q1 + Fmtat * em + Fatat * q1 * em)
    Fy1_0_z2 = 2.0 * (Fmm + Fmmt + Fma * p1 + Fmat * p1)
    Fy1_m1_z2 = 2.0 * (Fmmt + Fmtmt + Fmtat * p1 + Famt * p1)
    Fy2_0_z2 = 2.0 * (Fma + Famt + Faa * p1 + Faat * p1)
    Fy2_m1_z2 = 2.0 * (Fmat + Fmtat + Faat * p1 + Fatat * p1)

    return AppendixVectors(
        F200=F200,
        F110=F110,
        F101=F101,
        F002=F002,
        F020=F020,
        F011=F011,
        F210=F210,
        F102=F102,
        F111=F111,
        F003=F003,
        S_z1_at0=np.column_stack([Fy1_0_z1, Fy2_0_z1]),
        S_z1_atm1=np.column_stack([Fy1_m1_z1, Fy2_m1_z1]),
        S_z2_at0=np.column_stack([Fy1_0_z2, Fy2_0_z2]),
        S_z2_atm1=np.column_stack([Fy1_m1_z2, Fy2_m1_z2]),
    )


# ---------------------------------------------------------------------------
# h-components (second-order center-manifold corrections)


@dataclass(frozen=True)
class HEval:
    """One <h_mnk(theta) b, b> evaluation: the resolvent solve plus its
    center corrections, retained at theta = 0 and theta = -1."""

    label: str
    mode: int
    z: complex
    forcing: np.ndarray
    resolvent: np.ndarray
    at0: np.ndarray
    atm1: np.ndarray


def _resolvent_solve(
    p: ModelParams, eq: Equilibrium, mode: int, z: complex, forcing: np.ndarray
) -> np.ndarray:
    mat = char_matrix(p, eq, mode, z)
    try:
        sol = np.linalg.solve(mat, forcing.astype(complex))
    except np.linalg.LinAlgError as exc:
        raise NonResonanceError(
            f"non-resonance violated: characteristic matrix of mode {mode} "
            f"is singular at lambda = {z}"
        ) from exc
    scale = max(1.0, float(np.abs(forcing).max()))
    residual = np.abs(mat @ sol - forcing).max()
    if residual > 1e-11 * scale:
        raise NonResonanceError(
            f"non-resonance violated: near-singular solve at mode {mode}, "
            f"lambda = {z} (residual {residual})"
        )
    # A consistent solve can still sit on a resonance: the 2x2 LU residual
    # stays at machine precision while the solution norm blows up like
    # 1/det. Legitimate corrections amplify the forcing by O(1).
    amplification = float(np.abs(sol).max()) / scale
    if amplification > 1e6:
        raise NonResonanceError(
            f"non-resonance violated: mode-{mode} solve at lambda = {z} "
            f"amplified the forcing by {amplification:.3g}"
        )
    return sol


def h_components(
    p: ModelParams,
    eq: Equilibrium,
    ed: EigenData,
    vectors: AppendixVectors,
) -> dict[str, HEval]:
    """The six second-order center-manifold correction evaluations.

    Each entry pairs a resolvent solve of the appropriate characteristic
    matrix (modes 0, n2, or 2*n2 at frequencies 0, +-i*sigma, 2i*sigma)
    with the center-projection correction terms, evaluated at theta = 0
    and theta = -1. Keys: h200_b1, h110_b1, h110_b2, h101_b2b1,
    h011_b1b2, h002_b1, h002_b2.
    """
    p0 = replace(p, tau=ed.th.tau0, d=ed.th.d0)
    sigma = ed.sigma
    lpi = p.l * math.pi
    sq = math.sqrt(lpi)
    n2 = ed.th.n2
    psi1 = ed.psi1_at0()
    psi2 = ed.psi2_at0()

    # order-2 projection scalars
    f11_200 = complex(np.dot(psi1, vectors.F200)) / sq
    f11_110 = complex(np.dot(psi1, vectors.F110)) / sq
    f11_002 = complex(np.dot(psi1, vectors.F002)) / sq
    f12_200 = f11_200.conjugate()
    f12_110 = f11_110.conjugate()
    f12_002 = f11_002.conjugate()
    f13_101 = complex(np.dot(psi2, vectors.F101)) / sq
    f13_011 = complex(np.dot(psi2, vectors.F011)) / sq

    phi1_0 = ed.phi1(0.0)
    phi1_m1 = ed.phi1(-1.0)
    phi2_0 = ed.p.astype(complex)
    i_sig = 1j * sigma

    def make(label, mode, z, forcing, corr0, corrm1, res_weight):
        res = _resolvent_solve(p0, eq, mode, z, forcing)
        at0 = res_weight * res + corr0
        atm1 = res_weight * cmath.exp(-z) * res + corrm1
        return HEval(
            label=label,
            mode=mode,
            z=complex(z),
            forcing=forcing,
            resolvent=res,
            at0=at0,
            atm1=atm1,
        )

    out: dict[str, HEval] = {}

    corr = lambda theta_vec_a, theta_vec_b, ca, cb: ca * theta_vec_a + cb * theta_vec_b

    # <h_200 b1, b1>: mode 0 at 2*i*sigma, minus Hopf-projection correction
    c200 = -1.0 / (i_sig * sq)
    out["h200_b1"] = make(
        "h200_b1",
        0,
        2j * sigma,
        vectors.F200,
        corr(phi1_0, np.conj(phi1_0), c200 * f11_200, c200 * f12_200 / 3.0),
        corr(phi1_m1, np.conj(phi1_m1), c200 * f11_200, c200 * f12_200 / 3.0),
        1.0 / lpi,
    )
    # <h_110 b1, b1>: mode 0 at 0, plus Hopf-projection correction
    c110 = 1.0 / (i_sig * sq)
    out["h110_b1"] = make(
        "h110_b1",
        0,
        0.0,
        vectors.F110,
        corr(phi1_0, np.conj(phi1_0), c110 * f11_110, -c110 * f12_110),
        corr(phi1_m1, np.conj(phi1_m1), c110 * f11_110, -c110 * f12_110),
        1.0 / lpi,
    )
    out["h110_b2"] = out["h110_b1"]
    # <h_101 b2, b1>: mode n2 at i*sigma, constant zero-mode correction
    out["h101_b2b1"] = make(
        "h101_b2b1",
        n2,
        1j * sigma,
        vectors.F101,
        -f13_101 * phi2_0 / (i_sig * sq),
        -f13_101 * phi2_0 / (i_sig * sq),
        1.0 / lpi,
    )
    # <h_011 b1, b2>: mode n2 at -i*sigma
    out["h011_b1b2"] = make(
        "h011_b1b2",
        n2,
        -1j * sigma,
        vectors.F011,
        f13_011 * phi2_0 / (i_sig * sq),
        f13_011 * phi2_0 / (i_sig * sq),
        1.0 / lpi,
    )
    # <h_002 b1, b1>: mode 0 at 0, plus Hopf-projection correction
    out["h002_b1"] = make(
        "h002_b1",
        0,
        0.0,
        vectors.F002,
        corr(phi1_0, np.conj(phi1_0), c110 * f11_002, -c110 * f12_002),
        corr(phi1_m1, np.conj(phi1_m1), c110 * f11_002, -c110 * f12_002),
        1.0 / lpi,
    )
    # <h_002 b2, b2>: extra 2*n2-mode solve on top of the b1 entry
    extra = _resolvent_solve(p0, eq, 2 * n2, 0.0, vectors.F002)
    base = out["h002_b1"]
    out["h002_b2"] = HEval(
        label="h002_b2",
        mode=2 * n2,
        z=0.0,
        forcing=vectors.F002,
        resolvent=extra,
        at0=extra / (2.0 * lpi) + base.at0,
        atm1=extra / (2.0 * lpi) + base.atm1,
    )
    return out


# ---------------------------------------------------------------------------
# normal-form coefficients


@dataclass(frozen=True)
class NFCoeffs:
    """Third-order normal-form coefficient set.

    f11_11/f11_21 (complex) and f13_12/f13_22 (real): linear response of
    the two critical eigenvalues to the delay and diffusion offsets.
    g11_210/g11_102 (complex) and g13_111/g13_003 (real): the four cubic
    interaction coefficients. `f2`/`f3` retain the raw projection
    scalars, `h` the six center-manifold correction evaluations.
    """

    f11_11: complex
    f11_21: complex
    f13_12: float
    f13_22: float
    g11_210: complex
    g11_102: complex
    g13_111: float
    g13_003: float
    f2: Mapping[str, complex]
    f3: Mapping[str, complex]
    h: Mapping[str, HEval]
    vectors: AppendixVectors


def _require_real(value: complex, label: str) -> float:
    if abs(value.imag) > 1e-10:
        raise InvariantViolationError(
            f"{label} must be real (zero-mode data), got imaginary part {value.imag}"
        )
    return float(value.real)


def nf_coeffs(
    p: ModelParams, eq: Equilibrium, ed: EigenData, dt: DerivTable
) -> NFCoeffs:
    """Assemble the third-order normal-form coefficients.

    Parameter-derivative coefficients use d/dtau of the linear parts
    (L1, L2 blocks and the diffusion matrix) and d/dd of the weighted
    diffusion matrix (tau*diag(1, 0)); the Laplacian terms are included
    with their mode factors (they vanish at the Hopf mode n1 = 0). Cubic
    coefficients combine the third-order projections, the
    quadratic-interaction bracket with weight 3/(2*i*sigma), and the
    S-operator applications to the h-components with weight 3/2.
    """
    p0 = replace(p, tau=ed.th.tau0, d=ed.th.d0)
    diff, l1, l2 = _linear_parts(p0, eq)
    th = ed.th
    tau0 = th.tau0
    sigma = ed.sigma
    lpi = p.l * math.pi
    sq = math.sqrt(lpi)
    s1 = (th.n1 / p.l) ** 2
    s2 = (th.n2 / p.l) ** 2
    psi1 = ed.psi1_at0()
    psi2 = ed.psi2_at0()
    phi1_0 = ed.phi1(0.0)
    phi1_m1 = ed.phi1(-1.0)
    phi2 = ed.p.astype(complex)
    em = cmath.exp(-1j * sigma)

    # d/dtau of (-(n/l)^2*tau*D + tau*L1 [at 0] + tau*L2 [at -1]) acting on phi
    f11_11 = 2.0 * complex(
        np.dot(psi1, -s1 * diff @ phi1_0 + l1 @ phi1_0 + l2 @ phi1_m1)
    )
    # d/dd: only the diffusion matrix depends on d
    ddiff_dd = tau0 * np.diag([1.0, 0.0])
    f11_21 = 2.0 * complex(np.dot(psi1, -s1 * ddiff_dd @ phi1_0))
    f13_12 = 2.0 * complex(
        np.dot(psi2, -s2 * diff @ phi2 + l1 @ phi2 + l2 @ phi2)
    )
    f13_22 = 2.0 * complex(np.dot(psi2, -s2 * ddiff_dd @ phi2))

    av = appendix_vectors(ed, dt)
    h = h_components(p, eq, ed, av)

    f2 = {
        "f11_200": complex(np.dot(psi1, av.F200)) / sq,
        "f11_110": complex(np.dot(psi1, av.F110)) / sq,
        "f11_020": complex(np.dot(psi1, av.F020)) / sq,
        "f11_002": complex(np.dot(psi1, av.F002)) / sq,
        "f13_101": complex(np.dot(psi2, av.F101)) / sq,
        "f13_011": complex(np.dot(psi2, av.F011)) / sq,
    }
    f3 = {
        "f11_210": complex(np.dot(psi1, av.F210)) / lpi,
        "f11_102": complex(np.dot(psi1, av.F102)) / lpi,
        "f13_111": complex(np.dot(psi2, av.F111)) / lpi,
        "f13_003": _CUBIC_SELF_WEIGHT * complex(np.dot(psi2, av.F003)) / lpi,
    }
    f12_200 = f2["f11_200"].conjugate()
    f12_110 = f2["f11_110"].conjugate()
    f12_002 = f2["f11_002"].conjugate()

    def s_apply(at0_mat, atm1_mat, heval: HEval) -> np.ndarray:
        return at0_mat @ heval.at0 + atm1_mat @ heval.atm1

    sz1 = (av.S_z1_at0, av.S_z1_atm1)
    sz1bar = (np.conj(av.S_z1_at0), np.conj(av.S_z1_atm1))
    sz2 = (av.S_z2_at0, av.S_z2_atm1)
    bracket_w = 3.0 / (2j * sigma)

    g11_210 = (
        f3["f11_210"]
        + bracket_w
        * (
            -f2["f11_110"] * f2["f11_200"]
            + f2["f11_110"] * f12_110
            + (2.0 / 3.0) * f2["f11_020"] * f12_200
        )
        + 1.5
        * complex(
            np.dot(
                psi1,
                s_apply(*sz1, h["h110_b1"]) + s_apply(*sz1bar, h["h200_b1"]),
            )
        )
    )
    g11_102 = (
        f3["f11_102"]
        + bracket_w
        * (
            -2.0 * f2["f11_002"] * f2["f11_200"]
            + f12_002 * f2["f11_110"]
            + 2.0 * f2["f11_002"] * f2["f13_101"]
        )
        + 1.5
        * complex(
            np.dot(
                psi1,
                s_apply(*sz1, h["h002_b1"]) + s_apply(*sz2, h["h101_b2b1"]),
            )
        )
    )
    # Quadratic-interaction bracket: the z1- and z2-chain contributions
    # through the mixed second-order terms combine to coefficient -1 on
    # f13_101*f11_110 (the z2-chain pair cancels), which also makes the
    # combination conjugation-symmetric, hence real.
    g13_111 = (
        f3["f13_111"]
        + bracket_w
        * (-f2["f13_101"] * f2["f11_110"] + f2["f13_011"] * f12_110)
        + 1.5
        * complex(
            np.dot(
                psi2,
                s_apply(*sz1, h["h011_b1b2"])
                + s_apply(*sz1bar, h["h101_b2b1"])
                + s_apply(*sz2, h["h110_b2"]),
            )
        )
    )
    g13_003 = (
        f3["f13_003"]
        + bracket_w
        * (-f2["f11_002"] * f2["f13_101"] + f12_002 * f2["f13_011"])
        + 1.5 * complex(np.dot(psi2, s_apply(*sz2, h["h002_b2"])))
    )

    return NFCoeffs(
        f11_11=f11_11,
        f11_21=f11_21,
        f13_12=_require_real(f13_12, "f13_12"),
        f13_22=_require_real(f13_22, "f13_22"),
        g11_210=g11_210,
        g11_102=g11_102,
        g13_111=_require_real(g13_111, "g13_111"),
        g13_003=_require_real(g13_003, "g13_003"),
        f2=MappingProxyType(f2),
        f3=MappingProxyType(f3),
        h=MappingProxyType(h),
        vectors=av,
    )


# ---------------------------------------------------------------------------
# amplitude-system coefficients


@dataclass(frozen=True)
class ParamMap:
    """Linear map (tau_eps, d_eps) -> real."""

    c_tau: float
    c_d: float

    def __call__(self, tau_eps: float, d_eps: float) -> float:
        return self.c_tau * tau_eps + self.c_d * d_eps


@dataclass(frozen=True)
class AmplitudeSystem:
    """Coefficients of the planar amplitude system

        d(rho)/dt~ = rho * (eps1 + rho^2 + b*eta^2),
        d(eta)/dt~ = eta * (eps2 + c*rho^2 + d_hat*eta^2),

    where t~ = t/epsilon folds in the orientation sign
    epsilon = sign(Re g11_210) and eps1/eps2 are linear in
    (tau_eps, d_eps) through the two unfolding maps."""

    eps1_map: ParamMap
    eps2_map: ParamMap
    b: float
    c: float
    d_hat: float
    epsilon: float
    d_hat_minus_bc: float


def amplitude_system(nf: NFCoeffs, th: THPoint) -> AmplitudeSystem:
    """Fold the normal-form coefficients into the amplitude-system set.

    epsilon = sign(Re g11_210); eps1 = (epsilon/2)(Re f11_11 * tau_eps +
    Re f11_21 * d_eps); eps2 = (epsilon/2)(f13_12 * tau_eps + f13_22 *
    d_eps); b = epsilon*Re(g11_102)/|g13_003|;
    c = epsilon*g13_111/|Re g11_210|; d_hat = epsilon*sign(g13_003).
    """
    re_g210 = nf.g11_210.real
    if abs(re_g210) < 1e-14:
        raise DegenerateNormalFormError(
            f"Re g11_210 = {re_g210}: cubic Hopf coefficient degenerate"
        )
    if abs(nf.g13_003) < 1e-14:
        raise DegenerateNormalFormError(
            f"g13_003 = {nf.g13_003}: cubic pitchfork coefficient degenerate"
        )
    eps = math.copysign(1.0, re_g210)
    b = eps * nf.g11_102.real / abs(nf.g13_003)
    c = eps * nf.g13_111 / abs(re_g210)
    d_hat = math.copysign(1.0, eps * nf.g13_003)
    d_hat_minus_bc = d_hat - b * c
    if abs(d_hat_minus_bc) < 1e-12:
        raise DegenerateNormalFormError(
            f"d_hat - b*c = {d_hat_minus_bc}: unfolding degenerate"
        )
    return AmplitudeSystem(
        # + 0.0 normalizes negative zeros for clean serialization
        eps1_map=ParamMap(0.5 * eps * nf.f11_11.real + 0.0, 0.5 * eps * nf.f11_21.real + 0.0),
        eps2_map=ParamMap(0.5 * eps * nf.f13_12 + 0.0, 0.5 * eps * nf.f13_22 + 0.0),
        b=b,
        c=c,
        d_hat=d_hat,
        epsilon=eps,
        d_hat_minus_bc=d_hat_minus_bc,
    )


# ---------------------------------------------------------------------------
# one-call pipeline


@dataclass(frozen=True)
class NormalFormResult:
    """Everything the reduction produces, from the critical point down to
    the amplitude-system coefficients. params_at_critical carries
    (tau, d) = (tau0, d0)."""

    params_at_critical: ModelParams
    eq: Equilibrium
    th: THPoint
    eigen: EigenData
    table: DerivTable
    coeffs: NFCoeffs
    asys: AmplitudeSystem


def normal_form_at(
    p: ModelParams, settings: NumericalSettings = DEFAULT_SETTINGS
) -> NormalFormResult:
    """Run the full reduction pipeline at the codimension-two point implied
    by (r, gamma, alpha, l); p.tau and p.d are ignored."""
    eq = positive_equilibrium(p)
    th = turing_hopf_point(p, eq, settings)
    p0 = replace(p, tau=th.tau0, d=th.d0)
    ed = eigen_data(p0, eq, th, settings)
    table = deriv_table(p0, eq)
    coeffs = nf_coeffs(p0, eq, ed, table)
    asys = amplitude_system(coeffs, th)
    return NormalFormResult(
        params_at_critical=p0,
        eq=eq,
        th=th,
        eigen=ed,
        table=table,
        coeffs=coeffs,
        asys=asys,
    )
