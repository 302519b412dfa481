"""Linear analysis: characteristic function, Hopf branches, diffusion
threshold, transversality certificates, the codimension-two point, and
the rightmost-root scan — cross-checked against matrix-determinant and
root-tracking oracles."""

from __future__ import annotations

import math
from dataclasses import replace

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from musselbed import (
    InvariantViolationError,
    ModelParams,
    NoHopfModeError,
    char_value,
    gamma_membership,
    hopf_branch,
    hopf_branches,
    hopf_frequency,
    hopf_transversality,
    mode_coeffs,
    positive_equilibrium,
    rightmost_roots,
    spatial_scale,
    turing_hopf_point,
    turing_threshold,
    turing_transversality,
)
from musselbed.spectrum import char_derivative, mode_length, turing_curve
from oracles import (
    char_det,
    hopf_crossings,
    hopf_drift,
    threshold_curve_point,
    turing_drift,
)


def _oracle_args(p, eq):
    return (p.r, p.gamma, p.alpha, p.d, p.l, eq.m_star, eq.a_star)


@st.composite
def wedge_params(draw) -> ModelParams:
    alpha = draw(st.floats(0.1, 0.9))
    r = draw(st.floats(1.01, min(0.995 / alpha, 4.0)))
    gamma = draw(st.floats(0.5, 8.0))
    d = draw(st.floats(5e-3, 0.5))
    tau = draw(st.floats(0.0, 8.0))
    l = draw(st.floats(1.0, 8.0))
    return ModelParams(r=r, gamma=gamma, alpha=alpha, d=d, tau=tau, l=l)


class TestCharacteristicFunction:
    @given(
        p=wedge_params(),
        n=st.integers(0, 8),
        lam_re=st.floats(-1.0, 1.0),
        lam_im=st.floats(-3.0, 3.0),
    )
    def test_matches_matrix_determinant_oracle(self, p, n, lam_re, lam_im):
        eq = positive_equilibrium(p)
        lam = complex(lam_re, lam_im)
        mine = char_value(p, eq, n, lam, p.tau)
        ref = char_det(*_oracle_args(p, eq), n, lam, p.tau)
        assert mine == pytest.approx(ref, rel=1e-10, abs=1e-10)

    @given(
        p=wedge_params(),
        n=st.integers(0, 6),
        lam_re=st.floats(-0.5, 0.5),
        lam_im=st.floats(0.0, 2.0),
    )
    def test_derivative_matches_finite_difference(self, p, n, lam_re, lam_im):
        eq = positive_equilibrium(p)
        lam = complex(lam_re, lam_im)
        h = 1e-6
        fd = (
            char_value(p, eq, n, lam + h, p.tau)
            - char_value(p, eq, n, lam - h, p.tau)
        ) / (2.0 * h)
        assert char_derivative(p, eq, n, lam, p.tau) == pytest.approx(
            fd, rel=1e-6, abs=1e-8
        )

    def test_mode_zero_coefficients(self, params, eq):
        mc = mode_coeffs(params, eq, 0)
        assert mc.D_n == 0.0
        assert mc.T_n == pytest.approx(params.alpha + eq.m_star, rel=1e-14)
        assert mc.B == pytest.approx(
            -params.gamma * params.r**2 * eq.a_star**2 * eq.m_star, rel=1e-14
        )
        assert mc.M_n == pytest.approx(
            params.r * eq.a_star * eq.m_star * (1.0 - params.alpha * params.r),
            rel=1e-14,
        )

    def test_mode_index_validation(self, params, eq):
        with pytest.raises(ValueError):
            mode_coeffs(params, eq, -1)
        with pytest.raises(ValueError):
            mode_coeffs(params, eq, 1.5)


class TestHopfBranches:
    def test_frequencies_match_crossing_oracle(self, params, eq, th):
        p0 = replace(params, d=th.d0)
        for n in range(3):
            crossings = hopf_crossings(*_oracle_args(p0, eq), n, 2)
            assert len(crossings) == 1
            omega_ref, taus_ref = crossings[0]
            branch = hopf_branch(p0, eq, n, j_max=2)
            assert branch.omega == pytest.approx(omega_ref, rel=1e-10)
            assert np.allclose(branch.taus, taus_ref, rtol=1e-10)

    def test_admissible_modes_at_critical_diffusion(self, params, eq, th):
        p0 = replace(params, d=th.d0)
        branches = hopf_branches(p0, eq, n_max=10, j_max=0)
        got = {b.n: (b.omega, b.taus[0]) for b in branches}
        assert set(got) == {0, 1, 2}
        assert got[0][0] == pytest.approx(0.0749471, abs=1e-6)
        assert got[0][1] == pytest.approx(7.084102, abs=1e-4)
        assert got[1][0] == pytest.approx(0.0668237, abs=1e-6)
        assert got[1][1] == pytest.approx(9.128144, abs=1e-4)
        assert got[2][0] == pytest.approx(0.0439928, abs=1e-6)
        assert got[2][1] == pytest.approx(20.155812, abs=1e-4)
        # The minimal critical delay is attained by the uniform mode.
        assert min(got.values(), key=lambda pair: pair[1]) == got[0]

    def test_branch_structure_at_template_diffusion(self, params, eq):
        """Below the diffusion threshold the admissible modes split into
        the classical low-wavenumber band and the steady-unstable band;
        the membership condition is M_n^2 > D_n^2 either way."""
        branches = hopf_branches(params, eq, n_max=12, j_max=3)
        assert [b.n for b in branches] == [0, 1, 2, 3, 6, 7]
        for n in range(13):
            mc = mode_coeffs(params, eq, n)
            admissible = hopf_frequency(params, eq, n) is not None
            assert admissible == (mc.M_n**2 > mc.D_n**2)
        # Capped at the default mode range this is 5 branches, 20 delays.
        capped = hopf_branches(params, eq, n_max=6, j_max=3)
        assert len(capped) == 5
        assert sum(len(b.taus) for b in capped) == 20

    def test_branch_delays_are_characteristic_roots(self, params, eq):
        for branch in hopf_branches(params, eq, n_max=12, j_max=3):
            for tau_c in branch.taus:
                res = char_value(params, eq, branch.n, 1j * branch.omega, tau_c)
                assert abs(res) < 1e-9
            spacing = np.diff(branch.taus)
            assert np.allclose(spacing, 2.0 * math.pi / branch.omega, rtol=1e-12)

    def test_admissibility_boundary(self, params, eq, th):
        """With the steady dispersion nonnegative (d at or above the
        threshold), modes admit a Hopf frequency exactly below the
        wavenumber cap S."""
        for d in (th.d0, 0.08, 0.2):
            p = replace(params, d=d)
            n_cap = p.l * math.sqrt(spatial_scale(p, eq))
            for n in range(int(n_cap) + 5):
                admissible = hopf_frequency(p, eq, n) is not None
                assert admissible == (n < n_cap)
                assert admissible == (mode_length(p, eq, n) < p.l)

    def test_no_hopf_mode_raises(self, params, eq):
        with pytest.raises(NoHopfModeError):
            hopf_branch(params, eq, 30)


class TestTuringThreshold:
    def test_matches_blackbox_optimizer(self, params, eq):
        tt = turing_threshold(params, eq)
        d0_ref, k2_ref, n2_ref = threshold_curve_point(
            params.r, params.gamma, params.alpha, params.l, eq.m_star, eq.a_star
        )
        assert tt.d0 == pytest.approx(d0_ref, rel=1e-10)
        assert tt.k2_star == pytest.approx(k2_ref, rel=1e-6)
        assert tt.n2 == n2_ref == 6

    def test_tangency_structure(self, params, eq):
        """At d0 the zero-eigenvalue dispersion curve h(s) has a double
        root at k2_star: h = d0*(s - k2_star)^2."""
        tt = turing_threshold(params, eq)
        p0 = replace(params, d=tt.d0)
        for s in (0.5 * tt.k2_star, tt.k2_star, 1.5 * tt.k2_star):
            n_eff = params.l * math.sqrt(s)
            h_val = char_det(
                params.r, params.gamma, params.alpha, tt.d0, params.l,
                eq.m_star, eq.a_star, n_eff, 0.0, 1.0,
            ).real
            assert h_val == pytest.approx(
                tt.d0 * (s - tt.k2_star) ** 2, abs=1e-10
            )
        assert gamma_membership(p0, eq).marginal

    def test_membership_flips_across_threshold(self, params, eq):
        tt = turing_threshold(params, eq)
        assert gamma_membership(replace(params, d=1.02 * tt.d0), eq)
        assert not gamma_membership(replace(params, d=0.98 * tt.d0), eq)

    def test_threshold_curve_rows(self, params, eq):
        alphas = np.linspace(0.3, 0.88, 7)
        rows = turing_curve(params, positive_equilibrium, alphas)
        assert len(rows) == 7
        for alpha, r, d0, n2, k2_star in rows:
            assert r == params.r
            p_a = replace(params, alpha=alpha)
            tt = turing_threshold(p_a, positive_equilibrium(p_a))
            assert d0 == pytest.approx(tt.d0, rel=1e-14)
            assert n2 == tt.n2
            assert k2_star == pytest.approx(tt.k2_star, rel=1e-14)

    @settings(max_examples=25)
    @given(p=wedge_params())
    def test_threshold_consistency_on_wedge(self, p):
        eq = positive_equilibrium(p)
        try:
            tt = turing_threshold(p, eq)
        except InvariantViolationError:
            # No spatial instability for this parameter draw.
            return
        assert tt.d0 > 0.0 and tt.k2_star > 0.0 and tt.n2 >= 1
        # Marginality at d0, strict stability just above.
        assert gamma_membership(replace(p, d=tt.d0 * 1.05), eq)
        assert not gamma_membership(replace(p, d=tt.d0 * 0.95), eq)


class TestTransversality:
    def test_hopf_certificate_sign_matches_root_tracking(self, params, eq, th):
        p0 = replace(params, d=th.d0)
        cert = hopf_transversality(p0, eq, th.n1, th.tau0)
        assert cert > 0.0
        drift = hopf_drift(*_oracle_args(p0, eq), th.n1, th.tau0, th.omega0)
        assert drift > 0.0

    def test_turing_certificate_matches_root_tracking(self, params, eq, th):
        p0 = replace(params, d=th.d0)
        cert = turing_transversality(p0, eq, th.n2, th.tau0)
        assert cert.dlambda_dd < 0.0
        assert cert.simplicity_witness > 0.0
        drift = turing_drift(
            params.r, params.gamma, params.alpha, th.d0, params.l,
            eq.m_star, eq.a_star, th.n2, th.tau0,
        )
        assert cert.dlambda_dd == pytest.approx(drift, rel=1e-5)


class TestCodimensionTwoPoint:
    def test_reference_values(self, th):
        assert th.tau0 == pytest.approx(7.084102, abs=1e-4)
        assert th.d0 == pytest.approx(0.0531255, abs=1e-6)
        assert th.n1 == 0
        assert th.n2 == 6
        assert th.omega0 == pytest.approx(0.0749471, abs=1e-6)

    def test_both_criticalities_hold_simultaneously(self, params, eq, th):
        p0 = replace(params, d=th.d0)
        assert abs(char_value(p0, eq, th.n1, 1j * th.omega0, th.tau0)) < 1e-9
        assert abs(char_value(p0, eq, th.n2, 0.0, th.tau0)) < 2e-7

    def test_deterministic_and_fast(self, params, eq):
        import time

        start = time.perf_counter()
        a = turing_hopf_point(params, eq)
        b = turing_hopf_point(params, eq)
        assert time.perf_counter() - start < 1.0
        assert a == b


class TestRightmostRoots:
    def test_no_delay_reduces_to_quadratic(self, params, eq):
        p = replace(params, tau=0.0)
        for n in (0, 3, 6):
            roots = rightmost_roots(p, eq, n, 0.0, box=(-5.0, 1.0, 0.0, 5.0))
            assert roots
            for root in roots:
                ref = char_det(*_oracle_args(p, eq), n, root, 0.0)
                assert abs(ref) < 1e-9

    def test_critical_roots_found_at_organizing_point(self, params, eq, th):
        p0 = replace(params, d=th.d0, tau=th.tau0)
        hopf_roots = rightmost_roots(p0, eq, th.n1, th.tau0)
        assert any(
            abs(z - 1j * th.omega0) < 1e-6 for z in hopf_roots
        ), f"pure imaginary pair missing from {hopf_roots}"
        steady_roots = rightmost_roots(p0, eq, th.n2, th.tau0)
        assert any(abs(z) < 1e-6 for z in steady_roots)

    def test_all_roots_satisfy_characteristic_equation(self, params, eq, th):
        p0 = replace(params, d=th.d0, tau=th.tau0)
        for n in (0, 2, 6, 9):
            for root in rightmost_roots(p0, eq, n, th.tau0):
                assert abs(char_value(p0, eq, n, root, th.tau0)) < 1e-10

    def test_bad_box_rejected(self, params, eq):
        with pytest.raises(ValueError):
            rightmost_roots(params, eq, 0, 1.0, box=(1.0, -1.0, 0.0, 5.0))
        with pytest.raises(ValueError):
            rightmost_roots(params, eq, 0, 1.0, box=(-1.0, 1.0, -2.0, 5.0))
