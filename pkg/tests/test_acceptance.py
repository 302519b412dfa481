"""End-to-end release gate at the reference parameter set.

One module asserts everything a release must guarantee at r = 1.10,
gamma = 4, alpha = 0.654, l = 6:

* the coexistence state and the organizing point land on their
  reference values within stated tolerances and runtime caps;
* the reduced planar system carries the reference coefficients, the
  reference secondary-line slopes, and a six-sector region geometry;
* a timed certificate bundle re-derives the spectral facts the
  reduction rests on (eigen-pair residuals, adjoint normalizations,
  interaction-vector cross-checks, correction-solve residuals,
  crossing directions, and a rightmost-root scan);
* the full delayed simulations reproduce, region by region, the
  attractor the planar reduction predicts, staying positive and
  bounded within their runtime budgets.
"""

from __future__ import annotations

import math
import time
from dataclasses import replace
from types import SimpleNamespace

import numpy as np
import pytest

from musselbed import (
    bifurcation_lines,
    bilinear_form_exponential,
    char_matrix,
    char_value,
    classify_pattern,
    classify_region,
    equilibria,
    hopf_branch,
    hopf_transversality,
    monitor_wellposedness,
    normal_form_at,
    positive_equilibrium,
    rightmost_roots,
    turing_hopf_point,
    turing_transversality,
)
from oracles import contraction_vectors, sympy_tensors

SCENARIO_NAMES = (
    "decay_checkpoint",
    "decay",
    "oscillation",
    "pattern",
    "bistable_high_algae",
    "bistable_low_algae",
)


class TestReferenceNumbers:
    """Golden values for the coexistence state, the organizing point,
    the planar coefficients, and the secondary-line slopes."""

    def test_coexistence_state_values_and_runtime(self, params):
        start = time.perf_counter()
        eq = positive_equilibrium(params)
        elapsed = time.perf_counter() - start
        assert eq.m_star == pytest.approx(0.233073, abs=1e-5)
        assert eq.a_star == pytest.approx(0.737257, abs=1e-5)
        assert elapsed < 1.0

    def test_delay_threshold_and_characteristic_residual(self, params, eq):
        start = time.perf_counter()
        th = turing_hopf_point(params, eq)
        elapsed = time.perf_counter() - start
        assert th.n1 == 0
        assert th.tau0 == pytest.approx(7.084102, abs=1e-4)
        p_crit = replace(params, d=th.d0)
        residual = abs(char_value(p_crit, eq, th.n1, 1j * th.omega0, th.tau0))
        assert residual < 1e-9
        assert elapsed < 1.0

    def test_diffusion_threshold_and_critical_mode(self, params, eq):
        start = time.perf_counter()
        th = turing_hopf_point(params, eq)
        elapsed = time.perf_counter() - start
        assert th.n2 == 6
        assert th.d0 == pytest.approx(0.0531255, abs=1e-6)
        assert elapsed < 1.0

    def test_planar_coefficients_and_runtime(self, params):
        start = time.perf_counter()
        asys = normal_form_at(params).asys
        elapsed = time.perf_counter() - start
        assert asys.epsilon == -1.0
        assert asys.d_hat == 1.0
        assert asys.b == pytest.approx(1.582903, rel=1e-2)
        assert asys.c == pytest.approx(0.993790, rel=1e-2)
        assert asys.d_hat_minus_bc == pytest.approx(-0.573073, rel=1e-2)
        assert asys.eps1_map.c_tau == pytest.approx(-1.20727e-2, rel=1e-2)
        assert asys.eps2_map.c_tau == pytest.approx(1.629874e-8, rel=1e-2)
        assert asys.eps2_map.c_d == pytest.approx(6.085844, rel=1e-2)
        assert elapsed < 1.0

    def test_secondary_line_slopes(self, asys):
        slopes = {line.name: line.slope for line in bifurcation_lines(asys)}
        assert slopes["T1"] == pytest.approx(-1.253237e-3, rel=1e-2)
        assert slopes["T2"] == pytest.approx(-1.971431e-3, rel=1e-2)


class TestRegionGeometry:
    """Six sample offsets hit the regions they are expected to hit, and
    a circular sweep around the organizing point meets exactly six
    connected angular sectors in the expected cyclic order."""

    SAMPLES = (
        (-0.5, 0.01, "D1"),
        (0.5, 0.01, "D2"),
        (0.5, -0.0005, "D3"),
        (0.5, -0.0009, "D4"),
        (0.5, -0.002, "D5"),
        (-0.5, -0.002, "D6"),
    )

    @pytest.mark.parametrize("tau_eps, d_eps, expected", SAMPLES)
    def test_sample_offsets_land_in_their_regions(
        self, asys, tau_eps, d_eps, expected
    ):
        result = classify_region(asys, tau_eps, d_eps)
        assert result.label == expected
        assert not result.on_boundary

    def test_sweep_meets_exactly_six_sectors_in_order(self, asys):
        # Region membership is invariant along rays from the organizing
        # point, so unit-circle samples see every sector.  A uniform
        # grid alone would step over the narrow sectors pinched between
        # nearly parallel lines; bracketing samples just off each line's
        # two rays guarantee at least one interior sample per sector.
        delta = 2e-5
        angles = {-math.pi + 2.0 * math.pi * k / 144.0 for k in range(144)}
        for line in bifurcation_lines(asys):
            if line.slope is None:
                rays = (math.pi / 2.0, -math.pi / 2.0)
            else:
                base = math.atan(line.slope)
                rays = (base, base + math.pi if base < 0.0 else base - math.pi)
            for ray in rays:
                angles.add(ray - delta)
                angles.add(ray + delta)

        labels = []
        for theta in sorted(angles):
            result = classify_region(asys, math.cos(theta), math.sin(theta))
            if not result.on_boundary:
                labels.append(result.label)

        runs = [labels[0]]
        for label in labels[1:]:
            if label != runs[-1]:
                runs.append(label)
        if len(runs) > 1 and runs[0] == runs[-1]:
            runs.pop()

        assert len(runs) == 6
        assert set(runs) == {"D1", "D2", "D3", "D4", "D5", "D6"}
        start = runs.index("D2")
        rotated = runs[start:] + runs[:start]
        assert rotated == ["D2", "D1", "D6", "D5", "D4", "D3"]


@pytest.fixture(scope="class")
def bundle(params, eq):
    """Timed bundle of every spectral certificate the planar reduction
    rests on; computed once, asserted piecewise below."""
    start = time.perf_counter()
    res = normal_form_at(params)
    th, ed = res.th, res.eigen
    p0 = res.params_at_critical

    lam_h = 1j * ed.sigma
    pair_hopf = bilinear_form_exponential(
        p0, eq, ed.M1 * ed.q_star, -lam_h, ed.q, lam_h
    )
    pair_steady = bilinear_form_exponential(
        p0, eq,
        ed.M2 * ed.p_star.astype(complex), -ed.lambda_zero,
        ed.p.astype(complex), ed.lambda_zero,
    )

    d2, d3 = sympy_tensors(p0.r, p0.gamma, eq.m_star, eq.a_star, p0.tau)
    vecs, mats = contraction_vectors(
        d2, d3, complex(ed.q[1]), float(ed.p[1]), ed.sigma
    )

    p_crit = replace(params, d=th.d0)
    crossings = []
    for n in (0, 1, 2):
        branch = hopf_branch(p_crit, eq, n, j_max=6)
        for tau_c in branch.taus:
            crossings.append(
                (n, tau_c, hopf_transversality(p_crit, eq, n, tau_c))
            )
    diffusion_cert = turing_transversality(p_crit, eq, th.n2, th.tau0)
    scan = {n: rightmost_roots(p_crit, eq, n, th.tau0) for n in range(21)}
    elapsed = time.perf_counter() - start

    return SimpleNamespace(
        res=res,
        p0=p0,
        pair_hopf=pair_hopf,
        pair_steady=pair_steady,
        vecs=vecs,
        mats=mats,
        crossings=crossings,
        diffusion_cert=diffusion_cert,
        scan=scan,
        elapsed=elapsed,
    )


class TestSpectralCertificates:
    """Assertions over the certificate bundle: each spectral fact at
    its stated tolerance, plus the bundle-wide runtime budget."""

    def test_eigen_pair_residuals(self, bundle, eq):
        ed, th = bundle.res.eigen, bundle.res.th
        mat_h = char_matrix(bundle.p0, eq, th.n1, 1j * ed.sigma)
        assert np.abs(mat_h @ ed.q).max() < 1e-10
        assert np.abs(ed.q_star @ mat_h).max() < 1e-10
        mat_s = char_matrix(bundle.p0, eq, th.n2, ed.lambda_zero)
        assert np.abs(mat_s @ ed.p).max() < 1e-10
        assert np.abs(ed.p_star @ mat_s).max() < 1e-10

    def test_adjoint_normalizations(self, bundle):
        assert abs(bundle.pair_hopf - 1.0) < 1e-8
        assert abs(bundle.pair_steady - 1.0) < 1e-8

    def test_interaction_vectors_match_contraction_oracle(self, bundle):
        vectors = bundle.res.coeffs.vectors
        assert set(bundle.vecs) == {
            "F200", "F110", "F101", "F002", "F020",
            "F011", "F210", "F102", "F111", "F003",
        }
        for key, expected in bundle.vecs.items():
            np.testing.assert_allclose(
                getattr(vectors, key), expected, rtol=1e-8, atol=1e-12
            )
        np.testing.assert_allclose(
            vectors.S_z1_at0, bundle.mats["z1"][0], rtol=1e-8
        )
        np.testing.assert_allclose(
            vectors.S_z1_atm1, bundle.mats["z1"][1], rtol=1e-8
        )
        np.testing.assert_allclose(
            vectors.S_z2_at0, bundle.mats["z2"][0], rtol=1e-8
        )
        np.testing.assert_allclose(
            vectors.S_z2_atm1, bundle.mats["z2"][1], rtol=1e-8
        )

    def test_correction_solve_residuals(self, bundle, eq):
        for label, heval in bundle.res.coeffs.h.items():
            mat = char_matrix(bundle.p0, eq, heval.mode, heval.z)
            residual = np.abs(mat @ heval.resolvent - heval.forcing).max()
            scale = max(1.0, float(np.abs(heval.forcing).max()))
            assert residual < 1e-11 * scale, label

    def test_delay_crossings_all_transversal(self, bundle):
        assert len(bundle.crossings) >= 20
        for n, tau_c, value in bundle.crossings:
            assert tau_c > 0.0, (n, tau_c)
            assert value > 0.0, (n, tau_c)

    def test_diffusion_crossing_direction(self, bundle):
        assert bundle.diffusion_cert.dlambda_dd < 0.0
        assert bundle.diffusion_cert.simplicity_witness > 0.0

    def test_no_extra_unstable_roots_across_modes(self, bundle):
        assert set(bundle.scan) == set(range(21))
        for n, roots in bundle.scan.items():
            worst = max((z.real for z in roots), default=-math.inf)
            assert worst <= 1e-6, (n, worst)

    def test_certificate_budget(self, bundle):
        assert bundle.elapsed < 30.0


class TestSimulatedOutcomes:
    """Full delayed runs at the six scenario offsets reach the expected
    asymptotic states and never violate positivity or the algae bound."""

    def test_relaxation_checkpoint_deviation(self, run_scenario):
        tr = run_scenario("decay_checkpoint").trajectory
        assert tr.t[-1] >= 3000.0 - 2.0 * tr.dt
        assert float(tr.sup_deviation_m()[-1]) < 1e-3
        assert float(tr.sup_deviation_a()[-1]) < 1e-3

    def test_uniform_oscillation_survives_small_diffusion_offset(
        self, run_scenario, th
    ):
        run = run_scenario("oscillation")
        outcome = classify_pattern(run.trajectory, run.config, omega0=th.omega0)
        assert outcome.label == "HomogeneousPeriodic"

    def test_stationary_pattern_survives_larger_diffusion_offset(
        self, run_scenario, th
    ):
        run = run_scenario("pattern")
        outcome = classify_pattern(run.trajectory, run.config, omega0=th.omega0)
        assert outcome.label == "InhomogeneousSteady"
        assert outcome.dominant_mode == 6

    def test_bistable_offsets_high_algae_start_oscillates(self, run_scenario, th):
        run = run_scenario("bistable_high_algae")
        outcome = classify_pattern(run.trajectory, run.config, omega0=th.omega0)
        assert outcome.label == "HomogeneousPeriodic"

    def test_bistable_offsets_low_algae_start_patterns(self, run_scenario, th):
        run = run_scenario("bistable_low_algae")
        outcome = classify_pattern(run.trajectory, run.config, omega0=th.omega0)
        assert outcome.label == "InhomogeneousSteady"
        assert outcome.dominant_mode == 6

    @pytest.mark.parametrize("name", SCENARIO_NAMES)
    def test_positivity_and_algae_bound(self, run_scenario, name):
        report = monitor_wellposedness(run_scenario(name).trajectory)
        assert report.min_m >= -1e-9
        assert report.min_a >= -1e-9
        assert report.max_a <= report.a_bound + 1e-9

    @pytest.mark.parametrize("name", SCENARIO_NAMES)
    def test_runtime_budget(self, run_scenario, name):
        assert run_scenario(name).elapsed <= 300.0


class TestReductionPredictsSimulation:
    """In each region sampled by a full run with a single attractor, the
    unique stable state of the planar reduction names the asymptotic
    state the delayed simulation actually reaches."""

    PREDICTED_LABEL = {
        "E1": "HomogeneousSteady",
        "E2": "HomogeneousPeriodic",
        "E3": "InhomogeneousSteady",
    }

    @pytest.mark.parametrize("name", ["decay", "oscillation", "pattern"])
    def test_stable_planar_state_names_the_attractor(
        self, run_scenario, asys, th, name
    ):
        run = run_scenario(name)
        sc = run.scenario
        planar = equilibria(asys, sc.tau_eps, sc.d_eps)
        stable = {
            pt.label.rstrip("+-")
            for pt in planar.points
            if pt.stability == "stable node"
        }
        assert len(stable) == 1
        family = stable.pop()
        outcome = classify_pattern(run.trajectory, run.config, omega0=th.omega0)
        assert outcome.label == self.PREDICTED_LABEL[family]
        if family == "E3":
            assert outcome.dominant_mode == th.n2
