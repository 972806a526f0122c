import math
from fractions import Fraction

import numpy as np
import pytest

from billiard_beta import rigidity
from billiard_beta.geometry import disk, ellipse
from billiard_beta.models import MODEL_TAGS, make_system
from billiard_beta.twist import (
    Configuration,
    MinimizeOptions,
    RotationNumber,
    action,
    action_gradient,
    beta_irrational,
    beta_irrational_result,
    beta_rational,
    convergents,
    equispaced_average_action,
    farey_fractions,
    make_toy_system,
    minimize_periodic,
    quadratic_kinetic,
    trig_potential,
)

SQ3 = math.sqrt(3.0)


def equispaced(q, p, period=2 * math.pi, x0=0.0):
    return Configuration(x0 + np.arange(q) * (p * period / q), p, period)


def toy_system(kappa=0.0):
    ell, ell_d, ell_dd = quadratic_kinetic()
    if kappa == 0.0:
        return make_toy_system(ell, ell_d, ell_dd)
    V, V_d, V_dd = trig_potential([kappa])
    return make_toy_system(ell, ell_d, ell_dd, V, V_d, V_dd)


class TestAction:
    def test_birkhoff_disk_triangle(self):
        sys = make_system(disk(1.0), "birkhoff")
        assert action(sys, equispaced(3, 1)) == pytest.approx(-3 * SQ3, abs=1e-12)

    def test_toy_equispaced(self):
        sys = toy_system()
        for p, q in [(1, 3), (2, 5)]:
            cfg = Configuration(0.1 + np.arange(q) * (p / q), p, 1.0)
            assert action(sys, cfg) == pytest.approx(q * (p / q) ** 2 / 2, abs=1e-14)

    def test_period_translation_invariance(self):
        sys = make_system(ellipse(2, 1), "birkhoff")
        cfg = equispaced(5, 2, x0=0.3)
        assert action(sys, cfg.translated(2 * math.pi)) == pytest.approx(action(sys, cfg), abs=1e-12)

    def test_real_translation_on_disk(self):
        sys = make_system(disk(1.0), "symplectic")
        cfg = equispaced(5, 2, x0=0.0)
        assert action(sys, cfg.translated(0.813)) == pytest.approx(action(sys, cfg), abs=1e-12)

    def test_gap_violation(self):
        sys = make_system(disk(1.0), "outer")
        bad = Configuration(np.array([0.0, 0.5, 0.6]), 1, 2 * math.pi)  # wrap gap > pi
        with pytest.raises(ValueError, match="gap violation"):
            action(sys, bad)


class TestGradient:
    def test_equispaced_disk_is_critical(self):
        sys = make_system(disk(1.0), "birkhoff")
        g = action_gradient(sys, equispaced(4, 1, x0=0.37))
        assert np.abs(g).max() < 1e-13

    def test_matches_finite_differences(self):
        rng = np.random.default_rng(2)
        doms = [disk(1.0), ellipse(2, 1), rigidity.random_domain(rng)]
        for dom in doms:
            for tag in MODEL_TAGS:
                sys = make_system(dom, tag)
                q = 5
                gap = 2 * math.pi / 5 if tag == "birkhoff" else 0.55
                x = np.cumsum(rng.uniform(0.8, 1.2, q)) * gap
                x = x / (x[-1] + gap) * (2 * math.pi - gap)  # keep wrap gap admissible
                cfg = Configuration(x, 1, 2 * math.pi)
                grad = action_gradient(sys, cfg)
                step = 1e-6
                for k in range(q):
                    plus = x.copy()
                    minus = x.copy()
                    plus[k] += step
                    minus[k] -= step
                    fd = (
                        action(sys, Configuration(plus, 1, 2 * math.pi))
                        - action(sys, Configuration(minus, 1, 2 * math.pi))
                    ) / (2 * step)
                    assert abs(fd - grad[k]) < 1e-5

    def test_toy_gradient_is_potential_derivative(self):
        kappa = 0.07
        sys = toy_system(kappa)
        _, V_d, _ = trig_potential([kappa])
        cfg = Configuration(0.1234 + np.arange(5) * 0.4, 2, 1.0)
        g = action_gradient(sys, cfg)
        assert np.abs(g - V_d(cfg.points)).max() < 1e-12


class TestMinimizePeriodic:
    def test_disk_closed_forms(self):
        d = disk(1.0)
        cases = [
            ("birkhoff", 1, 3, -SQ3),
            ("outer", 1, 4, 1.0),
            ("symplectic", 1, 4, -0.5),
            ("fourth", 1, 3, 2 * SQ3),
            ("birkhoff", 1, 2, -2.0),
            ("birkhoff", 2, 5, -2 * math.sin(2 * math.pi / 5)),
        ]
        for tag, p, q, want in cases:
            res = minimize_periodic(make_system(d, tag), p, q)
            assert res.converged
            assert res.beta == pytest.approx(want, abs=1e-10)

    def test_disk_minimizer_is_equispaced(self):
        res = minimize_periodic(make_system(disk(1.0), "birkhoff"), 1, 3)
        gaps = res.config.gaps()
        assert np.abs(gaps - 2 * math.pi / 3).max() < 1e-8

    def test_result_invariants(self):
        res = minimize_periodic(make_system(ellipse(2, 1), "birkhoff"), 1, 3)
        assert res.converged and res.grad_residual < 1e-9
        assert res.starts_tried == 8
        assert 0.0 <= res.config.points[0] < 2 * math.pi
        payload = res.to_json_dict()
        assert set(payload) == {"beta", "points", "winding", "grad_residual", "converged"}
        import json

        assert json.loads(json.dumps(payload))["winding"] == 1

    def test_inadmissible_rotation(self):
        sys = make_system(disk(1.0), "outer")
        with pytest.raises(ValueError, match="gap violation"):
            minimize_periodic(sys, 1, 2)

    def test_deterministic(self):
        sys = make_system(ellipse(2, 1), "symplectic")
        r1 = minimize_periodic(sys, 1, 3, MinimizeOptions(seed=5))
        r2 = minimize_periodic(sys, 1, 3, MinimizeOptions(seed=5))
        assert r1.beta == r2.beta
        assert np.array_equal(r1.config.points, r2.config.points)


class TestBetaIrrational:
    def test_disk_sqrt8(self):
        sys = make_system(disk(1.0), "birkhoff")
        omega = 1 / math.sqrt(8)
        res = beta_irrational_result(sys, omega, 1e-6)
        assert res.converged
        assert res.value == pytest.approx(-2 * math.sin(math.pi * omega), abs=1e-6)
        assert max(q for _, q, _ in res.evaluations) <= 2000

    def test_outer_golden(self):
        sys = make_system(disk(1.0), "outer")
        omega = (math.sqrt(5) - 1) / 4
        assert beta_irrational(sys, omega, 1e-6) == pytest.approx(math.tan(math.pi * omega), abs=1e-6)

    def test_rational_dispatch(self):
        sys = make_system(disk(1.0), "birkhoff")
        assert beta_irrational(sys, 0.25, 1e-6) == pytest.approx(-2 * math.sin(math.pi / 4), abs=1e-12)

    def test_convergents_of_pi(self):
        assert convergents(math.pi, 200)[:3] == [(3, 1), (22, 7), (333, 106)]


class TestEquispacedAverage:
    def test_disk_any_start(self):
        sys = make_system(disk(1.0), "birkhoff")
        for x0 in (0.0, 0.9, 4.2):
            assert equispaced_average_action(sys, 1 / 3, x0) == pytest.approx(-SQ3, abs=1e-12)

    def test_toy_irrational_forgets_potential(self):
        sys = toy_system(0.05)
        omega = 1 / math.sqrt(7)
        assert equispaced_average_action(sys, omega, 0.3) == pytest.approx(omega**2 / 2, abs=1e-10)

    def test_lemma_average_dominates_beta(self):
        rng = np.random.default_rng(23)
        doms = [disk(1.0), ellipse(2, 1)] + [rigidity.random_domain(rng) for _ in range(4)]
        checked = 0
        while checked < 200:
            dom = doms[rng.integers(len(doms))]
            tag = MODEL_TAGS[rng.integers(4)]
            q = int(rng.integers(2, 13))
            p = int(rng.integers(1, q))
            if math.gcd(p, q) != 1 or p / q > 0.49:
                continue
            sys = make_system(dom, tag)
            x0 = float(rng.uniform(0, 2 * math.pi))
            avg = equispaced_average_action(sys, p / q, x0)
            beta = beta_rational(sys, p, q)
            assert avg >= beta - 1e-8
            checked += 1


class TestConvexity:
    def scan(self, sys, include_half):
        grid = farey_fractions(12, include_half=include_half)
        return [(p / q, beta_rational(sys, p, q)) for p, q in grid]

    @pytest.mark.parametrize("tag", MODEL_TAGS)
    def test_disk_beta_convex(self, tag):
        sys = make_system(disk(1.0), tag)
        pts = self.scan(sys, include_half=(tag == "birkhoff"))
        for (r1, b1), (r2, b2), (r3, b3) in zip(pts, pts[1:], pts[2:]):
            chord = b1 + (b3 - b1) * (r2 - r1) / (r3 - r1)
            assert b2 <= chord + 1e-8

    def test_random_domain_beta_convex(self):
        dom = rigidity.sample_random_domains(1, seed=77)[0]
        sys = make_system(dom, "birkhoff")
        pts = self.scan(sys, include_half=True)
        for (r1, b1), (r2, b2), (r3, b3) in zip(pts, pts[1:], pts[2:]):
            chord = b1 + (b3 - b1) * (r2 - r1) / (r3 - r1)
            assert b2 <= chord + 1e-8


class TestToyModel:
    def test_free_beta_is_kinetic(self):
        sys = toy_system()
        for p, q in [(1, 3), (2, 5)]:
            assert beta_rational(sys, p, q) == pytest.approx((p / q) ** 2 / 2, abs=1e-12)

    def test_perturbed_below_free(self):
        sys = toy_system(0.05 / (2 * math.pi))
        assert beta_rational(sys, 1, 3) < 1 / 18

    def test_fixed_point_beta(self):
        sys = toy_system(0.05 / (2 * math.pi))
        res = minimize_periodic(sys, 0, 1)
        assert res.converged
        assert res.beta == pytest.approx(-0.05 / (2 * math.pi), abs=1e-10)

    def test_gap_vanishes_with_potential(self):
        grid = farey_fractions(6)
        max_gaps = []
        for kappa in (0.05, 0.01, 0.002):
            sys = toy_system(kappa)
            max_gaps.append(max((p / q) ** 2 / 2 - beta_rational(sys, p, q) for p, q in grid))
        assert max_gaps[0] > max_gaps[1] > max_gaps[2] > 0

    def test_potential_always_lowers_beta(self):
        rng = np.random.default_rng(9)
        grid = farey_fractions(8)
        for _ in range(4):
            coeffs = rng.uniform(-0.02, 0.02, 2)
            if np.abs(coeffs).max() < 1e-3:
                coeffs[0] = 0.01
            V, V_d, V_dd = trig_potential(coeffs)
            ell, ell_d, ell_dd = quadratic_kinetic()
            sys = make_toy_system(ell, ell_d, ell_dd, V, V_d, V_dd)
            gaps = []
            for p, q in grid:
                gap = (p / q) ** 2 / 2 - beta_rational(sys, p, q)
                assert gap >= -1e-10
                gaps.append(gap)
            assert max(gaps) > 1e-6


class TestRotationNumber:
    def test_parse_fraction_reduces(self):
        rho = RotationNumber.parse("4/12")
        assert (rho.p, rho.q) == (1, 3)

    def test_parse_decimal_exact(self):
        rho = RotationNumber.parse("0.25")
        assert rho.is_rational and (rho.p, rho.q) == (1, 4)

    def test_parse_irrational(self):
        rho = RotationNumber.parse(repr(1 / math.sqrt(8)))
        assert not rho.is_rational

    def test_fraction_helpers(self):
        assert RotationNumber.rational(2, 6).value == pytest.approx(float(Fraction(1, 3)))
        assert farey_fractions(5) == [(1, 5), (1, 4), (1, 3), (2, 5), (1, 2)]
