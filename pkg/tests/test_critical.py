"""Self-consistency integral, critical couplings, and the eigenvalue oracle."""

import math

import numpy as np
import pytest
from scipy.integrate import quad

from qsync.critical import (
    linearization_oracle,
    sc_constants,
    sc_integral,
    solve_vc_quantum,
    stability_matrix,
    stability_mode,
    unsync_state,
    vc_classical,
    vc_closed_form_quantum,
)
from qsync.ensemble import FrequencyDistribution, sample_frequencies

DELTA = FrequencyDistribution.delta()


def integrand_reference(w, z):
    return (z.z1 * w * w + z.z2) / (w**4 + z.z3 * w * w + z.z4)


def lorentzian_integral_by_residues(Vc, kappa1, kappa2, gamma):
    """Independent closed form of the no-cutoff Lorentzian integral.

    Partial fractions over the three simple pole pairs of the integrand times
    the Lorentzian weight; each ``1/(w^2 + p)`` contributes ``pi/sqrt(p)``
    (equivalently, the residues of the upper-half-plane poles).
    """
    z = sc_constants(kappa1, kappa2, Vc)
    r1, r2 = z.denominator_roots()
    g2 = gamma * gamma
    c1 = (z.z2 - z.z1 * r1) / ((r2 - r1) * (g2 - r1))
    c2 = (z.z2 - z.z1 * r2) / ((r1 - r2) * (g2 - r2))
    c3 = (z.z2 - z.z1 * g2) / ((r1 - g2) * (r2 - g2))
    return gamma * (c1 / math.sqrt(r1) + c2 / math.sqrt(r2)) + c3


class TestUnsyncState:
    def test_quantum_limit_at_zero_coupling(self):
        r = unsync_state(1.0, 1e6, 0.0)
        assert r.rho00 == pytest.approx(2.0 / 3.0, abs=1e-5)
        assert r.rho11 == pytest.approx(1.0 / 3.0, abs=1e-5)
        assert r.rho22 < 1e-5

    def test_amplitude_death_at_strong_coupling(self):
        r = unsync_state(1.0, 100.0, 1e6)
        assert r.rho00 == pytest.approx(1.0, abs=1e-3)

    def test_normalization(self):
        rng = np.random.default_rng(47)
        for _ in range(50):
            r = unsync_state(1.0, 10 ** rng.uniform(0, 4), 10 ** rng.uniform(-1, 5))
            assert r.rho00 + r.rho11 + r.rho22 == pytest.approx(1.0, abs=1e-12)

    def test_invalid_rates(self):
        with pytest.raises(ValueError):
            unsync_state(0.0, 1.0, 1.0)


class TestSelfConsistencyConstants:
    def test_z4_is_declared_square(self):
        for k2, vc in ((100.0, 50.0), (1e3, 2e3), (10.0, 0.5)):
            z = sc_constants(1.0, k2, vc)
            root = 6 * (1 + k2) + vc * (3 + 2 * k2) + 3 * vc * vc
            assert z.z4 == pytest.approx(root * root, rel=1e-14)
            assert z.z4 >= 0.0
            assert z.z3 > 0.0

    def test_scaling_homogeneity(self):
        # (z1, z2, z3, z4) are homogeneous of degree (2, 4, 2, 4) in the rates
        s = 2.0
        z = sc_constants(1.0, 100.0, 40.0)
        zs = sc_constants(s, s * 100.0, s * 40.0)
        assert zs.z1 == pytest.approx(s**2 * z.z1, rel=1e-12)
        assert zs.z2 == pytest.approx(s**4 * z.z2, rel=1e-12)
        assert zs.z3 == pytest.approx(s**2 * z.z3, rel=1e-12)
        assert zs.z4 == pytest.approx(s**4 * z.z4, rel=1e-12)

    def test_root_structure_available(self):
        z = sc_constants(1.0, 100.0, 10.0 * 100.0 / 3.0)
        r1, r2 = z.denominator_roots()
        assert r1 > r2 > 0.0
        assert r1 * r2 == pytest.approx(z.z4, rel=1e-12)
        assert r1 + r2 == pytest.approx(z.z3, rel=1e-12)


class TestScIntegral:
    def test_delta_is_integrand_at_zero(self):
        for vc in (5.0, 333.0, 1e5):
            z = sc_constants(1.0, 100.0, vc)
            assert sc_integral(vc, 1.0, 100.0, DELTA) == pytest.approx(
                z.z2 / z.z4, rel=1e-14
            )

    def test_uniform_narrow_width_approaches_delta(self):
        d = sc_integral(300.0, 1.0, 100.0, DELTA)
        u = sc_integral(300.0, 1.0, 100.0, FrequencyDistribution.uniform(1e-4))
        assert u == pytest.approx(d, rel=1e-6)

    def test_uniform_against_brute_quadrature(self):
        # spot-check the partial-fraction antiderivative against scipy.quad
        # on the raw integrand
        for vc, gamma in ((50.0, 20.0), (480.0, 20.0), (1200.0, 5.0)):
            z = sc_constants(1.0, 100.0, vc)
            ref, _ = quad(
                integrand_reference, -gamma, gamma, args=(z,), epsabs=1e-13, limit=200
            )
            ref /= 2.0 * gamma
            got = sc_integral(vc, 1.0, 100.0, FrequencyDistribution.uniform(gamma))
            assert got == pytest.approx(ref, rel=1e-10)

    def test_lorentzian_against_residue_oracle(self):
        for vc in (5.0, 50.0, 500.0, 1293.0, 5e4, 4.1e5, 1e8):
            for gamma in (0.2, 0.7, 0.999, 1.001):
                got = sc_integral(
                    vc, 1.0, 100.0, FrequencyDistribution.lorentzian(gamma)
                )
                ref = lorentzian_integral_by_residues(vc, 1.0, 100.0, gamma)
                assert got == pytest.approx(ref, rel=1e-8, abs=1e-13)

    def test_lorentzian_cutoff_against_brute_quadrature(self):
        gamma, cut = 0.7, 100.0
        z = sc_constants(1.0, 100.0, 380.0)

        def weighted(w):
            return integrand_reference(w, z) * gamma / (np.pi * (w * w + gamma * gamma))

        ref, _ = quad(weighted, 0.0, cut * gamma, epsabs=1e-13, limit=500)
        ref = 2.0 * ref / (2.0 / np.pi * np.arctan(cut))
        got = sc_integral(380.0, 1.0, 100.0, FrequencyDistribution.lorentzian(gamma, cut))
        assert got == pytest.approx(ref, rel=1e-9)

    def test_single_sign_change_over_bracket(self):
        # the integral rises through 1 at the critical coupling and relaxes
        # back toward 1 from one side at large coupling: exactly one sign
        # change of (integral - 1) on a geometric sample
        cases = [
            DELTA,
            FrequencyDistribution.uniform(20.0),
            FrequencyDistribution.lorentzian(0.7),
            FrequencyDistribution.lorentzian(0.7, 100.0),
        ]
        vs = np.geomspace(1.0, 1e9, 100)
        for dist in cases:
            signs = np.sign([sc_integral(v, 1.0, 100.0, dist) - 1.0 for v in vs])
            changes = np.sum(signs[:-1] != signs[1:])
            assert changes == 1, dist


class TestSolveVcQuantum:
    def test_delta_approaches_closed_form(self):
        vc100 = solve_vc_quantum(1.0, 100.0, DELTA)
        assert vc100 == pytest.approx(1000.0 / 3.0, rel=0.05)
        vc1000 = solve_vc_quantum(1.0, 1e3, DELTA)
        assert vc1000 == pytest.approx(1e4 / 3.0, rel=0.02)
        # relative deviation shrinks as kappa2 grows
        dev100 = abs(vc100 - 1000.0 / 3.0) / (1000.0 / 3.0)
        dev1000 = abs(vc1000 - 1e4 / 3.0) / (1e4 / 3.0)
        assert dev1000 < dev100

    def test_uniform_approaches_closed_form(self):
        dist = FrequencyDistribution.uniform(20.0)
        for k2, rel in ((100.0, 0.05), (1e3, 0.02)):
            closed = vc_closed_form_quantum(1.0, k2, dist)
            assert solve_vc_quantum(1.0, k2, dist) == pytest.approx(closed, rel=rel)

    def test_lorentzian_below_wall(self):
        dist = FrequencyDistribution.lorentzian(0.7)
        closed = vc_closed_form_quantum(1.0, 100.0, dist)
        assert solve_vc_quantum(1.0, 100.0, dist) == pytest.approx(closed, rel=0.05)

    def test_lorentzian_hard_wall(self):
        assert math.isfinite(
            solve_vc_quantum(1.0, 100.0, FrequencyDistribution.lorentzian(0.999))
        )
        assert math.isinf(
            solve_vc_quantum(1.0, 100.0, FrequencyDistribution.lorentzian(1.001))
        )
        assert math.isinf(
            solve_vc_quantum(1.0, 100.0, FrequencyDistribution.lorentzian(1.2))
        )

    def test_cutoff_restores_synchronization(self):
        # with the tails cut off, a width that would forbid synchronization
        # gets a finite critical coupling again
        vc = solve_vc_quantum(1.0, 100.0, FrequencyDistribution.lorentzian(1.2, 100.0))
        assert math.isfinite(vc)


class TestClosedForms:
    def test_uniform_at_zero_width_equals_delta(self):
        # Eq with Gamma = 0: (10 k1 k2 + 10 k1 k2) / 6 k1 = 10 k2 / 3 exactly
        got = vc_closed_form_quantum(1.0, 100.0, FrequencyDistribution.uniform(1e-300))
        assert got == pytest.approx(1000.0 / 3.0, rel=1e-12)

    def test_uniform_large_width_asymptote(self):
        gamma = 1e3
        got = vc_closed_form_quantum(1.0, 100.0, FrequencyDistribution.uniform(gamma))
        assert got == pytest.approx(gamma**2 / 3.0, rel=0.02)

    def test_lorentzian_near_wall_value(self):
        got = vc_closed_form_quantum(1.0, 100.0, FrequencyDistribution.lorentzian(0.99))
        assert got == pytest.approx(2.0 * 100.0 * 5.99 / 0.03, rel=1e-12)

    def test_lorentzian_wall_is_infinite(self):
        assert math.isinf(
            vc_closed_form_quantum(1.0, 100.0, FrequencyDistribution.lorentzian(1.0))
        )

    def test_delta_form(self):
        assert vc_closed_form_quantum(1.0, 250.0, DELTA) == pytest.approx(2500.0 / 3.0)


class TestClassicalVc:
    def test_delta_is_zero(self):
        assert vc_classical(1.0, DELTA) == 0.0

    def test_lorentzian_small_width_vanishes(self):
        assert vc_classical(1.0, FrequencyDistribution.lorentzian(1e-9)) < 1e-8

    def test_lorentzian_half_width(self):
        got = vc_classical(1.0, FrequencyDistribution.lorentzian(0.5))
        assert got == pytest.approx((2.5 - math.sqrt(1.25)) / 2.0, abs=1e-12)

    def test_lorentzian_wall(self):
        assert math.isinf(vc_classical(1.0, FrequencyDistribution.lorentzian(1.0)))
        assert math.isinf(vc_classical(1.0, FrequencyDistribution.lorentzian(3.0)))

    def test_uniform_branches_meet_at_switch_width(self):
        from qsync.critical import _solve_uniform_classical_branch

        gamma = 0.5 * math.pi
        narrow = _solve_uniform_classical_branch(gamma, 1.0, "narrow")
        wide = _solve_uniform_classical_branch(gamma, 1.0, "wide")
        assert abs(narrow - wide) < 1e-6

    @pytest.mark.parametrize("gamma", [0.3, 1.0, 2.0, 5.0, 20.0])
    def test_uniform_root_satisfies_implicit_equation(self, gamma):
        vc = vc_classical(1.0, FrequencyDistribution.uniform(gamma))
        if gamma < 0.5 * math.pi:
            resid = 2.0 * gamma / vc - math.pi - math.atan(2.0 * (vc - 1.0) / gamma)
        else:
            resid = gamma / vc - math.atan(gamma / (vc - 1.0))
        assert abs(resid) < 1e-7

    def test_uniform_monotone_in_width(self):
        vals = [
            vc_classical(1.0, FrequencyDistribution.uniform(g))
            for g in (0.2, 0.7, 1.2, 2.0, 4.0, 8.0)
        ]
        assert (np.diff(vals) > 0.0).all()


class TestStabilityMode:
    def test_linear_in_mean_field(self):
        a = stability_mode(3.0, 1.0, 100.0, 250.0, mean_field=1.0)
        b = stability_mode(3.0, 1.0, 100.0, 250.0, mean_field=2.0 - 1.0j)
        scale = 2.0 - 1.0j
        assert b.b10 == pytest.approx(scale * a.b10, rel=1e-12)
        assert b.b21 == pytest.approx(scale * a.b21, rel=1e-12)

    def test_solves_marginal_linear_system(self):
        # at zero growth rate the linearized off-diagonal equations balance
        # the decay against the mean-field drive
        k1, k2, vc, w, A = 1.0, 100.0, 250.0, 7.0, 1.0
        r = unsync_state(k1, k2, vc)
        m = stability_mode(w, k1, k2, vc, A)
        res1 = (
            (-3 * k1 - vc - 1j * w) * m.b10
            + 2 * np.sqrt(2) * vc * m.b21
            + vc * A * (r.rho00 - r.rho11)
        )
        res2 = (
            2 * np.sqrt(2) * k1 * m.b10
            + (-2 * k1 - 2 * k2 - 3 * vc - 1j * w) * m.b21
            + np.sqrt(2) * vc * A * (r.rho11 - r.rho22)
        )
        assert abs(res1) < 1e-12 * abs(m.b10)
        assert abs(res2) < 1e-12 * max(abs(m.b21), abs(m.b10))

    def test_ties_mode_to_integrand_coefficients(self):
        # Re[(b10 + sqrt2 b21)/A] must reproduce the rational integrand of
        # the self-consistency condition, and its imaginary part is odd in w
        k1, k2, vc = 1.0, 100.0, 333.0
        z = sc_constants(k1, k2, vc)
        for w in (0.0, 0.3, 5.0, 40.0, 900.0):
            m = stability_mode(w, k1, k2, vc)
            kernel = m.mean_field_contribution / m.mean_field
            ref = (z.z1 * w * w + z.z2) / (w**4 + z.z3 * w * w + z.z4)
            assert kernel.real == pytest.approx(ref, rel=1e-10)
            mneg = stability_mode(-w, k1, k2, vc)
            assert mneg.mean_field_contribution.imag == pytest.approx(
                -kernel.imag, abs=1e-15
            )


class TestLinearizationOracle:
    def test_delta_matches_continuum(self):
        vc_cont = solve_vc_quantum(1.0, 100.0, DELTA)
        vc_fin, lam = linearization_oracle(np.zeros(40), 1.0, 100.0)
        assert vc_fin == pytest.approx(vc_cont, rel=0.01)
        assert abs(lam.imag) < 1e-6

    def test_uniform_matches_continuum(self):
        dist = FrequencyDistribution.uniform(20.0)
        freqs = sample_frequencies(dist, 60)
        vc_cont = solve_vc_quantum(1.0, 100.0, dist)
        vc_fin, lam = linearization_oracle(freqs, 1.0, 100.0)
        assert vc_fin == pytest.approx(vc_cont, rel=0.02)
        assert abs(lam.imag) < 1e-6

    def test_matrix_shape_and_block_structure(self):
        freqs = np.array([0.0, 3.0])
        J = stability_matrix(freqs, 1.0, 10.0, 5.0)
        assert J.shape == (4, 4)
        # frequency enters each block's diagonal as -i omega
        assert J[2, 2] - J[0, 0] == pytest.approx(-3.0j, abs=1e-14)

    def test_requires_two_oscillators(self):
        with pytest.raises(ValueError):
            linearization_oracle(np.zeros(1), 1.0, 100.0)
