"""Classical amplitude equations, locking detection, and the ensemble."""

import numpy as np
import pytest

from qsync.classical import (
    DEFAULT_KAPPA2,
    arnold_scan,
    classical_ensemble_run,
    classical_ensemble_trajectory,
    classical_two_rhs,
    detect_locking,
    limit_cycle_radius,
)
from qsync.critical import vc_classical
from qsync.ensemble import FrequencyDistribution


def polar_two_rhs(r1, r2, theta, delta, kappa1, kappa2, V):
    """Polar-coordinate oracle for the coupled pair (valid away from r = 0)."""
    dr1 = r1 * (kappa1 - 2.0 * kappa2 * r1**2) - V * (r1 - r2 * np.cos(theta))
    dr2 = r2 * (kappa1 - 2.0 * kappa2 * r2**2) - V * (r2 - r1 * np.cos(theta))
    dtheta = -delta - V * (r1 / r2 + r2 / r1) * np.sin(theta)
    return dr1, dr2, dtheta


class TestTwoOscillatorRhs:
    def test_polar_cartesian_consistency(self):
        rng = np.random.default_rng(61)
        for _ in range(25):
            r1, r2 = rng.uniform(0.1, 2.0, size=2)
            th1, th2 = rng.uniform(0.0, 2.0 * np.pi, size=2)
            delta, V = rng.uniform(-3.0, 3.0), rng.uniform(0.0, 2.0)
            state = np.array([r1 * np.exp(1j * th1), r2 * np.exp(1j * th2)])
            d = classical_two_rhs(state, 0.0, delta, 1.0, DEFAULT_KAPPA2, V)
            # radial and relative-phase rates from the Cartesian derivative
            dr1 = np.real(np.conj(state[0]) * d[0]) / r1
            dr2 = np.real(np.conj(state[1]) * d[1]) / r2
            dth = (
                np.imag(np.conj(state[1]) * d[1]) / r2**2
                - np.imag(np.conj(state[0]) * d[0]) / r1**2
            )
            er1, er2, eth = polar_two_rhs(r1, r2, th2 - th1, delta, 1.0, DEFAULT_KAPPA2, V)
            assert dr1 == pytest.approx(er1, abs=1e-10)
            assert dr2 == pytest.approx(er2, abs=1e-10)
            assert dth == pytest.approx(eth, abs=1e-10)

    def test_limit_cycle_is_stationary_radius(self):
        # energy balance: d|alpha|^2/dt = 0 on the cycle
        r0 = limit_cycle_radius()
        state = np.array([r0 + 0.0j, 0.0j])
        d = classical_two_rhs(state, 0.0, 0.0, 1.0, DEFAULT_KAPPA2, 0.0)
        assert abs(np.real(np.conj(state[0]) * d[0])) < 1e-15

    def test_single_oscillator_relaxes_to_limit_cycle(self):
        res = classical_ensemble_trajectory(
            N=1, V=0.0, dist=FrequencyDistribution.delta(), t_final=100.0, dt=5e-3,
            phases=np.array([0.3]),
        )
        assert abs(abs(res.final_alphas[0]) - limit_cycle_radius()) < 1e-4


class TestDetectLocking:
    def test_identical_oscillators_lock_in_phase(self):
        res = detect_locking(0.0, 0.5)
        assert res.outcome == "locked"
        assert abs(res.theta_star) < 1e-6

    def test_identical_in_phase_stays_in_phase(self):
        from qsync import _kernels

        r0 = limit_cycle_radius()
        state = np.array([r0, 0.0, r0, 0.0])
        out = np.empty((2002, 4))
        n = _kernels.classical_two_rk4(
            state, 0.0, 0.0, 1.0, DEFAULT_KAPPA2, 0.8, 5e-3, 20000, 10, out
        )
        theta = np.arctan2(out[:n, 3], out[:n, 2]) - np.arctan2(out[:n, 1], out[:n, 0])
        assert np.abs(theta).max() < 1e-12

    def test_weak_coupling_boundary_matches_phase_reduction(self):
        # with r1 = r2 the relative phase obeys theta' = -Delta - 2V sin(theta),
        # so the boundary sits at V = |Delta|/2
        delta = 0.2
        assert detect_locking(delta, 0.45 * delta).outcome == "unlocked"
        assert detect_locking(delta, 0.55 * delta).outcome == "locked"

    def test_positive_detuning_locks_behind(self):
        res = detect_locking(0.5, 1.0)
        assert res.outcome == "locked"
        assert res.theta_star < 0.0

    def test_amplitude_death_at_large_detuning_and_coupling(self):
        assert detect_locking(10.0, 10.0).outcome == "death"

    def test_step_halving_does_not_change_outcomes(self):
        points = [(0.0, 0.5), (0.2, 0.09), (0.2, 0.11), (3.0, 0.8), (10.0, 10.0)]
        for delta, V in points:
            a = detect_locking(delta, V, dt=5e-3)
            b = detect_locking(delta, V, dt=2.5e-3)
            assert a.outcome == b.outcome

    def test_duration_validation(self):
        with pytest.raises(ValueError):
            detect_locking(0.0, 1.0, t_transient=0.0)


class TestArnoldScan:
    def test_tongue_structure(self):
        deltas = [-1.5, 0.0, 1.5]
        vs = [0.2, 0.5, 0.9, 1.3]
        rows = arnold_scan(deltas, vs, t_transient=50.0, t_observe=300.0)
        by_delta = {}
        for d, V, outcome, theta in rows:
            by_delta.setdefault(d, []).append(outcome)
        # zero detuning locks at every coupling
        assert all(o == "locked" for o in by_delta[0.0])
        # fixed detuning: outcomes change unlocked -> locked once as V grows
        for d in (-1.5, 1.5):
            outcomes = by_delta[d]
            flips = sum(
                1 for a, b in zip(outcomes[:-1], outcomes[1:]) if a != b
            )
            assert flips <= 1
            assert outcomes[-1] == "locked"

    def test_symmetric_in_detuning(self):
        rows_p = arnold_scan([2.0], [0.5, 1.2], t_transient=50.0, t_observe=200.0)
        rows_m = arnold_scan([-2.0], [0.5, 1.2], t_transient=50.0, t_observe=200.0)
        assert [r[2] for r in rows_p] == [r[2] for r in rows_m]


class TestClassicalEnsemble:
    def test_identical_oscillators_fully_synchronize(self):
        # delta disorder: V_c = 0, so any positive coupling restores |A| to
        # the limit-cycle radius
        amp = classical_ensemble_run(
            N=64, V=0.3, dist=FrequencyDistribution.delta(), t_final=200.0, seed=1
        )
        assert amp == pytest.approx(limit_cycle_radius(), rel=0.02)

    def test_u1_equivariance(self):
        beta = 1.1
        rng = np.random.default_rng(67)
        phases = rng.uniform(0.0, 2.0 * np.pi, 32)
        dist = FrequencyDistribution.uniform(2.0)
        a = classical_ensemble_trajectory(
            N=32, V=0.8, dist=dist, t_final=50.0, phases=phases
        )
        b = classical_ensemble_trajectory(
            N=32, V=0.8, dist=dist, t_final=50.0, phases=phases + beta
        )
        assert np.abs(b.A - a.A * np.exp(1j * beta)).max() < 1e-10
        assert np.abs(b.final_alphas - a.final_alphas * np.exp(1j * beta)).max() < 1e-10

    def test_uniform_crossing_near_implicit_root(self):
        # Gamma = 5: the implicit-equation root; finite N and time allow 15%
        gamma = 5.0
        vc = vc_classical(1.0, FrequencyDistribution.uniform(gamma))
        grid = vc * np.array([0.7, 0.85, 1.0, 1.15, 1.3])
        amps = [
            classical_ensemble_run(
                N=800, V=v, dist=FrequencyDistribution.uniform(gamma),
                t_final=300.0, seed=2,
            )
            for v in grid
        ]
        r0 = limit_cycle_radius()
        crossing = None
        for v, a in zip(grid, amps):
            if a > 0.05 * r0:
                crossing = v
                break
        assert crossing is not None
        assert abs(crossing - vc) / vc <= 0.15
        assert amps[0] < 0.05 * r0
        assert amps[-1] > 0.05 * r0
