"""Classical-limit reference dynamics for the coupled van der Pol models.

Two coupled amplitude equations with phase-locking detection (the Arnold
tongue), and the classical all-to-all ensemble whose order parameter mirrors
the quantum mean-field transition.  Integration is done on the Cartesian
complex amplitudes, which stay regular through amplitude death; the polar
form is only ever used as a consistency oracle in the tests.

All rates are in units of ``kappa1``; times in units of ``1/kappa1``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import _kernels
from .ensemble import FrequencyDistribution, sample_frequencies

#: Radii below which the pair is considered amplitude-dead.
DEATH_RADIUS = 1e-6

#: Default kappa2 for classical runs: makes the limit-cycle radius exactly 1,
#: which conditions the integrator well; the classical critical couplings do
#: not depend on it.
DEFAULT_KAPPA2 = 0.5


def limit_cycle_radius(kappa1: float = 1.0, kappa2: float = DEFAULT_KAPPA2) -> float:
    """Radius ``sqrt(kappa1 / 2 kappa2)`` of the single-oscillator limit cycle."""
    return float(np.sqrt(kappa1 / (2.0 * kappa2)))


def classical_two_rhs(
    state,
    omega1: float,
    omega2: float,
    kappa1: float = 1.0,
    kappa2: float = DEFAULT_KAPPA2,
    V: float = 0.0,
) -> np.ndarray:
    """Derivative of the two coupled complex amplitudes ``(alpha1, alpha2)``."""
    a1, a2 = complex(state[0]), complex(state[1])
    d1 = -1j * omega1 * a1 + a1 * (kappa1 - 2.0 * kappa2 * abs(a1) ** 2) + V * (a2 - a1)
    d2 = -1j * omega2 * a2 + a2 * (kappa1 - 2.0 * kappa2 * abs(a2) ** 2) + V * (a1 - a2)
    return np.array([d1, d2])


@dataclass(frozen=True)
class LockResult:
    """Outcome of a locking run: ``locked``, ``unlocked`` or ``death``."""

    outcome: str
    theta_star: Optional[float] = None

    @property
    def locked(self) -> bool:
        return self.outcome == "locked"


def _integrate_pair(
    delta: float,
    V: float,
    kappa1: float,
    kappa2: float,
    t_total: float,
    dt: float,
    sample_every: int,
    theta0: float = 0.1,
):
    """Run the pair from the standard initial condition; return samples (M, 4)."""
    r0 = limit_cycle_radius(kappa1, kappa2)
    state = np.array([r0, 0.0, r0 * np.cos(theta0), r0 * np.sin(theta0)])
    nsteps = int(round(t_total / dt))
    out = np.empty((nsteps // sample_every + 2, 4))
    nrec = _kernels.classical_two_rk4(
        state, 0.0, delta, kappa1, kappa2, V, dt, nsteps, sample_every, out
    )
    t = np.minimum(np.arange(nrec) * sample_every * dt, nsteps * dt)
    return t, out[:nrec], state


def detect_locking(
    delta: float,
    V: float,
    kappa1: float = 1.0,
    kappa2: float = DEFAULT_KAPPA2,
    t_transient: float = 100.0,
    t_observe: float = 500.0,
    dt: float = 5e-3,
) -> LockResult:
    """Classify the long-time behaviour of the detuned coupled pair.

    After discarding ``t_transient``, the pair is locked when the unwrapped
    phase difference drifts by less than one full turn over ``t_observe`` and
    its time-averaged drift rate is below ``1e-3 * kappa1``.  Vanishing radii
    are reported as the distinct ``death`` outcome.  When locked, the circular
    mean of the phase difference is reported as the locked phase.
    """
    if t_transient <= 0 or t_observe <= 0:
        raise ValueError("durations must be positive")
    sample_every = 10
    t, samples, final = _integrate_pair(
        delta, V, kappa1, kappa2, t_transient + t_observe, dt, sample_every
    )
    if not np.isfinite(samples).all():
        raise FloatingPointError("integration blew up; dynamics should be bounded")
    r1 = np.hypot(final[0], final[1])
    r2 = np.hypot(final[2], final[3])
    if r1 < DEATH_RADIUS and r2 < DEATH_RADIUS:
        return LockResult("death")
    theta = np.unwrap(
        np.arctan2(samples[:, 3], samples[:, 2]) - np.arctan2(samples[:, 1], samples[:, 0])
    )
    observe = t >= t_transient
    th = theta[observe]
    if th.size < 2:
        raise ValueError("observation window shorter than the sampling interval")
    drift = abs(th[-1] - th[0])
    window = t[observe][-1] - t[observe][0]
    if drift < 2.0 * np.pi and drift / window < 1e-3 * kappa1:
        theta_star = float(np.arctan2(np.mean(np.sin(th)), np.mean(np.cos(th))))
        return LockResult("locked", theta_star)
    return LockResult("unlocked")


def arnold_scan(
    delta_grid,
    V_grid,
    kappa1: float = 1.0,
    kappa2: float = DEFAULT_KAPPA2,
    t_transient: float = 100.0,
    t_observe: float = 500.0,
    dt: float = 5e-3,
) -> list:
    """Locking outcome on the product grid; rows ``(delta, V, outcome, theta*)``.

    Reproduces the classical Arnold tongue, including the amplitude-death
    region at large detuning and coupling.
    """
    rows = []
    for d in np.asarray(delta_grid, dtype=float):
        for V in np.asarray(V_grid, dtype=float):
            res = detect_locking(d, V, kappa1, kappa2, t_transient, t_observe, dt)
            rows.append((float(d), float(V), res.outcome, res.theta_star))
    return rows


@dataclass
class ClassicalEnsembleResult:
    """Order parameter and mean-field trajectory of one classical run."""

    order_parameter: float
    t: np.ndarray
    A: np.ndarray
    final_alphas: np.ndarray


def classical_ensemble_trajectory(
    N: int,
    V: float,
    kappa1: float = 1.0,
    kappa2: float = DEFAULT_KAPPA2,
    dist: FrequencyDistribution = FrequencyDistribution.delta(),
    seed: int = 0,
    dt: float = 5e-3,
    t_final: float = 400.0,
    sampling: str = "stratified",
    record_every: int = 20,
    phases: Optional[np.ndarray] = None,
) -> ClassicalEnsembleResult:
    """Integrate the classical all-to-all ensemble from the limit cycle.

    Initial amplitudes sit on the single-oscillator limit cycle with
    seeded random phases (or explicit ``phases``); ``|A|`` is averaged over
    the final quarter of the trajectory.
    """
    omegas = sample_frequencies(dist, N, seed, sampling)
    if phases is None:
        phases = np.random.default_rng(seed).uniform(0.0, 2.0 * np.pi, N)
    r0 = limit_cycle_radius(kappa1, kappa2)
    u = np.ascontiguousarray(r0 * np.cos(phases))
    v = np.ascontiguousarray(r0 * np.sin(phases))
    nsteps = int(round(t_final / dt))
    a_re = np.empty(nsteps // record_every + 2)
    a_im = np.empty_like(a_re)
    nrec = _kernels.classical_ensemble_rk4(
        u, v, omegas, kappa1, kappa2, V, dt, nsteps, record_every, a_re, a_im
    )
    A = a_re[:nrec] + 1j * a_im[:nrec]
    t = np.minimum(np.arange(nrec) * record_every * dt, nsteps * dt)
    tail = np.abs(A[int(np.floor(0.75 * nrec)):])
    return ClassicalEnsembleResult(float(tail.mean()), t, A, u + 1j * v)


def classical_ensemble_run(
    N: int,
    V: float,
    kappa1: float = 1.0,
    kappa2: float = DEFAULT_KAPPA2,
    dist: FrequencyDistribution = FrequencyDistribution.delta(),
    seed: int = 0,
    dt: float = 5e-3,
    t_final: float = 400.0,
) -> float:
    """Order parameter |A| of the classical ensemble (final-quarter average)."""
    return classical_ensemble_trajectory(
        N, V, kappa1, kappa2, dist, seed, dt, t_final
    ).order_parameter
