"""Mean-field dynamics of many all-to-all dissipatively coupled oscillators.

Each oscillator keeps its three lowest Fock levels; the only coupling between
oscillators is the complex mean field ``A``, the ensemble average of the
amplitude expectation ``rho10 + sqrt(2) rho21``.  The module samples disorder
frequencies, evaluates the mean-field equations of motion, integrates them
with fixed-step RK4 and reduces trajectories to the synchronization order
parameter ``|A|``.

All rates are in units of ``kappa1``; times in units of ``1/kappa1``.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from typing import Optional

import numpy as np

from . import _kernels
from .errors import StepSizeError

SQRT2 = np.sqrt(2.0)

#: |A| value above which a scan point counts as synchronized.  Well above the
#: residue a decayed run leaves behind and well below saturated values.
CROSSING_THRESHOLD = 0.01


@dataclass(frozen=True)
class FrequencyDistribution:
    """Disorder distribution g(w) of the oscillator frequencies.

    ``kind`` is one of ``delta``, ``uniform`` (half width ``gamma``) or
    ``lorentzian`` (half width at half maximum ``gamma``, optional tail
    ``cutoff`` in units of ``gamma``; the truncated distribution is
    renormalized).  All three are even in ``w``.
    """

    kind: str
    gamma: Optional[float] = None
    cutoff: Optional[float] = None

    def __post_init__(self):
        if self.kind not in ("delta", "uniform", "lorentzian"):
            raise ValueError(f"unknown distribution kind {self.kind!r}")
        if self.kind != "delta":
            if self.gamma is None or not self.gamma > 0:
                raise ValueError("gamma must be positive for uniform/lorentzian")
        if self.cutoff is not None:
            if self.kind != "lorentzian":
                raise ValueError("cutoff applies only to the lorentzian distribution")
            if not self.cutoff > 0:
                raise ValueError("cutoff must be positive")

    @classmethod
    def delta(cls) -> "FrequencyDistribution":
        return cls("delta")

    @classmethod
    def uniform(cls, gamma: float) -> "FrequencyDistribution":
        return cls("uniform", gamma)

    @classmethod
    def lorentzian(cls, gamma: float, cutoff: Optional[float] = None) -> "FrequencyDistribution":
        return cls("lorentzian", gamma, cutoff)

    def quantile(self, q) -> np.ndarray:
        """Inverse CDF; for the cutoff Lorentzian, of the renormalized law."""
        q = np.asarray(q, dtype=float)
        if self.kind == "delta":
            return np.zeros_like(q)
        if self.kind == "uniform":
            return self.gamma * (2.0 * q - 1.0)
        half = 0.5 * np.pi if self.cutoff is None else np.arctan(self.cutoff)
        return self.gamma * np.tan((2.0 * q - 1.0) * half)


def sample_frequencies(
    dist: FrequencyDistribution,
    N: int,
    seed: int = 0,
    sampling: str = "stratified",
) -> np.ndarray:
    """Draw ``N`` frequencies from ``dist``.

    Stratified sampling (the default) places one frequency at each quantile
    ``(n - 1/2)/N``, which suppresses finite-size noise; ``random`` draws
    i.i.d. with the given seed.  The delta distribution is all zeros either
    way.
    """
    if N < 1:
        raise ValueError("N must be >= 1")
    if dist.kind == "delta":
        return np.zeros(N)
    if sampling == "stratified":
        q = (np.arange(1, N + 1) - 0.5) / N
    elif sampling == "random":
        q = np.random.default_rng(seed).random(N)
    else:
        raise ValueError(f"unknown sampling mode {sampling!r}")
    return dist.quantile(q)


@dataclass
class MeanFieldState:
    """Per-oscillator reduced density matrices plus their frequencies.

    ``y`` has one row per real component (see ``_kernels`` for the layout)
    and one column per oscillator.  Only the independent matrix elements are
    stored; ``rho01`` etc. are the implicit conjugates.
    """

    y: np.ndarray
    omegas: np.ndarray

    def __post_init__(self):
        self.y = np.ascontiguousarray(self.y, dtype=float)
        self.omegas = np.ascontiguousarray(self.omegas, dtype=float)
        if self.y.ndim != 2 or self.y.shape[0] != 9:
            raise ValueError(f"state array must have shape (9, N), got {self.y.shape}")
        if self.omegas.shape != (self.y.shape[1],):
            raise ValueError("one frequency per oscillator required")

    @property
    def n_oscillators(self) -> int:
        return self.y.shape[1]

    @property
    def diagonals(self) -> np.ndarray:
        """Populations, shape (3, N)."""
        return self.y[0:3]

    @property
    def rho10(self) -> np.ndarray:
        return self.y[3] + 1j * self.y[4]

    @property
    def rho21(self) -> np.ndarray:
        return self.y[5] + 1j * self.y[6]

    @property
    def rho20(self) -> np.ndarray:
        return self.y[7] + 1j * self.y[8]

    @property
    def mean_field(self) -> complex:
        """A = mean over oscillators of rho10 + sqrt(2) rho21."""
        return complex(np.mean(self.rho10 + SQRT2 * self.rho21))

    @classmethod
    def unsynchronized(
        cls,
        omegas: np.ndarray,
        V: float,
        kappa2: float,
        kappa1: float = 1.0,
        eps: float = 0.0,
    ) -> "MeanFieldState":
        """Unsynchronized fixed point, optionally kicked by ``rho10 += eps``.

        The fixed point is exactly stationary, so a nonzero ``eps`` is what
        lets an unstable mean-field mode grow in finite time.
        """
        from .critical import unsync_state

        omegas = np.asarray(omegas, dtype=float)
        fp = unsync_state(kappa1, kappa2, V)
        y = np.zeros((9, omegas.size))
        y[0] = fp.rho00
        y[1] = fp.rho11
        y[2] = fp.rho22
        y[3] = eps
        return cls(y, omegas)


def mean_field_rhs(
    state: MeanFieldState, V: float, kappa2: float, kappa1: float = 1.0
) -> np.ndarray:
    """Time derivative of every stored matrix element, shape (9, N).

    The mean field is recomputed from the state before evaluation.  The
    implicit conjugate elements evolve as the conjugates of the returned
    rows; their equations are not stored separately.
    """
    A = state.mean_field
    dy = np.empty_like(state.y)
    _kernels.mean_field_deriv(
        state.y, dy, state.omegas, kappa1, kappa2, V, A.real, A.imag
    )
    return dy


@dataclass(frozen=True)
class EnsembleConfig:
    """Run configuration for a mean-field trajectory."""

    N: int
    V: float
    kappa2: float
    dist: FrequencyDistribution
    kappa1: float = 1.0
    dt: float = 5e-4
    t_final: float = 1e3
    averaging_window: float = 0.25
    seed: int = 0
    sampling: str = "stratified"
    eps: float = 1e-3
    record_every: int = 100

    def __post_init__(self):
        if self.N < 2:
            raise ValueError("N must be >= 2")
        if not self.dt > 0:
            raise ValueError("dt must be positive")
        if not 0.0 < self.averaging_window < 1.0:
            raise ValueError("averaging_window must be in (0, 1)")
        if self.record_every < 1:
            raise ValueError("record_every must be >= 1")


@dataclass
class Trajectory:
    """Recorded mean field of one integration."""

    t: np.ndarray
    A: np.ndarray
    final_state: MeanFieldState


def integrate(config: EnsembleConfig, initial: Optional[MeanFieldState] = None) -> Trajectory:
    """Fixed-step RK4 integration of the full mean-field system.

    The default initial state is the unsynchronized fixed point with the
    symmetry-breaking kick ``rho10 += eps`` on every oscillator.  Raises
    :class:`StepSizeError` if any oscillator's populations drift from unit
    sum by more than 1e-4 (instability; reduce ``dt``).
    """
    if initial is None:
        omegas = sample_frequencies(config.dist, config.N, config.seed, config.sampling)
        state = MeanFieldState.unsynchronized(
            omegas, config.V, config.kappa2, config.kappa1, config.eps
        )
    else:
        state = MeanFieldState(initial.y.copy(), initial.omegas.copy())
    nsteps = int(round(config.t_final / config.dt))
    nrec_max = nsteps // config.record_every + 2
    a_re = np.empty(nrec_max)
    a_im = np.empty(nrec_max)
    nrec, max_dev = _kernels.mean_field_rk4(
        state.y,
        state.omegas,
        config.kappa1,
        config.kappa2,
        config.V,
        config.dt,
        nsteps,
        config.record_every,
        a_re,
        a_im,
    )
    if not max_dev < 1e-4 or not np.isfinite(state.y).all():
        raise StepSizeError(
            f"population sum drifted by {max_dev:.3e}; reduce dt (currently {config.dt:g})"
        )
    t = np.minimum(
        np.arange(nrec) * config.record_every * config.dt, nsteps * config.dt
    )
    return Trajectory(t=t, A=a_re[:nrec] + 1j * a_im[:nrec], final_state=state)


def order_parameter(traj: Trajectory, window: float = 0.25) -> float:
    """Mean of |A(t)| over the trailing ``window`` fraction of the trajectory."""
    if not 0.0 < window <= 1.0:
        raise ValueError("window must be in (0, 1]")
    n = len(traj.A)
    start = int(np.floor((1.0 - window) * n))
    if start >= n:
        raise ValueError("averaging window contains no samples")
    return float(np.mean(np.abs(traj.A[start:])))


def _max_workers() -> int:
    env = os.environ.get("QSYNC_THREADS")
    if env:
        return max(1, int(env))
    return max(1, os.cpu_count() or 1)


def transition_scan(config: EnsembleConfig, V_grid) -> np.ndarray:
    """Order parameter versus coupling; rows ``(V, |A|)``.

    The same frequency sample (fixed by ``config.seed``) is reused for every
    ``V`` so the curve is smooth in the coupling.  Points run in parallel
    across threads (capped by the ``QSYNC_THREADS`` environment variable);
    results are assembled in grid order, so the output is deterministic.
    """
    V_grid = np.asarray(V_grid, dtype=float)
    omegas = sample_frequencies(config.dist, config.N, config.seed, config.sampling)

    def run(V: float) -> float:
        cfg = replace(config, V=float(V))
        state = MeanFieldState.unsynchronized(
            omegas, cfg.V, cfg.kappa2, cfg.kappa1, cfg.eps
        )
        traj = integrate(cfg, initial=state)
        return order_parameter(traj, cfg.averaging_window)

    with ThreadPoolExecutor(max_workers=_max_workers()) as ex:
        amps = list(ex.map(run, V_grid))
    return np.column_stack([V_grid, amps])


def first_crossing(scan: np.ndarray, threshold: float = CROSSING_THRESHOLD):
    """Smallest scanned ``V`` whose order parameter exceeds ``threshold``.

    Returns ``None`` when no point crosses.
    """
    scan = np.asarray(scan)
    above = scan[:, 1] > threshold
    if not above.any():
        return None
    return float(scan[np.argmax(above), 0])
