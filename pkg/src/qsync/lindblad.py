"""Master-equation Liouvillians for quantum van der Pol oscillators.

Builds the generators for:

* a single oscillator with one-phonon gain (rate ``kappa1``) and two-phonon
  loss (rate ``kappa2``),
* two such oscillators coupled through the collective jump operator
  ``c = a1 - a2`` at rate ``V``,
* the two-qubit spin model that the two-oscillator system reduces to when
  ``kappa2 -> infinity`` (per-spin pump ``kappa1``, decay ``2*kappa1``,
  collective jump ``sigma1^- - sigma2^-``),

plus a dense steady-state solver and a fixed-step RK4 propagator.  All rates
and frequencies are in units of ``kappa1``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    DegenerateSteadyStateError,
    NumericalFailureError,
    ShapeError,
    StepSizeError,
)
from .hilbert import (
    TOL_PSD,
    annihilation,
    check_density_matrix,
    devectorize,
    dissipator,
    hamiltonian_part,
    sigma_minus,
    tensor,
    trace_vector,
    vectorize,
)

DEFAULT_DT = 5e-4


def _positive(name: str, value: float) -> None:
    if not value > 0:
        raise ValueError(f"{name} must be positive, got {value}")


@dataclass(frozen=True)
class SingleOscParams:
    """Single quantum van der Pol oscillator on a truncated Fock space."""

    omega: float = 0.0
    kappa1: float = 1.0
    kappa2: float = 10.0
    truncation: int = 4

    def __post_init__(self):
        _positive("kappa1", self.kappa1)
        _positive("kappa2", self.kappa2)
        if self.truncation < 2:
            raise ValueError("truncation must be >= 2")


@dataclass(frozen=True)
class TwoOscParams:
    """Two dissipatively coupled quantum van der Pol oscillators."""

    omega1: float = 0.0
    omega2: float = 0.0
    kappa1: float = 1.0
    kappa2: float = 10.0
    V: float = 0.0
    truncation: int = 3

    def __post_init__(self):
        _positive("kappa1", self.kappa1)
        _positive("kappa2", self.kappa2)
        if self.V < 0:
            raise ValueError("V must be >= 0")
        if self.truncation < 2:
            raise ValueError("truncation must be >= 2")

    @property
    def delta(self) -> float:
        """Detuning ``omega2 - omega1``."""
        return self.omega2 - self.omega1


@dataclass(frozen=True)
class SpinModelParams:
    """Two-qubit reduction of the coupled oscillators (``kappa2 -> inf``)."""

    omega1: float = 0.0
    omega2: float = 0.0
    kappa1: float = 1.0
    V: float = 0.0

    def __post_init__(self):
        _positive("kappa1", self.kappa1)
        if self.V < 0:
            raise ValueError("V must be >= 0")

    @property
    def delta(self) -> float:
        return self.omega2 - self.omega1


def build_single_vdp(p: SingleOscParams) -> np.ndarray:
    """Liouvillian for one oscillator: gain ``kappa1``, two-phonon loss ``kappa2``."""
    a = annihilation(p.truncation)
    n = a.conj().T @ a
    L = hamiltonian_part(p.omega * n)
    L += p.kappa1 * dissipator(a.conj().T)
    L += p.kappa2 * dissipator(a @ a)
    return L


def build_two_vdp(p: TwoOscParams) -> np.ndarray:
    """Liouvillian for two oscillators with collective jump ``a1 - a2`` at rate ``V``."""
    a = annihilation(p.truncation)
    eye = np.eye(p.truncation, dtype=complex)
    a1 = tensor(a, eye)
    a2 = tensor(eye, a)
    H = p.omega1 * (a1.conj().T @ a1) + p.omega2 * (a2.conj().T @ a2)
    L = hamiltonian_part(H)
    for an in (a1, a2):
        L += p.kappa1 * dissipator(an.conj().T)
        L += p.kappa2 * dissipator(an @ an)
    L += p.V * dissipator(a1 - a2)
    return L


def build_spin_model(p: SpinModelParams) -> np.ndarray:
    """Two-qubit Liouvillian: pump ``kappa1``, decay ``2*kappa1``, collective jump.

    The basis ordering is ``{|00>, |01>, |10>, |11>}`` with the first label for
    spin 1.
    """
    sm = sigma_minus()
    eye = np.eye(2, dtype=complex)
    s1m = tensor(sm, eye)
    s2m = tensor(eye, sm)
    H = p.omega1 * (s1m.conj().T @ s1m) + p.omega2 * (s2m.conj().T @ s2m)
    L = hamiltonian_part(H)
    for smn in (s1m, s2m):
        L += p.kappa1 * dissipator(smn.conj().T)
        L += 2.0 * p.kappa1 * dissipator(smn)
    L += p.V * dissipator(s1m - s2m)
    return L


def steady_state(L: np.ndarray, tol_psd: float = TOL_PSD) -> np.ndarray:
    """Unique steady state of a trace-preserving Liouvillian.

    The normalized null vector of ``L`` is extracted from a singular value
    decomposition, devectorized, and symmetrized by ``(rho + rho^dag)/2``
    before validation against the density-matrix tolerances.

    Raises
    ------
    DegenerateSteadyStateError
        If the null space has dimension greater than one.
    NumericalFailureError
        If no null vector exists or the result is unphysical.
    """
    L = np.asarray(L, dtype=complex)
    if L.ndim != 2 or L.shape[0] != L.shape[1]:
        raise ShapeError(f"Liouvillian must be square, got {L.shape}")
    _, s, vh = np.linalg.svd(L)
    smax = s[0] if s[0] > 0 else 1.0
    if s[-1] > 1e-8 * smax:
        raise NumericalFailureError(
            f"no null vector: smallest singular value {s[-1]:.3e} (scale {smax:.3e})"
        )
    if len(s) > 1 and s[-2] < 1e-10 * smax:
        raise DegenerateSteadyStateError(
            f"null space dimension > 1 (second singular value {s[-2]:.3e})"
        )
    rho = devectorize(vh[-1].conj())
    tr = np.trace(rho)
    if abs(tr) < 1e-12:
        raise NumericalFailureError("null vector has vanishing trace")
    rho = rho / tr
    rho = 0.5 * (rho + rho.conj().T)
    return check_density_matrix(rho, tol_psd=tol_psd)


def _rk4_step_matrix(L: np.ndarray, dt: float) -> np.ndarray:
    """One-step update matrix of classical RK4 for the linear system v' = L v."""
    d2 = L.shape[0]
    M = np.eye(d2, dtype=complex)
    term = np.eye(d2, dtype=complex)
    for k in (1, 2, 3, 4):
        term = (dt / k) * (L @ term)
        M += term
    return M


def suggest_dt(kappa2: float, dt: float = DEFAULT_DT) -> float:
    """Shrink the default RK4 step when the two-phonon rate makes it stiff."""
    if kappa2 * dt > 0.1:
        return 0.1 / kappa2
    return dt


def evolve_rk4(
    L: np.ndarray,
    rho0: np.ndarray,
    dt: float,
    t_final: float,
    record_every: int = 0,
):
    """Propagate ``rho0`` under ``v' = L v`` with fixed-step classical RK4.

    For a linear system the four stage evaluations collapse to a constant
    one-step matrix (the degree-4 Taylor polynomial of ``exp(dt L)``), which is
    precomputed once and applied per step.

    Parameters
    ----------
    record_every : int
        When positive, also return the list of ``(t, rho)`` samples taken
        every that many steps (including the initial state).

    Raises
    ------
    StepSizeError
        If the trace drifts by more than 1e-6, indicating the step is too
        large for the stiffest rate in ``L``.
    """
    if dt <= 0:
        raise ValueError("dt must be positive")
    L = np.asarray(L, dtype=complex)
    v = vectorize(np.asarray(rho0, dtype=complex))
    if v.size != L.shape[0]:
        raise ShapeError("state and Liouvillian dimensions do not match")
    nsteps = int(round(t_final / dt))
    M = _rk4_step_matrix(L, dt)
    tvec = trace_vector(int(round(np.sqrt(v.size))))
    tr0 = tvec @ v
    samples = [(0.0, devectorize(v))] if record_every else None
    check_every = max(1, min(100, nsteps))
    with np.errstate(over="ignore", invalid="ignore"):
        for step in range(1, nsteps + 1):
            v = M @ v
            if step % check_every == 0 or step == nsteps:
                drift = abs(tvec @ v - tr0)
                if not drift < 1e-6:  # also catches NaN from a blow-up
                    raise StepSizeError(
                        f"trace drifted by {drift:.3e} at t={step * dt:g}; reduce dt"
                    )
            if record_every and step % record_every == 0:
                samples.append((step * dt, devectorize(v)))
    final = devectorize(v)
    if record_every:
        return final, samples
    return final


def expectation(rho: np.ndarray, O: np.ndarray) -> complex:
    """``tr(rho O)`` for matching dimensions."""
    rho = np.asarray(rho)
    O = np.asarray(O)
    if rho.shape != O.shape:
        raise ShapeError(f"dimension mismatch: {rho.shape} vs {O.shape}")
    return complex(np.trace(rho @ O))
