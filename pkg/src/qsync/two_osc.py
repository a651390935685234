"""Closed-form two-oscillator steady state, phase marginal and entanglement.

In the strong two-phonon-damping limit each oscillator occupies only its two
lowest Fock states and the coupled steady state has closed-form matrix
elements on the ``{|00>, |01>, |10>, |11>}`` block.  This module evaluates
them, reduces the two-mode Wigner function to a distribution over the phase
difference, computes the Wootters concurrence, and locates the boundary of
the region where the steady state is entangled (the "entanglement tongue").

All rates are in units of ``kappa1``; ``delta`` is the detuning of the second
oscillator from the first.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import StateError, StructureError

#: Block basis ordering used throughout: |00>, |01>, |10>, |11>.
BASIS_LABELS = ("00", "01", "10", "11")


@dataclass(frozen=True)
class AnalyticSteadyState:
    """Steady-state matrix elements of the dissipatively coupled pair.

    ``p11_single`` is the population of each singly excited state (``|01>``
    and ``|10>`` are equal by symmetry), ``p11_double`` the population of
    ``|11>``, and ``coherence`` the off-diagonal element ``<01|rho|10>``.
    ``normalizer`` is the common denominator of all five expressions.
    """

    p00: float
    p11_single: float
    p11_double: float
    coherence: complex
    normalizer: float

    def as_matrix(self) -> np.ndarray:
        """Dense 4x4 density matrix on the ``{|00>,|01>,|10>,|11>}`` basis."""
        rho = np.zeros((4, 4), dtype=complex)
        rho[0, 0] = self.p00
        rho[1, 1] = rho[2, 2] = self.p11_single
        rho[3, 3] = self.p11_double
        rho[1, 2] = self.coherence
        rho[2, 1] = np.conj(self.coherence)
        return rho


@dataclass(frozen=True)
class PhaseMarginal:
    """Phase-difference distribution ``W(theta) = 1/2pi + (g cos + h sin)/2``.

    Normalized over ``[0, 2pi)`` for any coefficients; nonnegative whenever
    ``hypot(g, h) <= 1/pi``.
    """

    g: float
    h: float

    def __call__(self, theta) -> np.ndarray:
        theta = np.asarray(theta, dtype=float)
        return 1.0 / (2.0 * np.pi) + 0.5 * (self.g * np.cos(theta) + self.h * np.sin(theta))

    @property
    def peak(self) -> float:
        """Location of the maximum of ``W`` in ``(-pi, pi]``."""
        return math.atan2(self.h, self.g)


def analytic_steady_state(kappa1: float, V: float, delta: float) -> AnalyticSteadyState:
    """Closed-form steady state of the coupled pair in the two-level limit."""
    if kappa1 <= 0:
        raise ValueError("kappa1 must be positive")
    if V < 0:
        raise ValueError("V must be >= 0")
    k1 = kappa1
    norm = (3 * k1 + V) * (
        3 * k1 * (delta**2 + 36 * k1**2) + (delta**2 + 108 * k1**2) * V + 32 * k1 * V**2
    )
    common = delta**2 + 4 * (3 * k1 + V) ** 2
    p11_single = k1 * (2 * k1 + V) * common / norm
    p11_double = k1**2 * common / norm
    p00 = 1.0 - k1 * (5 * k1 + 2 * V) * common / norm
    coherence = 2 * k1 * V * (k1 + V) * (6 * k1 + 2 * V - 1j * delta) / norm
    return AnalyticSteadyState(p00, p11_single, p11_double, coherence, norm)


def phase_marginal(state, discard_tol: float = 1e-8) -> PhaseMarginal:
    """Reduce a two-qubit state to its phase-difference distribution.

    Accepts an :class:`AnalyticSteadyState` or a 4x4 density matrix whose only
    off-diagonal weight sits on the ``<01|rho|10>`` element (the structure the
    coupled steady state always has).  A general 4x4 input is projected onto
    that structure; if the discarded off-structure weight exceeds
    ``discard_tol`` a :class:`StructureError` is raised.
    """
    if isinstance(state, AnalyticSteadyState):
        z = state.coherence
    else:
        rho = np.asarray(state, dtype=complex)
        if rho.shape != (4, 4):
            raise StructureError(f"expected a 4x4 density matrix, got {rho.shape}")
        kept = np.zeros_like(rho)
        kept[np.diag_indices(4)] = np.diag(rho)
        kept[1, 2] = rho[1, 2]
        kept[2, 1] = rho[2, 1]
        discarded = np.linalg.norm(rho - kept)
        if discarded > discard_tol:
            raise StructureError(
                f"off-structure weight {discarded:.3e} exceeds {discard_tol:g}"
            )
        z = rho[1, 2]
    return PhaseMarginal(g=float(z.real), h=float(z.imag))


def concurrence(rho) -> float:
    """Wootters concurrence of a two-qubit density matrix."""
    return max(0.0, _concurrence_signed(rho))


def _concurrence_signed(rho) -> float:
    """Unclamped combination ``lam1 - lam2 - lam3 - lam4`` of the spin-flip roots.

    Equals the concurrence when positive; crosses zero where the concurrence
    reaches it, which is what the tongue-boundary bisection needs.
    """
    if isinstance(rho, AnalyticSteadyState):
        rho = rho.as_matrix()
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (4, 4):
        raise StateError(f"expected a 4x4 density matrix, got {rho.shape}")
    if abs(np.trace(rho) - 1.0) > 1e-8 or np.abs(rho - rho.conj().T).max() > 1e-8:
        raise StateError("input is not a valid two-qubit density matrix")
    sy = np.array([[0.0, -1j], [1j, 0.0]])
    yy = np.kron(sy, sy)
    prod = rho @ yy @ rho.conj() @ yy
    evals = np.linalg.eigvals(prod).real
    evals = np.sqrt(np.clip(evals, 0.0, None))
    evals[::-1].sort()
    return float(evals[0] - evals[1] - evals[2] - evals[3])


def tongue_boundary(
    delta: float,
    kappa1: float = 1.0,
    tol: float = 1e-4,
    max_top: float = 1e6,
) -> float:
    """Critical coupling above which the steady state is entangled.

    Bisects the unclamped spin-flip combination (the clamped concurrence is
    identically zero below the boundary, so it cannot bracket a sign change).
    The bracket is grown geometrically from ``kappa1``; returns ``inf`` if no
    sign change is found up to ``max_top * kappa1``.
    """
    if kappa1 <= 0:
        raise ValueError("kappa1 must be positive")

    def f(V: float) -> float:
        return _concurrence_signed(analytic_steady_state(kappa1, V, delta))

    lo = kappa1
    flo = f(lo)
    hi = None
    V = lo
    while V < max_top * kappa1:
        V *= 2.0
        fv = f(V)
        if flo < 0.0 < fv:
            hi = V
            break
        lo, flo = V, fv
    if hi is None:
        return math.inf
    while hi - lo > tol * kappa1:
        mid = 0.5 * (lo + hi)
        if f(mid) > 0.0:
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi)


def tongue_scan(delta_grid, V_grid, kappa1: float = 1.0) -> np.ndarray:
    """Concurrence on the product grid; rows ``(delta, V, C)``.

    Suitable for rendering the entanglement tongue with any plotting tool.
    """
    rows = []
    for d in np.asarray(delta_grid, dtype=float):
        for V in np.asarray(V_grid, dtype=float):
            rows.append((d, V, concurrence(analytic_steady_state(kappa1, V, d))))
    return np.array(rows)
