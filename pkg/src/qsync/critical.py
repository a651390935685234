"""Critical coupling for the synchronization transition of many oscillators.

The unsynchronized phase of the all-to-all mean-field model is a diagonal,
frequency-independent fixed point.  Its linear stability against a nonzero
mean field reduces to a self-consistency condition

    1 = integral  (z1 w^2 + z2) / (w^4 + z3 w^2 + z4)  g(w) dw

over the frequency distribution ``g``, with coefficients ``z1..z4`` built
from the fixed-point populations.  This module evaluates the condition for
delta, uniform and Lorentzian disorder, solves it for the critical coupling
``V_c``, provides the large-``kappa2`` closed forms, the classical-limit
counterparts, and a finite-size eigenvalue oracle that cross-checks the
continuum result.

All rates are in units of ``kappa1``.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.linalg import eigvals

from .ensemble import FrequencyDistribution

SQRT2 = math.sqrt(2.0)

#: Root bracket for V_c searches, in units of kappa1.  Beyond this the
#: divergences near the Lorentzian wall exceed any physical regime.
BRACKET_TOP = 1e9

_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(16)


@dataclass(frozen=True)
class UnsyncState:
    """Diagonal populations of the unsynchronized fixed point."""

    rho00: float
    rho11: float
    rho22: float


@dataclass(frozen=True)
class StabilityMode:
    """Marginal-mode amplitudes of one oscillator at the stability threshold.

    ``b10`` and ``b21`` are the perturbations of the two lowest off-diagonal
    elements driven by a mean field ``A``; both are homogeneous of degree one
    in ``A``.
    """

    b10: complex
    b21: complex
    mean_field: complex

    @property
    def mean_field_contribution(self) -> complex:
        """This oscillator's weight in the mean field, ``b10 + sqrt(2) b21``."""
        return self.b10 + SQRT2 * self.b21


@dataclass(frozen=True)
class SelfConsistencyConstants:
    """Coefficients of the rational integrand of the stability condition.

    ``z4`` is a perfect square and ``z3 > 0`` for positive rates, so the
    denominator ``w^4 + z3 w^2 + z4`` has no real roots.
    """

    z1: float
    z2: float
    z3: float
    z4: float

    def denominator_roots(self) -> tuple[float, float]:
        """Roots ``r1 >= r2 > 0`` of ``r^2 - z3 r + z4``, so that the
        denominator factors as ``(w^2 + r1)(w^2 + r2)``."""
        disc = self.z3 * self.z3 - 4.0 * self.z4
        if disc < 0:
            raise ValueError("unexpected complex root pair in denominator")
        s = math.sqrt(disc)
        return 0.5 * (self.z3 + s), 0.5 * (self.z3 - s)


def unsync_state(kappa1: float, kappa2: float, V: float) -> UnsyncState:
    """Populations of the frequency-independent unsynchronized fixed point."""
    k1, k2 = kappa1, kappa2
    if k1 <= 0 or k2 <= 0 or V < 0:
        raise ValueError("rates must be positive and V >= 0")
    den = k1 * k1 + k1 * (3 * k2 + V) + V * (k2 + V)
    return UnsyncState(
        rho00=(2 * k1 * k2 + V * (k2 + V)) / den,
        rho11=k1 * (k2 + V) / den,
        rho22=k1 * k1 / den,
    )


def sc_constants(kappa1: float, kappa2: float, Vc: float) -> SelfConsistencyConstants:
    """Integrand coefficients evaluated at the fixed point for coupling ``Vc``."""
    k1, k2 = kappa1, kappa2
    r = unsync_state(k1, k2, Vc)
    z1 = Vc * (
        (-k1 + Vc) * r.rho00
        + (5 * k1 + 4 * k2 + Vc) * r.rho11
        - (4 * k1 + 4 * k2 + 2 * Vc) * r.rho22
    )
    square = 6 * k1 * (k1 + k2) + Vc * (3 * k1 + 2 * k2) + 3 * Vc * Vc
    z2 = Vc * square * (
        (6 * k1 + 2 * k2 + 3 * Vc) * r.rho00
        + (-2 * k2 + 3 * Vc) * r.rho11
        - (6 * k1 + 6 * Vc) * r.rho22
    )
    z3 = (
        13 * k1 * k1
        + 8 * k1 * k2
        + 4 * k2 * k2
        + 34 * k1 * Vc
        + 12 * k2 * Vc
        + 10 * Vc * Vc
    )
    z4 = square * square
    return SelfConsistencyConstants(z1, z2, z3, z4)


def stability_mode(
    omega: float,
    kappa1: float,
    kappa2: float,
    Vc: float,
    mean_field: complex = 1.0,
) -> StabilityMode:
    """Closed-form marginal mode of an oscillator with frequency ``omega``.

    Solves the linearized off-diagonal equations at a zero growth rate for a
    given driving mean field.  Averaging ``mean_field_contribution`` over the
    frequency distribution and equating it to ``mean_field`` is exactly the
    self-consistency condition evaluated by :func:`sc_integral`.
    """
    k1, k2 = kappa1, kappa2
    r = unsync_state(k1, k2, Vc)
    den = 8.0 * k1 * Vc - (3.0 * k1 + Vc + 1j * omega) * (
        2.0 * k1 + 2.0 * k2 + 3.0 * Vc + 1j * omega
    )
    b10 = -mean_field * Vc * (
        (2.0 * k1 + 2.0 * k2 + 3.0 * Vc + 1j * omega) * r.rho00
        - (2.0 * k1 + 2.0 * k2 - Vc + 1j * omega) * r.rho11
        - 4.0 * Vc * r.rho22
    ) / den
    b21 = -SQRT2 * mean_field * Vc * (
        2.0 * k1 * r.rho00
        + (k1 + Vc + 1j * omega) * r.rho11
        - (3.0 * k1 + Vc + 1j * omega) * r.rho22
    ) / den
    return StabilityMode(complex(b10), complex(b21), complex(mean_field))


def _atan_over_x(x: float) -> float:
    """``atan(x)/x`` continued through ``x = 0``."""
    if x == 0.0:
        return 1.0
    return math.atan(x) / x


def _panel_quadrature(f, lo: float, hi: float) -> float:
    """Composite 16-point Gauss-Legendre on octave-spaced panels of [lo, hi].

    Log-spaced panels resolve integrands whose structure spans many scales
    near ``lo``; each panel sees a smooth function, so the rule converges to
    machine precision.
    """
    total = 0.0
    a = lo
    while a < hi:
        b = min(2.0 * a, hi)
        mid = 0.5 * (a + b)
        half = 0.5 * (b - a)
        total += half * float(np.sum(_GL_WEIGHTS * f(mid + half * _GL_NODES)))
        a = b
    return total


def sc_integral(Vc: float, kappa1: float, kappa2: float, dist: FrequencyDistribution) -> float:
    """Right-hand side of the self-consistency condition at coupling ``Vc``.

    * delta disorder: the integrand at ``w = 0``, i.e. ``z2/z4``.
    * uniform disorder: closed form from the partial-fraction antiderivative
      over ``[-Gamma, Gamma]``.
    * Lorentzian disorder: numerical quadrature after substituting
      ``w = Gamma tan(phi)``, which turns the Lorentzian weight into a uniform
      one; the remaining endpoint structure (compressed into
      ``u = pi/2 - phi`` of order ``Gamma/Vc``) is resolved by octave-spaced
      Gauss-Legendre panels.  Applies with or without a tail cutoff (the
      cutoff version renormalizes the truncated distribution).  Absolute
      accuracy is at machine level, which the root finder needs: near the
      Lorentzian wall the bracket sign is decided by margins of order
      ``kappa1/Vc``.
    """
    z = sc_constants(kappa1, kappa2, Vc)
    if z.z4 <= 0 or z.z3 <= 0:
        raise ValueError("denominator may have real roots; rates must be positive")
    if dist.kind == "delta":
        return z.z2 / z.z4

    r1, r2 = z.denominator_roots()
    gamma = dist.gamma
    if dist.kind == "uniform":
        # (1/2G) int_{-G}^{G} = A1/(w^2+r1) + A2/(w^2+r2) integrated exactly
        a1 = (z.z2 - z.z1 * r1) / (r2 - r1)
        a2 = (z.z1 * r2 - z.z2) / (r2 - r1)
        return a1 / r1 * _atan_over_x(gamma / math.sqrt(r1)) + a2 / r2 * _atan_over_x(
            gamma / math.sqrt(r2)
        )

    if dist.kind == "lorentzian":

        def integrand(u: np.ndarray) -> np.ndarray:
            w2 = (gamma / np.tan(u)) ** 2
            return (z.z1 * w2 + z.z2) / (w2 * w2 + z.z3 * w2 + z.z4)

        if dist.cutoff is None:
            phimax = 0.5 * math.pi
            u_lo = min(1e-3 * gamma / math.sqrt(r1), 1e-6)
            val = _panel_quadrature(integrand, u_lo, 0.5 * math.pi)
            # analytic continuation of the integrand ~ z1 u^2 / Gamma^2 below u_lo
            val += z.z1 * u_lo**3 / (3.0 * gamma * gamma)
        else:
            phimax = math.atan(dist.cutoff)
            val = _panel_quadrature(integrand, 0.5 * math.pi - phimax, 0.5 * math.pi)
        return val / phimax
    raise ValueError(f"unknown distribution kind {dist.kind!r}")


def _bisect_root(f, lo: float, hi: float, rtol: float, max_iter: int = 200) -> float:
    """Bisection for ``f`` changing sign from negative at ``lo`` to positive at ``hi``."""
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        if f(mid) > 0.0:
            hi = mid
        else:
            lo = mid
        if hi - lo <= rtol * hi:
            break
    return 0.5 * (lo + hi)


def solve_vc_quantum(
    kappa1: float,
    kappa2: float,
    dist: FrequencyDistribution,
    rtol: float = 1e-6,
) -> float:
    """Critical coupling from the self-consistency condition.

    Scans ``Vc`` geometrically over ``[kappa1, BRACKET_TOP * kappa1]`` for a
    sign change of ``sc_integral - 1`` and bisects it.  Returns ``inf`` when
    no sign change exists (synchronization never occurs).  If the scan sees
    more than one sign change the smallest root is returned with a warning.
    """

    def f(V: float) -> float:
        return sc_integral(V, kappa1, kappa2, dist) - 1.0

    vs = [kappa1]
    while vs[-1] < BRACKET_TOP * kappa1:
        vs.append(min(vs[-1] * 2.0, BRACKET_TOP * kappa1))
    fs = [f(v) for v in vs]
    crossings = [
        i for i in range(len(vs) - 1) if fs[i] < 0.0 <= fs[i + 1]
    ]
    if not crossings:
        return math.inf
    if len(crossings) > 1:
        warnings.warn(
            "multiple sign changes in the V_c bracket; reporting the smallest root",
            stacklevel=2,
        )
    i = crossings[0]
    return _bisect_root(f, vs[i], vs[i + 1], rtol)


def vc_closed_form_quantum(
    kappa1: float, kappa2: float, dist: FrequencyDistribution
) -> float:
    """Leading-order closed forms for ``V_c``, valid for large ``kappa2``.

    Lorentzian disorder with ``Gamma >= kappa1`` gives ``inf``; a Lorentzian
    with a tail cutoff has no closed form and is delegated to
    :func:`solve_vc_quantum`.
    """
    k1, k2 = kappa1, kappa2
    if k1 <= 0 or k2 <= 0:
        raise ValueError("rates must be positive")
    if dist.kind == "delta":
        return 10.0 * k2 / 3.0
    if dist.kind == "uniform":
        g = dist.gamma
        return (
            10 * k1 * k2
            + g * g
            + math.sqrt(100 * k1 * k1 * k2 * k2 + 28 * k1 * k2 * g * g + g**4)
        ) / (6 * k1)
    if dist.kind == "lorentzian":
        if dist.cutoff is not None:
            return solve_vc_quantum(k1, k2, dist)
        g = dist.gamma
        if g >= k1:
            return math.inf
        return 2.0 * k2 * (5.0 * k1 + g) / (3.0 * (k1 - g))
    raise ValueError(f"unknown distribution kind {dist.kind!r}")


def _solve_uniform_classical_branch(
    gamma: float, kappa1: float, branch: str, rtol: float = 1e-8
) -> float:
    """Solve one branch of the implicit classical uniform-disorder condition.

    ``branch='narrow'`` solves ``2 Gamma / Vc = pi + atan(2 (Vc - kappa1) / Gamma)``
    on ``(0, ...]``; ``branch='wide'`` solves
    ``Gamma / Vc = atan(Gamma / (Vc - kappa1))`` on ``(kappa1, ...)``.  Both
    use principal-value ``atan``.
    """
    k1 = kappa1
    if branch == "narrow":

        def f(V: float) -> float:
            return math.pi + math.atan(2.0 * (V - k1) / gamma) - 2.0 * gamma / V

        lo = 1e-12 * max(k1, gamma)
    elif branch == "wide":

        def f(V: float) -> float:
            return math.atan(gamma / (V - k1)) - gamma / V

        lo = k1 * (1.0 + 1e-13)
    else:
        raise ValueError(f"unknown branch {branch!r}")
    hi = 2.0 * k1 + gamma
    while f(hi) < 0.0:
        hi *= 2.0
    return _bisect_root(f, lo, hi, rtol, max_iter=300)


def vc_classical(kappa1: float, dist: FrequencyDistribution, rtol: float = 1e-8) -> float:
    """Classical-limit critical coupling for the same three distributions.

    Delta disorder synchronizes at any positive coupling (``V_c = 0``); the
    uniform case is the solution of an implicit equation whose branch switches
    at ``Gamma = (pi/2) kappa1``; the Lorentzian case is closed form and
    infinite for ``Gamma >= kappa1``.
    """
    k1 = kappa1
    if k1 <= 0:
        raise ValueError("kappa1 must be positive")
    if dist.kind == "delta":
        return 0.0
    g = dist.gamma
    if dist.kind == "uniform":
        branch = "narrow" if g < 0.5 * math.pi * k1 else "wide"
        return _solve_uniform_classical_branch(g, k1, branch, rtol)
    if dist.kind == "lorentzian":
        if g >= k1:
            return math.inf
        return 0.5 * (k1 + 3.0 * g - math.sqrt(k1 * k1 - 2.0 * k1 * g + 5.0 * g * g))
    raise ValueError(f"unknown distribution kind {dist.kind!r}")


def stability_matrix(
    frequencies: np.ndarray, kappa1: float, kappa2: float, V: float
) -> np.ndarray:
    """Linearization of the mean-field dynamics around the unsynchronized state.

    The perturbations of the two lowest off-diagonal elements of each
    oscillator close among themselves through the mean field, giving a dense
    ``2N x 2N`` complex matrix: block-diagonal single-oscillator decay plus a
    rank-one coupling through the mean-field average.
    """
    freqs = np.asarray(frequencies, dtype=float)
    N = freqs.size
    r = unsync_state(kappa1, kappa2, V)
    J = np.zeros((2 * N, 2 * N), dtype=complex)
    idx = np.arange(N)
    J[2 * idx, 2 * idx] = -3.0 * kappa1 - V - 1j * freqs
    J[2 * idx, 2 * idx + 1] = 2.0 * SQRT2 * V
    J[2 * idx + 1, 2 * idx] = 2.0 * SQRT2 * kappa1
    J[2 * idx + 1, 2 * idx + 1] = -2.0 * kappa1 - 2.0 * kappa2 - 3.0 * V - 1j * freqs
    drive = np.zeros(2 * N, dtype=complex)
    drive[0::2] = V * (r.rho00 - r.rho11)
    drive[1::2] = SQRT2 * V * (r.rho11 - r.rho22)
    mean = np.zeros(2 * N, dtype=complex)
    mean[0::2] = 1.0 / N
    mean[1::2] = SQRT2 / N
    return J + np.outer(drive, mean)


def linearization_oracle(
    frequencies: np.ndarray,
    kappa1: float,
    kappa2: float,
    rtol: float = 1e-4,
    bracket_top: float = 1e7,
):
    """Finite-size estimate of ``V_c`` from the spectral abscissa crossing.

    Bisects the maximum real part of the stability-matrix spectrum as a
    function of ``V``.  Returns ``(Vc, crossing_eigenvalue)``; ``(inf, None)``
    if the spectrum never crosses into the right half plane below
    ``bracket_top * kappa1``.
    """
    freqs = np.asarray(frequencies, dtype=float)
    if freqs.size < 2:
        raise ValueError("need at least two oscillators")

    def leading(V: float) -> complex:
        ev = eigvals(stability_matrix(freqs, kappa1, kappa2, V))
        return ev[np.argmax(ev.real)]

    lo = kappa1
    flo = leading(lo).real
    hi = None
    V = lo
    while V < bracket_top * kappa1:
        V *= 2.0
        fv = leading(V).real
        if flo < 0.0 < fv:
            hi = V
            break
        lo, flo = V, fv
    if hi is None:
        return math.inf, None
    vc = _bisect_root(lambda V: leading(V).real, lo, hi, rtol)
    return vc, leading(vc)
