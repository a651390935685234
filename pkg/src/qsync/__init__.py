"""Quantum synchronization of dissipatively coupled van der Pol oscillators.

Steady states and entanglement of two coupled oscillators in the quantum
limit, the mean-field synchronization transition of large disordered
ensembles, critical-coupling formulas for delta, uniform and Lorentzian
disorder, and the classical-limit counterparts.

All rates and frequencies are expressed in units of the linear gain rate
``kappa1``; times in units of ``1/kappa1``.
"""

__version__ = "0.1.0"

from . import classical, critical, ensemble, hilbert, lindblad, two_osc
from .classical import (
    arnold_scan,
    classical_ensemble_run,
    classical_two_rhs,
    detect_locking,
)
from .critical import (
    linearization_oracle,
    sc_constants,
    sc_integral,
    solve_vc_quantum,
    stability_mode,
    unsync_state,
    vc_classical,
    vc_closed_form_quantum,
)
from .ensemble import (
    EnsembleConfig,
    FrequencyDistribution,
    MeanFieldState,
    first_crossing,
    integrate,
    mean_field_rhs,
    order_parameter,
    sample_frequencies,
    transition_scan,
)
from .lindblad import (
    SingleOscParams,
    SpinModelParams,
    TwoOscParams,
    build_single_vdp,
    build_spin_model,
    build_two_vdp,
    evolve_rk4,
    expectation,
    steady_state,
)
from .two_osc import (
    AnalyticSteadyState,
    PhaseMarginal,
    analytic_steady_state,
    concurrence,
    phase_marginal,
    tongue_boundary,
    tongue_scan,
)

__all__ = [
    "__version__",
    "hilbert",
    "lindblad",
    "two_osc",
    "critical",
    "ensemble",
    "classical",
    "SingleOscParams",
    "TwoOscParams",
    "SpinModelParams",
    "build_single_vdp",
    "build_two_vdp",
    "build_spin_model",
    "steady_state",
    "evolve_rk4",
    "expectation",
    "AnalyticSteadyState",
    "PhaseMarginal",
    "analytic_steady_state",
    "phase_marginal",
    "concurrence",
    "tongue_boundary",
    "tongue_scan",
    "FrequencyDistribution",
    "EnsembleConfig",
    "MeanFieldState",
    "sample_frequencies",
    "mean_field_rhs",
    "integrate",
    "order_parameter",
    "transition_scan",
    "first_crossing",
    "unsync_state",
    "sc_constants",
    "sc_integral",
    "stability_mode",
    "solve_vc_quantum",
    "vc_closed_form_quantum",
    "vc_classical",
    "linearization_oracle",
    "classical_two_rhs",
    "detect_locking",
    "arnold_scan",
    "classical_ensemble_run",
]
