"""Exception types raised by the qsync library."""


class QsyncError(Exception):
    """Base class for all qsync errors."""


class InvalidDimensionError(QsyncError, ValueError):
    """Hilbert-space dimension is out of range for the requested operator."""


class InvalidOperatorError(QsyncError, ValueError):
    """Operator matrix does not satisfy the required structure (e.g. not square)."""


class InvalidHamiltonianError(QsyncError, ValueError):
    """Hamiltonian fails the Hermiticity check."""


class ShapeError(QsyncError, ValueError):
    """Array shape incompatible with the requested operation."""


class DegenerateSteadyStateError(QsyncError):
    """Liouvillian null space has dimension > 1; steady state is not unique."""


class NumericalFailureError(QsyncError):
    """A solve produced a state violating physicality tolerances."""


class StepSizeError(QsyncError):
    """Fixed-step integration became inaccurate or unstable; reduce dt."""


class StructureError(QsyncError, ValueError):
    """Density matrix does not have the assumed sparsity structure."""


class StateError(QsyncError, ValueError):
    """Input is not a valid quantum state."""
