"""Exception types shared across the package."""


class ConfigurationError(ValueError):
    """Invalid chain or matrix parameters."""


class DomainError(ValueError):
    """Input outside the mathematical domain of a formula (trivial momentum,
    out-of-scope coupling range, opaque state where a quantity is undefined)."""


class ClassificationError(RuntimeError):
    """Pseudo-momentum matched a special-state fraction but the contact
    amplitudes contradict the expected node/anti-node pattern."""


class DenseSolverError(RuntimeError):
    """Dense eigensolver failed to converge or produced residuals above bound."""


class StepSizeError(RuntimeError):
    """Time integration became unstable for the chosen step size."""


class TransportError(RuntimeError):
    """Transport coefficient cannot be formed (exactly vanishing gain-site
    amplitude with a finite loss-site amplitude)."""


class OneSidedCouplingWarning(UserWarning):
    """Exactly one contact amplitude fell below the vanish tolerance; the
    ratio is still computed but may span many orders of magnitude."""
