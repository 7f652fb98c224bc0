"""Exception hierarchy shared across the package.

The CLI maps these onto exit codes: configuration problems exit with 2,
numerical failures (leakage, degeneracy, accuracy loss) with 3 and I/O
problems with 4.
"""


class BlochZenerError(Exception):
    """Base class for all package-specific errors."""


class ConfigError(BlochZenerError):
    """Invalid run configuration. Carries a field path for diagnostics."""

    def __init__(self, field: str, message: str):
        self.field = field
        super().__init__(f"{field}: {message}")


class WindowError(BlochZenerError):
    """Lattice window too small, asymmetric where symmetry is required,
    or a packet does not fit."""


class DegenerateBlochStateError(BlochZenerError):
    """Bloch coefficients requested at the band-touching point
    (delta = 0 and cos(kappa*d) = 0) where the normalisation vanishes."""


class DegenerateLadderError(BlochZenerError):
    """The two Wannier-Stark ladders are closer than the labelling
    tolerance; both candidate offsets are reported."""

    def __init__(self, offsets, message="ladder offsets degenerate"):
        self.offsets = tuple(offsets)
        super().__init__(f"{message}: {self.offsets}")


class IntegrationAccuracyError(BlochZenerError):
    """An ODE integration failed its accuracy contract (non-unimodular
    monodromy, unitarity drift, or a failed step-halving check)."""


class LeakageError(BlochZenerError):
    """A propagated wave packet reached the guard band of the truncation
    window; physics assertions downstream would be contaminated."""


class CompletenessError(BlochZenerError):
    """Band occupations do not sum to one within tolerance, signalling a
    truncation or quadrature failure."""


class FitResidualError(BlochZenerError):
    """A model fit exceeded its residual threshold."""


class TuningError(BlochZenerError):
    """Root bracketing for the gap-tuning solver failed."""
