"""Exception and warning classes shared across the package."""


class NFTNoiseError(Exception):
    """Base class for all package errors."""


class InvalidInputError(NFTNoiseError, ValueError):
    """A signal, grid or parameter violates its contract."""


class ScatteringRangeError(NFTNoiseError, ArithmeticError):
    """The scattering recursion overflowed (|Im(lambda)| * window too large)."""


class DegenerateRootError(NFTNoiseError, ArithmeticError):
    """a'(lambda) is indistinguishable from zero, i.e. a multiple (or no) zero."""


class NearSingularError(NFTNoiseError, ArithmeticError):
    """|a(lambda)| too small on the real axis to form b/a."""


class IllConditionedPrescriptionError(NFTNoiseError, ValueError):
    """Soliton prescription has (nearly) colliding eigenvalues."""


class NumericalBlowupError(NFTNoiseError, ArithmeticError):
    """Propagation produced NaN or Inf."""


class ProjectionError(NFTNoiseError, ValueError):
    """Projection onto a zero signal is undefined."""


class DegenerateEnsembleError(NFTNoiseError, ValueError):
    """An ensemble has zero variance in a coordinate."""


class SingularCovarianceError(NFTNoiseError, ArithmeticError):
    """Covariance matrix is not positive definite."""


class TrackingError(NFTNoiseError):
    """Perturbed eigenvalues could not be associated with the reference set."""


class ExcessiveExclusionError(NFTNoiseError):
    """Too many ensemble runs were excluded for the statistics to be trusted."""


class ConfigError(NFTNoiseError, ValueError):
    """Experiment configuration failed validation.

    ``path`` names the offending field, either dotted (``"params.z"``) or as
    a sequence of keys; it is stored dotted.
    """

    def __init__(self, message, path=""):
        if not isinstance(path, str):
            path = ".".join(str(p) for p in path)
        self.path = path
        self.message = message
        super().__init__(f"{path}: {message}" if path else message)


class AccuracyWarning(UserWarning):
    """Step size large enough to degrade split-step accuracy."""


class TailLeakWarning(UserWarning):
    """Pulse does not decay inside the time window."""


class ComplexPhaseWarning(UserWarning):
    """Nonlinear phase difference requested for non-imaginary eigenvalues."""
