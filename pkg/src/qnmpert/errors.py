"""Exception types raised by the qnmpert library."""


class QnmError(Exception):
    """Base class for all qnmpert errors."""


class RegimeViolation(QnmError, ValueError):
    """Parameters outside the regime a formula assumes (e.g. 4 V0 b^2 <= 1)."""


class IntegrationFailure(QnmError, RuntimeError):
    """ODE integration failed; carries the location of the failure."""

    def __init__(self, message, x=None):
        super().__init__(message)
        self.x = x


class NoRoot(QnmError, RuntimeError):
    """Root search did not converge; carries the last iterate."""

    def __init__(self, message, last=None):
        super().__init__(message)
        self.last = last


class RejectedRoot(QnmError, ValueError):
    """A converged root violates the outgoing-mode condition Im(omega) < 0."""


class ResonantDenominator(QnmError, ArithmeticError):
    """A tail-series denominator alpha*k - 2i*omega is too close to zero."""

    def __init__(self, message, k=None):
        super().__init__(message)
        self.k = k


class TailRegionTooClose(QnmError, ValueError):
    """Born expansion requested where |V(x)| is not small against |alpha - 2i omega|."""


class PoleInTail(QnmError, ArithmeticError):
    """The tail-series denominator sum vanished; the log derivative has a pole."""


class PrecisionExhausted(QnmError, ArithmeticError):
    """Cancellation swallowed the available digits; enable asymptotic subtraction."""

    def __init__(self, message, digits_lost=None):
        super().__init__(message)
        self.digits_lost = digits_lost


class DegenerateNorm(QnmError, ArithmeticError):
    """The generalized norm is numerically indistinguishable from zero."""


class InconsistentShift(QnmError, ArithmeticError):
    """Wavefunction correction fails its far-boundary condition; the frequency
    shift feeding it is wrong."""


class GridMismatch(QnmError, ValueError):
    """Profiles or samples do not share a common grid."""


class UnsupportedConfiguration(QnmError, ValueError):
    """Operation requires a configuration (e.g. half line, finite support) the
    inputs do not satisfy."""


class BadAngle(QnmError, ValueError):
    """Rotated-contour integrand grows along the chosen ray."""


class BadAmplitude(QnmError, ValueError):
    """Outgoing amplitude is inconsistent with the profile endpoint."""


class RunFileError(QnmError, ValueError):
    """A run file failed to parse or validate."""
