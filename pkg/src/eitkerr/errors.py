"""Exception and warning types raised across the package."""


class EITError(Exception):
    """Base class for every error raised by eitkerr."""


class ValidationError(EITError, ValueError):
    """An input violates a documented invariant."""


class UnsupportedOrder(EITError, ValueError):
    pass


class DegenerateManifold(EITError, ValueError):
    """Both Rabi frequencies vanish, so the dressed basis is undefined."""


class ConvergenceFailure(EITError, RuntimeError):
    pass


class StepTooLarge(EITError, ValueError):
    pass


class NormDrift(EITError, RuntimeError):
    pass


class TruncationError(EITError, ValueError):
    """The Fock window misses more Poisson mass than allowed."""


class SeriesRegimeViolation(EITError, ValueError):
    pass


class LargeNViolation(EITError, ValueError):
    pass


class DetuningRatioViolation(EITError, ValueError):
    pass


class AcceptanceFailure(EITError):
    def __init__(self, rows):
        self.rows = list(rows)
        names = ", ".join(r["quantity"] for r in self.rows)
        super().__init__(f"deviation above tolerance for: {names}")


class ValidationFailure(EITError):
    def __init__(self, failed):
        self.failed = list(failed)
        super().__init__("failed checks: " + ", ".join(self.failed))


class ApproximationWarning(UserWarning):
    """An approximate formula is used outside its comfortable regime."""


class SeriesRegimeWarning(ApproximationWarning):
    pass


class LargeNWarning(ApproximationWarning):
    pass


class DetuningRatioWarning(ApproximationWarning):
    pass
