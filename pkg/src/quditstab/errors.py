"""Exception types shared across the package."""


class QuditError(Exception):
    """Base class for library errors."""


class SizeGuardError(QuditError):
    """Raised when a dense object would exceed its configured size limit."""


class DimensionMismatch(QuditError, ValueError):
    pass


class DependentGenerators(QuditError):
    def __init__(self, indices):
        self.indices = tuple(indices)
        super().__init__(f"generator labels are linearly dependent at indices {self.indices}")


class NonCommuting(QuditError):
    def __init__(self, i, j, phase):
        self.indices = (i, j)
        self.phase = phase
        super().__init__(f"generators {i} and {j} do not commute (symplectic product {phase})")


class NotEigenstate(QuditError):
    pass


class NotASubspace(QuditError):
    pass


class InvariantViolation(QuditError):
    """An internal identity that should hold by construction did not."""


def check_size(count: int, limit: int, what: str) -> None:
    if count > limit:
        raise SizeGuardError(f"{what}: {count} exceeds limit {limit}")
