"""Exception types raised across the package."""


class FiniteSosError(Exception):
    """Base class for all package errors."""


class DuplicatePoint(FiniteSosError):
    """A point set contains the same point twice."""


class PointNotInSet(FiniteSosError):
    """A point was expected to belong to a point set but does not."""


class NotACubePoint(FiniteSosError):
    """A point has a coordinate outside {0, 1}."""


class InvalidShape(FiniteSosError):
    """A two-row partition shape (n-k, k) with k > n/2 was requested."""


class DegreeCapExceeded(FiniteSosError):
    """A polynomial exceeds the degree cap of the basis it is decomposed in."""


class ZeroPolynomial(FiniteSosError):
    """The zero polynomial was passed where a nonzero one is required."""


class InvalidProblem(FiniteSosError):
    """A semidefinite problem is structurally malformed or exactly inconsistent."""


class RequiresOddN(FiniteSosError):
    """An operation defined only for odd ambient dimension got an even one."""


class NotSymmetric(FiniteSosError):
    """A polynomial expected to be invariant under coordinate permutations is not."""


class SearchFailed(FiniteSosError):
    """A parameter search exhausted its range; carries diagnostics."""

    def __init__(self, message: str, diagnostics: dict | None = None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}


class InternalConsistencyError(FiniteSosError):
    """A theorem-backed internal assertion failed; indicates a bug."""
