"""Exception hierarchy.

Everything raised on purpose derives from :class:`ChainError`.  Input problems
(bad matrices, non-ergodic or non-reversible chains, unparsable files) derive
from :class:`ValidationError`; the CLI maps those to exit code 2.
"""

from __future__ import annotations


class ChainError(Exception):
    """Base class for all errors raised by chaincert."""


class ValidationError(ChainError):
    """The input does not describe a chain we can analyze."""


class NonSquare(ValidationError):
    def __init__(self, shape):
        self.shape = tuple(shape)
        super().__init__(f"transition matrix must be square and non-empty, got shape {self.shape}")


class NonFiniteEntry(ValidationError):
    def __init__(self, i: int, j: int):
        self.i, self.j = i, j
        super().__init__(f"entry ({i}, {j}) is not finite")


class NegativeEntry(ValidationError):
    def __init__(self, i: int, j: int, value: float | None = None):
        self.i, self.j, self.value = i, j, value
        super().__init__(f"entry ({i}, {j}) is negative ({value!r})")


class ColumnSumOff(ValidationError):
    def __init__(self, j: int, total: float):
        self.j, self.total = j, total
        super().__init__(f"column {j} sums to {total!r}, not 1")


class DimensionMismatch(ValidationError):
    pass


class NotErgodic(ValidationError):
    def __init__(self, report):
        self.report = report
        what = "not irreducible" if not report.irreducible else f"periodic (period {report.period})"
        super().__init__(f"chain is not ergodic: {what}")


class NotReversible(ValidationError):
    def __init__(self, violation: float, pair: tuple[int, int], tol: float):
        self.violation, self.pair, self.tol = violation, pair, tol
        i, j = pair
        super().__init__(
            f"detailed balance fails at pair ({i}, {j}): |P_ij pi_j - P_ji pi_i| = {violation:.3e} > {tol:.1e}"
        )


class ParseError(ValidationError):
    pass


class SingularSystem(ChainError):
    """The stationary linear system could not be solved to tolerance."""


class NoConvergence(ChainError):
    def __init__(self, max_sweeps: int, off: float):
        self.max_sweeps, self.off = max_sweeps, off
        super().__init__(f"Jacobi did not converge in {max_sweeps} sweeps (off-diagonal mass {off:.3e})")


class TooSmall(ChainError):
    def __init__(self, n: int):
        self.n = n
        super().__init__(f"conductance is undefined for n={n}: no nonempty proper subset")


class TooLarge(ChainError):
    def __init__(self, n: int, max_n: int):
        self.n, self.max_n = n, max_n
        super().__init__(f"exact conductance limited to n <= {max_n}, got n={n}; use a sweep cut instead")


class NoValidPrefix(ChainError):
    """Every sweep prefix has stationary mass above 1/2."""


class ZeroProperVector(ChainError):
    """Thresholding the eigenvector left nothing positive."""


class MassExceedsHalf(ChainError):
    """Neither sign of the eigenvector has positive support of mass <= 1/2."""


class NotAnEigenvector(ChainError):
    def __init__(self, residual: float, tol: float):
        self.residual, self.tol = residual, tol
        super().__init__(f"eigen-residual {residual:.3e} exceeds {tol:.1e}")


class SandwichViolation(ChainError):
    def __init__(self, which_side: str, magnitude: float):
        self.which_side, self.magnitude = which_side, magnitude
        super().__init__(f"claim-1 sandwich violated on the {which_side} side by {magnitude:.3e}")


class OutOfRange(ChainError, ValueError):
    pass


class Disconnected(ChainError, ValueError):
    pass


class Periodic(ChainError, ValueError):
    def __init__(self, period: int):
        self.period = period
        super().__init__(f"generated chain has period {period}; request laziness (alpha > 0)")
