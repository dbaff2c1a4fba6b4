"""Certificates for the conductance/eigenvalue inequalities.

For every eigenvalue ``lam`` of a reversible chain with ``0 < lam < 1`` and
conductance ``phi`` we check

* the classical bound ``lam <= 1 - phi**2 / 2``,
* the strengthened bound ``phi**2 + lam**2 <= 1``,

and the two intermediate inequalities behind the strengthened bound, on the
nonnegative vector ``f`` obtained by thresholding the eigenvector:

* ``<f, P.T f> >= lam ||f||**2``  (claim 2),
* ``phi ||f||**2 <= T(f)`` and ``T(f)**2 <= ||f||**4 - <f, P.T f>**2``
  (claim 1), where ``T(f)`` is the telescoping sum computed by
  :func:`telescoping_quantity`.

Inner products and norms are weighted by ``pi``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .chain import ReversibleChain, StationaryDistribution, _frozen
from .conductance import MASS_SLACK, ConductanceResult
from .errors import (
    ChainError,
    MassExceedsHalf,
    NotAnEigenvector,
    OutOfRange,
    SandwichViolation,
    ZeroProperVector,
)
from .spectral import TOL_EIG, SpectrumReport, eigen_residual

SLACK_FLOOR = 1e-9


@dataclass(frozen=True)
class ProperVector:
    f: np.ndarray
    support: tuple[int, ...]
    support_mass: float


@dataclass(frozen=True)
class Claim1Diagnostic:
    """Claim-1 quantities for a proper vector rescaled to ``||f|| = 1``.

    ``phi_norm4`` is ``phi**2 ||f||**4``, ``middle`` the squared telescoping
    sum and ``rhs`` is ``||f||**4 - <f, P.T f>**2``.
    """

    phi_norm4: float
    middle: float
    rhs: float
    telescoping: float
    phi_norm2: float

    @property
    def lower_slack(self) -> float:
        return self.telescoping - self.phi_norm2

    @property
    def upper_slack(self) -> float:
        return self.rhs - self.middle

    def to_dict(self) -> dict:
        return {"lhs": self.phi_norm4, "middle": self.middle, "rhs": self.rhs}


@dataclass(frozen=True)
class EigenCertificate:
    index: int
    lam: float
    classical_slack: float
    new_slack: float
    claim2_slack: float | None = None
    claim2_floor: float | None = None
    claim1: Claim1Diagnostic | None = None
    error: str | None = None

    def violations(self, floor: float = SLACK_FLOOR) -> list[str]:
        out = []
        if self.classical_slack < -floor:
            out.append("classical")
        if self.new_slack < -floor:
            out.append("strengthened")
        if self.claim2_slack is not None and self.claim2_slack < -self.claim2_floor:
            out.append("claim2")
        if self.claim1 is not None:
            if self.claim1.lower_slack < -floor:
                out.append("claim1_lower")
            if self.claim1.upper_slack < -floor:
                out.append("claim1_upper")
        return out

    def to_dict(self) -> dict:
        return {
            "lambda": self.lam,
            "classical_slack": self.classical_slack,
            "new_slack": self.new_slack,
            "claim2_slack": self.claim2_slack,
            "claim1": self.claim1.to_dict() if self.claim1 else None,
            **({"error": self.error} if self.error else {}),
        }


@dataclass(frozen=True)
class BoundCertificate:
    phi: float
    rigorous: bool
    eigen: tuple[EigenCertificate, ...] = field(default_factory=tuple)

    @property
    def vacuous(self) -> bool:
        return not self.eigen

    def violations(self) -> list[tuple[float, str]]:
        return [(e.lam, v) for e in self.eigen for v in e.violations()]

    @property
    def uncertifiable(self) -> list[EigenCertificate]:
        return [e for e in self.eigen if e.error is not None]

    def min_slacks(self) -> dict:
        def lowest(values):
            values = [v for v in values if v is not None]
            return min(values) if values else None

        return {
            "classical": lowest(e.classical_slack for e in self.eigen),
            "strengthened": lowest(e.new_slack for e in self.eigen),
            "claim2": lowest(e.claim2_slack for e in self.eigen),
            "claim1_lower": lowest(e.claim1.lower_slack if e.claim1 else None for e in self.eigen),
            "claim1_upper": lowest(e.claim1.upper_slack if e.claim1 else None for e in self.eigen),
        }

    def to_dict(self) -> dict:
        return {
            "phi": self.phi,
            "vacuous": self.vacuous,
            "eigen": [e.to_dict() for e in self.eigen],
            "rigorous": self.rigorous,
        }


@dataclass(frozen=True)
class BoundComparison:
    classical: float
    strengthened: float


def _pi_of(pi) -> np.ndarray:
    return pi.pi if isinstance(pi, StationaryDistribution) else np.asarray(pi, dtype=float)


def proper_vector(f, pi) -> ProperVector:
    """Wrap ``f`` as a :class:`ProperVector`, checking nonnegativity and support mass."""
    w = _pi_of(pi)
    f = np.asarray(f, dtype=float)
    if np.any(f < 0):
        raise ValueError("proper vectors are entrywise nonnegative")
    support = tuple(int(i) for i in np.flatnonzero(f > 0))
    if not support:
        raise ZeroProperVector("proper vectors are nonzero")
    mass = float(w[list(support)].sum())
    if mass > 0.5 + MASS_SLACK:
        raise MassExceedsHalf(f"positive support has mass {mass:.6g} > 1/2")
    return ProperVector(_frozen(f), support, mass)


def make_proper_from_eigvec(g, pi) -> ProperVector:
    """Threshold ``g`` at zero, negating first if its positive part is too heavy.

    Entries equal to zero stay out of the support.
    """
    w = _pi_of(pi)
    g = np.asarray(g, dtype=float)
    if not np.any(g):
        raise ZeroProperVector("eigenvector is zero")
    if w[g > 0].sum() > 0.5 + MASS_SLACK:
        g = -g
    f = np.maximum(g, 0.0)
    if not np.any(f > 0):
        raise ZeroProperVector("no strictly positive entries after choosing the sign")
    return proper_vector(f, w)


def _quad(chain: ReversibleChain, f: np.ndarray) -> tuple[float, float]:
    """(||f||**2, <f, P.T f>)."""
    w = chain.weights
    return float(np.sum(w * f * f)), float(np.sum(w * f * (chain.matrix.T @ f)))


def telescoping_quantity(chain: ReversibleChain, f: ProperVector | np.ndarray) -> float:
    """``sum_{a<b} P_ab pi_b (f_a**2 - f_b**2)`` with states relabeled so ``f`` decreases.

    Ties in ``f`` keep their original index order.
    """
    f = np.asarray(f.f if isinstance(f, ProperVector) else f, dtype=float)
    order = np.argsort(-f, kind="stable")
    P = chain.matrix[np.ix_(order, order)]
    w = chain.weights[order]
    sq = f[order] ** 2
    terms = P * w[None, :] * (sq[:, None] - sq[None, :])
    return float(np.triu(terms, k=1).sum())


def claim1_quantities(chain: ReversibleChain, f: ProperVector, phi: float) -> Claim1Diagnostic:
    vec = np.asarray(f.f, dtype=float)
    vec = vec / math.sqrt(_quad(chain, vec)[0])
    norm2, inner = _quad(chain, vec)
    t = telescoping_quantity(chain, vec)
    return Claim1Diagnostic(
        phi_norm4=phi * phi * norm2 * norm2,
        middle=t * t,
        rhs=norm2 * norm2 - inner * inner,
        telescoping=t,
        phi_norm2=phi * norm2,
    )


def check_claim1(chain: ReversibleChain, f: ProperVector, phi: float | ConductanceResult,
                 floor: float = SLACK_FLOOR) -> Claim1Diagnostic:
    """Evaluate both halves of the claim-1 sandwich on ``f / ||f||``.

    Raises:
        SandwichViolation: if either half fails by more than ``floor``.
    """
    if isinstance(phi, ConductanceResult):
        phi = phi.phi
    diag = claim1_quantities(chain, f, phi)
    if diag.lower_slack < -floor:
        raise SandwichViolation("lower", -diag.lower_slack)
    if diag.upper_slack < -floor:
        raise SandwichViolation("upper", -diag.upper_slack)
    return diag


def _claim2(chain: ReversibleChain, lam: float, g, tol_eig: float) -> tuple[float, float, ProperVector]:
    g = np.asarray(g, dtype=float)
    residual = eigen_residual(chain, lam, g)
    if residual > tol_eig:
        raise NotAnEigenvector(residual, tol_eig)
    # fix the scale at ||g|| = 1 so the slack does not depend on how g was normalized
    g = g / math.sqrt(_quad(chain, g)[0])
    f = make_proper_from_eigvec(g, chain.weights)
    norm2, inner = _quad(chain, np.asarray(f.f))
    return inner - lam * norm2, norm2, f


def check_claim2(chain: ReversibleChain, lam: float, g, tol_eig: float = TOL_EIG) -> float:
    """Slack ``<f, P.T f> - lam ||f||**2`` of the proper vector built from ``g``.

    ``g`` is first rescaled to unit weighted norm.

    Raises:
        NotAnEigenvector: if ``P.T g`` is not ``lam g`` to ``tol_eig``.
        ZeroProperVector, MassExceedsHalf: from the thresholding step.
    """
    return _claim2(chain, lam, g, tol_eig)[0]


def compare_bounds(phi: float) -> BoundComparison:
    """Eigenvalue upper bounds implied by ``phi``: ``1 - phi**2/2`` and ``sqrt(1 - phi**2)``."""
    if not 0.0 <= phi <= 1.0 or math.isnan(phi):
        raise OutOfRange(f"conductance must lie in [0, 1], got {phi!r}")
    return BoundComparison(classical=1.0 - phi * phi / 2.0, strengthened=math.sqrt(1.0 - phi * phi))


def certify(chain: ReversibleChain, spectrum: SpectrumReport, phi: ConductanceResult,
            tol_eig: float = TOL_EIG) -> BoundCertificate:
    """Certify every eigenvalue in (0, 1) against ``phi``.

    Failures of the claim checks are recorded on the per-eigenvalue entry,
    never raised.  Certificates built from a sweep cut are marked
    non-rigorous, since a sweep overestimates the conductance.
    """
    p = phi.phi
    entries = []
    for k in spectrum.positive_indices:
        lam = float(spectrum.eigenvalues[k])
        base = dict(index=k, lam=lam, classical_slack=(1.0 - p * p / 2.0) - lam, new_slack=1.0 - p * p - lam * lam)
        try:
            slack, norm2, f = _claim2(chain, lam, spectrum.eigvec(k), tol_eig)
            diag = claim1_quantities(chain, f, p)
        except ChainError as exc:
            entries.append(EigenCertificate(**base, error=f"{type(exc).__name__}: {exc}"))
            continue
        entries.append(EigenCertificate(**base, claim2_slack=slack, claim2_floor=SLACK_FLOOR * norm2, claim1=diag))
    return BoundCertificate(phi=p, rigorous=phi.method == "exact", eigen=tuple(entries))
