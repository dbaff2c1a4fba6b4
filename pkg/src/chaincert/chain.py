"""Finite Markov chains in the column convention.

``P[i, j]`` is the probability of moving to state ``i`` from state ``j``, so
columns sum to one and the stationary distribution satisfies ``P @ pi == pi``.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass

import numpy as np

from .errors import (
    ColumnSumOff,
    DimensionMismatch,
    NegativeEntry,
    NonFiniteEntry,
    NonSquare,
    NotErgodic,
    NotReversible,
    SingularSystem,
)

TOL_STOCHASTIC = 1e-9
TOL_STATIONARY = 1e-9
TOL_BALANCE = 1e-8


def _frozen(a) -> np.ndarray:
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class TransitionMatrix:
    entries: np.ndarray

    @property
    def n(self) -> int:
        return self.entries.shape[0]


@dataclass(frozen=True)
class StationaryDistribution:
    pi: np.ndarray

    @property
    def n(self) -> int:
        return self.pi.shape[0]


@dataclass(frozen=True)
class ErgodicityReport:
    irreducible: bool
    aperiodic: bool
    period: int

    @property
    def ergodic(self) -> bool:
        return self.irreducible and self.aperiodic


@dataclass(frozen=True)
class ReversibleChain:
    """An ergodic chain that satisfies detailed balance, bundled with its pi."""

    P: TransitionMatrix
    pi: StationaryDistribution
    ergodicity: ErgodicityReport
    max_detailed_balance_violation: float

    @property
    def n(self) -> int:
        return self.P.n

    @property
    def matrix(self) -> np.ndarray:
        return self.P.entries

    @property
    def weights(self) -> np.ndarray:
        return self.pi.pi


def validate_transition_matrix(raw, tol_stochastic: float = TOL_STOCHASTIC) -> TransitionMatrix:
    """Check a raw column-stochastic matrix and renormalize its columns.

    Raises NonSquare, NonFiniteEntry, NegativeEntry or ColumnSumOff, checked
    in that order.
    """
    try:
        P = np.array(raw, dtype=float)
    except (TypeError, ValueError) as exc:
        raise NonSquare(np.shape(raw) if not isinstance(raw, str) else ()) from exc
    if P.ndim != 2 or P.shape[0] != P.shape[1] or P.shape[0] < 1:
        raise NonSquare(P.shape)
    bad = np.argwhere(~np.isfinite(P))
    if len(bad):
        raise NonFiniteEntry(int(bad[0][0]), int(bad[0][1]))
    neg = np.argwhere(P < 0)
    if len(neg):
        i, j = (int(x) for x in neg[0])
        raise NegativeEntry(i, j, float(P[i, j]))
    sums = P.sum(axis=0)
    for j, s in enumerate(sums):
        if abs(s - 1.0) > tol_stochastic:
            raise ColumnSumOff(j, float(s))
    return TransitionMatrix(_frozen(P / sums[None, :]))


def _successors(P: np.ndarray) -> list[list[int]]:
    # edge j -> i iff P[i, j] > 0
    return [np.flatnonzero(P[:, j] > 0).tolist() for j in range(P.shape[0])]


def _reach(adj: list[list[int]], start: int) -> set[int]:
    seen = {start}
    queue = deque([start])
    while queue:
        u = queue.popleft()
        for v in adj[u]:
            if v not in seen:
                seen.add(v)
                queue.append(v)
    return seen


def check_ergodicity(P: TransitionMatrix) -> ErgodicityReport:
    """Irreducibility and period of the support graph.

    The period is the gcd of ``level(u) + 1 - level(v)`` over the edges of the
    strongly connected component containing state 0, with BFS levels from 0.
    """
    A = P.entries
    n = A.shape[0]
    succ = _successors(A)
    pred: list[list[int]] = [[] for _ in range(n)]
    for u, vs in enumerate(succ):
        for v in vs:
            pred[v].append(u)

    forward = _reach(succ, 0)
    component = forward & _reach(pred, 0)
    irreducible = len(component) == n

    level = {0: 0}
    queue = deque([0])
    while queue:
        u = queue.popleft()
        for v in succ[u]:
            if v in component and v not in level:
                level[v] = level[u] + 1
                queue.append(v)
    period = 0
    for u in component:
        for v in succ[u]:
            if v in component:
                period = math.gcd(period, abs(level[u] + 1 - level[v]))
    # a lone state without a self-loop has no cycles; call it period 1
    period = period or 1
    return ErgodicityReport(irreducible=irreducible, aperiodic=period == 1, period=period)


def _solve_stationary(A: np.ndarray, tol_stationary: float) -> np.ndarray:
    n = A.shape[0]
    M = A - np.eye(n)
    M[-1, :] = 1.0
    rhs = np.zeros(n)
    rhs[-1] = 1.0
    try:
        pi = np.linalg.solve(M, rhs)
    except np.linalg.LinAlgError as exc:
        raise SingularSystem(str(exc)) from exc
    if not np.all(np.isfinite(pi)) or np.any(pi <= 0):
        raise SingularSystem("stationary solve produced non-positive entries")
    pi = pi / pi.sum()
    residual = float(np.max(np.abs(A @ pi - pi)))
    if residual > tol_stationary:
        raise SingularSystem(f"stationary residual {residual:.3e} exceeds {tol_stationary:.1e}")
    return pi


def stationary_distribution(
    P: TransitionMatrix,
    ergo: ErgodicityReport,
    tol_stationary: float = TOL_STATIONARY,
) -> StationaryDistribution:
    """Solve ``(P - I) pi = 0`` with the last equation replaced by ``sum(pi) = 1``."""
    if not ergo.ergodic:
        raise NotErgodic(ergo)
    return StationaryDistribution(_frozen(_solve_stationary(P.entries, tol_stationary)))


def balance_violations(P: TransitionMatrix, pi: StationaryDistribution) -> np.ndarray:
    """Matrix of ``|P_ij pi_j - P_ji pi_i|``."""
    A, w = P.entries, pi.pi
    if A.shape[0] != w.shape[0]:
        raise DimensionMismatch(f"matrix has n={A.shape[0]}, pi has length {w.shape[0]}")
    flow = A * w[None, :]
    return np.abs(flow - flow.T)


def check_detailed_balance(P: TransitionMatrix, pi: StationaryDistribution) -> float:
    """Largest detailed-balance violation ``max |P_ij pi_j - P_ji pi_i|``."""
    return float(balance_violations(P, pi).max())


def worst_balance_pair(P: TransitionMatrix, pi: StationaryDistribution) -> tuple[int, int]:
    V = balance_violations(P, pi)
    i, j = np.unravel_index(int(np.argmax(V)), V.shape)
    return int(min(i, j)), int(max(i, j))


def weighted_inner_product(f, g, pi: StationaryDistribution) -> float:
    f = np.asarray(f, dtype=float)
    g = np.asarray(g, dtype=float)
    w = pi.pi
    if f.shape != w.shape or g.shape != w.shape:
        raise DimensionMismatch(f"vectors of shape {f.shape} and {g.shape} against pi of length {w.shape[0]}")
    return float(np.sum(f * w * g))


def pi_norm(f, pi: StationaryDistribution) -> float:
    return math.sqrt(weighted_inner_product(f, f, pi))


def make_reversible_chain(
    P: TransitionMatrix,
    pi: StationaryDistribution | None = None,
    *,
    tol_stationary: float = TOL_STATIONARY,
    tol_balance: float = TOL_BALANCE,
) -> ReversibleChain:
    """Bundle a validated matrix into a :class:`ReversibleChain`.

    If ``pi`` is given (generators know it in closed form) it is checked for
    stationarity instead of being solved for.  Raises NotErgodic or
    NotReversible.
    """
    ergo = check_ergodicity(P)
    if not ergo.irreducible:
        raise NotErgodic(ergo)
    # irreducibility already pins pi down, so a periodic chain that also breaks
    # detailed balance is reported as NotReversible
    if pi is None:
        pi = StationaryDistribution(_frozen(_solve_stationary(P.entries, tol_stationary)))
    else:
        w = pi.pi
        if w.shape[0] != P.n:
            raise DimensionMismatch(f"pi has length {w.shape[0]}, expected {P.n}")
        if np.any(w <= 0) or abs(w.sum() - 1.0) > TOL_STOCHASTIC:
            raise SingularSystem("supplied pi is not a positive probability vector")
        residual = float(np.max(np.abs(P.entries @ w - w)))
        if residual > tol_stationary:
            raise SingularSystem(f"supplied pi is not stationary (residual {residual:.3e})")
    violation = check_detailed_balance(P, pi)
    if violation > tol_balance:
        raise NotReversible(violation, worst_balance_pair(P, pi), tol_balance)
    if not ergo.aperiodic:
        raise NotErgodic(ergo)
    return ReversibleChain(P=P, pi=pi, ergodicity=ergo, max_detailed_balance_violation=violation)


def chain_from_matrix(raw, *, tol_stochastic: float = TOL_STOCHASTIC, tol_balance: float = TOL_BALANCE,
                      tol_stationary: float = TOL_STATIONARY) -> ReversibleChain:
    """Validate, solve for pi and check reversibility in one go."""
    P = validate_transition_matrix(raw, tol_stochastic)
    return make_reversible_chain(P, tol_stationary=tol_stationary, tol_balance=tol_balance)
