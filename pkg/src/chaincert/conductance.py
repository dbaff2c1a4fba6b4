"""Conductance: exact by subset enumeration, upper bounds by sweep cuts.

For a subset ``S`` of states the outgoing flow is
``Q(S) = sum_{i in S, j not in S} P_ji pi_i`` and ``phi(S) = Q(S) / pi(S)``.
The conductance is the minimum of ``phi(S)`` over nonempty ``S`` with
``pi(S) <= 1/2``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Literal

import numpy as np

from .chain import ReversibleChain
from .errors import NoValidPrefix, TooLarge, TooSmall

MASS_SLACK = 1e-12
# phi values closer than this count as a tie, resolved lexicographically
TIE_TOL = 1e-12
MAX_EXACT_N = 20
_CHUNK = 1 << 15


@dataclass(frozen=True)
class StateSubset:
    members: tuple[int, ...]
    mass: float

    @classmethod
    def of(cls, members: Iterable[int], pi) -> "StateSubset":
        m = tuple(sorted(int(i) for i in members))
        return cls(m, float(np.sum(np.asarray(pi)[list(m)])) if m else 0.0)


@dataclass(frozen=True)
class ConductanceResult:
    phi: float
    argmin: StateSubset
    method: Literal["exact", "sweep"]
    flow: float

    def to_dict(self) -> dict:
        return {
            "phi": self.phi,
            "subset": list(self.argmin.members),
            "mass": self.argmin.mass,
            "method": self.method,
        }


def flow_matrix(chain: ReversibleChain) -> np.ndarray:
    """``F[i, j] = P_ji pi_i``: probability flow from ``i`` to ``j`` in one step."""
    return chain.matrix.T * chain.weights[:, None]


def edge_flow(chain: ReversibleChain, S: StateSubset | Iterable[int]) -> float:
    members = S.members if isinstance(S, StateSubset) else tuple(S)
    inside = np.zeros(chain.n, dtype=bool)
    inside[list(members)] = True
    return float(flow_matrix(chain)[np.ix_(inside, ~inside)].sum())


def reverse_flow(chain: ReversibleChain, S: StateSubset | Iterable[int]) -> float:
    """``Q(complement of S)``: flow into ``S``."""
    members = S.members if isinstance(S, StateSubset) else tuple(S)
    inside = np.zeros(chain.n, dtype=bool)
    inside[list(members)] = True
    return float(flow_matrix(chain)[np.ix_(~inside, inside)].sum())


def _result(chain: ReversibleChain, members, method) -> ConductanceResult:
    S = StateSubset.of(members, chain.weights)
    q = edge_flow(chain, S)
    return ConductanceResult(phi=q / S.mass, argmin=S, method=method, flow=q)


def _members(mask: int, n: int) -> tuple[int, ...]:
    return tuple(i for i in range(n) if mask >> i & 1)


def _pick(candidates: list[tuple[float, tuple[int, ...]]]) -> tuple[int, ...]:
    """Lowest phi, ties within TIE_TOL broken by the lexicographically smallest member tuple."""
    best = min(phi for phi, _ in candidates)
    return min(m for phi, m in candidates if phi <= best + TIE_TOL)


def exact_conductance(chain: ReversibleChain, max_n: int = MAX_EXACT_N) -> ConductanceResult:
    """Minimum of ``phi(S)`` over every nonempty ``S`` with ``pi(S) <= 1/2``.

    Subsets are enumerated as bitmasks (bit ``i`` set means state ``i`` is in
    ``S``) in blocks; each block is evaluated with one matrix product.
    """
    n = chain.n
    if n < 2:
        raise TooSmall(n)
    if n > max_n:
        raise TooLarge(n, max_n)
    pi = chain.weights
    F = flow_matrix(chain)
    bits = 1 << np.arange(n, dtype=np.int64)
    total = 1 << n

    phis = np.full(total, np.inf)
    for start in range(1, total - 1, _CHUNK):
        masks = np.arange(start, min(start + _CHUNK, total - 1), dtype=np.int64)
        X = ((masks[:, None] & bits[None, :]) != 0).astype(float)
        mass = X @ pi
        ok = mass <= 0.5 + MASS_SLACK
        Xo = X[ok]
        q = np.sum((Xo @ F) * (1.0 - Xo), axis=1)
        phis[masks[ok]] = q / mass[ok]

    best = float(phis.min())
    tied = np.flatnonzero(phis <= best + TIE_TOL)
    members = min(_members(int(m), n) for m in tied)
    return _result(chain, members, "exact")


def sweep_conductance(chain: ReversibleChain, ordering) -> ConductanceResult:
    """Best prefix cut along ``ordering`` and along its negation.

    States are sorted by decreasing ``ordering`` (ties by index), and every
    prefix of mass at most 1/2 is a candidate.  The result is an upper bound
    on :func:`exact_conductance`.

    Raises:
        NoValidPrefix: if no prefix in either direction has mass <= 1/2.
    """
    n = chain.n
    if n < 2:
        raise TooSmall(n)
    x = np.asarray(ordering, dtype=float)
    if x.shape != (n,):
        raise ValueError(f"ordering must have length {n}, got shape {x.shape}")
    pi = chain.weights
    F = flow_matrix(chain)
    candidates = []
    for direction in (x, -x):
        order = np.argsort(-direction, kind="stable")
        inside = np.zeros(n, dtype=bool)
        mass = 0.0
        for k in range(n - 1):
            inside[order[k]] = True
            mass += pi[order[k]]
            if mass > 0.5 + MASS_SLACK:
                break
            q = float(F[np.ix_(inside, ~inside)].sum())
            candidates.append((q / mass, tuple(sorted(int(i) for i in order[: k + 1]))))
    if not candidates:
        raise NoValidPrefix("every sweep prefix has mass above 1/2")
    return _result(chain, _pick(candidates), "sweep")


def singleton_fallback(chain: ReversibleChain) -> ConductanceResult:
    """Best cut among singletons and complements of singletons with mass <= 1/2.

    Used when :func:`sweep_conductance` finds no admissible prefix, which
    happens when one state carries more than half of the stationary mass.
    """
    n = chain.n
    if n < 2:
        raise TooSmall(n)
    pi = chain.weights
    candidates = []
    for i in range(n):
        for members in ((i,), tuple(j for j in range(n) if j != i)):
            S = StateSubset.of(members, pi)
            if S.mass <= 0.5 + MASS_SLACK:
                candidates.append((edge_flow(chain, S) / S.mass, S.members))
    if not candidates:
        raise NoValidPrefix("no singleton or co-singleton has mass <= 1/2")
    return _result(chain, _pick(candidates), "sweep")


def best_sweep(chain: ReversibleChain, orderings) -> ConductanceResult:
    """Best sweep cut over several orderings, falling back to singletons."""
    results = []
    for x in orderings:
        try:
            results.append(sweep_conductance(chain, x))
        except NoValidPrefix:
            continue
    if not results:
        return singleton_fallback(chain)
    winner = _pick([(r.phi, r.argmin.members) for r in results])
    return next(r for r in results if r.argmin.members == winner)
