"""Reversible chains with known structure, plus seeded random ones for fuzzing.

Random draws go through numpy's counter-based Philox generator keyed by
``SeedSequence(seed, spawn_key=(stream,))``, so chain ``k`` of a corpus can be
rebuilt on its own without generating the ones before it.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from typing import Sequence

import numpy as np

from .chain import (
    ReversibleChain,
    StationaryDistribution,
    TransitionMatrix,
    _frozen,
    check_ergodicity,
    make_reversible_chain,
)
from .errors import Disconnected, OutOfRange, Periodic

FAMILIES = ("two_state", "complete", "cycle", "path", "hypercube", "walk_on_graph", "metropolis", "random_reversible")

Edge = tuple[int, int, float]


@dataclass(frozen=True)
class ChainSpec:
    family: str
    n: int | None = None
    a: float | None = None
    b: float | None = None
    d: int | None = None
    edges: tuple[Edge, ...] | None = None
    target: tuple[float, ...] | None = None
    density: float = 0.5
    seed: int = 0
    stream: int = 0
    alpha: float = 0.0

    def describe(self) -> dict:
        out = {"family": self.family}
        for key in ("n", "a", "b", "d", "target"):
            if getattr(self, key) is not None:
                out[key] = getattr(self, key)
        if self.family == "random_reversible":
            out.update(density=self.density, seed=self.seed, stream=self.stream)
        if self.edges is not None:
            out["edges"] = [list(e) for e in self.edges]
        out["alpha"] = self.alpha
        return out


def rng_for(seed: int, stream: int = 0) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(seed, spawn_key=(stream,))))


def _connected(n: int, edges: Sequence[Edge]) -> bool:
    parent = list(range(n))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for u, v, _ in edges:
        parent[find(u)] = find(v)
    return len({find(i) for i in range(n)}) == 1


def _weight_matrix(n: int, edges: Sequence[Edge]) -> np.ndarray:
    W = np.zeros((n, n))
    for u, v, w in edges:
        if not (0 <= u < n and 0 <= v < n):
            raise ValueError(f"edge ({u}, {v}) out of range for n={n}")
        if not w > 0:
            raise ValueError(f"edge ({u}, {v}) has non-positive weight {w}")
        W[u, v] += w
        if u != v:
            W[v, u] += w
    return W


def graph_walk(n: int, edges: Sequence[Edge]) -> tuple[np.ndarray, np.ndarray]:
    """Random walk ``P_ij = w_ij / deg(j)`` and its stationary law ``deg / sum(deg)``."""
    if not _connected(n, edges):
        raise Disconnected("graph is not connected")
    W = _weight_matrix(n, edges)
    deg = W.sum(axis=0)
    return W / deg[None, :], deg / deg.sum()


def _metropolis(target: Sequence[float], edges: Sequence[Edge]) -> tuple[np.ndarray, np.ndarray]:
    pi = np.asarray(target, dtype=float)
    if np.any(pi <= 0):
        raise ValueError("target weights must be positive")
    pi = pi / pi.sum()
    n = pi.size
    if not _connected(n, edges):
        raise Disconnected("proposal graph is not connected")
    adj = _weight_matrix(n, edges) > 0
    np.fill_diagonal(adj, False)
    # uniform symmetric proposal: each neighbour with probability 1/(max degree + 1)
    q = 1.0 / (adj.sum(axis=0).max() + 1)
    P = np.zeros((n, n))
    for j in range(n):
        for i in np.flatnonzero(adj[:, j]):
            P[i, j] = q * min(1.0, pi[i] / pi[j])
    for j in range(n):
        P[j, j] = 1.0 - (P[:, j].sum() - P[j, j])
    return P, pi


def _random_reversible(n: int, density: float, rng: np.random.Generator) -> tuple[np.ndarray, np.ndarray]:
    pi = rng.exponential(size=n)
    pi = pi / pi.sum()
    if n == 1:
        return np.ones((1, 1)), pi
    # random spanning tree keeps the support connected; extra edges with prob. density
    perm = rng.permutation(n)
    support = np.zeros((n, n), dtype=bool)
    for k in range(1, n):
        u, v = perm[k], perm[rng.integers(k)]
        support[u, v] = support[v, u] = True
    extra = np.triu(rng.random((n, n)) < density, k=1)
    support |= extra | extra.T
    flows = np.triu(1.0 - rng.random((n, n)), k=1)  # uniform on (0, 1]
    F = np.where(support, flows + flows.T, 0.0)
    # one global scale keeps F symmetric; the remainder goes on the diagonal
    scale = rng.uniform(0.3, 0.99) * np.min(pi / F.sum(axis=0))
    P = F * scale / pi[None, :]
    np.fill_diagonal(P, 0.0)
    P[np.diag_indices(n)] = 1.0 - P.sum(axis=0)
    return P, pi


def _raw(spec: ChainSpec) -> tuple[np.ndarray, np.ndarray]:
    fam = spec.family
    if fam == "two_state":
        a, b = spec.a, spec.b
        if a is None or b is None or not (0 < a <= 1 and 0 < b <= 1):
            raise OutOfRange("two_state needs a, b in (0, 1]")
        return np.array([[1.0 - a, b], [a, 1.0 - b]]), np.array([b, a]) / (a + b)
    if fam == "random_reversible":
        n = _need_n(spec, 1)
        if not 0 < spec.density <= 1:
            raise OutOfRange("density must lie in (0, 1]")
        return _random_reversible(n, spec.density, rng_for(spec.seed, spec.stream))
    if fam == "metropolis":
        if spec.target is None:
            raise OutOfRange("metropolis needs a target distribution")
        n = len(spec.target)
        edges = spec.edges if spec.edges is not None else tuple((i, i + 1, 1.0) for i in range(n - 1))
        return _metropolis(spec.target, edges)
    if fam == "complete":
        n = _need_n(spec, 1)
        if n == 1:
            return np.ones((1, 1)), np.ones(1)
        edges = [(u, v, 1.0) for u, v in combinations(range(n), 2)]
    elif fam == "cycle":
        n = _need_n(spec, 3)
        edges = [(i, (i + 1) % n, 1.0) for i in range(n)]
    elif fam == "path":
        n = _need_n(spec, 2)
        edges = [(i, i + 1, 1.0) for i in range(n - 1)]
    elif fam == "hypercube":
        if spec.d is None or spec.d < 1:
            raise OutOfRange("hypercube needs d >= 1")
        n = 1 << spec.d
        edges = [(u, u ^ (1 << k), 1.0) for u in range(n) for k in range(spec.d) if u < u ^ (1 << k)]
    elif fam == "walk_on_graph":
        if not spec.edges:
            raise OutOfRange("walk_on_graph needs edges")
        n = spec.n if spec.n is not None else 1 + max(max(u, v) for u, v, _ in spec.edges)
        edges = list(spec.edges)
    else:
        raise OutOfRange(f"unknown family {fam!r}; choose from {', '.join(FAMILIES)}")
    return graph_walk(n, edges)


def _need_n(spec: ChainSpec, least: int) -> int:
    if spec.n is None or spec.n < least:
        raise OutOfRange(f"{spec.family} needs n >= {least}")
    return spec.n


def build(spec: ChainSpec) -> ReversibleChain:
    """Build the chain described by ``spec``, lazified by ``spec.alpha``.

    Raises:
        Disconnected: the underlying graph is not connected.
        Periodic: the chain is periodic and ``alpha`` is 0.
        OutOfRange: bad parameters.
    """
    if not 0 <= spec.alpha < 1:
        raise OutOfRange(f"alpha must lie in [0, 1), got {spec.alpha}")
    P, pi = _raw(spec)
    P = _lazy_matrix(P, spec.alpha)
    tm = TransitionMatrix(_frozen(P))
    ergo = check_ergodicity(tm)
    if not ergo.irreducible:
        raise Disconnected("chain is not irreducible")
    if not ergo.aperiodic:
        raise Periodic(ergo.period)
    return make_reversible_chain(tm, StationaryDistribution(_frozen(pi)))


def _lazy_matrix(P: np.ndarray, alpha: float) -> np.ndarray:
    if alpha == 0:
        return P
    Q = (1.0 - alpha) * P
    n = P.shape[0]
    np.fill_diagonal(Q, 0.0)
    # diagonal absorbs the remainder so columns stay exactly stochastic
    Q[np.diag_indices(n)] = 1.0 - Q.sum(axis=0)
    return Q


def lazify(chain: ReversibleChain, alpha: float) -> ReversibleChain:
    """``alpha I + (1 - alpha) P``; same stationary distribution."""
    if not 0 <= alpha < 1:
        raise OutOfRange(f"alpha must lie in [0, 1), got {alpha}")
    if alpha == 0:
        return chain
    tm = TransitionMatrix(_frozen(_lazy_matrix(np.array(chain.matrix), alpha)))
    return make_reversible_chain(tm, chain.pi)


def corpus_specs(count: int, n_min: int, n_max: int, seed: int) -> list[ChainSpec]:
    """Specs for a reproducible fuzz corpus of random reversible chains.

    Sizes and densities come from one stream keyed by ``seed``; chain ``k``
    uses its own stream ``k + 1``.
    """
    if count < 1:
        raise OutOfRange("count must be >= 1")
    if not 1 <= n_min <= n_max:
        raise OutOfRange(f"bad size range [{n_min}, {n_max}]")
    meta = rng_for(seed, 0)
    sizes = meta.integers(n_min, n_max + 1, size=count)
    densities = meta.uniform(0.1, 1.0, size=count)
    return [
        ChainSpec("random_reversible", n=int(n), density=float(dens), seed=seed, stream=k + 1)
        for k, (n, dens) in enumerate(zip(sizes, densities))
    ]


def random_proper_vector(pi, rng: np.random.Generator, shape: str = "uniform") -> np.ndarray:
    """A random nonnegative vector whose positive support has pi-mass <= 1/2.

    ``shape`` selects the values on the support: ``uniform``, ``indicator``,
    ``geometric`` (decaying powers) or ``spike`` (a single state).
    """
    pi = np.asarray(pi, dtype=float)
    n = pi.size
    order = rng.permutation(n)
    order = order[pi[order] <= 0.5]
    if order.size == 0:
        raise ValueError("every state has mass above 1/2")
    limit = 1 if shape == "spike" else int(rng.integers(1, order.size + 1))
    support, mass = [], 0.0
    for i in order[:limit]:
        if mass + pi[i] <= 0.5:
            support.append(int(i))
            mass += pi[i]
    f = np.zeros(n)
    if shape == "uniform":
        f[support] = rng.uniform(0.01, 1.0, size=len(support))
    elif shape == "indicator" or shape == "spike":
        f[support] = 1.0
    elif shape == "geometric":
        f[support] = rng.uniform(0.2, 0.9) ** np.arange(len(support))
    else:
        raise ValueError(f"unknown shape {shape!r}")
    return f * rng.uniform(0.1, 10.0)
