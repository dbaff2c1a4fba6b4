"""Real spectrum of a reversible chain through its symmetrized operator.

Detailed balance makes ``A = D^{-1/2} P D^{1/2}`` (``D = diag(pi)``) symmetric.
``A`` is similar to ``P``, so its eigenvalues are the eigenvalues of ``P``.
An eigenvector ``v`` of ``A`` becomes an eigenvector ``g = v / sqrt(pi)`` of
``P.T``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .chain import ReversibleChain, StationaryDistribution, _frozen
from .errors import NoConvergence

TOL_EIG = 1e-8
POSITIVE_MARGIN = 1e-9


@dataclass(frozen=True)
class SymmetrizedOperator:
    A: np.ndarray


@dataclass(frozen=True)
class SpectrumReport:
    """Eigenvalues sorted descending; column ``k`` of ``eigvecs_PT`` goes with ``eigenvalues[k]``."""

    eigenvalues: np.ndarray
    eigvecs_PT: np.ndarray
    sweeps: int = 0

    @property
    def positive_indices(self) -> tuple[int, ...]:
        """Indices of eigenvalues strictly inside (0, 1), away from both ends by 1e-9."""
        mu = self.eigenvalues
        return tuple(int(k) for k in np.flatnonzero((mu > POSITIVE_MARGIN) & (mu < 1.0 - POSITIVE_MARGIN)))

    @property
    def positive_nontrivial(self) -> np.ndarray:
        return self.eigenvalues[list(self.positive_indices)]

    def eigvec(self, k: int) -> np.ndarray:
        return self.eigvecs_PT[:, k]

    def to_dict(self, full: bool = False) -> dict:
        out = {
            "eigenvalues": [float(x) for x in self.eigenvalues],
            "positive_nontrivial": [float(x) for x in self.positive_nontrivial],
        }
        if full:
            out["eigenvectors"] = [[float(x) for x in self.eigvecs_PT[:, k]] for k in range(self.eigvecs_PT.shape[1])]
        return out


def symmetrize(chain: ReversibleChain) -> SymmetrizedOperator:
    P, pi = chain.matrix, chain.weights
    root = np.sqrt(pi)
    A = P * root[None, :] / root[:, None]
    return SymmetrizedOperator(_frozen((A + A.T) / 2.0))


def _off_norm(A: np.ndarray) -> float:
    return float(np.linalg.norm(A - np.diag(np.diag(A))))


def jacobi_eigh(A, tol: float = 1e-12, max_sweeps: int = 100) -> tuple[np.ndarray, np.ndarray, int]:
    """Cyclic Jacobi eigensolver for a real symmetric matrix.

    Sweeps over all pairs ``p < q`` row by row, zeroing ``A[p, q]`` with a
    plane rotation each time, until the off-diagonal Frobenius mass drops
    below ``tol * ||A||_F``.

    Returns:
        (eigenvalues, eigenvectors, sweeps) with eigenvectors as columns, in
        the order the diagonal ends up in (unsorted).

    Raises:
        NoConvergence: after ``max_sweeps`` sweeps.
    """
    A = np.array(A, dtype=float)
    n = A.shape[0]
    V = np.eye(n)
    target = tol * float(np.linalg.norm(A))
    sweeps = 0
    while True:
        off = _off_norm(A)
        if off <= target:
            break
        if sweeps >= max_sweeps:
            raise NoConvergence(max_sweeps, off)
        sweeps += 1
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = A[p, q]
                if apq == 0.0:
                    continue
                diff = float(A[q, q] - A[p, p])
                if abs(apq) < 1e-30 * abs(diff):
                    # theta would overflow; t ~ 1/(2 theta)
                    t = apq / diff
                else:
                    theta = diff / (2.0 * apq)
                    t = (1.0 if theta >= 0 else -1.0) / (abs(theta) + math.hypot(theta, 1.0))
                c = 1.0 / math.sqrt(t * t + 1.0)
                s = t * c
                col_p, col_q = A[:, p].copy(), A[:, q].copy()
                A[:, p] = c * col_p - s * col_q
                A[:, q] = s * col_p + c * col_q
                row_p, row_q = A[p, :].copy(), A[q, :].copy()
                A[p, :] = c * row_p - s * row_q
                A[q, :] = s * row_p + c * row_q
                A[p, q] = A[q, p] = 0.0
                vp, vq = V[:, p].copy(), V[:, q].copy()
                V[:, p] = c * vp - s * vq
                V[:, q] = s * vp + c * vq
    return np.diag(A).copy(), V, sweeps


def eigendecompose(A: SymmetrizedOperator, pi: StationaryDistribution, max_sweeps: int = 100) -> SpectrumReport:
    values, V, sweeps = jacobi_eigh(A.A, max_sweeps=max_sweeps)
    order = np.argsort(-values, kind="stable")
    values = values[order]
    G = V[:, order] / np.sqrt(pi.pi)[:, None]
    for k in range(G.shape[1]):
        if G[int(np.argmax(np.abs(G[:, k]))), k] < 0:
            G[:, k] = -G[:, k]
    return SpectrumReport(eigenvalues=_frozen(values), eigvecs_PT=_frozen(G), sweeps=sweeps)


def spectrum(chain: ReversibleChain, max_sweeps: int = 100) -> SpectrumReport:
    return eigendecompose(symmetrize(chain), chain.pi, max_sweeps=max_sweeps)


def eigen_residual(chain: ReversibleChain, lam: float, g) -> float:
    """``||P.T g - lam g||_inf / ||g||_inf``."""
    g = np.asarray(g, dtype=float)
    scale = float(np.max(np.abs(g))) or 1.0
    return float(np.max(np.abs(chain.matrix.T @ g - lam * g))) / scale


def spectral_gap(spec: SpectrumReport) -> float:
    """``1 - max |mu_k|`` over the nontrivial eigenvalues (1.0 when n = 1)."""
    rest = np.abs(spec.eigenvalues[1:])
    return 1.0 - (float(rest.max()) if rest.size else 0.0)
