"""Spectral and conductance analysis of finite reversible Markov chains.

Matrices use the column convention: ``P[i, j] = Pr[next = i | current = j]``.
"""

from .bounds import (
    BoundCertificate,
    Claim1Diagnostic,
    ProperVector,
    certify,
    check_claim1,
    check_claim2,
    compare_bounds,
    make_proper_from_eigvec,
    telescoping_quantity,
)
from .chain import (
    ErgodicityReport,
    ReversibleChain,
    StationaryDistribution,
    TransitionMatrix,
    chain_from_matrix,
    check_detailed_balance,
    check_ergodicity,
    make_reversible_chain,
    pi_norm,
    stationary_distribution,
    validate_transition_matrix,
    weighted_inner_product,
)
from .conductance import (
    ConductanceResult,
    StateSubset,
    edge_flow,
    exact_conductance,
    singleton_fallback,
    sweep_conductance,
)
from .generators import ChainSpec, build, lazify
from .spectral import SpectrumReport, SymmetrizedOperator, eigendecompose, spectrum, symmetrize

__version__ = "0.1.0"
