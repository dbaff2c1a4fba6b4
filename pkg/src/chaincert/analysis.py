"""The end-to-end pipeline shared by the CLI subcommands."""

from __future__ import annotations

import math
from dataclasses import dataclass

from . import chain as core
from .bounds import BoundCertificate, certify, compare_bounds
from .chain import ReversibleChain
from .conductance import MAX_EXACT_N, ConductanceResult, best_sweep, exact_conductance
from .generators import ChainSpec, build, graph_walk
from .io import LoadedInput, chain_to_json
from .spectral import TOL_EIG, SpectrumReport, spectral_gap, spectrum

SCHEMA_VERSION = "1"
MIXING_EPSILON = 0.25


@dataclass(frozen=True)
class Settings:
    tol_stochastic: float = core.TOL_STOCHASTIC
    tol_stationary: float = core.TOL_STATIONARY
    tol_balance: float = core.TOL_BALANCE
    tol_eig: float = TOL_EIG
    max_exact_n: int = MAX_EXACT_N
    sweep_only: bool = False
    full: bool = False


@dataclass(frozen=True)
class Analysis:
    chain: ReversibleChain
    spectrum: SpectrumReport
    conductance: ConductanceResult | None
    certificate: BoundCertificate | None

    @property
    def failed(self) -> bool:
        """A rigorous certificate with a slack below its floor."""
        c = self.certificate
        return c is not None and c.rigorous and bool(c.violations())


def chain_from_input(loaded: LoadedInput, settings: Settings = Settings()) -> ReversibleChain:
    if loaded.kind == "graph":
        P, pi = graph_walk(loaded.n, loaded.edges)
        tm = core.validate_transition_matrix(P, settings.tol_stochastic)
        return core.make_reversible_chain(tm, core.StationaryDistribution(core._frozen(pi)),
                                          tol_stationary=settings.tol_stationary, tol_balance=settings.tol_balance)
    tm = core.validate_transition_matrix(loaded.matrix, settings.tol_stochastic)
    return core.make_reversible_chain(tm, tol_stationary=settings.tol_stationary, tol_balance=settings.tol_balance)


def analyze(chain: ReversibleChain, settings: Settings = Settings()) -> Analysis:
    spec = spectrum(chain)
    if chain.n < 2:
        return Analysis(chain, spec, None, None)
    if settings.sweep_only:
        phi = best_sweep(chain, [spec.eigvec(k) for k in range(1, chain.n)])
    else:
        phi = exact_conductance(chain, settings.max_exact_n)
    return Analysis(chain, spec, phi, certify(chain, spec, phi, settings.tol_eig))


def mixing_time_estimate(chain: ReversibleChain, spec: SpectrumReport) -> float:
    gap = spectral_gap(spec)
    return math.log(1.0 / (MIXING_EPSILON * float(chain.weights.min()))) / gap


def report(result: Analysis, *, source: str, convention: str, settings: Settings = Settings()) -> dict:
    chain = result.chain
    cert = result.certificate
    ergo = chain.ergodicity
    out = {
        "schema_version": SCHEMA_VERSION,
        "chain": {"n": chain.n, "source": source, "convention": convention,
                  "transposed_on_load": convention == "row"},
        "ergodicity": {"irreducible": ergo.irreducible, "aperiodic": ergo.aperiodic, "period": ergo.period},
        "detailed_balance": {"max_violation": chain.max_detailed_balance_violation},
        "stationary": [float(x) for x in chain.weights],
        "spectrum": result.spectrum.to_dict(full=settings.full),
    }
    if result.conductance is None:
        out["conductance"] = f"undefined (n={chain.n})"
        out["certificate"] = None
        out["bounds"] = None
    else:
        out["conductance"] = result.conductance.to_dict()
        out["certificate"] = cert.to_dict()
        b = compare_bounds(min(result.conductance.phi, 1.0))
        out["bounds"] = {"classical": b.classical, "strengthened": b.strengthened}
    out["mixing_time"] = {
        "t_est": mixing_time_estimate(chain, result.spectrum),
        "epsilon": MIXING_EPSILON,
        "heuristic": True,
    }
    out["status"] = verify_summary(result)
    return out


def verify_summary(result: Analysis) -> dict:
    cert = result.certificate
    if cert is None:
        return {"status": "PASS", "rigorous": True, "vacuous": True, "phi": None, "min_slacks": None,
                "violations": [], "uncertifiable": []}
    violations = [{"lambda": lam, "inequality": what} for lam, what in cert.violations()]
    if result.failed:
        status = "FAIL"
    elif violations:
        status = "INCONCLUSIVE"
    else:
        status = "PASS"
    return {
        "status": status,
        "rigorous": cert.rigorous,
        "vacuous": cert.vacuous,
        "phi": cert.phi,
        "min_slacks": cert.min_slacks(),
        "violations": violations,
        "uncertifiable": [{"lambda": e.lam, "error": e.error} for e in cert.uncertifiable],
    }


def fuzz_one(spec: ChainSpec, settings: Settings = Settings()) -> dict:
    """Certify one generated chain; returns a picklable summary."""
    chain = build(spec)
    result = analyze(chain, settings)
    summary = verify_summary(result)
    summary["spec"] = spec.describe()
    summary["chain"] = chain_to_json(chain)
    summary["eigenvalues_certified"] = len(result.certificate.eigen) if result.certificate else 0
    return summary
