"""Command-line entry point.

Subcommands::

    chaincert analyze [PATH|-]    full JSON report
    chaincert verify  [PATH|-]    certificate slacks and PASS/FAIL only
    chaincert generate --family F chain JSON for a generated chain
    chaincert fuzz --count N      certify a seeded corpus of random chains

Exit codes: 0 success, 2 invalid input (parse error, not ergodic, not
reversible), 3 a rigorous certificate has a slack below its floor.
JSON goes to stdout, log lines to stderr.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from functools import partial
from pathlib import Path

from . import chain as core
from .analysis import SCHEMA_VERSION, Settings, analyze, chain_from_input, fuzz_one, report, verify_summary
from .conductance import MAX_EXACT_N
from .errors import ChainError, Disconnected, NotReversible, OutOfRange, Periodic, ValidationError
from .generators import FAMILIES, ChainSpec, build, corpus_specs
from .io import chain_to_json, parse_graph_tsv, parse_input
from .spectral import TOL_EIG

log = logging.getLogger("chaincert")

EXIT_OK = 0
EXIT_INVALID = 2
EXIT_VIOLATION = 3


def _emit(doc: dict) -> None:
    json.dump(doc, sys.stdout, indent=2, allow_nan=False)
    sys.stdout.write("\n")


def _read(path: str) -> tuple[str, str]:
    if path == "-":
        return sys.stdin.read(), "<stdin>"
    return Path(path).read_text(), path


def _settings(args) -> Settings:
    return Settings(
        tol_stochastic=args.tol_stochastic,
        tol_stationary=args.tol_stationary,
        tol_balance=args.tol_balance,
        tol_eig=args.tol_eig,
        max_exact_n=args.max_exact_n,
        sweep_only=args.sweep_only,
        full=getattr(args, "full", False),
    )


def _error_doc(exc: Exception) -> dict:
    doc = {"schema_version": SCHEMA_VERSION, "error": type(exc).__name__, "message": str(exc)}
    if isinstance(exc, NotReversible):
        doc["max_violation"] = exc.violation
        doc["pair"] = list(exc.pair)
    return doc


def _load(args):
    text, source = _read(args.input)
    loaded = parse_input(text)
    settings = _settings(args)
    return chain_from_input(loaded, settings), loaded, source, settings


def cmd_analyze(args) -> int:
    started = time.perf_counter()
    chain, loaded, source, settings = _load(args)
    result = analyze(chain, settings)
    doc = report(result, source=source, convention=loaded.convention, settings=settings)
    doc["timing"] = {"elapsed_s": time.perf_counter() - started}
    _emit(doc)
    return _exit_for(result, doc["status"])


def cmd_verify(args) -> int:
    chain, _, source, settings = _load(args)
    result = analyze(chain, settings)
    summary = verify_summary(result)
    doc = {"schema_version": SCHEMA_VERSION, "source": source, **summary}
    if result.certificate is not None:
        doc["eigen"] = [e.to_dict() for e in result.certificate.eigen]
    _emit(doc)
    return _exit_for(result, summary)


def _exit_for(result, summary: dict) -> int:
    log.info("%s (rigorous=%s)", summary["status"], summary["rigorous"])
    for v in summary["violations"]:
        log.warning("slack below floor: %s at lambda=%.12g", v["inequality"], v["lambda"])
    for u in summary["uncertifiable"]:
        log.warning("lambda=%.12g not certifiable: %s", u["lambda"], u["error"])
    return EXIT_VIOLATION if result.failed else EXIT_OK


def cmd_generate(args) -> int:
    edges = None
    if args.graph:
        edges = parse_graph_tsv(Path(args.graph).read_text()).edges
    target = tuple(float(x) for x in args.target.split(",")) if args.target else None
    spec = ChainSpec(
        family=args.family,
        n=args.n,
        a=args.a,
        b=args.b,
        d=args.d,
        edges=edges,
        target=target,
        density=args.density,
        seed=args.seed,
        stream=args.stream,
        alpha=args.alpha,
    )
    chain = build(spec)
    _emit(chain_to_json(chain, meta=spec.describe()))
    return EXIT_OK


_SLACK_KEYS = ("classical", "strengthened", "claim2", "claim1_lower", "claim1_upper")


def cmd_fuzz(args) -> int:
    specs = corpus_specs(args.count, args.n_min, args.n_max, args.seed)
    settings = _settings(args)
    work = partial(fuzz_one, settings=settings)
    if args.workers > 1:
        with ProcessPoolExecutor(max_workers=args.workers) as pool:
            results = list(pool.map(work, specs, chunksize=16))
    else:
        results = [work(s) for s in specs]

    worst: dict[str, dict | None] = {k: None for k in _SLACK_KEYS}
    mins: dict[str, float | None] = {k: None for k in _SLACK_KEYS}
    for idx, r in enumerate(results):
        for key, value in (r["min_slacks"] or {}).items():
            if value is not None and (mins[key] is None or value < mins[key]):
                mins[key] = value
                worst[key] = {"index": idx, "value": value, "spec": r["spec"], "chain": r["chain"]}

    failures = [i for i, r in enumerate(results) if r["status"] == "FAIL"]
    uncertifiable = sum(len(r["uncertifiable"]) for r in results)
    doc = {
        "schema_version": SCHEMA_VERSION,
        "seed": args.seed,
        "n_range": [args.n_min, args.n_max],
        "chains_tested": len(results),
        "eigenvalues_certified": sum(r["eigenvalues_certified"] for r in results),
        "vacuous_chains": sum(1 for r in results if r["vacuous"]),
        "status": "FAIL" if failures else "PASS",
        "failures": failures,
        "uncertifiable": uncertifiable,
        "min_slacks": mins,
        "witnesses": worst,
    }
    if args.emit_witnesses:
        out = Path(args.emit_witnesses)
        out.mkdir(parents=True, exist_ok=True)
        for key, w in worst.items():
            if w is not None:
                path = out / f"worst_{key}.json"
                path.write_text(json.dumps(w["chain"] | {"meta": w["spec"]}, indent=2) + "\n")
                log.info("wrote %s", path)
    _emit(doc)
    log.info("%d chains, status %s", len(results), doc["status"])
    return EXIT_VIOLATION if failures else EXIT_OK


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--tol-stochastic", type=float, default=core.TOL_STOCHASTIC)
    p.add_argument("--tol-stationary", type=float, default=core.TOL_STATIONARY)
    p.add_argument("--tol-balance", type=float, default=core.TOL_BALANCE)
    p.add_argument("--tol-eig", type=float, default=TOL_EIG)
    p.add_argument("--max-exact-n", type=int, default=MAX_EXACT_N)
    p.add_argument("--sweep-only", action="store_true", help="bound conductance by eigenvector sweep cuts")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="chaincert", description=__doc__.split("\n\n")[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", help="full analysis report")
    p.add_argument("input", nargs="?", default="-", help="chain JSON or weighted-graph TSV (default: stdin)")
    p.add_argument("--full", action="store_true", help="include eigenvectors")
    _common(p)
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("verify", help="certificate slacks only")
    p.add_argument("input", nargs="?", default="-")
    _common(p)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("generate", help="emit a generated chain as JSON")
    p.add_argument("--family", required=True, choices=FAMILIES)
    p.add_argument("--n", type=int)
    p.add_argument("--a", type=float)
    p.add_argument("--b", type=float)
    p.add_argument("--d", type=int, help="hypercube dimension")
    p.add_argument("--graph", help="TSV edge list for walk_on_graph or the metropolis proposal")
    p.add_argument("--target", help="comma-separated target weights for metropolis")
    p.add_argument("--density", type=float, default=0.5)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--stream", type=int, default=0)
    p.add_argument("--alpha", type=float, default=0.0, help="laziness")
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("fuzz", help="certify a seeded corpus of random reversible chains")
    p.add_argument("--count", type=int, default=1000)
    p.add_argument("--n-min", type=int, default=2)
    p.add_argument("--n-max", type=int, default=10)
    p.add_argument("--seed", type=int, default=7)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--emit-witnesses", metavar="DIR")
    _common(p)
    p.set_defaults(func=cmd_fuzz)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)
    if args.command == "fuzz" and (args.count < 1 or args.n_min < 1 or args.n_min > args.n_max):
        parser.error("need --count >= 1 and 1 <= --n-min <= --n-max")
    try:
        return args.func(args)
    except (ValidationError, Disconnected, Periodic, OutOfRange, OSError) as exc:
        log.error("%s: %s", type(exc).__name__, exc)
        _emit(_error_doc(exc))
        return EXIT_INVALID
    except ChainError as exc:
        log.error("%s: %s", type(exc).__name__, exc)
        _emit(_error_doc(exc))
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
