import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from chaincert.conductance import exact_conductance  # noqa: E402
from chaincert.generators import ChainSpec, build, corpus_specs  # noqa: E402
from chaincert.spectral import spectrum  # noqa: E402


@pytest.fixture(scope="session")
def fuzz_corpus():
    """1000 random reversible chains, n in [2, 10], seed 7, analyzed once."""
    out = []
    for spec in corpus_specs(1000, 2, 10, 7):
        chain = build(spec)
        out.append((spec, chain, spectrum(chain), exact_conductance(chain)))
    return out


@pytest.fixture(scope="session")
def small_corpus(fuzz_corpus):
    return [entry for entry in fuzz_corpus if entry[1].n <= 12][:200]


@pytest.fixture
def two_state():
    return build(ChainSpec("two_state", a=0.1, b=0.1))


@pytest.fixture
def lazy_k4():
    return build(ChainSpec("complete", n=4, alpha=0.5))


_CRITERIA_KEY = pytest.StashKey[dict]()


@pytest.fixture
def criterion(request):
    """Record one acceptance line: ``criterion(number, passed, detail)``."""
    lines = request.config.stash.setdefault(_CRITERIA_KEY, {})

    def record(number: int, passed: bool, detail: str) -> bool:
        line = f"[{'PASS' if passed else 'FAIL'}] criterion {number:2d}: {detail}"
        lines[number] = line
        print(line)
        return passed

    return record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = config.stash.get(_CRITERIA_KEY, {})
    if lines:
        terminalreporter.section("acceptance criteria")
        for number in sorted(lines):
            terminalreporter.write_line(lines[number])
