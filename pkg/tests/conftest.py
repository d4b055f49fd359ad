import pytest

from braggspec.lattice import BOHR, LatticeConfig, solve_lattice
from braggspec.sweep import SpectrumEngine

ACCEPTANCE_RESULTS = {}


@pytest.fixture(scope="session")
def engine():
    """Shared engine: lattice solutions and M = N = 7 eigendecompositions are cached per depth."""
    return SpectrumEngine(LatticeConfig(V0=0.0))


@pytest.fixture(scope="session")
def weak_engine():
    """Scattering length lowered to 10.97 a0 so that U/J ~ 0.1 at V0 = 0.1."""
    return SpectrumEngine(LatticeConfig(V0=0.0, a_s=10.97 * BOHR))


@pytest.fixture(scope="session")
def deep(engine):
    return engine.lattice(8.1)


@pytest.fixture(scope="session")
def shallow(engine):
    return engine.lattice(0.1)


@pytest.fixture(scope="session")
def solve():
    cache = {}

    def _solve(V0, **kw):
        key = (V0, tuple(sorted(kw.items())))
        if key not in cache:
            cache[key] = solve_lattice(LatticeConfig(V0=V0, **kw))
        return cache[key]

    return _solve


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE_RESULTS):
        ok, detail = ACCEPTANCE_RESULTS[key]
        terminalreporter.write_line(f"criterion {key:2d}: {'PASS' if ok else 'FAIL'}  {detail}")
