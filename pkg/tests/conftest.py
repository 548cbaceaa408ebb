"""Shared Monte Carlo runs. Each is computed once per session."""
import pytest

from hyperdiam.montecarlo import ExperimentConfig, run_experiment
from hyperdiam.parametrization import GRAPH, HYPERGRAPH

MASTER_SEED = 20240601


@pytest.fixture(scope="session")
def graph_grid():
    cfg = ExperimentConfig(mode=GRAPH, t=2, d=2, c=1.0, n_grid=[250, 500, 1000, 2000],
                           trials=2000, master_seed=MASTER_SEED)
    return run_experiment(cfg)


@pytest.fixture(scope="session")
def hypergraph_run():
    cfg = ExperimentConfig(mode=HYPERGRAPH, t=3, d=2, c=1.0, n_grid=[300],
                           trials=2000, master_seed=MASTER_SEED)
    return run_experiment(cfg)


ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def report():
    """Record one PASS/FAIL line per acceptance criterion, then assert it."""
    def _report(label: str, passed: bool, detail: str):
        line = f"[{'PASS' if passed else 'FAIL'}] {label}: {detail}"
        ACCEPTANCE_LINES.append(line)
        print(line)
        assert passed, line
    return _report


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
