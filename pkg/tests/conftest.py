import numpy as np
import pytest

from ginzburg import build_params


@pytest.fixture(scope="session")
def paper_params():
    """Canonical Fig. 2 configuration: paper units, N=2001, w = 0.01 L."""
    return build_params({"units": {"preset": "paper"},
                         "chain": {"N": 2001},
                         "detector": {"w": 0.01}})


@pytest.fixture(scope="session")
def small_params():
    """Cheap chain for exhaustive property sweeps."""
    return build_params({"units": {"preset": "paper"},
                         "chain": {"N": 101},
                         "detector": {"w": 0.05}})


@pytest.fixture
def rng():
    return np.random.default_rng(20260814)


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    """One pass/fail line per acceptance criterion at the end of the run."""
    rows = []
    for outcome in ("passed", "failed", "error"):
        for rep in terminalreporter.stats.get(outcome, []):
            nodeid = getattr(rep, "nodeid", "")
            if "test_acceptance.py::test_criterion_" not in nodeid:
                continue
            name = nodeid.split("::")[-1].replace("test_criterion_", "")
            num, _, label = name.partition("_")
            rows.append((int(num), label.replace("_", " "),
                         "PASS" if outcome == "passed" else "FAIL"))
    if rows:
        terminalreporter.section("acceptance criteria")
        for num, label, verdict in sorted(rows):
            terminalreporter.write_line(f"criterion {num:2d} ({label}): {verdict}")
