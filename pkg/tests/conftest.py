import numpy as np
import pytest

from adstab import qcore

_ACCEPTANCE = {}


def pytest_runtest_logreport(report):
    if "test_acceptance.py" not in report.nodeid:
        return
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        name = report.nodeid.split("::")[-1]
        if hasattr(report, "wasxfail"):
            status = "FAIL (expected; see decisions ledger)"
        else:
            status = "PASS" if report.outcome == "passed" else "FAIL"
        _ACCEPTANCE[name] = status


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for name in sorted(_ACCEPTANCE):
        terminalreporter.write_line(f"{name}: {_ACCEPTANCE[name]}")


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def random_density(rng, n, rank=None):
    d = 2**n
    rank = d if rank is None else rank
    g = rng.standard_normal((d, rank)) + 1j * rng.standard_normal((d, rank))
    m = g @ g.conj().T
    return qcore.DensityOperator(m / np.trace(m).real)
