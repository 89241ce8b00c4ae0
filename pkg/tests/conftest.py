import random

import pytest
from hypothesis import HealthCheck, settings

settings.register_profile(
    "branchlab",
    derandomize=True,
    deadline=None,
    max_examples=60,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("branchlab")

SEED = 20240601


@pytest.fixture
def rng():
    return random.Random(SEED)


# -- acceptance bookkeeping ----------------------------------------------------------

import time
from contextlib import contextmanager

_ACCEPTANCE = pytest.StashKey[dict]()


@pytest.fixture
def criterion(request):
    """``with criterion(n, title, limit): ...`` times the block and records PASS or FAIL."""
    results = request.config.stash.setdefault(_ACCEPTANCE, {})

    @contextmanager
    def run(number: int, title: str, limit: float):
        start = time.perf_counter()
        ok = False
        try:
            yield
            ok = True
        finally:
            elapsed = time.perf_counter() - start
            in_time = elapsed < limit
            status = "PASS" if ok and in_time else "FAIL"
            note = "" if in_time else " (over time limit)"
            line = f"{status} criterion {number}: {title} [{elapsed:.2f} s / limit {limit:g} s]{note}"
            results[number] = line
            print(line)
        assert in_time, f"criterion {number} took {elapsed:.1f} s, limit {limit} s"

    return run


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    results = config.stash.get(_ACCEPTANCE, {})
    if results:
        terminalreporter.section("acceptance criteria")
        for n in sorted(results):
            terminalreporter.write_line(results[n])
