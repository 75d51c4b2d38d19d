import math

import pytest
from hypothesis import HealthCheck, settings

settings.register_profile("default", deadline=None, max_examples=40,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

# filled by test_acceptance; printed at the end of the session
ACCEPTANCE = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        terminalreporter.write_line(ACCEPTANCE[n])


def trial_division_primes(limit: int) -> list:
    out = []
    for n in range(2, limit + 1):
        r = math.isqrt(n)
        if all(n % p for p in out if p <= r):
            out.append(n)
    return out


@pytest.fixture(scope="session")
def small_primes():
    return trial_division_primes(20000)
