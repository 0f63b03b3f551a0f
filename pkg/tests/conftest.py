import numpy as np
import pytest

from onlinecover.harness import gen_random

# criterion id -> (passed, detail); filled by the acceptance module
ACCEPTANCE_LINES: dict[str, tuple[bool, str]] = {}


def clp_family(seed: int):
    """Seeded pure-covering instance with n <= 12, m <= 20, k_max <= 4."""
    rng = np.random.default_rng([7, seed])
    n = int(rng.integers(2, 13))
    m = int(rng.integers(1, 21))
    k = int(rng.integers(1, 5))
    return gen_random(n, m, k, (0.1, 2.0), None, None, seed)


def box_family(seed: int):
    """Seeded box instance, u_i <= 3, small enough for the exact IP oracle."""
    rng = np.random.default_rng([11, seed])
    n = int(rng.integers(2, 9))
    m = int(rng.integers(1, 21))
    k = int(rng.integers(1, 5))
    return gen_random(n, m, k, (0.1, 2.0), 3, None, seed)


@pytest.fixture(scope="session")
def clp_instances():
    return [clp_family(s) for s in range(200)]


@pytest.fixture(scope="session")
def box_instances():
    return [box_family(s) for s in range(200)]


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[0])):
        ok, detail = ACCEPTANCE_LINES[key]
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  criterion {key}: {detail}")
