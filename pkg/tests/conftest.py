import math

import numpy as np
import pytest

from conecert.generators import generate_quarter_annulus, generate_random_instance
from conecert.instance import VPInstance


def inst(points, p=2, q=1, r=1, **kw):
    """Shorthand for VPInstance.build."""
    return VPInstance.build(points, p, q, r, **kw)


@pytest.fixture(scope="session")
def example21():
    return generate_quarter_annulus()


@pytest.fixture(scope="session")
def diagonal_label():
    # arc point at angle pi/4
    c = math.cos(math.pi / 4)
    return f"{c:.6g},{c:.6g}"


@pytest.fixture
def tiny():
    """p = q = r = 1, f(a) = {0}, f(b) = {1}, g = h = {0}."""
    return inst({"a": ([[0]], [[0]], [[0]]), "b": ([[1]], [[0]], [[0]])}, p=1)


@pytest.fixture(scope="session")
def chain4():
    return generate_random_instance(1, n_labels=4, family="chain")


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


ACCEPTANCE_KEY = pytest.StashKey[list]()


@pytest.fixture
def announce(capsys, request):
    """Print and record one PASS/FAIL line for an acceptance criterion."""
    lines = request.config.stash.setdefault(ACCEPTANCE_KEY, [])

    def _announce(number, title, ok, detail):
        line = f"{'PASS' if ok else 'FAIL'} criterion {number}: {title} ({detail})"
        lines.append(line)
        with capsys.disabled():
            print(f"\n{line}")
        return ok

    return _announce


def pytest_terminal_summary(terminalreporter, config):
    lines = config.stash.get(ACCEPTANCE_KEY, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
