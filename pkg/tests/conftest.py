import numpy as np
import pytest

from weightedpick import AlgebraSpec, DomainKind, DomainSpec, InterpolationInstance, SpaceKind, SpaceSpec
from weightedpick.instance import validate_instance


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def make_instance(nodes, targets, kind="polydisk", space="hardy", dim=None, algebra=None, domain=None):
    nodes = np.asarray(nodes, dtype=complex)
    if nodes.ndim == 1:
        nodes = nodes[:, None]
    if domain is None:
        domain = DomainSpec(DomainKind(kind), dim or nodes.shape[1])
    inst = InterpolationInstance(domain, SpaceSpec(SpaceKind(space)), algebra or AlgebraSpec("full"), nodes, targets)
    return validate_instance(inst)


def random_points(rng, n, dim, radius=0.6):
    """Points with every coordinate of modulus below `radius`."""
    r = radius * np.sqrt(rng.uniform(0, 1, (n, dim)))
    return r * np.exp(2j * np.pi * rng.uniform(0, 1, (n, dim)))


ACCEPTANCE_LINES: dict[int, str] = {}


def record_criterion(number: int, ok: bool, detail: str) -> None:
    line = f"criterion {number}: {'PASS' if ok else 'FAIL'} - {detail}"
    ACCEPTANCE_LINES[number] = line
    print(line)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for n in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(ACCEPTANCE_LINES[n])
