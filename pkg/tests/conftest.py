import pytest

from symres.spaces import build_product, parse_space
from symres.verifier import KernelContext


def product(a: str, b: str):
    return build_product(parse_space(a), parse_space(b))


@pytest.fixture(scope="session")
def su2_sq():
    return KernelContext(product("SU(2,1)", "SU(2,1)"))


@pytest.fixture(scope="session")
def su_sp():
    return KernelContext(product("SU(2,1)", "Sp(2,1)"))


@pytest.fixture(scope="session")
def so4_sp():
    return KernelContext(product("SO(4,1)", "Sp(2,1)"))


@pytest.fixture(scope="session")
def su_so3():
    return KernelContext(product("SU(2,1)", "SO(3,1)"))


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
