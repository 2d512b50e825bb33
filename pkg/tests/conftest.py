import numpy as np
import pytest
from hypothesis import strategies as st

from extweak.qstate import CompositeState, PathBasis

ATOL = 1e-12


def random_state(rng, norm=None, basis=PathBasis.A_BASIS) -> CompositeState:
    v = rng.normal(size=4) + 1j * rng.normal(size=4)
    v /= np.linalg.norm(v)
    scale = rng.uniform(0.05, 1.0) if norm is None else norm
    return CompositeState(v * scale, basis)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


phis = st.floats(min_value=1.0, max_value=89.0)
thetas = st.floats(min_value=0.0, max_value=22.0)


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
