import numpy as np
import pytest

from ris_mumimo.channel import ChannelRealization, complex_gaussian
from ris_mumimo.seeding import make_rng

# lines printed by the acceptance module, echoed in the terminal summary
ACCEPTANCE_LINES = []


def random_instance(seed, n_elements, n_users):
    """Unit-variance Rayleigh (f, G, d)."""
    rng = make_rng(seed)
    return (
        complex_gaussian(rng, n_elements),
        complex_gaussian(rng, (n_elements, n_users)),
        complex_gaussian(rng, n_users),
    )


def random_realization(seed, n_elements=8, n_users=2):
    f, g, d = random_instance(seed, n_elements, n_users)
    return ChannelRealization(f=f, g_matrix=g, d=d)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
