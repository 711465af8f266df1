import pytest

from wban_csma import base_scenario, solve_fixed_point


@pytest.fixture(scope="session")
def saturated_base():
    """16 nodes, 2 per priority, RTS/CTS, saturated, BER 2e-5."""
    return base_scenario()


@pytest.fixture(scope="session")
def saturated_solution(saturated_base):
    return solve_fixed_point(saturated_base)
