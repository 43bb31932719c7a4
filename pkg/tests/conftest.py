"""Shared fixtures: the bundled eight-agent scenario and one finished run."""

import pytest

from triform import bundled_scenario, integrate_hierarchy


@pytest.fixture(scope="session")
def eight():
    """(scenario, layer assignment) for the bundled eight-agent formation."""
    sc = bundled_scenario()
    return sc, sc.layer_assignment()


@pytest.fixture(scope="session")
def eight_run(eight):
    """One default-config hierarchy run of the bundled scenario."""
    sc, assignment = eight
    return integrate_hierarchy(sc.spec, assignment, sc.initial, sc.integrator_config())
