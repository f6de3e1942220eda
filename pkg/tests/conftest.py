import pytest

from eitkerr.presets import config_from_couplings, slow_light_config


@pytest.fixture(scope="session")
def slow():
    return slow_light_config()


@pytest.fixture(scope="session")
def small():
    """nbar = 1e3 in both modes, Omega1/Omega2 = 1/2, slight detuning."""
    return config_from_couplings(g1=1.0, g2=2.0, nbar_probe=1e3, nbar_coupling=1e3, detuning=1e-3)


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "RESULTS", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
