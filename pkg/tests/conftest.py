import math

import pytest
from hypothesis import HealthCheck, settings

from kratzer_spectra.model import CouplingParams, ExtensionParam

settings.register_profile("repo", max_examples=30, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("repo")


def rel(a, b):
    return abs(a - b) / max(abs(b), 1e-300)


# one representative Hamiltonian per range, g1 < 0 so every range has levels
CASES = {
    "R1": (CouplingParams(-1.0, 0.75, 1.0), ExtensionParam("R1")),
    "R2": (CouplingParams(-1.0, 0.1, 1.3), ExtensionParam("R2", 0.3)),
    "R3": (CouplingParams(-1.0, -0.25, 1.3), ExtensionParam("R3", 0.4)),
    "R4": (CouplingParams(-1.0, -1.25, 1.0), ExtensionParam("R4", 1.0)),
    "R5": (CouplingParams(-1.0, 0.0, 1.3), ExtensionParam("R5", 0.4)),
}


@pytest.fixture(params=sorted(CASES))
def case(request):
    return CASES[request.param]


# acceptance verdicts, echoed in the terminal summary
ACCEPTANCE = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE, key=lambda s: int(s.split()[0].lstrip("#"))):
            terminalreporter.write_line(line)
