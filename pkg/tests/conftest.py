import os
import sys

import pytest
from hypothesis import HealthCheck, settings

from foliage.models import build_model

settings.register_profile(
    "repo",
    deadline=None,
    derandomize=True,
    suppress_health_check=[HealthCheck.too_slow, HealthCheck.data_too_large],
)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "repo"))


@pytest.fixture(scope="session")
def models():
    return {name: build_model(name) for name in ("carriere", "product_j1", "product_j2", "taut_torus")}


def pytest_terminal_summary(terminalreporter):
    module = sys.modules.get("test_acceptance")
    RESULTS = getattr(module, "RESULTS", None)
    if not RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(RESULTS, key=lambda k: (int("".join(ch for ch in k if ch.isdigit())), k)):
        terminalreporter.write_line(RESULTS[key])
