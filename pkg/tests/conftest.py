import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from gmalab import catalog

settings.register_profile(
    "gmalab",
    max_examples=40,
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("gmalab")


@pytest.fixture(scope="session")
def s3():
    return catalog.named_group("S3")


@pytest.fixture
def rng():
    import random

    return random.Random(12345)


def vec(*xs):
    return np.array(xs, dtype=np.int64)


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = next((m for name, m in list(sys.modules.items()) if name.endswith("test_acceptance")), None)
    out = mod.summary_lines() if mod is not None else []
    if out:
        terminalreporter.section("acceptance")
        for line in out:
            terminalreporter.write_line(line)
