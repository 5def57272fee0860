import os

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from isoflow.curve import resample_arclength
from isoflow.curvegen import CurveSpec, Ellipse, generate

settings.register_profile(
    "default", deadline=None, max_examples=40,
    suppress_health_check=[HealthCheck.too_slow])
settings.register_profile("ci", deadline=None, max_examples=15)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

_ACCEPTANCE = []


def record_acceptance(number, ok, detail):
    _ACCEPTANCE.append((number, bool(ok), detail))


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number, ok, detail in sorted(_ACCEPTANCE, key=lambda x: x[0]):
        terminalreporter.write_line(f"criterion {number:2d}: {'PASS' if ok else 'FAIL'}  {detail}")


@pytest.fixture(scope="session")
def ellipse():
    return resample_arclength(generate(CurveSpec(Ellipse(2.0, 1.0), 256)))


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
