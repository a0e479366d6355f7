import os

import pytest
from hypothesis import HealthCheck, settings

settings.register_profile("default", max_examples=60, deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.register_profile("thorough", max_examples=400, deadline=None)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))


@pytest.fixture(scope="session")
def construction():
    from painleve_atlas.blowup_ledger import run_construction

    return run_construction()


@pytest.fixture(scope="session")
def default_run():
    from painleve_atlas.integrator import IntegratorConfig, integrate

    return integrate(0.0, 10.0, 0.0, 0.0, IntegratorConfig())


@pytest.fixture(scope="session")
def reference_run():
    from painleve_atlas.integrator import integrate, reference_config

    return integrate(0.0, 10.0, 0.0, 0.0, reference_config())
