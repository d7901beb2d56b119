import warnings

import pytest
from hypothesis import HealthCheck, settings

settings.register_profile("qhdlab", deadline=None, max_examples=25,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("qhdlab")


@pytest.fixture(autouse=True)
def _quiet_support_warnings():
    from qhdlab.errors import BoundarySupportWarning

    with warnings.catch_warnings():
        warnings.simplefilter("ignore", BoundarySupportWarning)
        yield
