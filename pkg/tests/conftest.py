import pytest
from hypothesis import settings

from frontlab.model import ModelParams
from frontlab.simulator import Grid1D
from frontlab.speed import RunConfig
from frontlab.twprofile import converged_profile

settings.register_profile("default", deadline=None, max_examples=40)
settings.load_profile("default")

# small domain for unit tests; acceptance tests use the full desk grid
SMALL = RunConfig(grid=Grid1D(-60.0, 60.0, 481), t_end=60.0, sample_every=25, boundary_margin=10.0)


@pytest.fixture(scope="session")
def small_cfg():
    return SMALL


@pytest.fixture(scope="session")
def profile_23():
    """Converged (a=2, b=3) wave on the desk grid."""
    return converged_profile(ModelParams(2.0, 3.0))


@pytest.fixture(scope="session")
def profile_22():
    return converged_profile(ModelParams(2.0, 2.0))


@pytest.fixture(scope="session")
def supersolution_search():
    """First passing candidate for b=2, r=d=1, delta*=0.05, delta_0=0.01."""
    from frontlab.verify import search_supersolution

    return search_supersolution()
