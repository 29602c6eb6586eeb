import numpy as np
import pytest
from recordlab import create_app
from recordlab import distributions
from recordlab.records import ConditioningContext
from recordlab.streams import make_stream


@pytest.fixture()
def app():
    """
    Create a new RecordLab app for each test run, with fixed settings
    so tests do not depend on the environment.
    """
    flask_app = create_app({
        'SEED': 42,
        'HOLD_TOLERANCE': 1e-6,
        'FAIL_FLOOR': 1e-3,
        'MC_SAMPLES': 20000,
        'OUTPUT_FORMAT': 'csv',
        'LOG_LEVEL': 'WARNING',
        'TESTING': True,
    })
    with flask_app.app_context():
        yield flask_app


@pytest.fixture()
def runner(app):
    """
    Create a CLI runner bound to the test app.
    """
    return app.test_cli_runner()


@pytest.fixture()
def rng():
    """
    A fixed-seed generator for statistical tests.
    """
    return make_stream(20240601, "tests")


@pytest.fixture()
def unit_exponential():
    """
    Exp(1) on (0, inf).
    """
    return distributions.shifted_exponential(1.0, 0.0)


@pytest.fixture()
def unit_uniform():
    """
    Uniform on (0, 1).
    """
    return distributions.uniform(0.0, 1.0)


@pytest.fixture()
def pareto_1_2():
    """
    Pareto with a = 1, c = 2.
    """
    return distributions.pareto(1.0, 2.0)


@pytest.fixture()
def bridge_context():
    """
    X(n-2) = 1, X(n+3) = 5 with n = 3.
    """
    return ConditioningContext(n=3, k=2, r=3, u=1.0, v=5.0)


@pytest.fixture()
def identity_fn():
    """
    g(t) = t, vectorized.
    """
    return lambda t: np.asarray(t, dtype=float)
