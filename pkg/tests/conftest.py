import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from priorsearch import Population, validate_population

settings.register_profile(
    "deterministic",
    settings(
        derandomize=True,
        max_examples=60,
        deadline=None,
        suppress_health_check=[HealthCheck.too_slow],
    ),
)
settings.load_profile("deterministic")


def random_population(
    rng: np.random.Generator,
    n: int,
    s_lo: float = 0.3,
    s_hi: float = 1.0,
    perfect: bool = False,
) -> Population:
    p = rng.dirichlet(np.ones(n))
    s = None if perfect else rng.uniform(s_lo, s_hi, size=n)
    return validate_population(p, s)


def random_simplex(rng: np.random.Generator, n: int, floor: float = 1e-3) -> np.ndarray:
    q = rng.dirichlet(np.ones(n)) + floor
    return q / q.sum()


@pytest.fixture
def rng():
    return np.random.default_rng(20260810)
