import numpy as np
import pytest

from eigenbound import potentials as pot


@pytest.fixture(scope="session")
def bump_unit():
    """The reference bump: v0 = 1, support radius 1."""
    return pot.bump_potential(1.0, 1.0)


@pytest.fixture(scope="session")
def bump_unit_functionals(bump_unit):
    return pot.measure_functionals(bump_unit, 1.0)


@pytest.fixture(scope="session")
def mollified_exp():
    """Weak mollified exponential: amp 0.2, rate 1."""
    return pot.mollified_exponential_potential(0.2, 1.0)


@pytest.fixture(scope="session")
def mollified_exp_functionals(mollified_exp):
    return pot.measure_functionals(mollified_exp, 0.5)
