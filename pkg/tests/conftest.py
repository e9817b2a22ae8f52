import numpy as np
import pytest

from longwave.grid import Field, Grid1D, ModelCoefficients, SolitonSpec, TimeGrid


@pytest.fixture
def small_grid():
    return Grid1D(64, 0.25)


@pytest.fixture
def rng():
    return np.random.default_rng(20260809)


@pytest.fixture
def soliton_spec():
    return SolitonSpec(alpha=0.5, shift=-8.0, epsilon=0.2)


@pytest.fixture
def balanced_coeffs():
    return ModelCoefficients.balanced(0.2)


def random_field(grid: Grid1D, rng, scale: float = 1.0) -> Field:
    return Field(scale * rng.standard_normal(grid.num_points), grid)
