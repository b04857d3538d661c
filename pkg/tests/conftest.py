import numpy as np
import pytest

from bipot.grids import Grid, SampledFunction


@pytest.fixture(scope="session")
def line_grid():
    return Grid.line(-2.0, 2.0, 201)


@pytest.fixture(scope="session")
def fine_grid():
    return Grid.line(-2.0, 2.0, 401)


@pytest.fixture(scope="session")
def box_grid():
    return Grid.box(-2.0, 2.0, 21)


def quad(grid, k=1.0):
    return SampledFunction.from_callable(grid, lambda x: 0.5 * k * x * x)


def absval(grid):
    return SampledFunction.from_callable(grid, np.abs)


def indicator_interval(grid, r=1.0):
    return SampledFunction.from_callable(
        grid, lambda x: np.where(np.abs(x) <= r, 0.0, np.inf))


def relu_sq(grid):
    return SampledFunction.from_callable(grid, lambda x: np.maximum(x, 0.0) ** 2)


@pytest.fixture(scope="session")
def convex_corpus(line_grid):
    """The documented 1-D corpus: x^2/2, |x|, chi_[-1,1], max(0,x)^2."""
    return {
        "quad": quad(line_grid),
        "abs": absval(line_grid),
        "indicator": indicator_interval(line_grid),
        "relu_sq": relu_sq(line_grid),
    }
