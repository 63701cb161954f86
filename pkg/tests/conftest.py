import numpy as np
import pytest

from latfact import MeasureSpace, WeightedLebesgue


@pytest.fixture
def ones2() -> MeasureSpace:
    return MeasureSpace(weights=np.ones(2))


@pytest.fixture
def lebesgue2(ones2) -> WeightedLebesgue:
    return WeightedLebesgue(space=ones2, s=2.0)


def make_space(weights, s) -> WeightedLebesgue:
    return WeightedLebesgue(space=MeasureSpace(weights=np.asarray(weights, float)),
                            s=float(s))
