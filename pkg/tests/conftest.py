import numpy as np
import pytest

from biquat_kge.data import build_graph
from biquat_kge.synthetic import toy_graph


@pytest.fixture(scope="session")
def toy_kg():
    """The 50-entity symmetric + hierarchy graph with its 90/10 split."""
    train_names, test_names = toy_graph(seed=0)
    return build_graph(train_names, [], test_names)


@pytest.fixture()
def rng():
    return np.random.default_rng(20240809)
