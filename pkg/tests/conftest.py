"""Shared fixtures: small character tables and zero sets."""
import pytest

from arithmetic.characters import character_group
from zeros.zero_set import make_zero_set
from zeros.zero_store import ZeroStore


@pytest.fixture
def store(tmp_path):
    """A ZeroStore with an empty, private data directory."""
    return ZeroStore(data_dir=tmp_path)


@pytest.fixture(scope="session")
def table4():
    return character_group(4)


@pytest.fixture(scope="session")
def table5():
    return character_group(5)


@pytest.fixture
def zeros4():
    """The built-in real zero sample mod 4."""
    return ZeroStore().load_builtin(4)


@pytest.fixture
def zeros5(table5):
    """Synthetic zeros mod 5, 50 per character."""
    return ZeroStore().synthesize(5, 50, seed=1)


@pytest.fixture
def unit_weight_zeros():
    """One block mod 4 whose only ordinate has 1/4 + gamma^2 = 1."""
    return make_zero_set(4, [(3, [3 ** 0.5 / 2])])
