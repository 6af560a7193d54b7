import pytest

from bailfund import blocking_example2_params, example1_params


@pytest.fixture
def ex1():
    return example1_params()


@pytest.fixture
def ex2_blocking():
    return blocking_example2_params()
