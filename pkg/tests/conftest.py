import pytest


def close(x, y, rel=1e-12, abs_=0.0):
    return abs(complex(x) - complex(y)) <= max(rel * abs(complex(y)), abs_)


@pytest.fixture
def bessel_params():
    return (3.0,), (3.5, 5.0)


@pytest.fixture
def kummer_params():
    return (1.0, 1.5), (2.0, 3.0)
