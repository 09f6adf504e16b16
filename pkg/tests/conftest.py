import numpy as np
import pytest

from aerocast.kernels import _numpy

try:
    from aerocast.kernels import _numba
except ImportError:  # numba not installed
    _numba = None

BACKENDS = [pytest.param(_numpy, id="numpy")]
if _numba is not None:
    BACKENDS.append(pytest.param(_numba, id="numba"))


@pytest.fixture(params=BACKENDS)
def backend(request):
    return request.param


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)
