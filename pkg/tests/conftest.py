import numpy as np
import pytest

from conekit import BipartiteDims

DESK_DIMS = [(2, 2), (2, 3), (3, 3)]


@pytest.fixture(params=DESK_DIMS, ids=lambda p: f"{p[0]}x{p[1]}")
def dims(request):
    return BipartiteDims(*request.param)


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)


def hermitian(rng, dim):
    g = (rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))) / np.sqrt(2)
    return (g + g.conj().T) / 2
