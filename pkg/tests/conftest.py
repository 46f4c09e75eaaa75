from __future__ import annotations

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

settings.register_profile(
    "gluekit", max_examples=25, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("gluekit")


def random_tensor(rng: np.random.Generator, chi: int, d: int):
    from gluekit.mps import MpsTensor

    return MpsTensor(rng.standard_normal((chi, d, chi)) + 1j * rng.standard_normal((chi, d, chi)))


def random_unitary(rng: np.random.Generator, n: int) -> np.ndarray:
    q, r = np.linalg.qr(rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n)))
    return q * (np.diag(r) / np.abs(np.diag(r)))


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
