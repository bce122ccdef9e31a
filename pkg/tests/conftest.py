from dataclasses import replace

import pytest

from uavbc import SystemParams


@pytest.fixture(scope="session")
def base():
    """Reference scenario: -50 dB gain at 1 m, -100 dBm noise, 10 dBm power,
    H = 100 m, D = 1000 m, V = 30 m/s, T = 60 s."""
    return SystemParams(
        gamma0=1e-5, sigma2=1e-13, H=100.0, D=1000.0, Pbar=1e-2, V=30.0, T=60.0
    )


@pytest.fixture(scope="session")
def static(base):
    """Same scenario with the UAV pinned to a fixed hover (V = 0)."""
    return replace(base, V=0.0)
