import numpy as np
import pytest

from beurlab.density import TargetDensity, ZeroSpec
from beurlab.prime_sampler import PrimeSystem, sample_primes


def toy_system(primes, x_max=None) -> PrimeSystem:
    primes = np.asarray(primes, dtype=float)
    return PrimeSystem(
        primes=primes,
        method="quantile",
        seed=0,
        x_max=float(x_max if x_max is not None else (primes.max() if len(primes) else 10.0)),
        density_fingerprint=b"\x00" * 32,
    )


@pytest.fixture(scope="session")
def two_zero_density() -> TargetDensity:
    """The canonical r=0.6, zeros 0.75 +- 5i system; M=0 is certified
    monotone by direct scan (the crude m_min bound is merely sufficient)."""
    d = TargetDensity(
        r=0.6,
        zeros=ZeroSpec(((0.75, 5.0, 1),)),
        M=0,
        unsafe_allow_small_m=True,
    )
    assert d.verify_monotone(1e8)
    return d


@pytest.fixture(scope="session")
def two_zero_system(two_zero_density) -> PrimeSystem:
    return sample_primes(two_zero_density, method="quantile", seed=1, x_max=1e5)
