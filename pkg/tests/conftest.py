import numpy as np
import pytest

from nolabel import ModeBasis, NState, SingleParticleState, Statistics, default_protocol_basis

BOTH = (Statistics.BOSONS, Statistics.FERMIONS)


@pytest.fixture
def basis() -> ModeBasis:
    return default_protocol_basis()


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20240817)


def random_state(basis, rng) -> SingleParticleState:
    v = rng.normal(size=basis.dim) + 1j * rng.normal(size=basis.dim)
    return SingleParticleState(basis, v / np.linalg.norm(v))


def random_product(basis, rng, statistics, n=2) -> NState:
    return NState.product(statistics, [random_state(basis, rng) for _ in range(n)])


def random_superposition(basis, rng, statistics, n=2, terms=2) -> NState:
    state = NState(statistics, ())
    for _ in range(terms):
        state = state + random_product(basis, rng, statistics, n) * complex(rng.normal(), rng.normal())
    return state


def spin_state(basis, mode, rng) -> SingleParticleState:
    """Random spin superposition localized on one mode."""
    a = rng.normal(size=2) + 1j * rng.normal(size=2)
    a /= np.linalg.norm(a)
    return basis.ket(mode, spin="up") * a[0] + basis.ket(mode, spin="down") * a[1]
