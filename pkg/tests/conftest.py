from __future__ import annotations

import numpy as np
import pytest

from sqdkit.configurations import Sector, enumerate_sector
from sqdkit.hamiltonian import Hamiltonian, hubbard_chain
from sqdkit.pipelines import SolveSettings, solve_subspace


def make_random_hamiltonian(m: int, seed: int, scale: float = 1.0) -> Hamiltonian:
    """Random real Hamiltonian with exact 8-fold ERI symmetry."""
    rng = np.random.default_rng(seed)
    h = rng.normal(scale=scale, size=(m, m))
    h = 0.5 * (h + h.T)
    eri = rng.normal(scale=scale, size=(m, m, m, m))
    eri = eri + eri.transpose(1, 0, 2, 3)
    eri = eri + eri.transpose(0, 1, 3, 2)
    eri = eri + eri.transpose(2, 3, 0, 1)
    return Hamiltonian(float(rng.normal()), h, eri)


@pytest.fixture(scope="session")
def hubbard66() -> Hamiltonian:
    return hubbard_chain(6, 1.0, 4.0)


@pytest.fixture(scope="session")
def sector66() -> Sector:
    return Sector(6, 3, 3)


@pytest.fixture(scope="session")
def fci66(hubbard66, sector66):
    """Exact 3-root solution over the fully enumerated (6e,6o) sector."""
    basis = enumerate_sector(sector66)
    state, result = solve_subspace(
        hubbard66, basis, sector66, SolveSettings(n_roots=3), method="fci"
    )
    assert result.all_converged
    return state
