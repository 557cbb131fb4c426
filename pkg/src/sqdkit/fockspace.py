"""Dense Fock-space ladder operators for brute-force verification.

Builds explicit 4^M-dimensional Jordan-Wigner creation/annihilation matrices
(M <= 4) so that every bit-level kernel in the package can be checked against
literal matrix algebra. Fock basis index n encodes occupations directly:
bit g of n is the occupancy of global spin-orbital g, so a configuration's
index is ``config.global_occupancy(m)``.
"""

from __future__ import annotations

from typing import Sequence

import numpy as np

from .configurations import (
    ALPHA,
    BETA,
    Configuration,
    ExcitationOperator,
    Sector,
)
from .hamiltonian import Hamiltonian

MAX_ORBITALS = 4


class DenseFock:
    """Cached dense ladder matrices over the full 2M-mode Fock space."""

    def __init__(self, m: int):
        if not 1 <= m <= MAX_ORBITALS:
            raise ValueError(f"dense oracle supports 1..{MAX_ORBITALS} orbitals, got {m}")
        self.m = m
        self.n_modes = 2 * m
        self.dim = 1 << self.n_modes
        self._create = [self._build_creation(g) for g in range(self.n_modes)]

    def _build_creation(self, g: int) -> np.ndarray:
        dim = self.dim
        mat = np.zeros((dim, dim))
        low_mask = (1 << g) - 1
        for n in range(dim):
            if n >> g & 1:
                continue
            sign = -1.0 if bin(n & low_mask).count("1") & 1 else 1.0
            mat[n | 1 << g, n] = sign
        return mat

    def creation(self, orbital: int, spin: int) -> np.ndarray:
        return self._create[orbital + spin * self.m]

    def annihilation(self, orbital: int, spin: int) -> np.ndarray:
        return self._create[orbital + spin * self.m].T

    def index_of(self, config: Configuration) -> int:
        return config.global_occupancy(self.m)

    def basis_vector(self, config: Configuration) -> np.ndarray:
        vec = np.zeros(self.dim)
        vec[self.index_of(config)] = 1.0
        return vec

    def configuration_of(self, index: int) -> Configuration:
        mask = (1 << self.m) - 1
        return Configuration(index & mask, index >> self.m)

    def sector_indices(self, sector: Sector) -> np.ndarray:
        """Fock indices of a sector's configurations, in canonical order."""
        out = []
        for n in range(self.dim):
            c = self.configuration_of(n)
            if (
                bin(c.alpha).count("1") == sector.n_alpha
                and bin(c.beta).count("1") == sector.n_beta
            ):
                out.append((c, n))
        out.sort(key=lambda pair: pair[0])
        return np.array([n for _, n in out], dtype=np.intp)

    def operator_matrix(self, op: ExcitationOperator) -> np.ndarray:
        """Dense matrix of a normal-ordered ladder product."""
        mat = np.eye(self.dim)
        for p, s in op.creates:
            mat = mat @ self.creation(p, s)
        for p, s in op.annihilates:
            mat = mat @ self.annihilation(p, s)
        return mat

    def number_operator(self, orbital: int, spin: int) -> np.ndarray:
        c = self.creation(orbital, spin)
        return c @ c.T


def dense_hamiltonian(hamiltonian: Hamiltonian, oracle: DenseFock) -> np.ndarray:
    """Assemble E0 + sum h a'a + sum (pr|qs)/2 a'a'aa as a dense matrix.

    Uses the spin-summed one-body generators N_pr = sum_sigma a'_{p sigma}
    a_{r sigma}: the quartic string reduces to N_pr N_qs minus the
    contraction term (pt|tr) folded into an effective one-body part, which
    keeps the assembly at M^2 matrix products.
    """
    m = hamiltonian.m
    if m != oracle.m:
        raise ValueError(f"orbital counts differ: hamiltonian {m}, oracle {oracle.m}")
    dim = oracle.dim
    n_pr = np.empty((m, m, dim, dim))
    for p in range(m):
        for r in range(m):
            n_pr[p, r] = (
                oracle.creation(p, ALPHA) @ oracle.annihilation(r, ALPHA)
                + oracle.creation(p, BETA) @ oracle.annihilation(r, BETA)
            )
    h_eff = hamiltonian.h - 0.5 * np.einsum("ptts->ps", hamiltonian.eri)
    mat = hamiltonian.e0 * np.eye(dim)
    mat += np.einsum("pr,prab->ab", h_eff, n_pr)
    contracted = np.einsum("prqs,qsab->prab", hamiltonian.eri, n_pr)
    for p in range(m):
        for r in range(m):
            mat += 0.5 * n_pr[p, r] @ contracted[p, r]
    return mat


def dense_operator(
    terms: Sequence[tuple[float, ExcitationOperator]], oracle: DenseFock
) -> np.ndarray:
    """Dense matrix of a weighted sum of ladder products."""
    mat = np.zeros((oracle.dim, oracle.dim))
    for coeff, op in terms:
        mat += coeff * oracle.operator_matrix(op)
    return mat


def dense_expectation(
    terms: Sequence[tuple[float, ExcitationOperator]],
    vector: np.ndarray,
    oracle: DenseFock,
) -> float:
    """<v|O|v> by dense algebra."""
    vector = np.asarray(vector, dtype=float)
    if vector.shape != (oracle.dim,):
        raise ValueError(f"state vector must have shape ({oracle.dim},), got {vector.shape}")
    return float(vector @ dense_operator(terms, oracle) @ vector)


def dense_s_squared(oracle: DenseFock) -> np.ndarray:
    """Total-spin operator S^2 = S- S+ + S_z (S_z + 1) as a dense matrix."""
    dim = oracle.dim
    s_plus = np.zeros((dim, dim))
    s_z = np.zeros((dim, dim))
    for p in range(oracle.m):
        s_plus += oracle.creation(p, ALPHA) @ oracle.annihilation(p, BETA)
        s_z += 0.5 * (oracle.number_operator(p, ALPHA) - oracle.number_operator(p, BETA))
    return s_plus.T @ s_plus + s_z @ (s_z + np.eye(dim))
