"""Exact expectation values on sparse CI states.

Operators are applied exactly with the ladder algebra of the hamiltonian
module (the intermediate states may leave the sector; bra contraction
handles it), never through truncated density matrices.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .configurations import (
    ALPHA,
    BETA,
    ExcitationOperator,
    mean_occupancies,
    popcount,
)
from .hamiltonian import SparseState, apply_operator, overlap

SINGLET_WINDOW = 0.5  # |<S^2>| below this labels a singlet, |<S^2>-2| a triplet


@dataclass(frozen=True)
class OrbitalGroup:
    """Named set of spatial orbitals (e.g. the 3d shell of one metal atom)."""

    name: str
    orbitals: tuple[int, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "orbitals", tuple(sorted(set(self.orbitals))))
        if any(p < 0 for p in self.orbitals):
            raise ValueError(f"negative orbital index in group {self.name!r}")

    def validate(self, m: int) -> None:
        if self.orbitals and self.orbitals[-1] >= m:
            raise ValueError(
                f"group {self.name!r} references orbital {self.orbitals[-1]} "
                f"but only {m} orbitals exist"
            )

    def mask(self) -> int:
        return sum(1 << p for p in self.orbitals)


def _raising_terms(orbitals: Iterable[int]) -> list[tuple[float, ExcitationOperator]]:
    return [(1.0, ExcitationOperator(((p, ALPHA),), ((p, BETA),))) for p in orbitals]


def _lowering_terms(orbitals: Iterable[int]) -> list[tuple[float, ExcitationOperator]]:
    return [(1.0, ExcitationOperator(((p, BETA),), ((p, ALPHA),))) for p in orbitals]


def total_s_squared(state: SparseState) -> float:
    """<S^2> via S-S+ + S_z(S_z + 1); the S+ image lives one sector over."""
    state = state.normalized()
    raised = apply_operator(_raising_terms(range(state.sector.m)), state)
    sz = 0.5 * (state.sector.n_alpha - state.sector.n_beta)
    return float(sum(a * a for a in raised.entries.values()) + sz * (sz + 1.0))


def group_charges(state: SparseState, group: OrbitalGroup) -> tuple[float, float]:
    """(n_up, n_down) summed over the group; diagonal in this basis."""
    group.validate(state.sector.m)
    state = state.normalized()
    mask = group.mask()
    n_up = sum(a * a * popcount(c.alpha & mask) for c, a in state.entries.items())
    n_down = sum(a * a * popcount(c.beta & mask) for c, a in state.entries.items())
    return float(n_up), float(n_down)


def _sz_weighted(state: SparseState, mask: int) -> float:
    return 0.5 * sum(
        a * a * (popcount(c.alpha & mask) - popcount(c.beta & mask))
        for c, a in state.entries.items()
    )


def local_spin(state: SparseState, group: OrbitalGroup) -> np.ndarray:
    """<S_vec> of an orbital group: z diagonal, x/y from spin-flip applications.

    With real CI amplitudes <S+> = <S->, so the y component vanishes
    identically; it is still assembled from the two applications.
    """
    group.validate(state.sector.m)
    state = state.normalized()
    raised = apply_operator(_raising_terms(group.orbitals), state)
    lowered = apply_operator(_lowering_terms(group.orbitals), state)
    plus = overlap(state, raised)
    minus = overlap(state, lowered)
    return np.array([0.5 * (plus + minus), 0.5 * (plus - minus), _sz_weighted(state, group.mask())])


def spin_correlation(
    state: SparseState, group1: OrbitalGroup, group2: OrbitalGroup
) -> tuple[float, float]:
    """(raw, connected) spin-spin correlation between two orbital groups.

    raw = <S1.S2> = <S1z S2z> + (<S1- v|S2- v> + <S1+ v|S2+ v>)/2, using
    (S1+)**dagger = S1-; connected subtracts <S1>.<S2>.
    """
    group1.validate(state.sector.m)
    group2.validate(state.sector.m)
    state = state.normalized()
    mask1, mask2 = group1.mask(), group2.mask()
    zz = 0.25 * sum(
        a
        * a
        * (popcount(c.alpha & mask1) - popcount(c.beta & mask1))
        * (popcount(c.alpha & mask2) - popcount(c.beta & mask2))
        for c, a in state.entries.items()
    )
    lowered1 = apply_operator(_lowering_terms(group1.orbitals), state)
    lowered2 = apply_operator(_lowering_terms(group2.orbitals), state)
    raised1 = apply_operator(_raising_terms(group1.orbitals), state)
    raised2 = apply_operator(_raising_terms(group2.orbitals), state)
    transverse = 0.5 * (overlap(lowered1, lowered2) + overlap(raised1, raised2))
    raw = float(zz + transverse)
    connected = raw - float(local_spin(state, group1) @ local_spin(state, group2))
    return raw, connected


def occupancy_profile(state: SparseState) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Per-orbital (<n_p alpha>, <n_p beta>, spatial sum)."""
    state = state.normalized()
    configs = list(state.entries)
    weights = [state.entries[c] ** 2 for c in configs]
    occ_a, occ_b = mean_occupancies(configs, weights, state.sector.m)
    return occ_a, occ_b, occ_a + occ_b


@dataclass(frozen=True)
class RootLabel:
    root: int
    energy: float
    s_squared: float
    kind: str  # "singlet", "triplet", or "mixed"
    name: str  # S0, S1, ..., T1, T2, ..., or mixed(<value>)


def classify_roots(states) -> list[RootLabel]:
    """Label eigenstates singlet/triplet/mixed from per-root <S^2>.

    ``states`` is any CI-state bundle with ``basis``, ``coefficients``,
    ``energies``, ``sector``. Within each class, names follow ascending
    energy (ties keep ascending-energy order): S0, S1, ... and T1, T2, ...
    """
    labels = []
    n_singlet = 0
    n_triplet = 0
    for mu in range(len(states.energies)):
        column = SparseState.from_items(
            zip(states.basis, np.asarray(states.coefficients)[:, mu]), states.sector
        )
        s2 = total_s_squared(column)
        if abs(s2) < SINGLET_WINDOW:
            kind, name = "singlet", f"S{n_singlet}"
            n_singlet += 1
        elif abs(s2 - 2.0) < SINGLET_WINDOW:
            n_triplet += 1
            kind, name = "triplet", f"T{n_triplet}"
        else:
            kind, name = "mixed", f"mixed({s2:.3f})"
        labels.append(RootLabel(mu, float(states.energies[mu]), s2, kind, name))
    return labels


@dataclass
class SpinReport:
    """Per-root spin/charge summary over a set of orbital groups."""

    groups: list[str]
    charges: dict[str, tuple[float, float]]  # group -> (n_up, n_down)
    spins: dict[str, np.ndarray]  # group -> <S_vec>
    correlations: dict[tuple[str, str], tuple[float, float]]  # pair -> (raw, connected)
    s_squared: float
    occupancies: np.ndarray = field(default_factory=lambda: np.zeros(0))


def spin_report(state: SparseState, groups: Sequence[OrbitalGroup]) -> SpinReport:
    """Assemble the full per-state report used by the CLI observables output."""
    seen: set[int] = set()
    for g in groups:
        g.validate(state.sector.m)
        if seen & set(g.orbitals):
            warnings.warn(f"orbital groups overlap at {sorted(seen & set(g.orbitals))}")
        seen |= set(g.orbitals)
    charges = {g.name: group_charges(state, g) for g in groups}
    spins = {g.name: local_spin(state, g) for g in groups}
    correlations = {}
    for i, g1 in enumerate(groups):
        for g2 in groups[i + 1 :]:
            correlations[(g1.name, g2.name)] = spin_correlation(state, g1, g2)
    _, _, total_occ = occupancy_profile(state)
    return SpinReport(
        groups=[g.name for g in groups],
        charges=charges,
        spins=spins,
        correlations=correlations,
        s_squared=total_s_squared(state),
        occupancies=total_occ,
    )
