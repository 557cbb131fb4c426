"""Fermionic configuration algebra on occupation bitmasks.

A configuration is a pair of integer bitmasks (alpha, beta) over M spatial
orbitals: bit p of a mask is 1 iff spin-orbital (p, sigma) is occupied.
Spin-orbital (p, alpha) carries the global Jordan-Wigner index p and
(p, beta) the index M + p; fermionic signs count occupied spin-orbitals
strictly below the target global index.

The text form of a configuration is a binary string of length 2M with
character index 0 = (orbital 0, alpha) and index M = (orbital 0, beta).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from math import comb
from typing import Iterable, Iterator, Sequence

import numpy as np

ALPHA = 0
BETA = 1

DEFAULT_ENUMERATION_CAP = 10_000_000


class SectorError(ValueError):
    """Inputs violate a particle-number sector requirement."""


class MalformedOperatorError(ValueError):
    """Excitation operator indices do not fit the orbital count."""


class EnumerationCapError(RuntimeError):
    """Sector enumeration would exceed the configured size cap."""


def popcount(x: int) -> int:
    """Number of set bits of a nonnegative Python int of any width."""
    return bin(x).count("1")


@dataclass(frozen=True, order=True)
class Configuration:
    """A Slater determinant as a pair of occupation bitmasks.

    Ordering is lexicographic on (alpha, beta) as unsigned integers, which
    is the canonical total order used for basis sorting and deduplication.
    """

    alpha: int
    beta: int

    @classmethod
    def from_string(cls, text: str) -> "Configuration":
        """Parse the length-2M text form (see module docstring)."""
        if len(text) % 2 != 0:
            raise ValueError(f"configuration string must have even length, got {len(text)}")
        m = len(text) // 2
        alpha = 0
        beta = 0
        for p in range(m):
            ca, cb = text[p], text[m + p]
            if ca not in "01" or cb not in "01":
                raise ValueError(f"configuration string must be binary, got {text!r}")
            alpha |= int(ca) << p
            beta |= int(cb) << p
        return cls(alpha, beta)

    def to_string(self, m: int) -> str:
        if self.alpha >> m or self.beta >> m:
            raise ValueError(f"masks do not fit in {m} orbitals")
        bits_a = "".join("1" if self.alpha >> p & 1 else "0" for p in range(m))
        bits_b = "".join("1" if self.beta >> p & 1 else "0" for p in range(m))
        return bits_a + bits_b

    def swap_spins(self) -> "Configuration":
        return Configuration(self.beta, self.alpha)

    def global_occupancy(self, m: int) -> int:
        """Single integer with bit p = alpha_p and bit M+p = beta_p."""
        return self.alpha | (self.beta << m)


@dataclass(frozen=True)
class Sector:
    """Particle-number block of Fock space: M orbitals, fixed (N_alpha, N_beta)."""

    m: int
    n_alpha: int
    n_beta: int

    def __post_init__(self) -> None:
        if self.m < 0:
            raise SectorError(f"orbital count must be nonnegative, got {self.m}")
        for n in (self.n_alpha, self.n_beta):
            if not 0 <= n <= self.m:
                raise SectorError(f"electron count {n} outside [0, {self.m}]")

    @property
    def size(self) -> int:
        return comb(self.m, self.n_alpha) * comb(self.m, self.n_beta)


@dataclass(frozen=True)
class ExcitationOperator:
    """Particle-conserving product of creation and annihilation operators.

    ``creates`` and ``annihilates`` are tuples of (orbital, spin) pairs with
    spin in {ALPHA, BETA}. The operator is normal-ordered as written (all
    creators left of all annihilators) and no internal reordering happens:
    the caller's index order defines the sign. Rank 0 is the identity.
    """

    creates: tuple[tuple[int, int], ...]
    annihilates: tuple[tuple[int, int], ...]

    def __post_init__(self) -> None:
        creates = tuple((int(p), int(s)) for p, s in self.creates)
        annihilates = tuple((int(p), int(s)) for p, s in self.annihilates)
        object.__setattr__(self, "creates", creates)
        object.__setattr__(self, "annihilates", annihilates)
        if len(creates) != len(annihilates):
            raise MalformedOperatorError("operator must conserve particle number")
        for pairs in (creates, annihilates):
            if len(set(pairs)) != len(pairs):
                raise MalformedOperatorError(f"repeated spin-orbital in {pairs}")
            for p, s in pairs:
                if p < 0 or s not in (ALPHA, BETA):
                    raise MalformedOperatorError(f"bad spin-orbital ({p}, {s})")

    @property
    def rank(self) -> int:
        return len(self.creates)

    @property
    def spin_preserving(self) -> bool:
        spins = lambda pairs: sorted(s for _, s in pairs)  # noqa: E731
        return spins(self.creates) == spins(self.annihilates)

    @property
    def max_orbital(self) -> int:
        orbitals = [p for p, _ in self.creates + self.annihilates]
        return max(orbitals) if orbitals else -1


IDENTITY = ExcitationOperator((), ())


class SubspaceBasis:
    """Canonically ordered, deduplicated configuration set with index lookup."""

    __slots__ = ("configurations", "_index")

    def __init__(self, configurations: Iterable[Configuration]):
        ordered = tuple(sorted(set(configurations)))
        self.configurations = ordered
        self._index = {c: i for i, c in enumerate(ordered)}

    @classmethod
    def _from_sorted(cls, configurations: Sequence[Configuration]) -> "SubspaceBasis":
        basis = cls.__new__(cls)
        basis.configurations = tuple(configurations)
        basis._index = {c: i for i, c in enumerate(basis.configurations)}
        return basis

    def __len__(self) -> int:
        return len(self.configurations)

    def __iter__(self) -> Iterator[Configuration]:
        return iter(self.configurations)

    def __contains__(self, config: Configuration) -> bool:
        return config in self._index

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, SubspaceBasis):
            return NotImplemented
        return self.configurations == other.configurations

    def __hash__(self) -> int:
        return hash(self.configurations)

    def __repr__(self) -> str:
        return f"SubspaceBasis({len(self)} configurations)"

    def index_of(self, config: Configuration) -> int:
        return self._index[config]

    def union(self, other: Iterable[Configuration]) -> "SubspaceBasis":
        return SubspaceBasis(itertools.chain(self.configurations, other))


def hamming_weights(config: Configuration) -> tuple[int, int]:
    """Electron counts (N_alpha, N_beta) of a configuration."""
    return popcount(config.alpha), popcount(config.beta)


def in_sector(config: Configuration, sector: Sector) -> bool:
    """True iff both spin channels carry the sector's electron counts."""
    if config.alpha >> sector.m or config.beta >> sector.m:
        raise SectorError(f"masks do not fit in {sector.m} orbitals")
    return hamming_weights(config) == (sector.n_alpha, sector.n_beta)


def _parity_below(occ: int, g: int) -> int:
    return -1 if popcount(occ & ((1 << g) - 1)) & 1 else 1


def apply_excitation(
    op: ExcitationOperator, config: Configuration, m: int
) -> tuple[int, Configuration | None]:
    """Apply a ladder-operator product to a determinant.

    Annihilators act right-to-left, then creators right-to-left, each step
    carrying the Jordan-Wigner parity of occupied spin-orbitals below the
    target global index. Returns (gamma, result) with gamma in {0, +1, -1};
    gamma = 0 (and result None) when a step annihilates an empty or creates
    an occupied spin-orbital.
    """
    if op.max_orbital >= m:
        raise MalformedOperatorError(
            f"operator touches orbital {op.max_orbital} but only {m} orbitals exist"
        )
    occ = config.global_occupancy(m)
    sign = 1
    for p, s in reversed(op.annihilates):
        g = p + s * m
        if not occ >> g & 1:
            return 0, None
        sign *= _parity_below(occ, g)
        occ ^= 1 << g
    for p, s in reversed(op.creates):
        g = p + s * m
        if occ >> g & 1:
            return 0, None
        sign *= _parity_below(occ, g)
        occ ^= 1 << g
    mask = (1 << m) - 1
    return sign, Configuration(occ & mask, occ >> m)


def spin_inversion_closure(configurations: Iterable[Configuration]) -> SubspaceBasis:
    """Close a configuration set under the alpha <-> beta mask swap.

    All members must share one sector with N_alpha = N_beta; otherwise the
    swapped partner would land in the mirrored sector.
    """
    configs = list(configurations)
    if not configs:
        return SubspaceBasis(())
    weights = hamming_weights(configs[0])
    for c in configs[1:]:
        if hamming_weights(c) != weights:
            raise SectorError("spin-inversion closure over mixed particle-number sectors")
    if weights[0] != weights[1]:
        raise SectorError(
            f"spin-inversion closure requires N_alpha = N_beta, got {weights}"
        )
    return SubspaceBasis(itertools.chain(configs, (c.swap_spins() for c in configs)))


def enumerate_sector(sector: Sector, cap: int = DEFAULT_ENUMERATION_CAP) -> SubspaceBasis:
    """All configurations of a sector in canonical order."""
    if sector.size > cap:
        raise EnumerationCapError(
            f"sector holds {sector.size} configurations, above the cap of {cap}"
        )
    alpha_masks = _spin_masks(sector.m, sector.n_alpha)
    beta_masks = _spin_masks(sector.m, sector.n_beta)
    configs = [Configuration(a, b) for a in alpha_masks for b in beta_masks]
    return SubspaceBasis._from_sorted(configs)


def _spin_masks(m: int, n: int) -> list[int]:
    masks = [sum(1 << p for p in orbs) for orbs in itertools.combinations(range(m), n)]
    masks.sort()
    return masks


def reference_configuration(sector: Sector) -> Configuration:
    """The aufbau reference determinant: lowest N_sigma orbitals occupied."""
    return Configuration((1 << sector.n_alpha) - 1, (1 << sector.n_beta) - 1)


def mean_occupancies(
    configurations: Sequence[Configuration],
    weights: Sequence[float],
    m: int,
) -> tuple[np.ndarray, np.ndarray]:
    """Weighted per-orbital occupancies sum_x w_x x_{p sigma} for each spin."""
    occ_a = np.zeros(m)
    occ_b = np.zeros(m)
    for config, w in zip(configurations, weights):
        for p in range(m):
            if config.alpha >> p & 1:
                occ_a[p] += w
            if config.beta >> p & 1:
                occ_b[p] += w
    return occ_a, occ_b
