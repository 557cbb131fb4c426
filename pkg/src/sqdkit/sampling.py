"""Configuration samples: acquisition, statistics, recovery, batching.

Samples are multisets of raw bitstrings of length 2M in the text convention
of the configurations module (alpha half then beta half). The samples file
format is one bitstring per line, optionally followed by whitespace and a
positive integer multiplicity; the simulated samplers emit the same format
so device-derived files and synthetic ones interchange freely.

All randomness flows through counter-based seed streams: a master seed plus
integer stream ids fully determine every draw, independent of scheduling.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import comb
from typing import IO, Iterable, NamedTuple

import numpy as np

from .configurations import (
    Configuration,
    Sector,
    SectorError,
    SubspaceBasis,
    hamming_weights,
    in_sector,
    mean_occupancies,
    reference_configuration,
    spin_inversion_closure,
)
from .hamiltonian import SparseState

RECOVERY_SMOOTHING = 1e-6
_WILSON_Z = 1.959963984540054  # 97.5th percentile of the standard normal


class SampleFormatError(ValueError):
    """Malformed samples file content."""


@dataclass
class SampleSet:
    """Multiset of raw length-2M bitstrings with multiplicities."""

    counts: dict[str, int]
    m: int

    def __post_init__(self) -> None:
        for key, mult in self.counts.items():
            if len(key) != 2 * self.m or set(key) - {"0", "1"}:
                raise SampleFormatError(f"bad bitstring {key!r} for {self.m} orbitals")
            if mult <= 0:
                raise SampleFormatError(f"multiplicity of {key!r} must be positive, got {mult}")

    @property
    def total(self) -> int:
        return sum(self.counts.values())

    @property
    def n_distinct(self) -> int:
        return len(self.counts)

    def merged_with(self, other: "SampleSet") -> "SampleSet":
        if other.m != self.m:
            raise SampleFormatError("cannot merge sample sets over different orbital counts")
        counts = dict(self.counts)
        for key, mult in other.counts.items():
            counts[key] = counts.get(key, 0) + mult
        return SampleSet(counts, self.m)

    def in_sector_fraction(self, sector: Sector) -> float:
        hit = sum(
            mult
            for key, mult in self.counts.items()
            if in_sector(Configuration.from_string(key), sector)
        )
        return hit / self.total


def read_samples(source: str | bytes | IO, m: int) -> SampleSet:
    """Aggregate a samples file into a multiset."""
    if isinstance(source, bytes):
        text = source.decode()
    elif isinstance(source, str):
        text = source
    else:
        data = source.read()
        text = data.decode() if isinstance(data, bytes) else data
    counts: dict[str, int] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        fields = line.split()
        if not fields:
            continue
        key = fields[0]
        if len(key) != 2 * m:
            raise SampleFormatError(
                f"line {lineno}: bitstring length {len(key)}, expected {2 * m}"
            )
        if set(key) - {"0", "1"}:
            raise SampleFormatError(f"line {lineno}: non-binary characters in {key!r}")
        if len(fields) == 1:
            mult = 1
        elif len(fields) == 2:
            try:
                mult = int(fields[1])
            except ValueError:
                raise SampleFormatError(
                    f"line {lineno}: multiplicity {fields[1]!r} is not an integer"
                ) from None
            if mult <= 0:
                raise SampleFormatError(f"line {lineno}: multiplicity must be positive")
        else:
            raise SampleFormatError(f"line {lineno}: expected 'bitstring [multiplicity]'")
        counts[key] = counts.get(key, 0) + mult
    return SampleSet(counts, m)


def write_samples(samples: SampleSet, stream: IO[str]) -> None:
    for key in sorted(samples.counts):
        stream.write(f"{key} {samples.counts[key]}\n")


def rng_stream(seed: int, *stream: int) -> np.random.Generator:
    """Independent generator addressed by (master seed, stream ids)."""
    return np.random.default_rng(np.random.SeedSequence(entropy=seed, spawn_key=stream))


def _pack_rows(bits: np.ndarray) -> list[str]:
    raw = (bits.astype(np.uint8) + ord("0")).tobytes()
    width = bits.shape[1]
    return [raw[i * width : (i + 1) * width].decode("ascii") for i in range(bits.shape[0])]


def sample_uniform_sector(sector: Sector, n: int, seed: int) -> SampleSet:
    """n independent draws, each uniform over the sector's configurations.

    Rejection-free: each spin channel receives a uniformly random
    N_sigma-subset of the M orbitals.
    """
    if sector.size == 0:
        raise SectorError("cannot sample an empty sector")
    rng = rng_stream(seed, 0)
    bits = np.zeros((n, 2 * sector.m), dtype=np.uint8)
    rows = np.arange(n)[:, None]
    for offset, count in ((0, sector.n_alpha), (sector.m, sector.n_beta)):
        if count == 0:
            continue
        order = np.argsort(rng.random((n, sector.m)), axis=1)
        bits[rows, offset + order[:, :count]] = 1
    counts: dict[str, int] = {}
    for key in _pack_rows(bits):
        counts[key] = counts.get(key, 0) + 1
    return SampleSet(counts, sector.m)


def sample_state(state: SparseState, n: int, noise_rate: float, seed: int) -> SampleSet:
    """n Born-rule draws from a sparse state, then i.i.d. per-bit flips.

    The bit-flip channel emulates sampling noise that leaks weight out of
    the particle-number sector.
    """
    norm = state.norm()
    if abs(norm - 1.0) > 1e-8:
        raise ValueError(f"state must be normalized, got |v| = {norm}")
    if not 0.0 <= noise_rate <= 1.0:
        raise ValueError(f"noise rate must be a probability, got {noise_rate}")
    m = state.sector.m
    configs = list(state.entries)
    probs = np.array([state.entries[c] ** 2 for c in configs])
    probs /= probs.sum()
    rng = rng_stream(seed, 0)
    draws = rng.choice(len(configs), size=n, p=probs)
    base = np.array(
        [[int(ch) for ch in c.to_string(m)] for c in configs], dtype=np.uint8
    )
    bits = base[draws]
    if noise_rate > 0.0:
        flips = rng.random((n, 2 * m)) < noise_rate
        bits = bits ^ flips.astype(np.uint8)
    counts: dict[str, int] = {}
    for key in _pack_rows(bits):
        counts[key] = counts.get(key, 0) + 1
    return SampleSet(counts, m)


class ParticleStats(NamedTuple):
    p_hw: float
    ci95: tuple[float, float]
    p_unif: float


def uniform_sector_probability(sector: Sector) -> float:
    """Probability that a uniform random 2M-bitstring lands in the sector."""
    return float(
        Fraction(comb(sector.m, sector.n_alpha) * comb(sector.m, sector.n_beta), 4**sector.m)
    )


def particle_number_stats(samples: SampleSet, sector: Sector) -> ParticleStats:
    """In-sector fraction with a Wilson 95% interval, plus the uniform baseline."""
    total = samples.total
    if total == 0:
        raise SampleFormatError("empty sample set")
    p_hw = samples.in_sector_fraction(sector)
    z2 = _WILSON_Z**2
    center = (p_hw + z2 / (2 * total)) / (1 + z2 / total)
    half = (
        _WILSON_Z
        * np.sqrt(p_hw * (1 - p_hw) / total + z2 / (4 * total**2))
        / (1 + z2 / total)
    )
    return ParticleStats(p_hw, (center - half, center + half), uniform_sector_probability(sector))


@dataclass
class RecoveryModel:
    """Mean orbital occupancies guiding the bit-repair of broken samples."""

    occ_alpha: np.ndarray
    occ_beta: np.ndarray

    def __post_init__(self) -> None:
        self.occ_alpha = np.clip(np.asarray(self.occ_alpha, dtype=float), 0.0, 1.0)
        self.occ_beta = np.clip(np.asarray(self.occ_beta, dtype=float), 0.0, 1.0)

    @classmethod
    def from_reference(cls, reference: Configuration, m: int) -> "RecoveryModel":
        occ_a, occ_b = mean_occupancies([reference], [1.0], m)
        return cls(occ_a, occ_b)


def update_model(
    basis: SubspaceBasis | Iterable[Configuration],
    ground_column: np.ndarray,
    sector: Sector,
) -> RecoveryModel:
    """Occupancy model occ_sigma[p] = sum_x |c_x|^2 x_{p sigma} from a CI column."""
    weights = np.asarray(ground_column, dtype=float) ** 2
    occ_a, occ_b = mean_occupancies(list(basis), weights, sector.m)
    return RecoveryModel(occ_a, occ_b)


def _repair_channel(
    bits: np.ndarray, target: int, occ: np.ndarray, rng: np.random.Generator
) -> None:
    weight = int(bits.sum())
    while weight > target:
        occupied = np.nonzero(bits)[0]
        probs = (1.0 - occ[occupied]) + RECOVERY_SMOOTHING
        choice = occupied[rng.choice(len(occupied), p=probs / probs.sum())]
        bits[choice] = 0
        weight -= 1
    while weight < target:
        empty = np.nonzero(bits == 0)[0]
        probs = occ[empty] + RECOVERY_SMOOTHING
        choice = empty[rng.choice(len(empty), p=probs / probs.sum())]
        bits[choice] = 1
        weight += 1


def recover_configurations(
    samples: SampleSet, model: RecoveryModel, sector: Sector, seed: int
) -> SampleSet:
    """Repair out-of-sector samples per spin channel (occupancy-weighted).

    In-sector samples pass through unchanged. For each broken copy, orbitals
    are cleared with probability proportional to (1 - occ) + delta while the
    channel weight exceeds N_sigma, and set with probability proportional to
    occ + delta while below; every output key lands in the sector.
    """
    m = sector.m
    rng = rng_stream(seed, 1)
    counts: dict[str, int] = {}
    for key in sorted(samples.counts):
        mult = samples.counts[key]
        config = Configuration.from_string(key)
        if in_sector(config, sector):
            counts[key] = counts.get(key, 0) + mult
            continue
        for _ in range(mult):
            bits = np.fromiter((int(ch) for ch in key), dtype=np.uint8, count=2 * m)
            _repair_channel(bits[:m], sector.n_alpha, model.occ_alpha, rng)
            _repair_channel(bits[m:], sector.n_beta, model.occ_beta, rng)
            fixed = _pack_rows(bits[None, :])[0]
            counts[fixed] = counts.get(fixed, 0) + 1
    return SampleSet(counts, m)


def make_batches(
    recovered: SampleSet,
    k: int,
    batch_size: int,
    seed: int,
    reference: Configuration | None = None,
    weighted: bool = True,
    close_spin: bool = True,
    sector: Sector | None = None,
) -> list[SubspaceBasis]:
    """K independent batches of distinct configurations from the recovered set.

    Each batch draws min(batch_size, distinct) configurations without
    replacement (multiplicity-weighted by default), always includes the
    reference configuration, and is closed under spin inversion when the
    sector has N_alpha = N_beta.
    """
    if recovered.n_distinct == 0:
        raise SampleFormatError("cannot form batches from an empty recovered set")
    if batch_size < 1:
        raise ValueError("batch size must be at least 1")
    keys = sorted(recovered.counts)
    configs = [Configuration.from_string(key) for key in keys]
    weights_arr = np.array([recovered.counts[key] for key in keys], dtype=float)
    if sector is None:
        na, nb = hamming_weights(configs[0])
        sector = Sector(recovered.m, na, nb)
    if reference is None:
        reference = reference_configuration(sector)
    probs = weights_arr / weights_arr.sum() if weighted else None
    size = min(batch_size, len(configs))
    batches = []
    for b in range(k):
        rng = rng_stream(seed, 2, b)
        picked = rng.choice(len(configs), size=size, replace=False, p=probs)
        members = [configs[i] for i in picked]
        if reference not in set(members):
            members.append(reference)
        if close_spin and sector.n_alpha == sector.n_beta:
            batches.append(spin_inversion_closure(members))
        else:
            batches.append(SubspaceBasis(members))
    return batches
