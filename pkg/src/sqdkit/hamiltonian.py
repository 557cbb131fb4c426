"""Second-quantized Hamiltonians and their matrix-free action.

The Hamiltonian is E0 + sum_{pr,s} h_pr a'_{ps} a_{rs}
+ sum_{prqs,st} (pr|qs)/2 a'_{ps} a'_{qt} a_{st} a_{rs} with real orbitals
and chemist-notation two-electron integrals (8-fold permutational symmetry).
Matrix elements between determinants follow the Slater-Condon rules with
signs consistent with the Jordan-Wigner convention of the configurations
module.
"""

from __future__ import annotations

import re
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import IO, Iterable, NamedTuple, Sequence

import numpy as np
import scipy.sparse

from .configurations import (
    ALPHA,
    BETA,
    Configuration,
    ExcitationOperator,
    MalformedOperatorError,
    Sector,
    SectorError,
    SubspaceBasis,
    apply_excitation,
    hamming_weights,
    popcount,
)

PRUNE_TOLERANCE = 1e-15
DEFAULT_MATERIALIZE_THRESHOLD = 20_000
DEFAULT_ROW_CHUNK = 4096


class FcidumpError(ValueError):
    """Malformed FCIDUMP content."""


@dataclass(frozen=True)
class Hamiltonian:
    """Energy offset, one-electron matrix, and chemist-notation ERI tensor.

    ``eri[p, r, q, s]`` stores (pr|qs); all eight symmetry-related slots hold
    identical values. Construction validates symmetry and finiteness.
    """

    e0: float
    h: np.ndarray
    eri: np.ndarray

    def __post_init__(self) -> None:
        h = np.asarray(self.h, dtype=float)
        eri = np.asarray(self.eri, dtype=float)
        object.__setattr__(self, "h", h)
        object.__setattr__(self, "eri", eri)
        m = h.shape[0]
        if h.shape != (m, m):
            raise ValueError(f"one-electron matrix must be square, got {h.shape}")
        if eri.shape != (m, m, m, m):
            raise ValueError(f"ERI tensor must have shape {(m,) * 4}, got {eri.shape}")
        if not (np.isfinite(self.e0) and np.isfinite(h).all() and np.isfinite(eri).all()):
            raise ValueError("Hamiltonian entries must be finite")
        if not np.array_equal(h, h.T):
            raise ValueError("one-electron matrix must be symmetric")
        for axes in ((1, 0, 2, 3), (0, 1, 3, 2), (2, 3, 0, 1)):
            if not np.array_equal(eri, eri.transpose(axes)):
                raise ValueError("ERI tensor must obey 8-fold real-orbital symmetry")

    @property
    def m(self) -> int:
        return self.h.shape[0]

    # Contractions reused by every Slater-Condon evaluation; built lazily
    # and cached on the instance (frozen dataclass, hence object.__setattr__).
    def _contractions(self) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
        cached = getattr(self, "_cached_contractions", None)
        if cached is None:
            idx = np.arange(self.m)
            coulomb_diag = self.eri[:, :, idx, idx]  # (pa|jj) as [p, a, j]
            exchange_diag = self.eri[:, idx, idx, :]  # (pj|ja) as [p, j, a]
            eri_iijj = self.eri[idx[:, None], idx[:, None], idx[None, :], idx[None, :]]
            eri_ijji = self.eri[idx[:, None], idx[None, :], idx[None, :], idx[:, None]]
            cached = (coulomb_diag, exchange_diag, eri_iijj, eri_ijji)
            object.__setattr__(self, "_cached_contractions", cached)
        return cached


@dataclass
class SparseState:
    """Sparse CI vector: configuration -> real amplitude within one sector."""

    entries: dict[Configuration, float]
    sector: Sector

    @classmethod
    def from_items(
        cls,
        items: Iterable[tuple[Configuration, float]],
        sector: Sector,
        prune: float = PRUNE_TOLERANCE,
    ) -> "SparseState":
        acc: dict[Configuration, float] = {}
        for config, amp in items:
            acc[config] = acc.get(config, 0.0) + amp
        entries = {c: a for c, a in acc.items() if abs(a) > prune}
        return cls(entries, sector)

    def norm(self) -> float:
        return float(np.sqrt(sum(a * a for a in self.entries.values())))

    def normalized(self) -> "SparseState":
        n = self.norm()
        if n == 0.0:
            raise ValueError("cannot normalize a zero state")
        return SparseState({c: a / n for c, a in self.entries.items()}, self.sector)

    def __len__(self) -> int:
        return len(self.entries)


def overlap(u: SparseState, v: SparseState) -> float:
    """<u|v> over shared configurations; states in different sectors overlap to 0."""
    if u.sector != v.sector:
        return 0.0
    if len(u.entries) > len(v.entries):
        u, v = v, u
    return float(sum(a * v.entries.get(c, 0.0) for c, a in u.entries.items()))


# ---------------------------------------------------------------------------
# FCIDUMP ingestion and emission (Molpro convention, 1-based indices).
# ---------------------------------------------------------------------------


class FcidumpData(NamedTuple):
    hamiltonian: Hamiltonian
    sector: Sector
    duplicates: int


def parse_fcidump(source: str | bytes | IO) -> FcidumpData:
    """Parse an FCIDUMP: header namelist, then ``value i j k l`` records.

    Record semantics: (i j k l) -> (ij|kl) in chemist notation with all
    eight symmetric slots populated; k = l = 0 -> h_ij; all indices zero ->
    the energy offset. Duplicate records overwrite (last wins) and are
    counted in the returned report. The sector hint derives from NELEC and
    MS2 as ((NELEC+MS2)/2, (NELEC-MS2)/2).
    """
    text = _read_text(source)
    header, body = _split_header(text)
    keys = _parse_namelist(header)
    try:
        norb = int(keys["norb"])
        nelec = int(keys["nelec"])
    except KeyError as exc:
        raise FcidumpError(f"FCIDUMP header missing {exc.args[0].upper()}") from None
    ms2 = int(keys.get("ms2", 0))
    if (nelec + ms2) % 2:
        raise FcidumpError(f"NELEC={nelec}, MS2={ms2} do not define integer spin counts")
    n_alpha = (nelec + ms2) // 2
    n_beta = (nelec - ms2) // 2
    sector = Sector(norb, n_alpha, n_beta)

    e0 = 0.0
    h = np.zeros((norb, norb))
    eri = np.zeros((norb, norb, norb, norb))
    seen: set[tuple[int, ...]] = set()
    duplicates = 0
    tokens = body.split()
    if len(tokens) % 5:
        raise FcidumpError("FCIDUMP records must come as 'value i j k l' groups of five")
    for base in range(0, len(tokens), 5):
        raw_value = tokens[base]
        try:
            value = float(raw_value.replace("D", "e").replace("d", "e"))
        except ValueError:
            raise FcidumpError(f"non-numeric integral value {raw_value!r}") from None
        try:
            i, j, k, l = (int(t) for t in tokens[base + 1 : base + 5])
        except ValueError:
            raise FcidumpError(
                f"non-integer index in record {tokens[base:base + 5]!r}"
            ) from None
        if i == j == k == l == 0:
            key = (0,)
            e0 = value
        elif k == l == 0:
            if not (1 <= i <= norb and 1 <= j <= norb):
                raise FcidumpError(f"one-electron index out of range in ({i},{j})")
            key = (1, *sorted((i, j)))
            h[i - 1, j - 1] = value
            h[j - 1, i - 1] = value
        else:
            if not all(1 <= t <= norb for t in (i, j, k, l)):
                raise FcidumpError(f"two-electron index out of range in ({i},{j},{k},{l})")
            key = (2, *_canonical_eri_key(i, j, k, l))
            _set_eri(eri, i - 1, j - 1, k - 1, l - 1, value)
        if key in seen:
            duplicates += 1
        seen.add(key)
    return FcidumpData(Hamiltonian(e0, h, eri), sector, duplicates)


def _read_text(source: str | bytes | IO) -> str:
    if isinstance(source, bytes):
        return source.decode()
    if isinstance(source, str):
        return source
    data = source.read()
    return data.decode() if isinstance(data, bytes) else data


def _split_header(text: str) -> tuple[str, str]:
    match = re.search(r"(/|&END)", text, flags=re.IGNORECASE)
    if not match or "&FCI" not in text[: match.start()].upper():
        raise FcidumpError("FCIDUMP header must start with &FCI and end with / or &END")
    return text[: match.start()], text[match.end() :]


def _parse_namelist(header: str) -> dict[str, str]:
    keys: dict[str, str] = {}
    for name, value in re.findall(r"([A-Za-z0-9_]+)\s*=\s*([^=&]*?)(?=[,\s][A-Za-z0-9_]+\s*=|$)", header):
        keys[name.lower()] = value.strip().rstrip(",").split(",")[0].strip()
    return keys


def _canonical_eri_key(i: int, j: int, k: int, l: int) -> tuple[int, int, int, int]:
    ij = tuple(sorted((i, j), reverse=True))
    kl = tuple(sorted((k, l), reverse=True))
    return (ij + kl) if ij >= kl else (kl + ij)


def _set_eri(eri: np.ndarray, p: int, r: int, q: int, s: int, value: float) -> None:
    for a, b in ((p, r), (r, p)):
        for c, d in ((q, s), (s, q)):
            eri[a, b, c, d] = value
            eri[c, d, a, b] = value


def write_fcidump(hamiltonian: Hamiltonian, sector: Sector, stream: IO[str]) -> None:
    """Emit an FCIDUMP with 17-significant-digit values (exact round-trip)."""
    m = hamiltonian.m
    stream.write(f" &FCI NORB={m},NELEC={sector.n_alpha + sector.n_beta},"
                 f"MS2={sector.n_alpha - sector.n_beta},\n")
    stream.write("  ORBSYM=" + "1," * m + "\n  ISYM=1,\n &END\n")
    for i in range(m):
        for j in range(i + 1):
            for k in range(i + 1):
                lmax = j if k == i else k
                for l in range(lmax + 1):
                    value = hamiltonian.eri[i, j, k, l]
                    if value != 0.0:
                        stream.write(f" {value:.17g} {i + 1} {j + 1} {k + 1} {l + 1}\n")
    for i in range(m):
        for j in range(i + 1):
            value = hamiltonian.h[i, j]
            if value != 0.0:
                stream.write(f" {value:.17g} {i + 1} {j + 1} 0 0\n")
    stream.write(f" {hamiltonian.e0:.17g} 0 0 0 0\n")


def hubbard_chain(l: int, t: float, u: float, periodic: bool = False) -> Hamiltonian:
    """One-dimensional Hubbard chain: hopping -t, on-site repulsion U.

    With periodic=True the wrap bond is added on top of the open-chain ones,
    so L=2 rings carry h01 = -2t (both ring bonds join the same pair).
    """
    if l < 1:
        raise ValueError(f"need at least one site, got {l}")
    if periodic and l == 1:
        raise ValueError("a single site cannot close a ring")
    h = np.zeros((l, l))
    bonds = range(l) if periodic else range(l - 1)
    for p in bonds:
        q = (p + 1) % l
        h[p, q] -= t
        h[q, p] -= t
    eri = np.zeros((l, l, l, l))
    for p in range(l):
        eri[p, p, p, p] = u
    return Hamiltonian(0.0, h, eri)


# ---------------------------------------------------------------------------
# Slater-Condon matrix elements.
# ---------------------------------------------------------------------------


def _occupancy_vectors(config: Configuration, m: int) -> tuple[np.ndarray, np.ndarray]:
    va = np.fromiter(((config.alpha >> p) & 1 for p in range(m)), dtype=float, count=m)
    vb = np.fromiter(((config.beta >> p) & 1 for p in range(m)), dtype=float, count=m)
    return va, vb


def diagonal_element(hamiltonian: Hamiltonian, config: Configuration) -> float:
    """<x|H|x>: one-body trace plus Coulomb minus same-spin exchange."""
    m = hamiltonian.m
    va, vb = _occupancy_vectors(config, m)
    n = va + vb
    _, _, eri_iijj, eri_ijji = hamiltonian._contractions()
    value = hamiltonian.e0 + float(np.diag(hamiltonian.h) @ n)
    value += 0.5 * float(n @ eri_iijj @ n)
    value -= 0.5 * float(va @ eri_ijji @ va + vb @ eri_ijji @ vb)
    return value


def _single_sign(occ: int, g_from: int, g_to: int) -> int:
    sign = -1 if popcount(occ & ((1 << g_from) - 1)) & 1 else 1
    occ ^= 1 << g_from
    if popcount(occ & ((1 << g_to) - 1)) & 1:
        sign = -sign
    return sign


def _double_sign(occ: int, removed: tuple[int, int], added: tuple[int, int]) -> int:
    """Parity of a'_{a1} a'_{a2} a_{r2} a_{r1} with removed/added sorted ascending."""
    sign = 1
    for g in removed:
        if popcount(occ & ((1 << g) - 1)) & 1:
            sign = -sign
        occ ^= 1 << g
    for g in reversed(added):
        if popcount(occ & ((1 << g) - 1)) & 1:
            sign = -sign
        occ ^= 1 << g
    return sign


def matrix_element(
    hamiltonian: Hamiltonian, x: Configuration, y: Configuration
) -> float:
    """Slater-Condon value <y|H|x>; zero beyond double excitations."""
    if hamming_weights(x) != hamming_weights(y):
        raise SectorError("matrix elements are defined within one sector")
    m = hamiltonian.m
    diff_a = x.alpha ^ y.alpha
    diff_b = x.beta ^ y.beta
    degree2 = popcount(diff_a) + popcount(diff_b)
    if degree2 == 0:
        return diagonal_element(hamiltonian, x)
    if degree2 > 4:
        return 0.0
    occ = x.global_occupancy(m)
    removed = _bits(diff_a & x.alpha) + [g + m for g in _bits(diff_b & x.beta)]
    added = _bits(diff_a & y.alpha) + [g + m for g in _bits(diff_b & y.beta)]
    if degree2 == 2:
        p_g, a_g = removed[0], added[0]
        spin = ALPHA if p_g < m else BETA
        p, a = p_g % m, a_g % m
        va, vb = _occupancy_vectors(x, m)
        coulomb_diag, exchange_diag, _, _ = hamiltonian._contractions()
        v_same = va if spin == ALPHA else vb
        value = (
            hamiltonian.h[p, a]
            + float(coulomb_diag[p, a] @ (va + vb))
            - float(exchange_diag[p, :, a] @ v_same)
        )
        return _single_sign(occ, p_g, a_g) * value
    r1, r2 = sorted(removed)
    a1, a2 = sorted(added)
    # per-channel removed/added counts match (weights already checked), and
    # sorting puts alpha globals before beta, so r1 pairs with a1, r2 with a2
    i, j, a, b = r1 % m, r2 % m, a1 % m, a2 % m
    value = hamiltonian.eri[i, a, j, b]
    if (r1 >= m) == (r2 >= m):  # same-spin double: crossed pairing contributes
        value -= hamiltonian.eri[i, b, j, a]
    if value == 0.0:
        return 0.0
    return _double_sign(occ, (r1, r2), (a1, a2)) * value


def _bits(mask: int) -> list[int]:
    out = []
    g = 0
    while mask:
        if mask & 1:
            out.append(g)
        mask >>= 1
        g += 1
    return out


def connected_configurations(
    hamiltonian: Hamiltonian, config: Configuration
) -> list[tuple[Configuration, float]]:
    """All (z, <z|H|y>) with a nonzero integral contraction, y included first."""
    m = hamiltonian.m
    va, vb = _occupancy_vectors(config, m)
    n = va + vb
    coulomb_diag, exchange_diag, _, _ = hamiltonian._contractions()
    occ = config.global_occupancy(m)
    out = [(config, diagonal_element(hamiltonian, config))]

    occ_orbs = (_bits(config.alpha), _bits(config.beta))
    virt_orbs = (
        [p for p in range(m) if not config.alpha >> p & 1],
        [p for p in range(m) if not config.beta >> p & 1],
    )

    for spin in (ALPHA, BETA):
        v_same = va if spin == ALPHA else vb
        singles = hamiltonian.h + np.tensordot(coulomb_diag, n, axes=([2], [0]))
        singles = singles - np.tensordot(exchange_diag, v_same, axes=([1], [0]))
        for p in occ_orbs[spin]:
            for a in virt_orbs[spin]:
                value = singles[p, a]
                if value == 0.0:
                    continue
                sign = _single_sign(occ, p + spin * m, a + spin * m)
                out.append((_moved(config, spin, p, a, m), sign * value))

    eri = hamiltonian.eri
    for spin in (ALPHA, BETA):
        orbs, virts = occ_orbs[spin], virt_orbs[spin]
        for ii in range(len(orbs)):
            for jj in range(ii + 1, len(orbs)):
                i, j = orbs[ii], orbs[jj]
                for aa in range(len(virts)):
                    for bb in range(aa + 1, len(virts)):
                        a, b = virts[aa], virts[bb]
                        value = eri[i, a, j, b] - eri[i, b, j, a]
                        if value == 0.0:
                            continue
                        g = spin * m
                        sign = _double_sign(occ, (i + g, j + g), _ordered(a + g, b + g))
                        out.append((_moved2(config, spin, i, j, a, b, m), sign * value))
    for i in occ_orbs[ALPHA]:
        for a in virt_orbs[ALPHA]:
            for j in occ_orbs[BETA]:
                for b in virt_orbs[BETA]:
                    value = eri[i, a, j, b]
                    if value == 0.0:
                        continue
                    sign = _double_sign(occ, (i, j + m), (a, b + m))
                    z = Configuration(
                        config.alpha ^ (1 << i) ^ (1 << a),
                        config.beta ^ (1 << j) ^ (1 << b),
                    )
                    out.append((z, sign * value))
    return out


def _ordered(a: int, b: int) -> tuple[int, int]:
    return (a, b) if a < b else (b, a)


def _moved(config: Configuration, spin: int, p: int, a: int, m: int) -> Configuration:
    if spin == ALPHA:
        return Configuration(config.alpha ^ (1 << p) ^ (1 << a), config.beta)
    return Configuration(config.alpha, config.beta ^ (1 << p) ^ (1 << a))


def _moved2(
    config: Configuration, spin: int, i: int, j: int, a: int, b: int, m: int
) -> Configuration:
    mask = (1 << i) ^ (1 << j) ^ (1 << a) ^ (1 << b)
    if spin == ALPHA:
        return Configuration(config.alpha ^ mask, config.beta)
    return Configuration(config.alpha, config.beta ^ mask)


# ---------------------------------------------------------------------------
# Projected operator P_B H P_B.
# ---------------------------------------------------------------------------


class SubspaceOperator:
    """Symmetric linear operator handle for the Hamiltonian projected on a basis.

    Materializes an explicit sparse matrix when the basis is small enough;
    otherwise matvecs regenerate rows on the fly. Row work is chunked and
    accumulated in fixed chunk order, so results are reproducible for a given
    chunk size regardless of worker count.
    """

    def __init__(
        self,
        hamiltonian: Hamiltonian,
        basis: SubspaceBasis,
        materialize_threshold: int = DEFAULT_MATERIALIZE_THRESHOLD,
        chunk: int = DEFAULT_ROW_CHUNK,
        workers: int = 1,
    ):
        if len(basis) == 0:
            raise ValueError("cannot project onto an empty basis")
        self.hamiltonian = hamiltonian
        self.basis = basis
        self.chunk = max(1, chunk)
        self.workers = max(1, workers)
        self._matrix: scipy.sparse.csr_matrix | None = None
        self._diagonal: np.ndarray | None = None
        if len(basis) <= materialize_threshold:
            self._matrix = self._build_matrix()

    @property
    def dimension(self) -> int:
        return len(self.basis)

    def _rows(self, lo: int, hi: int) -> tuple[list[int], list[int], list[float]]:
        rows: list[int] = []
        cols: list[int] = []
        vals: list[float] = []
        index = self.basis._index
        for i in range(lo, hi):
            for z, value in connected_configurations(
                self.hamiltonian, self.basis.configurations[i]
            ):
                j = index.get(z)
                if j is not None:
                    rows.append(i)
                    cols.append(j)
                    vals.append(value)
        return rows, cols, vals

    def _chunk_bounds(self) -> list[tuple[int, int]]:
        n = self.dimension
        return [(lo, min(lo + self.chunk, n)) for lo in range(0, n, self.chunk)]

    def _build_matrix(self) -> scipy.sparse.csr_matrix:
        bounds = self._chunk_bounds()
        if self.workers > 1 and len(bounds) > 1:
            with ThreadPoolExecutor(max_workers=self.workers) as pool:
                parts = list(pool.map(lambda b: self._rows(*b), bounds))
        else:
            parts = [self._rows(*b) for b in bounds]
        rows = [i for part in parts for i in part[0]]
        cols = [j for part in parts for j in part[1]]
        vals = [v for part in parts for v in part[2]]
        n = self.dimension
        return scipy.sparse.csr_matrix((vals, (rows, cols)), shape=(n, n))

    def diagonal(self) -> np.ndarray:
        if self._diagonal is None:
            if self._matrix is not None:
                self._diagonal = np.asarray(self._matrix.diagonal())
            else:
                self._diagonal = np.array(
                    [diagonal_element(self.hamiltonian, c) for c in self.basis]
                )
        return self._diagonal

    def matvec(self, vector: np.ndarray) -> np.ndarray:
        return self.matmat(np.asarray(vector, dtype=float).reshape(-1, 1))[:, 0]

    def matmat(self, block: np.ndarray) -> np.ndarray:
        block = np.asarray(block, dtype=float)
        if block.shape[0] != self.dimension:
            raise ValueError(f"operand has {block.shape[0]} rows, operator dimension is {self.dimension}")
        if self._matrix is not None:
            return np.asarray(self._matrix @ block)
        out = np.zeros_like(block)
        bounds = self._chunk_bounds()

        def run(bound: tuple[int, int]) -> tuple[int, int, np.ndarray]:
            rows, cols, vals = self._rows(*bound)
            part = np.zeros((bound[1] - bound[0], block.shape[1]))
            for r, c, v in zip(rows, cols, vals):
                part[r - bound[0]] += v * block[c]
            return bound[0], bound[1], part

        if self.workers > 1 and len(bounds) > 1:
            with ThreadPoolExecutor(max_workers=self.workers) as pool:
                parts = list(pool.map(run, bounds))
        else:
            parts = [run(b) for b in bounds]
        for lo, hi, part in parts:  # fixed chunk order
            out[lo:hi] = part
        return out

    def to_matrix(self) -> np.ndarray:
        if self._matrix is not None:
            return self._matrix.toarray()
        return self.matmat(np.eye(self.dimension))


def build_subspace_operator(
    hamiltonian: Hamiltonian,
    basis: SubspaceBasis,
    materialize_threshold: int = DEFAULT_MATERIALIZE_THRESHOLD,
    chunk: int = DEFAULT_ROW_CHUNK,
    workers: int = 1,
) -> SubspaceOperator:
    """Projected-Hamiltonian handle over a nonempty single-sector basis."""
    weights = {hamming_weights(c) for c in basis}
    if len(weights) > 1:
        raise SectorError(f"basis spans several sectors: {sorted(weights)}")
    return SubspaceOperator(hamiltonian, basis, materialize_threshold, chunk, workers)


# ---------------------------------------------------------------------------
# Generic operator application on sparse states.
# ---------------------------------------------------------------------------


def apply_operator(
    terms: Sequence[tuple[float, ExcitationOperator]],
    state: SparseState,
) -> SparseState:
    """Exact sparse application of a weighted sum of ladder products.

    Every term must conserve total particle number and shift (N_alpha,
    N_beta) by the same amount; spin-flip terms such as S+/- are allowed.
    If the shifted sector is invalid (an electron count would leave
    [0, M]) the result is necessarily the zero state and is returned tagged
    with the input sector.
    """
    sector = state.sector
    m = sector.m
    if not terms:
        return SparseState({}, sector)
    delta = _spin_delta(terms[0][1])
    for _, op in terms[1:]:
        if _spin_delta(op) != delta:
            raise MalformedOperatorError(
                "all terms of one operator must shift (N_alpha, N_beta) identically"
            )
    n_alpha = sector.n_alpha + delta[0]
    n_beta = sector.n_beta + delta[1]
    if not (0 <= n_alpha <= m and 0 <= n_beta <= m):
        return SparseState({}, sector)
    out_sector = Sector(m, n_alpha, n_beta)
    acc: dict[Configuration, float] = {}
    for coeff, op in terms:
        if coeff == 0.0:
            continue
        for config, amp in state.entries.items():
            gamma, z = apply_excitation(op, config, m)
            if gamma:
                acc[z] = acc.get(z, 0.0) + coeff * gamma * amp
    entries = {c: a for c, a in acc.items() if abs(a) > PRUNE_TOLERANCE}
    return SparseState(entries, out_sector)


def _spin_delta(op: ExcitationOperator) -> tuple[int, int]:
    da = sum(1 for _, s in op.creates if s == ALPHA) - sum(
        1 for _, s in op.annihilates if s == ALPHA
    )
    db = sum(1 for _, s in op.creates if s == BETA) - sum(
        1 for _, s in op.annihilates if s == BETA
    )
    return da, db


def hamiltonian_terms(
    hamiltonian: Hamiltonian, cutoff: float = 0.0
) -> list[tuple[float, ExcitationOperator]]:
    """The Hamiltonian as explicit weighted ladder products (term expansion)."""
    m = hamiltonian.m
    terms: list[tuple[float, ExcitationOperator]] = []
    if hamiltonian.e0 != 0.0:
        terms.append((hamiltonian.e0, ExcitationOperator((), ())))
    for p in range(m):
        for r in range(m):
            value = hamiltonian.h[p, r]
            if abs(value) <= cutoff:
                continue
            for s in (ALPHA, BETA):
                terms.append((value, ExcitationOperator(((p, s),), ((r, s),))))
    for p in range(m):
        for r in range(m):
            for q in range(m):
                for s_orb in range(m):
                    value = 0.5 * hamiltonian.eri[p, r, q, s_orb]
                    if abs(value) <= cutoff:
                        continue
                    for s1 in (ALPHA, BETA):
                        for s2 in (ALPHA, BETA):
                            if (p, s1) == (q, s2) or (s_orb, s2) == (r, s1):
                                continue  # a'a' or aa on one mode vanishes
                            terms.append(
                                (
                                    value,
                                    ExcitationOperator(
                                        ((p, s1), (q, s2)), ((s_orb, s2), (r, s1))
                                    ),
                                )
                            )
    return terms
