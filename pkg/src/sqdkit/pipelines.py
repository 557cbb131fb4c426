"""End-to-end subspace diagonalization methods.

Three routes to eigenstates over sampled configuration subspaces:

* ``run_sqd``: recovery loop + batched projected diagonalization, keeping
  the batch whose ground eigenvalue is lowest, with multiple roots per batch.
* ``run_ext_sqd``: amplitude cut of the best state, extension of its basis by
  excitation-operator images, then one more diagonalization in the extended
  space (coefficients fully free).
* ``run_qse``: generalized eigenproblem over the operator span
  {E_I |Phi0>}, assembled exactly with sparse algebra and regularized
  against overlap ill-conditioning.
"""

from __future__ import annotations

import itertools
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Iterable

import numpy as np

from .configurations import (
    ALPHA,
    BETA,
    Configuration,
    ExcitationOperator,
    IDENTITY,
    Sector,
    SubspaceBasis,
    apply_excitation,
    in_sector,
    reference_configuration,
    spin_inversion_closure,
)
from .eigensolver import EigResult, davidson, generalized_eig
from .hamiltonian import (
    Hamiltonian,
    SparseState,
    apply_operator,
    build_subspace_operator,
)
from .sampling import (
    RecoveryModel,
    SampleSet,
    make_batches,
    recover_configurations,
    sample_state,
    update_model,
)

DEFAULT_CUT_THRESHOLD = 1e-3
DEFAULT_EXTEND_CHUNK = 4096
DEFAULT_ROOT_BUFFER = 3


class PipelineError(RuntimeError):
    """Unusable intermediate pipeline state."""


@dataclass
class CIState:
    """Basis, coefficient columns, and energies of a subspace diagonalization."""

    basis: SubspaceBasis
    coefficients: np.ndarray  # (len(basis), n_roots)
    energies: np.ndarray  # ascending
    sector: Sector
    method: str = "sqd"
    converged: bool = True

    def __post_init__(self) -> None:
        self.coefficients = np.asarray(self.coefficients, dtype=float)
        self.energies = np.asarray(self.energies, dtype=float)
        if self.coefficients.ndim == 1:
            self.coefficients = self.coefficients[:, None]
        if self.coefficients.shape != (len(self.basis), len(self.energies)):
            raise ValueError(
                f"coefficient shape {self.coefficients.shape} inconsistent with "
                f"{len(self.basis)} configurations and {len(self.energies)} roots"
            )

    @property
    def n_roots(self) -> int:
        return len(self.energies)

    @property
    def dimension(self) -> int:
        return len(self.basis)

    def column_state(self, root: int = 0) -> SparseState:
        return SparseState.from_items(
            zip(self.basis, self.coefficients[:, root]), self.sector
        )


@dataclass(frozen=True)
class GeneratorProvenance:
    reference: Configuration
    ranks: tuple[int, ...]
    window: tuple[int, int] | None


@dataclass(frozen=True)
class GeneratorSet:
    """Deduplicated excitation operators plus where they came from."""

    operators: tuple[ExcitationOperator, ...]
    provenance: GeneratorProvenance

    def __post_init__(self) -> None:
        if len(set(self.operators)) != len(self.operators):
            raise ValueError("generator set contains duplicate operators")
        for op in self.operators:
            if not op.spin_preserving:
                raise ValueError(f"generator {op} does not preserve spin")

    def __len__(self) -> int:
        return len(self.operators)

    @property
    def counts(self) -> dict[int, int]:
        """Operators per rank, e.g. {1: n_s, 2: n_d, 3: n_t}."""
        out: dict[int, int] = {}
        for op in self.operators:
            out[op.rank] = out.get(op.rank, 0) + 1
        return out


def make_generators(
    sector: Sector,
    reference: Configuration,
    ranks: Iterable[int],
    window: tuple[int, int] | None = None,
) -> GeneratorSet:
    """Spin-preserving occupied-to-virtual excitations off a reference state.

    Ranks are drawn from {1, 2, 3}; the identity is always prepended so the
    set is directly usable for subspace expansion. ``window = (lo, hi)``
    restricts both occupied and virtual orbitals to lo <= p < hi.
    """
    ranks = tuple(sorted(set(int(r) for r in ranks)))
    if any(r not in (1, 2, 3) for r in ranks):
        raise ValueError(f"ranks must be within {{1, 2, 3}}, got {ranks}")
    if not in_sector(reference, sector):
        raise ValueError("reference configuration is outside the sector")
    lo, hi = window if window is not None else (0, sector.m)
    if not 0 <= lo < hi <= sector.m:
        raise ValueError(f"orbital window {window} outside 0..{sector.m}")

    occ = {
        ALPHA: [p for p in range(lo, hi) if reference.alpha >> p & 1],
        BETA: [p for p in range(lo, hi) if reference.beta >> p & 1],
    }
    virt = {
        ALPHA: [p for p in range(lo, hi) if not reference.alpha >> p & 1],
        BETA: [p for p in range(lo, hi) if not reference.beta >> p & 1],
    }

    operators: list[ExcitationOperator] = [IDENTITY]
    for rank in ranks:
        made = _rank_operators(rank, occ, virt)
        if not made:
            raise ValueError(
                f"no rank-{rank} occupied-to-virtual excitations exist in the window"
            )
        operators.extend(made)
    return GeneratorSet(
        tuple(operators),
        GeneratorProvenance(reference, ranks, window),
    )


def _rank_operators(
    rank: int, occ: dict[int, list[int]], virt: dict[int, list[int]]
) -> list[ExcitationOperator]:
    ops = []
    for spins in itertools.combinations_with_replacement((ALPHA, BETA), rank):
        by_spin: dict[int, int] = {}
        for s in spins:
            by_spin[s] = by_spin.get(s, 0) + 1
        occ_choices = [
            list(itertools.combinations(occ[s], k)) for s, k in sorted(by_spin.items())
        ]
        virt_choices = [
            list(itertools.combinations(virt[s], k)) for s, k in sorted(by_spin.items())
        ]
        spin_order = sorted(by_spin)
        for occ_pick in itertools.product(*occ_choices):
            for virt_pick in itertools.product(*virt_choices):
                annihilates = tuple(
                    (p, s) for s, orbs in zip(spin_order, occ_pick) for p in orbs
                )
                creates = tuple(
                    (p, s) for s, orbs in zip(spin_order, virt_pick) for p in orbs
                )
                ops.append(ExcitationOperator(creates, annihilates))
    return ops


def extension_bound(seed_size: int, sector: Sector) -> int:
    """The product-form extended-dimension bound quoted for SD extensions.

    Loose as a diagnostic only: singles and same-spin doubles can exceed it.
    """
    return seed_size * (
        sector.n_alpha * (sector.m - sector.n_alpha) * sector.n_beta * (sector.m - sector.n_beta)
    ) + seed_size


# ---------------------------------------------------------------------------
# Subspace solves.
# ---------------------------------------------------------------------------


@dataclass
class SolveSettings:
    """Knobs shared by every projected diagonalization in the pipelines."""

    n_roots: int = 3
    root_buffer: int = DEFAULT_ROOT_BUFFER
    tol: float = 1e-8
    max_iter: int = 200
    dense_cutoff: int = 2000
    materialize_threshold: int = 20_000
    chunk: int = DEFAULT_EXTEND_CHUNK
    workers: int = 1


def solve_subspace(
    hamiltonian: Hamiltonian,
    basis: SubspaceBasis,
    sector: Sector,
    settings: SolveSettings,
    method: str = "sqd",
) -> tuple[CIState, EigResult]:
    """Diagonalize P_B H P_B for min(n_roots, |B|) roots (buffered internally)."""
    op = build_subspace_operator(
        hamiltonian,
        basis,
        materialize_threshold=settings.materialize_threshold,
        chunk=settings.chunk,
        workers=settings.workers,
    )
    reported = min(settings.n_roots, op.dimension)
    solve_for = min(reported + settings.root_buffer, op.dimension)
    result = davidson(
        op,
        solve_for,
        tol=settings.tol,
        max_iter=settings.max_iter,
        dense_cutoff=settings.dense_cutoff,
    )
    state = CIState(
        basis=basis,
        coefficients=result.eigenvectors[:, :reported],
        energies=result.eigenvalues[:reported],
        sector=sector,
        method=method,
        converged=bool(np.all(result.converged[:reported])),
    )
    return state, result


# ---------------------------------------------------------------------------
# SQD.
# ---------------------------------------------------------------------------


@dataclass
class IterationTrace:
    iteration: int
    batch_energies: list[float]  # ground eigenvalue per batch
    batch_dimensions: list[int]
    chosen_batch: int
    recovered_total: int
    recovered_distinct: int


@dataclass
class SqdDiagnostics:
    traces: list[IterationTrace] = field(default_factory=list)
    unconverged_roots: int = 0

    @property
    def energy_trace(self) -> list[float]:
        return [min(t.batch_energies) for t in self.traces]

    @property
    def dimension_trace(self) -> list[int]:
        return [t.batch_dimensions[t.chosen_batch] for t in self.traces]


def run_sqd(
    hamiltonian: Hamiltonian,
    samples: SampleSet,
    sector: Sector,
    k: int,
    batch_size: int,
    score_iters: int,
    n_roots: int,
    seed: int,
    settings: SolveSettings | None = None,
    reference: Configuration | None = None,
    augment: int | None = None,
    weighted: bool = True,
    close_spin: bool = True,
) -> tuple[CIState, SqdDiagnostics]:
    """Recovery loop with batched diagonalization; the lowest batch wins.

    Runs ``score_iters`` recovery refinements on top of one initial round
    (round 0 repairs with the reference-occupancy model). Each round:
    repair, optionally augment with draws from the current best state, form
    K closed batches, diagonalize each for ``n_roots``, keep the batch with
    the lowest ground eigenvalue, and refresh the occupancy model from it.
    """
    if score_iters < 0:
        raise ValueError("score_iters must be nonnegative")
    if settings is None:
        settings = SolveSettings(n_roots=n_roots)
    else:
        settings.n_roots = n_roots
    if reference is None:
        reference = reference_configuration(sector)
    model = RecoveryModel.from_reference(reference, sector.m)
    if augment is None:
        augment = max(1, samples.total // 10)

    diagnostics = SqdDiagnostics()
    best_state: CIState | None = None
    for iteration in range(score_iters + 1):
        recovered = recover_configurations(samples, model, sector, seed + iteration)
        if best_state is not None and augment > 0:
            extra = sample_state(
                best_state.column_state(0).normalized(), augment, 0.0, seed + 7919 + iteration
            )
            recovered = recovered.merged_with(extra)
        if recovered.n_distinct == 0:
            raise PipelineError("configuration recovery produced an empty set")
        batches = make_batches(
            recovered,
            k,
            batch_size,
            seed + 104729 + iteration,
            reference=reference,
            weighted=weighted,
            close_spin=close_spin,
            sector=sector,
        )

        def solve(batch: SubspaceBasis) -> tuple[CIState, EigResult]:
            return solve_subspace(hamiltonian, batch, sector, settings, method="sqd")

        if settings.workers > 1 and len(batches) > 1:
            with ThreadPoolExecutor(max_workers=settings.workers) as pool:
                solved = list(pool.map(solve, batches))
        else:
            solved = [solve(batch) for batch in batches]

        grounds = [float(state.energies[0]) for state, _ in solved]
        chosen = int(np.argmin(grounds))
        best_state, best_result = solved[chosen]
        diagnostics.traces.append(
            IterationTrace(
                iteration=iteration,
                batch_energies=grounds,
                batch_dimensions=[state.dimension for state, _ in solved],
                chosen_batch=chosen,
                recovered_total=recovered.total,
                recovered_distinct=recovered.n_distinct,
            )
        )
        diagnostics.unconverged_roots = int(np.count_nonzero(~best_result.converged))
        model = update_model(best_state.basis, best_state.coefficients[:, 0], sector)
    assert best_state is not None
    return best_state, diagnostics


# ---------------------------------------------------------------------------
# Ext-SQD.
# ---------------------------------------------------------------------------


def cut_state(
    state: CIState, threshold: float, close_spin: bool = True
) -> SubspaceBasis:
    """Configurations whose ground-column amplitude reaches the threshold.

    The cut applies to the ground column only (excited SQD columns are the
    biased quantities), and the survivors are re-closed under spin
    inversion for symmetric sectors.
    """
    if threshold < 0:
        raise ValueError("cut threshold must be nonnegative")
    ground = state.coefficients[:, 0]
    kept = [c for c, a in zip(state.basis, ground) if abs(a) >= threshold]
    if not kept:
        raise PipelineError(
            f"threshold {threshold} removed every configuration "
            f"(max amplitude {np.max(np.abs(ground)):.3e})"
        )
    if close_spin and state.sector.n_alpha == state.sector.n_beta:
        return spin_inversion_closure(kept)
    return SubspaceBasis(kept)


@dataclass
class ExtensionTallies:
    """Outcome counts of applying every generator to every seed configuration."""

    new_unique: int = 0
    annihilated: int = 0
    duplicate_new: int = 0
    already_present: int = 0
    product_bound: int = 0  # product-form diagnostic, see extension_bound

    @property
    def total(self) -> int:
        return self.new_unique + self.annihilated + self.duplicate_new + self.already_present


def extend_subspace(
    seed_basis: SubspaceBasis,
    generators: GeneratorSet,
    sector: Sector,
    chunk: int = DEFAULT_EXTEND_CHUNK,
    workers: int = 1,
    close_spin: bool = True,
) -> tuple[SubspaceBasis, ExtensionTallies]:
    """S_E = seed plus every nonvanishing generator image of a seed member.

    Seeds are processed in canonical order in chunks of ``chunk``; image
    generation within a chunk may run in parallel, while classification and
    merging stay serialized in chunk order, so the tallies are reproducible.
    Tallies sum to |seed| * |generators|.
    """
    if len(seed_basis) == 0:
        raise PipelineError("cannot extend an empty seed basis")
    chunk = max(1, chunk)
    m = sector.m
    ops = generators.operators
    tallies = ExtensionTallies(product_bound=extension_bound(len(seed_basis), sector))
    seen: set[Configuration] = set(seed_basis.configurations)
    new_configs: list[Configuration] = []

    seeds = seed_basis.configurations
    bounds = [(lo, min(lo + chunk, len(seeds))) for lo in range(0, len(seeds), chunk)]

    def apply_chunk(bound: tuple[int, int]) -> list[list[Configuration | None]]:
        lo, hi = bound
        out = []
        for y in seeds[lo:hi]:
            images: list[Configuration | None] = []
            for op in ops:
                gamma, z = apply_excitation(op, y, m)
                images.append(z if gamma else None)
            out.append(images)
        return out

    if workers > 1 and len(bounds) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            chunk_results = list(pool.map(apply_chunk, bounds))
    else:
        chunk_results = [apply_chunk(b) for b in bounds]

    in_seed = seed_basis._index
    for images_per_seed in chunk_results:  # serial merge, fixed order
        for images in images_per_seed:
            for z in images:
                if z is None:
                    tallies.annihilated += 1
                elif z in in_seed:
                    tallies.already_present += 1
                elif z in seen:
                    tallies.duplicate_new += 1
                else:
                    tallies.new_unique += 1
                    seen.add(z)
                    new_configs.append(z)

    members = list(seeds) + new_configs
    if close_spin and sector.n_alpha == sector.n_beta:
        extended = spin_inversion_closure(members)
    else:
        extended = SubspaceBasis(members)
    assert len(extended) <= 2 * len(seed_basis) * (len(ops) + 1)
    return extended, tallies


def run_ext_sqd(
    hamiltonian: Hamiltonian,
    sqd_state: CIState,
    generators: GeneratorSet,
    threshold: float = DEFAULT_CUT_THRESHOLD,
    n_roots: int = 3,
    settings: SolveSettings | None = None,
    close_spin: bool = True,
) -> tuple[CIState, ExtensionTallies]:
    """Cut, extend, re-diagonalize: the extended-subspace eigenstates."""
    if settings is None:
        settings = SolveSettings(n_roots=n_roots)
    else:
        settings.n_roots = n_roots
    seed = cut_state(sqd_state, threshold, close_spin=close_spin)
    extended, tallies = extend_subspace(
        seed,
        generators,
        sqd_state.sector,
        chunk=settings.chunk,
        workers=settings.workers,
        close_spin=close_spin,
    )
    state, _ = solve_subspace(
        hamiltonian, extended, sqd_state.sector, settings, method="ext-sqd"
    )
    return state, tallies


# ---------------------------------------------------------------------------
# QSE.
# ---------------------------------------------------------------------------


@dataclass
class QseResult:
    """Eigenpairs in the excitation-operator basis {E_I |Phi0>}."""

    energies: np.ndarray
    coefficients: np.ndarray  # (len(operators), n_roots), S-orthonormal columns
    operators: tuple[ExcitationOperator, ...]
    kept_dimension: int
    method: str = "qse"

    @property
    def n_roots(self) -> int:
        return len(self.energies)


def run_qse(
    hamiltonian: Hamiltonian,
    sqd_state: CIState,
    generators: GeneratorSet,
    tau: float = 1e-8,
    n_roots: int = 3,
    settings: SolveSettings | None = None,
) -> QseResult:
    """Generalized eigenproblem over M_IJ = <Phi0|E_I' H E_J|Phi0>.

    Every E_J |Phi0> is formed exactly as a sparse state; the Hamiltonian is
    contracted through the union of their supports (bra and ket supports
    both live there, so the projected action is exact). No density-matrix
    intermediates.
    """
    if settings is None:
        settings = SolveSettings(n_roots=n_roots)
    if IDENTITY not in generators.operators:
        raise ValueError("QSE requires the identity in the operator set")
    ground = sqd_state.column_state(0).normalized()
    images = [
        apply_operator([(1.0, op)], ground) for op in generators.operators
    ]
    union = SubspaceBasis(
        itertools.chain.from_iterable(img.entries.keys() for img in images)
    )
    if len(union) == 0:
        raise PipelineError("every operator image vanished")
    u = np.zeros((len(union), len(images)))
    for col, img in enumerate(images):
        for config, amp in img.entries.items():
            u[union.index_of(config), col] = amp
    op = build_subspace_operator(
        hamiltonian,
        union,
        materialize_threshold=settings.materialize_threshold,
        chunk=settings.chunk,
        workers=settings.workers,
    )
    hu = op.matmat(u)
    mmat = u.T @ hu
    mmat = 0.5 * (mmat + mmat.T)
    smat = u.T @ u
    smat = 0.5 * (smat + smat.T)
    result, kept = generalized_eig(mmat, smat, tau)
    reported = min(n_roots, kept)
    return QseResult(
        energies=result.eigenvalues[:reported],
        coefficients=result.eigenvectors[:, :reported],
        operators=generators.operators,
        kept_dimension=kept,
    )
