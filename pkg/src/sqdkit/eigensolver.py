"""Multi-root symmetric eigensolvers.

``davidson`` runs a diagonal-preconditioned block Davidson iteration with
root locking and restarts, falling back to a dense solve below a dimension
cutoff. ``generalized_eig`` solves M d = S d eps via canonical
orthogonalization of the overlap with a relative discard threshold, the
standard remedy for ill-conditioned subspace-expansion overlaps.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg
import scipy.sparse

DEFAULT_TOLERANCE = 1e-8
DEFAULT_MAX_ITER = 200
DENSE_CUTOFF = 2000
DEFAULT_OVERLAP_TAU = 1e-8


class EigensolverError(RuntimeError):
    """Unrecoverable eigensolver failure."""


class OverlapError(ValueError):
    """Overlap matrix is not positive semidefinite within tolerance."""


@dataclass
class EigResult:
    """Eigenpairs in ascending order plus per-root convergence diagnostics."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray  # column k belongs to eigenvalues[k]
    residual_norms: np.ndarray
    converged: np.ndarray
    iterations: int

    @property
    def all_converged(self) -> bool:
        return bool(np.all(self.converged))


class _OperatorAdapter:
    """Uniform (dimension, diagonal, matmat) facade over matrix-like inputs."""

    def __init__(self, op):
        if isinstance(op, np.ndarray):
            self.dimension = op.shape[0]
            self.diagonal = lambda: np.diag(op).copy()
            self.matmat = lambda block: op @ block
            self.to_matrix = lambda: op
        elif scipy.sparse.issparse(op):
            op = op.tocsr()
            self.dimension = op.shape[0]
            self.diagonal = lambda: np.asarray(op.diagonal())
            self.matmat = lambda block: np.asarray(op @ block)
            self.to_matrix = lambda: op.toarray()
        else:
            self.dimension = op.dimension
            self.diagonal = op.diagonal
            self.matmat = op.matmat
            self.to_matrix = getattr(op, "to_matrix", None) or (
                lambda: op.matmat(np.eye(op.dimension))
            )


def davidson(
    op,
    n_roots: int,
    guess: np.ndarray | None = None,
    tol: float = DEFAULT_TOLERANCE,
    max_iter: int = DEFAULT_MAX_ITER,
    dense_cutoff: int = DENSE_CUTOFF,
) -> EigResult:
    """Lowest ``n_roots`` eigenpairs of a symmetric operator.

    ``op`` may be a dense array, a scipy sparse matrix, or any handle with
    ``dimension``, ``diagonal()`` and ``matmat(block)``. Problems of
    dimension <= ``dense_cutoff`` are solved densely. Non-convergence after
    ``max_iter`` outer iterations returns the best available eigenpairs with
    the unconverged roots flagged (not an exception).
    """
    if tol <= 0:
        raise ValueError("residual tolerance must be positive")
    adapter = _OperatorAdapter(op)
    n = adapter.dimension
    if n_roots < 1 or n_roots > n:
        raise EigensolverError(f"requested {n_roots} roots of a dimension-{n} operator")
    if n <= dense_cutoff:
        return _dense_solve(adapter, n_roots)

    diag = adapter.diagonal()
    block = min(n, n_roots + 2)
    if guess is not None:
        v = np.asarray(guess, dtype=float).reshape(n, -1)
    else:
        v = np.zeros((n, block))
        for col, row in enumerate(np.argsort(diag)[:block]):
            v[row, col] = 1.0
    v = _orthonormalize(v)
    w = adapter.matmat(v)
    max_subspace = max(8 * n_roots, v.shape[1] + 2)

    theta = np.zeros(n_roots)
    x = v[:, :n_roots].copy()
    res_norms = np.full(n_roots, np.inf)
    stagnant = 0
    for iteration in range(1, max_iter + 1):
        rayleigh = v.T @ w
        rayleigh = 0.5 * (rayleigh + rayleigh.T)
        evals, evecs = scipy.linalg.eigh(rayleigh)
        theta = evals[:n_roots]
        x = v @ evecs[:, :n_roots]
        wx = w @ evecs[:, :n_roots]
        residuals = wx - x * theta
        res_norms = np.linalg.norm(residuals, axis=0)
        converged = res_norms < tol
        if converged.all():
            return EigResult(theta, x, res_norms, converged, iteration)

        new_dirs = []
        for k in range(n_roots):
            if converged[k]:
                continue  # locked root: no further expansion for it
            denom = theta[k] - diag
            denom = np.where(np.abs(denom) < 1e-10, np.copysign(1e-10, denom + 1e-300), denom)
            t = residuals[:, k] / denom
            t -= v @ (v.T @ t)
            t -= v @ (v.T @ t)
            norm = np.linalg.norm(t)
            if norm > 1e-13:
                new_dirs.append(t / norm)

        restart = bool(new_dirs) and v.shape[1] + len(new_dirs) > max_subspace
        if not new_dirs:
            # Krylov space numerically invariant; collapse once and retry
            stagnant += 1
            if stagnant > 1:
                return EigResult(theta, x, res_norms, converged, iteration)
            restart = True
        else:
            stagnant = 0
        if restart:
            blocks = [x] + ([np.column_stack(new_dirs)] if new_dirs else [residuals])
            v = _orthonormalize(np.hstack(blocks))
            w = adapter.matmat(v)
        else:
            t_block = _orthonormalize_against(np.column_stack(new_dirs), v)
            if t_block.shape[1] == 0:
                return EigResult(theta, x, res_norms, converged, iteration)
            v = np.hstack([v, t_block])
            w = np.hstack([w, adapter.matmat(t_block)])

    converged = res_norms < tol
    return EigResult(theta, x, res_norms, converged, max_iter)


def _dense_solve(adapter: _OperatorAdapter, n_roots: int) -> EigResult:
    matrix = np.asarray(adapter.to_matrix(), dtype=float)
    matrix = 0.5 * (matrix + matrix.T)
    evals, evecs = scipy.linalg.eigh(matrix)
    theta = evals[:n_roots]
    x = evecs[:, :n_roots]
    residuals = matrix @ x - x * theta
    res_norms = np.linalg.norm(residuals, axis=0)
    return EigResult(theta, x, res_norms, np.ones(n_roots, dtype=bool), 0)


def _orthonormalize(block: np.ndarray) -> np.ndarray:
    q, r = np.linalg.qr(block)
    keep = np.abs(np.diag(r)) > 1e-12
    return q[:, keep]


def _orthonormalize_against(block: np.ndarray, basis: np.ndarray) -> np.ndarray:
    block = block - basis @ (basis.T @ block)
    block = block - basis @ (basis.T @ block)
    cols = []
    for k in range(block.shape[1]):
        col = block[:, k]
        if cols:
            stacked = np.column_stack(cols)
            col = col - stacked @ (stacked.T @ col)
        norm = np.linalg.norm(col)
        if norm > 1e-10:
            cols.append(col / norm)
    if not cols:
        return np.zeros((block.shape[0], 0))
    return np.column_stack(cols)


def generalized_eig(
    mmat: np.ndarray,
    smat: np.ndarray,
    tau: float = DEFAULT_OVERLAP_TAU,
) -> tuple[EigResult, int]:
    """Solve M d = S d eps with canonical orthogonalization of S.

    The pencil is first normalized by the diagonal of S (so the discard
    threshold is invariant under diagonal congruence scaling), then overlap
    modes below ``tau`` times the largest overlap eigenvalue are dropped.
    Returns the eigenresult (eigenvectors back-transformed to the original
    basis, S-orthonormal) and the kept subspace dimension.
    """
    mmat = np.asarray(mmat, dtype=float)
    smat = np.asarray(smat, dtype=float)
    if mmat.shape != smat.shape or mmat.ndim != 2 or mmat.shape[0] != mmat.shape[1]:
        raise ValueError("M and S must be square matrices of equal dimension")
    if not 0 < tau < 1:
        raise ValueError(f"discard threshold must lie in (0, 1), got {tau}")
    s_diag = np.diag(smat).copy()
    scale = np.where(s_diag > 0, 1.0 / np.sqrt(np.where(s_diag > 0, s_diag, 1.0)), 1.0)
    s_norm = scale[:, None] * smat * scale[None, :]
    m_norm = scale[:, None] * mmat * scale[None, :]
    s_evals, s_evecs = scipy.linalg.eigh(0.5 * (s_norm + s_norm.T))
    s_max = s_evals[-1]
    if s_max <= 0:
        raise OverlapError("overlap matrix has no positive modes")
    if s_evals[0] < -tau * s_max:
        raise OverlapError(
            f"overlap eigenvalue {s_evals[0]:.3e} below -tau*max = {-tau * s_max:.3e}"
        )
    keep = s_evals >= tau * s_max
    kept = int(np.count_nonzero(keep))
    transform = s_evecs[:, keep] / np.sqrt(s_evals[keep])
    reduced = transform.T @ (0.5 * (m_norm + m_norm.T)) @ transform
    reduced = 0.5 * (reduced + reduced.T)
    evals, evecs = scipy.linalg.eigh(reduced)
    vectors = scale[:, None] * (transform @ evecs)
    residual = mmat @ vectors - smat @ vectors * evals
    res_norms = np.linalg.norm(residual, axis=0)
    result = EigResult(evals, vectors, res_norms, np.ones(kept, dtype=bool), 0)
    return result, kept
