"""GGM of arbitrary pure Fock states.

The GGM is one minus the largest Schmidt coefficient over all mode
bipartitions. The default route extracts the top eigenvalue of each reduced
density matrix by power iteration; :func:`schmidt_spectrum` computes the
full Schmidt spectrum by SVD and serves as an independent check.
"""

from __future__ import annotations

import numpy as np
import scipy.sparse as sp
from scipy.sparse.csgraph import connected_components
from scipy.sparse.linalg import ArpackNoConvergence, LinearOperator, eigsh

from .bipartition import GgmResult, ModeBipartition, canonical_bipartitions
from .errors import CapacityError, NumericalError
from .fock import FockState, ReducedDensityMatrix, coefficient_matrix

SMALL_DIM = 64
POWER_TOL = 1e-12
POWER_MAX_ITER = 100_000
# iterations after which convergence counts as slow
SLOW_ITER = 5_000
RESIDUAL_TOL = 1e-7
SVD_BLOCK_CAP = 4_000


def _power_iteration(matvec, v0, tol=POWER_TOL, max_iter=POWER_MAX_ITER):
    """Dominant eigenvalue of a Hermitian PSD operator.

    Converged means the Rayleigh quotient moved by less than ``tol`` and the
    residual ``|A v - lam v|`` is below ``RESIDUAL_TOL * lam``.

    Returns ``(lam, residual, iterations, converged)``.
    """
    v = v0 / np.linalg.norm(v0)
    lam_prev = -np.inf
    w = matvec(v)
    for it in range(1, max_iter + 1):
        lam = float(np.real(np.vdot(v, w)))
        nw = np.linalg.norm(w)
        if nw == 0:
            return 0.0, 0.0, it, True
        if abs(lam - lam_prev) < tol:
            # a small increment alone can be a slow crawl; insist on the residual
            res = float(np.linalg.norm(w - lam * v))
            if res < RESIDUAL_TOL * lam:
                return lam, res, it, True
        if it >= SLOW_ITER:
            return lam, float(np.linalg.norm(w - lam * v)), it, False
        lam_prev = lam
        v = w / nw
        w = matvec(v)
    return lam, float(np.linalg.norm(w - lam * v)), max_iter, False


def _top_eigenvalue(matvec, dim, diag, dense=None):
    if dim <= SMALL_DIM:
        mat = dense() if dense is not None else None
        if mat is not None:
            return float(np.linalg.eigvalsh(mat)[-1])
    rng = np.random.default_rng(0)
    v0 = np.asarray(diag, dtype=complex) + 1e-3 * rng.standard_normal(dim)
    lam, res, it, ok = _power_iteration(matvec, v0)
    if ok:
        return lam
    op = LinearOperator((dim, dim), matvec=matvec, dtype=complex)
    try:
        w = eigsh(op, k=1, which="LA", tol=1e-14, return_eigenvectors=False)
    except ArpackNoConvergence as exc:
        raise NumericalError(
            f"power iteration stalled after {it} iterations (residual {res:.2e}) and "
            f"the Lanczos fallback did not converge"
        ) from exc
    return float(w[-1])


def max_eigenvalue_rdm(rdm: ReducedDensityMatrix | np.ndarray | sp.spmatrix) -> float:
    """Largest eigenvalue of a reduced density matrix.

    Dimensions up to 64 are solved exactly; larger matrices go through power
    iteration (increment tolerance 1e-12), falling back to Lanczos when the
    iteration is slow or its relative residual stays above 1e-7.
    """
    mat = rdm.matrix if isinstance(rdm, ReducedDensityMatrix) else rdm
    if not sp.issparse(mat):
        mat = np.asarray(mat)
    dim = mat.shape[0]
    dense = (lambda: mat.toarray()) if sp.issparse(mat) else (lambda: mat)
    diag = np.real(mat.diagonal())
    return _top_eigenvalue(lambda v: mat @ v, dim, diag, dense)


def _psi_for(state: FockState, part: ModeBipartition):
    _, _, psi = coefficient_matrix(state, part.side_a)
    # work on the smaller side of the Schmidt decomposition
    if psi.shape[0] > psi.shape[1]:
        psi = psi.conj().T.tocsr()
    return psi


def max_schmidt_coefficient(state: FockState, part: ModeBipartition) -> float:
    """Largest Schmidt coefficient across ``part``, via power iteration."""
    psi = _psi_for(state, part)
    psi_h = psi.conj().T.tocsr()
    dim = psi.shape[0]
    diag = np.asarray(abs(psi).power(2).sum(axis=1)).ravel()

    def dense():
        return (psi @ psi_h).toarray()

    return _top_eigenvalue(lambda v: psi @ (psi_h @ v), dim, diag, dense)


def schmidt_spectrum(state: FockState, split: ModeBipartition | tuple) -> np.ndarray:
    """All Schmidt coefficients across ``split``, descending.

    The amplitude matrix is split into the connected components of its
    row/column incidence graph (conservation laws make these small) and
    each block is diagonalised by SVD.
    """
    side = split.side_a if isinstance(split, ModeBipartition) else tuple(split)
    _, _, psi = coefficient_matrix(state, side)
    psi = psi.tocoo()
    n_a, n_b = psi.shape
    graph = sp.coo_matrix(
        (np.ones(psi.nnz), (psi.row, n_a + psi.col)), shape=(n_a + n_b, n_a + n_b)
    )
    n_comp, label = connected_components(graph, directed=False)
    row_lab = label[psi.row]
    order = np.argsort(row_lab, kind="stable")
    bounds = np.searchsorted(row_lab[order], np.arange(n_comp + 1))
    values = []
    for c in range(n_comp):
        idx = order[bounds[c]:bounds[c + 1]]
        if idx.size == 0:
            continue
        rows, cols, vals = psi.row[idx], psi.col[idx], psi.data[idx]
        ur, ri = np.unique(rows, return_inverse=True)
        uc, ci = np.unique(cols, return_inverse=True)
        if min(ur.size, uc.size) > SVD_BLOCK_CAP:
            raise CapacityError(
                f"Schmidt block of size {ur.size}x{uc.size} exceeds SVD cap", basis_size=ur.size
            )
        block = np.zeros((ur.size, uc.size), complex)
        block[ri.ravel(), ci.ravel()] = vals
        values.append(np.linalg.svd(block, compute_uv=False) ** 2)
    lam = np.concatenate(values) if values else np.zeros(0)
    return np.sort(lam)[::-1]


def ggm_fock(state: FockState, method: str = "power") -> GgmResult:
    """GGM of a pure Fock state.

    Args:
        method: ``"power"`` (top eigenvalue by power iteration) or
            ``"schmidt"`` (full block SVD).
    """
    if method not in ("power", "schmidt"):
        raise ValueError(f"unknown method {method!r}")
    candidates = []
    for part in canonical_bipartitions(state.n_modes):
        if method == "power":
            lam = max_schmidt_coefficient(state, part)
        else:
            lam = float(schmidt_spectrum(state, part)[0])
        candidates.append((part, min(lam, 1.0)))
    return GgmResult.from_candidates(candidates)
