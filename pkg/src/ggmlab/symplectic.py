r"""Covariance-matrix algebra for Gaussian states.

Conventions used throughout the package:

* quadratures are ordered :math:`(q_1, p_1, q_2, p_2, \ldots, q_m, p_m)`;
* :math:`q = (a + a^\dagger)/\sqrt{2}` and :math:`p = (a - a^\dagger)/(i\sqrt{2})`,
  so the vacuum covariance matrix is :math:`\tfrac12 \mathbb{I}` and every
  symplectic eigenvalue of a physical state is at least 1/2;
* entropies are in bits.
"""

from __future__ import annotations

from typing import NamedTuple, Sequence

import numpy as np

from .errors import DimensionError, InvalidSpectrumError, NumericalError

SYMMETRY_TOL = 1e-12
VALIDITY_TOL = 1e-9
PAIRING_TOL = 1e-9


class Validity(NamedTuple):
    """Outcome of :func:`validate_cm`."""

    valid: bool
    margin: float


def symplectic_form(n_modes: int) -> np.ndarray:
    """Block-diagonal symplectic form ``J`` for ``n_modes`` modes."""
    return np.kron(np.eye(n_modes), np.array([[0.0, 1.0], [-1.0, 0.0]]))


def as_cm(cm) -> np.ndarray:
    """Return ``cm`` as a float array after checking shape and symmetry.

    Raises:
        DimensionError: if the matrix is not square with even dimension, or
            is not symmetric within ``1e-12``.
    """
    cm = np.asarray(cm, dtype=float)
    if cm.ndim != 2 or cm.shape[0] != cm.shape[1]:
        raise DimensionError(f"covariance matrix must be square, got shape {cm.shape}")
    if cm.shape[0] == 0 or cm.shape[0] % 2:
        raise DimensionError(f"covariance matrix dimension must be even, got {cm.shape[0]}")
    asym = np.max(np.abs(cm - cm.T))
    if asym > SYMMETRY_TOL * max(1.0, np.max(np.abs(cm))):
        raise DimensionError(f"covariance matrix is not symmetric (max asymmetry {asym:.3e})")
    return cm


def n_modes_of(cm) -> int:
    return np.shape(cm)[0] // 2


def vacuum_cm(n_modes: int) -> np.ndarray:
    return 0.5 * np.eye(2 * n_modes)


def validate_cm(cm) -> Validity:
    """Check the uncertainty relation ``cm + iJ/2 >= 0`` (vacuum is ``I/2``).

    Returns:
        Validity: ``valid`` is true iff the smallest eigenvalue of the
        Hermitian matrix ``cm + iJ/2`` is at least ``-1e-9``; ``margin`` is that
        smallest eigenvalue.
    """
    cm = as_cm(cm)
    J = symplectic_form(n_modes_of(cm))
    margin = float(np.linalg.eigvalsh(cm + 0.5j * J)[0])
    return Validity(margin >= -VALIDITY_TOL, margin)


def _mode_indices(n_modes: int, keep: Sequence[int]) -> list[int]:
    keep = list(keep)
    if not keep:
        raise DimensionError("keep set must be nonempty")
    if len(set(keep)) != len(keep):
        raise DimensionError(f"keep set has repeated modes: {keep}")
    for k in keep:
        if not 0 <= k < n_modes:
            raise DimensionError(f"mode {k} out of range for {n_modes} modes")
    return sorted(keep)


def partial_trace_cm(cm, keep: Sequence[int]) -> np.ndarray:
    """Covariance matrix of the modes in ``keep`` (0-based), in canonical order."""
    cm = as_cm(cm)
    modes = _mode_indices(n_modes_of(cm), keep)
    idx = np.array([[2 * k, 2 * k + 1] for k in modes]).ravel()
    return cm[np.ix_(idx, idx)].copy()


def symplectic_eigenvalues(cm) -> np.ndarray:
    """Williamson spectrum of ``cm``, sorted in descending order.

    The spectrum is read off the Hermitian matrix ``S iJ S`` with
    ``S = cm**(1/2)``, which is similar to ``iJ cm`` and therefore has the
    same ``+-nu`` eigenvalue pairs, but can be diagonalised with a symmetric
    solver. Matrices that are not positive definite (hence not physical)
    go through the general eigenproblem of ``iJ cm`` instead.

    Raises:
        NumericalError: if the eigenvalues do not come in ``+-nu`` pairs.
    """
    cm = as_cm(cm)
    n = n_modes_of(cm)
    J = symplectic_form(n)
    try:
        w, v = np.linalg.eigh(cm)
    except np.linalg.LinAlgError as exc:
        raise NumericalError(f"eigh failed on covariance matrix: {exc}") from exc
    if w[0] > 0:
        root = (v * np.sqrt(w)) @ v.T
        ev = np.linalg.eigvalsh(root @ (1j * J) @ root)
    else:
        try:
            ev = np.linalg.eigvals(1j * J @ cm)
        except np.linalg.LinAlgError as exc:
            raise NumericalError(f"eig failed on iJ*cm: {exc}") from exc
        ev = np.sort(ev.real)
    ev = np.sort(np.real(ev))
    neg = -ev[:n][::-1]
    pos = ev[n:]
    scale = np.maximum(np.abs(pos), 1.0)
    mismatch = np.max(np.abs(pos - neg) / scale)
    if mismatch > PAIRING_TOL:
        raise NumericalError(
            f"symplectic eigenvalues not paired (relative mismatch {mismatch:.3e}, "
            f"eigenvalues {ev})"
        )
    return np.sort(0.5 * (pos + neg))[::-1]


def _checked_spectrum(spec) -> np.ndarray:
    nu = np.atleast_1d(np.asarray(spec, dtype=float))
    if np.any(nu < 0.5 - VALIDITY_TOL):
        raise InvalidSpectrumError(f"symplectic eigenvalue below 1/2: {nu.min():.12g}")
    # values in [1/2 - tol, 1/2) are roundoff
    return np.maximum(nu, 0.5)


def max_eigenvalue_from_spectrum(spec) -> float:
    """Largest density-matrix eigenvalue of a Gaussian state with spectrum ``spec``.

    Each symplectic eigenvalue ``nu`` is a thermal mode whose ground-state
    population is ``2 / (1 + 2 nu)``; the product over modes is the maximal
    eigenvalue.
    """
    nu = _checked_spectrum(spec)
    return float(np.prod(2.0 / (1.0 + 2.0 * nu)))


def thermal_beta(nu: float) -> float:
    """Inverse temperature of the thermal mode with symplectic eigenvalue ``nu``."""
    nu = float(_checked_spectrum(nu)[0])
    if nu == 0.5:
        return float("inf")
    return float(np.log((nu + 0.5) / (nu - 0.5)))


def _g(nu: np.ndarray) -> np.ndarray:
    plus = (nu + 0.5) * np.log2(nu + 0.5)
    d = nu - 0.5
    minus = np.where(d > 0, d * np.log2(np.where(d > 0, d, 1.0)), 0.0)
    return plus - minus


def gaussian_entropy(spec) -> float:
    """Von Neumann entropy (bits) of a Gaussian state with spectrum ``spec``."""
    nu = _checked_spectrum(spec)
    return float(np.sum(_g(nu)))
