"""GGM of pure multimode Gaussian states from symplectic spectra.

For a pure Gaussian state the largest eigenvalue of any reduced state is a
product of thermal ground-state populations, one per symplectic eigenvalue
of the reduced covariance matrix. The GGM is one minus the largest such
value over all reductions to at most half of the modes.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Callable, NamedTuple, Sequence

import numpy as np

from .bipartition import GgmResult, ModeBipartition, canonical_bipartitions
from .errors import DimensionError, PurityError, PurityWarning
from .symplectic import (
    as_cm,
    max_eigenvalue_from_spectrum,
    n_modes_of,
    partial_trace_cm,
    symplectic_eigenvalues,
)

PURITY_WARN = 1e-6
PURITY_FAIL = 1e-4


def purity_defect(cm) -> float:
    """Largest deviation of the symplectic spectrum from 1/2."""
    return float(np.max(np.abs(symplectic_eigenvalues(cm) - 0.5)))


def ggm_gaussian(cm, *, warn_tol: float = PURITY_WARN, fail_tol: float = PURITY_FAIL) -> GgmResult:
    """GGM of the pure Gaussian state with covariance matrix ``cm``.

    Args:
        cm: ``2N x 2N`` covariance matrix, ``N >= 2``.
        warn_tol: purity defect above which a :class:`PurityWarning` is issued.
        fail_tol: purity defect above which :class:`PurityError` is raised.

    Returns:
        GgmResult: value, maximising cut and all candidate eigenvalues.
    """
    cm = as_cm(cm)
    n = n_modes_of(cm)
    if n < 2:
        raise DimensionError("GGM needs at least two modes")
    defect = purity_defect(cm)
    if defect > fail_tol:
        raise PurityError(f"covariance matrix is not pure (symplectic defect {defect:.3e})")
    if defect > warn_tol:
        warnings.warn(f"covariance matrix only approximately pure (defect {defect:.3e})", PurityWarning)
    candidates = []
    for part in canonical_bipartitions(n):
        nu = symplectic_eigenvalues(partial_trace_cm(cm, part.side_a))
        candidates.append((part, max_eigenvalue_from_spectrum(nu)))
    return GgmResult.from_candidates(candidates)


def tritter_cm(r: float) -> np.ndarray:
    """Three single-mode squeezed vacua of strength ``r`` mixed in a tritter."""
    r = float(r)
    if not math.isfinite(r):
        raise ValueError(f"squeezing must be finite, got {r}")
    c, s = math.cosh(2 * r), math.sinh(2 * r)
    rp, rm, off = c + s / 3, c - s / 3, -2 * s / 3
    q = np.full((3, 3), off) + np.eye(3) * (rp - off)
    p = np.full((3, 3), -off) + np.eye(3) * (rm + off)
    cm = np.zeros((6, 6))
    cm[0::2, 0::2] = q
    cm[1::2, 1::2] = p
    return 0.5 * cm


def tritter_ggm_closed_form(r: float) -> float:
    x = math.sqrt(5 + 4 * math.cosh(4 * r)) / 3
    return (x - 1) / (x + 1)


@dataclass(frozen=True)
class CrystalParams:
    """Couplings, evolution time and output phases of the nonlinear crystal.

    ``gamma1`` drives the down-conversion ``a1^+ a3^+`` and ``gamma2`` the
    frequency conversion ``a2^+ a3``; only their moduli enter the state.
    """

    gamma1: complex
    gamma2: complex
    t: float
    phi2: float = 0.0
    phi3: float = 0.0

    def replace(self, **kw) -> "CrystalParams":
        return CrystalParams(**{**self.__dict__, **kw})


class Occupations(NamedTuple):
    n1: float
    n2: float
    n3: float


def _sinc(y: float, hyperbolic: bool) -> float:
    if abs(y) < 1e-4:
        y2 = y * y
        return 1 + y2 / 6 + y2 * y2 / 120 if hyperbolic else 1 - y2 / 6 + y2 * y2 / 120
    return math.sinh(y) / y if hyperbolic else math.sin(y) / y


def crystal_occupations(p: CrystalParams) -> Occupations:
    """Mean photon numbers of the three crystal modes at time ``p.t``.

    With ``W = sqrt(|g2|^2 - |g1|^2)`` the occupations are
    ``n2 = |g1 g2|^2 (1 - cos W t)^2 / W^4`` and ``n3 = |g1|^2 sin^2(W t) / W^2``.
    They are evaluated as ``n2 = |g1 g2|^2 t^4 sinc^4(W t / 2) / 4`` and
    ``n3 = |g1|^2 t^2 sinc^2(W t)``, with ``sinh`` replacing ``sin`` when
    ``|g1| > |g2|``; this form is exact on both branches and continuous through
    ``W = 0``.
    """
    t = float(p.t)
    if t < 0:
        raise ValueError(f"time must be non-negative, got {t}")
    g1, g2 = abs(p.gamma1), abs(p.gamma2)
    d = g2 * g2 - g1 * g1
    hyper = d < 0
    w = math.sqrt(abs(d))
    n2 = (g1 * g2) ** 2 * t**4 * _sinc(w * t / 2, hyper) ** 4 / 4
    n3 = g1 * g1 * t * t * _sinc(w * t, hyper) ** 2
    return Occupations(n2 + n3, n2, n3)


def crystal_cm(p: CrystalParams) -> np.ndarray:
    """Covariance matrix of the crystal output state (vacuum input)."""
    n1, n2, n3 = crystal_occupations(p)
    f = [n1 + 0.5, n2 + 0.5, n3 + 0.5]
    a2 = math.sqrt(n2 * (1 + n1))
    a3 = math.sqrt(n3 * (1 + n1))
    A2, B2 = a2 * math.cos(p.phi2), a2 * math.sin(p.phi2)
    A3, B3 = a3 * math.cos(p.phi3), a3 * math.sin(p.phi3)
    c23 = math.sqrt(n2 * n3)
    C, D = c23 * math.cos(p.phi2 - p.phi3), c23 * math.sin(p.phi2 - p.phi3)
    F1, F2, F3 = f
    return np.array(
        [
            [F1, 0, A2, -B2, A3, -B3],
            [0, F1, -B2, -A2, -B3, -A3],
            [A2, -B2, F2, 0, C, D],
            [-B2, -A2, 0, F2, -D, C],
            [A3, -B3, C, -D, F3, 0],
            [-B3, -A3, D, C, 0, F3],
        ],
        dtype=float,
    )


def crystal_ggm_closed_form(p: CrystalParams) -> float:
    occ = crystal_occupations(p)
    return 1.0 - max(2.0 / (1.0 + 2.0 * (n + 0.5)) for n in occ)


def fmsv_cm(r: float) -> np.ndarray:
    """Covariance matrix of the four-mode squeezed vacuum.

    Adjacent modes (cyclically neighbouring) carry ``sinh(2r)/2 * sigma_z``
    correlations, alternate modes ``sinh(r)^2 * I``; everything is scaled by
    1/2.
    """
    r = float(r)
    if not math.isfinite(r):
        raise ValueError(f"squeezing must be finite, got {r}")
    eye, sz = np.eye(2), np.diag([1.0, -1.0])
    diag = math.cosh(r) ** 2 * eye
    adj = 0.5 * math.sinh(2 * r) * sz
    alt = math.sinh(r) ** 2 * eye
    blocks = [
        [diag, adj, alt, adj],
        [adj, diag, adj, alt],
        [alt, adj, diag, adj],
        [adj, alt, adj, diag],
    ]
    return 0.5 * np.block(blocks)


def fmsv_candidates_closed_form(r: float) -> tuple[float, float, float]:
    """Single-mode, alternate-pair and adjacent-pair maximal eigenvalues."""
    c = math.cosh(r)
    return 2 / (1 + c * c), 2 / (1 + math.cosh(2 * r)), (2 / (1 + c)) ** 2


def fmsv_ggm_closed_form(r: float) -> float:
    return 1.0 - max(fmsv_candidates_closed_form(r))


@dataclass(frozen=True)
class Kink:
    """Change of the maximising cut between two consecutive samples.

    Attributes:
        t_lo, t_hi: bracketing sample times.
        before, after: maximising cuts at ``t_lo`` and ``t_hi``.
        crossing: whether ``lambda_before - lambda_after`` changes sign
            across the bracket, i.e. the kink is a genuine crossover.
        t_cross: bisection-refined crossing time, if refined.
        gap: ``|lambda_before - lambda_after|`` at ``t_cross``.
    """

    t_lo: float
    t_hi: float
    before: ModeBipartition
    after: ModeBipartition
    crossing: bool
    t_cross: float | None = None
    gap: float | None = None


def detect_kinks(
    series: Sequence[tuple[float, GgmResult]],
    evaluate: Callable[[float], GgmResult] | None = None,
    tol: float = 1e-8,
    max_iter: int = 200,
) -> list[Kink]:
    """Locate changes of the maximising cut along a sampled GGM curve.

    Args:
        series: ``(t, result)`` pairs sorted by ``t``.
        evaluate: optional ``t -> GgmResult``; when given, each kink is
            refined by bisection on the difference of the two competing
            candidate eigenvalues until it drops below ``tol``.

    Raises:
        ValueError: with fewer than two samples or unsorted times.
    """
    if len(series) < 2:
        raise ValueError("need at least two samples to detect kinks")
    ts = [t for t, _ in series]
    if any(b < a for a, b in zip(ts, ts[1:])):
        raise ValueError("series must be sorted in t")

    kinks = []
    for (t0, r0), (t1, r1) in zip(series, series[1:]):
        before, after = r0.argmax_partition, r1.argmax_partition
        if before == after:
            continue
        diff = lambda res: res.eigenvalue(before) - res.eigenvalue(after)  # noqa: E731
        d0, d1 = diff(r0), diff(r1)
        crossing = d0 >= 0 >= d1 and d0 != d1
        kink = Kink(t0, t1, before, after, crossing)
        if evaluate is not None and crossing:
            lo, hi = t0, t1
            mid, dm = t0, d0
            for _ in range(max_iter):
                mid = 0.5 * (lo + hi)
                dm = diff(evaluate(mid))
                if abs(dm) < tol or hi - lo < 1e-15 * max(1.0, abs(mid)):
                    break
                if dm > 0:
                    lo = mid
                else:
                    hi = mid
            kink = Kink(t0, t1, before, after, True, mid, abs(dm))
        kinks.append(kink)
    return kinks
