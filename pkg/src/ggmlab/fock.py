"""Truncated Fock-space representation of multimode pure states.

A :class:`FockState` stores only the occupied basis kets, as an
``(K, N)`` array of occupation tuples with matching complex amplitudes.
Rows are kept sorted by a packed integer key so that ladder-operator
matrix elements reduce to binary searches.

Constructors for the crystal and four-mode squeezed vacuum (FMSV) families
sum their closed-form expansions shell by shell, where a shell is a fixed
value of the principal summation index, until the remaining squared
amplitude is below ``eps_tail``.
"""

from __future__ import annotations

import math
import os
import warnings
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

import numpy as np
import scipy.sparse as sp
from scipy.special import logsumexp

from ._backend import kernels
from .errors import CapacityError, DimensionError, EmptyStateError, PrecisionWarning, TruncationError
from .gaussian import CrystalParams, crystal_occupations

EPS_TAIL = 1e-10
N_CAP = 200
SHELL_CHUNK = 8
DROP_TOL = 1e-16
DEFAULT_MAX_BASIS = 200_000


def max_basis() -> int:
    """Cap on reduced-basis size, from ``GGMLAB_MAX_BASIS``."""
    return int(os.environ.get("GGMLAB_MAX_BASIS", DEFAULT_MAX_BASIS))


def _shifts_for(cutoffs: Sequence[int]) -> np.ndarray:
    # +2 headroom so that a_i^+ applied at the cutoff never carries into the next mode
    bits = [max(1, int(c + 2).bit_length()) for c in cutoffs]
    if sum(bits) > 62:
        raise CapacityError(f"cutoffs {tuple(cutoffs)} need {sum(bits)} key bits (max 62)")
    return np.concatenate([[0], np.cumsum(bits)[:-1]]).astype(np.int64)


def _pack(occ: np.ndarray, shifts: np.ndarray) -> np.ndarray:
    return np.sum(np.left_shift(occ.astype(np.int64), shifts), axis=1)


@dataclass(frozen=True, eq=False)
class FockState:
    """Sparse pure state over ``n_modes`` bosonic modes.

    Attributes:
        occ: ``(K, N)`` int64 occupation tuples, unique, sorted by key.
        amps: ``(K,)`` complex amplitudes.
        cutoffs: inclusive per-mode maximal occupation of the basis.
        tail_bound: estimate of the squared amplitude discarded by truncation.
    """

    occ: np.ndarray
    amps: np.ndarray
    cutoffs: tuple[int, ...]
    tail_bound: float = 0.0

    @classmethod
    def from_arrays(cls, occ, amps, cutoffs=None, tail_bound=0.0, normalize=True) -> "FockState":
        """Canonicalise raw terms: merge duplicates, drop zeros, sort, normalise."""
        occ = np.asarray(occ, dtype=np.int64)
        amps = np.asarray(amps, dtype=complex).ravel()
        if occ.ndim != 2 or occ.shape[0] != amps.size:
            raise DimensionError(f"occupations {occ.shape} do not match {amps.size} amplitudes")
        if occ.size and occ.min() < 0:
            raise DimensionError("negative occupation number")
        n = occ.shape[1]
        if cutoffs is None:
            cutoffs = occ.max(axis=0) if occ.shape[0] else np.zeros(n, np.int64)
        cutoffs = tuple(int(c) for c in cutoffs)
        if len(cutoffs) != n:
            raise DimensionError(f"{len(cutoffs)} cutoffs for {n} modes")
        if occ.shape[0] and np.any(occ.max(axis=0) > np.array(cutoffs)):
            raise DimensionError("occupation exceeds cutoff")
        shifts = _shifts_for(cutoffs)
        keys = _pack(occ, shifts)
        ukeys, inverse = np.unique(keys, return_inverse=True)
        if ukeys.size != keys.size:
            merged = np.zeros(ukeys.size, complex)
            np.add.at(merged, inverse, amps)
            first = np.zeros(ukeys.size, np.int64)
            first[inverse[::-1]] = np.arange(keys.size)[::-1]
            occ, amps = occ[first], merged
        else:
            order = np.argsort(keys, kind="stable")
            occ, amps = occ[order], amps[order]
        norm = np.linalg.norm(amps)
        if normalize:
            if norm == 0:
                raise EmptyStateError("state has zero norm")
            amps = amps / norm
        keep = np.abs(amps) >= DROP_TOL
        if normalize and not np.all(keep):
            occ, amps = occ[keep], amps[keep]
            amps = amps / np.linalg.norm(amps)
        return cls(occ, amps, cutoffs, float(tail_bound))

    @classmethod
    def from_dict(cls, mapping: Mapping[tuple[int, ...], complex], **kw) -> "FockState":
        items = list(mapping.items())
        if not items:
            raise EmptyStateError("empty amplitude map")
        occ = np.array([k for k, _ in items], dtype=np.int64)
        return cls.from_arrays(occ, [v for _, v in items], **kw)

    @classmethod
    def basis(cls, occupation: Sequence[int]) -> "FockState":
        return cls.from_arrays([list(occupation)], [1.0])

    @property
    def n_modes(self) -> int:
        return self.occ.shape[1]

    @property
    def shifts(self) -> np.ndarray:
        return _shifts_for(self.cutoffs)

    @property
    def keys(self) -> np.ndarray:
        return _pack(self.occ, self.shifts)

    @property
    def amplitudes(self) -> dict[tuple[int, ...], complex]:
        return {tuple(int(x) for x in o): complex(a) for o, a in zip(self.occ, self.amps)}

    def __len__(self):
        return self.amps.size

    def norm(self) -> float:
        return float(np.linalg.norm(self.amps))

    def amplitude(self, occupation: Sequence[int]) -> complex:
        occ = np.asarray(occupation, dtype=np.int64)
        if occ.shape != (self.n_modes,) or np.any(occ > np.array(self.cutoffs)) or occ.min() < 0:
            return 0j
        q = int(_pack(occ[None, :], self.shifts)[0])
        keys = self.keys
        i = np.searchsorted(keys, q)
        return complex(self.amps[i]) if i < keys.size and keys[i] == q else 0j

    def with_cutoffs(self, cutoffs: Sequence[int]) -> "FockState":
        return FockState.from_arrays(self.occ, self.amps, cutoffs, self.tail_bound)

    def overlap(self, other: "FockState") -> complex:
        """``<self|other>``."""
        a, b = self.amplitudes, other.amplitudes
        return complex(sum(np.conj(v) * b[k] for k, v in a.items() if k in b))

    def max_amplitude_diff(self, other: "FockState") -> float:
        """Largest termwise amplitude difference over the union of supports."""
        a, b = self.amplitudes, other.amplitudes
        return max((abs(a.get(k, 0) - b.get(k, 0)) for k in a.keys() | b.keys()), default=0.0)

    # text dump: header lines start with '#'
    def dump(self, path) -> None:
        with open(path, "w") as fh:
            fh.write(f"# n_modes {self.n_modes}\n")
            fh.write("# cutoffs " + " ".join(str(c) for c in self.cutoffs) + "\n")
            fh.write(f"# tail {self.tail_bound:.17g}\n")
            for o, a in zip(self.occ, self.amps):
                fh.write(" ".join(str(int(x)) for x in o) + f" {a.real:.17g} {a.imag:.17g}\n")

    @classmethod
    def load(cls, path) -> "FockState":
        header, rows = {}, []
        with open(path) as fh:
            for line in fh:
                line = line.strip()
                if not line:
                    continue
                if line.startswith("#"):
                    key, *vals = line[1:].split()
                    header[key] = vals
                else:
                    rows.append(line.split())
        n = int(header["n_modes"][0])
        cutoffs = [int(c) for c in header["cutoffs"]]
        tail = float(header.get("tail", ["0"])[0])
        if any(len(r) != n + 2 for r in rows):
            raise DimensionError(f"expected {n + 2} columns per amplitude line")
        occ = np.array([[int(x) for x in r[:n]] for r in rows], dtype=np.int64).reshape(-1, n)
        amps = np.array([complex(float(r[n]), float(r[n + 1])) for r in rows])
        return cls.from_arrays(occ, amps, cutoffs, tail, normalize=False)


@dataclass(frozen=True)
class PhotonOp:
    """Photon addition or subtraction, ``counts[i]`` photons on mode ``i``."""

    kind: str
    counts: tuple[int, ...]

    def __post_init__(self):
        if self.kind not in ("add", "subtract"):
            raise ValueError(f"kind must be 'add' or 'subtract', got {self.kind!r}")
        counts = tuple(int(c) for c in self.counts)
        if any(c < 0 for c in counts):
            raise ValueError(f"photon counts must be non-negative, got {counts}")
        object.__setattr__(self, "counts", counts)

    @property
    def trivial(self) -> bool:
        return not any(self.counts)


def _amplification(occ: np.ndarray, m: np.ndarray, subtract: bool) -> np.ndarray:
    """``sqrt(prod_i (n_i + m_i)!/n_i!)`` (add) or ``sqrt(prod n_i!/(n_i - m_i)!)``."""
    from scipy.special import gammaln

    if subtract:
        lw = gammaln(occ + 1) - gammaln(occ - m + 1)
    else:
        lw = gammaln(occ + m + 1) - gammaln(occ + 1)
    return np.exp(0.5 * np.sum(lw, axis=1))


def apply_photon_op(state: FockState, op: PhotonOp, eps_tail: float | None = None) -> FockState:
    """Apply ``prod_i (a_i^+)^{m_i}`` or ``prod_i a_i^{m_i}`` and renormalise.

    The tail bound of the result is estimated by amplifying the input tail
    with the ladder weight of the first discarded occupations, relative to
    the weight of the retained state.

    Raises:
        EmptyStateError: if subtraction removes every retained component.
        TruncationError: if ``eps_tail`` is given and the estimated tail of
            the result exceeds it.
    """
    m = np.asarray(op.counts, dtype=np.int64)
    if m.size != state.n_modes:
        raise DimensionError(f"{m.size} photon counts for {state.n_modes} modes")
    if op.trivial:
        return state
    subtract = op.kind == "subtract"
    occ = state.occ
    amps = state.amps
    cut = np.array(state.cutoffs, dtype=np.int64)
    if subtract:
        keep = np.all(occ >= m, axis=1)
        occ, amps = occ[keep], amps[keep]
        if occ.shape[0] == 0:
            raise EmptyStateError(f"subtracting {tuple(m)} annihilates the truncated state")
    weight = _amplification(occ, m, subtract)
    new_amps = amps * weight
    kept_mass = float(np.sum(np.abs(new_amps) ** 2))
    if kept_mass == 0:
        raise EmptyStateError("photon operation produced a zero vector")
    edge = _amplification((cut + 1)[None, :], m, subtract)[0]
    tail = state.tail_bound * edge**2 / kept_mass
    new_occ = occ - m if subtract else occ + m
    new_cut = np.maximum(cut - m, 0) if subtract else cut + m
    if eps_tail is not None and tail > eps_tail:
        raise TruncationError(
            f"estimated tail {tail:.3e} after {op.kind} {op.counts} exceeds {eps_tail:.1e}",
            achieved=tail,
        )
    return FockState.from_arrays(new_occ, new_amps, new_cut, tail)


def _sum_shells(generate, start, eps_tail, q_inf, n_max, n_cap):
    """Accumulate shells from ``generate(lo, hi)`` until the tail is below ``eps_tail``.

    ``generate`` returns ``(occ, logamp, shell, extra)``. The tail beyond the
    last shell ``n`` with weight ``w_n`` is bounded geometrically by
    ``w_n q / (1 - q)``, with ``q`` the larger of the latest shell ratio and
    the asymptotic ratio ``q_inf``.

    Returns:
        ``(occ, logamp, extra, tail)``, ``tail`` relative to the total weight.
    """
    parts = []
    shell_logw: dict[int, float] = {}
    lo = start
    hi_limit = n_cap + 1 if n_max is None else n_max + 1
    tail = float("inf")
    while lo < hi_limit:
        hi = min(lo + SHELL_CHUNK, hi_limit)
        occ, la, shell, extra = generate(lo, hi)
        parts.append((occ, la, extra))
        for n in range(lo, hi):
            sel = shell == n
            if np.any(sel):
                shell_logw[n] = float(logsumexp(2 * la[sel]))
        lo = hi
        if not shell_logw:
            continue
        total = logsumexp(list(shell_logw.values()))
        last = max(shell_logw)
        q = q_inf
        if last - 1 in shell_logw:
            q = max(q, math.exp(shell_logw[last] - shell_logw[last - 1]))
        if q < 1:
            tail = math.exp(shell_logw[last] - total) * q / (1 - q)
        else:
            tail = float("inf")
        if n_max is None:
            contribution = math.exp(shell_logw[last] - total)
            if contribution < eps_tail * 1e-2 and tail < eps_tail:
                break
    else:
        if n_max is None:
            raise TruncationError(
                f"tail {tail:.3e} still above {eps_tail:.1e} at shell cap {n_cap}", achieved=tail
            )
    if q_inf == 0.0:
        tail = 0.0
    occ = np.concatenate([p[0] for p in parts])
    la = np.concatenate([p[1] for p in parts])
    extra = tuple(np.concatenate([p[2][i] for p in parts]) for i in range(len(parts[0][2])))
    if occ.shape[0] == 0:
        raise EmptyStateError("no Fock component survives the photon operation")
    return occ, la, extra, tail


def _check_counts(counts, n):
    counts = tuple(int(c) for c in counts)
    if len(counts) != n or any(c < 0 for c in counts):
        raise ValueError(f"need {n} non-negative photon counts, got {counts}")
    return counts


def build_fmsv_family(
    r: float,
    counts: Sequence[int] = (0, 0, 0, 0),
    kind: str = "add",
    eps_tail: float = EPS_TAIL,
    n_max: int | None = None,
    n_cap: int = N_CAP,
) -> FockState:
    """Photon-added or -subtracted FMSV from its closed-form expansion.

    The terms are ``(tanh(r)/2)^n sqrt(C(n, r1) C(n, r2))`` on
    ``|n-r1, n-r2, r1, r2>`` times the ladder weights of the photon counts.
    For subtraction the principal index starts at
    ``max(m1 + m3, m2 + m4)``.

    Args:
        n_max: fixed last shell instead of the adaptive stopping rule.
        n_cap: largest shell the adaptive rule may reach.
    """
    m = _check_counts(counts, 4)
    if kind not in ("add", "subtract"):
        raise ValueError(f"kind must be 'add' or 'subtract', got {kind!r}")
    subtract = kind == "subtract"
    x = 0.5 * math.tanh(float(r))
    start = max(m[0] + m[2], m[1] + m[3]) if subtract else 0
    if x == 0.0:
        if start > 0:
            raise EmptyStateError("subtraction from the vacuum")
        n_max, logx, q_inf = 0, 0.0, 0.0
    else:
        logx, q_inf = math.log(abs(x)), math.tanh(float(r)) ** 2

    def generate(lo, hi):
        occ, la, shell = kernels.fmsv_shells(logx, m, subtract, lo, hi)
        return occ, la, shell, (shell,)

    occ, la, (shell,), tail = _sum_shells(generate, start, eps_tail, q_inf, n_max, n_cap)
    amps = np.exp(la - la.max())
    if x < 0:
        amps = amps * np.where(shell % 2, -1.0, 1.0)
    return FockState.from_arrays(occ, amps, tail_bound=tail)


def build_fmsv_fock(r: float, eps_tail: float = EPS_TAIL, **kw) -> FockState:
    """Four-mode squeezed vacuum in the Fock basis."""
    return build_fmsv_family(r, (0, 0, 0, 0), "add", eps_tail, **kw)


def build_added_fmsv(r, counts, eps_tail: float = EPS_TAIL, **kw) -> FockState:
    return build_fmsv_family(r, counts, "add", eps_tail, **kw)


def build_subtracted_fmsv(r, counts, eps_tail: float = EPS_TAIL, **kw) -> FockState:
    return build_fmsv_family(r, counts, "subtract", eps_tail, **kw)


def build_crystal_family(
    p: CrystalParams,
    counts: Sequence[int] = (0, 0, 0),
    kind: str = "add",
    eps_tail: float = EPS_TAIL,
    n_max: int | None = None,
    n_cap: int = N_CAP,
) -> FockState:
    """Photon-added or -subtracted crystal state from its closed-form expansion.

    Terms are ``u2^r u3^s exp(-i(r phi2 + s phi3)) sqrt((r+s)!/(r! s!))`` on
    ``|r+s, r, s>``, with ``u_i = sqrt(n_i / (1 + n1))``, times ladder weights.
    A subtraction keeps the terms with ``r + s >= m1``, ``r >= m2``,
    ``s >= m3``; the shell index is ``k = r + s``.
    """
    m = _check_counts(counts, 3)
    if kind not in ("add", "subtract"):
        raise ValueError(f"kind must be 'add' or 'subtract', got {kind!r}")
    subtract = kind == "subtract"
    n1, n2, n3 = crystal_occupations(p)
    zero2, zero3 = n2 == 0.0, n3 == 0.0
    logu2 = 0.5 * math.log(n2 / (1 + n1)) if not zero2 else 0.0
    logu3 = 0.5 * math.log(n3 / (1 + n1)) if not zero3 else 0.0
    start = m[0] if subtract else 0
    q_inf = n1 / (1 + n1)
    if zero2 and zero3:
        if subtract and any(m):
            raise EmptyStateError("subtraction from the vacuum")
        n_max = start

    def generate(lo, hi):
        occ, la, rr, ss = kernels.crystal_shells(logu2, logu3, zero2, zero3, m, subtract, lo, hi)
        base_k = rr + ss
        return occ, la, base_k, (rr, ss)

    occ, la, (rr, ss), tail = _sum_shells(generate, start, eps_tail, q_inf, n_max, n_cap)
    amps = np.exp(la - la.max()) * np.exp(-1j * (rr * p.phi2 + ss * p.phi3))
    return FockState.from_arrays(occ, amps, tail_bound=tail)


def build_crystal_fock(p: CrystalParams, eps_tail: float = EPS_TAIL, **kw) -> FockState:
    """Crystal output state ``exp(-i H t)|000>`` in the Fock basis."""
    return build_crystal_family(p, (0, 0, 0), "add", eps_tail, **kw)


def build_added_crystal(p, counts, eps_tail: float = EPS_TAIL, **kw) -> FockState:
    return build_crystal_family(p, counts, "add", eps_tail, **kw)


def build_subtracted_crystal(p, counts, eps_tail: float = EPS_TAIL, **kw) -> FockState:
    return build_crystal_family(p, counts, "subtract", eps_tail, **kw)


@dataclass(frozen=True, eq=False)
class ReducedDensityMatrix:
    """Reduced state on ``kept_modes``.

    ``basis[k]`` is the occupation tuple (over the kept modes) of row ``k``;
    ``matrix`` is dense for small bases and CSR sparse otherwise.
    """

    kept_modes: tuple[int, ...]
    basis: np.ndarray
    matrix: np.ndarray | sp.csr_matrix

    @property
    def dim(self) -> int:
        return self.basis.shape[0]

    def dense(self) -> np.ndarray:
        return self.matrix.toarray() if sp.issparse(self.matrix) else np.asarray(self.matrix)

    def trace(self) -> float:
        return float(np.real(self.matrix.diagonal().sum()))


def _side_index(state: FockState, modes: Sequence[int]):
    modes = list(modes)
    sub = state.occ[:, modes]
    keys = _pack(sub, _shifts_for([state.cutoffs[k] for k in modes]))
    ukeys, first, inverse = np.unique(keys, return_index=True, return_inverse=True)
    return sub[first], inverse.ravel()


def _check_keep(state: FockState, keep: Iterable[int]) -> tuple[int, ...]:
    keep = tuple(sorted(set(int(k) for k in keep)))
    if not keep or len(keep) >= state.n_modes:
        raise DimensionError(f"keep set {keep} must be a nonempty proper subset")
    if keep[0] < 0 or keep[-1] >= state.n_modes:
        raise DimensionError(f"keep set {keep} out of range for {state.n_modes} modes")
    return keep


def coefficient_matrix(state: FockState, side_a: Sequence[int]):
    """Amplitude matrix ``psi[(a), (b)]`` for the split ``side_a`` : rest.

    Returns:
        ``(basis_a, basis_b, psi)`` with ``psi`` a CSR matrix.

    Raises:
        CapacityError: if either side basis exceeds ``GGMLAB_MAX_BASIS``.
    """
    side_a = _check_keep(state, side_a)
    side_b = tuple(k for k in range(state.n_modes) if k not in side_a)
    basis_a, row = _side_index(state, side_a)
    basis_b, col = _side_index(state, side_b)
    cap = max_basis()
    big = max(basis_a.shape[0], basis_b.shape[0])
    if big > cap:
        raise CapacityError(f"reduced basis of size {big} exceeds cap {cap}", basis_size=big)
    psi = sp.csr_matrix((state.amps, (row, col)), shape=(basis_a.shape[0], basis_b.shape[0]))
    return basis_a, basis_b, psi


DENSE_DIM = 2000


def reduced_density_matrix(state: FockState, keep: Iterable[int]) -> ReducedDensityMatrix:
    """Trace out every mode not in ``keep``.

    ``rho[(a), (a')] = sum_b psi(a, b) conj(psi(a', b))``, Hermitised.
    """
    keep = _check_keep(state, keep)
    basis, _, psi = coefficient_matrix(state, keep)
    rho = (psi @ psi.conj().T).tocsr()
    rho = ((rho + rho.conj().T) * 0.5).tocsr()
    if basis.shape[0] <= DENSE_DIM:
        rho = rho.toarray()
    return ReducedDensityMatrix(keep, basis, rho)


def ladder_moments(state: FockState):
    """``(<a_i>, <a_i^+ a_j>, <a_i a_j>)`` of ``state``."""
    return kernels.ladder_moments(state.occ, state.amps, state.keys, state.shifts)


def photon_numbers(state: FockState) -> np.ndarray:
    """Mean occupation ``<a_i^+ a_i>`` of every mode."""
    p = np.abs(state.amps) ** 2
    return p @ state.occ


def covariance_from_fock(state: FockState, precision: float = 1e-7):
    """Displacement vector and covariance matrix of ``state``.

    Uses the same quadrature ordering and vacuum-1/2 convention as
    :mod:`ggmlab.symplectic`.

    Warns:
        PrecisionWarning: when ``state.tail_bound`` exceeds ``precision``.
    """
    if state.tail_bound > precision:
        warnings.warn(
            f"truncation tail {state.tail_bound:.3e} may exceed requested precision {precision:.1e}",
            PrecisionWarning,
        )
    mean, nd, aa = ladder_moments(state)
    n = state.n_modes
    s = 1 / math.sqrt(2)
    T = np.zeros((2 * n, 2 * n), complex)
    for i in range(n):
        T[2 * i, i], T[2 * i, n + i] = s, s
        T[2 * i + 1, i], T[2 * i + 1, n + i] = -1j * s, 1j * s
    # second moments of (a_1..a_n, a_1^+..a_n^+)
    M = np.block([[aa, np.eye(n) + nd.T], [nd, np.conj(aa)]])
    d = T @ np.concatenate([mean, np.conj(mean)])
    R = T @ M @ T.T
    cm = 0.5 * (R + R.T) - np.outer(d, d)
    return d.real.copy(), np.real(0.5 * (cm + cm.T))
