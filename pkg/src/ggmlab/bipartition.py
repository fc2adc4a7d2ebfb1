"""Mode bipartitions and the result record shared by both GGM engines."""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from typing import Iterator, Sequence

from .errors import DimensionError

# candidates closer than this to the maximum count as ties
TIE_TOL = 1e-12


@dataclass(frozen=True, order=True)
class ModeBipartition:
    """Canonical ``A:B`` split of modes ``0..n_total-1``.

    ``side_a`` holds at most ``n_total // 2`` modes; when it holds exactly
    half of an even number of modes it must contain mode 0, so that ``A:B``
    and ``B:A`` are not both enumerated.
    """

    side_a: tuple[int, ...]
    n_total: int

    def __post_init__(self):
        a = tuple(sorted(self.side_a))
        object.__setattr__(self, "side_a", a)
        n = self.n_total
        if n < 2:
            raise DimensionError(f"need at least two modes for a bipartition, got {n}")
        if not a or len(set(a)) != len(a) or a[0] < 0 or a[-1] >= n:
            raise DimensionError(f"invalid side {a} for {n} modes")
        if len(a) > n // 2:
            raise DimensionError(f"side {a} larger than half of {n} modes")
        if 2 * len(a) == n and a[0] != 0:
            raise DimensionError(f"half-size side {a} must contain mode 0")

    @property
    def side_b(self) -> tuple[int, ...]:
        return tuple(k for k in range(self.n_total) if k not in self.side_a)

    @classmethod
    def canonical(cls, side: Sequence[int], n_total: int) -> "ModeBipartition":
        """Build the canonical bipartition for an arbitrary side (either half)."""
        a = tuple(sorted(set(side)))
        b = tuple(k for k in range(n_total) if k not in a)
        if len(b) < len(a) or (len(a) == len(b) and 0 in b):
            a = b
        return cls(a, n_total)

    def label(self) -> str:
        """1-based label such as ``1+3:2+4``."""
        fmt = lambda modes: "+".join(str(k + 1) for k in modes)  # noqa: E731
        return f"{fmt(self.side_a)}:{fmt(self.side_b)}"

    def __str__(self):
        return self.label()


def canonical_bipartitions(n_modes: int) -> Iterator[ModeBipartition]:
    """All canonical bipartitions, by side size then lexicographically."""
    if n_modes < 2:
        raise DimensionError(f"need at least two modes, got {n_modes}")
    for size in range(1, n_modes // 2 + 1):
        for side in combinations(range(n_modes), size):
            if 2 * size == n_modes and side[0] != 0:
                continue
            yield ModeBipartition(side, n_modes)


@dataclass(frozen=True)
class GgmResult:
    """GGM value together with every evaluated candidate.

    Attributes:
        value: ``1 - max`` over candidate maximal eigenvalues.
        argmax_partition: bipartition attaining the maximum (ties go to the
            lexicographically smallest side).
        candidates: ``(bipartition, maximal eigenvalue)`` for every cut.
    """

    value: float
    argmax_partition: ModeBipartition
    candidates: tuple[tuple[ModeBipartition, float], ...] = field(repr=False)

    @classmethod
    def from_candidates(cls, candidates) -> "GgmResult":
        candidates = tuple(candidates)
        if not candidates:
            raise DimensionError("no candidate bipartitions")
        top = max(lam for _, lam in candidates)
        best = min(part.side_a for part, lam in candidates if lam >= top - TIE_TOL)
        argmax = next(part for part, _ in candidates if part.side_a == best)
        return cls(1.0 - top, argmax, candidates)

    def eigenvalue(self, part: ModeBipartition | Sequence[int]) -> float:
        """Maximal eigenvalue recorded for ``part`` (a bipartition or a side)."""
        side = part.side_a if isinstance(part, ModeBipartition) else tuple(sorted(part))
        for cand, lam in self.candidates:
            if cand.side_a == side:
                return lam
        raise KeyError(side)

    def ranked(self) -> list[tuple[ModeBipartition, float]]:
        """Candidates sorted by eigenvalue, largest first."""
        return sorted(self.candidates, key=lambda c: (-c[1], c[0].side_a))
