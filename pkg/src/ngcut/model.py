"""Problem instances and the position discretization.

Piece corners are restricted to *normal patterns*: coordinates reachable
as non-negative integer combinations of piece lengths (widths) that still
leave room for the shortest (narrowest) piece.
"""

from __future__ import annotations

from bisect import bisect_right
from dataclasses import dataclass, field

import numpy as np


@dataclass(frozen=True)
class Piece:
    length: int
    width: int
    value: int
    max_count: int


@dataclass(frozen=True)
class Instance:
    stock_length: int
    stock_width: int
    pieces: tuple[Piece, ...]
    name: str = "instance"

    def __post_init__(self):
        object.__setattr__(self, "pieces", tuple(self.pieces))

    @property
    def m(self) -> int:
        return len(self.pieces)

    def fits(self, i: int) -> bool:
        pc = self.pieces[i]
        return pc.length <= self.stock_length and pc.width <= self.stock_width


@dataclass
class ValidationReport:
    errors: list[str] = field(default_factory=list)
    warnings: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.errors

    def __bool__(self) -> bool:
        return self.ok


def validate_instance(instance: Instance) -> ValidationReport:
    """Check dimensions and pieces; oversized pieces only produce warnings."""
    rep = ValidationReport()
    if instance.stock_length < 1 or instance.stock_width < 1:
        rep.errors.append(
            f"non-positive stock dimension: {instance.stock_length}x{instance.stock_width}"
        )
    if not instance.pieces:
        rep.errors.append("empty piece list")
    for i, pc in enumerate(instance.pieces):
        bad = False
        for fname in ("length", "width", "value", "max_count"):
            val = getattr(pc, fname)
            if not isinstance(val, (int, np.integer)) or val < 1:
                rep.errors.append(f"piece {i}: {fname} must be a positive integer, got {val!r}")
                bad = True
        if not bad and not instance.fits(i):
            rep.warnings.append(
                f"piece {i} ({pc.length}x{pc.width}) exceeds the "
                f"{instance.stock_length}x{instance.stock_width} stock and generates no variables"
            )
    return rep


def reachable_combinations(sizes, cap: int) -> list[int]:
    """Sorted values in [0, cap] expressible as non-negative integer
    combinations of ``sizes`` (unbounded subset-sum)."""
    if cap < 0:
        return [0]
    reach = np.zeros(cap + 1, dtype=bool)
    reach[0] = True
    for v in range(1, cap + 1):
        for s in sizes:
            if s <= v and reach[v - s]:
                reach[v] = True
                break
    return np.flatnonzero(reach).tolist()


@dataclass(frozen=True)
class PositionGrid:
    P: tuple[int, ...]
    Q: tuple[int, ...]
    P_i: tuple[tuple[int, ...], ...]
    Q_i: tuple[tuple[int, ...], ...]


def compute_positions(instance: Instance) -> PositionGrid:
    L, W = instance.stock_length, instance.stock_width
    usable = [pc for i, pc in enumerate(instance.pieces) if instance.fits(i)]
    if not usable:
        P, Q = [0], [0]
    else:
        lengths = sorted({pc.length for pc in usable})
        widths = sorted({pc.width for pc in usable})
        P = reachable_combinations(lengths, L - lengths[0])
        Q = reachable_combinations(widths, W - widths[0])
    P_i, Q_i = [], []
    for i, pc in enumerate(instance.pieces):
        if instance.fits(i):
            P_i.append(tuple(P[: bisect_right(P, L - pc.length)]))
            Q_i.append(tuple(Q[: bisect_right(Q, W - pc.width)]))
        else:
            P_i.append(())
            Q_i.append(())
    return PositionGrid(tuple(P), tuple(Q), tuple(P_i), tuple(Q_i))


def coefficient(instance: Instance, i: int, p: int, q: int, r: int, s: int) -> int:
    """1 when piece ``i`` cornered at (p, q) covers the unit cell (r, s)."""
    pc = instance.pieces[i]
    return int(p <= r <= p + pc.length - 1 and q <= s <= q + pc.width - 1)


class VarIndex:
    """Bijection between placements (i, p, q) and LP columns.

    Columns are ordered by piece, then p ascending, then q ascending.
    """

    def __init__(self, grid: PositionGrid):
        triples = [
            (i, p, q)
            for i, (ps, qs) in enumerate(zip(grid.P_i, grid.Q_i))
            for p in ps
            for q in qs
        ]
        self._triples = tuple(triples)
        self._cols = {t: j for j, t in enumerate(triples)}
        self.piece = np.array([t[0] for t in triples], dtype=np.int64)
        self.p = np.array([t[1] for t in triples], dtype=np.int64)
        self.q = np.array([t[2] for t in triples], dtype=np.int64)

    @property
    def n(self) -> int:
        return len(self._triples)

    def __len__(self) -> int:
        return self.n

    def column(self, i: int, p: int, q: int) -> int:
        return self._cols[(i, p, q)]

    def triple(self, j: int) -> tuple[int, int, int]:
        return self._triples[j]

    def triples(self) -> tuple[tuple[int, int, int], ...]:
        return self._triples

    def columns_of(self, i: int) -> np.ndarray:
        return np.flatnonzero(self.piece == i)


def build_var_index(grid: PositionGrid) -> VarIndex:
    return VarIndex(grid)


@dataclass(frozen=True)
class Discretization:
    """Everything derived from an instance before formulating the LPs."""

    instance: Instance
    grid: PositionGrid
    index: VarIndex

    @classmethod
    def of(cls, instance: Instance) -> "Discretization":
        grid = compute_positions(instance)
        return cls(instance, grid, build_var_index(grid))
