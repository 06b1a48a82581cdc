"""Sparse inequality systems for the full cutting polytope and its
availability-only relaxation."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .model import Discretization, Instance


@dataclass(frozen=True)
class SparseMatrix:
    """COO storage; at most one entry per (row, col)."""

    n_rows: int
    n_cols: int
    rows: np.ndarray
    cols: np.ndarray
    vals: np.ndarray

    @property
    def nnz(self) -> int:
        return len(self.vals)

    def entries(self):
        return list(zip(self.rows.tolist(), self.cols.tolist(), self.vals.tolist()))

    def toarray(self) -> np.ndarray:
        out = np.zeros((self.n_rows, self.n_cols))
        out[self.rows, self.cols] = self.vals
        return out

    def dot(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        return np.bincount(self.rows, weights=self.vals * x[self.cols], minlength=self.n_rows)

    def row_nnz(self) -> np.ndarray:
        return np.bincount(self.rows, minlength=self.n_rows)


# row labels: ("overlap", r, s) or ("availability", i)
RowLabel = tuple


@dataclass(frozen=True)
class Polytope:
    """``{x : matrix @ x <= rhs, 0 <= x <= 1}``."""

    matrix: SparseMatrix
    rhs: np.ndarray
    labels: tuple[RowLabel, ...]

    @property
    def n_rows(self) -> int:
        return self.matrix.n_rows

    @property
    def n_cols(self) -> int:
        return self.matrix.n_cols

    def activity(self, x) -> np.ndarray:
        return self.matrix.dot(x)

    def contains(self, x, tol: float = 1e-9) -> bool:
        x = np.asarray(x, dtype=float)
        if np.any(x < -tol) or np.any(x > 1 + tol):
            return False
        return bool(np.all(self.activity(x) <= self.rhs + tol))

    def overlap_rows(self) -> np.ndarray:
        return np.array([k for k, lab in enumerate(self.labels) if lab[0] == "overlap"], dtype=np.int64)


def _coverage(disc: Discretization):
    """Yield (row, col) pairs of the overlap block, rows in (r, s) order."""
    inst, grid, idx = disc.instance, disc.grid, disc.index
    P = np.asarray(grid.P)
    Q = np.asarray(grid.Q)
    nq = len(Q)
    rows, cols = [], []
    for j, (i, p, q) in enumerate(idx.triples()):
        pc = inst.pieces[i]
        r0, r1 = np.searchsorted(P, p), np.searchsorted(P, p + pc.length)
        s0, s1 = np.searchsorted(Q, q), np.searchsorted(Q, q + pc.width)
        rr = np.arange(r0, r1)[:, None] * nq + np.arange(s0, s1)[None, :]
        rows.append(rr.ravel())
        cols.append(np.full(rr.size, j))
    if rows:
        return np.concatenate(rows), np.concatenate(cols)
    return np.zeros(0, dtype=np.int64), np.zeros(0, dtype=np.int64)


def _availability(disc: Discretization, first_row: int):
    rows = first_row + disc.index.piece
    cols = np.arange(disc.index.n)
    return rows, cols


def _assemble(blocks, n_rows, n_cols, rhs, labels) -> Polytope:
    rows = np.concatenate([b[0] for b in blocks]).astype(np.int64)
    cols = np.concatenate([b[1] for b in blocks]).astype(np.int64)
    order = np.lexsort((cols, rows))
    rows, cols = rows[order], cols[order]
    mat = SparseMatrix(n_rows, n_cols, rows, cols, np.ones(len(rows)))
    return Polytope(mat, np.asarray(rhs, dtype=float), tuple(labels))


def _drop_empty(poly: Polytope) -> Polytope:
    keep = np.flatnonzero(poly.matrix.row_nnz() > 0)
    remap = np.full(poly.n_rows, -1, dtype=np.int64)
    remap[keep] = np.arange(len(keep))
    m = poly.matrix
    mat = SparseMatrix(len(keep), m.n_cols, remap[m.rows], m.cols, m.vals)
    return Polytope(mat, poly.rhs[keep], tuple(poly.labels[k] for k in keep))


def build_A(disc: Discretization, drop_empty: bool = False) -> Polytope:
    """Full polytope: one overlap row per (r, s) in P x Q, then one
    availability row per piece type."""
    inst, grid, idx = disc.instance, disc.grid, disc.index
    n_cells = len(grid.P) * len(grid.Q)
    ov_rows, ov_cols = _coverage(disc)
    av_rows, av_cols = _availability(disc, n_cells)
    labels = [("overlap", r, s) for r in grid.P for s in grid.Q]
    labels += [("availability", i) for i in range(inst.m)]
    rhs = np.concatenate([np.ones(n_cells), [pc.max_count for pc in inst.pieces]])
    poly = _assemble([(ov_rows, ov_cols), (av_rows, av_cols)], n_cells + inst.m, idx.n, rhs, labels)
    return _drop_empty(poly) if drop_empty else poly


def build_B(disc: Discretization) -> Polytope:
    """Availability rows only."""
    inst, idx = disc.instance, disc.index
    av_rows, av_cols = _availability(disc, 0)
    labels = [("availability", i) for i in range(inst.m)]
    rhs = [pc.max_count for pc in inst.pieces]
    return _assemble([(av_rows, av_cols)], inst.m, idx.n, rhs, labels)


def objective_vector(disc: Discretization) -> np.ndarray:
    values = np.array([pc.value for pc in disc.instance.pieces], dtype=float)
    return values[disc.index.piece] if disc.index.n else np.zeros(0)


def model_stats(instance) -> dict:
    """Model sizes; ``n_rows_nonzero`` drops rows without any coefficient."""
    if isinstance(instance, Formulation):
        disc, A = instance.disc, instance.A
    else:
        disc = instance if isinstance(instance, Discretization) else Discretization.of(instance)
        A = build_A(disc)
    return {
        "m": disc.instance.m,
        "n_P": len(disc.grid.P),
        "n_Q": len(disc.grid.Q),
        "n_vars": disc.index.n,
        "n_rows_raw": A.n_rows,
        "n_rows_nonzero": int(np.count_nonzero(A.matrix.row_nnz())),
    }


class Formulation:
    """Discretization plus the two polytopes and the value vector, built once."""

    def __init__(self, instance: Instance):
        self.disc = Discretization.of(instance)
        self.instance = instance
        self.grid = self.disc.grid
        self.index = self.disc.index
        self.A = build_A(self.disc)
        self.B = build_B(self.disc)
        self.v = objective_vector(self.disc)
        self.overlap = self.A.overlap_rows()

    @property
    def n(self) -> int:
        return self.index.n
