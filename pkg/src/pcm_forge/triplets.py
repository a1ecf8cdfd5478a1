"""Minimal COO sparse matrix: products via bincount, no scipy dependency."""

from __future__ import annotations

import numpy as np


class TripletMatrix:
    """Sparse matrix in triplet form supporting A @ x and A.T @ y.

    Duplicate (row, col) entries accumulate, matching COO semantics.
    """

    __slots__ = ("n_rows", "n_cols", "rows", "cols", "vals")

    def __init__(self, n_rows: int, n_cols: int, rows, cols, vals):
        self.n_rows = int(n_rows)
        self.n_cols = int(n_cols)
        self.rows = np.asarray(rows, dtype=np.intp)
        self.cols = np.asarray(cols, dtype=np.intp)
        self.vals = np.asarray(vals, dtype=float)
        if not (self.rows.shape == self.cols.shape == self.vals.shape):
            raise ValueError("triplet arrays must have identical shape")

    @classmethod
    def from_dense(cls, A) -> "TripletMatrix":
        A = np.asarray(A, dtype=float)
        rows, cols = np.nonzero(A)
        return cls(A.shape[0], A.shape[1], rows, cols, A[rows, cols])

    def matvec(self, x: np.ndarray) -> np.ndarray:
        return np.bincount(
            self.rows, weights=self.vals * x[self.cols], minlength=self.n_rows
        )

    def rmatvec(self, y: np.ndarray) -> np.ndarray:
        return np.bincount(
            self.cols, weights=self.vals * y[self.rows], minlength=self.n_cols
        )

    def toarray(self) -> np.ndarray:
        A = np.zeros((self.n_rows, self.n_cols))
        np.add.at(A, (self.rows, self.cols), self.vals)
        return A

    def with_values(self, vals) -> "TripletMatrix":
        """Same pattern, new values (no copies of the index arrays)."""
        out = TripletMatrix.__new__(TripletMatrix)
        out.n_rows = self.n_rows
        out.n_cols = self.n_cols
        out.rows = self.rows
        out.cols = self.cols
        out.vals = np.asarray(vals, dtype=float)
        return out
