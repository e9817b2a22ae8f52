"""Periodic centered difference operators and a cyclic banded linear solver.

The three stencils used by the time steppers are the classical centered
discretizations on a periodic grid:

    (D1 u)_i = (u_{i+1} - u_{i-1}) / (2 dx)
    (D2 u)_i = (u_{i+1} - 2 u_i + u_{i-1}) / dx^2
    (D3 u)_i = (u_{i+2} - 2 u_{i+1} + 2 u_{i-1} - u_{i-2}) / (2 dx^3)

D1 and D3 are exactly antisymmetric and D2 exactly symmetric with respect to
the discrete inner product, which is what makes the conservation structure of
the steppers hold at the discrete level.

Per-step linear systems are cyclic banded matrices (band plus wrap-around
corners).  They are solved with a banded LU on the corner-stripped band and a
low-rank Woodbury correction for the corners; a dense path handles small
systems (n <= 64) and serves as the reference in tests.
"""

from __future__ import annotations

import numpy as np
from scipy.linalg import solve_banded

from .errors import GridMismatchError, SolverError
from .grid import Field, Grid1D

__all__ = [
    "CyclicBandedOperator",
    "CyclicBandedMatrix",
    "make_d1",
    "make_d2",
    "make_d3",
    "apply",
    "solve",
]

# Residual acceptance threshold for solve(): ||A x - b||_inf <= RTOL * ||b||_inf.
_SOLVE_RTOL = 1e-10
# Condition-number guard corresponding to the "pivot below 1e-14" abort.
_COND_LIMIT = 1e14
_DENSE_LIMIT = 64


class CyclicBandedOperator:
    """Translation-invariant periodic stencil: (A u)_i = sum_j c_j u_{(i+off_j) mod n}."""

    def __init__(self, offsets, coeffs, n: int):
        offsets = tuple(int(o) for o in offsets)
        coeffs = tuple(float(c) for c in coeffs)
        if len(offsets) != len(coeffs):
            raise ValueError("offsets and coeffs must have equal length")
        if len(set(offsets)) != len(offsets):
            raise ValueError("duplicate stencil offsets")
        if max(abs(o) for o in offsets) > 2:
            raise ValueError("stencil offsets wider than +-2 are not supported")
        self.offsets = offsets
        self.coeffs = coeffs
        self.n = int(n)

    def apply_values(self, values: np.ndarray) -> np.ndarray:
        if values.shape != (self.n,):
            raise GridMismatchError(
                f"operator dimension {self.n} does not match vector length {values.shape}"
            )
        out = np.zeros_like(values)
        for off, c in zip(self.offsets, self.coeffs):
            out += c * np.roll(values, -off)
        return out

    def as_dense(self) -> np.ndarray:
        dense = np.zeros((self.n, self.n))
        rows = np.arange(self.n)
        for off, c in zip(self.offsets, self.coeffs):
            dense[rows, (rows + off) % self.n] += c
        return dense


def make_d1(grid: Grid1D) -> CyclicBandedOperator:
    """Centered first derivative."""
    h = grid.dx
    return CyclicBandedOperator((-1, 1), (-0.5 / h, 0.5 / h), grid.num_points)


def make_d2(grid: Grid1D) -> CyclicBandedOperator:
    """Centered second derivative."""
    h = grid.dx
    return CyclicBandedOperator((-1, 0, 1), (1.0 / h**2, -2.0 / h**2, 1.0 / h**2), grid.num_points)


def make_d3(grid: Grid1D) -> CyclicBandedOperator:
    """Five-point antisymmetric centered third derivative."""
    h = grid.dx
    s = 1.0 / (2.0 * h**3)
    return CyclicBandedOperator((-2, -1, 1, 2), (-s, 2.0 * s, -2.0 * s, s), grid.num_points)


def apply(op: CyclicBandedOperator, f: Field) -> Field:
    """Matrix-vector product with periodic wrap."""
    return Field(op.apply_values(f.values), f.grid)


class CyclicBandedMatrix:
    """Cyclic banded matrix with position-dependent band entries.

    Storage is dense-in-band: ``data[offset][i]`` holds A[i, (i+offset) mod n].
    Rows can be accumulated from stencil operators sandwiched between diagonal
    matrices, which covers every term the time steppers assemble:

        A += scale * diag(pre) @ Op @ diag(post)

    ``add_strided_band`` additionally supports interleaved block systems (the
    coupled stepper stores its two unknowns as z = (v_0, e_0, v_1, e_1, ...)).
    """

    def __init__(self, n: int, max_offset: int = 5):
        self.n = int(n)
        self.max_offset = int(max_offset)
        self.data = {}

    def _band(self, offset: int) -> np.ndarray:
        if abs(offset) > self.max_offset:
            raise ValueError(f"offset {offset} exceeds declared bandwidth {self.max_offset}")
        if offset not in self.data:
            self.data[offset] = np.zeros(self.n)
        return self.data[offset]

    def add_diagonal(self, values) -> None:
        self._band(0)[:] += values

    def add_strided_band(self, offset: int, values, row_start: int = 0, row_step: int = 1) -> None:
        """A[r, (r+offset) mod n] += values for rows r = row_start, row_start+row_step, ..."""
        self._band(offset)[row_start::row_step] += values

    def add_operator(self, op: CyclicBandedOperator, pre_diag=None, post_diag=None,
                     scale: float = 1.0) -> None:
        """A += scale * diag(pre_diag) @ op @ diag(post_diag) (diags optional)."""
        if op.n != self.n:
            raise GridMismatchError("operator dimension does not match matrix")
        for off, c in zip(op.offsets, op.coeffs):
            contrib = np.full(self.n, scale * c)
            if pre_diag is not None:
                contrib = contrib * pre_diag
            if post_diag is not None:
                contrib = contrib * np.roll(post_diag, -off)
            self._band(off)[:] += contrib

    @property
    def bandwidth(self) -> int:
        if not self.data:
            return 0
        return max(abs(o) for o in self.data)

    def matvec(self, x: np.ndarray) -> np.ndarray:
        if x.shape != (self.n,):
            raise GridMismatchError("vector length does not match matrix dimension")
        out = np.zeros_like(x, dtype=float)
        for off, vals in self.data.items():
            out += vals * np.roll(x, -off)
        return out

    def to_dense(self) -> np.ndarray:
        dense = np.zeros((self.n, self.n))
        rows = np.arange(self.n)
        for off, vals in self.data.items():
            dense[rows, (rows + off) % self.n] += vals
        return dense

    def solve(self, rhs: np.ndarray) -> np.ndarray:
        """Solve A x = rhs to ||A x - rhs||_inf <= 1e-10 ||rhs||_inf.

        Dispatches to a dense solve for n <= 64 (and whenever the band wraps
        most of the matrix), otherwise to banded LU plus Woodbury corner
        correction.  Singular or ill-conditioned systems raise SolverError.
        """
        rhs = np.asarray(rhs, dtype=float)
        if rhs.shape != (self.n,):
            raise GridMismatchError("rhs length does not match matrix dimension")
        p = self.bandwidth
        if self.n <= max(_DENSE_LIMIT, 4 * p + 2):
            x = self._solve_dense(rhs)
        else:
            x = self._solve_banded_woodbury(rhs, p)
        self._check_residual(x, rhs)
        return x

    def _solve_dense(self, rhs: np.ndarray) -> np.ndarray:
        dense = self.to_dense()
        if np.linalg.cond(dense, 1) > _COND_LIMIT:
            raise SolverError("matrix is singular or ill-conditioned (dense path)")
        try:
            return np.linalg.solve(dense, rhs)
        except np.linalg.LinAlgError as exc:
            raise SolverError(f"dense solve failed: {exc}") from exc

    def _solve_banded_woodbury(self, rhs: np.ndarray, p: int) -> np.ndarray:
        n = self.n
        # Corner-stripped band in solve_banded layout: ab[p - off, i + off].
        ab = np.zeros((2 * p + 1, n))
        corner_cols: dict[int, np.ndarray] = {}
        for off, vals in self.data.items():
            i = np.arange(n)
            j = i + off
            inband = (j >= 0) & (j < n)
            ab[p - off, i[inband] + off] += vals[inband]
            for ii in i[~inband]:
                jj = (ii + off) % n
                col = corner_cols.setdefault(jj, np.zeros(n))
                col[ii] += vals[ii]
        try:
            if corner_cols:
                cols = sorted(corner_cols)
                u_mat = np.column_stack([corner_cols[j] for j in cols])
                stacked = np.column_stack([rhs, u_mat])
                sol = solve_banded((p, p), ab, stacked)
                y, z_mat = sol[:, 0], sol[:, 1:]
                capacitance = np.eye(len(cols)) + z_mat[cols, :]
                if np.linalg.cond(capacitance, 1) > _COND_LIMIT:
                    raise SolverError("corner correction is ill-conditioned")
                correction = np.linalg.solve(capacitance, y[cols])
                return y - z_mat @ correction
            return solve_banded((p, p), ab, rhs)
        except np.linalg.LinAlgError as exc:
            raise SolverError(f"banded solve failed: {exc}") from exc
        except ValueError as exc:
            raise SolverError(f"banded solve rejected the system: {exc}") from exc

    def _check_residual(self, x: np.ndarray, rhs: np.ndarray) -> None:
        residual = np.max(np.abs(self.matvec(x) - rhs))
        scale = max(np.max(np.abs(rhs)), 1e-300)
        if not np.isfinite(residual) or residual > _SOLVE_RTOL * scale:
            raise SolverError(
                f"solver residual {residual:.3e} exceeds {_SOLVE_RTOL:.1e} * ||rhs||_inf"
            )


def solve(matrix: CyclicBandedMatrix, rhs: np.ndarray) -> np.ndarray:
    """Functional form of CyclicBandedMatrix.solve."""
    return matrix.solve(rhs)
