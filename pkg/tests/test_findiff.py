import math

import numpy as np
import pytest

from longwave.errors import GridMismatchError, SolverError
from longwave.findiff import (
    CyclicBandedMatrix,
    CyclicBandedOperator,
    apply,
    make_d1,
    make_d2,
    make_d3,
    solve,
)
from longwave.grid import Field, Grid1D
from conftest import random_field


def _inner(grid, a, b):
    return grid.dx * float(np.dot(a, b))


class TestStencils:
    def test_d1_hand_check(self):
        # n=4, dx=1: evaluate the raw stencil arithmetic directly.
        op = CyclicBandedOperator((-1, 1), (-0.5, 0.5), 4)
        out = op.apply_values(np.array([0.0, 1.0, 0.0, -1.0]))
        np.testing.assert_allclose(out, [1.0, 0.0, -1.0, 0.0])

    def test_d2_hand_check(self):
        op = CyclicBandedOperator((-1, 0, 1), (1.0, -2.0, 1.0), 4)
        out = op.apply_values(np.array([1.0, 0.0, 0.0, 0.0]))
        np.testing.assert_allclose(out, [-2.0, 1.0, 0.0, 1.0])

    def test_d3_matches_dense_stencil(self):
        grid = Grid1D(8, 0.5)
        op = make_d3(grid)
        dense = op.as_dense()
        rng = np.random.default_rng(7)
        u = rng.standard_normal(8)
        np.testing.assert_allclose(op.apply_values(u), dense @ u, atol=1e-13)

    def test_constants_annihilated(self):
        grid = Grid1D(32, 0.1)
        c = np.full(32, 3.7)
        for make in (make_d1, make_d2, make_d3):
            np.testing.assert_allclose(make(grid).apply_values(c), 0.0, atol=1e-11)

    @pytest.mark.parametrize("make,order,deriv", [
        (make_d1, 1, lambda q, x: q * np.cos(q * x)),
        (make_d2, 2, lambda q, x: -q**2 * np.sin(q * x)),
        (make_d3, 3, lambda q, x: -q**3 * np.cos(q * x)),
    ])
    def test_sine_wave_accuracy(self, make, order, deriv):
        grid = Grid1D(256, 40.0 / 256)
        q = 2 * np.pi / grid.length
        u = np.sin(q * grid.nodes)
        exact = deriv(q, grid.nodes)
        err = np.max(np.abs(make(grid).apply_values(u) - exact))
        assert err < 10.0 * grid.dx**2 * q ** (order + 2)

    @pytest.mark.parametrize("make", [make_d1, make_d2, make_d3])
    def test_second_order_convergence(self, make):
        def max_err(n):
            grid = Grid1D(n, 40.0 / n)
            q = 2 * np.pi / grid.length
            u = np.sin(q * grid.nodes)
            out = make(grid).apply_values(u)
            if make is make_d1:
                exact = q * np.cos(q * grid.nodes)
            elif make is make_d2:
                exact = -q**2 * np.sin(q * grid.nodes)
            else:
                exact = -q**3 * np.cos(q * grid.nodes)
            return np.max(np.abs(out - exact))

        order = math.log2(max_err(128) / max_err(256))
        assert 1.9 <= order <= 2.1

    def test_apply_wrapper_and_dimension_check(self, small_grid, rng):
        f = random_field(small_grid, rng)
        d1 = make_d1(small_grid)
        out = apply(d1, f)
        np.testing.assert_allclose(out.values, d1.apply_values(f.values))
        with pytest.raises(GridMismatchError):
            d1.apply_values(np.zeros(10))

    def test_apply_matches_dense_on_random(self, rng):
        grid = Grid1D(32, 0.2)
        f = rng.standard_normal(32)
        for make in (make_d1, make_d2, make_d3):
            op = make(grid)
            np.testing.assert_allclose(op.apply_values(f), op.as_dense() @ f, atol=1e-13)

    def test_identity_operator(self, rng):
        op = CyclicBandedOperator((0,), (1.0,), 16)
        f = rng.standard_normal(16)
        np.testing.assert_allclose(op.apply_values(f), f)


class TestOperatorAlgebra:
    def test_d1_antisymmetric(self, rng):
        grid = Grid1D(48, 0.3)
        d1 = make_d1(grid)
        for _ in range(3):
            f, g = rng.standard_normal(48), rng.standard_normal(48)
            lhs = _inner(grid, d1.apply_values(f), g) + _inner(grid, f, d1.apply_values(g))
            scale = max(abs(_inner(grid, d1.apply_values(f), g)), 1.0)
            assert abs(lhs) < 1e-12 * scale

    def test_d3_antisymmetric(self, rng):
        grid = Grid1D(48, 0.3)
        d3 = make_d3(grid)
        f, g = rng.standard_normal(48), rng.standard_normal(48)
        lhs = _inner(grid, d3.apply_values(f), g) + _inner(grid, f, d3.apply_values(g))
        assert abs(lhs) < 1e-12 * max(abs(_inner(grid, d3.apply_values(f), g)), 1.0)

    def test_d2_symmetric_and_negative(self, rng):
        grid = Grid1D(48, 0.3)
        d2 = make_d2(grid)
        f, g = rng.standard_normal(48), rng.standard_normal(48)
        lhs = _inner(grid, d2.apply_values(f), g)
        rhs = _inner(grid, f, d2.apply_values(g))
        assert lhs == pytest.approx(rhs, rel=1e-12, abs=1e-12)
        assert _inner(grid, d2.apply_values(f), f) <= 1e-12


def _random_cyclic_banded(n, rng, max_offset=2, diag_boost=4.0):
    m = CyclicBandedMatrix(n, max_offset=max_offset)
    for off in range(-max_offset, max_offset + 1):
        vals = rng.standard_normal(n)
        if off == 0:
            vals += diag_boost
        m.add_strided_band(off, vals)
    return m


class TestSolve:
    def test_identity_returns_rhs(self, rng):
        n = 32
        m = CyclicBandedMatrix(n)
        m.add_diagonal(np.ones(n))
        rhs = rng.standard_normal(n)
        np.testing.assert_allclose(solve(m, rhs), rhs, atol=1e-14)

    def test_diffusion_like_matches_dense(self, rng):
        grid = Grid1D(32, 0.5)
        m = CyclicBandedMatrix(32)
        m.add_diagonal(np.ones(32))
        m.add_operator(make_d2(grid), scale=0.1)
        rhs = rng.standard_normal(32)
        x = solve(m, rhs)
        x_dense = np.linalg.solve(m.to_dense(), rhs)
        np.testing.assert_allclose(x, x_dense, atol=1e-12)

    def test_singular_matrix_raises(self):
        # all-ones five-band circulant; its symbol 1 + 2cos(t) + 2cos(2t)
        # vanishes at t = 2*pi/5, so n = 20 makes the matrix rank-deficient
        n = 20
        m = CyclicBandedMatrix(n)
        for off in (-2, -1, 0, 1, 2):
            m.add_strided_band(off, np.ones(n))
        assert np.linalg.matrix_rank(m.to_dense()) < n
        with pytest.raises(SolverError):
            solve(m, np.ones(n))

    def test_woodbury_path_matches_dense(self, rng):
        n = 200  # large enough to take the banded + corner-correction path
        m = _random_cyclic_banded(n, rng)
        rhs = rng.standard_normal(n)
        x = m.solve(rhs)
        np.testing.assert_allclose(x, np.linalg.solve(m.to_dense(), rhs), atol=1e-10)

    def test_residual_contract(self, rng):
        n = 300
        m = _random_cyclic_banded(n, rng)
        rhs = rng.standard_normal(n)
        x = m.solve(rhs)
        residual = np.max(np.abs(m.matvec(x) - rhs))
        assert residual <= 1e-10 * np.max(np.abs(rhs))

    def test_matrix_assembly_matches_dense_construction(self, rng):
        # identity plus scaled stencils, checked entry by entry on a small n
        grid = Grid1D(12, 0.4)
        m = CyclicBandedMatrix(12)
        m.add_diagonal(2.0 * np.ones(12))
        pre = rng.standard_normal(12)
        m.add_operator(make_d1(grid), pre_diag=pre, scale=0.3)
        post = rng.standard_normal(12)
        m.add_operator(make_d3(grid), post_diag=post, scale=-0.1)
        dense = (
            2.0 * np.eye(12)
            + 0.3 * np.diag(pre) @ make_d1(grid).as_dense()
            - 0.1 * make_d3(grid).as_dense() @ np.diag(post)
        )
        np.testing.assert_allclose(m.to_dense(), dense, atol=1e-13)

    def test_solve_after_assemble_roundtrip(self, rng):
        # solve(A, A @ x) == x for a stepper-like system matrix
        grid = Grid1D(128, 0.05)
        m = CyclicBandedMatrix(128)
        m.add_diagonal(np.full(128, 2.0 / 0.05))
        m.add_operator(make_d1(grid))
        m.add_operator(make_d3(grid), scale=0.2 / 6.0)
        m.add_operator(make_d1(grid), pre_diag=rng.standard_normal(128) * 0.1)
        x = rng.standard_normal(128)
        x_hat = m.solve(m.matvec(x))
        assert np.max(np.abs(x_hat - x)) <= 1e-10 * np.max(np.abs(x))

    def test_rhs_dimension_check(self):
        m = CyclicBandedMatrix(16)
        m.add_diagonal(np.ones(16))
        with pytest.raises(GridMismatchError):
            m.solve(np.ones(8))

    def test_interleaved_strided_bands(self):
        # two interleaved unknowns with distinct diagonals
        m = CyclicBandedMatrix(8, max_offset=3)
        m.add_strided_band(0, np.full(4, 2.0), row_start=0, row_step=2)
        m.add_strided_band(0, np.full(4, 3.0), row_start=1, row_step=2)
        m.add_strided_band(1, np.full(4, 0.5), row_start=0, row_step=2)
        dense = m.to_dense()
        assert dense[0, 0] == 2.0 and dense[1, 1] == 3.0
        assert dense[2, 3] == 0.5 and dense[3, 2] == 0.0
