import numpy as np
import pytest

from nvortex import (
    BradlowViolation,
    ConformalDisk,
    VortexConfiguration,
    build_grid,
    build_singular_part,
    reconstruct_h,
    solve_taubes_2d,
)


@pytest.fixture(scope="module")
def centered64(disk3):
    grid = build_grid(disk3, 64, 64)
    field, report = solve_taubes_2d(disk3, VortexConfiguration.centered(1), grid)
    return grid, field, report


class TestNewtonSolve:
    def test_converges_with_decreasing_residuals(self, centered64):
        _, _, report = centered64
        assert report.converged
        assert report.iterations <= 50
        history = report.residual_history
        assert all(b < a for a, b in zip(history, history[1:]))

    def test_matches_radial_oracle(self, centered64, radial_r3):
        grid, field, _ = centered64
        err = np.max(np.abs(field.values - radial_r3.htilde_at(grid.r)[:, None]))
        assert err < 2e-3  # discretisation error at 64x64, second order

    def test_rotational_symmetry_of_centered_solve(self, centered64):
        _, field, _ = centered64
        assert np.max(np.ptp(field.values, axis=1)) < 1e-9

    def test_discrete_flux_balance(self, disk3):
        grid = build_grid(disk3, 96, 96)
        _, report = solve_taubes_2d(
            disk3, VortexConfiguration.centered(1), grid, tol=1e-10
        )
        assert report.converged
        assert report.bc_residual < 1e-8

    def test_gate_refuses_overfilled_disk(self, disk3):
        grid = build_grid(disk3, 16, 16)
        with pytest.raises(BradlowViolation):
            solve_taubes_2d(disk3, VortexConfiguration.centered(3), grid)

    def test_max_iter_exhaustion_reports_not_converged(self, disk3):
        grid = build_grid(disk3, 16, 16)
        _, report = solve_taubes_2d(
            disk3, VortexConfiguration.centered(1), grid, max_iter=1
        )
        assert not report.converged
        assert report.iterations == 1

    def test_unknown_linear_solver_rejected(self, disk3):
        grid = build_grid(disk3, 16, 16)
        with pytest.raises(ValueError):
            solve_taubes_2d(disk3, VortexConfiguration.centered(1), grid, linear_solver="lu")

    def test_cg_path_matches_direct(self, disk3):
        grid = build_grid(disk3, 32, 32)
        cfg = VortexConfiguration(interior=((0.4 + 0.1j, 1),))
        f_cg, rep_cg = solve_taubes_2d(disk3, cfg, grid, linear_solver="cg")
        f_direct, _ = solve_taubes_2d(disk3, cfg, grid, linear_solver="direct")
        assert rep_cg.converged
        assert np.max(np.abs(f_cg.values - f_direct.values)) < 1e-8


class TestSymmetries:
    def test_rotational_equivariance(self, disk3):
        grid = build_grid(disk3, 48, 48)
        cfg = VortexConfiguration(interior=((0.9 + 0j, 1),))
        base, _ = solve_taubes_2d(disk3, cfg, grid)
        k = 7
        rotated, _ = solve_taubes_2d(disk3, cfg.rotated(k * grid.dtheta), grid)
        err = np.max(np.abs(np.roll(base.values, k, axis=1) - rotated.values))
        assert err < 1e-9

    def test_reflection_symmetry(self, disk3):
        grid = build_grid(disk3, 48, 48)
        field, _ = solve_taubes_2d(disk3, VortexConfiguration.boundary_point(0.0), grid)
        flipped = field.values[:, (-np.arange(grid.ntheta)) % grid.ntheta]
        assert np.max(np.abs(field.values - flipped)) < 1e-9


class TestReconstruction:
    def test_field_modulus_below_one(self, disk3, centered64):
        grid, field, _ = centered64
        singular = build_singular_part(VortexConfiguration.centered(1), disk3, grid)
        h = reconstruct_h(field, singular)
        assert np.max(h.values) <= 1e-6

    def test_core_suppression(self, disk3, centered64):
        grid, field, _ = centered64
        singular = build_singular_part(VortexConfiguration.centered(1), disk3, grid)
        h = reconstruct_h(field, singular)
        assert np.all(np.exp(h.values[0]) < 1e-2)  # nodes adjacent to the core

    def test_far_field_approaches_vacuum_on_large_disk(self):
        disk = ConformalDisk.flat(12.0)
        grid = build_grid(disk, 96, 96)
        field, report = solve_taubes_2d(disk, VortexConfiguration.centered(1), grid)
        assert report.converged
        singular = build_singular_part(VortexConfiguration.centered(1), disk, grid)
        h = reconstruct_h(field, singular)
        mid = grid.nr // 2
        assert np.exp(h.values[mid, 0]) > 0.9

    def test_grid_mismatch_rejected(self, disk3, centered64):
        _, field, _ = centered64
        other = build_grid(disk3, 32, 32)
        singular = build_singular_part(VortexConfiguration.centered(1), disk3, other)
        with pytest.raises(ValueError):
            reconstruct_h(field, singular)

    def test_solve_on_curved_disk_converges(self):
        r = np.linspace(0.0, 3.0, 61)
        disk = ConformalDisk.from_samples(3.0, r, 1.0 + 0.2 * r)
        grid = build_grid(disk, 32, 32)
        field, report = solve_taubes_2d(disk, VortexConfiguration.centered(1), grid)
        assert report.converged
        assert report.bc_residual < 1e-7
