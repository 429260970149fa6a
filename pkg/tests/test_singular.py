import math

import numpy as np
import pytest

from nvortex import ConformalDisk, VortexConfiguration, build_grid, build_singular_part


@pytest.fixture(scope="module")
def grid64(disk3):
    return build_grid(disk3, 64, 64)


class TestNeumannData:
    def test_centered_unit_vortex(self, disk3, grid64):
        sp = build_singular_part(VortexConfiguration.centered(1), disk3, grid64)
        assert np.allclose(sp.neumann_data, -2.0 / 3.0, atol=1e-12)

    def test_boundary_vortex(self, disk3, grid64):
        sp = build_singular_part(VortexConfiguration.boundary_point(0.0), disk3, grid64)
        assert np.allclose(sp.neumann_data, -1.0 / 3.0, atol=1e-12)

    def test_centered_double_vortex(self, disk3, grid64):
        sp = build_singular_part(VortexConfiguration.centered(2), disk3, grid64)
        assert np.allclose(sp.neumann_data, -4.0 / 3.0, atol=1e-12)

    def test_flux_integral_counts_vortices(self):
        # loop of d_r v0 over the boundary is 4*pi*N + 2*pi*M
        disk = ConformalDisk.flat(12.0)
        grid = build_grid(disk, 32, 64)
        cfg = VortexConfiguration(
            interior=((0.7 + 0.3j, 2), (-2.0 + 1.0j, 1)), boundary=((1.0, 3),)
        )
        sp = build_singular_part(cfg, disk, grid)
        loop = -np.sum(sp.neumann_data) * disk.radius * grid.dtheta
        assert loop == pytest.approx(4.0 * math.pi * 3 + 2.0 * math.pi * 3, rel=1e-10)

    def test_offcenter_flux_integral_on_small_disk(self, disk3):
        grid = build_grid(disk3, 16, 256)
        cfg = VortexConfiguration(interior=((2.5 + 0j, 1),))
        sp = build_singular_part(cfg, disk3, grid)
        loop = -np.sum(sp.neumann_data) * disk3.radius * grid.dtheta
        assert loop == pytest.approx(4.0 * math.pi, rel=1e-9)


class TestCoreValues:
    def test_exp_v0_equals_distance_product(self, disk3, grid64):
        cfg = VortexConfiguration(interior=((0.5 + 0.5j, 1),), boundary=((math.pi, 1),))
        sp = build_singular_part(cfg, disk3, grid64)
        z = grid64.nodes_complex
        expected = np.abs(z - (0.5 + 0.5j)) ** 2 * np.abs(z + 3.0) ** 2
        assert np.allclose(np.exp(sp.v0.values), expected, rtol=1e-10)

    def test_values_finite_near_cores(self, disk3, grid64):
        sp = build_singular_part(VortexConfiguration.centered(3), disk3, grid64)
        assert np.all(np.isfinite(sp.v0.values))
        # exp(v0) vanishes like r^{2n} at the core
        assert np.exp(sp.v0.values[0].max()) < (2.0 * grid64.r[0]) ** 6

    def test_vortex_on_node_rejected(self, disk3, grid64):
        node = grid64.nodes_complex[3, 5]
        cfg = VortexConfiguration(interior=((node, 1),))
        with pytest.raises(ValueError):
            build_singular_part(cfg, disk3, grid64)

    def test_outside_disk_rejected(self, disk3, grid64):
        cfg = VortexConfiguration(interior=((4.0 + 0j, 1),))
        with pytest.raises(ValueError):
            build_singular_part(cfg, disk3, grid64)


class TestAnalyticGradient:
    def test_centered_vortex_gradient_is_radial(self, disk3, grid64):
        sp = build_singular_part(VortexConfiguration.centered(1), disk3, grid64)
        grad_r, grad_t = sp.gradient_polar()
        assert np.allclose(grad_r, 2.0 / grid64.r[:, None], rtol=1e-12)
        assert np.max(np.abs(grad_t)) < 1e-12

    def test_gradient_matches_finite_differences(self, disk3):
        grid = build_grid(disk3, 128, 128)
        cfg = VortexConfiguration(interior=((0.8 - 0.4j, 2),))
        sp = build_singular_part(cfg, disk3, grid)
        grad_r, grad_t = sp.gradient_polar()
        v0 = sp.v0.values
        fd_r = (v0[2:] - v0[:-2]) / (2.0 * grid.dr)
        fd_t = (np.roll(v0, -1, axis=1) - np.roll(v0, 1, axis=1)) / (2.0 * grid.dtheta)
        # compare on an outer band far from the core where v0 is smooth;
        # thresholds sit above the central-difference truncation error there
        band = slice(100, 120)
        assert np.allclose(grad_r[101:121], fd_r[band], atol=1e-3)
        assert np.allclose(grad_t[band], fd_t[band] / grid.r[band, None], atol=1e-2)
