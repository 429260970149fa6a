import math

import numpy as np
import pytest

from nvortex import (
    BradlowViolation,
    ConformalDisk,
    VortexConfiguration,
    bradlow_margin,
    build_grid,
    check_bradlow,
)


class TestConformalDisk:
    def test_flat_area_is_pi_r_squared(self):
        disk = ConformalDisk.flat(3.0)
        assert disk.area == pytest.approx(9.0 * math.pi, abs=1e-8)

    def test_sampled_factor_area_matches_closed_form(self):
        # Omega = 1 + r^2/4 sampled densely: A = 2*pi*(R^2/2 + R^4/16)
        r = np.linspace(0.0, 2.0, 4001)
        disk = ConformalDisk.from_samples(2.0, r, 1.0 + r**2 / 4.0)
        assert disk.area == pytest.approx(2.0 * math.pi * (2.0 + 1.0), rel=1e-6)

    def test_rejects_nonpositive_radius(self):
        with pytest.raises(ValueError):
            ConformalDisk.flat(0.0)
        with pytest.raises(ValueError):
            ConformalDisk.flat(-1.0)

    def test_rejects_nonpositive_factor(self):
        with pytest.raises(ValueError):
            ConformalDisk(radius=1.0, omega=lambda r: np.asarray(r) - 0.5)

    def test_sample_validation(self):
        with pytest.raises(ValueError):
            ConformalDisk.from_samples(2.0, [0.0, 1.0], [1.0, 1.0, 1.0])
        with pytest.raises(ValueError):
            ConformalDisk.from_samples(2.0, [0.0, 1.5], [1.0, 1.0])  # short coverage


class TestVortexConfiguration:
    def test_coincident_positions_merge(self):
        cfg = VortexConfiguration(interior=((1.0 + 0j, 1), (1.0 + 0j, 2)))
        assert cfg.interior == ((1.0 + 0j, 3),)
        assert cfg.N == 3

    def test_boundary_angles_normalised(self):
        cfg = VortexConfiguration(boundary=((2.0 * math.pi + 0.5, 1),))
        assert cfg.boundary[0][0] == pytest.approx(0.5)

    def test_totals(self):
        cfg = VortexConfiguration(
            interior=((0j, 2), (1.0 + 0j, 1)), boundary=((0.0, 1), (1.0, 2))
        )
        assert (cfg.N, cfg.M) == (3, 3)

    def test_empty_configuration_rejected(self):
        with pytest.raises(ValueError):
            VortexConfiguration()

    @pytest.mark.parametrize("bad", [0, -1, 1.5])
    def test_multiplicity_validation(self, bad):
        with pytest.raises(ValueError):
            VortexConfiguration(interior=((0j, bad),))

    def test_position_outside_disk_rejected(self, disk3):
        cfg = VortexConfiguration(interior=((3.5 + 0j, 1),))
        with pytest.raises(ValueError):
            cfg.validate_inside(disk3)


class TestBradlowGate:
    def test_margin_examples(self, disk3):
        assert bradlow_margin(VortexConfiguration.centered(1), disk3) == pytest.approx(1.25, abs=1e-9)
        assert bradlow_margin(VortexConfiguration.boundary_point(0.0), disk3) == pytest.approx(1.75, abs=1e-9)
        mixed = VortexConfiguration(interior=((0j, 2),), boundary=((0.0, 1),))
        assert bradlow_margin(mixed, disk3) == pytest.approx(-0.25, abs=1e-9)

    def test_margin_additivity(self, disk3):
        base = bradlow_margin(VortexConfiguration.centered(1), disk3)
        plus_interior = bradlow_margin(
            VortexConfiguration(interior=((0j, 1), (1.0 + 0j, 1))), disk3
        )
        plus_boundary = bradlow_margin(
            VortexConfiguration(interior=((0j, 1),), boundary=((0.0, 1),)), disk3
        )
        assert plus_interior == pytest.approx(base - 1.0, abs=1e-12)
        assert plus_boundary == pytest.approx(base - 0.5, abs=1e-12)

    def test_gate_passes_and_returns_margin(self, disk3):
        assert check_bradlow(VortexConfiguration.centered(2), disk3) == pytest.approx(0.25, abs=1e-9)

    def test_gate_violation_carries_margin(self, disk3):
        with pytest.raises(BradlowViolation) as err:
            check_bradlow(VortexConfiguration.centered(3), disk3)
        assert err.value.margin == pytest.approx(-0.75, abs=1e-9)

    def test_small_disk_rejects_single_vortex(self):
        disk = ConformalDisk.flat(1.0)
        with pytest.raises(BradlowViolation):
            check_bradlow(VortexConfiguration.centered(1), disk)


class TestPolarGrid:
    def test_first_node_at_half_spacing(self, disk3):
        grid = build_grid(disk3, 8, 8)
        assert grid.r[0] == pytest.approx(3.0 / 16.0)
        assert grid.r_faces[0] == 0.0

    def test_node_count(self, disk3):
        grid = build_grid(disk3, 256, 256)
        assert grid.size == 65536

    def test_minimum_resolution_enforced(self):
        disk = ConformalDisk.flat(1.0)
        with pytest.raises(ValueError):
            build_grid(disk, 4, 8)
        with pytest.raises(ValueError):
            build_grid(disk, 8, 7)

    def test_refinement_halves_spacings_exactly(self, disk3):
        coarse = build_grid(disk3, 32, 64)
        fine = build_grid(disk3, 64, 128)
        assert fine.dr == 0.5 * coarse.dr
        assert fine.dtheta == 0.5 * coarse.dtheta

    def test_flat_weights_sum_to_disk_area(self, disk3):
        grid = build_grid(disk3, 64, 64)
        assert grid.flat_weights().sum() == pytest.approx(9.0 * math.pi, rel=1e-12)
