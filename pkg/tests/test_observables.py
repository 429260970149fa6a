import json
import math

import numpy as np
import pytest

from nvortex import (
    ScalarField,
    VortexConfiguration,
    build_grid,
    build_singular_part,
    compute_observables,
    magnetic_field,
    solve_taubes_2d,
)
from nvortex.observables import (
    FIELD_CSV_HEADER,
    PROFILE_CSV_HEADER,
    _density_from_parts,
    export_field_csv,
    export_json,
    export_profile_csv,
    export_scalar_csv,
    radial_observables,
    solution_summary,
)
from nvortex.solver2d import reconstruct_h


@pytest.fixture(scope="module")
def solved96(disk3):
    grid = build_grid(disk3, 96, 96)
    out = {}
    for key, cfg in (
        ("centered", VortexConfiguration.centered(1)),
        ("boundary", VortexConfiguration.boundary_point(0.0)),
    ):
        field, report = solve_taubes_2d(disk3, cfg, grid)
        singular = build_singular_part(cfg, disk3, grid)
        obs = compute_observables(field, singular, disk3, grid, report.bc_residual)
        out[key] = (cfg, field, singular, obs)
    return grid, out


class TestMagneticField:
    def test_pointwise_formula(self, disk3):
        grid = build_grid(disk3, 8, 8)
        h = ScalarField(grid, np.zeros(grid.shape))
        assert np.all(magnetic_field(h).values == 0.0)
        h = ScalarField(grid, np.full(grid.shape, math.log(0.5)))
        assert np.allclose(magnetic_field(h).values, 0.25)
        h = ScalarField(grid, np.full(grid.shape, -1e3))  # deep core: exp underflows
        assert np.allclose(magnetic_field(h).values, 0.5)

    def test_bounds_on_solutions(self, solved96):
        _, out = solved96
        for _, _, _, obs in out.values():
            assert obs.B.values.min() >= 0.0
            assert obs.B.values.max() <= 0.5 + 1e-6


class TestEnergyDensity:
    def test_vacuum_density_vanishes(self):
        e_h = np.ones((4, 4))
        zeros = np.zeros((4, 4))
        assert np.all(_density_from_parts(e_h, zeros, zeros, np.ones((4, 1))) == 0.0)

    def test_unit_multiplicity_core_limit(self, disk3, radial_r3):
        # on-shell core density is B^2 + exp(h0): the gradient term survives
        # for a single zero because exp(h) |grad h|^2 -> 4 exp(h0)
        obs = radial_observables(radial_r3, disk3)
        expected = 0.25 + math.exp(radial_r3.h0)
        assert obs["energy_density"][0] == pytest.approx(expected, rel=1e-4)

    def test_double_vortex_core_density_is_b_squared(self, disk3):
        grid = build_grid(disk3, 48, 48)
        cfg = VortexConfiguration.centered(2)
        field, _ = solve_taubes_2d(disk3, cfg, grid)
        singular = build_singular_part(cfg, disk3, grid)
        obs = compute_observables(field, singular, disk3, grid)
        assert obs.energy_density.values[0, 0] == pytest.approx(0.25, abs=5e-3)

    def test_centered_density_peaks_at_core(self, disk3, radial_r3):
        obs = radial_observables(radial_r3, disk3)
        assert np.argmax(obs["energy_density"]) == 0


class TestQuantization:
    def test_interior_flux_and_energy(self, solved96):
        _, out = solved96
        _, _, _, obs = out["centered"]
        assert obs.flux == pytest.approx(2.0 * math.pi, rel=1e-3)
        assert obs.energy == pytest.approx(math.pi, rel=1e-3)

    def test_boundary_half_vortex(self, solved96):
        _, out = solved96
        _, _, _, obs = out["boundary"]
        assert obs.flux == pytest.approx(math.pi, rel=1e-3)
        assert obs.energy == pytest.approx(0.5 * math.pi, rel=2e-3)

    def test_energy_is_half_flux(self, solved96):
        _, out = solved96
        for _, _, _, obs in out.values():
            assert abs(obs.energy - 0.5 * obs.flux) / obs.flux < 1e-3

    def test_boundary_energy_peaks_inside(self, solved96):
        grid, out = solved96
        _, _, _, obs = out["boundary"]
        i_max, _ = np.unravel_index(np.argmax(obs.energy_density.values), grid.shape)
        assert i_max < grid.nr - 1

    def test_energy_error_refines_with_order_above_1p5(self, disk3, solved96):
        # the flux integral is conserved by the flux-form scheme down to the
        # solver floor, so the measurable refinement order lives in the energy
        _, out = solved96
        cfg, _, _, obs96 = out["centered"]
        grid48 = build_grid(disk3, 48, 48)
        field48, rep48 = solve_taubes_2d(disk3, cfg, grid48)
        obs48 = compute_observables(
            field48, build_singular_part(cfg, disk3, grid48), disk3, grid48
        )
        err48 = abs(obs48.energy - math.pi)
        err96 = abs(obs96.energy - math.pi)
        assert math.log2(err48 / err96) / math.log2(96 / 48) >= 1.5
        assert abs(obs96.flux - 2.0 * math.pi) < 1e-7  # conservation floor


class TestExport:
    def test_field_csv_schema(self, tmp_path, solved96):
        grid, out = solved96
        _, field, singular, obs = out["centered"]
        h = reconstruct_h(field, singular)
        path = export_field_csv(
            tmp_path / "field.csv", grid, field, h, obs.B, obs.energy_density
        )
        with open(path) as fh:
            header = fh.readline().strip()
            first = fh.readline().strip().split(",")
        assert header == FIELD_CSV_HEADER
        assert len(first) == 9
        assert sum(1 for _ in open(path)) == grid.size + 1

    def test_profile_csv_schema(self, tmp_path, disk3, radial_r3):
        path = export_profile_csv(tmp_path / "profile.csv", radial_r3, disk3)
        with open(path) as fh:
            assert fh.readline().strip() == PROFILE_CSV_HEADER

    def test_scalar_csv_for_green_fields(self, tmp_path, disk3):
        from nvortex import build_grid as bg, neumann_green

        grid = bg(disk3, 16, 16)
        green = neumann_green(disk3, grid, (4, 2))
        path = export_scalar_csv(tmp_path / "green.csv", green, name="G")
        with open(path) as fh:
            assert fh.readline().strip() == "r,theta,x,y,G"
        assert sum(1 for _ in open(path)) == grid.size + 1

    def test_empty_path_rejected_before_writing(self, disk3, radial_r3):
        with pytest.raises(ValueError):
            export_profile_csv("", radial_r3, disk3)
        with pytest.raises(ValueError):
            export_json("  ", {})

    def test_json_export_is_deterministic(self, tmp_path, solved96):
        _, out = solved96
        cfg, _, _, obs = out["centered"]
        doc = solution_summary(obs, cfg.N, cfg.M, 1.25, 7, True)
        p1 = export_json(tmp_path / "a.json", doc)
        p2 = export_json(tmp_path / "b.json", doc)
        assert open(p1, "rb").read() == open(p2, "rb").read()
        loaded = json.load(open(p1))
        assert loaded["schema_version"] == 1
        assert loaded["expected_flux"] == pytest.approx(2.0 * math.pi)
        assert loaded["expected_energy"] == pytest.approx(math.pi)
