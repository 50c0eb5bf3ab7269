from __future__ import annotations

import math
import threading

import numpy as np
import pandas as pd
import pytest
import toml

from wgr_noise.config import GeometryEntry
from wgr_noise.config import RefinementConfig
from wgr_noise.config import ScanConfig
from wgr_noise.config import scan_config_from_dict
from wgr_noise.data_types import NoiseBudget, ResonatorGeometry, StrainEnergyResult
from wgr_noise.errors import ConfigError, InsufficientPointsError, NonMonotoneVariableError
from wgr_noise.noise import eo_factor
from wgr_noise.scan import CSV_COLUMNS
from wgr_noise.scan import GeometrySolve
from wgr_noise.scan import ScanRunner
from wgr_noise.scan import emit_figure_data
from wgr_noise.scan import fit_scaling
from wgr_noise.scan import mode_for
from wgr_noise.scan import run_budget
from wgr_noise.scan import run_scan
from wgr_noise.scan import write_budget_csv
from wgr_noise.scan import write_manifest
from wgr_noise.types import EoCombination, ModeSource, Shape


def _config(**fields):
    data = {"geometries": [{"shape": "sphere", "R": 1e-3}], "temperatures": [5.5]}
    data.update(fields)
    return scan_config_from_dict(data)


def _row(R=1e-3, T=5.5, tau=1.0, sigma_bb=1e-16, status="ok"):
    return NoiseBudget(
        geometry_id=f"sphere-R{R:.4g}",
        shape="sphere",
        R=R,
        S=math.nan,
        T=T,
        tau=tau,
        sigma_TR=1e-14 / math.sqrt(tau),
        sigma_BB=sigma_bb,
        sigma_dr_over_r=1e-15,
        sigma_EO=3e-16,
        Gamma=0.847,
        eo_mode=EoCombination.NEGLECT_DR,
        status=status,
    )


def _energy(U, F):
    return StrainEnergyResult(
        U=U, F=F, work=2.0 * U, signed_force=F, dofs=1, n_elements=1, residual_norm=0.0
    )


def _tabulated_solve(tables, sphere_1mm_mode):
    bb = next(r for r in tables.bb if r.shape == Shape.SPHERE and r.R == 1e-3)
    eo = next(r for r in tables.eo if r.shape == Shape.SPHERE and r.R == 1e-3)
    return GeometrySolve(
        geom=ResonatorGeometry.sphere(1e-3),
        profile=sphere_1mm_mode,
        bb=_energy(bb.U, bb.F),
        eo=_energy(eo.U, eo.F),
    )


# -- configuration ----------------------------------------------------------------------------


def test_config_validation():
    with pytest.raises(ConfigError, match="geometry"):
        scan_config_from_dict({"temperatures": [5.5]})
    with pytest.raises(ConfigError, match="temperature"):
        _config(temperatures=[])
    with pytest.raises(ConfigError):
        _config(taus=[-1.0])
    with pytest.raises(ConfigError, match="S"):
        _config(geometries=[{"shape": "disk", "R": 1e-3}])
    with pytest.raises(ConfigError):
        _config(unknown_field=1)


def test_config_defaults_are_fresh_per_instance():
    sphere = [GeometryEntry(shape=Shape.SPHERE, R=1e-3)]
    a = ScanConfig(geometries=sphere, temperatures=[5.5])
    b = ScanConfig(geometries=sphere, temperatures=[300.0])

    assert a.taus == [1.0]
    assert a.taus is not b.taus
    assert a.refinement == RefinementConfig()
    assert _config().taus == [1.0]
    with pytest.raises(ConfigError, match="geometry"):
        ScanConfig()


def test_temperature_outside_material_range(caf2):
    with pytest.raises(ConfigError, match="outside"):
        ScanRunner(_config(temperatures=[2.0]), caf2)
    runner = ScanRunner(_config(temperatures=[2.0], allow_extrapolation=True), caf2)
    assert runner.reference.phi == pytest.approx(2e-8)


def test_supplied_mode_sources(caf2):
    supplied = _config(mode_source="supplied")
    bundled = mode_for(supplied.geometries[0], supplied, 1.43)
    assert bundled.m == 5706

    inline = _config(
        mode_source="supplied",
        geometries=[
            {
                "shape": "sphere",
                "R": 1e-3,
                "mode": {"nu": 1.9152e14, "m": 5706, "w_z": 12e-6, "w_rho": 2.4e-6,
                         "rho0": 0.997e-3},
            }
        ],
    )
    assert mode_for(inline.geometries[0], inline, 1.43).w_z == 12e-6

    estimated = _config()
    assert estimated.mode_source == ModeSource.ESTIMATED
    assert mode_for(estimated.geometries[0], estimated, 1.43).source == ModeSource.ESTIMATED


# -- budget rows ------------------------------------------------------------------------------


def test_expand_structural_terms(caf2, tables, sphere_1mm_mode):
    config = _config(temperatures=[5.5, 300.0], taus=[1.0, 4.0])
    runner = ScanRunner(config, caf2)
    rows = runner.expand(_tabulated_solve(tables, sphere_1mm_mode))

    assert [(r.T, r.tau) for r in rows] == [(5.5, 1.0), (5.5, 4.0), (300.0, 1.0), (300.0, 4.0)]
    cold, _, room, room_long = rows
    assert cold.status == "ok"
    assert cold.sigma_BB == pytest.approx(7.24e-17, rel=0.005)
    assert cold.sigma_dr_over_r == pytest.approx(2.9e-15, rel=0.05)
    p = runner.reference
    assert cold.sigma_EO == pytest.approx(cold.sigma_dr_over_r * eo_factor(p.n, p.p11, p.p12))
    assert room.sigma_BB / cold.sigma_BB == pytest.approx(11.68, rel=1e-3)
    # structural terms are flicker noise, the thermorefractive term is white
    assert room_long.sigma_BB == room.sigma_BB
    assert room_long.sigma_TR == pytest.approx(0.5 * room.sigma_TR)
    assert room.sigma_TR == pytest.approx(5.6e-14, rel=0.01)
    assert cold.U_bb == 4.4e-11


def test_eo_mode_is_carried(caf2, tables, sphere_1mm_mode):
    solve = _tabulated_solve(tables, sphere_1mm_mode)
    neglect = ScanRunner(_config(), caf2).expand(solve)[0]
    linear = ScanRunner(_config(eo_mode="linear"), caf2).expand(solve)[0]

    assert linear.eo_mode == EoCombination.LINEAR
    assert linear.sigma_EO > neglect.sigma_EO


def test_failed_geometry_keeps_its_rows(caf2):
    config = _config(
        temperatures=[5.5, 300.0],
        geometries=[{"shape": "sphere", "R": 5e-6}, {"shape": "sphere", "R": 1e-3}],
    )
    runner = ScanRunner(config, caf2)
    failed = runner.solve_geometry(config.geometries[0])
    rows = runner.expand(failed)

    assert failed.status == "E200"
    assert failed.profile is None
    assert len(rows) == 2
    assert all(r.status == "E200" for r in rows)
    assert all(math.isnan(r.sigma_BB) and math.isnan(r.sigma_EO) for r in rows)
    assert all(r.sigma_TR > 0 for r in rows)


def test_thermorefractive_minimum_at_zero_crossing(caf2):
    config = _config(temperatures=[20, 25, 30, 32, 33, 34, 36, 40, 50])
    runner = ScanRunner(config, caf2)
    rows = runner.expand(GeometrySolve(ResonatorGeometry.sphere(1e-3), None, None, None, "E0"))
    coldest = min(rows, key=lambda r: r.sigma_TR)

    assert coldest.T == 33
    assert coldest.sigma_TR < 1e-3 * max(r.sigma_TR for r in rows)


def test_noise_ordering_across_temperature(caf2, tables, sphere_1mm_mode):
    config = _config(temperatures=[5.5, 300.0])
    cold, room = ScanRunner(config, caf2).expand(_tabulated_solve(tables, sphere_1mm_mode))

    assert room.sigma_TR > room.sigma_EO > room.sigma_BB
    assert cold.sigma_EO > cold.sigma_TR
    assert cold.sigma_EO > cold.sigma_BB


@pytest.mark.parametrize(
    "error",
    [
        ValueError("bad value"),
        ZeroDivisionError("division by zero"),
        RuntimeError("factor is exactly singular"),
        np.linalg.LinAlgError("singular matrix"),
    ],
)
def test_numerical_failure_becomes_error_row(monkeypatch, caf2, error):
    def fail(*args, **kwargs):
        raise error

    monkeypatch.setattr("wgr_noise.scan.build_mesh", fail)
    config = _config(
        temperatures=[5.5, 300.0],
        geometries=[{"shape": "sphere", "R": 1e-3}, {"shape": "sphere", "R": 1e-2}],
    )
    rows = run_budget(config, caf2)

    assert len(rows) == 4
    assert all(r.status == "E305" for r in rows)
    assert all(math.isnan(r.sigma_BB) and r.sigma_TR > 0 for r in rows)


@pytest.mark.parametrize("workers", [1, 2])
def test_threads_are_set_in_every_worker(monkeypatch, caf2, workers):
    calls = []

    def record(threads):
        calls.append((threads, threading.get_ident()))

    def fail(*args, **kwargs):
        raise ValueError("not meshed")

    monkeypatch.setattr("wgr_noise.scan.set_threads", record)
    monkeypatch.setattr("wgr_noise.scan.build_mesh", fail)
    config = _config(
        geometries=[{"shape": "sphere", "R": 1e-3}, {"shape": "sphere", "R": 1e-2}],
        threads=3,
        workers=workers,
    )
    ScanRunner(config, caf2).solve_all()
    main = threading.get_ident()

    assert calls
    assert all(threads == 3 for threads, _ in calls)
    if workers == 1:
        assert [ident for _, ident in calls] == [main]
    else:
        assert len(calls) == 2
        assert all(ident != main for _, ident in calls)


# -- output -----------------------------------------------------------------------------------


def test_budget_csv(tmp_path):
    rows = [_row(), _row(R=1e-2, sigma_bb=math.nan, status="E303")]
    path = write_budget_csv(rows, tmp_path / "out" / "budget.csv")
    frame = pd.read_csv(path)

    assert tuple(frame.columns) == CSV_COLUMNS
    assert len(frame) == 2
    assert frame["status"].tolist() == ["ok", "E303"]
    assert math.isnan(frame["sigma_BB"][1])
    assert frame["eo_mode"][0] == "neglect_dR"
    assert frame["sigma_BB"][0] == pytest.approx(1e-16)


def test_manifest(tmp_path):
    config = _config(out_dir=str(tmp_path))
    path = write_manifest(config, tmp_path, [_row(), _row(status="E200")])
    manifest = toml.loads(path.read_text())

    assert manifest["result"] == {"rows": 2, "failed": 1, "csv": "budget.csv"}
    assert manifest["config"]["temperatures"] == [5.5]
    assert manifest["config"]["geometries"] == [{"shape": "sphere", "R": 1e-3}]
    assert "version" in manifest["wgr_noise"]


# -- scaling fits -----------------------------------------------------------------------------


def test_fit_scaling_recovers_power_law():
    rows = [_row(R=R, sigma_bb=3e-23 * R**-2.0) for R in (1e-4, 3e-4, 1e-3, 3e-3, 1e-2)]
    fit = fit_scaling(rows, "sigma_BB", "R")

    assert fit.exponent == pytest.approx(-2.0)
    assert fit.residual == pytest.approx(0.0, abs=1e-9)
    assert len(fit.points) == 5


def test_fit_scaling_against_tau():
    rows = [_row(tau=tau) for tau in (0.1, 1.0, 10.0)]
    assert fit_scaling(rows, "sigma_TR", "tau").exponent == pytest.approx(-0.5)


def test_fit_scaling_skips_failed_rows():
    rows = [_row(R=R, sigma_bb=R**-1.5) for R in (1e-4, 1e-3, 1e-2)]
    rows.append(_row(R=3e-2, sigma_bb=math.nan, status="E303"))
    assert len(fit_scaling(rows, "sigma_BB", "R").points) == 3


def test_fit_scaling_errors():
    with pytest.raises(InsufficientPointsError):
        fit_scaling([_row(R=1e-4), _row(R=1e-3)], "sigma_BB", "R")
    with pytest.raises(NonMonotoneVariableError):
        fit_scaling([_row(R=R) for R in (1e-4, 1e-2, 1e-3)], "sigma_BB", "R")
    with pytest.raises(NonMonotoneVariableError):
        fit_scaling([_row(R=R) for R in (1e-4, 1e-3, 1e-3)], "sigma_BB", "R")
    with pytest.raises(ConfigError):
        fit_scaling([_row()], "U_bb", "R")


# -- end to end -------------------------------------------------------------------------------


@pytest.mark.slow
def test_supplied_sphere_budget_matches_table(tmp_path, caf2, tables):
    config = _config(
        mode_source="supplied", temperatures=[5.5, 300.0], out_dir=str(tmp_path)
    )
    rows, csv = run_scan(config, caf2)
    expected = tables.find_budget(Shape.SPHERE, 1e-3)
    cold, room = rows

    assert all(r.status == "ok" for r in rows)
    assert 0.5 <= cold.sigma_BB / expected.bb_cold <= 2.0
    assert 0.5 <= room.sigma_BB / expected.bb_room <= 2.0
    assert 0.5 <= cold.sigma_EO / expected.eo_cold <= 2.0
    assert csv.exists()
    assert (tmp_path / "manifest.toml").exists()


REFERENCE_GEOMETRIES = [
    (Shape.SPHERE, 1e-4, None),
    (Shape.SPHERE, 1e-3, None),
    (Shape.SPHERE, 1e-2, None),
    (Shape.DISK, 1e-4, 1.5e-4),
    (Shape.DISK, 1e-3, 1.5e-4),
    (Shape.DISK, 1e-2, 1.5e-4),
]


def _entry(shape, R, S=None):
    entry = {"shape": shape.value, "R": R}
    if S is not None:
        entry["S"] = S
    return entry


def _rows_of(rows, shape, R, S=None):
    return [
        r for r in rows
        if r.shape == shape.value and r.R == R and (S is None or r.S == S)
    ]


@pytest.fixture(scope="module")
def reference_rows(caf2, tables):
    config = _config(
        mode_source="supplied",
        temperatures=[tables.temperature, 300.0],
        geometries=[_entry(*g) for g in REFERENCE_GEOMETRIES],
        workers=2,
    )
    return run_budget(config, caf2)


@pytest.mark.slow
@pytest.mark.parametrize("shape, R, S", REFERENCE_GEOMETRIES)
def test_reference_budgets_within_factor_two(reference_rows, tables, shape, R, S):
    cold, room = _rows_of(reference_rows, shape, R, S)
    expected = tables.find_budget(shape, R, S)

    assert cold.status == room.status == "ok"
    for measured, tabulated in (
        (cold.sigma_BB, expected.bb_cold),
        (cold.sigma_EO, expected.eo_cold),
        (room.sigma_BB, expected.bb_room),
        (room.sigma_EO, expected.eo_room),
    ):
        assert 0.5 <= measured / tabulated <= 2.0


@pytest.mark.slow
def test_size_scaling_of_spheres(reference_rows, tables):
    rows = [r for r in reference_rows if r.shape == "sphere" and r.T == tables.temperature]

    assert [r.R for r in rows] == [1e-4, 1e-3, 1e-2]
    assert rows[0].sigma_BB > rows[1].sigma_BB > rows[2].sigma_BB
    assert rows[0].sigma_EO > rows[1].sigma_EO > rows[2].sigma_EO
    assert -1.55 < fit_scaling(rows, "sigma_BB", "R").exponent < -1.25
    assert -1.05 < fit_scaling(rows, "sigma_EO", "R").exponent < -0.75


@pytest.mark.slow
def test_size_scaling_of_disks(reference_rows, tables):
    rows = [r for r in reference_rows if r.shape == "disk" and r.T == tables.temperature]

    assert [r.R for r in rows] == [1e-4, 1e-3, 1e-2]
    assert fit_scaling(rows, "sigma_BB", "R").exponent == pytest.approx(-1.3, abs=0.25)
    assert fit_scaling(rows, "sigma_EO", "R").exponent == pytest.approx(-0.8, abs=0.25)


@pytest.mark.slow
def test_size_scaling_of_estimated_spheres(caf2):
    config = _config(
        geometries=[{"shape": "sphere", "R": R} for R in (1e-4, 1e-3, 1e-2)],
        workers=2,
    )
    rows = run_budget(config, caf2)

    assert [r.R for r in rows] == [1e-4, 1e-3, 1e-2]
    assert -1.55 < fit_scaling(rows, "sigma_BB", "R").exponent < -1.25
    assert -1.05 < fit_scaling(rows, "sigma_EO", "R").exponent < -0.75


@pytest.mark.slow
def test_rim_curvature_barely_matters(caf2, tables):
    config = _config(
        mode_source="supplied",
        temperatures=[tables.temperature],
        geometries=[_entry(Shape.DISK, 1e-3, S) for S in (1e-4, 1e-3, 1e-2)],
        workers=2,
    )
    rows = run_budget(config, caf2)

    assert [r.S for r in rows] == [1e-4, 1e-3, 1e-2]
    assert abs(fit_scaling(rows, "sigma_BB", "S").exponent) < 0.1
    assert abs(fit_scaling(rows, "sigma_EO", "S").exponent) < 0.1


@pytest.mark.slow
def test_csv_is_identical_across_workers_and_threads(tmp_path, caf2, coarse):
    refinement = {"mode_size_fraction": coarse.mode_size_fraction, "grading": coarse.grading,
                  "energy_tolerance": coarse.energy_tolerance}
    geometries = [{"shape": "sphere", "R": 1e-3}, {"shape": "disk", "R": 1e-3, "S": 1.5e-4}]
    outputs = []
    for workers, threads in ((1, 1), (2, 2)):
        config = _config(
            mode_source="supplied",
            temperatures=[5.5, 300.0],
            geometries=geometries,
            refinement=refinement,
            workers=workers,
            threads=threads,
            out_dir=str(tmp_path / f"w{workers}t{threads}"),
        )
        _, csv = run_scan(config, caf2)
        outputs.append(csv.read_bytes())

    assert outputs[0] == outputs[1]


@pytest.mark.slow
def test_figure_data(tmp_path, caf2, coarse):
    config = _config(
        temperatures=[5.5, 33.0, 300.0],
        taus=[1.0, 10.0],
        refinement={"mode_size_fraction": coarse.mode_size_fraction, "grading": coarse.grading,
                    "energy_tolerance": coarse.energy_tolerance},
    )
    temperature, size, manifest = emit_figure_data(config, tmp_path, caf2)
    t_frame = pd.read_csv(temperature)
    s_frame = pd.read_csv(size)

    assert len(t_frame) == 6
    assert len(s_frame) == 3
    assert (s_frame["T_K"].tolist()) == [5.5, 33.0, 300.0]
    assert manifest.name == "manifest.toml"
    assert s_frame["sigma_BB"].is_monotonic_increasing
    cold = t_frame[(t_frame["T_K"] == 5.5) & (t_frame["tau_s"] == 1.0)].iloc[0]
    room = t_frame[(t_frame["T_K"] == 300.0) & (t_frame["tau_s"] == 1.0)].iloc[0]
    assert room["sigma_TR"] > room["sigma_EO"] > room["sigma_BB"]
    assert cold["sigma_EO"] > cold["sigma_TR"]
