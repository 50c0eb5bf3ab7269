"""
Noise-budget scans over geometries, temperatures and averaging times.

Each geometry is solved once (one BB and one EO elastostatic problem). Temperature and loss
angle enter the structural-damping deviations only through sqrt(T phi), so the (T, tau) grid
is expanded from that single pair of solves.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import NamedTuple

import msgspec
import numpy as np
import pandas as pd
import toml

from wgr_noise import __version__
from wgr_noise.common import ComponentLogger
from wgr_noise.config import GeometryEntry, ScanConfig, scan_config_to_dict
from wgr_noise.data_types import FdtInput
from wgr_noise.data_types import ModeProfile
from wgr_noise.data_types import NoiseBudget
from wgr_noise.data_types import ResonatorGeometry
from wgr_noise.data_types import ScalingFit
from wgr_noise.data_types import StrainEnergyResult
from wgr_noise.elastostatics.loads import bb_surface_load
from wgr_noise.elastostatics.loads import eo_volumetric_load
from wgr_noise.elastostatics.mesh import build_mesh
from wgr_noise.elastostatics.solver import set_threads
from wgr_noise.elastostatics.solver import solve_static
from wgr_noise.errors import ConfigError
from wgr_noise.errors import InsufficientPointsError
from wgr_noise.errors import NonMonotoneVariableError
from wgr_noise.errors import NumericalError
from wgr_noise.errors import WgrNoiseError
from wgr_noise.materials import MaterialTable, properties_at, resolve_material
from wgr_noise.modes import estimate_fundamental_mode
from wgr_noise.modes import minor_radius
from wgr_noise.modes import mode_from_parameters
from wgr_noise.modes import reference_mode
from wgr_noise.noise import allan_eo
from wgr_noise.noise import allan_structural
from wgr_noise.noise import allan_tr
from wgr_noise.types import ModeSource

CSV_COLUMNS: tuple[str, ...] = (
    "shape",
    "R_m",
    "S_m",
    "T_K",
    "tau_s",
    "sigma_TR",
    "sigma_BB",
    "sigma_dr_r",
    "sigma_EO",
    "U_bb_J",
    "F_bb_N",
    "U_eo_J",
    "F_eo_N",
    "status",
    "eo_mode",
    "Gamma",
)

FLOAT_FORMAT = "%.6e"
MANIFEST_NAME = "manifest.toml"

# Budget fields accepted by fit_scaling
FIT_QUANTITIES: tuple[str, ...] = ("sigma_TR", "sigma_BB", "sigma_dr_over_r", "sigma_EO")
FIT_VARIABLES: tuple[str, ...] = ("R", "S", "T", "tau")

_log = ComponentLogger("scan")


class GeometrySolve(NamedTuple):
    """
    Elastostatic results of one geometry, shared by all its (T, tau) rows.

    Attributes:
        geom (ResonatorGeometry): The resonator.
        profile (ModeProfile | None): Its mode, None if the mode step failed.
        bb (StrainEnergyResult | None): Brownian-boundary solve.
        eo (StrainEnergyResult | None): Elasto-optic solve.
        status (str): "ok" or the error status of the first failing step.
    """

    geom: ResonatorGeometry
    profile: ModeProfile | None
    bb: StrainEnergyResult | None
    eo: StrainEnergyResult | None
    status: str = "ok"


def geometry_of(entry: GeometryEntry) -> ResonatorGeometry:
    return ResonatorGeometry(shape=entry.shape, R=entry.R, S=entry.S, thickness=entry.thickness)


def mode_for(entry: GeometryEntry, config: ScanConfig, n: float) -> ModeProfile:
    """
    Mode profile of ``entry``: estimated, or supplied by the entry or the bundled tables.
    """
    geom = geometry_of(entry)
    if config.mode_source == ModeSource.ESTIMATED:
        return estimate_fundamental_mode(geom, config.wavelength, n, config.polarization)
    if entry.mode is None:
        return reference_mode(entry.shape, entry.R, entry.S, n)
    m = entry.mode
    return mode_from_parameters(
        m.nu,
        m.m,
        m.w_z,
        m.w_rho,
        m.rho0,
        config.wavelength,
        R=entry.R,
        n=n,
        polarization=config.polarization,
    )


class ScanRunner:
    """
    Runs the elastostatic solves of a scan and expands them into noise budgets.

    Parameters
    ----------
    config : ScanConfig
        The scan.
    table : MaterialTable, optional
        Material; resolved from ``config.material`` if None.

    Raises
    ------
    ConfigError
        If a temperature lies outside the material's sampled range and extrapolation is off.

    """

    def __init__(self, config: ScanConfig, table: MaterialTable | None = None):
        self.config = config
        self.table = table or resolve_material(config.material)
        self._log = ComponentLogger(f"ScanRunner({self.table.name})")
        if not config.allow_extrapolation:
            outside = [
                T for T in config.temperatures if not self.table.t_min <= T <= self.table.t_max
            ]
            if outside:
                raise ConfigError(
                    f"temperatures {outside} K outside the {self.table.name} range "
                    f"[{self.table.t_min}, {self.table.t_max}] K"
                )
        # elastic constants and optical constants are temperature independent
        self.reference = properties_at(
            self.table, config.temperatures[0], config.allow_extrapolation
        )
        self.moduli = self.table.moduli_at(config.temperatures[0], config.allow_extrapolation)

    def solve_geometry(self, entry: GeometryEntry) -> GeometrySolve:
        """Mode, BB and EO solves of one geometry; failures are captured in the status."""
        config = self.config
        geom = geometry_of(entry)
        profile = bb = eo = None
        try:
            profile = mode_for(entry, config, self.reference.n)
            mesh = build_mesh(geom, profile, config.refinement)
            bb = solve_static(
                mesh, self.moduli, bb_surface_load(profile, config.pressure_amplitude)
            )
            eo = solve_static(mesh, self.moduli, eo_volumetric_load(profile, config.eo_amplitude))
        except WgrNoiseError as e:
            self._log.warning(f"{geom.geometry_id}: {e}")
            return GeometrySolve(geom, profile, bb, eo, status=e.status)
        except (ValueError, ArithmeticError, RuntimeError, np.linalg.LinAlgError) as e:
            error = NumericalError(f"{type(e).__name__}: {e}")
            self._log.warning(f"{geom.geometry_id}: {error}")
            return GeometrySolve(geom, profile, bb, eo, status=error.status)
        self._log.info(
            f"{geom.geometry_id}: U_bb={bb.U:.4e} J F_bb={bb.F:.4e} N, "
            f"U_eo={eo.U:.4e} J F_eo={eo.F:.4e} N",
        )
        return GeometrySolve(geom, profile, bb, eo)

    def solve_all(self) -> list[GeometrySolve]:
        """Solve every geometry; results are ordered as the config lists them."""
        entries = self.config.geometries
        if self.config.workers == 1:
            set_threads(self.config.threads)
            return [self.solve_geometry(e) for e in entries]
        results: list[GeometrySolve | None] = [None] * len(entries)
        with ThreadPoolExecutor(max_workers=self.config.workers) as pool:
            futures = {pool.submit(self._solve_in_worker, e): i for i, e in enumerate(entries)}
            for future, i in futures.items():
                results[i] = future.result()
        return results  # type: ignore[return-value]

    def _solve_in_worker(self, entry: GeometryEntry) -> GeometrySolve:
        # numba thread counts are per calling thread
        set_threads(self.config.threads)
        return self.solve_geometry(entry)

    def expand(self, solve: GeometrySolve) -> list[NoiseBudget]:
        """Budgets of one solved geometry over the configured temperatures and taus."""
        config = self.config
        geom = solve.geom
        rows = []
        for T in config.temperatures:
            props = properties_at(self.table, T, config.allow_extrapolation)
            for tau in config.taus:
                sigma_tr = allan_tr(geom.R, T, props, config.gamma, tau)
                row = NoiseBudget(
                    geometry_id=geom.geometry_id,
                    shape=geom.shape.value,
                    R=geom.R,
                    S=geom.S if geom.S is not None else math.nan,
                    T=T,
                    tau=tau,
                    sigma_TR=sigma_tr,
                    sigma_BB=math.nan,
                    sigma_dr_over_r=math.nan,
                    sigma_EO=math.nan,
                    Gamma=config.gamma,
                    eo_mode=config.eo_mode,
                    status=solve.status,
                )
                if solve.status == "ok":
                    row = self._structural(row, solve, props.phi)
                rows.append(row)
        return rows

    def _structural(self, row: NoiseBudget, solve: GeometrySolve, phi: float) -> NoiseBudget:
        bb, eo = solve.bb, solve.eo
        r = minor_radius(solve.profile).r
        sigma_bb = allan_structural(FdtInput(U=bb.U, F=bb.F, x_scale=row.R, T=row.T, phi=phi))
        sigma_dr = allan_structural(FdtInput(U=eo.U, F=eo.F, x_scale=r, T=row.T, phi=phi))
        p = self.reference
        return msgspec.structs.replace(
            row,
            sigma_BB=sigma_bb,
            sigma_dr_over_r=sigma_dr,
            sigma_EO=allan_eo(sigma_bb, sigma_dr, p.n, p.p11, p.p12, self.config.eo_mode),
            U_bb=bb.U,
            F_bb=bb.F,
            U_eo=eo.U,
            F_eo=eo.F,
        )

    def run(self) -> list[NoiseBudget]:
        rows = [row for solve in self.solve_all() for row in self.expand(solve)]
        failed = sum(1 for row in rows if row.status != "ok")
        if failed:
            self._log.warning(f"{failed} of {len(rows)} rows failed")
        return rows


def run_budget(config: ScanConfig, table: MaterialTable | None = None) -> list[NoiseBudget]:
    """
    One NoiseBudget per (geometry, T, tau), in config order.

    Failed geometries keep their rows with NaN deviations (other than sigma_TR) and an error
    status; the scan continues.
    """
    return ScanRunner(config, table).run()


def budgets_to_frame(rows: list[NoiseBudget]) -> pd.DataFrame:
    return pd.DataFrame(
        {
            "shape": [r.shape for r in rows],
            "R_m": [r.R for r in rows],
            "S_m": [r.S for r in rows],
            "T_K": [r.T for r in rows],
            "tau_s": [r.tau for r in rows],
            "sigma_TR": [r.sigma_TR for r in rows],
            "sigma_BB": [r.sigma_BB for r in rows],
            "sigma_dr_r": [r.sigma_dr_over_r for r in rows],
            "sigma_EO": [r.sigma_EO for r in rows],
            "U_bb_J": [r.U_bb for r in rows],
            "F_bb_N": [r.F_bb for r in rows],
            "U_eo_J": [r.U_eo for r in rows],
            "F_eo_N": [r.F_eo for r in rows],
            "status": [r.status for r in rows],
            "eo_mode": [r.eo_mode.value for r in rows],
            "Gamma": [r.Gamma for r in rows],
        },
        columns=list(CSV_COLUMNS),
    )


def write_budget_csv(rows: list[NoiseBudget], path: str | Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    budgets_to_frame(rows).to_csv(path, index=False, float_format=FLOAT_FORMAT, na_rep="nan")
    return path


def write_manifest(config: ScanConfig, out_dir: str | Path, rows: list[NoiseBudget]) -> Path:
    """Record the resolved config and the row outcome next to the CSV output."""
    path = Path(out_dir) / MANIFEST_NAME
    path.parent.mkdir(parents=True, exist_ok=True)
    manifest = {
        "wgr_noise": {"version": __version__},
        "result": {
            "rows": len(rows),
            "failed": sum(1 for r in rows if r.status != "ok"),
            "csv": config.csv_name,
        },
        "config": scan_config_to_dict(config),
    }
    path.write_text(toml.dumps(manifest), encoding="utf-8")
    return path


def run_scan(
    config: ScanConfig,
    table: MaterialTable | None = None,
) -> tuple[list[NoiseBudget], Path]:
    """Run ``config`` and write its CSV and manifest into ``config.out_dir``."""
    rows = run_budget(config, table)
    csv = write_budget_csv(rows, Path(config.out_dir) / config.csv_name)
    write_manifest(config, config.out_dir, rows)
    _log.info(f"wrote {len(rows)} rows to {csv}")
    return rows, csv


def fit_scaling(rows: list[NoiseBudget], quantity: str, variable: str) -> ScalingFit:
    """
    Least-squares power law quantity ~ variable^k over ``rows``, in log-log space.

    Parameters
    ----------
    rows : list[NoiseBudget]
        Rows varying only ``variable``; failed or non-positive rows are skipped.
    quantity : str
        One of sigma_TR, sigma_BB, sigma_dr_over_r, sigma_EO.
    variable : str
        One of R, S, T, tau.

    Returns
    -------
    ScalingFit
        Exponent k and the RMS residual in natural-log units.

    Raises
    ------
    InsufficientPointsError
        If fewer than three usable rows remain.
    NonMonotoneVariableError
        If the variable is not strictly monotone over the rows.

    """
    if quantity not in FIT_QUANTITIES or variable not in FIT_VARIABLES:
        raise ConfigError(f"cannot fit {quantity!r} against {variable!r}")
    points = [
        (getattr(r, variable), getattr(r, quantity))
        for r in rows
        if r.status == "ok" and getattr(r, quantity) > 0 and getattr(r, variable) > 0
    ]
    if len(points) < 3:
        raise InsufficientPointsError(f"{len(points)} usable points for {quantity} vs {variable}")
    x = np.log([p[0] for p in points])
    y = np.log([p[1] for p in points])
    steps = np.diff(x)
    if not (np.all(steps > 0) or np.all(steps < 0)):
        raise NonMonotoneVariableError(f"{variable} is not strictly monotone over the rows")

    slope, intercept = np.polyfit(x, y, 1)
    residual = float(np.sqrt(np.mean((y - (slope * x + intercept)) ** 2)))
    return ScalingFit(
        quantity=quantity,
        variable=variable,
        exponent=float(slope),
        residual=residual,
        points=tuple((float(a), float(b)) for a, b in points),
    )


def emit_figure_data(
    config: ScanConfig,
    out_dir: str | Path | None = None,
    table: MaterialTable | None = None,
) -> list[Path]:
    """
    Plot-ready CSV series of a scan.

    Writes ``temperature_series.csv`` (geometry, T, tau, sigma_TR, sigma_BB, sigma_EO per
    geometry against temperature) and ``size_series.csv`` (shape, R, S, T, sigma_BB,
    sigma_EO at the first tau), plus the manifest.
    """
    out = Path(out_dir or config.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    rows = run_budget(config, table)
    frame = budgets_to_frame(rows)
    frame.insert(0, "geometry", [r.geometry_id for r in rows])

    temperature = frame[["geometry", "T_K", "tau_s", "sigma_TR", "sigma_BB", "sigma_EO", "status"]]
    size = frame.loc[
        frame["tau_s"] == config.taus[0],
        ["shape", "R_m", "S_m", "T_K", "sigma_BB", "sigma_EO", "status"],
    ]
    paths = [out / "temperature_series.csv", out / "size_series.csv"]
    temperature.to_csv(paths[0], index=False, float_format=FLOAT_FORMAT, na_rep="nan")
    size.to_csv(paths[1], index=False, float_format=FLOAT_FORMAT, na_rep="nan")
    paths.append(write_manifest(config, out, rows))
    return paths

