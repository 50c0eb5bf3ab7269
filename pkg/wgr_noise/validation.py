"""
Oracle checks of the noise pipeline against closed forms and the bundled reference tables.
"""

from __future__ import annotations

import math
from collections.abc import Callable

import msgspec

from wgr_noise.common import ComponentLogger
from wgr_noise.config import RefinementConfig
from wgr_noise.data_types import FdtInput, ResonatorGeometry
from wgr_noise.elastostatics.analytic import analytic_uniform_sphere_energy
from wgr_noise.elastostatics.loads import bb_conjugate_force
from wgr_noise.elastostatics.loads import bb_surface_load
from wgr_noise.elastostatics.loads import uniform_pressure_load
from wgr_noise.elastostatics.mesh import build_mesh
from wgr_noise.elastostatics.solver import solve_static
from wgr_noise.errors import WgrNoiseError
from wgr_noise.materials import MaterialTable, load_bundled, properties_at
from wgr_noise.modes import dispersion_frequency
from wgr_noise.modes import estimate_fundamental_mode
from wgr_noise.modes import minor_radius
from wgr_noise.modes import reference_mode
from wgr_noise.noise import allan_eo
from wgr_noise.noise import allan_structural
from wgr_noise.noise import allan_tr
from wgr_noise.noise import estimate_bb_sphere
from wgr_noise.noise import estimate_eo
from wgr_noise.reference import ReferenceTables, load_reference_tables
from wgr_noise.types import Shape

_log = ComponentLogger("validation")


class Check(msgspec.Struct, frozen=True):
    """
    Outcome of one oracle comparison.

    Attributes:
        name (str): Check name.
        measured (float): Computed value.
        expected (float): Oracle value.
        tolerance (float): Relative tolerance, or the allowed ratio when ``factor`` is set.
        factor (bool): Compare by ratio (max(a/b, b/a) <= tolerance) instead of relative error.
        detail (str): Failure reason when the value could not be computed.
    """

    name: str
    measured: float
    expected: float
    tolerance: float
    factor: bool = False
    detail: str = ""

    @property
    def deviation(self) -> float:
        m, e = self.measured, self.expected
        if not math.isfinite(m):
            return math.inf
        if self.factor:
            return max(m / e, e / m) if m > 0 else math.inf
        return abs(m - e) / abs(e)

    @property
    def passed(self) -> bool:
        return math.isfinite(self.measured) and self.deviation <= self.tolerance


class ValidationReport(msgspec.Struct, frozen=True):
    checks: list[Check]

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    @property
    def failures(self) -> list[Check]:
        return [c for c in self.checks if not c.passed]

    def lines(self) -> list[str]:
        out = []
        for c in self.checks:
            kind = "x" if c.factor else "rel"
            out.append(
                f"{'PASS' if c.passed else 'FAIL'}  {c.name:<44} measured={c.measured:.4e} "
                f"expected={c.expected:.4e} dev={c.deviation:.3g} tol={c.tolerance:g}{kind}"
                + (f"  ({c.detail})" if c.detail else "")
            )
        out.append(f"{len(self.checks) - len(self.failures)}/{len(self.checks)} checks passed")
        return out


def _guarded(name: str, expected: float, tolerance: float, factor: bool = False):
    def wrap(compute: Callable[[], float]) -> Check:
        try:
            measured = float(compute())
            detail = ""
        except WgrNoiseError as e:
            measured, detail = math.nan, str(e)
        return Check(name, measured, expected, tolerance, factor, detail)

    return wrap


def table_checks(tables: ReferenceTables) -> list[Check]:
    """Allan deviations recomputed from every tabulated (U, F, x) row."""
    checks = []
    for row in tables.bb:
        inp = FdtInput(U=row.U, F=row.F, x_scale=row.R, T=tables.temperature, phi=tables.phi)
        name = f"bb table {row.shape.value} R={row.R:g} S={row.S}"
        checks.append(Check(name, allan_structural(inp), row.sigma, 0.05))
    for row in tables.eo:
        r = math.sqrt(row.w_z * row.w_rho)
        inp = FdtInput(U=row.U, F=row.F, x_scale=r, T=tables.temperature, phi=tables.phi)
        name = f"eo table {row.shape.value} R={row.R:g} S={row.S}"
        checks.append(Check(name, allan_structural(inp), row.sigma, 0.05))
    return checks


def closed_form_checks(table: MaterialTable, tables: ReferenceTables) -> list[Check]:
    cold = properties_at(table, tables.temperature)
    room = properties_at(table, tables.room_temperature)
    moduli = table.moduli_at(tables.temperature)
    sphere_1mm = tables.find_mode(Shape.SPHERE, 1e-3)
    eo_1mm = next(r for r in tables.eo if r.shape == Shape.SPHERE and r.R == 1e-3)
    r_1mm = math.sqrt(eo_1mm.w_z * eo_1mm.w_rho)
    sigma_dr = allan_structural(
        FdtInput(U=eo_1mm.U, F=eo_1mm.F, x_scale=r_1mm, T=tables.temperature, phi=tables.phi)
    )
    return [
        Check(
            "bb sphere closed form, 1 mm",
            estimate_bb_sphere(1e-3, tables.temperature, cold.phi, moduli.kappa),
            5.0e-17,
            0.01,
        ),
        Check(
            "eo sphere closed form, 1 mm",
            estimate_eo(
                1e-3, 1.56e-6, cold.n, tables.temperature, cold.phi, 90e9, 45e9, cold.p11, cold.p12
            ),
            7e-16,
            0.05,
        ),
        Check(
            "eo from minor-radius deviation, 1 mm",
            allan_eo(0.0, sigma_dr, cold.n, cold.p11, cold.p12),
            1e-15,
            0.1,
        ),
        Check(
            "thermorefractive 1 mm, room temperature",
            allan_tr(1e-3, tables.room_temperature, room, 0.847, 1.0),
            5.6e-14,
            0.01,
        ),
        Check(
            "bb conjugate force, 1 mm sphere",
            bb_conjugate_force(tables.pressure_amplitude, 1e-3, sphere_1mm.w_z),
            0.150,
            0.01,
        ),
        Check(
            "bulk modulus",
            moduli.kappa,
            90e9,
            0.01,
        ),
    ]


def mode_checks(tables: ReferenceTables, n: float) -> list[Check]:
    checks = []
    for row in tables.mode:
        if row.shape != Shape.SPHERE or row.m is None:
            continue
        checks.append(
            Check(
                f"dispersion frequency, sphere R={row.R:g}",
                dispersion_frequency(row.m, row.R, n),
                row.nu,
                1e-3,
            )
        )
        geom = ResonatorGeometry.sphere(row.R)
        checks.append(
            _guarded(f"estimated w_z, sphere R={row.R:g}", row.w_z, 0.05)(
                lambda geom=geom: estimate_fundamental_mode(geom, tables.wavelength, n).w_z
            )
        )
    profile = reference_mode(Shape.SPHERE, 1e-3, n=n)
    checks.append(Check("minor radius, 1 mm sphere", minor_radius(profile).r, 5.81e-6, 0.01))
    return checks


def fem_checks(
    table: MaterialTable,
    tables: ReferenceTables,
    refinement: RefinementConfig,
    radii: tuple[float, ...] = (1e-4, 1e-3, 1e-2),
) -> list[Check]:
    """Finite-element oracles: uniform-pressure spheres and the 1 mm sphere BB load."""
    moduli = table.moduli_at(tables.temperature)
    n = properties_at(table, tables.temperature).n
    P = tables.pressure_amplitude
    checks = []
    for R in radii:
        geom = ResonatorGeometry.sphere(R)

        def uniform(geom=geom) -> float:
            profile = estimate_fundamental_mode(geom, tables.wavelength, n)
            mesh = build_mesh(geom, profile, refinement)
            return solve_static(mesh, moduli, uniform_pressure_load(P)).work

        checks.append(
            _guarded(
                f"uniform pressure sphere work, R={R:g}",
                analytic_uniform_sphere_energy(P, R, moduli.kappa),
                0.01,
            )(uniform)
        )

    profile = reference_mode(Shape.SPHERE, 1e-3, n=n)
    geom = ResonatorGeometry.sphere(1e-3)
    bb_row = next(r for r in tables.bb if r.shape == Shape.SPHERE and r.R == 1e-3)
    result: dict[str, float] = {}

    def bb() -> float:
        mesh = build_mesh(geom, profile, refinement)
        res = solve_static(mesh, moduli, bb_surface_load(profile, P))
        result.update(U=res.U, F=res.F)
        return res.F

    expected_force = bb_conjugate_force(P, 1e-3, profile.w_z)
    checks.append(_guarded("bb quadrature force, 1 mm sphere", expected_force, 0.005)(bb))
    if result:
        checks.append(Check("bb strain energy, 1 mm sphere", result["U"], bb_row.U, 2.0, True))
    return checks


def validate(
    table: MaterialTable | None = None,
    refinement: RefinementConfig | None = None,
    fem: bool = True,
) -> ValidationReport:
    """
    Run every oracle check; ``fem=False`` skips the finite-element solves.
    """
    table = table or load_bundled()
    tables = load_reference_tables()
    n = properties_at(table, tables.temperature).n
    checks = table_checks(tables) + closed_form_checks(table, tables) + mode_checks(tables, n)
    if fem:
        checks += fem_checks(table, tables, refinement or RefinementConfig())
    report = ValidationReport(checks)
    for c in report.failures:
        _log.warning(f"failed: {c.name} measured={c.measured:.4e} expected={c.expected:.4e}")
    return report
