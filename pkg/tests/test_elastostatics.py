from __future__ import annotations

import math

import numpy as np
import pytest
from scipy import integrate

from wgr_noise.config import RefinementConfig
from wgr_noise.data_types import FdtInput, ModeProfile, ResonatorGeometry
from wgr_noise.elastostatics import Constraints
from wgr_noise.elastostatics import CrossSection
from wgr_noise.elastostatics import StaticSolver
from wgr_noise.elastostatics import analytic_tube_energy
from wgr_noise.elastostatics import analytic_tube_stresses
from wgr_noise.elastostatics import analytic_uniform_sphere_energy
from wgr_noise.elastostatics import assemble_load
from wgr_noise.elastostatics import bb_conjugate_force
from wgr_noise.elastostatics import bb_surface_load
from wgr_noise.elastostatics import build_mesh
from wgr_noise.elastostatics import cross_work
from wgr_noise.elastostatics import eo_force_density
from wgr_noise.elastostatics import eo_volumetric_load
from wgr_noise.elastostatics import export_mesh
from wgr_noise.elastostatics import read_mesh_export
from wgr_noise.elastostatics import richardson_error
from wgr_noise.elastostatics import set_threads
from wgr_noise.elastostatics import solve_static
from wgr_noise.elastostatics import strain_energy
from wgr_noise.elastostatics import uniform_pressure_load
from wgr_noise.elastostatics import uniform_sphere_force
from wgr_noise.errors import GeometryError
from wgr_noise.errors import NonConvergentRefinementError
from wgr_noise.errors import RefinementBudgetError
from wgr_noise.errors import SingularSystemError
from wgr_noise.modes import minor_radius, reference_mode
from wgr_noise.noise import allan_structural
from wgr_noise.types import LoadKind, ModeSource, Shape, SolverKind

SPHERE_1MM = ResonatorGeometry.sphere(1e-3)


# -- cross-sections ---------------------------------------------------------------------------


def test_sphere_section():
    section = CrossSection(SPHERE_1MM)
    theta = np.linspace(0.0, 0.5 * math.pi, 7)

    assert section.height == pytest.approx(1e-3)
    assert section.length == pytest.approx(0.5 * math.pi * 1e-3)
    np.testing.assert_allclose(section.boundary_radius(theta), 1e-3)
    assert section.curve_position(np.array([[1e-3, 0.0]]))[0] == pytest.approx(0.0, abs=1e-12)
    assert section.curve_position(np.array([[0.0, 1e-3]]))[0] == pytest.approx(section.length)
    assert section.contains(np.array([[0.5e-3, 0.5e-3], [0.8e-3, 0.8e-3]])).tolist() == [
        True,
        False,
    ]


def test_disk_section():
    geom = ResonatorGeometry.disk(1e-3, 1.5e-4)
    section = CrossSection(geom)

    assert geom.disk_thickness == 1e-3
    assert section.height == pytest.approx(0.5e-3)
    assert section.boundary_radius(np.array([0.0]))[0] == pytest.approx(1e-3)
    # rim arc, tangent line, flat face
    assert len(section.segments) == 3
    np.testing.assert_allclose(section.point_at(np.array([0.0]))[0], [1e-3, 0.0], atol=1e-15)
    top = section.point_at(np.array([section.length]))[0]
    np.testing.assert_allclose(top, [0.0, 0.5e-3], atol=1e-12)


def test_thin_disk_rim_stops_at_face():
    section = CrossSection(ResonatorGeometry.disk(1e-3, 1.5e-4, thickness=1e-4))
    assert section.height == pytest.approx(0.5e-4)
    assert len(section.segments) == 2


def test_disk_rim_reaching_axis_is_rejected():
    with pytest.raises(GeometryError):
        CrossSection(ResonatorGeometry.disk(1e-4, 1e-3, thickness=2e-3))


def test_invalid_geometry():
    with pytest.raises(GeometryError):
        ResonatorGeometry.sphere(0.0)
    with pytest.raises(GeometryError):
        ResonatorGeometry(shape=Shape.DISK, R=1e-3)


# -- closed forms -----------------------------------------------------------------------------


def test_uniform_sphere_closed_form():
    assert analytic_uniform_sphere_energy(1e6, 1e-3, 90e9) == pytest.approx(4.654e-8, rel=1e-3)
    assert uniform_sphere_force(1e6, 1e-3) == pytest.approx(4.0 * math.pi * 1e-6 * 1e6)


def test_tube_closed_form():
    tube = analytic_tube_energy(1e6, 5.81e-6, 1e-3, 90e9, 41.2e9)

    assert tube.U == pytest.approx(
        math.pi**2 * 5.81e-6**2 * 1e-3 * 1e12 * 3.0 / (270e9 + 41.2e9)
    )
    assert tube.F == pytest.approx(4.0 * math.pi**2 * 5.81e-6 * 1e-3 * 1e6)
    assert analytic_tube_stresses(1e6, 0.3) == pytest.approx((-1e6, -1e6, -0.6e6))


def test_tube_stresses_follow_poisson_ratio():
    given = analytic_tube_energy(1e6, 5.81e-6, 1e-3, 90e9, 45e9, 0.25)
    implied = analytic_tube_energy(1e6, 5.81e-6, 1e-3, 90e9, 45e9)

    assert given.stresses == pytest.approx((-1e6, -1e6, -0.5e6))
    # nu = (3 kappa - 2 G) / (2 (3 kappa + G)) = 180 / 630
    assert implied.stresses[2] == pytest.approx(-2e6 * 180.0 / 630.0)
    assert given.U == implied.U
    assert analytic_tube_energy(1e6, 5.81e-6, 1e-3, 90e9, 0.0).U == pytest.approx(
        math.pi**2 * 5.81e-6**2 * 1e-3 * 1e12 / 90e9
    )


def test_bb_conjugate_force():
    assert bb_conjugate_force(1e6, 1e-3, 13.5e-6) == pytest.approx(0.150, rel=0.01)


def test_load_specs(sphere_1mm_mode):
    bb = bb_surface_load(sphere_1mm_mode, 1e6)
    eo = eo_volumetric_load(sphere_1mm_mode, 1e9)

    assert bb.kind == LoadKind.BB_SURFACE
    assert (bb.w_z, bb.w_rho, bb.rho0) == (13.5e-6, 2.5e-6, 0.996e-3)
    assert eo.kind == LoadKind.EO_VOLUMETRIC
    assert eo.scaled(2.0).amplitude == 2e9
    assert uniform_pressure_load(5.0).kind == LoadKind.UNIFORM_PRESSURE


def test_eo_force_density_points_at_mode_centre(sphere_1mm_mode):
    load = eo_volumetric_load(sphere_1mm_mode, 1e9)
    rho0 = sphere_1mm_mode.rho0
    pts = np.array([[rho0, 0.0], [rho0 + 1e-6, 0.0], [rho0, 5e-6], [rho0 - 1e-6, 0.0]])
    density = eo_force_density(load, pts)

    np.testing.assert_array_equal(density[0], [0.0, 0.0])
    assert density[1, 0] < 0 and density[1, 1] == 0.0
    assert density[2, 0] == 0.0 and density[2, 1] < 0
    assert density[3, 0] == pytest.approx(-density[1, 0])
    g = math.exp(-((1e-6 / 2.5e-6) ** 2))
    assert abs(density[1, 0]) == pytest.approx(1e9 * g)


def test_refinement_budget(sphere_1mm_mode):
    with pytest.raises(RefinementBudgetError):
        build_mesh(SPHERE_1MM, sphere_1mm_mode, RefinementConfig(max_nodes=100))


def test_richardson_error():
    assert richardson_error(1.0, 0.97, 0.02) == pytest.approx(0.01)
    assert richardson_error(1.0, 1.01, 0.02) == pytest.approx(0.01 / 3.0)
    with pytest.raises(NonConvergentRefinementError, match="not monotone"):
        richardson_error(1.0, 1.03, 0.02)
    with pytest.raises(NonConvergentRefinementError, match="exceeds"):
        richardson_error(1.0, 0.9, 0.02)


def test_refinement_levels():
    base = RefinementConfig()
    assert base.refined().scale == 0.5
    assert base.coarsened().level == -1
    assert base.coarsened().scale == 2.0


# -- finite-element solves --------------------------------------------------------------------


@pytest.fixture(scope="module")
def mesh_1mm(sphere_1mm_mode, coarse):
    return build_mesh(SPHERE_1MM, sphere_1mm_mode, coarse)


@pytest.mark.slow
def test_mesh_is_valid(mesh_1mm, sphere_1mm_mode):
    mesh = mesh_1mm

    assert np.all(mesh.element_areas() > 0)
    assert mesh.elements.shape[1] == 6
    assert np.all(mesh.nodes[mesh.axis_nodes, 0] < 1e-15)
    assert np.all(mesh.nodes[mesh.equator_nodes, 1] < 1e-15)
    assert np.all(mesh.section.contains(mesh.nodes, tol=1e-12))
    assert mesh.mode_region_size(sphere_1mm_mode) <= mesh.h_mode * (1.0 + 1e-9)
    # midside nodes sit halfway along their edges
    e = mesh.elements[0]
    np.testing.assert_allclose(mesh.nodes[e[3]], 0.5 * (mesh.nodes[e[0]] + mesh.nodes[e[1]]))


@pytest.mark.slow
def test_halving_target_size_quadruples_elements(sphere_1mm_mode, coarse):
    base = build_mesh(SPHERE_1MM, sphere_1mm_mode, coarse)
    finer = build_mesh(SPHERE_1MM, sphere_1mm_mode, coarse.refined())

    assert finer.h_mode == pytest.approx(0.5 * base.h_mode)
    assert 3.0 <= finer.n_elements / base.n_elements <= 5.0


@pytest.mark.slow
def test_disk_boundary_chord_error(cold, coarse):
    geom = ResonatorGeometry.disk(1e-3, 1.5e-4)
    profile = reference_mode(Shape.DISK, 1e-3, 1.5e-4, n=cold.n)
    mesh = build_mesh(geom, profile, coarse)
    # straight edges: the midside node is where the chord strays furthest from the rim
    mids = mesh.nodes[mesh.outer_edges[:, 2]]

    assert mesh.outer_edges.shape[0] > 0
    assert mesh.section.distance_to_curve(mids).max() < coarse.chord_tolerance


def _eo_force_on_body(load, R):
    """Whole-body |density| integral of an EO load on a sphere of radius R, by quadrature."""

    def integrand(z, rho):
        d_rho, d_z = rho - load.rho0, z
        g = math.exp(-((d_rho / load.w_rho) ** 2 + (d_z / load.w_z) ** 2))
        dist = math.hypot(d_rho, d_z)
        weight = (abs(d_rho) + abs(d_z)) / dist if dist > 0 else 0.0
        return 4.0 * math.pi * rho * load.amplitude * g * weight

    lo = load.rho0 - 8.0 * load.w_rho
    value, _ = integrate.dblquad(
        integrand,
        lo,
        R,
        0.0,
        lambda rho: min(8.0 * load.w_z, math.sqrt(max(R * R - rho * rho, 0.0))),
        epsrel=1e-5,
    )
    return value


@pytest.mark.slow
def test_eo_conjugate_force_of_embedded_mode(coarse):
    # a round mode well inside the body: F = 2 pi rho0 * 4 w^2 * Sigma0 exactly
    w, rho0 = 10e-6, 0.5e-3
    profile = ModeProfile(
        nu=1.9e14,
        m=1,
        w_z=w,
        w_rho=w,
        rho0=rho0,
        lambda_=1.565e-6,
        R=1e-3,
        n=1.43,
        source=ModeSource.SUPPLIED,
    )
    mesh = build_mesh(SPHERE_1MM, profile, coarse)
    vector = assemble_load(mesh, eo_volumetric_load(profile, 1.0))

    assert not vector.truncated
    assert vector.force == pytest.approx(2.0 * math.pi * rho0 * 4.0 * w * w, rel=0.02)
    assert abs(vector.signed_force) < 0.05 * vector.force


@pytest.mark.slow
def test_eo_conjugate_force_of_surface_mode(mesh_1mm, sphere_1mm_mode):
    load = eo_volumetric_load(sphere_1mm_mode, 1.0)
    vector = assemble_load(mesh_1mm, load)
    p = sphere_1mm_mode
    closed_form = 2.0 * math.pi * p.rho0 * 4.0 * p.w_rho * p.w_z

    assert vector.force == pytest.approx(_eo_force_on_body(load, 1e-3), rel=0.02)
    # the elongated mode cut by the surface carries less than the round-Gaussian estimate
    assert 0.5 * closed_form < vector.force < closed_form


@pytest.mark.slow
@pytest.mark.parametrize("R", [1e-4, 1e-3, 1e-2])
def test_uniform_pressure_sphere(R, cold, moduli):
    profile = reference_mode(Shape.SPHERE, R, n=cold.n)
    result = strain_energy(ResonatorGeometry.sphere(R), profile, moduli, uniform_pressure_load(1e6))
    expected = analytic_uniform_sphere_energy(1e6, R, moduli.kappa)

    assert result.work == pytest.approx(expected, rel=0.01)
    assert result.U == pytest.approx(0.5 * result.work, rel=1e-6)
    assert result.F == pytest.approx(uniform_sphere_force(1e6, R), rel=0.005)
    assert result.relative_error <= 0.02
    assert result.residual_norm < 1e-8


@pytest.mark.slow
def test_bb_load_on_sphere(tables, moduli, sphere_1mm_mode):
    load = bb_surface_load(sphere_1mm_mode, 1e6)
    result = strain_energy(SPHERE_1MM, sphere_1mm_mode, moduli, load)
    row = next(r for r in tables.bb if r.shape == Shape.SPHERE and r.R == 1e-3)

    assert result.F == pytest.approx(bb_conjugate_force(1e6, 1e-3, 13.5e-6), rel=0.005)
    assert 0.5 <= result.U / row.U <= 2.0
    assert result.U_coarse is not None
    # energy rises under refinement
    assert result.U_coarse < result.U * (1.0 + RefinementConfig().energy_tolerance)
    sigma = allan_structural(FdtInput(U=result.U, F=result.F, x_scale=1e-3, T=5.5, phi=2e-8))
    assert 0.5 <= sigma / row.sigma <= 2.0


@pytest.mark.slow
def test_bb_load_on_disk(cold, moduli):
    profile = reference_mode(Shape.DISK, 1e-3, 1.5e-4, n=cold.n)
    geom = ResonatorGeometry.disk(1e-3, 1.5e-4)
    result = strain_energy(geom, profile, moduli, bb_surface_load(profile, 1e6))

    assert result.F == pytest.approx(bb_conjugate_force(1e6, 1e-3, profile.w_z), rel=0.005)
    assert result.U > 0


@pytest.mark.slow
def test_eo_load_on_sphere(tables, moduli, sphere_1mm_mode):
    result = strain_energy(
        SPHERE_1MM, sphere_1mm_mode, moduli, eo_volumetric_load(sphere_1mm_mode, 1e9)
    )
    row = next(r for r in tables.eo if r.shape == Shape.SPHERE and r.R == 1e-3)
    r = minor_radius(sphere_1mm_mode).r
    sigma = allan_structural(FdtInput(U=result.U, F=result.F, x_scale=r, T=5.5, phi=2e-8))

    assert not result.truncated
    assert abs(result.signed_force) < result.F
    assert 0.5 <= sigma / row.sigma <= 2.0


@pytest.mark.slow
def test_amplitude_invariance(mesh_1mm, moduli, sphere_1mm_mode):
    load = bb_surface_load(sphere_1mm_mode, 1e6)
    one = solve_static(mesh_1mm, moduli, load, richardson=False)
    two = solve_static(mesh_1mm, moduli, load.scaled(2.0), richardson=False)

    assert two.U == pytest.approx(4.0 * one.U, rel=1e-9)
    assert two.F == pytest.approx(2.0 * one.F, rel=1e-12)
    assert two.U / two.F**2 == pytest.approx(one.U / one.F**2, rel=1e-9)


@pytest.mark.slow
def test_reciprocity(mesh_1mm, moduli, sphere_1mm_mode):
    ab, ba = cross_work(
        mesh_1mm,
        moduli,
        bb_surface_load(sphere_1mm_mode, 1e6),
        eo_volumetric_load(sphere_1mm_mode, 1e9),
    )
    assert ab == pytest.approx(ba, rel=1e-6)


@pytest.mark.slow
def test_clapeyron_on_mode_loads(mesh_1mm, moduli, sphere_1mm_mode):
    solver = StaticSolver(mesh_1mm, moduli)
    for load in (bb_surface_load(sphere_1mm_mode, 1e6), eo_volumetric_load(sphere_1mm_mode, 1e9)):
        solution = solver.solve(load)
        assert solution.work == pytest.approx(2.0 * solution.U, rel=1e-6)


@pytest.mark.slow
def test_conjugate_gradients_match_direct(mesh_1mm, moduli, sphere_1mm_mode):
    load = bb_surface_load(sphere_1mm_mode, 1e6)
    direct = solve_static(mesh_1mm, moduli, load, richardson=False)
    iterative = solve_static(mesh_1mm, moduli, load, richardson=False, solver=SolverKind.CG)

    assert iterative.U == pytest.approx(direct.U, rel=1e-6)


@pytest.mark.slow
def test_threads_do_not_change_results(mesh_1mm, moduli, sphere_1mm_mode):
    load = bb_surface_load(sphere_1mm_mode, 1e6)
    single = solve_static(mesh_1mm, moduli, load, richardson=False, threads=1)
    multi = solve_static(mesh_1mm, moduli, load, richardson=False, threads=2)
    set_threads(1)

    assert multi.U == pytest.approx(single.U, rel=1e-12)
    assert multi.F == single.F


@pytest.mark.slow
def test_unconstrained_equator_is_singular(mesh_1mm, moduli):
    with pytest.raises(SingularSystemError):
        StaticSolver(mesh_1mm, moduli, Constraints(equator_plane=False))


@pytest.mark.slow
def test_assembled_load_matches_conjugate_force(mesh_1mm, sphere_1mm_mode):
    vector = assemble_load(mesh_1mm, bb_surface_load(sphere_1mm_mode, 1e6))

    assert vector.f.shape == (mesh_1mm.n_dofs,)
    assert vector.force == pytest.approx(vector.signed_force)
    # nodal forces point outward: sum of the radial components is positive
    assert vector.f[0::2].sum() > 0


@pytest.mark.slow
def test_export_round_trip(tmp_path, mesh_1mm, moduli, sphere_1mm_mode):
    u = StaticSolver(mesh_1mm, moduli).solve(bb_surface_load(sphere_1mm_mode, 1e6)).u
    path = export_mesh(mesh_1mm, tmp_path / "mesh.txt", u)
    nodes, elements = read_mesh_export(path)

    assert path.read_text().startswith("# wgr-noise mesh sphere-R0.001 level 0")
    np.testing.assert_allclose(nodes[:, :2], mesh_1mm.nodes, rtol=1e-11)
    np.testing.assert_allclose(nodes[:, 2:], u.reshape(-1, 2), rtol=1e-11, atol=1e-30)
    np.testing.assert_array_equal(elements, mesh_1mm.elements)
