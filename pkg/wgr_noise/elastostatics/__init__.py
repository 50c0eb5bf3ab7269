"""
Axisymmetric finite-element elastostatics for resonator bodies, with closed-form oracles.
"""

from wgr_noise.elastostatics.analytic import analytic_tube_energy
from wgr_noise.elastostatics.analytic import analytic_tube_stresses
from wgr_noise.elastostatics.analytic import analytic_uniform_sphere_energy
from wgr_noise.elastostatics.analytic import uniform_sphere_force
from wgr_noise.elastostatics.export import export_mesh
from wgr_noise.elastostatics.export import read_mesh_export
from wgr_noise.elastostatics.geometry import CrossSection
from wgr_noise.elastostatics.loads import assemble_load
from wgr_noise.elastostatics.loads import bb_conjugate_force
from wgr_noise.elastostatics.loads import bb_surface_load
from wgr_noise.elastostatics.loads import eo_force_density
from wgr_noise.elastostatics.loads import eo_volumetric_load
from wgr_noise.elastostatics.loads import uniform_pressure_load
from wgr_noise.elastostatics.mesh import Mesh
from wgr_noise.elastostatics.mesh import build_mesh
from wgr_noise.elastostatics.solver import Constraints
from wgr_noise.elastostatics.solver import StaticSolver
from wgr_noise.elastostatics.solver import cross_work
from wgr_noise.elastostatics.solver import richardson_error
from wgr_noise.elastostatics.solver import set_threads
from wgr_noise.elastostatics.solver import solve_static
from wgr_noise.elastostatics.solver import strain_energy

__all__ = [
    "Constraints",
    "CrossSection",
    "Mesh",
    "StaticSolver",
    "analytic_tube_energy",
    "analytic_tube_stresses",
    "analytic_uniform_sphere_energy",
    "assemble_load",
    "bb_conjugate_force",
    "bb_surface_load",
    "build_mesh",
    "cross_work",
    "eo_force_density",
    "eo_volumetric_load",
    "export_mesh",
    "read_mesh_export",
    "richardson_error",
    "set_threads",
    "solve_static",
    "strain_energy",
    "uniform_pressure_load",
    "uniform_sphere_force",
]
