"""
Axisymmetric linear-elastic static solves on quarter-section meshes.

The mesh covers z >= 0. Loads are symmetric in z, so u_z = 0 on the equatorial plane removes
the axial rigid-body translation, and energies, work and forces are doubled for the whole body.
"""

from __future__ import annotations

from typing import NamedTuple

import msgspec
import numba
import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import LinearOperator, cg, splu

from wgr_noise.common import ComponentLogger
from wgr_noise.config import RefinementConfig
from wgr_noise.data_types import IsotropicModuli
from wgr_noise.data_types import LoadSpec
from wgr_noise.data_types import ModeProfile
from wgr_noise.data_types import ResonatorGeometry
from wgr_noise.data_types import StrainEnergyResult
from wgr_noise.elastostatics.kernels import element_dofs
from wgr_noise.elastostatics.kernels import stiffness_blocks
from wgr_noise.elastostatics.loads import LoadVector
from wgr_noise.elastostatics.loads import assemble_load
from wgr_noise.elastostatics.mesh import Mesh
from wgr_noise.elastostatics.mesh import build_mesh
from wgr_noise.errors import NonConvergentRefinementError
from wgr_noise.errors import SingularSystemError
from wgr_noise.errors import SolverError
from wgr_noise.types import SolverKind

# Observed energy convergence order assumed by the two-level error bound
RICHARDSON_ORDER = 2


class Constraints(msgspec.Struct, frozen=True):
    """
    Symmetry constraints of the quarter section.

    Attributes:
        axis (bool): u_rho = 0 on the axis rho = 0. Default True.
        equator_plane (bool): u_z = 0 on the plane z = 0. Default True; without it the axial
            translation is free and the system is singular.
    """

    axis: bool = True
    equator_plane: bool = True


class StaticSolution(NamedTuple):
    """
    Displacement of one load and its whole-body energetics.

    Attributes:
        u (np.ndarray): Nodal displacements, interleaved (u_rho, u_z).
        U (float): Stored strain energy of the whole body (J).
        work (float): Load work of the whole body (J).
        residual_norm (float): Relative residual of the constrained system.
        load (LoadVector): The assembled load.
    """

    u: np.ndarray
    U: float
    work: float
    residual_norm: float
    load: LoadVector


def set_threads(threads: int | None) -> None:
    """Bound the assembly kernels to ``threads`` threads (None leaves numba's default)."""
    if threads is not None:
        numba.set_num_threads(max(1, min(int(threads), numba.config.NUMBA_NUM_THREADS)))


class StaticSolver:
    """
    Assembles and factorises the constrained stiffness of one mesh, then solves loads on it.

    Parameters
    ----------
    mesh : Mesh
        Quadratic quarter-section mesh.
    moduli : IsotropicModuli
        Isotropic elastic moduli.
    constraints : Constraints, optional
        Symmetry constraints.
    solver : SolverKind, default DIRECT
        Sparse LU factorisation, or Jacobi-preconditioned conjugate gradients.
    cg_tolerance : float, default 1e-10
        Relative residual target of the conjugate-gradient path.

    Raises
    ------
    SingularSystemError
        If the constraints leave a rigid-body mode, or the factorisation finds the matrix
        singular.

    """

    def __init__(
        self,
        mesh: Mesh,
        moduli: IsotropicModuli,
        constraints: Constraints | None = None,
        solver: SolverKind = SolverKind.DIRECT,
        cg_tolerance: float = 1e-10,
    ):
        self.mesh = mesh
        self.moduli = moduli
        self.constraints = constraints or Constraints()
        self.solver = solver
        self.cg_tolerance = cg_tolerance
        self._log = ComponentLogger(f"StaticSolver(level={mesh.level})")

        if not self.constraints.equator_plane:
            raise SingularSystemError("axial rigid-body translation is unconstrained")

        self.stiffness = self._assemble()
        fixed = []
        if self.constraints.axis:
            fixed.append(2 * mesh.axis_nodes)
        fixed.append(2 * mesh.equator_nodes + 1)
        free = np.ones(mesh.n_dofs, dtype=bool)
        free[np.concatenate(fixed)] = False
        self.free = np.flatnonzero(free)
        self.k_free = self.stiffness[self.free][:, self.free].tocsc()
        self._lu = None
        if solver == SolverKind.DIRECT:
            try:
                self._lu = splu(self.k_free)
            except RuntimeError as e:
                raise SingularSystemError(str(e)) from e
        self._log.debug(f"{self.n_free} free dofs, {mesh.n_elements} elements")

    @property
    def n_free(self) -> int:
        return int(self.free.size)

    def _assemble(self) -> sp.csr_matrix:
        mesh = self.mesh
        blocks = stiffness_blocks(mesh.nodes, mesh.elements, self.moduli.lame_lambda, self.moduli.G)
        dofs = element_dofs(mesh.elements)
        rows = np.broadcast_to(dofs[:, :, None], blocks.shape).ravel()
        cols = np.broadcast_to(dofs[:, None, :], blocks.shape).ravel()
        return sp.coo_matrix(
            (blocks.ravel(), (rows, cols)), shape=(mesh.n_dofs, mesh.n_dofs)
        ).tocsr()

    def solve_vector(self, f: np.ndarray) -> tuple[np.ndarray, float]:
        """
        Displacement under the nodal force vector ``f`` and its relative residual.

        Raises
        ------
        SolverError
            If the iteration does not converge or the solution is not finite.

        """
        f_free = f[self.free]
        if self._lu is not None:
            x = self._lu.solve(f_free)
        else:
            diag = self.k_free.diagonal()
            jacobi = LinearOperator(self.k_free.shape, matvec=lambda v: v / diag)
            x, info = cg(
                self.k_free, f_free, rtol=self.cg_tolerance, M=jacobi, maxiter=20 * f_free.size
            )
            if info != 0:
                raise SolverError(f"conjugate gradients stopped with info={info}")
        if not np.all(np.isfinite(x)):
            raise SolverError("non-finite displacement")
        norm = np.linalg.norm(f_free)
        residual = float(np.linalg.norm(self.k_free @ x - f_free) / norm) if norm > 0 else 0.0
        u = np.zeros(self.mesh.n_dofs)
        u[self.free] = x
        return u, residual

    def solve(self, load: LoadSpec) -> StaticSolution:
        vector = assemble_load(self.mesh, load)
        u, residual = self.solve_vector(vector.f)
        # 1/2 u.K.u doubled for the mirrored half
        U = float(u @ (self.stiffness @ u))
        work = 2.0 * float(vector.f @ u)
        self._log.debug(f"{load.kind.value}: U={U:.6e} J, residual={residual:.2e}")
        return StaticSolution(u=u, U=U, work=work, residual_norm=residual, load=vector)


def richardson_error(U_fine: float, U_coarse: float, tolerance: float) -> float:
    """
    Two-level error bound of the fine energy ``U_fine`` given ``U_coarse`` one level coarser.

    Refinement relaxes a displacement model, so U may not fall from the coarse to the fine
    level by more than ``tolerance`` of U_fine.

    Raises
    ------
    NonConvergentRefinementError
        If U decreases beyond ``tolerance``, or the bound exceeds ``tolerance`` of U_fine.

    """
    if U_coarse - U_fine > tolerance * U_fine:
        raise NonConvergentRefinementError(
            f"U={U_fine:.6e} J fell from {U_coarse:.6e} J one level coarser; "
            "energy is not monotone under refinement"
        )
    error = abs(U_fine - U_coarse) / (2.0**RICHARDSON_ORDER - 1.0)
    if error > tolerance * U_fine:
        raise NonConvergentRefinementError(
            f"U={U_fine:.6e} J vs {U_coarse:.6e} J one level coarser; error bound "
            f"{error / U_fine:.2%} exceeds {tolerance:.2%}"
        )
    return error


def solve_static(
    mesh: Mesh,
    moduli: IsotropicModuli,
    load: LoadSpec,
    constraints: Constraints | None = None,
    richardson: bool = True,
    solver: SolverKind | None = None,
    threads: int | None = None,
) -> StrainEnergyResult:
    """
    Strain energy U and conjugate force F of ``load`` on the whole revolved body.

    Parameters
    ----------
    mesh : Mesh
        Fine-level mesh; its refinement settings drive the coarse companion and tolerance.
    moduli : IsotropicModuli
        Isotropic elastic moduli.
    load : LoadSpec
        BB traction, EO body force or uniform pressure.
    constraints : Constraints, optional
        Symmetry constraints.
    richardson : bool, default True
        Solve again one level coarser and bound the discretisation error of U.
    solver : SolverKind, optional
        Overrides ``mesh.refinement.solver``.
    threads : int, optional
        Assembly threads.

    Returns
    -------
    StrainEnergyResult

    Raises
    ------
    SingularSystemError
        If the constraints leave the system singular.
    NonConvergentRefinementError
        If U falls under refinement, or the Richardson bound exceeds ``energy_tolerance``
        of U.
    SolverError
        If the linear solve fails or U is not positive.

    """
    set_threads(threads)
    refinement = mesh.refinement
    kind = solver or refinement.solver

    fine = StaticSolver(mesh, moduli, constraints, kind, refinement.cg_tolerance).solve(load)
    if not fine.U > 0 or not fine.load.force > 0:
        raise SolverError(
            f"non-positive energy U={fine.U:.3e} J or force F={fine.load.force:.3e} N"
        )

    U_coarse = None
    error = None
    if richardson:
        coarse_mesh = build_mesh(
            mesh.section.geom, mesh.profile, refinement.coarsened(), check_mode_region=False
        )
        coarse = StaticSolver(coarse_mesh, moduli, constraints, kind, refinement.cg_tolerance)
        U_coarse = coarse.solve(load).U
        error = richardson_error(fine.U, U_coarse, refinement.energy_tolerance)

    return StrainEnergyResult(
        U=fine.U,
        F=fine.load.force,
        work=fine.work,
        signed_force=fine.load.signed_force,
        dofs=int(mesh.n_dofs),
        n_elements=int(mesh.n_elements),
        residual_norm=fine.residual_norm,
        U_coarse=U_coarse,
        discretization_error=error,
        truncated=fine.load.truncated,
    )


def strain_energy(
    geom: ResonatorGeometry,
    profile: ModeProfile,
    moduli: IsotropicModuli,
    load: LoadSpec,
    refinement: RefinementConfig | None = None,
    richardson: bool = True,
    threads: int | None = None,
) -> StrainEnergyResult:
    """Mesh ``geom`` around ``profile`` and solve ``load`` on it."""
    mesh = build_mesh(geom, profile, refinement or RefinementConfig())
    return solve_static(mesh, moduli, load, richardson=richardson, threads=threads)


def cross_work(
    mesh: Mesh,
    moduli: IsotropicModuli,
    load_a: LoadSpec,
    load_b: LoadSpec,
    constraints: Constraints | None = None,
) -> tuple[float, float]:
    """
    Reciprocal works <u_a, f_b> and <u_b, f_a> of two loads on one mesh (whole body, J).
    """
    solver = StaticSolver(mesh, moduli, constraints)
    a = solver.solve(load_a)
    b = solver.solve(load_b)
    return 2.0 * float(a.u @ b.load.f), 2.0 * float(b.u @ a.load.f)
