"""
Conjugate loads of the Brownian-boundary and elasto-optic readouts, and a uniform pressure.
"""

from __future__ import annotations

import math
from typing import NamedTuple

import numpy as np

from wgr_noise.common import ComponentLogger
from wgr_noise.data_types import LoadSpec, ModeProfile
from wgr_noise.elastostatics.kernels import EDGE_N
from wgr_noise.elastostatics.kernels import EDGE_POINTS
from wgr_noise.elastostatics.kernels import EDGE_WEIGHTS
from wgr_noise.elastostatics.kernels import body_force_vector
from wgr_noise.elastostatics.kernels import quadrature_points
from wgr_noise.elastostatics.mesh import Mesh
from wgr_noise.types import LoadKind

# Extent of the mode Gaussian checked against the body outline
TRUNCATION_WIDTHS = 3.0

_log = ComponentLogger("loads")


class LoadVector(NamedTuple):
    """
    Assembled load on the quarter section, with its conjugate forces for the whole body.

    Attributes:
        f (np.ndarray): Global nodal force vector of the z >= 0 half.
        force (float): Conjugate total force F of the whole body (N).
        signed_force (float): Signed counterpart of F (N).
        truncated (bool): Whether the load profile is cut off by the body.
    """

    f: np.ndarray
    force: float
    signed_force: float
    truncated: bool = False


def bb_surface_load(profile: ModeProfile, A: float) -> LoadSpec:
    """
    Outward surface traction A exp(-(s / w_z)^2), s the arc length from the equator.
    """
    return LoadSpec(
        kind=LoadKind.BB_SURFACE,
        amplitude=A,
        w_z=profile.w_z,
        w_rho=profile.w_rho,
        rho0=profile.rho0,
    )


def eo_volumetric_load(profile: ModeProfile, Sigma0: float) -> LoadSpec:
    """
    Body force of density Sigma0 exp(-[((rho - rho0)/w_rho)^2 + (z/w_z)^2]) pointing at the
    mode centre (rho0, 0).
    """
    return LoadSpec(
        kind=LoadKind.EO_VOLUMETRIC,
        amplitude=Sigma0,
        w_z=profile.w_z,
        w_rho=profile.w_rho,
        rho0=profile.rho0,
    )


def uniform_pressure_load(P: float) -> LoadSpec:
    return LoadSpec(kind=LoadKind.UNIFORM_PRESSURE, amplitude=P)


def bb_conjugate_force(A: float, R: float, w_z: float) -> float:
    """Closed-form conjugate force 2 pi^(3/2) A R w_z of the BB traction (N)."""
    return 2.0 * math.pi**1.5 * A * R * w_z


def assemble_load(mesh: Mesh, load: LoadSpec) -> LoadVector:
    """
    Consistent nodal forces of ``load`` on ``mesh`` and its conjugate force.
    """
    if load.kind == LoadKind.EO_VOLUMETRIC:
        return _volumetric(mesh, load)
    return _surface(mesh, load)


def eo_force_density(load: LoadSpec, pts: np.ndarray) -> np.ndarray:
    """(..., 2) body-force density of an EO load at points ``pts`` (..., 2)."""
    d_rho = pts[..., 0] - load.rho0
    d_z = pts[..., 1]
    g = np.exp(-((d_rho / load.w_rho) ** 2 + (d_z / load.w_z) ** 2))
    dist = np.hypot(d_rho, d_z)
    scale = np.divide(
        -load.amplitude * g, dist, out=np.zeros_like(dist), where=dist > 0
    )
    return np.stack([scale * d_rho, scale * d_z], axis=-1)


def _volumetric(mesh: Mesh, load: LoadSpec) -> LoadVector:
    pts, weights = quadrature_points(mesh.nodes, mesh.elements)
    density = eo_force_density(load, pts)
    f = body_force_vector(mesh.nodes, mesh.elements, density, weights)
    # the z < 0 half mirrors: magnitudes double, signed z-components cancel
    force = 2.0 * float(np.sum(weights * (np.abs(density[..., 0]) + np.abs(density[..., 1]))))
    signed = 2.0 * float(np.sum(weights * density[..., 0]))

    extent = np.array(
        [
            [load.rho0, TRUNCATION_WIDTHS * load.w_z],
            [load.rho0 - TRUNCATION_WIDTHS * load.w_rho, 0.0],
        ]
    )
    truncated = not bool(np.all(mesh.section.contains(extent)))
    if truncated:
        _log.warning(
            f"EO load support at rho0={load.rho0:.4e} m is cut by the body within "
            f"{TRUNCATION_WIDTHS:g} half-widths",
        )
    return LoadVector(f=f, force=force, signed_force=signed, truncated=truncated)


def _surface(mesh: Mesh, load: LoadSpec) -> LoadVector:
    edges = mesh.outer_edges
    a = mesh.nodes[edges[:, 0]]
    b = mesh.nodes[edges[:, 1]]
    tangent = b - a
    length = np.linalg.norm(tangent, axis=1)
    normal = np.stack([tangent[:, 1], -tangent[:, 0]], axis=1) / length[:, None]
    # convex sections contain the origin, so outward normals point away from it
    flip = np.einsum("ij,ij->i", normal, 0.5 * (a + b)) < 0
    normal[flip] *= -1.0

    pts = a[:, None, :] + EDGE_POINTS[None, :, None] * tangent[:, None, :]
    weights = EDGE_WEIGHTS[None, :] * length[:, None] * 2.0 * np.pi * pts[..., 0]

    if load.kind == LoadKind.BB_SURFACE:
        s = mesh.section.curve_position(pts.reshape(-1, 2)).reshape(pts.shape[:2])
        magnitude = load.amplitude * np.exp(-((s / load.w_z) ** 2))
        direction = normal
    else:
        magnitude = np.full(pts.shape[:2], load.amplitude)
        direction = -normal

    traction = magnitude[..., None] * direction[:, None, :]
    fe = np.einsum("eq,qk,eqd->ekd", weights, EDGE_N, traction)
    f = np.zeros(mesh.n_dofs)
    for k in range(3):
        np.add.at(f, 2 * edges[:, k], fe[:, k, 0])
        np.add.at(f, 2 * edges[:, k] + 1, fe[:, k, 1])

    force = 2.0 * float(np.sum(weights * magnitude))
    return LoadVector(f=f, force=force, signed_force=force)
