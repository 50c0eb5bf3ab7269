"""
Graded quadratic-triangle meshes of resonator cross-sections.

Points come from a quadtree graded towards the mode and the curved boundary, plus boundary
points equidistributed along the outer curve, the axis and the equatorial plane. Their
Delaunay triangulation covers exactly the (convex) boundary polygon; midside nodes are then
added on every edge.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.spatial import Delaunay

from wgr_noise.common import ComponentLogger
from wgr_noise.config import RefinementConfig
from wgr_noise.data_types import ModeProfile, ResonatorGeometry
from wgr_noise.elastostatics.geometry import CrossSection, LineSegment
from wgr_noise.errors import MeshingError, RefinementBudgetError

# Half-widths of the mode region kept at the finest element size
MODE_REGION_WIDTHS = 3.0

MAX_QUADTREE_DEPTH = 30
MAX_FINE_SAMPLES = 1_000_000


@dataclass(frozen=True, eq=False)
class Mesh:
    """
    Quadratic (6-node) triangulation of the meridional quarter section z >= 0.

    Attributes:
        nodes (np.ndarray): (N, 2) node coordinates (rho, z) in m; vertices first, then midsides.
        elements (np.ndarray): (E, 6) connectivity ordered v0, v1, v2, m01, m12, m20,
            counter-clockwise.
        n_vertices (int): Number of corner nodes.
        outer_edges (np.ndarray): (B, 3) boundary edges on the outer curve as (a, b, midside).
        axis_nodes (np.ndarray): Indices of nodes on rho = 0.
        equator_nodes (np.ndarray): Indices of nodes on z = 0.
        section (CrossSection): The meshed cross-section.
        h_mode (float): Target element size in the mode region (m).
        level (int): Refinement level the mesh was built at.
        profile (ModeProfile): Mode the grading was built around.
        refinement (RefinementConfig): Settings the mesh was built with.
    """

    nodes: np.ndarray
    elements: np.ndarray
    n_vertices: int
    outer_edges: np.ndarray
    axis_nodes: np.ndarray
    equator_nodes: np.ndarray
    section: CrossSection
    h_mode: float
    level: int
    profile: ModeProfile
    refinement: RefinementConfig
    order: int = 2

    @property
    def n_nodes(self) -> int:
        return self.nodes.shape[0]

    @property
    def n_elements(self) -> int:
        return self.elements.shape[0]

    @property
    def n_dofs(self) -> int:
        return 2 * self.n_nodes

    def element_areas(self) -> np.ndarray:
        p = self.nodes[self.elements[:, :3]]
        d1 = p[:, 1] - p[:, 0]
        d2 = p[:, 2] - p[:, 0]
        return 0.5 * (d1[:, 0] * d2[:, 1] - d1[:, 1] * d2[:, 0])

    def longest_edges(self) -> np.ndarray:
        p = self.nodes[self.elements[:, :3]]
        edges = np.stack([p[:, 1] - p[:, 0], p[:, 2] - p[:, 1], p[:, 0] - p[:, 2]], axis=1)
        return np.linalg.norm(edges, axis=2).max(axis=1)

    def centroids(self) -> np.ndarray:
        return self.nodes[self.elements[:, :3]].mean(axis=1)

    def mode_region_size(self, profile: ModeProfile) -> float:
        """Longest edge among elements centred inside the one-half-width mode ellipse."""
        c = self.centroids()
        inside = ((c[:, 0] - profile.rho0) / profile.w_rho) ** 2 + (c[:, 1] / profile.w_z) ** 2 <= 1
        if not np.any(inside):
            return math.inf
        return float(self.longest_edges()[inside].max())


class MeshBuilder:
    """
    Builds graded meshes of one cross-section around one mode.

    Parameters
    ----------
    geom : ResonatorGeometry
        The resonator.
    profile : ModeProfile
        Mode whose region (3 half-widths around (rho0, 0)) is meshed at the finest size.
    refinement : RefinementConfig
        Size fractions, grading, chord tolerance, level and node budget.

    """

    def __init__(
        self,
        geom: ResonatorGeometry,
        profile: ModeProfile,
        refinement: RefinementConfig,
    ):
        self.section = CrossSection(geom)
        self.profile = profile
        self.refinement = refinement
        self.scale = refinement.scale
        self.h_mode = refinement.mode_size_fraction * min(profile.w_z, profile.w_rho)
        self.h_max = refinement.max_size_fraction * self.section.extent
        self._chords = self.section.chord_sizes(refinement.chord_tolerance)
        self._log = ComponentLogger(f"MeshBuilder({geom.geometry_id})")

    def target_size(self, pts: np.ndarray) -> np.ndarray:
        """Target element edge length (m) at each point."""
        pts = np.atleast_2d(pts)
        g = self.refinement.grading
        p = self.profile
        d_rho = np.maximum(np.abs(pts[:, 0] - p.rho0) - MODE_REGION_WIDTHS * p.w_rho, 0.0)
        d_z = np.maximum(pts[:, 1] - MODE_REGION_WIDTHS * p.w_z, 0.0)
        h = self.h_mode + g * np.hypot(d_rho, d_z)
        for seg, chord in zip(self.section.segments, self._chords):
            if math.isfinite(chord):
                h = np.minimum(h, chord + g * seg.project(pts)[0])
        return self.scale * np.minimum(h, self.h_max)

    def build(self, check_mode_region: bool = True) -> Mesh:
        interior = self._quadtree_points()
        boundary = self._boundary_points()
        points = np.vstack([boundary, interior])
        self._check_budget(4 * points.shape[0])

        tri = Delaunay(points).simplices.astype(np.int64)
        tri, points = self._clean(tri, points)
        nodes, elements = _add_midside_nodes(points, tri)
        n_vertices = points.shape[0]
        self._check_budget(nodes.shape[0])

        tol = 1e-9 * self.section.extent
        outer_edges = self._outer_edges(nodes, elements, tol)
        mesh = Mesh(
            nodes=nodes,
            elements=elements,
            n_vertices=n_vertices,
            outer_edges=outer_edges,
            axis_nodes=np.flatnonzero(nodes[:, 0] <= tol),
            equator_nodes=np.flatnonzero(nodes[:, 1] <= tol),
            section=self.section,
            h_mode=self.scale * self.h_mode,
            level=self.refinement.level,
            profile=self.profile,
            refinement=self.refinement,
        )
        if check_mode_region:
            size = mesh.mode_region_size(self.profile)
            if size > mesh.h_mode * (1.0 + 1e-9):
                raise MeshingError(
                    f"mode-region element size {size:.3e} m exceeds {mesh.h_mode:.3e} m"
                )
        self._log.debug(
            f"level {mesh.level}: {mesh.n_elements} elements, {mesh.n_nodes} nodes, "
            f"h_mode={mesh.h_mode:.3e} m",
        )
        return mesh

    def _check_budget(self, n_nodes: int) -> None:
        if n_nodes > self.refinement.max_nodes:
            raise RefinementBudgetError(
                f"{n_nodes} nodes at level {self.refinement.level} exceed the budget of "
                f"{self.refinement.max_nodes}"
            )

    def _quadtree_points(self) -> np.ndarray:
        extent = self.section.extent
        h_min = float(self.target_size(np.array([[self.profile.rho0, 0.0]]))[0])
        depth = min(MAX_QUADTREE_DEPTH, math.ceil(math.log2(2.0 * extent / h_min)) + 1)
        unit = extent / (1 << depth)

        ix = np.zeros(1, dtype=np.int64)
        iy = np.zeros(1, dtype=np.int64)
        lev = np.zeros(1, dtype=np.int64)
        leaves_x, leaves_y, leaves_n = [], [], []
        n_leaves = 0
        while ix.size:
            n = np.left_shift(1, depth - lev)
            size = n * unit
            corner = np.stack([ix * unit, iy * unit], axis=1)
            # sections are down-closed: a cell meets the body iff its lower-left corner does
            meets = self.section.contains(corner)
            centre = corner + 0.5 * size[:, None]
            split = meets & (size > 0.5 * self.target_size(centre)) & (lev < depth)
            leaf = meets & ~split
            leaves_x.append(ix[leaf])
            leaves_y.append(iy[leaf])
            leaves_n.append(n[leaf])
            n_leaves += int(leaf.sum())
            self._check_budget(n_leaves)

            half = n[split] // 2
            x0, y0, l0 = ix[split], iy[split], lev[split] + 1
            ix = np.concatenate([x0, x0 + half, x0, x0 + half])
            iy = np.concatenate([y0, y0, y0 + half, y0 + half])
            lev = np.concatenate([l0, l0, l0, l0])

        lx, ly, ln = (np.concatenate(a) for a in (leaves_x, leaves_y, leaves_n))
        cx = np.concatenate([lx, lx + ln, lx, lx + ln])
        cy = np.concatenate([ly, ly, ly + ln, ly + ln])
        cn = np.concatenate([ln, ln, ln, ln])
        keys = cx * ((1 << depth) + 1) + cy
        unique_keys, first, inverse = np.unique(keys, return_index=True, return_inverse=True)
        cell = np.full(unique_keys.size, np.iinfo(np.int64).max)
        np.minimum.at(cell, inverse, cn)

        pts = np.stack([cx[first] * unit, cy[first] * unit], axis=1)
        spacing = cell * unit
        keep = (
            self.section.contains(pts)
            & (pts[:, 0] >= 0.5 * spacing)
            & (pts[:, 1] >= 0.5 * spacing)
            & (self.section.distance_to_curve(pts) >= 0.5 * spacing)
        )
        return pts[keep]

    def _boundary_points(self) -> np.ndarray:
        pieces = list(self.section.segments)
        pieces.append(LineSegment((0.0, 0.0), (0.0, self.section.height)))
        pieces.append(LineSegment((0.0, 0.0), (self.section.R, 0.0)))
        h_floor = 0.5 * self.scale * min([self.h_mode, *self._chords])

        chunks = []
        for piece in pieces:
            n_fine = int(np.clip(4.0 * piece.length / h_floor, 64, MAX_FINE_SAMPLES))
            u = np.linspace(0.0, 1.0, n_fine + 1)
            density = 2.0 / self.target_size(piece.point(u))
            du = np.diff(u) * piece.length
            cumulative = np.concatenate([[0.0], np.cumsum(0.5 * (density[1:] + density[:-1]) * du)])
            n = max(1, math.ceil(cumulative[-1]))
            uk = np.interp(np.linspace(0.0, cumulative[-1], n + 1), cumulative, u)
            uk[0], uk[-1] = 0.0, 1.0
            chunks.append(piece.point(uk))

        pts = np.vstack(chunks)
        tol = 1e-9 * self.section.extent
        _, first = np.unique(np.round(pts / tol).astype(np.int64), axis=0, return_index=True)
        return pts[np.sort(first)]

    def _clean(self, tri: np.ndarray, points: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        p = points[tri]
        d1 = p[:, 1] - p[:, 0]
        d2 = p[:, 2] - p[:, 0]
        area = 0.5 * (d1[:, 0] * d2[:, 1] - d1[:, 1] * d2[:, 0])
        flip = area < 0
        tri[flip] = tri[flip][:, [0, 2, 1]]
        local = self.target_size(p.mean(axis=1))
        keep = np.abs(area) > 1e-10 * local**2
        if not np.all(keep):
            self._log.debug(f"dropped {int((~keep).sum())} degenerate triangles")
        tri = tri[keep]
        used = np.unique(tri)
        if used.size != points.shape[0]:
            remap = np.full(points.shape[0], -1, dtype=np.int64)
            remap[used] = np.arange(used.size)
            tri = remap[tri]
            points = points[used]
        if tri.shape[0] == 0:
            raise MeshingError(f"no valid triangles for {self.section.geom.geometry_id}")
        return tri, points

    def _outer_edges(self, nodes: np.ndarray, elements: np.ndarray, tol: float) -> np.ndarray:
        local = np.array([[0, 1, 3], [1, 2, 4], [2, 0, 5]])
        edges = elements[:, local].reshape(-1, 3)
        key = np.sort(edges[:, :2], axis=1)
        _, inverse, counts = np.unique(key, axis=0, return_inverse=True, return_counts=True)
        boundary = edges[counts[inverse.ravel()] == 1]

        a, b = nodes[boundary[:, 0]], nodes[boundary[:, 1]]
        on_axis = (a[:, 0] <= tol) & (b[:, 0] <= tol)
        on_equator = (a[:, 1] <= tol) & (b[:, 1] <= tol)
        outer = boundary[~(on_axis | on_equator)]
        ends = np.vstack([nodes[outer[:, 0]], nodes[outer[:, 1]]])
        if np.any(self.section.distance_to_curve(ends) > 1e3 * tol):
            raise MeshingError(
                f"boundary edge off the outer curve for {self.section.geom.geometry_id}"
            )
        return outer


def _add_midside_nodes(points: np.ndarray, tri: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    pairs = np.stack([tri[:, [0, 1]], tri[:, [1, 2]], tri[:, [2, 0]]], axis=1).reshape(-1, 2)
    unique_edges, inverse = np.unique(np.sort(pairs, axis=1), axis=0, return_inverse=True)
    mids = 0.5 * (points[unique_edges[:, 0]] + points[unique_edges[:, 1]])
    edge_ids = inverse.reshape(tri.shape[0], 3)
    nodes = np.vstack([points, mids])
    elements = np.hstack([tri, points.shape[0] + edge_ids])
    return nodes, elements


def build_mesh(
    geom: ResonatorGeometry,
    profile: ModeProfile,
    refinement: RefinementConfig | None = None,
    check_mode_region: bool = True,
) -> Mesh:
    """
    Mesh the quarter cross-section of ``geom`` with graded refinement centred on the mode.

    Raises
    ------
    MeshingError
        If the triangulation degenerates, leaves the boundary, or the mode-region element
        size exceeds its target.
    RefinementBudgetError
        If the mesh would exceed ``refinement.max_nodes`` nodes.

    """
    return MeshBuilder(geom, profile, refinement or RefinementConfig()).build(check_mode_region)
