"""
Plain-text export of meshes and displacement fields.

Format (whitespace separated, ``#`` comments)::

    # wgr-noise mesh <geometry id> level <level>
    nodes <N>
    <rho> <z> [<u_rho> <u_z>]        N lines, m
    elements <E>
    <n0> <n1> <n2> <n3> <n4> <n5>    E lines, 0-based, corners then midsides
"""

from __future__ import annotations

from pathlib import Path

import numpy as np

from wgr_noise.common import ComponentLogger
from wgr_noise.elastostatics.mesh import Mesh

_log = ComponentLogger("export")


def export_mesh(mesh: Mesh, path: str | Path, u: np.ndarray | None = None) -> Path:
    """
    Write ``mesh`` (and optionally the nodal displacement ``u``) to ``path``.
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    columns = mesh.nodes if u is None else np.hstack([mesh.nodes, u.reshape(-1, 2)])
    with path.open("w") as fh:
        fh.write(f"# wgr-noise mesh {mesh.section.geom.geometry_id} level {mesh.level}\n")
        fh.write(f"nodes {mesh.n_nodes}\n")
        np.savetxt(fh, columns, fmt="%.12e")
        fh.write(f"elements {mesh.n_elements}\n")
        np.savetxt(fh, mesh.elements, fmt="%d")
    _log.info(f"wrote {mesh.n_nodes} nodes, {mesh.n_elements} elements to {path}")
    return path


def read_mesh_export(path: str | Path) -> tuple[np.ndarray, np.ndarray]:
    """Node columns and element connectivity of a file written by ``export_mesh``."""
    lines = [
        line for line in Path(path).read_text().splitlines() if line and not line.startswith("#")
    ]
    n_nodes = int(lines[0].split()[1])
    nodes = np.loadtxt(lines[1 : 1 + n_nodes], ndmin=2)
    n_elements = int(lines[1 + n_nodes].split()[1])
    elements = np.loadtxt(lines[2 + n_nodes : 2 + n_nodes + n_elements], dtype=np.int64, ndmin=2)
    return nodes, elements
