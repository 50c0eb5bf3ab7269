"""
Meridional cross-sections (rho >= 0, z >= 0) of spheres and disks.

The outer curve runs from the equator point (R, 0) to the axis. Every cross-section is convex
and contains the origin, so each ray from the origin meets the outer curve exactly once.
"""

from __future__ import annotations

import math

import numpy as np

from wgr_noise.data_types import ResonatorGeometry
from wgr_noise.errors import GeometryError
from wgr_noise.types import Shape

# Polar angle at which a disk rim arc hands over to its tangent line
RIM_ARC_LIMIT = math.radians(60.0)


class ArcSegment:
    """
    Circular arc (c + a cos(phi), a sin(phi)) for phi in [phi0, phi1], centre on the equator.
    """

    def __init__(self, center: float, radius: float, phi0: float, phi1: float):
        self.center = center
        self.radius = radius
        self.phi0 = phi0
        self.phi1 = phi1
        self.length = radius * (phi1 - phi0)
        self.curvature_radius = radius

    def point(self, u: np.ndarray) -> np.ndarray:
        phi = self.phi0 + np.asarray(u) * (self.phi1 - self.phi0)
        return np.stack([self.center + self.radius * np.cos(phi), self.radius * np.sin(phi)], -1)

    def project(self, pts: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        phi = np.arctan2(pts[:, 1], pts[:, 0] - self.center)
        u = np.clip((phi - self.phi0) / (self.phi1 - self.phi0), 0.0, 1.0)
        dist = np.linalg.norm(pts - self.point(u), axis=1)
        return dist, u

    def ray(self, theta: np.ndarray) -> np.ndarray:
        cos, sin = np.cos(theta), np.sin(theta)
        b = self.center * cos
        disc = b * b - self.center**2 + self.radius**2
        root = np.sqrt(np.maximum(disc, 0.0))
        hit = np.full(theta.shape, -np.inf)
        for t in (b - root, b + root):
            phi = np.arctan2(t * sin, t * cos - self.center)
            ok = (disc >= 0) & (t > 0) & (phi >= self.phi0 - 1e-12) & (phi <= self.phi1 + 1e-12)
            hit = np.where(ok, np.maximum(hit, t), hit)
        return hit


class LineSegment:
    def __init__(self, start: tuple[float, float], end: tuple[float, float]):
        self.start = np.asarray(start, dtype=np.float64)
        self.end = np.asarray(end, dtype=np.float64)
        self.length = float(np.linalg.norm(self.end - self.start))
        self.curvature_radius = math.inf

    def point(self, u: np.ndarray) -> np.ndarray:
        u = np.asarray(u)[..., None]
        return self.start + u * (self.end - self.start)

    def project(self, pts: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        d = self.end - self.start
        u = np.clip((pts - self.start) @ d / (d @ d), 0.0, 1.0)
        dist = np.linalg.norm(pts - self.point(u), axis=1)
        return dist, u

    def ray(self, theta: np.ndarray) -> np.ndarray:
        d = self.end - self.start
        cos, sin = np.cos(theta), np.sin(theta)
        # t (cos, sin) = start + s d
        det = -cos * d[1] + sin * d[0]
        safe = np.where(np.abs(det) > 1e-300, det, 1.0)
        t = (-self.start[0] * d[1] + self.start[1] * d[0]) / safe
        s = (cos * self.start[1] - sin * self.start[0]) / safe
        ok = (np.abs(det) > 1e-300) & (t > 0) & (s >= -1e-12) & (s <= 1.0 + 1e-12)
        return np.where(ok, t, -np.inf)


class CrossSection:
    """
    Outer curve of a resonator's meridional quarter section, with the queries meshing and
    loading need: ray intersection, containment, distance and arc length along the curve.

    Parameters
    ----------
    geom : ResonatorGeometry
        Sphere or disk. Disks use a rim arc of radius S centred at (R - S, 0) up to a 60 degree
        polar angle (or the half-thickness, if lower), its tangent line, then a flat face.

    """

    def __init__(self, geom: ResonatorGeometry):
        self.geom = geom
        if geom.shape == Shape.SPHERE:
            self.segments = [ArcSegment(0.0, geom.R, 0.0, 0.5 * math.pi)]
        else:
            self.segments = _disk_segments(geom.R, geom.S, 0.5 * geom.disk_thickness)
        ends = [seg.point(np.array(1.0)) for seg in self.segments]
        self.height = float(ends[-1][1])
        self.extent = max(geom.R, self.height)
        self.offsets = np.concatenate([[0.0], np.cumsum([seg.length for seg in self.segments])])
        self.length = float(self.offsets[-1])

    @property
    def R(self) -> float:
        return self.geom.R

    def boundary_radius(self, theta: np.ndarray) -> np.ndarray:
        """Distance from the origin to the outer curve along polar angle ``theta``."""
        theta = np.asarray(theta, dtype=np.float64)
        hits = np.stack([seg.ray(theta) for seg in self.segments])
        return hits.max(axis=0)

    def contains(self, pts: np.ndarray, tol: float = 0.0) -> np.ndarray:
        pts = np.atleast_2d(pts)
        r = np.linalg.norm(pts, axis=1)
        theta = np.arctan2(np.maximum(pts[:, 1], 0.0), np.maximum(pts[:, 0], 0.0))
        return (
            (pts[:, 0] >= -tol)
            & (pts[:, 1] >= -tol)
            & (r <= self.boundary_radius(theta) + tol)
        )

    def distance_to_curve(self, pts: np.ndarray) -> np.ndarray:
        pts = np.atleast_2d(pts)
        return np.min([seg.project(pts)[0] for seg in self.segments], axis=0)

    def curve_position(self, pts: np.ndarray) -> np.ndarray:
        """Arc length from the equator to the curve point nearest each of ``pts``."""
        pts = np.atleast_2d(pts)
        projections = [seg.project(pts) for seg in self.segments]
        dist = np.stack([p[0] for p in projections])
        local = np.stack([p[1] * seg.length for p, seg in zip(projections, self.segments)])
        k = np.argmin(dist, axis=0)
        cols = np.arange(pts.shape[0])
        return self.offsets[k] + local[k, cols]

    def point_at(self, s: np.ndarray) -> np.ndarray:
        s = np.clip(np.atleast_1d(np.asarray(s, dtype=np.float64)), 0.0, self.length)
        k = np.clip(np.searchsorted(self.offsets, s, side="right") - 1, 0, len(self.segments) - 1)
        out = np.empty((s.size, 2))
        for i, seg in enumerate(self.segments):
            sel = k == i
            if np.any(sel):
                out[sel] = seg.point((s[sel] - self.offsets[i]) / seg.length)
        return out

    def chord_sizes(self, chord_tolerance: float) -> list[float]:
        """Longest chord per segment whose sagitta stays below ``chord_tolerance``."""
        return [
            math.sqrt(8.0 * seg.curvature_radius * chord_tolerance)
            if math.isfinite(seg.curvature_radius)
            else math.inf
            for seg in self.segments
        ]


def _disk_segments(R: float, S: float, half: float) -> list[ArcSegment | LineSegment]:
    center = R - S
    z_arc = min(half, S * math.sin(RIM_ARC_LIMIT))
    phi_a = math.asin(z_arc / S)
    arc = ArcSegment(center, S, 0.0, phi_a)
    rho_a = center + S * math.cos(phi_a)
    if rho_a <= 0:
        raise GeometryError(f"rim arc of S={S} reaches the axis before the disk face (R={R})")
    segments: list[ArcSegment | LineSegment] = [arc]

    top = (rho_a, z_arc)
    if z_arc < half:
        # tangent continuation; stops at the face or the axis, whichever comes first
        d = (-math.sin(phi_a), math.cos(phi_a))
        t = min((half - z_arc) / d[1], rho_a / -d[0])
        top = (rho_a + t * d[0], z_arc + t * d[1])
        if top[0] < 1e-12 * R:
            top = (0.0, top[1])
        segments.append(LineSegment((rho_a, z_arc), top))
    if top[0] > 0:
        segments.append(LineSegment(top, (0.0, top[1])))
    return segments
