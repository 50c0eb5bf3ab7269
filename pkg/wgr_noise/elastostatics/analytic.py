"""
Closed-form elastostatic oracles: a sphere and a plane-strain mode tube under uniform pressure.
"""

from __future__ import annotations

import math
from typing import NamedTuple


class TubeEnergy(NamedTuple):
    U: float
    F: float
    stresses: tuple[float, float, float]


def analytic_uniform_sphere_energy(P: float, R: float, kappa: float) -> float:
    """
    Pressure work P dV = (4 pi / 3) P^2 R^3 / kappa of a sphere under uniform pressure (J).
    """
    return 4.0 * math.pi / 3.0 * P * P * R**3 / kappa


def uniform_sphere_force(P: float, R: float) -> float:
    """Total force 4 pi R^2 P of a uniform pressure on a sphere (N)."""
    return 4.0 * math.pi * R * R * P


def analytic_tube_energy(
    P: float, r: float, R: float, kappa: float, G: float, mu: float | None = None
) -> TubeEnergy:
    """
    Energy, conjugate force and stresses of a torus tube of minor radius ``r`` and major
    radius ``R`` squeezed by pressure ``P`` under plane strain, valid for r << R.

    U = pi^2 r^2 R P^2 * 3 / (3 kappa + G), F = (2 pi)^2 r R P. The Poisson ratio ``mu``
    only sets the axial stress; it defaults to the value implied by ``kappa`` and ``G``.
    """
    if mu is None:
        mu = (3.0 * kappa - 2.0 * G) / (2.0 * (3.0 * kappa + G))
    return TubeEnergy(
        U=math.pi**2 * r * r * R * P * P * 3.0 / (3.0 * kappa + G),
        F=(2.0 * math.pi) ** 2 * r * R * P,
        stresses=analytic_tube_stresses(P, mu),
    )


def analytic_tube_stresses(P: float, mu: float) -> tuple[float, float, float]:
    """Plane-strain tube stresses (sigma_rr, sigma_thetatheta, sigma_zz) = (-P, -P, -2 mu P)."""
    return -P, -P, -2.0 * mu * P
