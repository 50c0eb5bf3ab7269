"""
Fundamental whispering-gallery mode profiles: asymptotic estimates or supplied parameters.
"""

from __future__ import annotations

import math

from scipy.optimize import brentq

from wgr_noise.common import ComponentLogger
from wgr_noise.constants import AIRY_ZERO_1
from wgr_noise.constants import MIN_SIZE_PARAMETER
from wgr_noise.constants import MINOR_RADIUS_COEFFICIENT
from wgr_noise.constants import SPEED_OF_LIGHT
from wgr_noise.constants import W_RHO_COEFFICIENT
from wgr_noise.data_types import ModeGeometrySummary, ModeProfile, ResonatorGeometry
from wgr_noise.errors import AsymptoticValidityError
from wgr_noise.reference import load_reference_tables
from wgr_noise.types import ModeSource, Polarization, Shape

_log = ComponentLogger("modes")


def polarization_term(n: float, polarization: Polarization) -> float:
    """P / sqrt(n^2 - 1), with P = n for TE and P = 1/n for TM."""
    p = n if polarization == Polarization.TE else 1.0 / n
    return p / math.sqrt(n * n - 1.0)


def dispersion_frequency(
    m: int,
    R: float,
    n: float,
    polarization: Polarization = Polarization.TM,
) -> float:
    """
    Frequency (Hz) of the fundamental mode with azimuthal index ``m`` on a sphere of radius ``R``.

    nu(m) = c / (2 pi n R) [m + 1/2 + a1 ((m + 1/2)/2)^(1/3) - P / sqrt(n^2 - 1)]
    with a1 the magnitude of the first Airy zero.
    """
    y = m + 0.5
    return (
        SPEED_OF_LIGHT
        / (2.0 * math.pi * n * R)
        * (y + AIRY_ZERO_1 * (y / 2.0) ** (1.0 / 3.0) - polarization_term(n, polarization))
    )


def index_for_frequency(
    nu: float,
    R: float,
    n: float,
    polarization: Polarization = Polarization.TM,
) -> int:
    """
    Nearest azimuthal index whose dispersion frequency is ``nu``.

    Raises
    ------
    AsymptoticValidityError
        If no index of at least 1 is compatible with ``nu``.

    """
    x = 2.0 * math.pi * n * R * nu / SPEED_OF_LIGHT + polarization_term(n, polarization)

    def residual(y: float) -> float:
        return y + AIRY_ZERO_1 * (y / 2.0) ** (1.0 / 3.0) - x

    if residual(1.5) > 0:
        raise AsymptoticValidityError(f"nu={nu:.6e} Hz is below the m=1 mode of R={R} m")
    y = brentq(residual, 1.5, x + 1.0, xtol=1e-12)
    return max(1, round(y - 0.5))


def size_parameter(R: float, lambda_: float, n: float) -> float:
    return 2.0 * math.pi * R * n / lambda_


def estimate_fundamental_mode(
    geom: ResonatorGeometry,
    lambda_: float,
    n: float,
    polarization: Polarization = Polarization.TM,
    w_rho_coefficient: float = W_RHO_COEFFICIENT,
) -> ModeProfile:
    """
    Estimate the fundamental mode of a sphere or disk from the asymptotic dispersion relation.

    Parameters
    ----------
    geom : ResonatorGeometry
        The resonator.
    lambda_ : float
        Target vacuum wavelength (m); the mode is the one nearest to c / lambda_.
    n : float
        Refractive index.
    polarization : Polarization, default TM
        Selects the polarization term of the dispersion relation.
    w_rho_coefficient : float, default 0.80
        Empirical coefficient c of w_rho = c R m^(-2/3).

    Returns
    -------
    ModeProfile
        With ``source`` ESTIMATED. The polar width is R m^(-1/2) for spheres and
        (R^3 S)^(1/8) sqrt(lambda / (2 pi n)) for disks; rho0 = R - w_rho.

    Raises
    ------
    AsymptoticValidityError
        If 2 pi R n / lambda does not exceed 50.

    """
    if not lambda_ > 0:
        raise AsymptoticValidityError(f"wavelength must be positive, was {lambda_}")
    x = size_parameter(geom.R, lambda_, n)
    if not x > MIN_SIZE_PARAMETER:
        raise AsymptoticValidityError(
            f"2 pi R n / lambda = {x:.1f} <= {MIN_SIZE_PARAMETER} for R={geom.R} m"
        )

    m = index_for_frequency(SPEED_OF_LIGHT / lambda_, geom.R, n, polarization)
    nu = dispersion_frequency(m, geom.R, n, polarization)
    if geom.shape == Shape.SPHERE:
        w_z = geom.R / math.sqrt(m)
    else:
        w_z = (geom.R**3 * geom.S) ** 0.125 * math.sqrt(lambda_ / (2.0 * math.pi * n))
    w_rho = w_rho_coefficient * geom.R * m ** (-2.0 / 3.0)

    profile = ModeProfile(
        nu=nu,
        m=m,
        w_z=w_z,
        w_rho=w_rho,
        rho0=geom.R - w_rho,
        lambda_=lambda_,
        R=geom.R,
        n=n,
        polarization=polarization,
        source=ModeSource.ESTIMATED,
    )
    # nu carries the Airy correction, so only the geometric constraints apply here
    profile.check(frequency=False)
    _log.debug(
        f"{geom.geometry_id}: m={m}, nu={nu:.6e} Hz, w_z={w_z:.4e} m, w_rho={w_rho:.4e} m",
    )
    return profile


def mode_from_parameters(
    nu: float,
    m: int,
    w_z: float,
    w_rho: float,
    rho0: float,
    lambda_: float,
    R: float,
    n: float,
    polarization: Polarization = Polarization.TM,
) -> ModeProfile:
    """
    Wrap supplied mode parameters, unmodified, after checking the profile invariants.

    ``R`` is the host radius the invariants are checked against and ``n`` the index of the
    frequency consistency check.

    Raises
    ------
    ModeInvariantError
        Naming the first violated constraint.

    """
    profile = ModeProfile(
        nu=nu,
        m=m,
        w_z=w_z,
        w_rho=w_rho,
        rho0=rho0,
        lambda_=lambda_,
        R=R,
        n=n,
        polarization=polarization,
        source=ModeSource.SUPPLIED,
    )
    profile.check()
    return profile


def reference_mode(
    shape: Shape,
    R: float,
    S: float | None = None,
    n: float = 1.43,
) -> ModeProfile:
    """
    Supplied profile of a geometry from the bundled reference tables.

    A missing azimuthal index is filled from the dispersion relation at the tabulated frequency.
    """
    tables = load_reference_tables()
    row = tables.find_mode(shape, R, S)
    m = row.m if row.m is not None else index_for_frequency(row.nu, R, n)
    return mode_from_parameters(
        row.nu, m, row.w_z, row.w_rho, row.rho0, tables.wavelength, R=R, n=n
    )


def mode_volume(R: float, lambda_: float, n: float) -> float:
    """
    Closed-form mode volume V_m = 3.4 pi^(3/2) (lambda/n)^(7/6) R^(11/6) (m^3).
    """
    return 3.4 * math.pi**1.5 * (lambda_ / n) ** (7.0 / 6.0) * R ** (11.0 / 6.0)


def minor_radius(profile: ModeProfile) -> ModeGeometrySummary:
    """
    Effective minor radius r = sqrt(w_rho w_z) and tube volume V_m = 2 pi^2 rho0 r^2.
    """
    r = math.sqrt(profile.w_rho * profile.w_z)
    return ModeGeometrySummary(r=r, V_m=2.0 * math.pi**2 * profile.rho0 * r * r)


def estimate_minor_radius(R: float, lambda_: float, n: float) -> float:
    """
    Closed-form minor radius r = 0.335 (lambda/n)^(7/12) R^(5/12) (m).
    """
    return MINOR_RADIUS_COEFFICIENT * (lambda_ / n) ** (7.0 / 12.0) * R ** (5.0 / 12.0)
