"""
Fluctuation-dissipation noise terms: spectral densities and Allan deviations of the
Brownian-boundary, elasto-optic and thermorefractive contributions, and closed-form estimates.
"""

from __future__ import annotations

import math

from wgr_noise.constants import ALLAN_1F_PREFACTOR
from wgr_noise.constants import K_B
from wgr_noise.data_types import FdtInput, MaterialProperties
from wgr_noise.types import EoCombination

# Prefactor of the closed-form elasto-optic estimate
EO_ESTIMATE_COEFFICIENT = 0.55

_LN2 = math.log(2.0)


def fdt_psd(inp: FdtInput, f: float) -> float:
    """
    One-sided spectral density of relative coordinate fluctuations under structural damping.

    S(f) = (4 / pi) k_B T U phi / (x^2 f F^2)   (1/Hz)
    """
    if not f > 0:
        raise ValueError(f"frequency must be positive, was {f}")
    return 4.0 / math.pi * K_B * inp.T * inp.U * inp.phi / (inp.x_scale**2 * f * inp.F**2)


def allan_structural(inp: FdtInput) -> float:
    """
    Allan deviation of a 1/f relative-coordinate noise; independent of averaging time.

    sigma = sqrt(8 ln2 / pi) sqrt(k_B T U phi) / (x F)
    """
    return ALLAN_1F_PREFACTOR * math.sqrt(K_B * inp.T * inp.U * inp.phi) / (inp.x_scale * inp.F)


def eo_factor(n: float, p11: float, p12: float) -> float:
    """Volume elasto-optic factor (p11 + 2 p12) / 3 * n^2."""
    return (p11 + 2.0 * p12) / 3.0 * n * n


def allan_eo(
    sigma_dR: float,
    sigma_dr: float,
    n: float,
    p11: float,
    p12: float,
    mode: EoCombination = EoCombination.NEGLECT_DR,
) -> float:
    """
    Elasto-optic Allan deviation from the path-radius and minor-radius deviations.

    Parameters
    ----------
    sigma_dR : float
        Relative path-radius deviation sigma_dR/R.
    sigma_dr : float
        Relative minor-radius deviation sigma_dr/r.
    n, p11, p12 : float
        Refractive index and elasto-optic constants.
    mode : EoCombination, default NEGLECT_DR
        NEGLECT_DR drops the path-radius term; LINEAR adds 1/2 sigma_dR + sigma_dr;
        QUADRATURE adds them as uncorrelated terms.

    """
    if sigma_dR < 0 or sigma_dr < 0:
        raise ValueError(f"deviations must be nonnegative, were {sigma_dR}, {sigma_dr}")
    if mode == EoCombination.NEGLECT_DR:
        volume = sigma_dr
    elif mode == EoCombination.LINEAR:
        volume = 0.5 * sigma_dR + sigma_dr
    else:
        volume = math.hypot(0.5 * sigma_dR, sigma_dr)
    return volume * eo_factor(n, p11, p12)


def allan_tr(
    R: float,
    T: float,
    props: MaterialProperties,
    Gamma: float,
    tau: float,
) -> float:
    """
    Thermorefractive Allan deviation, a white-frequency term falling as tau^(-1/2).

    sigma_TR = (2 T / pi) sqrt(k_B Gamma / (gamma R tau)) |(1/n) dn/dT|
    """
    return (
        2.0
        * T
        / math.pi
        * math.sqrt(K_B * Gamma / (props.gamma * R * tau))
        * abs(props.dn_dT_over_n)
    )


def tr_psd(R: float, T: float, props: MaterialProperties, Gamma: float) -> float:
    """
    Low-frequency (white) thermorefractive spectral density, S = 2 tau sigma_TR(tau)^2 (1/Hz).
    """
    return (
        8.0 * K_B * T * T * Gamma / (math.pi**2 * props.gamma * R) * props.dn_dT_over_n**2
    )


def estimate_bb_sphere(R: float, T: float, phi: float, kappa: float) -> float:
    """
    Closed-form Brownian-boundary Allan deviation of a sphere under uniform pressure.

    sigma = sqrt((2/3) ln2 / pi) sqrt(k_B T phi / (kappa R^3))
    """
    return math.sqrt(2.0 / 3.0 * _LN2 / math.pi) * math.sqrt(K_B * T * phi / (kappa * R**3))


def estimate_bb_psd(R: float, T: float, phi: float, kappa: float, f: float) -> float:
    """Spectral density (1/Hz) matching ``estimate_bb_sphere`` as a 1/f noise."""
    if not f > 0:
        raise ValueError(f"frequency must be positive, was {f}")
    return estimate_bb_sphere(R, T, phi, kappa) ** 2 / (2.0 * _LN2 * f)


def estimate_dr_sphere(
    R: float,
    lambda_: float,
    n: float,
    T: float,
    phi: float,
    kappa: float,
    G: float,
) -> float:
    """
    Closed-form minor-radius deviation sigma_dr/r of the mode tube of a sphere.
    """
    return (
        EO_ESTIMATE_COEFFICIENT
        * n ** (7.0 / 12.0)
        / (lambda_ ** (7.0 / 12.0) * R ** (11.0 / 12.0))
        * math.sqrt(K_B * T * phi / (3.0 * kappa + G))
    )


def estimate_eo(
    R: float,
    lambda_: float,
    n: float,
    T: float,
    phi: float,
    kappa: float,
    G: float,
    p11: float,
    p12: float,
) -> float:
    """
    Closed-form elasto-optic Allan deviation of a sphere:

    0.55 n^(31/12) / (lambda^(7/12) R^(11/12)) sqrt(k_B T phi / (3 kappa + G)) (p11 + 2 p12) / 3
    """
    return estimate_dr_sphere(R, lambda_, n, T, phi, kappa, G) * eo_factor(n, p11, p12)


def sigma_at_loss(sigma: float, T: float, phi: float, T_new: float, phi_new: float) -> float:
    """Rescale a structural-damping deviation to another temperature and loss angle."""
    return sigma * math.sqrt(T_new * phi_new / (T * phi))
