"""
Equilibrium and Weights

Global Maxwellian M(v, I), the polynomial weight w(v, I), the Gamma function
and the table of exact Gaussian/Gamma moments used as golden values.
"""

import math
from enum import Enum
from typing import Optional, Union

import numpy as np
from scipy import special

from gas_model.params import ModelParams, PhasePoint
from utils.errors import DomainError, UsageError


def gamma_fn(s: float) -> float:
    """Γ(s) for s > 0"""
    if not np.isfinite(s) or s <= 0:
        raise DomainError(f"Gamma function requires s > 0, got {s}")
    return float(special.gamma(s))


def log_maxwellian_values(v: np.ndarray, i: np.ndarray, params: ModelParams) -> np.ndarray:
    """
    log M on arrays of velocities (..., 3) and internal energies (...)

    Boundary states i = 0 give log M = -inf when δ > 2 and the continuous
    value when δ = 2.
    """
    v = np.asarray(v, dtype=float)
    i = np.asarray(i, dtype=float)
    a = params.laguerre_parameter
    base = params.log_maxwellian_constant - 0.5 * np.sum(v * v, axis=-1) - i
    if a == 0:
        return base
    with np.errstate(divide="ignore"):
        return base + a * np.log(i)


def maxwellian_values(v: np.ndarray, i: np.ndarray, params: ModelParams) -> np.ndarray:
    """Vectorised M(v, I)"""
    return np.exp(log_maxwellian_values(v, i, params))


def reduced_maxwellian_values(v: np.ndarray, i: np.ndarray, params: ModelParams) -> np.ndarray:
    """M / I^{δ/2−1}, finite up to the boundary I = 0"""
    v = np.asarray(v, dtype=float)
    i = np.asarray(i, dtype=float)
    return np.exp(params.log_maxwellian_constant - 0.5 * np.sum(v * v, axis=-1) - i)


def maxwellian(p: PhasePoint, params: ModelParams) -> float:
    """
    Global equilibrium M(v, I) = I^{δ/2−1} e^{−|v|²/2−I} / ((2π)^{3/2} Γ(δ/2))

    Args:
        p: Phase point with p.i > 0
        params: Model parameters

    Returns:
        float: M(v, I)
    """
    if p.i <= 0:
        raise DomainError(f"Maxwellian requires I > 0, got I={p.i}")
    return float(maxwellian_values(p.velocity, np.asarray(p.i), params))


def weight_values(v: np.ndarray, i: np.ndarray, beta: float) -> np.ndarray:
    """Vectorised w(v, I) = (1 + |v| + √I)^β"""
    v = np.asarray(v, dtype=float)
    i = np.asarray(i, dtype=float)
    return (1.0 + np.linalg.norm(v, axis=-1) + np.sqrt(np.maximum(i, 0.0))) ** beta


def weight(p: PhasePoint, params: ModelParams) -> float:
    """Polynomial weight w(v, I) = (1 + |v| + √I)^β"""
    return float(weight_values(p.velocity, np.asarray(p.i), params.beta))


def moment_matched_maxwellian(v: np.ndarray, i: np.ndarray, rho: float, u: np.ndarray,
                              temperature: float, params: ModelParams) -> np.ndarray:
    """
    Single-temperature polyatomic Maxwellian with given density, bulk
    velocity and temperature

    Args:
        v: Velocities (..., 3)
        i: Internal energies (...)
        rho: Density
        u: Bulk velocity (3,)
        temperature: Temperature T > 0
        params: Model parameters

    Returns:
        np.ndarray: ρ I^{δ/2−1} e^{−|v−u|²/(2T) − I/T} / ((2πT)^{3/2} Γ(δ/2) T^{δ/2})
    """
    if rho <= 0 or temperature <= 0:
        raise DomainError(f"density and temperature must be positive, got rho={rho}, T={temperature}")
    v = np.asarray(v, dtype=float)
    i = np.asarray(i, dtype=float)
    u = np.asarray(u, dtype=float)
    a = params.laguerre_parameter
    log_norm = (math.log(rho) - 1.5 * math.log(2 * math.pi * temperature)
                - special.gammaln(params.delta / 2) - (params.delta / 2) * math.log(temperature))
    exponent = log_norm - np.sum((v - u) ** 2, axis=-1) / (2 * temperature) - i / temperature
    if a != 0:
        with np.errstate(divide="ignore"):
            exponent = exponent + a * np.log(i)
    return np.exp(exponent)


def entropy_maxwellian(params: ModelParams) -> float:
    """Closed form of ∫ M log(M / I^{δ/2−1}) dv dI"""
    return params.log_maxwellian_constant - (3 + params.delta) / 2


class Moment(str, Enum):
    """Selectors of the exact moment table (normalized Gaussian / Gamma measures)"""

    ONE = "1"
    V_I_SQ = "v_i^2"
    V_I_FOURTH = "v_i^4"
    V_SQ = "|v|^2"
    V_FOURTH = "|v|^4"
    V_SIXTH = "|v|^6"
    V_SQ_VJ_SQ = "|v|^2 v_j^2"
    V_FOURTH_VJ_SQ = "|v|^4 v_j^2"
    VI_SQ_VJ_SQ = "v_i^2 v_j^2"
    I_GAMMA_BASE = "I^(d/2-1)"
    I_GAMMA_FIRST = "I^(d/2)"
    I_GAMMA_SECOND = "I^(d/2+1)"


_GAUSSIAN_MOMENTS = {
    Moment.ONE: 1.0,
    Moment.V_I_SQ: 1.0,
    Moment.V_I_FOURTH: 3.0,
    Moment.V_SQ: 3.0,
    Moment.V_FOURTH: 15.0,
    Moment.V_SIXTH: 105.0,
    Moment.V_SQ_VJ_SQ: 5.0,
    Moment.V_FOURTH_VJ_SQ: 35.0,
    Moment.VI_SQ_VJ_SQ: 1.0,
}


def moment_identity(kind: Union[Moment, str], params: Optional[ModelParams] = None) -> float:
    """
    Exact moment from the table

    Gaussian selectors are expectations under e^{−|v|²/2}/(2π)^{3/2}; Gamma
    selectors are ∫ I^{s} e^{−I} dI / Γ(δ/2) and need params for δ.

    Args:
        kind: Moment selector (enum member or its string value)
        params: Model parameters (required for the Gamma selectors)

    Returns:
        float: Exact value
    """
    try:
        selector = Moment(kind)
    except ValueError:
        raise UsageError(f"Unknown moment selector {kind!r}; expected one of {[m.value for m in Moment]}")

    if selector in _GAUSSIAN_MOMENTS:
        return _GAUSSIAN_MOMENTS[selector]

    if params is None:
        raise UsageError(f"Moment {selector.value} depends on delta; pass params")
    half = params.delta / 2
    if selector is Moment.I_GAMMA_BASE:
        return 1.0
    if selector is Moment.I_GAMMA_FIRST:
        return half
    return half * (half + 1)
