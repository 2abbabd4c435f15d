"""
Orthonormal Polynomials

Hermite (probabilists') and generalized Laguerre polynomials normalized
against the standard normal and Gamma(δ/2) densities. Tables are built by
the three-term recurrences, one row per degree.
"""

import numpy as np
from scipy import special


def hermite_table(n_max: int, x: np.ndarray) -> np.ndarray:
    """
    ψ_k(x) = He_k(x)/√(k!) for k = 0..n_max

    Returns:
        np.ndarray: shape (n_max + 1, *x.shape)
    """
    x = np.asarray(x, dtype=float)
    table = np.empty((n_max + 1,) + x.shape)
    table[0] = 1.0
    if n_max >= 1:
        table[1] = x
    for k in range(1, n_max):
        table[k + 1] = (x * table[k] - np.sqrt(k) * table[k - 1]) / np.sqrt(k + 1)
    return table


def laguerre_norms(n_max: int, a: float) -> np.ndarray:
    """‖L_k^{(a)}‖ under the Gamma(a + 1) density"""
    k = np.arange(n_max + 1)
    return np.exp(0.5 * (special.gammaln(k + a + 1) - special.gammaln(k + 1) - special.gammaln(a + 1)))


def laguerre_table(n_max: int, x: np.ndarray, a: float) -> np.ndarray:
    """
    λ_k(x) = L_k^{(a)}(x)/‖L_k^{(a)}‖ for k = 0..n_max

    The sign convention is that of L_1^{(a)}(x) = 1 + a − x.

    Returns:
        np.ndarray: shape (n_max + 1, *x.shape)
    """
    x = np.asarray(x, dtype=float)
    raw = np.empty((n_max + 1,) + x.shape)
    raw[0] = 1.0
    if n_max >= 1:
        raw[1] = 1.0 + a - x
    for k in range(1, n_max):
        raw[k + 1] = ((2 * k + 1 + a - x) * raw[k] - (k + a) * raw[k - 1]) / (k + 1)
    norms = laguerre_norms(n_max, a)
    return raw / norms.reshape((-1,) + (1,) * x.ndim)
