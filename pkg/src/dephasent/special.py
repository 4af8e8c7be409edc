"""Complex-argument digamma, polygamma and Hurwitz zeta.

SciPy's ``polygamma`` and ``zeta`` accept real arguments only, so the complex
case is evaluated here: a direct partial sum shifts the argument to
``Re z >= 12`` and an Euler-Maclaurin tail finishes it.
"""

from __future__ import annotations

import math

import numpy as np
from scipy.special import bernoulli, gamma, poch

__all__ = ["hurwitz_zeta", "digamma", "polygamma"]

_SHIFT = 12.0
_N_BERN = 10
_B2K = bernoulli(2 * _N_BERN)[2::2]  # B_2, B_4, ..., B_{2 N_BERN}
_FACT2K = np.array([math.factorial(2 * k) for k in range(1, _N_BERN + 1)], dtype=float)


def _check_z(z):
    z = complex(z)
    if not z.real > 0:
        raise ValueError(f"argument must have positive real part, got {z}")
    return z


def hurwitz_zeta(s: float, z) -> complex:
    """``zeta(s, z) = sum_{k>=0} (z + k)^{-s}`` for real ``s != 1`` and ``Re z > 0``.

    For ``s < 1`` the same expansion gives the analytic continuation.
    """
    z = _check_z(z)
    s = float(s)
    if s == 1.0:
        raise ValueError("zeta(1, z) diverges")
    n = max(0, math.ceil(_SHIFT - z.real))
    head = sum((z + k) ** -s for k in range(n))
    w = z + n
    tail = w ** (1.0 - s) / (s - 1.0) + 0.5 * w ** -s
    for j in range(1, _N_BERN + 1):
        tail += _B2K[j - 1] / _FACT2K[j - 1] * poch(s, 2 * j - 1) * w ** (-s - 2 * j + 1)
    return complex(head + tail)


def digamma(z) -> complex:
    """``psi(z)`` by upward recurrence to ``Re z >= 12`` and the asymptotic series."""
    z = _check_z(z)
    acc = 0j
    while z.real < _SHIFT:
        acc -= 1.0 / z
        z += 1.0
    series = sum(_B2K[k - 1] / (2 * k) * z ** (-2 * k) for k in range(1, _N_BERN + 1))
    return acc + np.log(z) - 0.5 / z - series


def polygamma(m: int, z) -> complex:
    """``psi^(m)(z)``; for ``m >= 1`` this is ``(-1)^(m+1) m! zeta(m+1, z)``."""
    if int(m) != m or m < 0:
        raise ValueError(f"order must be a nonnegative integer, got {m}")
    m = int(m)
    if m == 0:
        return digamma(z)
    return (-1) ** (m + 1) * float(gamma(m + 1)) * hurwitz_zeta(m + 1, z)
