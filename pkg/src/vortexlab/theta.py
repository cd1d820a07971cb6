"""Jacobi theta_1 for purely imaginary modulus tau = i r."""
from __future__ import annotations

import numpy as np


def _n_terms(r: float) -> int:
    # after reduction |Im u| <= pi r / 2, term n is bounded by exp(-pi r (n^2 - 1/4))
    return int(np.ceil(np.sqrt(42.0 / (np.pi * r) + 0.25))) + 2


def log_theta1(u, r: float):
    """log theta_1(u | i r), branch unspecified; -inf real part at zeros.

    theta_1(u|tau) = 2 sum_n (-1)^n q^((n+1/2)^2) sin((2n+1) u), q = exp(i pi tau).
    Im u is first reduced by the quasi-period pi tau:
    theta_1(u + m pi tau) = (-1)^m q^(-m^2) exp(-2 i m u) theta_1(u).
    """
    if r <= 0:
        raise ValueError("modulus must have positive imaginary part")
    u = np.asarray(u, dtype=complex)
    m = np.rint(u.imag / (np.pi * r))
    ur = u - 1j * np.pi * r * m
    q_log = -np.pi * r  # log q for tau = i r
    s = np.zeros_like(ur)
    for n in range(_n_terms(r)):
        s = s + (-1) ** n * np.exp(q_log * (n + 0.5) ** 2) * np.sin((2 * n + 1) * ur)
    with np.errstate(divide="ignore"):
        base = np.log(2.0 * s)
    # q^(-m^2) = exp(pi r m^2)
    return base + 1j * np.pi * m + np.pi * r * m * m - 2j * m * ur


def theta1(u, r: float):
    return np.exp(log_theta1(u, r))
