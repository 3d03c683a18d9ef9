"""Standard-basis Weyl-Heisenberg group in dimension N.

All phases are integer powers of ``tau = -exp(i pi / N)``; exponents are
reduced mod ``Nbar`` before a single complex exponential is evaluated,
so no rounding error accumulates through repeated multiplication.
"""

from __future__ import annotations

import numpy as np

from .numtheory import nbar

__all__ = [
    "ATOL", "tau_power", "omega", "tau", "lam",
    "build_X", "build_Z", "displacement", "shift_clock", "symplectic_form",
]

# default tolerance for complex scalar equality
ATOL = 1e-12


def tau_power(m, N: int):
    """``tau**m`` for integer (array) ``m``; tau has order ``Nbar``."""
    # tau = exp(i pi (N+1) / N)
    e = (np.asarray(m, dtype=np.int64) % nbar(N)) * (N + 1) % (2 * N)
    return np.exp(1j * np.pi * e / N)


def omega(N: int) -> complex:
    return np.exp(2j * np.pi / N)


def tau(N: int) -> complex:
    return -np.exp(1j * np.pi / N)


def lam(n: int) -> complex:
    return np.exp(2j * np.pi / n)


def build_X(N: int) -> np.ndarray:
    """Cyclic shift ``X|u> = |u+1>``."""
    X = np.zeros((N, N), dtype=complex)
    u = np.arange(N)
    X[(u + 1) % N, u] = 1
    return X


def build_Z(N: int) -> np.ndarray:
    """Clock ``Z|u> = omega^u |u>``."""
    return np.diag(tau_power(2 * np.arange(N), N))


def shift_clock(N: int, p1: int, p2: int) -> np.ndarray:
    """``X^p1 Z^p2`` built by index arithmetic."""
    u = np.arange(N)
    M = np.zeros((N, N), dtype=complex)
    M[(u + p1) % N, u] = tau_power(2 * p2 * u, N)
    return M


def displacement(N: int, p) -> np.ndarray:
    """``D_p = tau^(p1 p2) X^p1 Z^p2`` for ``p = (p1, p2)`` taken mod Nbar."""
    m = nbar(N)
    p1, p2 = int(p[0]) % m, int(p[1]) % m
    u = np.arange(N)
    M = np.zeros((N, N), dtype=complex)
    M[(u + p1) % N, u] = tau_power(p1 * p2 + 2 * p2 * u, N)
    return M


def symplectic_form(p, q, Nbar: int) -> int:
    """``<p, q> = p2 q1 - p1 q2`` mod Nbar."""
    return (p[1] * q[0] - p[0] * q[1]) % Nbar
