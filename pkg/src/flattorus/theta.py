"""Jacobi theta function with a certified truncation of its defining series.

    theta(z, tau) = sum_k exp(pi i k^2 tau + 2 pi i k z),   Im(tau) > 0

The summation window is centred at the index of the largest term, which
moves with Im(z); the half-width is chosen once per (tau, eps) so that the
neglected tail is below ``eps`` times the largest term.  Conditioning
degrades as Im(tau) -> 0 (the window grows like Im(tau)^(-1/2)); no modular
transformation is attempted.
"""
from __future__ import annotations

import math

import numpy as np

DEFAULT_EPS = 1e-14

_TAIL_TERMS = 64


def _check(tau: complex, eps: float) -> float:
    t = complex(tau).imag
    if not t > 0:
        raise ValueError(f"tau={tau!r} is not in the upper half-plane")
    if not (0 < eps <= 1e-6):
        raise ValueError(f"eps={eps!r} outside (0, 1e-6]")
    return t


def truncation_radius(t: float, eps: float, kmax: float = 0.0) -> int:
    """Smallest R whose neglected tail is below ``eps`` times the max term.

    Relative to the largest term, the term at offset j from the centre is
    bounded by exp(-pi t |j| (|j| - 1)) (complete the square; the centre is
    within 1/2 of the real maximiser).  ``kmax`` adds the polynomial weight
    |k| of the differentiated series.
    """
    r = 1
    while True:
        j = np.arange(r + 1, r + 1 + _TAIL_TERMS, dtype=float)
        weight = (kmax + j + 1.0) / max(kmax, 1.0) if kmax else 1.0
        tail = 2.0 * np.sum(weight * np.exp(-math.pi * t * j * (j - 1.0)))
        if tail <= eps:
            return r
        r += 1


def _centre(z: np.ndarray, t: float) -> np.ndarray:
    return np.round(-z.imag / t)


def _series(z, tau, eps, derivative):
    t = _check(tau, eps)
    tau = complex(tau)
    zz = np.asarray(z, dtype=complex)
    kc = _centre(zz, t)
    kmax = float(np.max(np.abs(kc))) if derivative and zz.size else 0.0
    r = truncation_radius(t, eps, kmax + 1.0 if derivative else 0.0)

    def term(k):
        e = np.exp(1j * math.pi * k * k * tau + 2j * math.pi * k * zz)
        return 2j * math.pi * k * e if derivative else e

    # pair k*+j with k*-j, smallest magnitudes first
    acc = np.zeros(zz.shape, dtype=complex)
    for j in range(r, 0, -1):
        acc += term(kc + j) + term(kc - j)
    acc += term(kc)
    return acc if acc.ndim else complex(acc)


def theta(z, tau, eps: float = DEFAULT_EPS):
    """Jacobi theta function ``sum_k exp(pi i k^2 tau + 2 pi i k z)``.

    Parameters
    ----------
    z : complex or array_like of complex
        Argument; arrays are evaluated elementwise with a shared ``tau``.
    tau : complex
        Modular parameter with ``Im(tau) > 0``.
    eps : float
        Relative truncation target in (0, 1e-6], measured against the
        largest term of the series.

    Returns
    -------
    complex or ndarray
    """
    return _series(z, tau, eps, derivative=False)


def theta_dz(z, tau, eps: float = DEFAULT_EPS):
    """Derivative of :func:`theta` with respect to ``z`` (term-wise)."""
    return _series(z, tau, eps, derivative=True)
