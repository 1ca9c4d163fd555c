"""Zak transform, STFT of S_N vectors on the flat torus, and the finite DGT.

The STFT of ``phi = sum_n a_n eps_n`` with window ``g`` is

    V_g phi(x, xi) = sum_n a_n exp(-2 pi i xi n/N) Z conj(g)(n/N - x, xi),

quasi-periodic on [0,1) x [0,N).  Gaussian windows use a closed theta form;
any window can be routed through truncated Zak sums, which serve as the
reference for the closed form.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .signals import (
    FiniteSignal,
    GaussianWindow,
    GenericWindow,
    SNVector,
    Window,
    periodize_to_signal,
    sigma_coeffs,
)
from .theta import DEFAULT_EPS, theta

GaborMatrix = np.ndarray


def _wrap(v: float, period: float) -> float:
    r = v - period * math.floor(v / period)
    # guard against r == period after rounding
    return 0.0 if r >= period else r


@dataclass(frozen=True)
class TorusPoint:
    """Phase-space point on [0,1) x [0,N), stored as its canonical representative."""

    x: float
    xi: float
    N: int

    def __post_init__(self):
        if self.N < 1:
            raise ValueError("N must be positive")
        if not (math.isfinite(self.x) and math.isfinite(self.xi)):
            raise ValueError("torus coordinates must be finite")
        object.__setattr__(self, "x", _wrap(float(self.x), 1.0))
        object.__setattr__(self, "xi", _wrap(float(self.xi), float(self.N)))

    def z(self, lam: float) -> complex:
        """Complex coordinate ``lam x + i xi``."""
        return complex(lam * self.x, self.xi)

    def distance(self, other: "TorusPoint") -> float:
        dx = abs(self.x - other.x)
        dxi = abs(self.xi - other.xi)
        return math.hypot(min(dx, 1.0 - dx), min(dxi, self.N - dxi))


def coords(points) -> tuple[np.ndarray, np.ndarray]:
    """Split a TorusPoint, a list of them, or an ``(x, xi)`` pair of arrays into coordinates."""
    if isinstance(points, TorusPoint):
        return np.array([points.x]), np.array([points.xi])
    if isinstance(points, (list, tuple)) and points and isinstance(points[0], TorusPoint):
        return (np.array([p.x for p in points], dtype=float),
                np.array([p.xi for p in points], dtype=float))
    x, xi = points
    x, xi = np.broadcast_arrays(np.asarray(x, dtype=float), np.asarray(xi, dtype=float))
    return x, xi


def zak(w: Window, u, xi, eps: float = DEFAULT_EPS):
    """Zak transform ``Z w(u, xi) = sum_k w(u - k) exp(2 pi i k xi)``."""
    uu, xx = np.broadcast_arrays(np.asarray(u, dtype=float), np.asarray(xi, dtype=float))
    if isinstance(w, GaussianWindow):
        lam = w.lam
        out = np.exp(-math.pi * lam * uu * uu) * theta(xx - 1j * lam * uu, 1j * lam, eps)
    elif isinstance(w, GenericWindow):
        r = w.trunc_radius(eps)
        lo = math.floor(float(np.min(uu)) - r) if uu.size else 0
        hi = math.ceil(float(np.max(uu)) + r) if uu.size else 0
        out = np.zeros(uu.shape, dtype=complex)
        for k in range(lo, hi + 1):
            out += w(uu - k) * np.exp(2j * math.pi * k * xx)
    else:
        raise TypeError(f"unsupported window {type(w).__name__}")
    return out if np.ndim(out) else complex(out)


def _basis_closed(lam: float, N: int, n: int, x, xi, eps):
    zbar = lam * x - 1j * xi
    s = n / N
    return (np.exp(-math.pi * lam * (x * x + s * s) + 2.0 * math.pi * zbar * s)
            * theta(1j * (zbar - lam * s), 1j * lam, eps))


def _basis_zak(w: Window, N: int, n: int, x, xi, eps):
    return np.exp(-2j * math.pi * xi * n / N) * zak(w.conj(), n / N - x, xi, eps)


def basis_matrix(w: Window, N: int, points, eps: float = DEFAULT_EPS,
                 route: str = "auto") -> np.ndarray:
    """Matrix ``M[p, n] = V_w eps_n(x_p, xi_p)`` for a batch of points.

    ``route`` is ``"closed"`` (Gaussian theta form), ``"zak"`` (truncated Zak
    sums) or ``"auto"`` (closed form whenever the window is Gaussian).
    """
    x, xi = coords(points)
    x, xi = x.reshape(-1), xi.reshape(-1)
    if route == "auto":
        route = "closed" if isinstance(w, GaussianWindow) else "zak"
    if route == "closed" and not isinstance(w, GaussianWindow):
        raise ValueError("closed-form route needs a Gaussian window")
    if route not in ("closed", "zak"):
        raise ValueError(f"unknown route {route!r}")
    cols = []
    for n in range(N):
        if route == "closed":
            cols.append(_basis_closed(w.lam, N, n, x, xi, eps))
        else:
            cols.append(_basis_zak(w, N, n, x, xi, eps))
    return np.stack([np.asarray(c, dtype=complex).reshape(-1) for c in cols], axis=1)


def stft_basis(w: Window, N: int, n: int, p, eps: float = DEFAULT_EPS, route: str = "auto"):
    """``V_w eps_n`` at ``p`` (a TorusPoint or raw coordinates)."""
    if not 0 <= n < N:
        raise ValueError(f"basis index {n} outside [0, {N})")
    x, xi = coords(p)
    col = basis_matrix(w, N, (x, xi), eps, route)[:, n].reshape(x.shape)
    return complex(col[0]) if isinstance(p, TorusPoint) else (col if col.ndim else complex(col))


def stft(w: Window, phi: SNVector, p, eps: float = DEFAULT_EPS, route: str = "auto"):
    """``V_w phi`` at ``p``; a TorusPoint yields a scalar, coordinate arrays an array."""
    x, xi = coords(p)
    vals = (basis_matrix(w, phi.n_dim, (x, xi), eps, route) @ phi.coeffs).reshape(x.shape)
    if isinstance(p, TorusPoint):
        return complex(vals[0])
    return vals if vals.ndim else complex(vals)


def dgt(f: FiniteSignal, g: FiniteSignal) -> GaborMatrix:
    """Finite Gabor transform ``V[k, l] = sum_m f[m] conj(g[m-k]) exp(-2 pi i l m / N)``."""
    fe = np.asarray(f.entries if isinstance(f, FiniteSignal) else f, dtype=complex)
    ge = np.asarray(g.entries if isinstance(g, FiniteSignal) else g, dtype=complex)
    if fe.shape != ge.shape or fe.ndim != 1:
        raise ValueError("f and g must be vectors of equal length")
    N = fe.size
    m = np.arange(N)
    shifted = np.conj(ge[(m[None, :] - m[:, None]) % N])  # [k, m] = conj(g[m-k])
    return np.fft.fft(fe[None, :] * shifted, axis=1)


def grid_points(N: int) -> tuple[np.ndarray, np.ndarray]:
    """Coordinates of ``(k/N, l)`` in row-major ``[k, l]`` order."""
    k, l = np.meshgrid(np.arange(N), np.arange(N), indexing="ij")
    return k.reshape(-1) / N, l.reshape(-1).astype(float)


def bridge_check(f: Window, g: Window, N: int, eps: float = DEFAULT_EPS) -> float:
    """Max over the grid of ``|V_g(Sigma_N f)(k/N, l) - dgt(P_N f, P_N g)[k, l] / N|``."""
    left = stft(g, sigma_coeffs(f, N, eps), grid_points(N), eps).reshape(N, N)
    right = dgt(periodize_to_signal(f, N, eps), periodize_to_signal(g, N, eps)) / N
    return float(np.max(np.abs(left - right)))
