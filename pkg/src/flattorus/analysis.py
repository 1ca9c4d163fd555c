"""Moyal inner products, inversion and the reproducing kernel on the flat torus.

Integrals over [0,1) x [0,N) use the tensor trapezoid rule.  The integrands
met here (products ``V phi1 * conj(V phi2)``) are smooth and fully periodic,
so the rule converges spectrally.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy import integrate

from .signals import GaussianWindow, SNVector, Window
from .torus_stft import TorusPoint, basis_matrix, coords, zak
from .theta import DEFAULT_EPS, theta

PointFunction = Callable[[np.ndarray, np.ndarray], np.ndarray]


@dataclass(frozen=True)
class QuadratureGrid:
    """Uniform tensor grid with ``m_x`` nodes per unit in x and ``m_xi`` per unit in xi."""

    N: int
    m_x: int = 32
    m_xi: int = 32

    def __post_init__(self):
        if self.N < 1:
            raise ValueError("N must be positive")
        if self.m_x < 8 or self.m_xi < 1:
            raise ValueError("need m_x >= 8 and m_xi >= 1")

    @property
    def size(self) -> int:
        return self.m_x * self.m_xi * self.N

    def nodes(self) -> tuple[np.ndarray, np.ndarray]:
        x = np.arange(self.m_x) / self.m_x
        xi = np.arange(self.m_xi * self.N) / self.m_xi
        X, XI = np.meshgrid(x, xi, indexing="ij")
        return X.reshape(-1), XI.reshape(-1)

    def weights(self) -> np.ndarray:
        return np.full(self.size, 1.0 / (self.m_x * self.m_xi))


def torus_inner(F: PointFunction, G: PointFunction, grid: QuadratureGrid) -> complex:
    """``int F conj(G) dx dxi`` over the torus (trapezoid rule)."""
    x, xi = grid.nodes()
    vals = np.asarray(F(x, xi), dtype=complex) * np.conj(np.asarray(G(x, xi), dtype=complex))
    return complex(np.sum(vals * grid.weights()))


def window_inner(g2: Window, g1: Window, eps: float = DEFAULT_EPS) -> complex:
    """``<g2, g1>_{L^2}``; closed form for two Gaussians, adaptive quadrature otherwise."""
    if isinstance(g1, GaussianWindow) and isinstance(g2, GaussianWindow):
        return (g1.lam + g2.lam) ** -0.5 + 0j
    a, b = g2.as_generic(eps), g1.as_generic(eps)
    r = max(a.trunc_radius(eps), b.trunc_radius(eps))

    def integrand(t, part):
        v = complex(a(t)) * np.conj(complex(b(t)))
        return v.real if part == 0 else v.imag
    re, _ = integrate.quad(integrand, -r, r, args=(0,), limit=400, epsabs=1e-15)
    im, _ = integrate.quad(integrand, -r, r, args=(1,), limit=400, epsabs=1e-15)
    return complex(re, im)


def _basis_on_grid(w: Window, grid: QuadratureGrid, eps: float) -> np.ndarray:
    return basis_matrix(w, grid.N, grid.nodes(), eps)


def moyal_gram(w1: Window, w2: Window, N: int, grid: QuadratureGrid | None = None,
               eps: float = DEFAULT_EPS) -> np.ndarray:
    """Normalised Gram ``<V_{w1} eps_n, V_{w2} eps_m> / (N <w2, w1>)``; ideally the identity."""
    grid = grid or QuadratureGrid(N)
    if grid.N != N:
        raise ValueError("grid built for a different N")
    b1 = _basis_on_grid(w1, grid, eps)
    b2 = _basis_on_grid(w2, grid, eps)
    gram = (b1 * grid.weights()[:, None]).T @ np.conj(b2)
    return gram / (N * window_inner(w2, w1, eps))


def invert_stft(w: Window, V: PointFunction, N: int, grid: QuadratureGrid | None = None,
                eps: float = DEFAULT_EPS) -> SNVector:
    """Recover ``phi`` from a point-evaluable ``V = V_w phi``.

    ``a_n = (N ||w||^2)^{-1} int V(x, xi) exp(2 pi i xi n/N) Z w(n/N - x, -xi) dx dxi``
    """
    grid = grid or QuadratureGrid(N)
    if grid.N != N:
        raise ValueError("grid built for a different N")
    x, xi = grid.nodes()
    vals = np.asarray(V(x, xi), dtype=complex) * grid.weights()
    a = np.empty(N, dtype=complex)
    for n in range(N):
        dual = np.exp(2j * math.pi * xi * n / N) * zak(w, n / N - x, -xi, eps)
        a[n] = np.sum(vals * dual)
    return SNVector(a / (N * w.norm_sq(eps)))


def _pair_coords(p_prime, p):
    xp, xip = coords(p_prime)
    x, xi = coords(p)
    return np.broadcast_arrays(xp, xip, x, xi)


def _unwrap_scalar(val, *points):
    if all(isinstance(q, TorusPoint) for q in points):
        return complex(np.asarray(val).reshape(-1)[0])
    return val


def kernel_gaussian(lam: float, N: int, p_prime, p, eps: float = DEFAULT_EPS):
    """Theta closed form of the reproducing kernel ``K((x', xi'), (x, xi))`` for ``exp(-pi lam t^2)``.

    With ``z = lam x + i xi``, ``w = lam x' + i xi'``, ``d = z - conj w`` and
    ``b = (z + conj w) N / (2 lam)``, for even ``N``::

        K = exp(-pi lam (x^2 + x'^2)) exp(pi (z + conj w)^2 / (2 lam))
            * theta(i d / 2, i lam / 2) * theta(b, i N^2 / (2 lam))

    The lattice sum behind it carries a factor ``(-1)^(N k1 k2)``, so for odd
    ``N`` the first theta is split by the parity of ``k1``::

        theta(i d / 2, i lam / 2) -> theta(i d, 2 i lam)
        theta(b, .)               -> theta(b + N/2, .)   on the odd-k1 half

    with the odd half ``exp(-pi d - pi lam / 2) theta(i (d + lam), 2 i lam)``.
    For even ``N`` the shift by ``N/2`` is a period and both halves recombine.
    """
    if not lam > 0:
        raise ValueError("lambda must be positive")
    xp, xip, x, xi = _pair_coords(p_prime, p)
    z = lam * x + 1j * xi
    wbar = lam * xp - 1j * xip
    s = z + wbar
    d = z - wbar
    b = s * N / (2.0 * lam)
    tau2 = 1j * N * N / (2.0 * lam)
    pref = np.exp(-math.pi * lam * (x * x + xp * xp) + math.pi * s * s / (2.0 * lam))
    if N % 2 == 0:
        val = pref * theta(0.5j * d, 0.5j * lam, eps) * theta(b, tau2, eps)
    else:
        even = theta(1j * d, 2j * lam, eps)
        odd = np.exp(-math.pi * d - 0.5 * math.pi * lam) * theta(1j * (d + lam), 2j * lam, eps)
        val = pref * (even * theta(b, tau2, eps) + odd * theta(b + 0.5 * N, tau2, eps))
    return _unwrap_scalar(val, p_prime, p)


def kernel_basis_sum(w: Window, N: int, p_prime, p, eps: float = DEFAULT_EPS):
    """Kernel as ``(N ||w||^2)^{-1} sum_n V eps_n(p') conj(V eps_n(p))``, via Zak sums."""
    xp, xip, x, xi = _pair_coords(p_prime, p)
    shape = x.shape
    bp = basis_matrix(w, N, (xp.reshape(-1), xip.reshape(-1)), eps, route="zak")
    b = basis_matrix(w, N, (x.reshape(-1), xi.reshape(-1)), eps, route="zak")
    val = (np.sum(bp * np.conj(b), axis=1) / (N * w.norm_sq(eps))).reshape(shape)
    return _unwrap_scalar(val, p_prime, p)


def kernel_pairing(w: Window, N: int, p_prime, p, eps: float = DEFAULT_EPS):
    """Kernel as ``(N / ||w||^2) <Sigma_N(pi(p) w), Sigma_N(pi(p') w)>_{S_N}``.

    Each coefficient vector is built from direct periodization sums of the
    time-frequency shifted window, independently of any theta evaluation.
    """
    xp, xip, x, xi = _pair_coords(p_prime, p)
    shape = x.shape
    g = w.as_generic(eps)
    t = np.arange(N) / N
    out = np.empty(x.size, dtype=complex)
    flat = zip(xp.reshape(-1), xip.reshape(-1), x.reshape(-1), xi.reshape(-1))
    for i, (a_x, a_xi, b_x, b_xi) in enumerate(flat):
        c = _sigma_of_shift(g, N, b_x, b_xi, t, eps)
        cp = _sigma_of_shift(g, N, a_x, a_xi, t, eps)
        out[i] = np.sum(c * np.conj(cp))
    val = (N / w.norm_sq(eps) * out).reshape(shape)
    return _unwrap_scalar(val, p_prime, p)


def _sigma_of_shift(g, N, x, xi, t, eps):
    # (1/N) P(M_xi T_x g)(n/N); truncation radius taken about the shift centre x
    r = g.trunc_radius(eps)
    acc = np.zeros(t.shape, dtype=complex)
    for k in range(math.floor(-x - r), math.ceil(1.0 - x + r) + 1):
        s = t - k
        acc += np.exp(2j * math.pi * xi * s) * g(s - x)
    return acc / N


def kernel_reproduce_check(lam: float, phi: SNVector, p_prime, grid: QuadratureGrid | None = None,
                           eps: float = DEFAULT_EPS) -> float:
    """``|V phi(p') - int V phi(p) K(p', p) dp|`` with the closed-form Gaussian kernel."""
    N = phi.n_dim
    grid = grid or QuadratureGrid(N)
    w = GaussianWindow(lam)
    x, xi = grid.nodes()
    xp, xip = coords(p_prime)
    target = basis_matrix(w, N, (xp, xip), eps) @ phi.coeffs
    v = basis_matrix(w, N, (x, xi), eps) @ phi.coeffs
    errs = []
    for j in range(xp.size):
        k = kernel_gaussian(lam, N, (np.full_like(x, xp[j]), np.full_like(x, xip[j])), (x, xi), eps)
        errs.append(abs(target[j] - np.sum(v * k * grid.weights())))
    return float(max(errs))
