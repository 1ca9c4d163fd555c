"""Signals on S_N, finite signals, windows and (double) periodization.

An element of S_N is stored by its coefficients in the delta-train basis
``eps_n = sum_k delta_{n/N + k}``; the basis itself is never materialised.
Windows are evaluated lazily at arbitrary real ``t``.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy import integrate

from .theta import DEFAULT_EPS, theta


def _as_coeffs(values) -> np.ndarray:
    arr = np.array(values, dtype=complex).reshape(-1)
    if arr.size == 0:
        raise ValueError("empty coefficient vector")
    if not np.all(np.isfinite(arr)):
        raise ValueError("coefficients must be finite")
    arr.setflags(write=False)
    return arr


def complex_to_pairs(values) -> list[list[float]]:
    return [[float(v.real), float(v.imag)] for v in np.asarray(values, dtype=complex).reshape(-1)]


def pairs_to_complex(pairs) -> np.ndarray:
    out = []
    for p in pairs:
        if isinstance(p, (int, float)):
            out.append(complex(p))
        elif isinstance(p, (list, tuple)) and len(p) == 2:
            out.append(complex(float(p[0]), float(p[1])))
        else:
            raise ValueError(f"expected [re, im] pair, got {p!r}")
    return np.array(out, dtype=complex)


@dataclass(frozen=True)
class SNVector:
    """phi = sum_n a_n eps_n, held as the coefficient vector (a_0, ..., a_{N-1})."""

    coeffs: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "coeffs", _as_coeffs(self.coeffs))

    @property
    def n_dim(self) -> int:
        return self.coeffs.size

    @classmethod
    def basis(cls, N: int, n: int) -> "SNVector":
        a = np.zeros(N, dtype=complex)
        a[n] = 1.0
        return cls(a)

    def inner(self, other: "SNVector") -> complex:
        if other.n_dim != self.n_dim:
            raise ValueError("dimension mismatch")
        return complex(np.sum(self.coeffs * np.conj(other.coeffs)))

    def norm(self) -> float:
        return float(np.linalg.norm(self.coeffs))

    def __add__(self, other: "SNVector") -> "SNVector":
        return SNVector(self.coeffs + other.coeffs)

    def __mul__(self, c: complex) -> "SNVector":
        return SNVector(c * self.coeffs)

    __rmul__ = __mul__

    def to_json(self) -> str:
        return json.dumps(complex_to_pairs(self.coeffs))

    @classmethod
    def from_json(cls, text: str) -> "SNVector":
        return cls(pairs_to_complex(json.loads(text)))


@dataclass(frozen=True)
class FiniteSignal:
    """A vector in C^N, indexed modulo N."""

    entries: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "entries", _as_coeffs(self.entries))

    def __len__(self) -> int:
        return self.entries.size

    def __getitem__(self, m: int) -> complex:
        return complex(self.entries[m % len(self)])

    def to_json(self) -> str:
        return json.dumps(complex_to_pairs(self.entries))

    @classmethod
    def from_json(cls, text: str) -> "FiniteSignal":
        return cls(pairs_to_complex(json.loads(text)))


@dataclass(frozen=True)
class GaussianWindow:
    """Dilated Gaussian ``h(t) = exp(-pi lam t^2)``."""

    lam: float

    def __post_init__(self):
        if not (self.lam > 0 and math.isfinite(self.lam)):
            raise ValueError(f"lambda must be positive, got {self.lam!r}")

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        return np.exp(-math.pi * self.lam * t * t).astype(complex)

    @property
    def is_real_even(self) -> bool:
        return True

    def norm_sq(self, eps: float = DEFAULT_EPS) -> float:
        return (2.0 * self.lam) ** -0.5

    def conj(self) -> "GaussianWindow":
        return self

    def as_generic(self, eps: float = DEFAULT_EPS) -> "GenericWindow":
        """The same function behind an exponential envelope, for the summation branch."""
        # exp(-pi lam t^2) <= exp(alpha^2 / (4 pi lam)) exp(-alpha |t|)
        alpha = math.sqrt(4.0 * math.pi * self.lam * math.log(2.0 / eps))
        c = math.exp(alpha * alpha / (4.0 * math.pi * self.lam))
        return GenericWindow(self.__call__, c, alpha)


@dataclass(frozen=True)
class GenericWindow:
    """Window given by an evaluator and a decay envelope ``|g(t)| <= C exp(-alpha |t|)``.

    The envelope stands in for membership in the Feichtinger algebra: it is
    what makes every periodization sum absolutely convergent with a
    computable truncation radius.
    """

    func: Callable
    C: float
    alpha: float
    real_even: bool = field(default=False, compare=False)

    def __post_init__(self):
        if self.C is None or self.alpha is None:
            raise ValueError("generic window requires a decay envelope (C, alpha)")
        if not (self.C > 0 and self.alpha > 0):
            raise ValueError("decay envelope needs C > 0 and alpha > 0")

    def __call__(self, t):
        return np.asarray(self.func(np.asarray(t, dtype=float)), dtype=complex)

    @property
    def is_real_even(self) -> bool:
        return self.real_even

    def trunc_radius(self, eps: float = DEFAULT_EPS) -> float:
        return math.log(2.0 * self.C / (self.alpha * eps)) / self.alpha + 1.0

    def conj(self) -> "GenericWindow":
        f = self.func
        return GenericWindow(lambda t: np.conj(f(t)), self.C, self.alpha, self.real_even)

    def tf_shift(self, x: float, xi: float) -> "GenericWindow":
        """``M_xi T_x g``; the envelope widens by ``exp(alpha |x|)``."""
        f = self.func
        return GenericWindow(
            lambda t: np.exp(2j * math.pi * xi * t) * f(t - x),
            self.C * math.exp(self.alpha * abs(x)),
            self.alpha,
        )

    def norm_sq(self, eps: float = DEFAULT_EPS) -> float:
        r = self.trunc_radius(eps)
        val, _ = integrate.quad(
            lambda t: abs(complex(self(t))) ** 2, -r, r, limit=400, epsabs=1e-15, epsrel=1e-13
        )
        return val

    def as_generic(self, eps: float = DEFAULT_EPS) -> "GenericWindow":
        return self


def sinc_gaussian_witness(N: int, n: int) -> GenericWindow:
    """``f_n(t) = sinc(N t - n) exp(-pi (t - n/N)^2)`` with ``sinc(x) = sin(pi x)/(pi x)``.

    Its periodization samples are the unit vector: ``P f_n(k/N) = delta_{n,k}``.
    """
    if not 0 <= n < N:
        raise ValueError("need 0 <= n < N")
    s = n / N

    def f(t):
        t = np.asarray(t, dtype=float)
        return np.sinc(N * t - n) * np.exp(-math.pi * (t - s) ** 2)

    # exp(-pi u^2) <= exp(alpha^2/(4 pi)) exp(-alpha |u|), then |u| >= |t| - s
    alpha = 4.0
    c = math.exp(alpha * alpha / (4.0 * math.pi) + alpha * s)
    return GenericWindow(f, c, alpha)


Window = GaussianWindow | GenericWindow


def _periodize_generic(w: GenericWindow, t: np.ndarray, eps: float) -> np.ndarray:
    r = w.trunc_radius(eps)
    lo = math.floor(float(np.min(t)) - r)
    hi = math.ceil(float(np.max(t)) + r)
    acc = np.zeros(t.shape, dtype=complex)
    for j in range(lo, hi + 1):
        acc += w(t - j)
    return acc


def periodize_at(w: Window, t, eps: float = DEFAULT_EPS):
    """``P w(t) = sum_j w(t - j)`` at arbitrary real ``t``."""
    tt = np.asarray(t, dtype=float)
    if isinstance(w, GaussianWindow):
        out = np.exp(-math.pi * w.lam * tt * tt) * theta(-1j * w.lam * tt, 1j * w.lam, eps)
    elif isinstance(w, GenericWindow):
        out = _periodize_generic(w, tt, eps)
    else:
        raise TypeError(f"unsupported window {type(w).__name__}")
    return out if np.ndim(out) else complex(out)


def periodize(w: Window, N: int, n: int, eps: float = DEFAULT_EPS) -> complex:
    """``P w(n/N)`` for a grid index ``0 <= n < N``."""
    if not 0 <= n < N:
        raise ValueError(f"grid index {n} outside [0, {N})")
    return complex(periodize_at(w, n / N, eps))


def periodize_to_signal(w: Window, N: int, eps: float = DEFAULT_EPS) -> FiniteSignal:
    """``P_N w``: the periodization sampled on the grid ``n/N``."""
    if N < 1:
        raise ValueError("N must be positive")
    return FiniteSignal(np.atleast_1d(periodize_at(w, np.arange(N) / N, eps)))


def sigma_coeffs(w: Window, N: int, eps: float = DEFAULT_EPS) -> SNVector:
    """Coefficients of the double periodization: ``a_n = P w(n/N) / N``."""
    return SNVector(periodize_to_signal(w, N, eps).entries / N)


def duality_pairing(f: Window, g: Window, N: int, eps: float = DEFAULT_EPS) -> complex:
    """``<Sigma_N f, g> = (1/N) sum_n P f(n/N) conj(P g(n/N))``."""
    pf = periodize_to_signal(f, N, eps).entries
    pg = periodize_to_signal(g, N, eps).entries
    return complex(np.sum(pf * np.conj(pg)) / N)
