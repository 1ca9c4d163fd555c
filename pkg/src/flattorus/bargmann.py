"""Bargmann-type transform of S_N vectors and its zeros on the torus [0,lam) x [0,N).

    B phi(z) = sum_n a_n exp(-pi lam (n/N)^2) exp(2 pi z n/N) theta(i (z - lam n/N), i lam)
             = V phi(x/lam, -xi) exp(pi x^2/lam),          z = x + i xi

``B phi`` is entire with ``B(z + i N) = B(z)`` and
``B(z + lam) = exp(pi lam + 2 pi z) B(z)``.  Zeros are counted by the
argument principle, evaluated as an accumulated phase along the contour
(adaptive bisection keeps every increment below pi/2), and located by
recursive subdivision plus Newton refinement.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np

from .signals import GaussianWindow, SNVector
from .torus_stft import TorusPoint, stft
from .theta import DEFAULT_EPS, theta, theta_dz

log = logging.getLogger(__name__)

CONTOUR_FLOOR = 1e-6
MAX_SHIFTS = 8
NEWTON_STEPS = 40
MIN_BOX = 1e-6


class ContourTooCloseError(ArithmeticError):
    """A contour passes (numerically) through a zero."""


class ZeroCountingError(ArithmeticError):
    """Winding number could not be certified even after shifting the contour."""


@dataclass(frozen=True)
class BargmannFn:
    lam: float
    phi: SNVector

    def __post_init__(self):
        if not self.lam > 0:
            raise ValueError("lambda must be positive")

    @property
    def N(self) -> int:
        return self.phi.n_dim

    def _terms(self, z):
        N, lam = self.N, self.lam
        s = np.arange(N) / N
        z = np.asarray(z, dtype=complex)
        return N, lam, s, z

    def __call__(self, z):
        N, lam, s, z = self._terms(z)
        out = np.zeros(z.shape, dtype=complex)
        for n in range(N):
            if self.phi.coeffs[n] == 0:
                continue
            out += (self.phi.coeffs[n] * np.exp(-math.pi * lam * s[n] ** 2 + 2 * math.pi * z * s[n])
                    * theta(1j * (z - lam * s[n]), 1j * lam))
        return out if out.ndim else complex(out)

    def derivative(self, z):
        N, lam, s, z = self._terms(z)
        out = np.zeros(z.shape, dtype=complex)
        for n in range(N):
            if self.phi.coeffs[n] == 0:
                continue
            arg = 1j * (z - lam * s[n])
            pref = self.phi.coeffs[n] * np.exp(-math.pi * lam * s[n] ** 2 + 2 * math.pi * z * s[n])
            out += pref * (2 * math.pi * s[n] * theta(arg, 1j * lam)
                           + 1j * theta_dz(arg, 1j * lam))
        return out if out.ndim else complex(out)

    def via_stft(self, z):
        """Same values through the STFT with window ``exp(-pi lam t^2)``."""
        z = np.asarray(z, dtype=complex)
        x, xi = z.real, z.imag
        v = stft(GaussianWindow(self.lam), self.phi, (x / self.lam, -xi))
        out = np.asarray(v) * np.exp(math.pi * x * x / self.lam)
        return out if out.ndim else complex(out)

    def weighted_abs(self, z):
        """``|B(z)| exp(-pi x^2/lam)``, i.e. ``|V phi|`` at the matching torus point."""
        z = np.asarray(z, dtype=complex)
        return np.abs(self(z)) * np.exp(-math.pi * z.real ** 2 / self.lam)


def bargmann_eval(b: BargmannFn, z):
    return b(z)


def fourier_coefficients(b: BargmannFn, n_samples: int, x0: float = 0.0) -> np.ndarray:
    """Coefficients ``c_k`` of ``B(z) = sum_k c_k exp(2 pi k z / N)`` from samples on ``Re z = x0``.

    Returned array is indexed by ``k mod n_samples`` (FFT order).
    """
    N = b.N
    xi = np.arange(n_samples) * N / n_samples
    vals = np.asarray(b(x0 + 1j * xi))
    c = np.fft.fft(vals) / n_samples
    k = np.fft.fftfreq(n_samples, d=1.0 / n_samples)
    return c * np.exp(-2 * math.pi * k * x0 / N)


def coeff_recursion_check(b: BargmannFn, k_max: int | None = None) -> float:
    """Max relative deviation from ``c_{k+nN} = c_k exp(-pi lam (n^2 + 2kn/N))``, k < N, n = +-1."""
    N, lam = b.N, b.lam
    k_max = N - 1 if k_max is None else k_max
    m = 4 * (k_max + N)
    c = fourier_coefficients(b, m)
    scale = float(np.max(np.abs(c)))
    if scale == 0.0:
        return 0.0
    worst = 0.0
    for k in range(N):
        for n in (-1, 1):
            pred = c[k % m] * math.exp(-math.pi * lam * (n * n + 2.0 * k * n / N))
            got = c[(k + n * N) % m]
            denom = max(abs(pred), 1e-14 * scale)
            worst = max(worst, abs(got - pred) / denom)
    return worst


@dataclass(frozen=True)
class Rect:
    x0: float
    x1: float
    y0: float
    y1: float

    @property
    def diameter(self) -> float:
        return math.hypot(self.x1 - self.x0, self.y1 - self.y0)

    @property
    def center(self) -> complex:
        return complex((self.x0 + self.x1) / 2, (self.y0 + self.y1) / 2)

    def shifted(self, d: complex) -> "Rect":
        return Rect(self.x0 + d.real, self.x1 + d.real, self.y0 + d.imag, self.y1 + d.imag)

    def contains(self, z: complex, margin: float = 0.0) -> bool:
        return (self.x0 - margin <= z.real <= self.x1 + margin
                and self.y0 - margin <= z.imag <= self.y1 + margin)

    def corners(self) -> list[complex]:
        return [complex(self.x0, self.y0), complex(self.x1, self.y0),
                complex(self.x1, self.y1), complex(self.x0, self.y1)]


def _edge_nodes(a: complex, b: complex, density: float) -> np.ndarray:
    n = max(8, int(math.ceil(abs(b - a) * density)))
    return a + (b - a) * np.arange(n) / n


def winding_number(b: BargmannFn, rect: Rect, density: float = 32.0,
                   floor: float = CONTOUR_FLOOR) -> tuple[int, float]:
    """Winding number of ``B`` along the positively oriented boundary of ``rect``.

    Returns ``(count, scale)`` with ``scale`` the max of ``|B|`` on the contour.
    Raises ContourTooCloseError when the weighted magnitude on the contour
    dips below ``floor`` times its maximum or bisection cannot tame a phase jump.
    """
    cs = rect.corners()
    pts = np.concatenate([_edge_nodes(cs[i], cs[(i + 1) % 4], density) for i in range(4)])
    pts = np.append(pts, pts[0])
    vals = np.asarray(b(pts))
    wabs = np.abs(vals) * np.exp(-math.pi * pts.real ** 2 / b.lam)
    wmax = float(np.max(wabs))
    if not wmax > 0:
        raise ContourTooCloseError("function vanishes on the contour")
    if float(np.min(wabs)) < floor * wmax:
        raise ContourTooCloseError("contour too close to a zero")
    scale = float(np.max(np.abs(vals)))

    total = 0.0
    steps = np.angle(vals[1:] / vals[:-1])
    bad = np.flatnonzero(np.abs(steps) > math.pi / 2)
    total += float(np.sum(np.delete(steps, bad)))
    for i in bad:
        total += _refine(b, pts[i], pts[i + 1], vals[i], vals[i + 1], floor * wmax, depth=0)

    turns = total / (2 * math.pi)
    count = int(round(turns))
    if abs(turns - count) > 0.25:
        raise ContourTooCloseError(f"non-integer winding {turns:.3f}")
    return count, scale


def _refine(b, za, zb, fa, fb, wfloor, depth):
    d = math.atan2((fb / fa).imag, (fb / fa).real)
    if abs(d) <= math.pi / 2:
        return d
    if depth > 48 or abs(zb - za) < 1e-13:
        raise ContourTooCloseError("phase increment does not resolve")
    zm = (za + zb) / 2
    fm = complex(b(zm))
    if abs(fm) * math.exp(-math.pi * zm.real ** 2 / b.lam) < wfloor:
        raise ContourTooCloseError("contour too close to a zero")
    return (_refine(b, za, zm, fa, fm, wfloor, depth + 1)
            + _refine(b, zm, zb, fm, fb, wfloor, depth + 1))


def torus_rect(lam: float, N: int) -> Rect:
    return Rect(0.0, lam, 0.0, float(N))


def _shift_rng(rng):
    return rng if rng is not None else np.random.default_rng(0)


def zero_count(b: BargmannFn, rect: Rect | None = None, density: float = 32.0,
               rng: np.random.Generator | None = None) -> int:
    """Number of zeros (with multiplicity) inside ``rect`` (default: the fundamental torus cell).

    A contour passing too close to a zero is translated by a random offset in
    ``(0, lam/(4N)) x (0, 1/4)``, up to eight times.
    """
    if b.phi.norm() == 0:
        raise ValueError("the zero vector has no isolated zeros")
    count, _ = _count_with_shift(b, rect or torus_rect(b.lam, b.N), density, _shift_rng(rng))[:2]
    return count


def _count_with_shift(b, rect, density, rng):
    shift = 0j
    for attempt in range(MAX_SHIFTS + 1):
        try:
            count, scale = winding_number(b, rect.shifted(shift), density)
            return count, scale, rect.shifted(shift)
        except ContourTooCloseError as exc:
            log.debug("contour retry %d: %s", attempt, exc)
            shift = complex(rng.uniform(0, b.lam / (4 * b.N)), rng.uniform(0, 0.25))
    raise ZeroCountingError(f"contour could not be cleared after {MAX_SHIFTS} shifts")


@dataclass
class ZeroSet:
    lam: float
    N: int
    zeros: np.ndarray
    multiplicities: np.ndarray
    residuals: np.ndarray
    scales: np.ndarray = field(repr=False)

    @property
    def total_count(self) -> int:
        return int(np.sum(self.multiplicities))

    @property
    def relative_residuals(self) -> np.ndarray:
        return self.residuals / self.scales

    def zero_sum(self) -> complex:
        return complex(np.sum(self.zeros * self.multiplicities))

    def stft_points(self) -> list[TorusPoint]:
        """Matching zeros of the STFT: ``(x, xi) -> (x/lam, -xi)`` on [0,1) x [0,N)."""
        return [TorusPoint(z.real / self.lam, -z.imag, self.N) for z in self.zeros]

    def to_dict(self) -> dict:
        return {
            "lambda": self.lam,
            "n": self.N,
            "zeros": [[float(z.real), float(z.imag)] for z in self.zeros],
            "multiplicities": [int(m) for m in self.multiplicities],
            "residuals": [float(r) for r in self.residuals],
            "count": self.total_count,
            "sum_deviation": zero_sum_check(self, self.lam, self.N),
        }


_SPLITS = (0.5 + 0.0137, 0.5 - 0.0391, 0.5 + 0.0713, 0.5 - 0.1129, 0.5 + 0.1597)


def _newton(b: BargmannFn, z: complex, box: Rect) -> complex | None:
    """Newton iteration from ``z``; gives up once the iterate leaves a neighbourhood of ``box``."""
    for _ in range(NEWTON_STEPS):
        d = complex(b.derivative(z))
        if d == 0:
            return None
        step = complex(b(z)) / d
        z -= step
        if not box.contains(z, margin=box.diameter):
            return None
        if abs(step) <= 1e-15 * max(1.0, abs(z)):
            return z
    return z


def _split(rect: Rect, frac: float) -> tuple[Rect, Rect]:
    if (rect.x1 - rect.x0) >= (rect.y1 - rect.y0):
        xm = rect.x0 + frac * (rect.x1 - rect.x0)
        return Rect(rect.x0, xm, rect.y0, rect.y1), Rect(xm, rect.x1, rect.y0, rect.y1)
    ym = rect.y0 + frac * (rect.y1 - rect.y0)
    return Rect(rect.x0, rect.x1, rect.y0, ym), Rect(rect.x0, rect.x1, ym, rect.y1)


def _locate(b, rect, count, scale, density, found):
    if count == 0:
        return
    if count == 1:
        z = _newton(b, rect.center, rect)
        if z is not None and rect.contains(z, margin=1e-12 * max(1.0, rect.diameter)):
            found.append((z, 1, scale))
            return
    if rect.diameter < MIN_BOX:
        z = _newton(b, rect.center, rect) if count == 1 else rect.center
        if z is None or not rect.contains(z, margin=rect.diameter):
            z = rect.center
        found.append((z, count, scale))
        return
    for frac in _SPLITS:
        left, right = _split(rect, frac)
        try:
            cl, sl = winding_number(b, left, density)
            cr, sr = winding_number(b, right, density)
        except ContourTooCloseError:
            continue
        if cl + cr != count:
            log.debug("count not additive on %s (%d + %d != %d)", rect, cl, cr, count)
            continue
        _locate(b, left, cl, sl, density, found)
        _locate(b, right, cr, sr, density, found)
        return
    # every split line grazed a zero; treat as a cluster
    z = _newton(b, rect.center, rect)
    found.append((rect.center if z is None else z, count, scale))


def zero_locate(b: BargmannFn, density: float = 32.0,
                rng: np.random.Generator | None = None) -> ZeroSet:
    """Locate all zeros of ``B`` on the torus ``[0,lam) x [0,N)``."""
    if b.phi.norm() == 0:
        raise ValueError("the zero vector has no isolated zeros")
    lam, N = b.lam, b.N
    # the scale-invariant zero set is computed for the unit-norm vector
    bn = BargmannFn(lam, SNVector(b.phi.coeffs / b.phi.norm()))
    count, scale, rect = _count_with_shift(bn, torus_rect(lam, N), density, _shift_rng(rng))
    found: list = []
    _locate(bn, rect, count, scale, density, found)

    zs, mult, res, scl = [], [], [], []
    for z, m, s in found:
        zw = complex(z.real - lam * math.floor(z.real / lam), z.imag - N * math.floor(z.imag / N))
        zs.append(zw)
        mult.append(m)
        res.append(abs(complex(bn(z))))
        scl.append(s)
    order = sorted(range(len(zs)), key=lambda i: (round(zs[i].imag, 12), round(zs[i].real, 12)))
    return ZeroSet(
        lam, N,
        np.array([zs[i] for i in order], dtype=complex),
        np.array([mult[i] for i in order], dtype=int),
        np.array([res[i] for i in order], dtype=float),
        np.array([scl[i] for i in order], dtype=float),
    )


def lattice_distance(d: complex, lam: float, N: int) -> float:
    dr = d.real - lam * round(d.real / lam)
    di = d.imag - N * round(d.imag / N)
    return math.hypot(dr, di)


def zero_sum_check(zs: ZeroSet, lam: float, N: int) -> float:
    """Distance of ``sum z_k - (N lam/2 + i N^2/2)`` to the lattice ``lam Z + i N Z``."""
    return lattice_distance(zs.zero_sum() - complex(N * lam / 2, N * N / 2), lam, N)
