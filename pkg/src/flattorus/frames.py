"""Sampling sets on the flat torus and finite Gabor frames with periodized Gaussians.

A point set ``z_1..z_K`` gives a frame for S_N (window ``exp(-pi lam t^2)``)
exactly when its analysis matrix ``A[k, n] = V eps_n(z_k)`` has full column
rank; the frame bounds are the squared extremal singular values.  The
arithmetic predicates below decide the same question without any numerics:

* torus points: ``K >= N + 1``, or ``K == N`` with mean not in
  ``(1/2 + n/N, N/2 + m)``;
* grid pairs ``(j, l)`` (the points ``(j/N, l)``): ``N^2 >= K >= N + 1``, or
  ``K == N`` odd, or ``K == N`` even with the componentwise sums not both
  divisible by N.
"""
from __future__ import annotations

import itertools
import logging
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .signals import GaussianWindow
from .torus_stft import TorusPoint, basis_matrix
from .theta import DEFAULT_EPS

log = logging.getLogger(__name__)

FRAME_RATIO = 1e-8
NOT_FRAME_RATIO = 1e-12
DISTINCT_TOL = 1e-9
MEAN_TOL = 1e-9

FRAME = "frame"
NOT_FRAME = "not-frame"
INDETERMINATE = "indeterminate"


@dataclass(frozen=True)
class PointConfig:
    N: int
    points: tuple[TorusPoint, ...]
    kind: str = "continuous"
    pairs: tuple[tuple[int, int], ...] | None = None

    def __post_init__(self):
        if self.kind not in ("continuous", "grid"):
            raise ValueError(f"unknown kind {self.kind!r}")
        for i, p in enumerate(self.points):
            for q in self.points[:i]:
                if p.distance(q) <= DISTINCT_TOL:
                    raise ValueError(f"points not distinct: {p} and {q}")

    @classmethod
    def from_points(cls, N: int, coords) -> "PointConfig":
        return cls(N, tuple(TorusPoint(float(x), float(xi), N) for x, xi in coords))

    @classmethod
    def from_grid(cls, N: int, pairs) -> "PointConfig":
        pairs = tuple((int(j), int(l)) for j, l in pairs)
        for j, l in pairs:
            if not (0 <= j < N and 0 <= l < N):
                raise ValueError(f"grid pair {(j, l)} outside 0..{N - 1}")
        if len(set(pairs)) != len(pairs):
            raise ValueError("grid pairs must be distinct")
        pts = tuple(TorusPoint(j / N, float(l), N) for j, l in pairs)
        return cls(N, pts, "grid", pairs)

    @property
    def K(self) -> int:
        return len(self.points)

    def as_continuous(self) -> "PointConfig":
        return PointConfig(self.N, self.points)


@dataclass
class FrameReport:
    lower_bound: float
    upper_bound: float
    sigma_ratio: float
    predicate_verdict: str
    numeric_verdict: str

    def to_dict(self) -> dict:
        return {
            "lower_bound": self.lower_bound,
            "upper_bound": self.upper_bound,
            "sigma_ratio": self.sigma_ratio,
            "predicate_verdict": self.predicate_verdict,
            "numeric_verdict": self.numeric_verdict,
        }


def analysis_matrix(lam: float, config: PointConfig, eps: float = DEFAULT_EPS) -> np.ndarray:
    """``K x N`` matrix with rows ``(V eps_n(z_k))_n`` so that ``sum_k |V phi(z_k)|^2 = ||A a||^2``."""
    if not lam > 0:
        raise ValueError("lambda must be positive")
    return basis_matrix(GaussianWindow(lam), config.N, list(config.points), eps)


def _singular_values(mat: np.ndarray) -> np.ndarray:
    """Singular values padded with zeros up to the column count (batched over leading axes)."""
    s = np.linalg.svd(mat, compute_uv=False)
    missing = mat.shape[-1] - s.shape[-1]
    if missing > 0:
        s = np.concatenate([s, np.zeros(s.shape[:-1] + (missing,))], axis=-1)
    return s


def frame_bounds(matrix: np.ndarray) -> tuple[float, float]:
    """``(sigma_min^2, sigma_max^2)`` of the analysis matrix."""
    s = _singular_values(np.asarray(matrix, dtype=complex))
    return float(s.min() ** 2), float(s.max() ** 2)


def numeric_verdict(ratio: float) -> str:
    if ratio > FRAME_RATIO:
        return FRAME
    if ratio < NOT_FRAME_RATIO:
        return NOT_FRAME
    return INDETERMINATE


def _near_integer(v: float, tol: float = MEAN_TOL) -> bool:
    return abs(v - round(v)) <= tol


def predicate_torus(config: PointConfig) -> str:
    N, K = config.N, config.K
    if K < N:
        return NOT_FRAME
    if K > N:
        return FRAME
    # mean == (1/2 + n/N, N/2 + m)  <=>  sum x - N/2 in Z  and  sum xi / N - N/2 in Z
    sx = sum(p.x for p in config.points)
    sxi = sum(p.xi for p in config.points)
    excluded = _near_integer(sx - N / 2) and _near_integer(sxi / N - N / 2)
    return NOT_FRAME if excluded else FRAME


def predicate_grid(config: PointConfig) -> str:
    if config.pairs is None:
        raise ValueError("grid predicate needs a grid configuration")
    N, K = config.N, config.K
    if K < N:
        return NOT_FRAME
    if K > N:
        return FRAME
    if N % 2 == 1:
        return FRAME
    sj = sum(j for j, _ in config.pairs)
    sl = sum(l for _, l in config.pairs)
    return NOT_FRAME if (sj % N == 0 and sl % N == 0) else FRAME


def predicate(config: PointConfig) -> str:
    return predicate_grid(config) if config.kind == "grid" else predicate_torus(config)


def frame_check(lam: float, config: PointConfig, eps: float = DEFAULT_EPS) -> FrameReport:
    mat = analysis_matrix(lam, config, eps)
    lo, hi = frame_bounds(mat)
    ratio = math.sqrt(lo / hi) if hi > 0 else 0.0
    return FrameReport(lo, hi, ratio, predicate(config), numeric_verdict(ratio))


def _mismatch(pred: str, num: str) -> bool:
    # the indeterminate band sits between both verdicts and never contradicts the predicate
    return num != INDETERMINATE and num != pred


@dataclass
class EquivalenceReport:
    N: int
    lam: float
    subsets: dict = field(default_factory=dict)
    continuous: int = 0
    indeterminate: int = 0
    mismatches: list = field(default_factory=list)
    not_frame_predicted: int = 0
    min_frame_ratio: float = math.inf
    max_not_frame_ratio: float = 0.0
    seconds: float = 0.0

    def to_dict(self) -> dict:
        return {
            "n": self.N,
            "lambda": self.lam,
            "subsets": {str(k): v for k, v in self.subsets.items()},
            "continuous": self.continuous,
            "indeterminate": self.indeterminate,
            "not_frame_predicted": self.not_frame_predicted,
            "min_frame_ratio": self.min_frame_ratio if math.isfinite(self.min_frame_ratio) else None,
            "max_not_frame_ratio": self.max_not_frame_ratio,
            "mismatch_count": len(self.mismatches),
            "mismatches": self.mismatches,
            "seconds": self.seconds,
        }

    def _record(self, ratio: float, pred: str, label) -> None:
        num = numeric_verdict(ratio)
        if num == INDETERMINATE:
            self.indeterminate += 1
        if pred == FRAME:
            self.min_frame_ratio = min(self.min_frame_ratio, ratio)
        else:
            self.not_frame_predicted += 1
            self.max_not_frame_ratio = max(self.max_not_frame_ratio, ratio)
        if _mismatch(pred, num):
            self.mismatches.append({"config": label, "predicate": pred,
                                    "numeric": num, "sigma_ratio": ratio})


def _ratios(rows: np.ndarray, subsets: np.ndarray, jobs: int) -> np.ndarray:
    def work(chunk):
        s = _singular_values(rows[chunk])
        return s.min(axis=-1) / s.max(axis=-1)

    chunks = np.array_split(subsets, max(1, min(jobs, len(subsets)) * 4)) if len(subsets) else []
    if jobs <= 1:
        parts = [work(c) for c in chunks]
    else:
        with ThreadPoolExecutor(max_workers=jobs) as ex:
            parts = list(ex.map(work, chunks))  # map preserves chunk order
    return np.concatenate(parts) if parts else np.zeros(0)


def _grid_subsets(N: int, K: int, budget: int, rng: np.random.Generator) -> np.ndarray:
    total = math.comb(N * N, K)
    if total <= max(budget, 0) or N <= 4:
        return np.array(list(itertools.combinations(range(N * N), K)), dtype=int)
    seen = set()
    while len(seen) < budget:
        seen.add(tuple(sorted(rng.choice(N * N, size=K, replace=False).tolist())))
    return np.array(sorted(seen), dtype=int)


def verify_equivalence(N: int, lam: float = 1.0, sample_budget: int = 2000, seed: int = 0,
                       jobs: int = 1, continuous_samples: int | None = None,
                       sizes: tuple[int, ...] | None = None,
                       eps: float = DEFAULT_EPS) -> EquivalenceReport:
    """Compare the numeric frame verdict with the arithmetic predicates.

    Grid subsets of the requested sizes (default ``N`` and ``N + 1``) are
    enumerated exhaustively for ``N <= 4`` (or whenever their number fits in
    ``sample_budget``) and sampled otherwise.  Random continuous
    configurations are added: generic ``N``- and ``(N+1)``-point sets and
    ``N``-point sets whose mean is forced onto the excluded lattice.
    """
    start = time.perf_counter()
    rng = np.random.default_rng(seed)
    report = EquivalenceReport(N, lam)
    w = GaussianWindow(lam)
    j, l = np.divmod(np.arange(N * N), N)
    rows = basis_matrix(w, N, (j / N, l.astype(float)), eps)

    for K in sizes or (N, N + 1):
        if K > N * N:
            continue
        subsets = _grid_subsets(N, K, sample_budget, rng)
        ratios = _ratios(rows, subsets, jobs)
        report.subsets[K] = len(subsets)
        for idx, ratio in zip(subsets, ratios):
            cfg_pairs = [(int(j[i]), int(l[i])) for i in idx]
            pred = predicate_grid(PointConfig.from_grid(N, cfg_pairs))
            report._record(float(ratio), pred, cfg_pairs)

    n_cont = sample_budget // 10 if continuous_samples is None else continuous_samples
    for trial in range(n_cont):
        mode = trial % 3
        K = N + 1 if mode == 1 else N
        x = rng.uniform(0, 1, K)
        xi = rng.uniform(0, N, K)
        if mode == 2:
            x[-1] = (N / 2 - x[:-1].sum()) % 1.0
            xi[-1] = (N * N / 2 - xi[:-1].sum()) % N
        try:
            cfg = PointConfig.from_points(N, zip(x, xi))
        except ValueError:
            continue
        rep = frame_check(lam, cfg, eps)
        report.continuous += 1
        report._record(rep.sigma_ratio, rep.predicate_verdict,
                       [[float(p.x), float(p.xi)] for p in cfg.points])

    report.seconds = time.perf_counter() - start
    log.info("verify N=%d lam=%g: %s subsets, %d continuous, %d mismatches, %d indeterminate",
             N, lam, report.subsets, report.continuous, len(report.mismatches), report.indeterminate)
    return report
