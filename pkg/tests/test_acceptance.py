"""Acceptance criteria, one test each; every test prints a single PASS/FAIL line.

Run with ``pytest tests/test_acceptance.py -v`` (or ``python3 tests/test_acceptance.py``).
"""
import cmath
import math
import sys
import time

import numpy as np
import pytest

from flattorus.analysis import (
    QuadratureGrid,
    invert_stft,
    kernel_basis_sum,
    kernel_gaussian,
    kernel_pairing,
    kernel_reproduce_check,
    moyal_gram,
)
from flattorus.bargmann import BargmannFn, coeff_recursion_check, zero_count, zero_locate, zero_sum_check
from flattorus.frames import verify_equivalence
from flattorus.signals import GaussianWindow, SNVector, sinc_gaussian_witness
from flattorus.theta import theta
from flattorus.torus_stft import basis_matrix, bridge_check, stft, zak
from oracles import kernel_lattice_sum


@pytest.fixture
def report(capsys):
    def emit(number, title, ok, detail):
        with capsys.disabled():
            print(f"\n[criterion {number}] {'PASS' if ok else 'FAIL'}  {title}: {detail}")
        assert ok, detail
    return emit


def phis(seed, N, count):
    rng = np.random.default_rng(seed)
    return [SNVector(rng.normal(size=N) + 1j * rng.normal(size=N)) for _ in range(count)]


def test_1_bridge(report):
    start = time.perf_counter()
    worst = 0.0
    for N in (4, 8, 16):
        for lam in (1.0, 4.0):
            w = GaussianWindow(lam)
            worst = max(worst, bridge_check(w, w, N))
        worst = max(worst, bridge_check(sinc_gaussian_witness(N, 1), GaussianWindow(1.0), N))
    secs = time.perf_counter() - start
    report(1, "grid bridge to the finite Gabor transform", worst < 1e-10 and secs < 5,
           f"max deviation {worst:.2e} (tol 1e-10), {secs:.2f} s (limit 5 s)")


def test_2_moyal(report):
    start = time.perf_counter()
    worst = 0.0
    for N in (2, 3, 4, 8):
        for lam in (1.0, 4.0):
            w = GaussianWindow(lam)
            raw = moyal_gram(w, w, N, QuadratureGrid(N, 32, 32)) * N * w.norm_sq()
            worst = max(worst, float(np.max(np.abs(raw - N * (2 * lam) ** -0.5 * np.eye(N)))))
    secs = time.perf_counter() - start
    report(2, "Moyal identity", worst < 1e-8 and secs < 30,
           f"max entry error {worst:.2e} (tol 1e-8), {secs:.2f} s (limit 30 s)")


def test_3_inversion(report):
    worst = 0.0
    w = GaussianWindow(1.0)
    for N in (3, 4, 8):
        for phi in phis(300 + N, N, 20):
            rec = invert_stft(w, lambda x, xi: stft(w, phi, (x, xi)), N)
            worst = max(worst, float(np.max(np.abs(rec.coeffs - phi.coeffs))))
    report(3, "STFT inversion", worst < 1e-8, f"max coefficient error {worst:.2e} over 60 vectors (tol 1e-8)")


def test_4_kernel(report):
    rng = np.random.default_rng(4)
    worst_forms, worst_repro = 0.0, 0.0
    for lam, N in ((1.0, 2), (1.0, 3), (4.0, 4), (4.0, 5)):
        w = GaussianWindow(lam)
        pp = (rng.uniform(0, 1, 25), rng.uniform(0, N, 25))
        p = (rng.uniform(0, 1, 25), rng.uniform(0, N, 25))
        forms = [
            kernel_gaussian(lam, N, pp, p),
            kernel_basis_sum(w, N, pp, p),
            kernel_pairing(w, N, pp, p),
            np.array([kernel_lattice_sum(lam, N, *a) for a in zip(*pp, *p)]),
        ]
        for i in range(len(forms)):
            for j in range(i):
                worst_forms = max(worst_forms, float(np.max(np.abs(forms[i] - forms[j]))))
        for phi in phis(40 + N, N, 2):
            worst_repro = max(worst_repro, kernel_reproduce_check(lam, phi, (pp[0][:5], pp[1][:5])))
    ok = worst_forms < 1e-10 and worst_repro < 1e-8
    report(4, "reproducing kernel", ok,
           f"pairwise form deviation {worst_forms:.2e} at 100 pairs (tol 1e-10), "
           f"reproduction error {worst_repro:.2e} (tol 1e-8)")


def test_5_zeros(report):
    start = time.perf_counter()
    bad_count, worst_sum, worst_e0 = 0, 0.0, 0.0
    for N in (2, 3, 4, 6):
        for lam in (1.0, 4.0):
            rng = np.random.default_rng(500 + 10 * N + int(lam))
            for phi in phis(5000 + 10 * N + int(lam), N, 50):
                b = BargmannFn(lam, phi)
                if zero_count(b, rng=rng) != N:
                    bad_count += 1
                zs = zero_locate(b, rng=rng)
                if zs.total_count != N:
                    bad_count += 1
                worst_sum = max(worst_sum, zero_sum_check(zs, lam, N))
            zs = zero_locate(BargmannFn(lam, SNVector.basis(N, 0)))
            expect = np.array([lam / 2 + 1j * (k + 0.5) for k in range(N)])
            worst_e0 = max(worst_e0, float(np.max(np.abs(zs.zeros - expect))) if zs.total_count == N else math.inf)
    secs = time.perf_counter() - start
    ok = bad_count == 0 and worst_sum < 1e-7 and worst_e0 < 1e-8
    report(5, "Bargmann zero structure", ok,
           f"{bad_count} wrong counts of 400, sum deviation {worst_sum:.2e} (tol 1e-7), "
           f"eps_0 zero error {worst_e0:.2e} (tol 1e-8), {secs:.1f} s")


def test_6_coefficients(report):
    worst = 0.0
    for N in (3, 4):
        for phi in phis(600 + N, N, 10):
            worst = max(worst, coeff_recursion_check(BargmannFn(1.0, phi)))
    report(6, "Fourier coefficient recursion", worst < 1e-8, f"max relative deviation {worst:.2e} (tol 1e-8)")


def test_7_frames(report):
    start = time.perf_counter()
    reps = [verify_equivalence(2, jobs=1), verify_equivalence(3, jobs=1),
            verify_equivalence(4, sizes=(4,), jobs=1)]
    secs = time.perf_counter() - start
    mismatches = sum(len(r.mismatches) for r in reps)
    counts = {(r.N, k): v for r in reps for k, v in r.subsets.items()}
    expected = {(2, 2): 6, (2, 3): 4, (3, 3): 84, (3, 4): 126, (4, 4): 1820}
    indeterminate = sum(r.indeterminate for r in reps)
    ok = mismatches == 0 and counts == expected and secs < 120
    report(7, "frame characterization", ok,
           f"{mismatches} mismatches, subsets {sorted(counts.items())}, "
           f"{sum(r.continuous for r in reps)} continuous configs, {indeterminate} indeterminate, "
           f"{secs:.1f} s (limit 120 s)")


def test_8_quasiperiodicity(report):
    rng = np.random.default_rng(8)
    n_inst = 200
    errs = {}

    def rel(a, b):
        return abs(a - b) / max(abs(a), abs(b))

    e = []
    for _ in range(n_inst):
        z = complex(rng.uniform(-2, 2), rng.uniform(-2, 2))
        tau = complex(rng.uniform(-1, 1), rng.uniform(0.5, 4))
        n, m = rng.integers(-2, 3, 2)
        rhs = cmath.exp(-1j * math.pi * tau * m * m - 2j * math.pi * m * z) * theta(z, tau)
        e.append(rel(theta(z + n + tau * m, tau), rhs))
    errs["theta"] = max(e)

    e_xi, e_u = [], []
    for _ in range(n_inst):
        w = GaussianWindow(rng.uniform(0.5, 4))
        u, xi = rng.uniform(-2, 2, 2)
        k = int(rng.integers(-2, 3))
        base = zak(w, u, xi)
        e_xi.append(rel(zak(w, u, xi + k), base))
        e_u.append(rel(zak(w, u + k, xi), cmath.exp(2j * math.pi * k * xi) * base))
    errs["zak xi"], errs["zak u"] = max(e_xi), max(e_u)

    e_x, e_f = [], []
    for _ in range(n_inst):
        N = int(rng.integers(2, 7))
        w = GaussianWindow(rng.choice([1.0, 4.0]))
        phi = phis(int(rng.integers(1 << 30)), N, 1)[0]
        x, xi = rng.uniform(0, 1), rng.uniform(0, N)
        v = stft(w, phi, (x, xi))
        e_x.append(rel(stft(w, phi, (x + 1, xi)), cmath.exp(-2j * math.pi * xi) * v))
        e_f.append(rel(stft(w, phi, (x, xi + N)), v))
    errs["stft x"], errs["stft xi"] = max(e_x), max(e_f)

    e_t, e_fr = [], []
    for _ in range(n_inst):
        N = int(rng.integers(2, 7))
        lam = float(rng.choice([1.0, 4.0]))
        b = BargmannFn(lam, phis(int(rng.integers(1 << 30)), N, 1)[0])
        z = complex(rng.uniform(0, lam), rng.uniform(0, N))
        n, m = int(rng.integers(-1, 2)), int(rng.integers(-2, 3))
        v = b(z)
        e_t.append(rel(b(z + lam * n), cmath.exp(math.pi * lam * n * n + 2 * math.pi * z * n) * v))
        e_fr.append(rel(b(z + 1j * N * m), v))
    errs["bargmann time"], errs["bargmann freq"] = max(e_t), max(e_fr)

    worst = max(errs.values())
    detail = ", ".join(f"{k} {v:.1e}" for k, v in errs.items())
    report(8, "quasi-periodicity suite", worst < 1e-10, f"{n_inst} instances each; {detail} (tol 1e-10)")


def test_9_zak(report):
    m = 64
    u, xi = np.meshgrid(np.arange(m) / m, np.arange(m) / m, indexing="ij")
    worst_u = 0.0
    for lam in (0.5, 1.0, 2.0, 4.0):
        z = zak(GaussianWindow(lam), u, xi)
        worst_u = max(worst_u, abs(float(np.mean(np.abs(z) ** 2)) - (2 * lam) ** -0.5))
    rng = np.random.default_rng(9)
    worst_c = 0.0
    for lam in (1.0, 4.0):
        g = GaussianWindow(lam).as_generic()
        for _ in range(50):
            x, xi0, y, om = rng.uniform(-1, 1, 4)
            lhs = zak(g.tf_shift(y, om), x, xi0)
            rhs = cmath.exp(2j * math.pi * om * x) * zak(GaussianWindow(lam), x - y, xi0 - om)
            worst_c = max(worst_c, abs(lhs - rhs))
    report(9, "Zak unitarity and shift covariance", worst_u < 1e-10 and worst_c < 1e-10,
           f"unitarity error {worst_u:.2e}, covariance error {worst_c:.2e} (tol 1e-10 each)")


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q"]))
