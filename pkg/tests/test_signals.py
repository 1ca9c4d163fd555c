import json
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from flattorus.signals import (
    FiniteSignal,
    GaussianWindow,
    GenericWindow,
    SNVector,
    duality_pairing,
    periodize,
    periodize_at,
    periodize_to_signal,
    sigma_coeffs,
    sinc_gaussian_witness,
)
from oracles import gauss, periodize_sum

THETA_0_I = 1.086434811213308


def bump(t):
    # compactly supported in (0.1, 0.6)
    t = np.asarray(t, dtype=float)
    inside = (t > 0.1) & (t < 0.6)
    out = np.zeros(t.shape)
    u = (t[inside] - 0.35) / 0.25
    out[inside] = np.exp(-1.0 / (1.0 - u * u))
    return out


BUMP = GenericWindow(bump, C=math.exp(1.0), alpha=1.0)


class TestSNVector:
    def test_basis_orthonormal(self):
        N = 5
        for n in range(N):
            for m in range(N):
                assert SNVector.basis(N, n).inner(SNVector.basis(N, m)) == (1.0 if n == m else 0.0)

    def test_norm(self):
        assert SNVector([3, 4j]).norm() == pytest.approx(5.0)
        assert SNVector([0, 0]).norm() == 0.0

    def test_rejects_nonfinite_and_empty(self):
        with pytest.raises(ValueError):
            SNVector([1.0, np.nan])
        with pytest.raises(ValueError):
            SNVector([])

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError):
            SNVector([1, 2]).inner(SNVector([1, 2, 3]))

    def test_json_round_trip(self, rng):
        v = SNVector(rng.normal(size=4) + 1j * rng.normal(size=4))
        text = v.to_json()
        assert all(len(p) == 2 for p in json.loads(text))
        assert np.array_equal(SNVector.from_json(text).coeffs, v.coeffs)

    def test_from_json_rejects_bad_pairs(self):
        with pytest.raises(ValueError):
            SNVector.from_json("[[1, 2, 3]]")

    def test_arithmetic(self):
        a, b = SNVector([1, 2]), SNVector([1j, 0])
        assert np.array_equal((a + b).coeffs, [1 + 1j, 2])
        assert np.array_equal((2 * a).coeffs, [2, 4])

    def test_immutable(self):
        v = SNVector([1, 2])
        with pytest.raises(ValueError):
            v.coeffs[0] = 5


class TestFiniteSignal:
    def test_index_mod_n(self):
        f = FiniteSignal([1, 2, 3])
        assert f[3] == 1 and f[-1] == 3

    def test_json_round_trip(self):
        f = FiniteSignal([1 + 2j, -0.5])
        assert np.array_equal(FiniteSignal.from_json(f.to_json()).entries, f.entries)


class TestWindows:
    def test_gaussian_norm(self):
        for lam in (0.5, 1.0, 4.0):
            assert GaussianWindow(lam).norm_sq() == pytest.approx((2 * lam) ** -0.5, rel=1e-15)

    def test_generic_norm_by_quadrature(self):
        g = GaussianWindow(2.0).as_generic()
        assert g.norm_sq() == pytest.approx(0.5, rel=1e-12)

    @pytest.mark.parametrize("lam", [0.0, -1.0, math.inf])
    def test_gaussian_rejects_lambda(self, lam):
        with pytest.raises(ValueError):
            GaussianWindow(lam)

    def test_generic_needs_envelope(self):
        with pytest.raises(ValueError):
            GenericWindow(bump, None, None)
        with pytest.raises(ValueError):
            GenericWindow(bump, 1.0, 0.0)

    def test_envelope_holds_for_gaussian_conversion(self):
        for lam in (1.0, 16.0):
            g = GaussianWindow(lam).as_generic()
            t = np.linspace(-5, 5, 2001)
            assert np.all(np.abs(g(t)) <= g.C * np.exp(-g.alpha * np.abs(t)) * (1 + 1e-12))

    def test_envelope_holds_for_witness(self):
        g = sinc_gaussian_witness(4, 3)
        t = np.linspace(-10, 10, 4001)
        assert np.all(np.abs(g(t)) <= g.C * np.exp(-g.alpha * np.abs(t)))

    def test_tf_shift(self):
        g = GaussianWindow(1.0).as_generic()
        h = g.tf_shift(0.3, 2.0)
        t = np.array([0.1, 0.7])
        assert np.allclose(h(t), np.exp(4j * math.pi * t) * np.exp(-math.pi * (t - 0.3) ** 2))


class TestPeriodize:
    def test_gaussian_at_zero(self):
        assert periodize(GaussianWindow(1.0), 1, 0) == pytest.approx(THETA_0_I, rel=1e-14)

    def test_compact_support_single_term(self):
        for n in range(4):
            assert periodize(BUMP, 4, n) == pytest.approx(complex(bump(n / 4)), abs=1e-15)

    def test_translation_invariance(self):
        g = GaussianWindow(1.0).as_generic()
        shifted = GenericWindow(lambda t: g(t - 1.0), g.C * math.exp(g.alpha), g.alpha)
        t = np.linspace(0, 1, 7, endpoint=False)
        assert np.allclose(periodize_at(shifted, t), periodize_at(g, t), atol=1e-14)

    def test_rejects_index(self):
        with pytest.raises(ValueError):
            periodize(GaussianWindow(1.0), 4, 4)

    @pytest.mark.parametrize("lam", [1.0, 4.0, 16.0])
    @pytest.mark.parametrize("N", [2, 8])
    def test_closed_form_vs_sum(self, lam, N):
        closed = periodize_to_signal(GaussianWindow(lam), N).entries
        generic = periodize_to_signal(GaussianWindow(lam).as_generic(), N).entries
        oracle = np.array([periodize_sum(gauss(lam), n / N) for n in range(N)])
        assert np.max(np.abs(closed - generic)) < 1e-12
        assert np.max(np.abs(closed - oracle)) < 1e-13

    def test_doubling_radius(self):
        g = sinc_gaussian_witness(4, 1)
        base = periodize_to_signal(g, 4).entries
        wide = np.array([periodize_sum(g, n / 4, kmax=int(2 * g.trunc_radius()) + 1) for n in range(4)])
        assert np.max(np.abs(base - wide)) < 1e-14 * max(1.0, np.max(np.abs(base)))

    def test_one_sample(self):
        assert periodize_to_signal(GaussianWindow(1.0), 1).entries[0] == pytest.approx(THETA_0_I)

    def test_localisation_lambda_64(self):
        vals = np.abs(periodize_to_signal(GaussianWindow(64.0), 8).entries)
        assert np.argmax(vals) == 0
        # two nearest terms t = 1/2 and t = -1/2
        assert vals[4] <= 2 * math.exp(-64 * math.pi / 4) * (1 + 1e-10)

    def test_linearity(self):
        f = GaussianWindow(1.0).as_generic()
        g = sinc_gaussian_witness(3, 1)
        fg = GenericWindow(lambda t: f(t) + g(t), f.C + g.C, min(f.alpha, g.alpha))
        lhs = periodize_to_signal(fg, 3).entries
        rhs = periodize_to_signal(f, 3).entries + periodize_to_signal(g, 3).entries
        assert np.allclose(lhs, rhs, atol=1e-14)


class TestSigma:
    @pytest.mark.parametrize("N", [2, 3, 5])
    def test_witness_gives_unit_vector(self, N):
        for n in range(N):
            a = sigma_coeffs(sinc_gaussian_witness(N, n), N).coeffs
            expect = np.zeros(N)
            expect[n] = 1.0 / N
            assert np.max(np.abs(a - expect)) < 1e-14

    def test_gaussian_n1(self):
        assert sigma_coeffs(GaussianWindow(1.0), 1).coeffs[0] == pytest.approx(THETA_0_I)

    def test_homogeneous(self):
        g = sinc_gaussian_witness(4, 2)
        g2 = GenericWindow(lambda t: 2 * g(t), 2 * g.C, g.alpha)
        assert np.allclose(sigma_coeffs(g2, 4).coeffs, 2 * sigma_coeffs(g, 4).coeffs, atol=1e-15)


class TestDuality:
    def test_diagonal_positive(self):
        v = duality_pairing(GaussianWindow(1.0), GaussianWindow(1.0), 4)
        assert abs(v.imag) < 1e-15 and v.real > 0

    @pytest.mark.parametrize("N", [2, 4, 7])
    def test_matches_sn_inner(self, N):
        f, g = GaussianWindow(1.0), sinc_gaussian_witness(N, N - 1)
        lhs = duality_pairing(f, g, N)
        rhs = N * sigma_coeffs(f, N).inner(sigma_coeffs(g, N))
        assert abs(lhs - rhs) < 1e-12

    def test_witness_pairing(self):
        N = 4
        g = GaussianWindow(1.0)
        val = duality_pairing(sinc_gaussian_witness(N, 0), g, N)
        assert abs(val - np.conj(periodize(g, N, 0)) / N) < 1e-14


@settings(max_examples=50, deadline=None)
@given(lam=st.floats(0.5, 16.0), t=st.floats(-3.0, 3.0))
def test_periodization_period_one(lam, t):
    w = GaussianWindow(lam)
    assert abs(periodize_at(w, t + 1.0) - periodize_at(w, t)) < 1e-13 * abs(periodize_at(w, 0.0))
