"""Matrix Bessel series: scalar oracles, diagnostics, and limit rates.

The rank-one series collapses to the classical confluent limit 0F1, so
scipy's hyp0f1 is an independent oracle there.  Rank-two and rank-three
values are pinned structurally: symmetry in the spectrum, batch/single
agreement, and the refusal/diagnostic contract of the evaluator.
"""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import special as sps

from conebessel.bessel import (BesselBatch, RateTable, bessel_J,
                               bessel_J_batch, f_mu, limit_rate,
                               olshanski_psi, phi_mu, wolf_haar_oracle)
from conebessel.cones import DomainError, IndexPoleError, field_params, psd_sqrt
from conebessel.series import (ADVICE_LARGE_ARGUMENT, SeriesControl,
                               scalar_0f1)

FP1 = field_params("R", 1)
FP2 = field_params("R", 2)
FP2C = field_params("C", 2)
FP3 = field_params("R", 3)


class TestScalarOracle:
    def test_zero_argument_is_one(self):
        for fp in (FP1, FP2, FP3):
            info = bessel_J(1.5, np.zeros(fp.q), fp)
            assert info.value == 1.0
            assert info.converged

    def test_frozen_value_mu1(self):
        # classical normalized Bessel at z = 2, argument z^2/4 = 1
        info = bessel_J(1.0, [1.0], FP1)
        assert info.value == pytest.approx(0.22389077914123567, abs=1e-14)

    @pytest.mark.parametrize("mu", [0.8, 1.0, 2.5, 5.0])
    def test_matches_scipy_on_grid(self, mu):
        for z in np.linspace(0.0, 4.0, 9):
            got = bessel_J(mu, [z * z / 4.0], FP1).value
            assert got == pytest.approx(sps.hyp0f1(mu, -z * z / 4.0),
                                        abs=1e-12)

    def test_scalar_0f1_helper_agrees(self):
        v = scalar_0f1(1.7, -2.3)
        assert v == pytest.approx(sps.hyp0f1(1.7, -2.3), rel=1e-13)


class TestDiagnostics:
    def test_truncation_degree_grows_with_argument(self):
        small = bessel_J(2.0, [0.1], FP1)
        large = bessel_J(2.0, [9.0], FP1)
        assert small.truncation_degree < large.truncation_degree
        assert small.est_tail <= 1e-11

    def test_refusal_on_huge_argument(self):
        info = bessel_J(1.0, [1e6], FP1)
        assert not info.converged
        assert info.advice == ADVICE_LARGE_ARGUMENT
        assert math.isnan(info.value.real if isinstance(info.value, complex)
                          else info.value)

    def test_large_index_tames_large_argument(self):
        # the refusal cap scales with the index
        info = bessel_J(200.0, [60.0], FP1)
        assert info.converged

    def test_index_pole_raises(self):
        with pytest.raises(IndexPoleError):
            bessel_J(0.5, [0.3, 0.1], FP2)

    def test_nonconvergence_advice_on_tiny_kmax(self):
        ctrl = SeriesControl(k_max=3)
        info = bessel_J(2.0, [6.0], FP1, ctrl)
        assert not info.converged


class TestBatchAndSymmetry:
    def test_batch_matches_singles(self):
        spectra = np.array([[0.3, 0.1], [1.2, 0.4], [2.0, 2.0]])
        vals, info = bessel_J_batch(2.5, spectra, FP2)
        assert info.converged
        for row, v in zip(spectra, vals):
            assert v == pytest.approx(bessel_J(2.5, row, FP2).value,
                                      rel=1e-13)

    def test_reusable_batch_evaluator(self):
        batch = BesselBatch(3.0, FP2)
        a, _ = batch(np.array([[0.5, 0.2]]))
        b, _ = batch(np.array([[0.5, 0.2]]))
        assert a[0] == b[0]

    @given(st.lists(st.floats(min_value=0.0, max_value=3.0), min_size=2,
                    max_size=2))
    @settings(max_examples=25, deadline=None)
    def test_symmetric_in_spectrum(self, spec):
        fwd = bessel_J(2.2, spec, FP2).value
        rev = bessel_J(2.2, spec[::-1], FP2).value
        assert fwd == pytest.approx(rev, rel=1e-12)

    def test_complex_spectrum_supported(self):
        info = bessel_J(2.0, np.array([0.5 + 0.2j, 0.1 - 0.2j]), FP2)
        assert info.converged
        assert isinstance(info.value, complex)


class TestKernels:
    def test_phi_is_f_at_square(self):
        s = np.array([[0.7, 0.1], [0.1, 0.5]])
        r = np.array([[0.9, 0.2], [0.2, 0.8]])
        a = phi_mu(s, r, 3.0, FP2).value
        b = f_mu(s @ s, r, 3.0, FP2).value
        assert a == pytest.approx(b, rel=1e-13)

    def test_phi_symmetric_in_arguments(self):
        s = np.array([[0.7, 0.1], [0.1, 0.5]])
        r = np.array([[0.9, 0.2], [0.2, 0.8]])
        assert phi_mu(s, r, 2.5, FP2).value == pytest.approx(
            phi_mu(r, s, 2.5, FP2).value, rel=1e-12)

    def test_f_mu_accepts_complexified_s(self):
        r = np.array([[0.8, 0.1], [0.1, 0.6]])
        s = np.array([[0.5, 0.3], [0.1, 0.4]])  # deliberately non-Hermitian
        info = f_mu(s, r, 3.0, FP2)
        assert info.converged


class TestPsi:
    def test_zero_parameter_gives_one(self):
        a = np.diag([1.0, 1.0])
        assert olshanski_psi(np.zeros((2, 2)), a) == 1.0

    def test_functional_equation(self):
        gen = np.random.default_rng(7)
        for _ in range(10):
            g1, g2, h = (gen.normal(size=(2, 2)) for _ in range(3))
            a, c = 0.4 * g1 @ g1.T, 0.4 * g2 @ g2.T
            b = 0.3 * (h + h.T)
            lhs = olshanski_psi(b, a) * olshanski_psi(b, c)
            rhs = olshanski_psi(b, psd_sqrt(a @ a + c @ c))
            assert lhs == pytest.approx(rhs, rel=1e-12)

    def test_complex_parameter(self):
        a = np.diag([0.5, 1.0])
        b = np.diag([0.2 + 0.3j, -0.1 + 0.1j])
        v = olshanski_psi(b, a)
        assert isinstance(v, complex)
        assert abs(v) == pytest.approx(
            abs(olshanski_psi(b.real, a)), rel=1e-12)


class TestLimitRate:
    def test_errors_decrease_with_doubling_index(self):
        table = limit_rate(np.diag([0.5, 1.0]), (8, 16, 32, 64), FP2)
        assert isinstance(table, RateTable)
        assert table.strictly_decreasing()
        for r in table.ratios:
            assert 1.6 <= r <= 2.4

    def test_small_index_refused(self):
        with pytest.raises(DomainError):
            limit_rate(np.diag([0.5, 1.0]), (2, 16), FP2)

    def test_non_ascending_refused(self):
        with pytest.raises(ValueError):
            limit_rate(np.diag([0.5, 1.0]), (16, 8), FP2)


class TestWolfHaar:
    def test_haar_average_matches_series(self):
        x = np.array([[0.9, 0.3], [-0.4, 0.8], [0.5, -0.2], [0.1, 0.6]])
        est, stderr = wolf_haar_oracle(x, FP2, 20000, seed=11)
        from conebessel.cones import jacobi_eigh

        w, _ = jacobi_eigh(x.T @ x)
        target = bessel_J(2.0, w / 4.0, FP2).value
        assert abs(est - target) <= 4.0 * stderr

    def test_complex_field_supported(self):
        x = np.array([[0.8, 0.2 + 0.1j], [0.1 - 0.3j, 0.7],
                      [0.3, 0.2]], dtype=complex)
        est, stderr = wolf_haar_oracle(x, FP2C, 20000, seed=3)
        from conebessel.cones import jacobi_eigh

        w, _ = jacobi_eigh(x.conj().T @ x)
        target = bessel_J(3.0, w / 4.0, FP2C).value
        assert abs(est - target) <= 4.0 * stderr

    def test_sample_floor(self):
        with pytest.raises(ValueError):
            wolf_haar_oracle(np.ones((3, 2)), FP2, 10, seed=0)
