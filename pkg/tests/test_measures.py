"""Cone gamma / beta constants, matrix beta and Wishart samplers, KS helper.

Scalar collapses give scipy oracles (gamma, beta, chi-square); rank two is
pinned by the gamma recursion, deterministic quadrature of the beta
density, moment identities, and a Hankel-transform cross-check solved in
closed form by the modified Laplace identity.
"""

import math

import numpy as np
import pytest
from scipy import special as sps
from scipy import stats

from conebessel.bessel import bessel_J_batch
from conebessel.cones import DomainError, field_params, psd_sqrt
from conebessel.measures import (BetaParams, RngStream, beta_const,
                                 beta_density, gamma_omega, gauss_matrix,
                                 haar_unitary, ks_distance, project_block,
                                 sample_beta_general, sample_matrix_beta,
                                 verify_beta_projection, wishart_sample)
from conebessel.quadrature import cone_integrate, interval_rule

FP1 = field_params("R", 1)
FP2 = field_params("R", 2)
FP2C = field_params("C", 2)
FP3 = field_params("R", 3)


class TestGammaOmega:
    def test_rank_one_is_classical_gamma(self):
        for mu in (0.7, 1.0, 2.5, 4.0):
            assert gamma_omega(mu, FP1) == pytest.approx(sps.gamma(mu),
                                                         rel=1e-13)

    def test_frozen_rank_two(self):
        # (2 pi)^(1/2) * Gamma(2) * Gamma(3/2)
        assert gamma_omega(2.0, FP2) == pytest.approx(2.2214414690791826,
                                                      rel=1e-14)

    @pytest.mark.parametrize("fp", [FP2, FP2C, FP3, field_params("H", 2)])
    def test_recursion(self, fp):
        for mu in (2.1, 3.0, 4.7):
            ratio = gamma_omega(mu + 1.0, fp) / gamma_omega(mu, fp)
            want = np.prod([mu - j * fp.d / 2.0 for j in range(fp.q)])
            assert ratio == pytest.approx(want, rel=1e-12)

    def test_pole_detected(self):
        with pytest.raises(DomainError, match="pole"):
            gamma_omega(0.5, FP2)  # second factor sits at Gamma(0)

    def test_complex_index(self):
        v = gamma_omega(2.0 + 1.0j, FP2)
        assert isinstance(v, complex)
        # conjugate symmetry of the factor product
        w = gamma_omega(2.0 - 1.0j, FP2)
        assert v == pytest.approx(np.conj(w), rel=1e-12)


class TestBetaConst:
    def test_rank_one_is_classical_beta(self):
        for mu, nu in ((0.5, 0.5), (1.5, 2.0), (3.0, 0.7)):
            assert beta_const(mu, nu, FP1) == pytest.approx(
                sps.beta(mu, nu), rel=1e-13)

    def test_frozen_rank_two(self):
        assert beta_const(1.5, 1.5, FP2) == pytest.approx(
            0.74048048969306091, rel=1e-13)

    def test_symmetric(self):
        assert beta_const(2.2, 3.1, FP2C) == pytest.approx(
            beta_const(3.1, 2.2, FP2C), rel=1e-13)

    def test_parameter_bound(self):
        with pytest.raises(DomainError):
            beta_const(0.4, 2.0, FP2)  # needs Re mu > 1/2 at q=2, d=1


class TestBetaDensity:
    def test_rank_one_matches_scipy(self):
        params = BetaParams(FP1, 2.5, 1.7)
        for y in (0.1, 0.4, 0.9):
            got = beta_density(np.array([[y]]), params)
            assert got == pytest.approx(stats.beta(2.5, 1.7).pdf(y),
                                        rel=1e-12)

    def test_vanishes_outside_interval(self):
        params = BetaParams(FP2, 2.0, 2.0)
        assert beta_density(np.diag([1.2, 0.5]), params) == 0.0
        assert beta_density(np.diag([-0.1, 0.5]), params) == 0.0

    @pytest.mark.parametrize("fp", [FP2, FP2C])
    def test_normalized_rank_two(self, fp):
        mu, nu = 2.6, 2.2
        quad = interval_rule(fp, e0=mu - fp.n / fp.q, e1=nu - fp.n / fp.q)
        mass, err = cone_integrate(
            lambda nodes, spectra: np.ones(nodes.shape[0]), quad)
        assert mass == pytest.approx(
            float(np.real(beta_const(mu, nu, fp))), rel=1e-6)
        assert err < 1e-4

    def test_swap_symmetry(self):
        y = np.array([[0.5, 0.1], [0.1, 0.3]])
        a = beta_density(y, BetaParams(FP2, 2.5, 1.9))
        b = beta_density(np.eye(2) - y, BetaParams(FP2, 1.9, 2.5))
        assert a == pytest.approx(b, rel=1e-12)


class TestMatrixBetaSampler:
    def test_draws_inside_matrix_interval(self):
        draws = sample_matrix_beta(2, FP2, 4, 5, RngStream(3), size=500)
        assert draws.shape == (500, 2, 2)
        assert np.max(np.abs(draws - np.swapaxes(draws, 1, 2).conj())) < 1e-12
        w = np.linalg.eigvalsh(draws)
        assert w.min() >= -1e-10
        assert w.max() <= 1.0 + 1e-10

    def test_rank_one_law(self):
        draws = sample_matrix_beta(1, FP1, 3, 4, RngStream(11), size=30000)
        d, pv = ks_distance(draws[:, 0, 0], stats.beta(1.5, 2.0).cdf)
        assert pv > 0.01, (d, pv)

    def test_rank_one_complex_law(self):
        fpc = field_params("C", 1)
        draws = sample_matrix_beta(1, fpc, 3, 4, RngStream(12), size=30000)
        d, pv = ks_distance(draws[:, 0, 0].real, stats.beta(3.0, 4.0).cdf)
        assert pv > 0.01, (d, pv)

    def test_mean_trace_against_quadrature(self):
        mu = nu = 2.0  # p = r = 4 at d = 1
        n = 60000
        draws = sample_matrix_beta(2, FP2, 4, 4, RngStream(7), size=n)
        tr = np.trace(draws, axis1=1, axis2=2).real
        quad = interval_rule(FP2, e0=mu - FP2.n / FP2.q,
                             e1=nu - FP2.n / FP2.q)
        mass, _ = cone_integrate(
            lambda nodes, spectra: np.ones(nodes.shape[0]), quad)
        mean, _ = cone_integrate(
            lambda nodes, spectra: np.sum(spectra, axis=1), quad)
        target = mean / mass
        stderr = float(np.std(tr, ddof=1)) / math.sqrt(n)
        assert abs(float(np.mean(tr)) - target) <= 4.0 * stderr

    def test_preconditions(self):
        with pytest.raises(DomainError):
            sample_matrix_beta(0, FP1, 3, 3, RngStream(0))
        with pytest.raises(DomainError):
            sample_matrix_beta(3, FP3, 2, 5, RngStream(0))
        with pytest.raises(DomainError):
            sample_matrix_beta(3, FP3, 5, 2, RngStream(0))

    def test_projection_invariance_report(self):
        rep = verify_beta_projection(2, FP2, 5, 4, 5000, seed=2)
        assert rep.passed, rep.line()


class TestProjectBlock:
    def test_full_rank_identity(self):
        y = np.arange(9.0).reshape(3, 3)
        assert np.array_equal(project_block(y, 3), y)

    def test_leading_block(self):
        y = np.arange(9.0).reshape(3, 3)
        assert np.array_equal(project_block(y, 2), y[:2, :2])
        batch = np.stack([y, 2 * y])
        assert project_block(batch, 1).shape == (2, 1, 1)


class TestWishart:
    def test_scalar_is_chi_square(self):
        draws = wishart_sample(FP1, 5, np.eye(1), RngStream(4), size=30000)
        d, pv = ks_distance(draws[:, 0, 0], stats.chi2(5).cdf)
        assert pv > 0.01, (d, pv)

    def test_mean_is_p_sigma(self):
        sigma = np.array([[1.0, 0.3], [0.3, 0.8]])
        n = 40000
        draws = wishart_sample(FP2, 4, sigma, RngStream(9), size=n)
        mean = draws.mean(axis=0)
        stderr = np.std(draws, axis=0, ddof=1) / math.sqrt(n)
        assert np.all(np.abs(mean - 4 * sigma) <= 4.0 * stderr + 1e-12)

    def test_positive_semidefinite_hermitian(self):
        sigma = np.array([[1.0, 0.2 + 0.1j], [0.2 - 0.1j, 0.7]])
        draws = wishart_sample(FP2C, 3, sigma, RngStream(6), size=200)
        assert np.max(np.abs(draws - np.swapaxes(draws, 1, 2).conj())) < 1e-12
        assert np.linalg.eigvalsh(draws).min() >= -1e-12

    def test_needs_enough_rows(self):
        with pytest.raises(DomainError):
            wishart_sample(FP2, 1, np.eye(2), RngStream(0))

    @pytest.mark.parametrize(
        "fp,p,sigma,m",
        [
            (FP1, 3, np.array([[0.9]]), np.array([[0.6]])),
            (FP2, 4, np.array([[1.0, 0.2], [0.2, 0.7]]),
             np.array([[0.5, 0.1], [0.1, 0.4]])),
            (FP2C, 5, np.array([[0.8, 0.1 + 0.2j], [0.1 - 0.2j, 0.9]]),
             np.array([[0.4, -0.1j], [0.1j, 0.5]])),
        ],
    )
    def test_hankel_transform(self, fp, p, sigma, m):
        # E[J_{p d/2}(W m / 4)] = exp(-tr(sigma m) / (2 d)), a closed form
        # delivered by the matrix Laplace transform of the series.
        n = 60000
        draws = wishart_sample(fp, p, sigma, RngStream(21), size=n)
        rm = psd_sqrt(m, fp.field)
        args = rm @ draws @ rm / 4.0
        spectra = np.linalg.eigvalsh(args)
        vals, info = bessel_J_batch(p * fp.d / 2.0, spectra, fp)
        assert info.converged
        vals = np.real(vals)
        target = math.exp(-float(np.trace(sigma @ m).real) / (2.0 * fp.d))
        stderr = float(np.std(vals, ddof=1)) / math.sqrt(n)
        assert abs(float(np.mean(vals)) - target) <= 4.0 * stderr


class TestGeneralBetaSampler:
    def test_scalar_law(self):
        params = BetaParams(FP1, 2.3, 1.4)
        draws = sample_beta_general(params, RngStream(5), size=30000)
        d, pv = ks_distance(draws[:, 0, 0], stats.beta(2.3, 1.4).cdf)
        assert pv > 0.01, (d, pv)

    def test_rank_two_mean_trace(self):
        params = BetaParams(FP2, 2.5, 2.2)
        n = 8000
        draws = sample_beta_general(params, RngStream(8), size=n)
        tr = np.trace(draws, axis1=1, axis2=2).real
        quad = interval_rule(FP2, e0=params.mu - FP2.n / FP2.q,
                             e1=params.nu - FP2.n / FP2.q)
        mass, _ = cone_integrate(
            lambda nodes, spectra: np.ones(nodes.shape[0]), quad)
        mean, _ = cone_integrate(
            lambda nodes, spectra: np.sum(spectra, axis=1), quad)
        target = mean / mass
        stderr = float(np.std(tr, ddof=1)) / math.sqrt(n)
        assert abs(float(np.mean(tr)) - target) <= 4.0 * stderr

    def test_rank_three_refused(self):
        with pytest.raises(DomainError):
            sample_beta_general(BetaParams(FP3, 4.0, 4.0), RngStream(0))

    def test_unbounded_kernel_refused(self):
        with pytest.raises(DomainError):
            # q=2, d=1: n/q = 3/2, so mu = 1.2 makes the kernel blow up
            sample_beta_general(BetaParams(FP2, 1.2, 2.0), RngStream(0))


class TestKsDistance:
    def test_uniform_accepts(self):
        gen = RngStream(13).generator()
        x = gen.uniform(size=100000)
        d, pv = ks_distance(x, lambda t: np.clip(t, 0.0, 1.0))
        assert d < 0.01
        assert pv > 0.01

    def test_constant_sample_distance(self):
        x = np.full(1000, 0.3)
        d, _ = ks_distance(x, lambda t: np.clip(t, 0.0, 1.0))
        assert d == pytest.approx(0.7, abs=1e-9)

    def test_minimum_sample_size(self):
        with pytest.raises(ValueError):
            ks_distance(np.linspace(0, 1, 50), lambda t: t)


class TestRngAndHaar:
    def test_stream_determinism(self):
        a = RngStream(42, 3).generator().standard_normal(16)
        b = RngStream(42, 3).generator().standard_normal(16)
        c = RngStream(42, 4).generator().standard_normal(16)
        assert np.array_equal(a, b)
        assert not np.array_equal(a, c)
        assert RngStream(42).chunk(3) == RngStream(42, 3)

    def test_gauss_matrix_second_moment(self):
        gen = RngStream(1).generator()
        x = gauss_matrix(40, 2, FP2C, gen, size=4000)
        s = np.mean(np.swapaxes(x, 1, 2).conj() @ x, axis=0)
        assert np.allclose(s, 40 * np.eye(2), atol=1.5)

    def test_haar_orthonormal(self):
        gen = RngStream(2).generator()
        u = haar_unitary(4, FP2, gen)
        assert np.allclose(u @ u.T, np.eye(4), atol=1e-12)
        uc = haar_unitary(3, FP2C, gen)
        assert np.allclose(uc @ uc.conj().T, np.eye(3), atol=1e-12)

    def test_haar_rank_one_real_is_sign(self):
        gen = RngStream(3).generator()
        vals = [haar_unitary(1, FP1, gen)[0, 0] for _ in range(50)]
        assert all(abs(abs(v) - 1.0) < 1e-14 for v in vals)
        assert any(v < 0 for v in vals) and any(v > 0 for v in vals)

    def test_haar_column_mass_uniform(self):
        gen = RngStream(14).generator()
        u = haar_unitary(3, FP2, gen, size=20000)
        m = np.mean(np.abs(u[:, 0, 0]) ** 2)
        stderr = np.std(np.abs(u[:, 0, 0]) ** 2, ddof=1) / math.sqrt(20000)
        assert abs(m - 1.0 / 3.0) <= 4.0 * stderr
