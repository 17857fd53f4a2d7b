"""Field parameters, Hermitian validation, and the Jacobi eigensolver.

numpy.linalg serves as the independent oracle for the hand-rolled
eigendecomposition throughout.
"""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conebessel.cones import (
    DomainError,
    chamber_sort,
    cone_point,
    eigvals_ordered,
    field_params,
    general_eigvals,
    haar_batch,
    herm,
    herm_eigs_2x2,
    jacobi_eigh,
    power_function,
    psd_sqrt,
    psd_sqrt_2x2,
    spherical_poly_mc,
)


def random_hermitian(rng, q, cplx):
    if cplx:
        g = rng.standard_normal((q, q)) + 1j * rng.standard_normal((q, q))
    else:
        g = rng.standard_normal((q, q))
    return (g + g.conj().T) / 2


class TestFieldParams:
    def test_real_rank2(self):
        fp = field_params("R", 2)
        assert fp.d == 1
        assert fp.n == 3
        assert fp.alpha == 2.0
        assert fp.gamma == pytest.approx(2.5)

    def test_complex_rank2(self):
        fp = field_params("C", 2)
        assert fp.d == 2
        assert fp.n == 4
        assert fp.alpha == 1.0
        assert fp.gamma == pytest.approx(4.0)

    def test_quaternion_rank3(self):
        fp = field_params("H", 3)
        assert fp.d == 4
        assert fp.n == 3 + 2 * 3 * 2
        assert fp.alpha == 0.5

    def test_quaternion_matrix_form_rejected(self):
        fp = field_params("H", 2)
        with pytest.raises(DomainError):
            fp.matrix_dtype
        with pytest.raises(DomainError):
            herm(np.eye(2), "H")

    def test_bad_field(self):
        with pytest.raises(ValueError):
            field_params("Q", 2)
        with pytest.raises(ValueError):
            field_params("R", 0)


class TestHermValidation:
    def test_symmetrizes(self):
        a = np.array([[1.0, 0.5 + 1e-14], [0.5, 2.0]])
        h = herm(a)
        assert np.allclose(h, h.T)

    def test_rejects_asymmetric(self):
        with pytest.raises(ValueError):
            herm(np.array([[1.0, 1.0], [0.0, 1.0]]))

    def test_cone_point_clamps(self):
        # tiny negative eigenvalue within the clamp window
        a = np.diag([1.0, -1e-12])
        c = cone_point(a)
        w, _ = jacobi_eigh(c)
        assert np.min(w) >= 0.0

    def test_cone_point_rejects_indefinite(self):
        with pytest.raises(DomainError):
            cone_point(np.diag([1.0, -0.5]))


class TestJacobiEig:
    @pytest.mark.parametrize("q", [1, 2, 3, 5, 8])
    @pytest.mark.parametrize("cplx", [False, True])
    def test_matches_numpy(self, q, cplx):
        rng = np.random.default_rng(42 + q)
        for _ in range(5):
            a = random_hermitian(rng, q, cplx)
            w, v = jacobi_eigh(a)
            ref = np.sort(np.linalg.eigvalsh(a))[::-1]
            np.testing.assert_allclose(w, ref, rtol=1e-12, atol=1e-12)
            # reconstruction
            np.testing.assert_allclose((v * w) @ v.conj().T, a, atol=1e-12)

    def test_descending_order(self):
        w, _ = jacobi_eigh(np.diag([1.0, 3.0, 2.0]))
        assert list(w) == sorted(w, reverse=True)

    def test_rank_cap(self):
        with pytest.raises(DomainError):
            jacobi_eigh(np.eye(9))

    def test_eigvals_ordered_spectrum(self):
        spec = eigvals_ordered(np.diag([0.5, 2.0]))
        assert spec.ordered
        assert spec.values == (2.0, 0.5)


class TestGeneralEigvals:
    @pytest.mark.parametrize("q", [1, 2, 3])
    def test_matches_numpy(self, q):
        rng = np.random.default_rng(7)
        a = rng.standard_normal((q, q)) + 1j * rng.standard_normal((q, q))
        got = np.sort_complex(general_eigvals(a))
        ref = np.sort_complex(np.linalg.eigvals(a))
        np.testing.assert_allclose(got, ref, rtol=1e-9, atol=1e-9)

    def test_rank_cap(self):
        with pytest.raises(DomainError):
            general_eigvals(np.eye(4, dtype=complex))


class TestPsdSqrt:
    @given(st.integers(1, 4), st.integers(0, 10_000))
    @settings(max_examples=25, deadline=None)
    def test_square_roundtrip(self, q, seed):
        rng = np.random.default_rng(seed)
        g = rng.standard_normal((q, q))
        a = g @ g.T
        r = psd_sqrt(a)
        np.testing.assert_allclose(r @ r, a, atol=1e-10 * max(1.0, np.max(np.abs(a))))

    def test_monotone_on_commuting(self):
        a = np.diag([1.0, 4.0])
        b = np.diag([2.0, 5.0])
        ra, rb = psd_sqrt(a), psd_sqrt(b)
        w, _ = jacobi_eigh(rb - ra)
        assert np.min(w) >= -1e-12

    def test_batched_2x2_agrees(self):
        rng = np.random.default_rng(3)
        g = rng.standard_normal((50, 2, 2))
        mats = np.einsum("nij,nkj->nik", g, g)
        roots = psd_sqrt_2x2(mats)
        for i in range(50):
            np.testing.assert_allclose(roots[i], psd_sqrt(mats[i]), atol=1e-10)
        eigs = herm_eigs_2x2(mats)
        for i in range(50):
            ref = np.sort(np.linalg.eigvalsh(mats[i]))[::-1]
            np.testing.assert_allclose(eigs[i], ref, atol=1e-10)


class TestPowerFunction:
    def test_diagonal_reduction(self):
        x = np.diag([2.0, 3.0, 5.0])
        lam = (3, 1, 1)
        expected = 2.0**3 * 3.0**1 * 5.0**1
        assert power_function(x, lam) == pytest.approx(expected, rel=1e-12)

    @given(st.lists(st.floats(0.1, 3.0), min_size=2, max_size=3),
           st.integers(0, 4), st.integers(0, 4))
    @settings(max_examples=30, deadline=None)
    def test_diagonal_powers(self, diag, a, b):
        lam = tuple(sorted([a, b], reverse=True))
        x = np.diag(diag)
        expected = np.prod([diag[i] ** (lam[i] if i < len(lam) else 0)
                            for i in range(len(diag))])
        assert power_function(x, lam) == pytest.approx(expected, rel=1e-10)

    def test_identity_is_one(self):
        assert power_function(np.eye(3), (2, 1)) == pytest.approx(1.0)

    def test_rejects_bad_partition(self):
        with pytest.raises(ValueError):
            power_function(np.eye(2), (1, 2))


class TestHaarBatch:
    def test_orthogonal(self):
        gen = np.random.Generator(np.random.Philox(key=np.array([5, 0], dtype=np.uint64)))
        u = haar_batch(3, 1, gen, 10)
        for m in u:
            np.testing.assert_allclose(m @ m.T, np.eye(3), atol=1e-12)

    def test_unitary(self):
        gen = np.random.Generator(np.random.Philox(key=np.array([5, 0], dtype=np.uint64)))
        u = haar_batch(2, 2, gen, 10)
        for m in u:
            np.testing.assert_allclose(m @ m.conj().T, np.eye(2), atol=1e-12)

    def test_rank_one_real_signs(self):
        gen = np.random.Generator(np.random.Philox(key=np.array([11, 0], dtype=np.uint64)))
        u = haar_batch(1, 1, gen, 2000)
        vals = u[:, 0, 0]
        assert set(np.unique(np.round(vals, 12))) == {-1.0, 1.0}
        assert abs(np.mean(vals)) < 0.1


class TestSphericalAverage:
    def test_identity_argument(self):
        fp = field_params("R", 2)
        est, err = spherical_poly_mc((2, 1), np.eye(2), fp, 500, seed=0)
        assert est == pytest.approx(1.0, abs=1e-12)

    def test_sample_floor(self):
        fp = field_params("R", 2)
        with pytest.raises(ValueError):
            spherical_poly_mc((1,), np.eye(2), fp, 50, seed=0)


class TestChamber:
    def test_type_a_sorts(self):
        np.testing.assert_array_equal(chamber_sort([1.0, 3.0, 2.0], "A"), [3.0, 2.0, 1.0])

    def test_type_b_absolute(self):
        np.testing.assert_array_equal(chamber_sort([-3.0, 1.0], "B"), [3.0, 1.0])
