"""Laplace-transform, addition, and Sonine-type identities for the matrix
Bessel function, verified by deterministic cone quadrature plus one Monte
Carlo route through matrix beta laws.

All quadrature-based checks share a dedicated series control with a deep
layer budget: cone integrands are evaluated at spectral arguments up to the
truncation radius, where the alternating series needs many layers and some
headroom in the refusal cap.  Nodes whose eigenvalue sum exceeds a safety
threshold are dropped (their Bessel factor is bounded by one and the
exponential weight makes their contribution negligible); the discarded
weight bound is reported in the extras of each report.
"""

from __future__ import annotations

import math
import time

import numpy as np

from .bessel import BesselBatch
from .cones import (DomainError, FieldParams, cone_point, herm, psd_sqrt,
                    psd_sqrt_2x2)
from .measures import RngStream, beta_const, gamma_omega, sample_matrix_beta
from .quadrature import cone_integrate, cone_rule, interval_rule
from .reports import VerificationReport, make_report
from .series import SeriesControl

__all__ = [
    "QUAD_SERIES_CTRL",
    "verify_laplace",
    "verify_laplace_mod",
    "verify_addition",
    "verify_sonine",
    "verify_sonine_phi",
    "verify_polar_route",
]

QUAD_SERIES_CTRL = SeriesControl(k_max=80, rel_tol=1e-14, quiet_layers=2,
                                 max_abs_arg=120.0)

# Largest admissible eigenvalue sum for series evaluation inside integrands;
# keeps the worst layer below the cancellation guard of the engine.
_TR_SAFE = 29.0

_POLAR_CHUNK = 100_000


def _check_index(mu: float, fp: FieldParams, what: str = "index") -> None:
    bound = fp.d * (fp.q - 1) / 2.0
    if not complex(mu).real > bound:
        raise DomainError(
            f"{what} must satisfy Re mu > d(q-1)/2 = {bound:g}; got {mu}")


def _pos_def(y, fp: FieldParams, name: str) -> np.ndarray:
    y = herm(y, fp.field)
    w = np.linalg.eigvalsh(y)
    if w[0] <= 0.0:
        raise DomainError(f"{name} must be positive definite; smallest "
                          f"eigenvalue {w[0]:.3e}")
    return y


def _det_batch(nodes: np.ndarray) -> np.ndarray:
    a = nodes[..., 0, 0].real
    c = nodes[..., 1, 1].real
    return a * c - np.abs(nodes[..., 0, 1]) ** 2


def _product_spectra(nodes: np.ndarray, spectra: np.ndarray,
                     m: np.ndarray, fp: FieldParams) -> np.ndarray:
    """Ordered eigenvalues of x @ m for Hermitian PSD x (nodes) and m.

    Rank 2 uses the trace/determinant closed form (the product is similar
    to a Hermitian PSD matrix, so its spectrum is real nonnegative).
    """
    if fp.q == 1:
        return spectra * float(m.real[0, 0])
    tr = np.einsum("nij,ji->n", nodes, m).real
    det = spectra[:, 0] * spectra[:, 1] * float(np.real(np.linalg.det(m)))
    disc = np.sqrt(np.clip(tr * tr - 4.0 * det, 0.0, None))
    return np.stack([(tr + disc) / 2.0, (tr - disc) / 2.0], axis=1)


def _masked_bessel(batch: BesselBatch, spectra: np.ndarray) -> np.ndarray:
    """Series values with over-threshold eigenvalue sums zeroed out."""
    tr = spectra.sum(axis=1)
    safe = tr <= _TR_SAFE
    out = np.zeros(spectra.shape[0])
    if np.any(safe):
        vals, info = batch(spectra[safe])
        if not info.converged:
            raise ArithmeticError(
                f"Bessel series failed inside quadrature: {info.advice}")
        out[safe] = vals.real
    return out


def _laplace_common(mu: float, y, fp: FieldParams, level, tol,
                    m: np.ndarray | None):
    started = time.perf_counter()
    _check_index(mu, fp)
    y = _pos_def(y, fp, "y")
    lam_min = float(np.linalg.eigvalsh(y)[0])
    radius = 36.0 / lam_min
    e0 = mu - fp.n / fp.q
    quad = cone_rule(fp, e0=e0, radius=radius, level=level)
    batch = BesselBatch(mu, fp, QUAD_SERIES_CTRL)
    y_c = y.astype(quad.nodes_fine.dtype)

    def integrand(nodes, spectra):
        ip = np.einsum("nij,ji->n", nodes, y_c).real
        if m is None:
            arg = spectra
        else:
            arg = _product_spectra(nodes, spectra, m, fp)
        return _masked_bessel(batch, arg) * np.exp(-ip)

    value, err = cone_integrate(integrand, quad)

    y_inv = np.linalg.inv(y)
    det_y = float(np.real(np.linalg.det(y)))
    if m is None:
        expo = float(np.trace(y_inv).real)
    else:
        expo = float(np.trace(m @ y_inv).real)
    rhs = float(np.real(gamma_omega(mu, fp))) * det_y ** (-mu) * math.exp(-expo)

    # Bound on what the eigenvalue-sum mask discarded (|J| <= 1 heuristic).
    def discarded(nodes, spectra):
        ip = np.einsum("nij,ji->n", nodes, y_c).real
        tr = spectra.sum(axis=1)
        return np.where(tr > _TR_SAFE, np.exp(-ip), 0.0)

    masked_bound, _ = cone_integrate(discarded, quad)
    extras = {"quad_error": err, "radius": radius,
              "masked_weight_bound": abs(masked_bound)}
    return started, value, rhs, extras


def _laplace_tol(fp: FieldParams) -> float:
    if fp.q == 1:
        return 1e-8
    return 1e-4 if fp.d == 1 else 2e-3


def verify_laplace(mu: float, y, fp: FieldParams, level: int | None = None,
                   tol: float | None = None) -> VerificationReport:
    """Weighted Laplace transform of J_mu against its closed form.

    integral over the cone of J_mu(x) exp(-<x,y>) det(x)^(mu-n/q) dx
    equals GammaOmega(mu) det(y)^(-mu) exp(-tr(y^{-1})).
    """
    started, value, rhs, extras = _laplace_common(mu, y, fp, level, tol, None)
    tol = tol if tol is not None else _laplace_tol(fp)
    params = {"mu": mu, "field": fp.field, "q": fp.q,
              "y_spec": np.linalg.eigvalsh(herm(y, fp.field)).tolist()}
    return make_report("laplace", params, value, rhs, tolerance=tol,
                       seed=0, started=started, extras=extras)


def verify_laplace_mod(mu: float, m, y, fp: FieldParams,
                       level: int | None = None,
                       tol: float | None = None) -> VerificationReport:
    """Laplace transform with a spectral modulation m inside the Bessel factor.

    Same as verify_laplace but with J_mu(x m) in the integrand and
    exp(-tr(m y^{-1})) on the closed-form side.
    """
    fp_m = cone_point(m, fp.field)
    started, value, rhs, extras = _laplace_common(mu, y, fp, level, tol, fp_m)
    tol = tol if tol is not None else _laplace_tol(fp)
    params = {"mu": mu, "field": fp.field, "q": fp.q,
              "m_spec": np.linalg.eigvalsh(fp_m).tolist(),
              "y_spec": np.linalg.eigvalsh(herm(y, fp.field)).tolist()}
    return make_report("laplace-mod", params, value, rhs, tolerance=tol,
                       seed=0, started=started, extras=extras)


def _addition_tol(fp: FieldParams) -> float:
    return 1e-6 if fp.q == 1 else 1e-3


def verify_addition(mu: float, nu: float, m1, m2, x, fp: FieldParams,
                    level: int | None = None,
                    tol: float | None = None) -> VerificationReport:
    """Addition theorem: J_{mu+nu}(x(m1+m2)) as an interval average.

    The right side integrates J_mu(sqrt(x) t sqrt(x) m1) against
    J_nu(sqrt(x) (I-t) sqrt(x) m2) over the matrix interval with beta
    weights and divides by the beta constant.
    """
    started = time.perf_counter()
    _check_index(mu, fp, "first index")
    _check_index(nu, fp, "second index")
    m1 = cone_point(m1, fp.field)
    m2 = cone_point(m2, fp.field)
    x = _pos_def(x, fp, "x")
    sqx = psd_sqrt(x, fp.field)
    big_m1 = sqx @ m1 @ sqx
    big_m2 = sqx @ m2 @ sqx
    eye = np.eye(fp.q, dtype=big_m1.dtype)

    lhs_arg = np.linalg.eigvalsh(sqx @ (m1 + m2) @ sqx)[::-1]
    batch_sum = BesselBatch(mu + nu, fp, QUAD_SERIES_CTRL)
    lhs_vals, lhs_info = batch_sum(np.asarray(lhs_arg, dtype=float)[None, :])
    if not lhs_info.converged:
        raise ArithmeticError("left-side Bessel series did not converge")
    lhs = float(lhs_vals[0].real)

    e0 = mu - fp.n / fp.q
    e1 = nu - fp.n / fp.q
    quad = interval_rule(fp, e0=e0, e1=e1, level=level)
    b_mu = BesselBatch(mu, fp, QUAD_SERIES_CTRL)
    b_nu = BesselBatch(nu, fp, QUAD_SERIES_CTRL)

    def integrand(nodes, spectra):
        s1 = _product_spectra(nodes, spectra, big_m1, fp)
        comp = eye[None] - nodes
        comp_spec = 1.0 - spectra[:, ::-1]
        s2 = _product_spectra(comp, comp_spec, big_m2, fp)
        v1, i1 = b_mu(s1)
        v2, i2 = b_nu(s2)
        if not (i1.converged and i2.converged):
            raise ArithmeticError("Bessel series failed inside quadrature")
        return v1.real * v2.real

    integral, err = cone_integrate(integrand, quad)
    rhs = integral / float(np.real(beta_const(mu, nu, fp)))
    tol = tol if tol is not None else _addition_tol(fp)
    params = {"mu": mu, "nu": nu, "field": fp.field, "q": fp.q,
              "m1_spec": np.linalg.eigvalsh(m1).tolist(),
              "m2_spec": np.linalg.eigvalsh(m2).tolist(),
              "x_spec": np.linalg.eigvalsh(x).tolist()}
    return make_report("addition", params, lhs, rhs, tolerance=tol,
                       seed=0, started=started, extras={"quad_error": err})


def _sonine_tol(fp: FieldParams) -> float:
    return 1e-8 if fp.q == 1 else 1e-3


def verify_sonine(mu: float, nu: float, m, fp: FieldParams,
                  level: int | None = None,
                  tol: float | None = None) -> VerificationReport:
    """Index-raising integral: J_{mu+nu}(m) as a beta average of J_mu(y m)."""
    started = time.perf_counter()
    _check_index(mu, fp, "first index")
    _check_index(nu, fp, "second index")
    m = cone_point(m, fp.field)

    lhs_arg = np.sort(np.linalg.eigvalsh(m))[::-1]
    batch_sum = BesselBatch(mu + nu, fp, QUAD_SERIES_CTRL)
    lhs_vals, lhs_info = batch_sum(np.asarray(lhs_arg, dtype=float)[None, :])
    if not lhs_info.converged:
        raise ArithmeticError("left-side Bessel series did not converge")
    lhs = float(lhs_vals[0].real)

    quad = interval_rule(fp, e0=mu - fp.n / fp.q, e1=nu - fp.n / fp.q,
                         level=level)
    b_mu = BesselBatch(mu, fp, QUAD_SERIES_CTRL)

    def integrand(nodes, spectra):
        vals, info = b_mu(_product_spectra(nodes, spectra, m, fp))
        if not info.converged:
            raise ArithmeticError("Bessel series failed inside quadrature")
        return vals.real

    integral, err = cone_integrate(integrand, quad)
    rhs = integral / float(np.real(beta_const(mu, nu, fp)))
    tol = tol if tol is not None else _sonine_tol(fp)
    params = {"mu": mu, "nu": nu, "field": fp.field, "q": fp.q,
              "m_spec": np.linalg.eigvalsh(m).tolist()}
    return make_report("sonine", params, lhs, rhs, tolerance=tol,
                       seed=0, started=started, extras={"quad_error": err})


def verify_sonine_phi(mu: float, nu: float, s, x, fp: FieldParams,
                      level: int | None = None,
                      tol: float | None = None) -> VerificationReport:
    """Sonine relation for the scaled kernels phi: a beta mixture of indices.

    phi_s at index mu+nu equals the beta_{mu,nu} mixture of phi at index mu
    with spectrally mixed argument, phi_{sqrt(s y s)}.  The discretized
    mixing measure (points sqrt(s y s) with normalized weights) is attached
    to the report extras.
    """
    started = time.perf_counter()
    _check_index(mu, fp, "first index")
    _check_index(nu, fp, "second index")
    s = cone_point(s, fp.field)
    x = cone_point(x, fp.field)
    k = s @ x @ x @ s

    lhs_arg = np.sort(np.linalg.eigvalsh(k))[::-1] / 4.0
    batch_sum = BesselBatch(mu + nu, fp, QUAD_SERIES_CTRL)
    lhs_vals, lhs_info = batch_sum(np.asarray(lhs_arg, dtype=float)[None, :])
    if not lhs_info.converged:
        raise ArithmeticError("left-side Bessel series did not converge")
    lhs = float(lhs_vals[0].real)

    quad = interval_rule(fp, e0=mu - fp.n / fp.q, e1=nu - fp.n / fp.q,
                         level=level)
    b_mu = BesselBatch(mu, fp, QUAD_SERIES_CTRL)

    def integrand(nodes, spectra):
        vals, info = b_mu(_product_spectra(nodes, spectra, k, fp) / 4.0)
        if not info.converged:
            raise ArithmeticError("Bessel series failed inside quadrature")
        return vals.real

    integral, err = cone_integrate(integrand, quad)
    b_const = float(np.real(beta_const(mu, nu, fp)))
    rhs = integral / b_const

    # Discretized mixing measure: push each interval node y to sqrt(s y s).
    nodes = quad.nodes_fine
    wts = quad.weights_fine / b_const
    if fp.q == 1:
        pts = float(s[0, 0].real) * np.sqrt(nodes[:, 0, 0].real)
        mix = [[float(p), float(w)] for p, w in zip(pts, wts)]
    else:
        sy = np.einsum("ij,njk,kl->nil", s, nodes, s)
        roots = psd_sqrt_2x2(0.5 * (sy + np.swapaxes(sy, -1, -2).conj()))
        order = np.argsort(wts)[::-1][:32]
        mix = [{"point": roots[i].tolist(), "weight": float(wts[i])}
               for i in order]
    tol = tol if tol is not None else _sonine_tol(fp)
    params = {"mu": mu, "nu": nu, "field": fp.field, "q": fp.q,
              "s_spec": np.linalg.eigvalsh(s).tolist(),
              "x_spec": np.linalg.eigvalsh(x).tolist()}
    return make_report("sonine-phi", params, lhs, rhs, tolerance=tol,
                       seed=0, started=started,
                       extras={"quad_error": err, "mixing_measure": mix})


def verify_polar_route(ptilde: int, p: int, lam, x, fp: FieldParams,
                       N: int, seed: int,
                       tol: float = 1e-2) -> VerificationReport:
    """Rank-reduction route: phi at index p*d/2 as a beta-block mixture.

    phi_lam at the high index equals the expectation over matrix beta draws
    r (rank ptilde, parameters (ptilde*d/2, (p-ptilde)*d/2)) of phi at the
    reduced index ptilde*d/2 with argument block lam r[:q,:q] lam.  Verified
    by Monte Carlo against the direct series value.
    """
    started = time.perf_counter()
    if fp.q > ptilde:
        raise DomainError("target rank must not exceed the beta rank")
    if p < 2 * ptilde:
        raise DomainError(
            f"need p >= 2*ptilde for integrable beta parameters; got "
            f"p={p}, ptilde={ptilde}")
    lam = cone_point(lam, fp.field)
    x = cone_point(x, fp.field)
    k = lam @ x @ x @ lam

    mu_high = p * fp.d / 2.0
    lhs_arg = np.sort(np.linalg.eigvalsh(k))[::-1] / 4.0
    hv, hinfo = BesselBatch(mu_high, fp, QUAD_SERIES_CTRL)(
        np.asarray(lhs_arg, dtype=float)[None, :])
    if not hinfo.converged:
        raise ArithmeticError("high-index Bessel series did not converge")
    lhs = float(hv[0].real)

    mu_low = ptilde * fp.d / 2.0
    batch_low = BesselBatch(mu_low, fp, QUAD_SERIES_CTRL)
    total = total_sq = 0.0
    done = 0
    base = RngStream(seed)
    chunk_idx = 0
    while done < N:
        n = min(_POLAR_CHUNK, N - done)
        draws = sample_matrix_beta(ptilde, fp, ptilde, p - ptilde,
                                   base.chunk(chunk_idx), size=n)
        chunk_idx += 1
        blocks = draws[:, :fp.q, :fp.q]
        if fp.q == 1:
            spectra = blocks[:, 0, 0].real.reshape(-1, 1) * float(k.real[0, 0]) / 4.0
        else:
            tr = np.einsum("nij,ji->n", blocks, k).real
            det = _det_batch(blocks) * float(np.real(np.linalg.det(k)))
            disc = np.sqrt(np.clip(tr * tr - 4.0 * det, 0.0, None))
            spectra = np.stack([(tr + disc) / 2.0, (tr - disc) / 2.0], axis=1) / 4.0
        vals, info = batch_low(spectra)
        if not info.converged:
            raise ArithmeticError("reduced-index series did not converge")
        v = vals.real
        total += float(np.sum(v))
        total_sq += float(np.sum(v * v))
        done += n
    rhs = total / done
    var = max(total_sq / done - rhs * rhs, 0.0)
    stderr = math.sqrt(var / done)
    params = {"ptilde": ptilde, "p": p, "field": fp.field, "q": fp.q, "N": N,
              "lam_spec": np.linalg.eigvalsh(lam).tolist(),
              "x_spec": np.linalg.eigvalsh(x).tolist()}
    return make_report("polar-route", params, lhs, rhs, tolerance=tol,
                       mc_stderr=stderr, seed=seed, started=started)
