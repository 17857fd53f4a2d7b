"""Hypergroup convolution of orbit measures on matrix cones.

The convolution of two point measures delta_r and delta_s (r, s cone points)
at index mu is carried by square roots of

    M(w) = r^2 + s^2 + r w s + s w* r,      w in the unit ball B_q,

with ball weight det(I - w* w)^(mu - gamma), gamma = d(q - 1/2) + 1.  The
weight is integrable exactly for mu > d(q - 1/2); the constant kappa_mu
normalizes it to a probability measure.  Two sampling routes are provided:

* plain rejection from the uniform ball (valid for mu >= gamma, where the
  weight is bounded), and
* self-normalized importance sampling from the uniform ball, which covers
  every integrable index and is the default used by the verifications.

Monte Carlo runs are chunked with fixed-size Philox substreams, so results
are bit-reproducible and independent of how chunks are scheduled.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass

import numpy as np
from scipy import special as sps

from .bessel import BesselBatch, f_mu
from .cones import (DomainError, FieldParams, cone_point, herm,
                    herm_eigs_2x2, psd_sqrt, psd_sqrt_2x2)
from .measures import RngStream
from .reports import VerificationReport, make_report
from .series import SeriesControl

__all__ = [
    "CHUNK",
    "ConvolutionSample",
    "sample_ball",
    "kappa_mu",
    "convolve_points",
    "verify_product_formula",
    "verify_multiplicativity",
]

CHUNK = 100_000

# Weight floor below which rejection sampling is reported as stuck.
_MIN_ACCEPT_RATE = 1e-4


def _check_index(mu: float, fp: FieldParams) -> None:
    bound = fp.d * (fp.q - 0.5)
    if not mu > bound:
        raise DomainError(
            f"convolution index must satisfy mu > d(q - 1/2) = {bound:g}; "
            f"got mu = {mu} (the ball weight is not integrable at or below "
            "the boundary)")


def _uniform_cube(fp: FieldParams, gen: np.random.Generator, n: int) -> np.ndarray:
    """Uniform draws from the entrywise unit cube of general q x q matrices."""
    q = fp.q
    if fp.d == 1:
        return gen.uniform(-1.0, 1.0, size=(n, q, q))
    re = gen.uniform(-1.0, 1.0, size=(n, q, q))
    im = gen.uniform(-1.0, 1.0, size=(n, q, q))
    return re + 1j * im


def _gram_eigs(w: np.ndarray, fp: FieldParams) -> np.ndarray:
    """Eigenvalues of w* w for a batch of general matrices, descending."""
    g = np.swapaxes(w, -1, -2).conj() @ w
    if fp.q == 1:
        return np.abs(g[..., 0, 0].real)[:, None]
    if fp.q == 2:
        return herm_eigs_2x2(g)
    return np.linalg.eigvalsh(g)[..., ::-1]


def _ball_mask_and_logw(w: np.ndarray, mu: float, fp: FieldParams):
    """In-ball mask and density weight det(I - w* w)^(mu - gamma)."""
    eigs = _gram_eigs(w, fp)
    inside = eigs[:, 0] < 1.0 if eigs.ndim == 2 else eigs < 1.0
    weight = np.zeros(w.shape[0])
    if np.any(inside):
        lam = eigs[inside]
        det = np.prod(1.0 - lam, axis=-1)
        weight[inside] = det ** (mu - fp.gamma)
    return inside, weight


def sample_ball(fp: FieldParams, mu: float, N: int, rng: RngStream):
    """Rejection-sample N ball points with density prop. to det(I-w*w)^(mu-gamma).

    Valid for mu >= gamma where the weight is bounded by 1.  For indices in
    the open strip d(q-1/2) < mu < gamma use the importance route built into
    convolve_points instead.  Returns (draws, acceptance_rate).
    """
    _check_index(mu, fp)
    if mu < fp.gamma:
        raise DomainError(
            f"rejection sampling needs mu >= gamma = {fp.gamma:g} (bounded "
            "weight); use the importance-weighted route for smaller indices")
    out = []
    got, proposed = 0, 0
    chunk_idx = 0
    while got < N:
        gen = rng.chunk(chunk_idx).generator()
        chunk_idx += 1
        w = _uniform_cube(fp, gen, CHUNK)
        inside, weight = _ball_mask_and_logw(w, mu, fp)
        u = gen.uniform(size=CHUNK)
        keep = inside & (u < weight)
        proposed += CHUNK
        if np.any(keep):
            out.append(w[keep])
            got += int(np.count_nonzero(keep))
        if proposed >= 10_000 and got / proposed < _MIN_ACCEPT_RATE:
            raise DomainError(
                f"ball rejection rate {got / proposed:.2e} below "
                f"{_MIN_ACCEPT_RATE:g}; index mu = {mu} concentrates too "
                "close to the boundary for rejection sampling")
    draws = np.concatenate(out, axis=0)[:N]
    return draws, got / proposed


def kappa_mu(fp: FieldParams, mu: float, N: int, rng: RngStream):
    """Normalizing constant of the ball weight by cube Monte Carlo.

    Returns (estimate, stderr) for kappa = 1 / integral_B det(I-w*w)^(mu-gamma).
    For q = 1 over the reals the integral is the classical Beta(1/2, mu - 1/2).
    """
    _check_index(mu, fp)
    vol = 2.0 ** (fp.d * fp.q * fp.q)
    total = 0.0
    total_sq = 0.0
    count = 0
    n_chunks = max(1, math.ceil(N / CHUNK))
    for i in range(n_chunks):
        n = min(CHUNK, N - i * CHUNK)
        gen = rng.chunk(i).generator()
        w = _uniform_cube(fp, gen, n)
        _, weight = _ball_mask_and_logw(w, mu, fp)
        total += float(np.sum(weight))
        total_sq += float(np.sum(weight * weight))
        count += n
    mean = total / count
    var = max(total_sq / count - mean * mean, 0.0)
    integral = vol * mean
    integral_se = vol * math.sqrt(var / count)
    est = 1.0 / integral
    stderr = integral_se / integral ** 2
    return est, stderr


@dataclass
class ConvolutionSample:
    """Weighted draws representing delta_r *_mu delta_s.

    points are cone points (the square roots of M(w)); weights are
    normalized to sum 1.  expect() integrates a vectorized function with a
    self-normalized importance-sampling error estimate.
    """

    points: np.ndarray
    weights: np.ndarray

    def expect(self, f) -> tuple[float, float]:
        vals = np.asarray(f(self.points), dtype=float)
        est = float(np.sum(self.weights * vals))
        var = float(np.sum((self.weights * (vals - est)) ** 2))
        return est, math.sqrt(var)


def _conv_matrices(r: np.ndarray, s: np.ndarray, w: np.ndarray) -> np.ndarray:
    """M(w) = r^2 + s^2 + r w s + s w* r, symmetrized."""
    base = r @ r + s @ s
    cross = np.einsum("ij,njk,kl->nil", r, w, s)
    m = base[None, :, :] + cross + np.swapaxes(cross, -1, -2).conj()
    return 0.5 * (m + np.swapaxes(m, -1, -2).conj())


def _batch_sqrt(m: np.ndarray, fp: FieldParams) -> np.ndarray:
    if fp.q == 1:
        return np.sqrt(np.clip(m.real, 0.0, None)).astype(m.dtype)
    if fp.q == 2:
        return psd_sqrt_2x2(m)
    return np.stack([psd_sqrt(a, fp.field) for a in m])


def convolve_points(r, s, mu: float, fp: FieldParams, N: int,
                    rng: RngStream) -> ConvolutionSample:
    """Weighted sample from the convolution of two orbit measures.

    Uses uniform ball proposals with self-normalized weights, valid for
    every integrable index mu > d(q - 1/2).  N counts ball draws.
    """
    _check_index(mu, fp)
    r = cone_point(r, fp.field)
    s = cone_point(s, fp.field)
    pts, wts = [], []
    got, proposed, chunk_idx = 0, 0, 0
    while got < N:
        gen = rng.chunk(chunk_idx).generator()
        chunk_idx += 1
        w = _uniform_cube(fp, gen, CHUNK)
        inside, weight = _ball_mask_and_logw(w, mu, fp)
        proposed += CHUNK
        if np.any(inside):
            m = _conv_matrices(r, s, w[inside])
            pts.append(_batch_sqrt(m, fp))
            wts.append(weight[inside])
            got += int(np.count_nonzero(inside))
        if proposed >= 10_000 and got / proposed < _MIN_ACCEPT_RATE:
            raise DomainError("ball proposals almost never land inside; "
                              "rank/field combination unsupported")
    points = np.concatenate(pts, axis=0)[:N]
    weights = np.concatenate(wts)[:N]
    total = float(np.sum(weights))
    if total <= 0.0:
        raise DomainError("all importance weights vanished")
    return ConvolutionSample(points=points, weights=weights / total)


def _stream_ball_expectation(fp: FieldParams, mu: float, N: int, rng: RngStream,
                             f_of_m) -> tuple[float, float, int]:
    """Self-normalized expectation of f(M(w)) under the ball weight.

    f_of_m consumes a stacked batch of ball matrices w and returns real
    values; the caller builds M inside.  Streams fixed-size chunks keyed by
    index, accumulating the five sums needed for the weighted mean and its
    variance, so memory stays flat at any N.  Returns (estimate, stderr,
    ball draws used).
    """
    s_wf = s_w = s_w2f2 = s_w2f = s_w2 = 0.0
    got, proposed, chunk_idx = 0, 0, 0
    while got < N:
        gen = rng.chunk(chunk_idx).generator()
        chunk_idx += 1
        w = _uniform_cube(fp, gen, CHUNK)
        inside, weight = _ball_mask_and_logw(w, mu, fp)
        proposed += CHUNK
        if not np.any(inside):
            if proposed >= 10_000 and got / max(proposed, 1) < _MIN_ACCEPT_RATE:
                raise DomainError("ball proposals almost never land inside")
            continue
        take = w[inside]
        g = weight[inside]
        room = N - got
        if take.shape[0] > room:
            take, g = take[:room], g[:room]
        f = np.asarray(f_of_m(take), dtype=float)
        s_wf += float(np.sum(g * f))
        s_w += float(np.sum(g))
        s_w2f2 += float(np.sum(g * g * f * f))
        s_w2f += float(np.sum(g * g * f))
        s_w2 += float(np.sum(g * g))
        got += take.shape[0]
        if proposed >= 10_000 and got / proposed < _MIN_ACCEPT_RATE:
            raise DomainError("ball proposals almost never land inside")
    est = s_wf / s_w
    var = (s_w2f2 - 2.0 * est * s_w2f + est * est * s_w2) / (s_w * s_w)
    return est, math.sqrt(max(var, 0.0)), got


def _herm_spectra(m: np.ndarray, fp: FieldParams) -> np.ndarray:
    if fp.q == 1:
        return m[..., 0, 0].real.reshape(-1, 1)
    if fp.q == 2:
        return herm_eigs_2x2(m)
    return np.linalg.eigvalsh(m)[..., ::-1]


def _default_tol(fp: FieldParams) -> float:
    return 3e-2 if fp.q >= 2 else 1e-2


def verify_product_formula(mu: float, r, s, fp: FieldParams, N: int, seed: int,
                           tol: float | None = None,
                           ctrl: SeriesControl | None = None) -> VerificationReport:
    """Monte Carlo check of the product formula for two orbit values.

    J_mu(spec r^2) J_mu(spec s^2) must equal the normalized ball average of
    J_mu(spec M(w)).  Passes when the relative error meets the tolerance and
    the absolute error is within four standard errors.
    """
    started = time.perf_counter()
    _check_index(mu, fp)
    r = cone_point(r, fp.field)
    s = cone_point(s, fp.field)
    ctrl = ctrl or SeriesControl()
    batch = BesselBatch(mu, fp, ctrl)
    lhs_r = batch(_herm_spectra((r @ r)[None], fp))[0][0]
    lhs_s = batch(_herm_spectra((s @ s)[None], fp))[0][0]
    lhs = float(lhs_r) * float(lhs_s)

    def f_of_m(wball):
        m = _conv_matrices(r, s, wball)
        vals, info = batch(_herm_spectra(m, fp))
        if not info.converged:
            raise ArithmeticError(
                f"series did not converge inside the ball average: {info.advice}")
        return vals.real

    rhs, stderr, used = _stream_ball_expectation(fp, mu, N, rng=RngStream(seed),
                                                 f_of_m=f_of_m)
    tol = tol if tol is not None else _default_tol(fp)
    params = {"mu": mu, "field": fp.field, "q": fp.q, "N": used,
              "r_spec": _herm_spectra(r[None], fp)[0].tolist(),
              "s_spec": _herm_spectra(s[None], fp)[0].tolist()}
    return make_report("product-formula", params, lhs, rhs, tolerance=tol,
                       mc_stderr=stderr, seed=seed, started=started)


def verify_multiplicativity(s, r, t, mu: float, fp: FieldParams, N: int,
                            seed: int, tol: float | None = None,
                            ctrl: SeriesControl | None = None) -> VerificationReport:
    """Check f_s(r) f_s(t) = integral of f_s against delta_r *_mu delta_t.

    s is Hermitian; r, t are cone points.  The right side streams ball
    chunks, taking matrix square roots of M(w) to land back on the cone.
    """
    started = time.perf_counter()
    _check_index(mu, fp)
    s = herm(s, fp.field)
    r = cone_point(r, fp.field)
    t = cone_point(t, fp.field)
    ctrl = ctrl or SeriesControl()
    lhs = float(f_mu(s, r, mu, fp, ctrl).value) * float(f_mu(s, t, mu, fp, ctrl).value)
    batch = BesselBatch(mu, fp, ctrl)

    def f_of_m(wball):
        m = _conv_matrices(r, t, wball)
        z = _batch_sqrt(m, fp)
        arg = np.einsum("nij,jk,nkl->nil", z, s.astype(z.dtype), z) / 4.0
        vals, info = batch(_herm_spectra(arg, fp))
        if not info.converged:
            raise ArithmeticError(
                f"series did not converge inside the ball average: {info.advice}")
        return vals.real

    rhs, stderr, used = _stream_ball_expectation(fp, mu, N, rng=RngStream(seed),
                                                 f_of_m=f_of_m)
    tol = tol if tol is not None else _default_tol(fp)
    params = {"mu": mu, "field": fp.field, "q": fp.q, "N": used,
              "s_spec": _herm_spectra(s[None], fp)[0].tolist(),
              "r_spec": _herm_spectra(r[None], fp)[0].tolist(),
              "t_spec": _herm_spectra(t[None], fp)[0].tolist()}
    return make_report("multiplicativity", params, lhs, rhs, tolerance=tol,
                       mc_stderr=stderr, seed=seed, started=started)


def kappa_q1_real_oracle(mu: float) -> float:
    """Closed form of the q=1 real normalizing constant, 1/Beta(1/2, mu-1/2)."""
    if not mu > 0.5:
        raise DomainError("q=1 real ball weight needs mu > 1/2")
    return 1.0 / float(sps.beta(0.5, mu - 0.5))
