"""Deterministic quadrature on rank-1 and rank-2 matrix cones.

Integrals over the cone (truncated at a radius) or over the matrix interval
{0 <= y <= I} are reduced to eigenvalue-and-frame coordinates: a rank-2
point is x = a vv* + b (I - vv*) with a >= b = a t, giving

    dx = c_qd * a^(d+1) (1-t)^d  da dt dnu(v)

with dnu the invariant probability measure on the frame manifold (a circle
of projectors for d = 1, the 2-sphere for d = 2) and c_qd a measure
constant.  Power-function weights det(x)^e0 det(I-x)^e1 are absorbed into
Gauss-Jacobi axes exactly, up to a pointwise leftover (1 - a t)^e1 that is
folded into the combined node weights.  The constant c_qd is calibrated
once per (rank, field) against the closed-form cone gamma integral of
exp(-tr x), which is frame-independent, so the angular rules never bias the
calibration.

Every rule carries a fine and a coarse (half-resolution) node set; the
difference of the two weighted sums is the reported error estimate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.special import roots_jacobi, roots_legendre

from .cones import DomainError, FieldParams
from .measures import gamma_omega

__all__ = ["ConeQuadrature", "interval_rule", "cone_rule", "cone_integrate"]

# Node counts per refinement level (fine level L, coarse L-1).
_Q1_BASE = 24
_Q2_BASE_A = 16
_Q2_BASE_T = 12
_Q2_BASE_ANG = 12

_DEFAULT_LEVEL = {1: 4, 2: 3}


@dataclass
class ConeQuadrature:
    """Weighted nodes for one cone or interval integral.

    The weights already contain the measure constant and all absorbed power
    factors: sum(w * f(node)) approximates the full weighted integral.
    spectra_* hold the ordered eigenvalues of each node so integrands that
    only need spectra can skip diagonalization.
    """

    fp: FieldParams
    domain: str
    radius: float
    nodes_fine: np.ndarray
    spectra_fine: np.ndarray
    weights_fine: np.ndarray
    nodes_coarse: np.ndarray
    spectra_coarse: np.ndarray
    weights_coarse: np.ndarray


def _n_at(base: int, level: int) -> int:
    return max(6, int(base * 2 ** (level - 1)))


def _jacobi01(n: int, exp_one_minus: float, exp_t: float):
    """Nodes/weights on [0,1] with weight t^exp_t (1-t)^exp_one_minus."""
    if exp_t <= -1 or exp_one_minus <= -1:
        raise DomainError(
            f"axis weight exponents must exceed -1; got t^{exp_t:g}, "
            f"(1-t)^{exp_one_minus:g}")
    x, w = roots_jacobi(n, exp_one_minus, exp_t)
    t = (x + 1.0) / 2.0
    scale = 2.0 ** (-(exp_t + exp_one_minus + 1.0))
    return t, w * scale


def _frame_nodes(fp: FieldParams, n_ang: int):
    """Frame projectors and probability weights for rank 2."""
    if fp.d == 1:
        theta = np.arange(n_ang) * math.pi / n_ang
        v = np.stack([np.cos(theta), np.sin(theta)], axis=1)
        proj = np.einsum("ni,nj->nij", v, v)
        wts = np.full(n_ang, 1.0 / n_ang)
        return proj, wts
    n_s = max(4, n_ang // 2)
    s, ws = roots_legendre(n_s)
    phi = np.arange(n_ang) * 2.0 * math.pi / n_ang
    cos_h = np.sqrt((1.0 + s) / 2.0)
    sin_h = np.sqrt((1.0 - s) / 2.0)
    v1 = np.repeat(cos_h, n_ang).astype(complex)
    v2 = (sin_h[:, None] * np.exp(1j * phi)[None, :]).reshape(-1)
    v = np.stack([v1, v2], axis=1)
    proj = np.einsum("ni,nj->nij", v, v.conj())
    wts = np.repeat(ws / 2.0, n_ang) / n_ang
    return proj, wts


def _build_q2(fp: FieldParams, e0: float, e1: float, domain: str,
              radius: float, n_a: int, n_t: int, n_ang: int):
    d = fp.d
    if domain == "interval":
        a, wa = _jacobi01(n_a, e1, 2.0 * e0 + d + 1.0)
    else:
        a, wa = _jacobi01(n_a, 0.0, 2.0 * e0 + d + 1.0)
        a = radius * a
        wa = wa * radius ** (2.0 * e0 + d + 2.0)
    t, wt = _jacobi01(n_t, float(d), e0)
    proj, wv = _frame_nodes(fp, n_ang)

    pair_w = wa[:, None] * wt[None, :]
    if domain == "interval" and e1 != 0.0:
        pair_w = pair_w * (1.0 - a[:, None] * t[None, :]) ** e1
    hi = a[:, None] * np.ones_like(t)[None, :]
    lo = a[:, None] * t[None, :]

    eye = np.eye(2, dtype=proj.dtype)
    # x = lo * I + (hi - lo) * P over the (a, t, frame) grid
    nodes = (lo[:, :, None, None, None] * eye
             + (hi - lo)[:, :, None, None, None] * proj[None, None, :, :, :])
    weights = pair_w[:, :, None] * wv[None, None, :]
    spectra = np.stack([hi, lo], axis=-1)[:, :, None, :] * np.ones(
        (1, 1, proj.shape[0], 1))
    m = n_a * n_t * proj.shape[0]
    return (nodes.reshape(m, 2, 2), spectra.reshape(m, 2), weights.reshape(m))


@lru_cache(maxsize=8)
def _measure_const(q: int, d: int) -> float:
    """Calibrate the rank-2 eigenvalue-coordinate constant c_qd.

    Integrates exp(-tr x) det(x)^(mu0 - n/q) over the truncated cone on a
    dense radial grid (the integrand is frame-invariant, so the angular
    factor contributes exactly 1) and divides the closed-form cone gamma
    value by the raw sum.
    """
    if q == 1:
        return 1.0
    from .cones import field_params

    fp = field_params("R" if d == 1 else "C", q)
    mu0 = 2.0
    e0 = mu0 - fp.n / fp.q
    radius = 40.0
    a, wa = _jacobi01(256, 0.0, 2.0 * e0 + d + 1.0)
    a = radius * a
    wa = wa * radius ** (2.0 * e0 + d + 2.0)
    t, wt = _jacobi01(128, float(d), e0)
    vals = np.exp(-(a[:, None] * (1.0 + t[None, :])))
    raw = float(np.sum(wa[:, None] * wt[None, :] * vals))
    target = float(np.real(gamma_omega(mu0, fp)))
    return target / raw


def _make_rule(fp: FieldParams, e0: float, e1: float, domain: str,
               radius: float, level: int) -> ConeQuadrature:
    if fp.q not in (1, 2):
        raise DomainError("deterministic cone quadrature supports rank 1 and 2")
    if fp.q == 1:
        def axis(n):
            if domain == "interval":
                t, w = _jacobi01(n, e1, e0)
            else:
                t, w = _jacobi01(n, 0.0, e0)
                t = radius * t
                w = w * radius ** (e0 + 1.0)
            return t.reshape(-1, 1, 1), t.reshape(-1, 1), w

        nf, sf, wf = axis(_n_at(_Q1_BASE, level))
        nc, sc, wc = axis(_n_at(_Q1_BASE, level - 1))
    else:
        c = _measure_const(fp.q, fp.d)

        def grid(lv):
            nodes, spectra, w = _build_q2(
                fp, e0, e1, domain, radius,
                _n_at(_Q2_BASE_A, lv), _n_at(_Q2_BASE_T, lv),
                _n_at(_Q2_BASE_ANG, lv))
            return nodes, spectra, w * c

        nf, sf, wf = grid(level)
        nc, sc, wc = grid(level - 1)
    return ConeQuadrature(fp=fp, domain=domain, radius=radius,
                          nodes_fine=nf, spectra_fine=sf, weights_fine=wf,
                          nodes_coarse=nc, spectra_coarse=sc, weights_coarse=wc)


def interval_rule(fp: FieldParams, e0: float = 0.0, e1: float = 0.0,
                  level: int | None = None) -> ConeQuadrature:
    """Rule for integrals over {0 <= y <= I} weighted by det^e0 det(I-.)^e1."""
    level = level if level is not None else _DEFAULT_LEVEL[min(fp.q, 2)]
    return _make_rule(fp, e0, e1, "interval", radius=1.0, level=level)


def cone_rule(fp: FieldParams, e0: float = 0.0, radius: float = 30.0,
              level: int | None = None) -> ConeQuadrature:
    """Rule for integrals over the cone truncated at spectral radius."""
    if radius <= 0:
        raise DomainError("cone truncation radius must be positive")
    level = level if level is not None else _DEFAULT_LEVEL[min(fp.q, 2)]
    return _make_rule(fp, e0, 0.0, "cone", radius=radius, level=level)


def _weighted_sum(f, nodes, spectra, weights, chunk: int) -> float:
    total = 0.0
    for start in range(0, nodes.shape[0], chunk):
        sl = slice(start, start + chunk)
        vals = np.asarray(f(nodes[sl], spectra[sl]), dtype=float)
        total += float(np.sum(weights[sl] * vals))
    return total


def cone_integrate(f, quad: ConeQuadrature, chunk: int = 32768):
    """Integrate f over the rule; returns (value, error_estimate).

    f(nodes, spectra) consumes a chunk of nodes (m, q, q) with their ordered
    eigenvalues (m, q) and returns real values (m,).  The error estimate is
    the difference between the fine and half-resolution sums.
    """
    fine = _weighted_sum(f, quad.nodes_fine, quad.spectra_fine,
                         quad.weights_fine, chunk)
    coarse = _weighted_sum(f, quad.nodes_coarse, quad.spectra_coarse,
                           quad.weights_coarse, chunk)
    return fine, abs(fine - coarse)
