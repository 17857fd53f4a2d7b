"""Bessel functions of matrix argument and their exponential degeneration.

The central object is the one-index series

    J_mu(x) = sum over partitions lam of
              (-1)^|lam| / ((mu)_lam |lam|!) * Z_lam(x),

where Z_lam is the spherical (Jack, C-normalized, alpha = 2/d) polynomial of
the eigenvalues of x and (mu)_lam the generalized Pochhammer product.  For
q = 1 this reduces to the classical entire Bessel series
J_mu(z^2/4) = 0F1(mu; -z^2/4).

The two derived kernels

    f_s(r)   = J_mu(r s r / 4)       (s Hermitian or complexified)
    phi_s(r) = f_{s^2}(r) = J_mu(r s^2 r / 4)

are the multiplicative functions of the associated convolution structure.
The large-index degeneration is exp: J_mu(mu * y) -> exp(-tr y) at rate
O(1/mu), which `limit_rate` tabulates.  `wolf_haar_oracle` computes the Haar
integral representation of J_{p*d/2}(x* x / 4) over rectangular arguments as
an independent Monte Carlo route.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .cones import (
    DomainError,
    FieldParams,
    as_spectrum_array,
    cone_point,
    general_eigvals,
    haar_batch,
    herm,
    jacobi_eigh,
)
from .series import (
    BesselValue,
    SeriesControl,
    bessel_layer_coeffs,
    evaluate_series,
)

__all__ = [
    "bessel_J",
    "bessel_J_batch",
    "BesselBatch",
    "f_mu",
    "phi_mu",
    "olshanski_psi",
    "limit_rate",
    "RateTable",
    "wolf_haar_oracle",
]


def _index_cap(ctrl: SeriesControl, mu, q: int) -> float:
    # Large indices tame large arguments: the layer of weight k carries
    # Z_lam(x) / (mu)_lam ~ (tr x / mu)^k, so the refusal threshold scales
    # with |mu|.  At desk-scale indices this falls back to max_abs_arg.
    return ctrl.max_abs_arg * max(1.0, abs(complex(mu)) / (2.0 * q))


class BesselBatch:
    """Reusable batched evaluator for J_mu at fixed (mu, field, rank)."""

    def __init__(self, mu, fp: FieldParams, ctrl: SeriesControl | None = None):
        self.mu = mu
        self.fp = fp
        self.ctrl = ctrl or SeriesControl()
        self.coeffs = bessel_layer_coeffs(mu, fp.alpha_exact, fp.q)

    def __call__(self, spectra) -> tuple[np.ndarray, BesselValue]:
        cap = _index_cap(self.ctrl, self.mu, self.fp.q)
        return evaluate_series(self.coeffs, spectra, self.ctrl, arg_cap=cap)


def bessel_J(mu, x, fp: FieldParams, ctrl: SeriesControl | None = None) -> BesselValue:
    """Matrix-argument Bessel series at a single spectrum.

    x: Spectrum, eigenvalue sequence, or scalar (for q = 1).  The value at
    the zero spectrum is exactly 1.
    """
    ctrl = ctrl or SeriesControl()
    spec = as_spectrum_array(x)
    if spec.shape[0] != fp.q:
        raise ValueError(f"expected {fp.q} eigenvalues, got {spec.shape[0]}")
    vals, info = BesselBatch(mu, fp, ctrl)(spec[None, :])
    v = vals[0]
    if not np.iscomplexobj(vals):
        v = float(v)
    else:
        v = complex(v)
        if abs(v.imag) <= 1e-14 * max(1.0, abs(v.real)) and not np.iscomplexobj(spec):
            v = v.real
    info.value = v
    return info


def bessel_J_batch(mu, spectra, fp: FieldParams, ctrl: SeriesControl | None = None,
                   arg_cap: float | None = None):
    """J_mu on an (N, q) array of spectra; returns (values, diagnostics)."""
    ctrl = ctrl or SeriesControl()
    cap = arg_cap if arg_cap is not None else _index_cap(ctrl, mu, fp.q)
    coeffs = bessel_layer_coeffs(mu, fp.alpha_exact, fp.q)
    return evaluate_series(coeffs, spectra, ctrl, arg_cap=cap)


def _argument_spectrum(a: np.ndarray, fp: FieldParams) -> np.ndarray:
    """Eigenvalues of a small matrix that may have drifted off Hermitian."""
    dev = np.max(np.abs(a - a.conj().T)) if a.size else 0.0
    scale = max(1.0, float(np.max(np.abs(a)))) if a.size else 1.0
    if dev <= 1e-10 * scale:
        w, _ = jacobi_eigh((a + a.conj().T) / 2)
        return w
    if fp.q > 3:
        raise DomainError("non-Hermitian arguments supported only for q <= 3")
    return general_eigvals(a)


def f_mu(s, r, mu, fp: FieldParams, ctrl: SeriesControl | None = None):
    """Multiplicative kernel f_s(r) = J_mu(r s r / 4).

    r is a cone point; s may be Hermitian or a complexified (non-Hermitian)
    matrix, in which case the argument spectrum is genuinely complex and is
    obtained from the characteristic polynomial.
    """
    r = cone_point(r, fp.field)
    s = np.asarray(s, dtype=np.complex128 if np.iscomplexobj(s) else np.float64)
    if s.shape != r.shape:
        raise ValueError("s and r must have matching shapes")
    arg = r @ s @ r / 4.0
    spec = _argument_spectrum(arg, fp)
    return bessel_J(mu, spec, fp, ctrl)


def phi_mu(s, r, mu, fp: FieldParams, ctrl: SeriesControl | None = None):
    """phi_s(r) = f_{s^2}(r) = J_mu(r s^2 r / 4) for Hermitian s."""
    s = herm(s, fp.field)
    return f_mu(s @ s, r, mu, fp, ctrl)


def olshanski_psi(b, a, field: str = "R"):
    """Degenerate multiplicative function exp(-tr(a^2 b)).

    a is a cone point; b may carry complex entries (the complexified
    parameter space).  Satisfies psi(a) psi(c) = psi(sqrt(a^2 + c^2)).
    """
    a = cone_point(a, field)
    b = np.asarray(b)
    if b.shape != a.shape:
        raise ValueError("a and b must have matching shapes")
    t = np.trace(a @ a @ b)
    if np.iscomplexobj(b):
        return cmath.exp(-complex(t))
    return math.exp(-float(t.real))


@dataclass
class RateTable:
    """Error table for a limit statement, with successive ratios."""

    params: tuple
    errors: tuple
    ratios: tuple

    def strictly_decreasing(self) -> bool:
        return all(self.errors[i] > self.errors[i + 1] for i in range(len(self.errors) - 1))


def limit_rate(y, mu_values, fp: FieldParams, ctrl: SeriesControl | None = None) -> RateTable:
    """Deviation |J_mu(mu * y) - exp(-tr y)| along an ascending index list.

    The deviation decays like 1/mu; the ratio column makes the first-order
    rate visible (ratios near 2 for a doubling index list).
    """
    y = cone_point(y, fp.field)
    mu_values = tuple(float(m) for m in mu_values)
    if any(m < 2 * fp.q for m in mu_values):
        raise DomainError(f"indices must be at least 2q = {2 * fp.q} for the rate bound")
    if any(mu_values[i] >= mu_values[i + 1] for i in range(len(mu_values) - 1)):
        raise ValueError("index list must be strictly ascending")
    w, _ = jacobi_eigh(y)
    target = math.exp(-float(np.sum(w)))
    errors = []
    for m in mu_values:
        val = bessel_J(m, m * w, fp, ctrl)
        if not val.converged:
            raise ArithmeticError(f"series did not converge at index {m}: {val.advice}")
        errors.append(abs(val.value - target))
    ratios = tuple(errors[i] / errors[i + 1] for i in range(len(errors) - 1))
    return RateTable(params=mu_values, errors=tuple(errors), ratios=ratios)


def wolf_haar_oracle(x, fp: FieldParams, N: int, seed: int):
    """Haar-average route to J_{p*d/2}(x* x / 4) for rectangular p x q arguments.

    Averages exp(-i * Re tr((u s0)* x)) over Haar u with s0 the tall identity
    embedding.  Returns (estimate, stderr) with a complex estimate whose
    imaginary part should vanish by symmetry.  N >= 1000 required.
    """
    if N < 1000:
        raise ValueError("the Haar average needs at least 1000 samples")
    x = np.asarray(x, dtype=fp.matrix_dtype)
    if x.ndim != 2:
        raise ValueError("x must be a p x q matrix")
    p, q = x.shape
    if q != fp.q:
        raise ValueError(f"x must have {fp.q} columns")
    if p < q:
        raise ValueError("x must be tall: p >= q")
    gen = np.random.Generator(np.random.Philox(key=np.array([seed & (2**64 - 1), 0],
                                                            dtype=np.uint64)))
    u = haar_batch(p, fp.d, gen, N)
    # (u s0 | x) = Re tr((u s0)* x) with s0 = [I_q; 0]
    inner = np.einsum("nij,ij->n", u[:, :, :q].conj(), x).real
    vals = np.exp(-1j * inner)
    est = complex(np.mean(vals))
    var = np.var(vals.real, ddof=1) + np.var(vals.imag, ddof=1)
    stderr = math.sqrt(var / N)
    return est, stderr
