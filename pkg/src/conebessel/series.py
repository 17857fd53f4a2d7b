"""Layer-by-layer evaluation of partition series built from Jack polynomials.

A partition series here is sum over partitions lam of coef(lam) * C_lam(xi).
All the hypergeometric-type functions in this package (matrix Bessel, the
0F0 and 0F1 two-argument kernels) are of this form with different coef maps,
so they share one engine.

The engine works degree layer by degree layer.  Within the layer of weight k
the Jack expansion collapses onto monomial symmetric polynomials,

    sum_{|lam|=k} coef(lam) C_lam(xi) = sum_{|mu|=k} v_mu m_mu(xi),
    v_mu = sum_lam coef(lam) * norm_lam * u_{lam,mu},

which makes evaluation over a whole batch of spectra a handful of vector
operations per layer.  Accumulation is compensated (Kahan); truncation stops
after `quiet_layers` consecutive layers fall below rel_tol relative to the
running value.  A refusal guard rejects arguments so large that the
alternating layers would cancel past double precision, and a dynamic monitor
flags evaluations whose intermediate layers dwarf the final value.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .jack import (
    as_partition,
    c_normalization,
    jack_at_ones,
    monomial_coeffs,
    partitions_of,
    pochhammer_gen,
    weight,
)

__all__ = [
    "SeriesControl",
    "BesselValue",
    "evaluate_series",
    "bessel_layer_coeffs",
    "two_arg_layer_coeffs",
    "scalar_0f1",
]

ADVICE_LARGE_ARGUMENT = "argument too large for the series; no stable evaluation path"
ADVICE_NO_CONVERGENCE = "series did not satisfy the quiet-layer criterion before k_max"
ADVICE_CANCELLATION = "intermediate layers exceed the result by more than 1e13; digits lost"

AMPLIFICATION_LIMIT = 1e13


@dataclass(frozen=True)
class SeriesControl:
    """Truncation policy for partition series.

    k_max        hard cap on the total degree
    rel_tol      layer magnitude threshold relative to the running value
    quiet_layers consecutive sub-threshold layers required to stop
    max_abs_arg  refusal threshold on max |xi_i| (scaled by the index for
                 Bessel-type series, where large indices tame large
                 arguments); integration back ends that control their own
                 weights may raise it deliberately
    """

    k_max: int = 30
    rel_tol: float = 1e-12
    quiet_layers: int = 2
    max_abs_arg: float = 25.0


@dataclass
class BesselValue:
    """Series value with truncation diagnostics."""

    value: complex
    truncation_degree: int
    est_tail: float
    converged: bool
    advice: str | None = None


@lru_cache(maxsize=None)
def _layer_partitions(q: int, k: int):
    return tuple(partitions_of(k, q))


@lru_cache(maxsize=None)
def _perms_for(q: int, mu):
    """Distinct permutations of mu padded to q slots, as an exponent array."""
    from .jack import _distinct_perms  # shared cache

    padded = mu + (0,) * (q - len(mu))
    return np.array(_distinct_perms(padded), dtype=np.int64)


class LayerCoeffs:
    """Collapsed per-layer monomial weights v_mu for a fixed coefficient map.

    coef_fn(lam) -> complex scalar (may raise for poles).  Results are cached
    per layer so chunked batch evaluations pay the combinatorial cost once.
    """

    def __init__(self, coef_fn, alpha: Fraction, q: int):
        self.coef_fn = coef_fn
        self.alpha = alpha
        self.q = q
        self._layers: dict = {}

    def layer(self, k: int):
        if k in self._layers:
            return self._layers[k]
        acc: dict = {}
        any_complex = False
        for lam in _layer_partitions(self.q, k):
            c = self.coef_fn(lam)
            if c == 0:
                continue
            if isinstance(c, complex) and c.imag != 0.0:
                any_complex = True
            for mu, u in monomial_coeffs(lam, self.q, self.alpha):
                acc[mu] = acc.get(mu, 0.0) + c * u
        entries = tuple(sorted(acc.items()))
        self._layers[k] = (entries, any_complex)
        return self._layers[k]


def bessel_layer_coeffs(mu_index, alpha: Fraction, q: int) -> LayerCoeffs:
    """Coefficients (-1)^|lam| / ((mu)_lam |lam|!) of the matrix Bessel series."""

    def coef(lam):
        poch = pochhammer_gen(mu_index, lam, alpha)
        if poch == 0:
            from .cones import IndexPoleError

            raise IndexPoleError(mu_index, lam)
        return (-1.0) ** weight(lam) / (poch * math.factorial(weight(lam)))

    return LayerCoeffs(coef, alpha, q)


def two_arg_layer_coeffs(alpha: Fraction, q: int, eta, mu_index=None) -> LayerCoeffs:
    """Coefficients C_lam(eta) / (|lam|! C_lam(1^q)) with an optional Pochhammer
    denominator (mu_index) for the 0F1-type kernel; without it, 0F0."""
    from .jack import jack_C

    eta_arr = np.asarray(eta)

    def coef(lam):
        ones = jack_at_ones(lam, alpha, q)
        if ones == 0.0:
            return 0.0
        num = jack_C(lam, alpha, eta_arr)
        den = math.factorial(weight(lam)) * ones
        if mu_index is not None:
            poch = pochhammer_gen(mu_index, lam, alpha)
            if poch == 0:
                from .cones import IndexPoleError

                raise IndexPoleError(mu_index, lam)
            den = den * poch
        return num / den

    return LayerCoeffs(coef, alpha, q)


def _monomial_batch(perms: np.ndarray, pows: list) -> np.ndarray:
    """m_mu over the batch from precomputed power tables, summing the distinct
    permutations of the exponent tuple."""
    total = None
    q = perms.shape[1]
    for row in perms:
        term = pows[0][row[0]]
        for i in range(1, q):
            e = row[i]
            if e:
                term = term * pows[i][e]
        total = term if total is None else total + term
    return total


def evaluate_series(coeffs: LayerCoeffs, spectra, ctrl: SeriesControl,
                    arg_cap: float | None = None):
    """Evaluate the partition series on a batch of spectra.

    spectra: array (N, q) of eigenvalue tuples, real or complex.
    Returns (values (N,), info) where info is a BesselValue whose `value`
    field is unused for batches (diagnostics are batch-aggregated: the
    truncation degree, the largest last-layer magnitude, a collective
    convergence flag).
    """
    x = np.atleast_2d(np.asarray(spectra))
    n, q = x.shape
    if q != coeffs.q:
        raise ValueError(f"spectra have {q} entries, coefficient table expects {coeffs.q}")
    cap = ctrl.max_abs_arg if arg_cap is None else arg_cap
    maxabs = float(np.max(np.abs(x))) if x.size else 0.0
    if maxabs > cap:
        bad = BesselValue(value=float("nan"), truncation_degree=0, est_tail=float("inf"),
                          converged=False, advice=ADVICE_LARGE_ARGUMENT)
        return np.full(n, np.nan, dtype=complex), bad

    cplx = np.iscomplexobj(x)
    dtype = np.complex128 if cplx else np.float64
    xw = x.astype(dtype)
    total = np.zeros(n, dtype=dtype)
    comp = np.zeros(n, dtype=dtype)
    pows = [[np.ones(n, dtype=dtype)] for _ in range(q)]

    peak = 0.0
    quiet = 0
    k_stop = 0
    last_mag = 0.0
    converged = False
    advice = None

    for k in range(ctrl.k_max + 1):
        if k > 0:
            for i in range(q):
                pows[i].append(pows[i][-1] * xw[:, i])
        entries, layer_cplx = coeffs.layer(k)
        if layer_cplx and not np.iscomplexobj(total):
            total = total.astype(np.complex128)
            comp = comp.astype(np.complex128)
        layer = np.zeros(n, dtype=total.dtype)
        for mu, v in entries:
            layer = layer + v * _monomial_batch(_perms_for(q, mu), pows)
        # Kahan step
        y = layer - comp
        t = total + y
        comp = (t - total) - y
        total = t

        mags = np.abs(layer)
        last_mag = float(np.max(mags)) if n else 0.0
        peak = max(peak, last_mag)
        k_stop = k
        scale = np.maximum(np.abs(total), 1e-30)
        if np.all(mags <= ctrl.rel_tol * scale):
            quiet += 1
            if quiet >= ctrl.quiet_layers:
                converged = True
                break
        else:
            quiet = 0

    final_scale = float(np.max(np.abs(total))) if n else 0.0
    if converged and peak > AMPLIFICATION_LIMIT * max(final_scale, 1e-300):
        converged = False
        advice = ADVICE_CANCELLATION
    if not converged and advice is None:
        advice = ADVICE_NO_CONVERGENCE

    info = BesselValue(value=complex(total[0]) if n else 0.0,
                       truncation_degree=k_stop,
                       est_tail=last_mag,
                       converged=converged,
                       advice=None if converged else advice)
    if not cplx and not np.iscomplexobj(total):
        return total, info
    return total, info


def scalar_0f1(c, z, k_max: int = 200, rel_tol: float = 1e-15):
    """One-variable 0F1(c; z) by direct series; independent of the Jack path."""
    term = 1.0 + 0.0j if isinstance(z, complex) or isinstance(c, complex) else 1.0
    total = term
    for k in range(1, k_max + 1):
        term = term * z / ((c + k - 1) * k)
        total += term
        if abs(term) <= rel_tol * max(abs(total), 1e-300):
            break
    return total
