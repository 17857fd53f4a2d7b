"""Rational Dunkl-type Bessel kernels for the symmetric and hyperoctahedral
reflection groups, and their matrix-cone connections.

The two building blocks are the two-argument hypergeometric kernels

    K00(xi, eta) = sum_lam C_lam(xi) C_lam(eta) / (|lam|! C_lam(1^q))
    K01(mu; xi, eta) = sum_lam C_lam(xi) C_lam(eta) / ((mu)_lam |lam|! C_lam(1^q))

in the alpha-parametrized Jack normalization.  The type-A kernel at
multiplicity k is K00 evaluated at alpha = 1/k; the type-B kernel at
multiplicity (k1, k2) is K01 with Pochhammer index mu = k1 + (q-1) k2 + 1/2
and alpha = 1/k2, applied to the half-squared arguments.  At the geometric
multiplicities (k = d/2, and (k1, k2) matched to a cone index mu) these
kernels coincide with Haar-type averages over the compact group of the
field, which is what the Monte Carlo checks here verify.

All kernels are symmetric functions invariant under the relevant reflection
group, so argument vectors may be given in any order and (type B) any signs.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from scipy import integrate
from scipy import special as sps

from .bessel import BesselBatch, RateTable
from .cones import DomainError, chamber_sort, field_params, herm_eigs_2x2
from .measures import RngStream, haar_unitary
from .reports import VerificationReport, deviation_report, mc_sigma_report
from .series import (ADVICE_LARGE_ARGUMENT, BesselValue, SeriesControl,
                     evaluate_series, two_arg_layer_coeffs)

__all__ = [
    "ChamberVector",
    "make_chamber",
    "MultiplicityB",
    "hyp0f0",
    "hyp0f0_batch",
    "hyp0f1",
    "hyp0f1_batch",
    "dunkl_bessel_A",
    "dunkl_bessel_B",
    "verify_harish_chandra",
    "dunklchar_check",
    "b_to_a_limit",
    "verify_degenerate_product",
    "example_q2_psi",
    "example_q2_routes",
    "verify_example_q2",
]


@dataclass(frozen=True)
class ChamberVector:
    """Vector tagged with the Weyl chamber it represents.

    kind 'A' stores a nonincreasing vector; kind 'B' additionally requires
    nonnegative entries (absolute values sorted).
    """

    values: tuple
    kind: str = "A"

    def __post_init__(self):
        if self.kind not in ("A", "B"):
            raise ValueError("chamber kind must be 'A' or 'B'")
        v = self.values
        if any(v[i] < v[i + 1] for i in range(len(v) - 1)):
            raise ValueError("chamber vector entries must be nonincreasing")
        if self.kind == "B" and v and v[-1] < 0:
            raise ValueError("type-B chamber vectors are nonnegative")

    def as_array(self) -> np.ndarray:
        return np.asarray(self.values, dtype=float)


def make_chamber(xi, kind: str = "A") -> ChamberVector:
    """Canonical chamber representative of an arbitrary vector."""
    return ChamberVector(tuple(float(t) for t in chamber_sort(xi, kind)), kind)


def _vec(x) -> np.ndarray:
    if isinstance(x, ChamberVector):
        return x.as_array()
    return np.asarray(x)


@dataclass(frozen=True)
class MultiplicityB:
    """Hyperoctahedral multiplicity (k1 on the short roots, k2 > 0 on the
    long ones) for rank q."""

    k1: float
    k2: float
    q: int

    def __post_init__(self):
        if self.k1 < 0 or self.k2 <= 0:
            raise DomainError(
                f"type-B multiplicities need k1 >= 0 and k2 > 0; got "
                f"k1={self.k1}, k2={self.k2}")

    @property
    def alpha_exact(self) -> Fraction:
        return Fraction(1) / Fraction(self.k2)

    @property
    def mu(self) -> float:
        return self.k1 + (self.q - 1) * self.k2 + 0.5

    @classmethod
    def geometric(cls, mu: float, d: int, q: int) -> "MultiplicityB":
        """Multiplicity whose kernel matches the rank-q cone at index mu."""
        k1 = mu - (d * (q - 1) + 1) / 2.0
        if k1 < 0:
            raise DomainError(
                f"index mu={mu} lies below the geometric threshold "
                f"{(d * (q - 1) + 1) / 2.0:g} for d={d}, q={q}")
        return cls(k1=k1, k2=d / 2.0, q=q)


def _refusal(n: int):
    info = BesselValue(value=float("nan"), truncation_degree=0,
                       est_tail=float("inf"), converged=False,
                       advice=ADVICE_LARGE_ARGUMENT)
    return np.full(n, np.nan, dtype=complex), info


def _single(vals, info, want_real: bool):
    v = vals[0]
    if np.iscomplexobj(vals):
        v = complex(v)
        if want_real and abs(v.imag) <= 1e-12 * max(1.0, abs(v.real)):
            v = v.real
    else:
        v = float(v)
    info.value = v
    return info


def hyp0f0_batch(xis, eta, alpha, ctrl: SeriesControl | None = None):
    """Exponential-type kernel K00 on a batch of xi spectra at fixed eta."""
    ctrl = ctrl or SeriesControl()
    x = np.atleast_2d(np.asarray(xis))
    e = np.asarray(eta)
    if x.shape[1] != e.shape[0]:
        raise ValueError("xi and eta must have the same length")
    mx = float(np.max(np.abs(x))) if x.size else 0.0
    me = float(np.max(np.abs(e))) if e.size else 0.0
    if mx * me > ctrl.max_abs_arg:
        return _refusal(x.shape[0])
    coeffs = two_arg_layer_coeffs(Fraction(alpha), x.shape[1], e)
    return evaluate_series(coeffs, x, ctrl, arg_cap=math.inf)


def hyp0f0(xi, eta, alpha, ctrl: SeriesControl | None = None) -> BesselValue:
    xi_a, eta_a = _vec(xi), _vec(eta)
    vals, info = hyp0f0_batch(xi_a[None, :], eta_a, alpha, ctrl)
    want_real = not (np.iscomplexobj(xi_a) or np.iscomplexobj(eta_a))
    return _single(vals, info, want_real)


def hyp0f1_batch(mu, xis, eta, alpha, ctrl: SeriesControl | None = None):
    """Bessel-type kernel K01(mu) on a batch of xi spectra at fixed eta."""
    ctrl = ctrl or SeriesControl()
    x = np.atleast_2d(np.asarray(xis))
    e = np.asarray(eta)
    q = x.shape[1]
    if q != e.shape[0]:
        raise ValueError("xi and eta must have the same length")
    mx = float(np.max(np.abs(x))) if x.size else 0.0
    me = float(np.max(np.abs(e))) if e.size else 0.0
    cap = ctrl.max_abs_arg * max(1.0, abs(complex(mu)) / (2.0 * q))
    if mx * max(1.0, me) > cap:
        return _refusal(x.shape[0])
    coeffs = two_arg_layer_coeffs(Fraction(alpha), q, e, mu_index=mu)
    return evaluate_series(coeffs, x, ctrl, arg_cap=math.inf)


def hyp0f1(mu, xi, eta, alpha, ctrl: SeriesControl | None = None) -> BesselValue:
    xi_a, eta_a = _vec(xi), _vec(eta)
    vals, info = hyp0f1_batch(mu, xi_a[None, :], eta_a, alpha, ctrl)
    want_real = not (np.iscomplexobj(xi_a) or np.iscomplexobj(eta_a)
                     or isinstance(mu, complex))
    return _single(vals, info, want_real)


def dunkl_bessel_A(k: float, xi, eta, ctrl: SeriesControl | None = None) -> BesselValue:
    """Symmetric-group Dunkl kernel at multiplicity k > 0: K00 at alpha = 1/k."""
    if k <= 0:
        raise DomainError("type-A multiplicity must be positive")
    return hyp0f0(_vec(xi), _vec(eta), Fraction(1) / Fraction(k), ctrl)


def dunkl_bessel_B(k: MultiplicityB, xi, eta,
                   ctrl: SeriesControl | None = None) -> BesselValue:
    """Hyperoctahedral Dunkl kernel at multiplicity k on vectors of length q.

    Both arguments are squared componentwise and halved before entering the
    K01 series, so purely imaginary entries give exact real squares.
    """
    xi_a = _vec(xi)
    eta_a = _vec(eta)
    if xi_a.shape[0] != k.q or eta_a.shape[0] != k.q:
        raise ValueError(f"expected vectors of length q={k.q}")
    xi2 = xi_a.astype(complex) ** 2 / 2.0 if np.iscomplexobj(xi_a) else xi_a ** 2 / 2.0
    eta2 = eta_a.astype(complex) ** 2 / 2.0 if np.iscomplexobj(eta_a) else eta_a ** 2 / 2.0
    if np.iscomplexobj(xi2) and np.all(xi2.imag == 0.0):
        xi2 = xi2.real
    if np.iscomplexobj(eta2) and np.all(eta2.imag == 0.0):
        eta2 = eta2.real
    return hyp0f1(k.mu, xi2, eta2, k.alpha_exact, ctrl)


def _field_for_d(d: int):
    if d == 1:
        return field_params("R", 1).field
    if d == 2:
        return field_params("C", 1).field
    raise DomainError("Haar-average checks support d in {1, 2}")


def verify_harish_chandra(d: int, xi, eta, N: int, seed: int,
                          ctrl: SeriesControl | None = None) -> VerificationReport:
    """Check K00 at alpha = 2/d against its compact-group integral.

    The integrand is exp(sum_ij eta_i |u_ij|^2 xi_j) for Haar u, a real
    exponential; agreement is required within three standard errors.
    """
    started = time.perf_counter()
    xi_a = np.asarray(_vec(xi), dtype=float)
    eta_a = np.asarray(_vec(eta), dtype=float)
    q = xi_a.shape[0]
    fp = field_params(_field_for_d(d), q)
    lhs_info = hyp0f0(xi_a, eta_a, Fraction(2, d), ctrl)
    if not lhs_info.converged:
        raise ArithmeticError(f"kernel series did not converge: {lhs_info.advice}")
    lhs = float(lhs_info.value)
    gen = RngStream(seed).generator()
    u = haar_unitary(q, fp, gen, size=N)
    p = np.abs(u) ** 2
    vals = np.exp(np.einsum("i,nij,j->n", eta_a, p, xi_a))
    rhs = float(np.mean(vals))
    stderr = float(np.std(vals, ddof=1) / math.sqrt(N))
    params = {"d": d, "q": q, "xi": xi_a.tolist(), "eta": eta_a.tolist(), "N": N}
    return mc_sigma_report("harish-chandra", params, lhs, rhs, stderr,
                           seed=seed, started=started)


def dunklchar_check(mu: float, d: int, xi, eta, N: int, seed: int,
                    ctrl: SeriesControl | None = None) -> VerificationReport:
    """Check the type-B kernel at a geometric multiplicity against the cone.

    The kernel at (xi, i*eta) must equal the Haar average of the matrix
    Bessel function at spec(eta_ u xi_^2 u* eta_) / 4 for Haar u over the
    field's compact group.  Three-standard-error criterion.
    """
    started = time.perf_counter()
    xi_a = np.asarray(_vec(xi), dtype=float)
    eta_a = np.asarray(_vec(eta), dtype=float)
    q = xi_a.shape[0]
    fp = field_params(_field_for_d(d), q)
    k = MultiplicityB.geometric(mu, d, q)
    lhs_info = dunkl_bessel_B(k, xi_a, 1j * eta_a, ctrl)
    if not lhs_info.converged:
        raise ArithmeticError(f"kernel series did not converge: {lhs_info.advice}")
    lhs = float(np.real(lhs_info.value))

    gen = RngStream(seed).generator()
    u = haar_unitary(q, fp, gen, size=N)
    conj = np.einsum("nij,j,nkj->nik", u, xi_a ** 2, u.conj())
    m = 0.25 * (eta_a[:, None] * eta_a[None, :]) * conj
    m = 0.5 * (m + np.swapaxes(m, -1, -2).conj())
    if q == 1:
        spectra = m[..., 0, 0].real.reshape(-1, 1)
    elif q == 2:
        spectra = herm_eigs_2x2(m)
    else:
        spectra = np.linalg.eigvalsh(m)[..., ::-1]
    vals, info = BesselBatch(mu, fp, ctrl or SeriesControl())(spectra)
    if not info.converged:
        raise ArithmeticError(f"cone Bessel series did not converge: {info.advice}")
    vals = vals.real
    rhs = float(np.mean(vals))
    stderr = float(np.std(vals, ddof=1) / math.sqrt(N))
    params = {"mu": mu, "d": d, "q": q, "k1": k.k1, "k2": k.k2,
              "xi": xi_a.tolist(), "eta": eta_a.tolist(), "N": N}
    return mc_sigma_report("dunklchar", params, lhs, rhs, stderr,
                           seed=seed, started=started)


def b_to_a_limit(d: int, xi, b, mu_values, ctrl: SeriesControl | None = None) -> RateTable:
    """Error table for the large-index degeneration of type B into type A.

    Evaluates the type-B kernel at (2 sqrt(mu) xi, i b) for each mu and
    compares with the type-A kernel at (xi^2, -b^2); the gap should decay
    like 1/mu, checked downstream by ratio bands.
    """
    xi_a = np.asarray(_vec(xi), dtype=float)
    b_a = np.asarray(_vec(b), dtype=float)
    alpha = Fraction(2, d)
    target_info = hyp0f0(xi_a ** 2, -(b_a ** 2), alpha, ctrl)
    if not target_info.converged:
        raise ArithmeticError("limit target series did not converge")
    target = float(np.real(target_info.value))
    mu_values = [float(m) for m in mu_values]
    if sorted(mu_values) != mu_values:
        raise ValueError("mu values must be increasing")
    errors = []
    for mu in mu_values:
        val_info = hyp0f1(mu, 2.0 * mu * xi_a ** 2, -(b_a ** 2) / 2.0, alpha, ctrl)
        if not val_info.converged:
            raise ArithmeticError(f"kernel series did not converge at mu={mu}")
        errors.append(abs(float(np.real(val_info.value)) - target))
    ratios = [errors[i] / errors[i + 1] if errors[i + 1] > 0 else float("inf")
              for i in range(len(errors) - 1)]
    return RateTable(params=mu_values, errors=errors, ratios=ratios)


def verify_degenerate_product(d: int, b, xi, eta, N: int, seed: int,
                              ctrl: SeriesControl | None = None) -> VerificationReport:
    """Degenerate product formula for the exponential-type kernel.

    psi(zeta) = K00(zeta^2, -b; alpha=2/d) satisfies psi(xi) psi(eta) =
    average over Haar u of psi(spectral sqrt of xi_^2 + u eta_^2 u*).
    Three-standard-error criterion.
    """
    started = time.perf_counter()
    xi_a = np.asarray(_vec(xi), dtype=float)
    eta_a = np.asarray(_vec(eta), dtype=float)
    b_a = np.asarray(_vec(b), dtype=float)
    q = xi_a.shape[0]
    fp = field_params(_field_for_d(d), q)
    alpha = Fraction(2, d)
    ctrl = ctrl or SeriesControl()

    def psi_single(z2):
        info = hyp0f0(z2, -b_a, alpha, ctrl)
        if not info.converged:
            raise ArithmeticError("kernel series did not converge")
        return float(np.real(info.value))

    lhs = psi_single(xi_a ** 2) * psi_single(eta_a ** 2)
    gen = RngStream(seed).generator()
    u = haar_unitary(q, fp, gen, size=N)
    m = np.einsum("nij,j,nkj->nik", u, eta_a ** 2, u.conj())
    m = m + np.diag(xi_a ** 2).astype(m.dtype)
    m = 0.5 * (m + np.swapaxes(m, -1, -2).conj())
    if q == 1:
        spectra = m[..., 0, 0].real.reshape(-1, 1)
    elif q == 2:
        spectra = herm_eigs_2x2(m)
    else:
        spectra = np.linalg.eigvalsh(m)[..., ::-1]
    vals, info = hyp0f0_batch(spectra, -b_a, alpha, ctrl)
    if not info.converged:
        raise ArithmeticError("kernel series did not converge in the average")
    vals = vals.real
    rhs = float(np.mean(vals))
    stderr = float(np.std(vals, ddof=1) / math.sqrt(N))
    params = {"d": d, "q": q, "b": b_a.tolist(), "xi": xi_a.tolist(),
              "eta": eta_a.tolist(), "N": N}
    return mc_sigma_report("degenerate-product", params, lhs, rhs, stderr,
                           seed=seed, started=started)


# ----- the explicit rank-2 real example ------------------------------------

_EXAMPLE_CTRL = SeriesControl(k_max=48, rel_tol=1e-13, quiet_layers=2,
                              max_abs_arg=30.0)


def example_q2_psi(xi) -> float:
    """Angular-integral route for the rank-2 real degenerate kernel.

    For b = (i, -i) the orbit average of exp(-tr(u xi_^2 u* b_)) collapses
    to (1/2pi) * integral of cos((xi1^2 - xi2^2) cos 2t) dt, a classical
    Bessel integral.  Requires xi1 >= xi2 >= 0.
    """
    xi_a = np.asarray(_vec(xi), dtype=float)
    if xi_a.shape != (2,):
        raise DomainError("the explicit example lives at rank 2")
    if not (xi_a[0] >= xi_a[1] >= 0.0):
        raise DomainError("expected a type-B chamber vector: xi1 >= xi2 >= 0")
    c = xi_a[0] ** 2 - xi_a[1] ** 2

    val, _ = integrate.quad(lambda t: math.cos(c * math.cos(2.0 * t)),
                            -math.pi, math.pi, epsabs=1e-12, epsrel=1e-12,
                            limit=200)
    return val / (2.0 * math.pi)


def example_q2_routes(xi, ctrl: SeriesControl | None = None) -> dict:
    """Three independent evaluations of the rank-2 example.

    quadrature: the angular integral; series: K00(xi^2, (-i, i); alpha=2);
    classical: scipy's J0 at xi1^2 - xi2^2.
    """
    ctrl = ctrl or _EXAMPLE_CTRL
    xi_a = np.asarray(_vec(xi), dtype=float)
    c = xi_a[0] ** 2 - xi_a[1] ** 2
    series_info = hyp0f0(xi_a ** 2, np.array([-1j, 1j]), Fraction(2), ctrl)
    if not series_info.converged:
        raise ArithmeticError("example kernel series did not converge")
    sv = complex(series_info.value)
    if abs(sv.imag) > 1e-10 * max(1.0, abs(sv.real)):
        raise ArithmeticError(f"example series unexpectedly complex: {sv}")
    return {
        "quadrature": example_q2_psi(xi_a),
        "series": sv.real,
        "classical": float(sps.j0(c)),
    }


def verify_example_q2(ctrl: SeriesControl | None = None,
                      grid=None) -> VerificationReport:
    """All three routes must agree on a grid of chamber points to 1e-8."""
    started = time.perf_counter()
    if grid is None:
        grid = []
        for j in range(10):
            s = 0.25 + 0.04 * j
            c = 0.35 * j
            grid.append((math.sqrt(c + s), math.sqrt(s)))
    worst = 0.0
    rows = []
    for xi in grid:
        routes = example_q2_routes(np.asarray(xi), ctrl)
        vals = [routes["quadrature"], routes["series"], routes["classical"]]
        dev = max(abs(a - b) for a in vals for b in vals)
        worst = max(worst, dev)
        rows.append({"xi": [float(t) for t in xi], "deviation": dev})
    params = {"grid_size": len(grid), "criterion": "max-route-deviation"}
    return deviation_report("example-q2", params, worst, tolerance=1e-8,
                            seed=0, started=started, extras={"grid": rows})
