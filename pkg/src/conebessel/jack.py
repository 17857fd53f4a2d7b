"""Jack polynomials in the C-normalization, partitions, and Pochhammer products.

The C-normalized Jack polynomials C_lam^alpha are the homogeneous symmetric
polynomials satisfying sum_{|lam|=k} C_lam(x) = (x_1 + ... + x_q)^k.  They
are evaluated here through the one-variable-at-a-time branching recurrence
for the monic P-normalization,

    P_lam(x_1..x_n) = sum over horizontal strips lam/mu of
                      psi(lam, mu) * P_mu(x_1..x_{n-1}) * x_n^{|lam|-|mu|},

with the branching weight psi a ratio of arm/leg hook factors, followed by
the hook-product conversion

    C_lam = alpha^{|lam|} |lam|! / cprime_lam * P_lam,
    cprime_lam = prod over boxes (alpha*(arm+1) + leg).

All combinatorial coefficients are computed in exact rational arithmetic
(alpha is carried as a Fraction so cache keys are exact) and converted to
floats only at evaluation time.  The conversion constants are not trusted
blindly: the test suite pins them against the normalization identity above,
which determines every per-partition constant once it holds at generic
points.
"""

from __future__ import annotations

import math
from fractions import Fraction
from functools import lru_cache
from itertools import permutations

import numpy as np

from .cones import IndexPoleError, as_spectrum_array

__all__ = [
    "Partition",
    "as_partition",
    "partitions_of",
    "partitions_up_to",
    "conjugate",
    "jack_C",
    "jack_at_ones",
    "zonal_Z",
    "pochhammer_gen",
    "monomial_coeffs",
    "c_normalization",
]

Partition = tuple  # non-increasing tuple of positive ints; () is the empty partition


def as_partition(parts) -> Partition:
    """Validate and canonicalize a partition (trailing zeros stripped)."""
    lam = tuple(int(t) for t in parts)
    while lam and lam[-1] == 0:
        lam = lam[:-1]
    if any(t < 0 for t in lam):
        raise ValueError(f"partition parts must be nonnegative: {parts}")
    if any(lam[i] < lam[i + 1] for i in range(len(lam) - 1)):
        raise ValueError(f"partition parts must be non-increasing: {parts}")
    return lam


def weight(lam: Partition) -> int:
    return sum(lam)


def partitions_of(n: int, max_parts: int):
    """Partitions of n into at most max_parts parts, descending lexicographic."""
    if n == 0:
        yield ()
        return
    if max_parts <= 0:
        return

    def rec(remaining, largest, slots):
        if remaining == 0:
            yield ()
            return
        if slots == 0:
            return
        for first in range(min(remaining, largest), 0, -1):
            for rest in rec(remaining - first, first, slots - 1):
                yield (first,) + rest

    yield from rec(n, n, max_parts)


def partitions_up_to(k_max: int, max_parts: int) -> list:
    """Partitions grouped by weight 0..k_max, reverse-lexicographic in each layer."""
    if k_max < 0:
        raise ValueError("k_max must be nonnegative")
    return [list(partitions_of(k, max_parts)) for k in range(k_max + 1)]


def conjugate(lam: Partition) -> Partition:
    lam = as_partition(lam)
    if not lam:
        return ()
    return tuple(sum(1 for part in lam if part >= j) for j in range(1, lam[0] + 1))


def _as_alpha(alpha) -> Fraction:
    if isinstance(alpha, Fraction):
        a = alpha
    else:
        a = Fraction(alpha)  # exact for float input
    if a <= 0:
        raise ValueError(f"Jack parameter alpha must be positive, got {alpha}")
    return a


def _arm_leg(lam: Partition, conj: Partition, i: int, j: int):
    # 1-based box (i, j) inside lam
    return lam[i - 1] - j, conj[j - 1] - i


@lru_cache(maxsize=None)
def _branching_psi(lam: Partition, mu: Partition, alpha: Fraction) -> Fraction:
    """Branching weight for the horizontal strip lam/mu.

    Product over boxes of mu lying in a row the strip meets but in no column
    the strip meets, of b_mu(s) / b_lam(s) with
    b_nu(s) = (alpha*arm + leg + 1) / (alpha*arm + leg + alpha).
    """
    lam_c = conjugate(lam)
    mu_c = conjugate(mu)
    mu_padded = mu + (0,) * (len(lam) - len(mu))
    strip_rows = {i + 1 for i in range(len(lam)) if lam[i] > mu_padded[i]}
    strip_cols = set()
    for i in range(len(lam)):
        for j in range(mu_padded[i] + 1, lam[i] + 1):
            strip_cols.add(j)

    def b(nu, nu_c, i, j):
        a, l = _arm_leg(nu, nu_c, i, j)
        return Fraction(alpha * a + l + 1) / (alpha * a + l + alpha)

    out = Fraction(1)
    for i in range(1, len(mu) + 1):
        if i not in strip_rows:
            continue
        for j in range(1, mu[i - 1] + 1):
            if j in strip_cols:
                continue
            out *= b(mu, mu_c, i, j) / b(lam, lam_c, i, j)
    return out


def _horizontal_strips(lam: Partition):
    """All mu interlacing lam (lam_1 >= mu_1 >= lam_2 >= mu_2 >= ...)."""
    if not lam:
        yield ()
        return
    bounds = [(lam[i + 1] if i + 1 < len(lam) else 0, lam[i]) for i in range(len(lam))]

    def rec(idx):
        if idx == len(bounds):
            yield ()
            return
        lo, hi = bounds[idx]
        for v in range(hi, lo - 1, -1):
            for rest in rec(idx + 1):
                yield (v,) + rest

    for mu in rec(0):
        yield as_partition(mu)


@lru_cache(maxsize=None)
def _monomial_expand(lam: Partition, nvars: int, alpha: Fraction):
    """Exponent-tuple expansion of P_lam in nvars variables (exact rationals)."""
    if len(lam) > nvars:
        return {}
    if nvars == 0:
        return {(): Fraction(1)}
    acc: dict = {}
    w = weight(lam)
    for mu in _horizontal_strips(lam):
        psi = _branching_psi(lam, mu, alpha)
        inner = _monomial_expand(mu, nvars - 1, alpha)
        e = w - weight(mu)
        for comp, coeff in inner.items():
            key = comp + (e,)
            acc[key] = acc.get(key, Fraction(0)) + psi * coeff
    return acc


@lru_cache(maxsize=None)
def _cprime(lam: Partition, alpha: Fraction) -> Fraction:
    lam_c = conjugate(lam)
    out = Fraction(1)
    for i in range(1, len(lam) + 1):
        for j in range(1, lam[i - 1] + 1):
            a, l = _arm_leg(lam, lam_c, i, j)
            out *= alpha * (a + 1) + l
    return out


@lru_cache(maxsize=None)
def c_normalization(lam: Partition, alpha: Fraction) -> Fraction:
    """Constant carrying P_lam to C_lam: alpha^|lam| * |lam|! / cprime_lam."""
    k = weight(lam)
    return alpha**k * math.factorial(k) / _cprime(lam, alpha)


@lru_cache(maxsize=None)
def monomial_coeffs(lam: Partition, nvars: int, alpha: Fraction):
    """C_lam expansion on monomial symmetric polynomials, as float coefficients.

    Returns a tuple of (mu, coeff) pairs where mu runs over the partitions
    indexing m_mu with a nonzero coefficient.  Reading the coefficient off
    the sorted exponent tuple is valid because P_lam is symmetric.
    """
    expansion = _monomial_expand(lam, nvars, alpha)
    norm = c_normalization(lam, alpha)
    out = []
    for comp, coeff in sorted(expansion.items()):
        if all(comp[i] >= comp[i + 1] for i in range(len(comp) - 1)):
            mu = as_partition(comp)
            out.append((mu, float(norm * coeff)))
    return tuple(out)


@lru_cache(maxsize=None)
def _distinct_perms(mu_padded: Partition):
    return tuple(sorted(set(permutations(mu_padded))))


def _monomial_value(mu: Partition, xi: np.ndarray):
    q = xi.shape[0]
    padded = mu + (0,) * (q - len(mu))
    total = 0.0
    for perm in _distinct_perms(padded):
        term = 1.0
        for i in range(q):
            if perm[i]:
                term = term * xi[i] ** perm[i]
        total = total + term
    return total


def jack_C(lam, alpha, xi):
    """Evaluate the C-normalized Jack polynomial at the point xi.

    xi may be real or complex; partitions longer than len(xi) give 0.
    """
    lam = as_partition(lam)
    a = _as_alpha(alpha)
    x = as_spectrum_array(xi)
    q = x.shape[0]
    if len(lam) > q:
        return 0.0
    total = 0.0
    for mu, coeff in monomial_coeffs(lam, q, a):
        total = total + coeff * _monomial_value(mu, x)
    if not np.iscomplexobj(x):
        return float(total)
    return complex(total)


def jack_at_ones(lam, alpha, q: int):
    """C_lam evaluated at the all-ones point, via the monomial expansion."""
    lam = as_partition(lam)
    a = _as_alpha(alpha)
    if len(lam) > q:
        return 0.0
    total = 0.0
    for mu, coeff in monomial_coeffs(lam, q, a):
        total += coeff * len(_distinct_perms(mu + (0,) * (q - len(mu))))
    return float(total)


def zonal_Z(lam, fp, x):
    """Spherical polynomial normalized so the degree layers sum to (tr x)^k.

    Accepts a Spectrum/eigenvalue sequence or a Hermitian matrix; the field
    enters only through alpha = 2/d.
    """
    from .cones import herm, jacobi_eigh  # local import to keep module load light

    lam = as_partition(lam)
    arr = np.asarray(x)
    if arr.ndim == 2:
        w, _ = jacobi_eigh(herm(arr, fp.field))
        vals = w
    else:
        vals = as_spectrum_array(x)
    if vals.shape[0] != fp.q:
        raise ValueError(f"expected {fp.q} eigenvalues, got {vals.shape[0]}")
    return jack_C(lam, fp.alpha_exact, vals)


def pochhammer_gen(mu, lam, alpha):
    """Generalized Pochhammer product prod_j (mu - (j-1)/alpha)_{lam_j}.

    Rising factorials; complex mu supported.  Returns exactly 0.0 when a
    factor vanishes (the caller decides whether that is a pole).
    """
    lam = as_partition(lam)
    a = _as_alpha(alpha)
    out = 1.0 + 0.0j if isinstance(mu, complex) else 1.0
    for j, part in enumerate(lam):
        base = mu - j / float(a)
        for i in range(part):
            out = out * (base + i)
    return out
