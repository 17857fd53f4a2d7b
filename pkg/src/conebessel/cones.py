"""Base-field bookkeeping and dense linear algebra on small Hermitian matrices.

Everything in this package lives on the cone of positive semidefinite q x q
matrices over one of the fields R, C, H.  The field enters all formulas only
through the Peirce dimension d (1, 2, 4), so we carry a small parameter
record instead of field-specific matrix types.  Quaternion matrices are not
represented explicitly; every quaternionic quantity must be routed through
its spectrum (d = 4 merely changes the Jack parameter alpha = 2/d).

Matrices are plain numpy arrays.  The helpers below validate Hermitian-ness,
positive semidefiniteness, compute eigenvalues with an explicit cyclic Jacobi
iteration (dimensions here are tiny, q <= 8), and evaluate the power function
built from leading principal minors.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

__all__ = [
    "DomainError",
    "IndexPoleError",
    "FieldParams",
    "field_params",
    "Spectrum",
    "herm",
    "cone_point",
    "jacobi_eigh",
    "eigvals_ordered",
    "general_eigvals",
    "psd_sqrt",
    "power_function",
    "spherical_poly_mc",
    "haar_batch",
    "herm_eigs_2x2",
    "psd_sqrt_2x2",
    "in_unit_ball",
    "chamber_sort",
]

FIELD_DIMS = {"R": 1, "C": 2, "H": 4}

HERM_TOL = 1e-12       # relative deviation allowed between a and a*
PSD_CLAMP_TOL = 1e-10  # relative eigenvalue clamp window for cone membership
JACOBI_TOL = 1e-13     # off-diagonal Frobenius target, relative to |a|_F


class DomainError(ValueError):
    """Input is outside the mathematical domain of an operation."""


class IndexPoleError(DomainError):
    """A generalized Pochhammer factor vanished, so a series coefficient has a pole."""

    def __init__(self, mu, partition):
        self.mu = mu
        self.partition = tuple(partition)
        super().__init__(
            f"index {mu} hits a pole of the coefficient at partition {self.partition}"
        )


@dataclass(frozen=True)
class FieldParams:
    """Field descriptor: rank q plus the constants every formula needs.

    d      Peirce dimension of the field (R: 1, C: 2, H: 4)
    alpha  Jack parameter 2/d
    n      real dimension of the space of q x q Hermitian matrices
    gamma  critical index d*(q - 1/2) + 1 separating the integrable
           boundary-weight range from the degenerate one
    """

    field: str
    q: int
    d: int
    alpha: float
    n: int
    gamma: float

    @property
    def alpha_exact(self) -> Fraction:
        return Fraction(2, self.d)

    @property
    def matrix_dtype(self):
        if self.field == "H":
            raise DomainError("quaternionic matrices are spectrum-only; no dense form")
        return np.complex128 if self.field == "C" else np.float64


def field_params(field: str, q: int) -> FieldParams:
    if field not in FIELD_DIMS:
        raise ValueError(f"field must be one of R, C, H, got {field!r}")
    if not isinstance(q, (int, np.integer)) or q < 1:
        raise ValueError(f"rank q must be a positive integer, got {q!r}")
    d = FIELD_DIMS[field]
    n2 = 2 * q + d * q * (q - 1)  # 2n is always an even integer
    assert n2 % 2 == 0
    n = n2 // 2
    return FieldParams(field=field, q=int(q), d=d, alpha=2.0 / d, n=n,
                       gamma=d * (q - 0.5) + 1.0)


@dataclass(frozen=True)
class Spectrum:
    """Eigenvalue tuple of a (possibly complexified) matrix argument.

    values may be real or complex; `ordered` records whether the tuple is
    sorted into the closed descending chamber.
    """

    values: tuple
    ordered: bool = False

    def __post_init__(self):
        object.__setattr__(self, "values", tuple(complex(v) if isinstance(v, complex)
                                                 else float(v) for v in self.values))

    def __len__(self):
        return len(self.values)

    def as_array(self) -> np.ndarray:
        arr = np.asarray(self.values)
        if np.iscomplexobj(arr) and np.all(np.abs(arr.imag) == 0.0):
            arr = arr.real
        return arr


def as_spectrum_array(x) -> np.ndarray:
    """Accept a Spectrum, sequence, or scalar and return a 1-d eigenvalue array."""
    if isinstance(x, Spectrum):
        return x.as_array()
    arr = np.atleast_1d(np.asarray(x))
    if arr.ndim != 1:
        raise ValueError("spectrum must be one-dimensional")
    return arr


def herm(entries, field: str = "R") -> np.ndarray:
    """Validate and symmetrize a Hermitian matrix over R or C.

    Rejects inputs whose anti-Hermitian part exceeds HERM_TOL relative to the
    matrix scale; the returned array is exactly Hermitian.
    """
    if field == "H":
        raise DomainError("quaternionic matrices are spectrum-only; pass eigenvalues")
    a = np.asarray(entries)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {a.shape}")
    if field == "R":
        if np.iscomplexobj(a):
            if np.max(np.abs(a.imag)) > HERM_TOL * max(1.0, np.max(np.abs(a))):
                raise ValueError("matrix over R must be real")
            a = a.real
        a = a.astype(np.float64, copy=True)
    else:
        a = a.astype(np.complex128, copy=True)
    scale = max(1.0, float(np.max(np.abs(a))))
    dev = np.max(np.abs(a - a.conj().T))
    if dev > HERM_TOL * scale:
        raise ValueError(f"matrix is not Hermitian: |a - a*| = {dev:.3e}")
    return (a + a.conj().T) / 2


def cone_point(entries, field: str = "R") -> np.ndarray:
    """Validate membership in the closed positive semidefinite cone.

    Eigenvalues in [-PSD_CLAMP_TOL * |a|, 0) are clamped to zero and the
    matrix is rebuilt; anything more negative raises DomainError.
    """
    a = herm(entries, field)
    w, v = jacobi_eigh(a)
    scale = max(1.0, float(np.max(np.abs(w))))
    if np.min(w) < -PSD_CLAMP_TOL * scale:
        raise DomainError(f"matrix is not positive semidefinite: min eigenvalue {np.min(w):.3e}")
    if np.min(w) < 0.0:
        w = np.clip(w, 0.0, None)
        a = (v * w) @ v.conj().T
        a = (a + a.conj().T) / 2
    return a


# ---------------------------------------------------------------------------
# eigen machinery
# ---------------------------------------------------------------------------

def _offdiag_norm(a: np.ndarray) -> float:
    mask = ~np.eye(a.shape[0], dtype=bool)
    return float(np.sqrt(np.sum(np.abs(a[mask]) ** 2)))


def jacobi_eigh(a, tol: float = JACOBI_TOL, max_sweeps: int = 60):
    """Eigendecomposition of a small Hermitian matrix by cyclic Jacobi rotations.

    Returns (w, v) with eigenvalues w sorted descending and unitary v whose
    columns are the matching eigenvectors.  Supports q <= 8; for the complex
    case each pivot is phased to a real 2 x 2 problem before rotating.
    """
    a = np.asarray(a)
    m = a.shape[0]
    if a.ndim != 2 or a.shape[1] != m:
        raise ValueError("jacobi_eigh expects a square matrix")
    if m > 8:
        raise DomainError("jacobi_eigh supports dimensions up to 8")
    cplx = np.iscomplexobj(a)
    work = a.astype(np.complex128 if cplx else np.float64, copy=True)
    work = (work + work.conj().T) / 2
    v = np.eye(m, dtype=work.dtype)
    scale = max(float(np.sqrt(np.sum(np.abs(work) ** 2))), 1e-300)

    for _ in range(max_sweeps):
        if _offdiag_norm(work) <= tol * scale:
            break
        for p in range(m - 1):
            for r in range(p + 1, m):
                apr = work[p, r]
                mag = abs(apr)
                if mag <= 1e-300:
                    continue
                phase = apr / mag if cplx else (1.0 if apr > 0 else -1.0)
                app = work[p, p].real
                arr = work[r, r].real
                tau = (arr - app) / (2.0 * mag)
                t = math.copysign(1.0, tau) / (abs(tau) + math.hypot(1.0, tau)) if tau != 0 else 1.0
                c = 1.0 / math.sqrt(1.0 + t * t)
                s = t * c
                # columns p, r of the rotation: [c, s*phase; -s*conj(phase), c]
                col_p = work[:, p] * c - work[:, r] * (s * np.conj(phase))
                col_r = work[:, p] * (s * phase) + work[:, r] * c
                work[:, p] = col_p
                work[:, r] = col_r
                row_p = work[p, :] * c - work[r, :] * (s * phase)
                row_r = work[p, :] * (s * np.conj(phase)) + work[r, :] * c
                work[p, :] = row_p
                work[r, :] = row_r
                work[p, r] = 0.0
                work[r, p] = 0.0
                vp = v[:, p] * c - v[:, r] * (s * np.conj(phase))
                vr = v[:, p] * (s * phase) + v[:, r] * c
                v[:, p] = vp
                v[:, r] = vr
    w = work.diagonal().real.copy()
    order = np.argsort(-w, kind="stable")
    return w[order], v[:, order]


def eigvals_ordered(x, field: str = "R", with_vectors: bool = False):
    """Descending spectrum of a Hermitian matrix (the chamber representative)."""
    a = herm(x, field)
    w, v = jacobi_eigh(a)
    spec = Spectrum(tuple(float(t) for t in w), ordered=True)
    if with_vectors:
        return spec, v
    return spec


def general_eigvals(a) -> np.ndarray:
    """Eigenvalues of a general (non-Hermitian) complex matrix, q <= 3.

    Uses the characteristic polynomial: coefficients come from traces and the
    determinant, roots from the companion solver.  This is the path for
    complexified arguments, where products of Hermitian matrices stop being
    Hermitian.
    """
    a = np.asarray(a, dtype=np.complex128)
    m = a.shape[0]
    if a.ndim != 2 or a.shape[1] != m:
        raise ValueError("expected a square matrix")
    if m == 1:
        return a.reshape(1).copy()
    tr = np.trace(a)
    if m == 2:
        det = a[0, 0] * a[1, 1] - a[0, 1] * a[1, 0]
        roots = np.roots([1.0, -tr, det])
        return roots
    if m == 3:
        tr2 = np.trace(a @ a)
        e2 = (tr * tr - tr2) / 2.0
        e3 = np.linalg.det(a)
        return np.roots([1.0, -tr, e2, -e3])
    raise DomainError("general eigenvalues supported only for q <= 3")


def psd_sqrt(x, field: str = "R") -> np.ndarray:
    """Unique positive semidefinite square root of a cone point."""
    a = cone_point(x, field)
    w, v = jacobi_eigh(a)
    root = (v * np.sqrt(np.clip(w, 0.0, None))) @ v.conj().T
    return (root + root.conj().T) / 2


# ---------------------------------------------------------------------------
# power function
# ---------------------------------------------------------------------------

def power_function(x, lam, field: str = "R"):
    """Product of leading principal minors raised to the part differences.

    For a partition lam = (l1 >= l2 >= ...) this is
    prod_i det(x[:i, :i]) ** (l_i - l_{i+1}),
    the natural highest-weight monomial on the cone.  For diagonal x it
    reduces to prod_i x_ii ** l_i.
    """
    a = herm(x, field)
    q = a.shape[0]
    lam = tuple(int(t) for t in lam)
    if any(l < 0 for l in lam) or any(lam[i] < lam[i + 1] for i in range(len(lam) - 1)):
        raise ValueError(f"not a partition: {lam}")
    if len(lam) > q:
        raise ValueError(f"partition length {len(lam)} exceeds matrix size {q}")
    lam = lam + (0,) * (q - len(lam))
    value = 1.0
    for i in range(q):
        e = lam[i] - (lam[i + 1] if i + 1 < q else 0)
        if e == 0:
            continue
        minor = np.linalg.det(a[: i + 1, : i + 1])
        if np.iscomplexobj(a):
            # principal minors of a Hermitian matrix are real
            minor = minor.real
        value *= float(minor) ** e
    return value


# ---------------------------------------------------------------------------
# Haar averages
# ---------------------------------------------------------------------------

def haar_batch(p: int, d: int, gen: np.random.Generator, size: int) -> np.ndarray:
    """Batch of Haar-distributed orthogonal (d=1) or unitary (d=2) p x p matrices.

    QR of a Ginibre matrix with the R-diagonal phase pushed into Q so the
    factorization is unique (diagonal of R positive).  Shape (size, p, p).
    """
    if d == 1:
        g = gen.standard_normal((size, p, p))
    elif d == 2:
        g = gen.standard_normal((size, p, p)) + 1j * gen.standard_normal((size, p, p))
        g /= math.sqrt(2.0)
    else:
        raise DomainError("Haar sampling is available over R and C only")
    qmat, rmat = np.linalg.qr(g)
    diag = np.einsum("nii->ni", rmat)
    ph = diag / np.abs(diag)
    return qmat * ph[:, None, :]


def _minor_dets_batch(mats: np.ndarray, upto: int) -> list:
    """Leading principal minors det(mats[:, :i, :i]) for i = 1..upto, batched."""
    out = []
    for i in range(1, upto + 1):
        sub = mats[:, :i, :i]
        if i == 1:
            det = sub[:, 0, 0]
        elif i == 2:
            det = sub[:, 0, 0] * sub[:, 1, 1] - sub[:, 0, 1] * sub[:, 1, 0]
        else:
            det = np.linalg.det(sub)
        out.append(det.real if np.iscomplexobj(det) else det)
    return out


def spherical_poly_mc(lam, x, fp: FieldParams, N: int, seed: int):
    """Monte Carlo value of the conjugation-average of the power function.

    Averages power_function(u x u*, lam) over Haar-random u.  Returns
    (estimate, stderr).  The estimate is exactly 1 when x is the identity
    because the integrand is constant there.
    """
    if N < 100:
        raise ValueError("spherical average needs at least 100 samples")
    if fp.field == "H":
        raise DomainError("spherical averages need a dense matrix form (R or C)")
    a = herm(x, fp.field)
    q = a.shape[0]
    lam = tuple(int(t) for t in lam) + (0,) * max(0, q - len(lam))
    if len(lam) > q:
        raise ValueError("partition longer than the matrix size")
    gen = np.random.Generator(np.random.Philox(key=np.array([seed & (2**64 - 1), 0],
                                                            dtype=np.uint64)))
    u = haar_batch(q, fp.d, gen, N)
    rot = np.einsum("nij,jk,nlk->nil", u, a, u.conj())
    minors = _minor_dets_batch(rot, q)
    vals = np.ones(N)
    for i in range(q):
        e = lam[i] - (lam[i + 1] if i + 1 < q else 0)
        if e:
            vals = vals * minors[i] ** e
    est = float(np.mean(vals))
    stderr = float(np.std(vals, ddof=1) / math.sqrt(N)) if N > 1 else 0.0
    return est, stderr


# ---------------------------------------------------------------------------
# batched 2 x 2 closed forms (hot Monte Carlo paths)
# ---------------------------------------------------------------------------

def herm_eigs_2x2(mats: np.ndarray) -> np.ndarray:
    """Descending eigenvalue pairs of a batch of Hermitian 2 x 2 matrices."""
    a = mats[..., 0, 0].real
    c = mats[..., 1, 1].real
    b2 = np.abs(mats[..., 0, 1]) ** 2
    tr = a + c
    disc = np.sqrt(np.clip((a - c) ** 2 + 4.0 * b2, 0.0, None))
    hi = (tr + disc) / 2.0
    lo = (tr - disc) / 2.0
    return np.stack([hi, lo], axis=-1)


def psd_sqrt_2x2(mats: np.ndarray) -> np.ndarray:
    """Matrix square roots of a batch of PSD 2 x 2 matrices, closed form.

    sqrt(A) = (A + sqrt(det A) I) / sqrt(tr A + 2 sqrt(det A)); the zero
    matrix maps to zero.
    """
    a = mats[..., 0, 0].real
    c = mats[..., 1, 1].real
    det = np.clip(a * c - np.abs(mats[..., 0, 1]) ** 2, 0.0, None)
    s = np.sqrt(det)
    tr = np.clip(a + c, 0.0, None)
    denom = np.sqrt(np.clip(tr + 2.0 * s, 0.0, None))
    safe = np.where(denom > 0, denom, 1.0)
    eye = np.eye(2, dtype=mats.dtype)
    out = (mats + s[..., None, None] * eye) / safe[..., None, None]
    out = np.where(denom[..., None, None] > 0, out, np.zeros_like(out))
    return out


def in_unit_ball(w: np.ndarray) -> bool:
    """Largest singular value strictly below 1."""
    w = np.asarray(w)
    gram = w.conj().T @ w if w.ndim == 2 else np.array([[np.abs(w) ** 2]])
    top = jacobi_eigh(gram)[0][0] if gram.shape[0] <= 8 else None
    return bool(top < 1.0)


def chamber_sort(xi, kind: str = "A") -> np.ndarray:
    """Map a vector to its closed-chamber representative.

    kind 'A': sort descending.  kind 'B': absolute values sorted descending
    (entries must be real); this realizes the sign-and-permutation symmetry.
    """
    arr = np.atleast_1d(np.asarray(xi, dtype=float))
    if kind == "A":
        return np.sort(arr)[::-1].copy()
    if kind == "B":
        return np.sort(np.abs(arr))[::-1].copy()
    raise ValueError("chamber kind must be 'A' or 'B'")
