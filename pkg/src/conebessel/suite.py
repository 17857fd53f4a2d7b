"""The acceptance battery: every verification identity at desk scale.

Each identity has a registry entry with a behavioral description and a
runner producing one report per configured case.  The registry drives both
the ``suite`` command (all identities, acceptance-scale parameters) and
``verify --identity`` (one identity, flag-overridable).  Sample counts obey
the quick mode uniformly: a tenth of the full budget, floored so stochastic
checks keep enough resolution to be meaningful.

Seeds: the suite derives one seed per case from the base seed so identities
never share a stream; single-identity runs use the base seed directly.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

import numpy as np
from scipy import special as sps

from .bessel import bessel_J, limit_rate, olshanski_psi, wolf_haar_oracle
from .cones import FieldParams, field_params, jacobi_eigh, psd_sqrt
from .convolution import verify_multiplicativity, verify_product_formula
from .dunkl import (b_to_a_limit, dunklchar_check, verify_example_q2,
                    verify_harish_chandra)
from .jack import jack_C, partitions_of
from .laplace import (verify_addition, verify_laplace, verify_laplace_mod,
                      verify_polar_route, verify_sonine, verify_sonine_phi)
from .measures import RngStream, verify_beta_projection
from .reports import (SuiteSummary, VerificationReport, deviation_report,
                      make_report)

__all__ = [
    "SuiteConfig",
    "IdentityEntry",
    "REGISTRY",
    "cli_identities",
    "run_identity",
    "run_suite",
    "wolf_haar_report",
    "limit_exp_report",
    "limit_btoa_report",
    "polar_route_report",
]


# --- shared acceptance-scale inputs ----------------------------------------
# Cone points for the rank-2 cases.  Real pairs are symmetric PSD; complex
# pairs are Hermitian PSD.  Laplace-type weights keep the smallest eigenvalue
# of y at 1 or above so the quadrature window stays well inside the stable
# range of the series evaluator.

R2 = np.array([[0.9, 0.2], [0.2, 0.7]])
S2 = np.array([[0.6, -0.1], [-0.1, 0.8]])
T2 = np.array([[0.5, 0.1], [0.1, 0.4]])
RC = np.array([[0.8, 0.2 + 0.1j], [0.2 - 0.1j, 0.6]])
SC = np.array([[0.7, -0.1 + 0.2j], [-0.1 - 0.2j, 0.9]])
TC = np.array([[0.5, 0.1 - 0.1j], [0.1 + 0.1j, 0.4]])

Y2 = np.array([[2.0, 0.3], [0.3, 1.6]])
M2 = np.array([[0.8, 0.2], [0.2, 0.6]])
M1B = np.array([[0.7, -0.1], [-0.1, 0.5]])
M2B = np.array([[0.4, 0.1], [0.1, 0.6]])
X2 = np.array([[0.9, 0.2], [0.2, 1.1]])
MS2 = np.array([[1.6, 0.4], [0.4, 1.2]])
SPHI2 = np.array([[1.2, 0.3], [0.3, 0.8]])
X_WOLF = np.array([[0.9, 0.3], [-0.4, 0.8], [0.5, -0.2], [0.1, 0.6]])

N_PRODUCT = 1_000_000
N_HAAR = 100_000
N_POLAR = 400_000
N_BETA = 200_000

# The rank-2 complex product formula needs an index strictly above the
# bound d(q - 1/2) = 3; the smallest convenient interior value is 4.
MU_Q2 = {1: 3.0, 2: 4.0}


@dataclass(frozen=True)
class SuiteConfig:
    """Run-wide knobs: base seed and the quick-mode sample reduction."""

    seed: int = 0
    quick: bool = False

    def draws(self, full: int) -> int:
        if not self.quick:
            return full
        return max(2000, full // 10)

    def case_seed(self, offset: int) -> int:
        return self.seed * 1000 + offset


@dataclass(frozen=True)
class IdentityEntry:
    name: str
    summary: str
    runner: Callable[[SuiteConfig], list]
    cli: bool = True


def _fp(field: str, q: int) -> FieldParams:
    return field_params(field, q)


# --- polynomial-layer identities -------------------------------------------

def run_jack_normalization(cfg: SuiteConfig) -> list:
    """Degree layers of the C-normalized polynomials sum to (tr)^k."""
    started = time.perf_counter()
    gen = RngStream(cfg.seed, stream=901).generator()
    worst = 0.0
    checks = 0
    for alpha in (Fraction(2), Fraction(1), Fraction(1, 2)):
        for q in (1, 2, 3):
            xis = gen.uniform(-1.0, 1.0, size=(20, q))
            for k in range(1, 9):
                parts = list(partitions_of(k, q))
                for xi in xis:
                    total = sum(jack_C(lam, alpha, xi) for lam in parts)
                    target = float(np.sum(xi)) ** k
                    guard = max(abs(target), 1e-3 * float(np.sum(np.abs(xi))) ** k)
                    worst = max(worst, abs(total - target) / guard)
                    checks += 1
    params = {"alphas": [2.0, 1.0, 0.5], "ranks": [1, 2, 3], "max_degree": 8,
              "points_per_rank": 20, "checks": checks}
    return [deviation_report("jack-normalization", params, worst,
                             tolerance=1e-9, seed=cfg.seed, started=started)]


def run_scalar_reduction(cfg: SuiteConfig) -> list:
    """Rank-one series equals the classical normalized Bessel function."""
    started = time.perf_counter()
    fp = _fp("R", 1)
    zs = np.linspace(0.0, 4.0, 17)
    worst = 0.0
    for mu in (0.8, 1.0, 2.5, 5.0):
        for z in zs:
            info = bessel_J(mu, [z * z / 4.0], fp)
            if not info.converged:
                raise ArithmeticError(f"series refused at mu={mu}, z={z}")
            ref = float(sps.hyp0f1(mu, -z * z / 4.0))
            worst = max(worst, abs(info.value - ref))
    params = {"indices": [0.8, 1.0, 2.5, 5.0], "z_grid": "0..4, 17 points",
              "comparison": "absolute"}
    return [deviation_report("scalar-reduction", params, worst,
                             tolerance=1e-10, seed=cfg.seed, started=started)]


def run_psi_functional(cfg: SuiteConfig) -> list:
    """Degenerate kernels turn orbit sums into products, exactly."""
    started = time.perf_counter()
    gen = RngStream(cfg.seed, stream=915).generator()
    worst = 0.0
    for trial in range(50):
        q = 2 if trial % 2 == 0 else 3
        g1 = gen.normal(size=(q, q))
        g2 = gen.normal(size=(q, q))
        a = 0.3 * (g1 @ g1.T)
        c = 0.3 * (g2 @ g2.T)
        h = gen.normal(size=(q, q))
        b = 0.4 * (h + h.T)
        if trial % 3 == 0:
            h2 = gen.normal(size=(q, q))
            b = b + 0.4j * (h2 + h2.T)
        lhs = olshanski_psi(b, a) * olshanski_psi(b, c)
        rhs = olshanski_psi(b, psd_sqrt(a @ a + c @ c))
        worst = max(worst, abs(lhs - rhs) / max(abs(lhs), abs(rhs), 1.0))
    params = {"triples": 50, "ranks": [2, 3], "parameter": "real and complex"}
    return [deviation_report("psi-functional", params, worst,
                             tolerance=1e-12, seed=cfg.seed, started=started)]


# --- hypergroup Monte Carlo -------------------------------------------------

def _product_cases():
    return (
        ("R", 1, 2.0, np.array([[0.8]]), np.array([[0.6]]), np.array([[0.5]])),
        ("R", 1, 3.5, np.array([[1.2]]), np.array([[0.5]]), np.array([[0.9]])),
        ("R", 2, MU_Q2[1], R2, S2, T2),
        ("C", 2, MU_Q2[2], RC, SC, TC),
    )


def run_product_formula(cfg: SuiteConfig) -> list:
    n = cfg.draws(N_PRODUCT)
    out = []
    for i, (field, q, mu, r, s, _t) in enumerate(_product_cases()):
        rep = verify_product_formula(mu, r, s, _fp(field, q), n,
                                     cfg.case_seed(300 + i))
        out.append(rep)
    return out


def run_multiplicativity(cfg: SuiteConfig) -> list:
    n = cfg.draws(N_PRODUCT)
    out = []
    for i, (field, q, mu, r, s, t) in enumerate(_product_cases()):
        rep = verify_multiplicativity(s, r, t, mu, _fp(field, q), n,
                                      cfg.case_seed(310 + i))
        out.append(rep)
    return out


def wolf_haar_report(x, fp: FieldParams, N: int, seed: int) -> VerificationReport:
    """Compact-group average of a plane wave against the direct kernel value."""
    started = time.perf_counter()
    x = np.asarray(x)
    p = x.shape[0]
    est, stderr = wolf_haar_oracle(x, fp, N, seed)
    w, _ = jacobi_eigh(x.conj().T @ x)
    target = bessel_J(p * fp.d / 2.0, w / 4.0, fp)
    if not target.converged:
        raise ArithmeticError(f"series refused: {target.advice}")
    params = {"p": p, "q": fp.q, "field": fp.field, "N": N,
              "criterion": "3-sigma"}
    tol = 3.0 * stderr / max(abs(target.value), abs(est), 1e-300)
    return make_report("wolf-haar", params, target.value, est, tol,
                       mc_stderr=stderr, seed=seed, started=started)


def run_wolf_haar(cfg: SuiteConfig) -> list:
    return [wolf_haar_report(X_WOLF, _fp("R", 2), cfg.draws(N_HAAR),
                             cfg.case_seed(320))]


def run_harish_chandra(cfg: SuiteConfig) -> list:
    n = cfg.draws(N_HAAR)
    return [verify_harish_chandra(d, (0.5, 0.2), (0.4, -0.3), n,
                                  cfg.case_seed(330 + d))
            for d in (1, 2)]


def run_dunklchar(cfg: SuiteConfig) -> list:
    n = cfg.draws(N_HAAR)
    return [dunklchar_check(3.0, d, (0.8, 0.4), (0.9, 0.3), n,
                            cfg.case_seed(340 + d))
            for d in (1, 2)]


# --- limit-rate identities --------------------------------------------------

def _rate_deviation(table) -> tuple[float, dict]:
    devs = [0.0]
    errs = table.errors
    for i in range(len(errs) - 1):
        if errs[i + 1] >= errs[i]:
            devs.append(max(errs[i + 1] - errs[i], 1e-15))
    for r in table.ratios:
        devs.append(max(0.0, 1.6 - r))
        devs.append(max(0.0, r - 2.4))
    detail = {"indices": list(table.params),
              "errors": [float(e) for e in errs],
              "ratios": [float(r) for r in table.ratios],
              "band": [1.6, 2.4],
              "strictly_decreasing": table.strictly_decreasing()}
    return max(devs), detail


def limit_exp_report(y, mu_values, fp: FieldParams,
                     seed: int = 0) -> VerificationReport:
    started = time.perf_counter()
    table = limit_rate(y, mu_values, fp)
    deviation, detail = _rate_deviation(table)
    detail.update({"q": fp.q, "field": fp.field,
                   "y_spectrum": [float(v) for v in np.diag(np.atleast_2d(y))]})
    return deviation_report("limit-exp", detail, deviation, tolerance=0.0,
                            seed=seed, started=started)


def run_limit_exp(cfg: SuiteConfig) -> list:
    return [limit_exp_report(np.diag([0.5, 1.0]), (8, 16, 32, 64),
                             _fp("R", 2), seed=cfg.seed)]


def limit_btoa_report(d: int, xi, b, mu_values,
                      seed: int = 0) -> VerificationReport:
    started = time.perf_counter()
    table = b_to_a_limit(d, xi, b, mu_values)
    deviation, detail = _rate_deviation(table)
    detail.update({"q": len(tuple(xi)), "d": d,
                   "xi": [float(v) for v in xi], "b": [float(v) for v in b]})
    return deviation_report("limit-BtoA", detail, deviation, tolerance=0.0,
                            seed=seed, started=started)


def run_limit_btoa(cfg: SuiteConfig) -> list:
    return [limit_btoa_report(1, (0.6, 0.3), (0.8, 0.4), (32, 64, 128),
                              seed=cfg.seed)]


# --- Laplace / beta-integral identities -------------------------------------

def run_laplace(cfg: SuiteConfig) -> list:
    return [verify_laplace(2.5, np.array([[2.0]]), _fp("R", 1)),
            verify_laplace(3.0, Y2, _fp("R", 2))]


def run_laplace_mod(cfg: SuiteConfig) -> list:
    return [verify_laplace_mod(2.5, np.array([[0.8]]), np.array([[2.0]]),
                               _fp("R", 1)),
            verify_laplace_mod(3.0, M2, Y2, _fp("R", 2))]


def run_addition(cfg: SuiteConfig) -> list:
    return [verify_addition(2.2, 2.0, np.array([[0.7]]), np.array([[0.4]]),
                            np.array([[0.9]]), _fp("R", 1)),
            verify_addition(2.2, 2.0, M1B, M2B, X2, _fp("R", 2))]


def run_sonine(cfg: SuiteConfig) -> list:
    return [verify_sonine(2.5, 2.0, np.array([[1.6]]), _fp("R", 1)),
            verify_sonine(2.5, 2.0, MS2, _fp("R", 2))]


def run_sonine_phi(cfg: SuiteConfig) -> list:
    return [verify_sonine_phi(2.5, 2.0, np.array([[1.1]]), np.array([[0.9]]),
                              _fp("R", 1)),
            verify_sonine_phi(2.5, 2.0, SPHI2, X2, _fp("R", 2))]


def polar_route_report(ptilde: int, p: int, lam, x, fp: FieldParams, N: int,
                       seed: int, tol: float = 1e-2) -> VerificationReport:
    """Rank-reduction Monte Carlo against the quadrature mixture route.

    The same high-index value is computed two ways: expectation over
    projected matrix-beta draws, and the beta-weighted index mixture by
    quadrature.  Their agreement witnesses the projection invariance of the
    beta family; the direct series value rides along in the extras.
    """
    started = time.perf_counter()
    polar = verify_polar_route(ptilde, p, lam, x, fp, N, seed, tol=tol)
    mixture = verify_sonine_phi(ptilde * fp.d / 2.0, (p - ptilde) * fp.d / 2.0,
                                lam, x, fp)
    params = {"ptilde": ptilde, "p": p, "q": fp.q, "field": fp.field, "N": N,
              "routes": "projected-beta MC vs quadrature mixture"}
    extras = {"direct_series": polar.lhs, "mc_route": polar.rhs,
              "mixture_route": mixture.rhs,
              "mc_vs_direct_rel": polar.rel_err,
              "mixture_vs_direct_rel": mixture.rel_err}
    return make_report("polar-route", params, mixture.rhs, polar.rhs,
                       tolerance=tol, mc_stderr=polar.mc_stderr, seed=seed,
                       started=started, extras=extras)


def run_polar_route(cfg: SuiteConfig) -> list:
    return [polar_route_report(2, 6, np.array([[1.0]]), np.array([[1.3]]),
                               _fp("R", 1), cfg.draws(N_POLAR),
                               cfg.case_seed(350))]


def run_beta_projection(cfg: SuiteConfig) -> list:
    n = cfg.draws(N_BETA)
    out = []
    for d, field in ((1, "R"), (2, "C")):
        out.append(verify_beta_projection(2, _fp(field, 2), 5, 4, n,
                                          cfg.case_seed(360 + d)))
    return out


def run_example_q2(cfg: SuiteConfig) -> list:
    return [verify_example_q2()]


# --- registry ---------------------------------------------------------------

REGISTRY: dict[str, IdentityEntry] = {}


def _register(name: str, summary: str, runner, cli: bool = True) -> None:
    REGISTRY[name] = IdentityEntry(name, summary, runner, cli)


_register("product-formula",
          "kernel value at two orbits equals the weighted ball average over "
          "their convolution", run_product_formula)
_register("multiplicativity",
          "f_s(r) f_s(t) equals the convolution average of f_s, making f_s "
          "multiplicative for the hypergroup", run_multiplicativity)
_register("wolf-haar",
          "compact-group average of a plane-wave equals the kernel at the "
          "squared rectangular argument", run_wolf_haar)
_register("harish-chandra",
          "two-argument series at alpha = 2/d equals the compact-group "
          "integral of an exponential", run_harish_chandra)
_register("dunklchar",
          "type-B kernel at imaginary second argument equals a compact-group "
          "average of the cone kernel", run_dunklchar)
_register("limit-exp",
          "kernel at scaled argument tends to exp(-tr) with first-order "
          "rate in the index", run_limit_exp)
_register("limit-BtoA",
          "type-B kernel at scaled argument tends to the type-A kernel with "
          "first-order rate", run_limit_btoa)
_register("laplace",
          "weighted cone integral of the kernel matches its closed-form "
          "transform", run_laplace)
_register("laplace-mod",
          "cone integral with spectrally modulated kernel matches the "
          "shifted closed form", run_laplace_mod)
_register("addition",
          "kernel of a sum splits into an interval average of two kernels "
          "with beta weights", run_addition)
_register("sonine",
          "index-raising: the higher-index kernel is a beta average of the "
          "lower-index one", run_sonine)
_register("sonine-phi",
          "scaled-kernel version of index raising with the mixing measure "
          "attached", run_sonine_phi)
_register("polar-route",
          "rank-reduction route via projected beta draws agrees with the "
          "quadrature mixture route", run_polar_route)
_register("beta-projection",
          "leading-block projection of a rank-2 beta sample passes KS "
          "against the scalar beta law", run_beta_projection)
_register("example-q2",
          "explicit rank-2 kernel: quadrature, series, and classical-Bessel "
          "routes coincide", run_example_q2)
_register("jack-normalization",
          "degree layers of the C-normalized polynomials sum to powers of "
          "the trace", run_jack_normalization, cli=False)
_register("scalar-reduction",
          "rank-one kernel equals the classical normalized Bessel function",
          run_scalar_reduction, cli=False)
_register("psi-functional",
          "degenerate kernels satisfy their exact functional equation",
          run_psi_functional, cli=False)


def cli_identities() -> list[str]:
    return [name for name, entry in REGISTRY.items() if entry.cli]


def run_identity(name: str, cfg: SuiteConfig) -> list[VerificationReport]:
    if name not in REGISTRY:
        raise KeyError(f"unknown identity {name!r}")
    return REGISTRY[name].runner(cfg)


def run_suite(cfg: SuiteConfig) -> SuiteSummary:
    reports: list[VerificationReport] = []
    for entry in REGISTRY.values():
        reports.extend(entry.runner(cfg))
    return SuiteSummary(reports=reports)
