"""Command-line front end: evaluate, verify, sample, and run the suite.

Exit codes: 0 success (all checks passed), 1 verification failure, 2 usage
error, 3 domain error (inputs outside the mathematically supported range or
a refused series evaluation).

Determinism: the seed comes from --seed, else the CONEBESSEL_SEED
environment variable, else 0; chunked Monte Carlo maps chunk index to
stream id, so results do not depend on thread count.  JSON output is
byte-identical for identical command lines when --no-timestamp is passed.

Matrices: diagonal inputs as comma lists (complex entries as a+bi); full
matrices from a text file (rows on lines, entries whitespace-separated)
via an @path argument value or the --matrix-file/--matrix-param pair.
A --config file holds line-oriented key=value defaults using the same keys
as the flags; explicit flags win.
"""

from __future__ import annotations

import argparse
import os
import sys
from fractions import Fraction
from pathlib import Path

import numpy as np

from .bessel import bessel_J, olshanski_psi
from .cones import DomainError, field_params, jacobi_eigh
from .convolution import sample_ball
from .dunkl import MultiplicityB, dunkl_bessel_A, dunkl_bessel_B
from .jack import jack_C, pochhammer_gen
from .laplace import (verify_addition, verify_laplace, verify_laplace_mod,
                      verify_sonine, verify_sonine_phi)
from .convolution import verify_multiplicativity, verify_product_formula
from .dunkl import dunklchar_check, verify_example_q2, verify_harish_chandra
from .measures import (BetaParams, RngStream, beta_const, gamma_omega,
                       sample_beta_general, sample_matrix_beta,
                       verify_beta_projection, wishart_sample)
from .reports import SCHEMA_VERSION, SuiteSummary, _json_value
from .series import SeriesControl
from . import suite as suite_mod
from .suite import (N_BETA, N_HAAR, N_POLAR, N_PRODUCT, REGISTRY, SuiteConfig,
                    X_WOLF, cli_identities, limit_btoa_report,
                    limit_exp_report, polar_route_report, wolf_haar_report)

__all__ = ["main"]

_BOOL_KEYS = {"quick", "no-timestamp", "list", "json"}
_TRUTHY = {"1", "true", "yes", "on"}
_FALSY = {"0", "false", "no", "off"}

# Default slot filled by --matrix-file when --matrix-param is not given.
_PRINCIPAL = {
    "bessel": "x", "jack": "x", "psi": "a",
    "product-formula": "r", "multiplicativity": "s", "wolf-haar": "x",
    "laplace": "y", "laplace-mod": "m", "addition": "x", "sonine": "m",
    "sonine-phi": "s", "polar-route": "x",
}


# --- argument parsing helpers ----------------------------------------------

def _scalar(tok: str) -> complex:
    """One numeric token; complex parts written as a+bi."""
    t = tok.strip()
    if "i" in t or "I" in t:
        return complex(t.replace("I", "i").replace("i", "j"))
    return complex(float(t))


def _collapse(arr: np.ndarray) -> np.ndarray:
    if np.iscomplexobj(arr) and np.all(arr.imag == 0.0):
        return arr.real
    return arr


def _parse_list(text: str) -> np.ndarray:
    vals = [_scalar(t) for t in text.split(",") if t.strip()]
    if not vals:
        raise ValueError("empty list")
    return _collapse(np.array(vals))


def _read_matrix_file(path: str) -> np.ndarray:
    rows = []
    for line in Path(path).read_text().splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        rows.append([_scalar(t) for t in line.split()])
    if not rows or any(len(r) != len(rows[0]) for r in rows):
        raise ValueError(f"matrix file {path} is empty or ragged")
    return _collapse(np.array(rows))


def _as_matrix(text: str) -> np.ndarray:
    """Flag value to matrix: @path reads a file, a comma list is a diagonal."""
    if text.startswith("@"):
        return _read_matrix_file(text[1:])
    return np.diag(_parse_list(text))


def _format_number(v) -> str:
    v = complex(v)
    if v.imag == 0.0:
        return f"{v.real:.17g}"
    return f"{v.real:.17g}{v.imag:+.17g}i"


def _expand_config(argv: list[str]) -> list[str]:
    """Splice --config file pairs in as flags, before the explicit ones."""
    out = []
    path = None
    skip = False
    for i, tok in enumerate(argv):
        if skip:
            skip = False
            continue
        if tok == "--config":
            if i + 1 >= len(argv):
                raise SystemExit(_usage_exit("--config needs a file path"))
            path = argv[i + 1]
            skip = True
        elif tok.startswith("--config="):
            path = tok.split("=", 1)[1]
        else:
            out.append(tok)
    if path is None:
        return out
    try:
        lines = Path(path).read_text().splitlines()
    except OSError as e:
        raise SystemExit(_usage_exit(f"cannot read config file: {e}"))
    extra = []
    for line in lines:
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise SystemExit(_usage_exit(f"config line without '=': {line!r}"))
        key, value = (s.strip() for s in line.split("=", 1))
        if key in _BOOL_KEYS and value.lower() in (_TRUTHY | _FALSY):
            if value.lower() in _TRUTHY:
                extra.append(f"--{key}")
        else:
            extra.append(f"--{key}={value}")
    sub = next((j for j, t in enumerate(out) if not t.startswith("-")), None)
    if sub is None:
        return out + extra
    return out[:sub + 1] + extra + out[sub + 1:]


def _usage_exit(msg: str) -> int:
    print(f"error: {msg}", file=sys.stderr)
    return 2


def _resolve_seed(args, parser) -> int:
    if getattr(args, "seed", None) is not None:
        return args.seed
    env = os.environ.get("CONEBESSEL_SEED")
    if env:
        try:
            return int(env)
        except ValueError:
            parser.error(f"CONEBESSEL_SEED is not an integer: {env!r}")
    return 0


def _apply_threads(args) -> None:
    n = getattr(args, "threads", None)
    if n:
        for var in ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS",
                    "MKL_NUM_THREADS"):
            os.environ[var] = str(n)


def _common_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--seed", type=int, default=None,
                   help="RNG seed (default: CONEBESSEL_SEED env, else 0)")
    p.add_argument("--threads", type=int, default=None,
                   help="bound native thread pools (results identical "
                        "regardless)")
    p.add_argument("--no-timestamp", action="store_true",
                   help="zero wall-time fields for byte-identical output")
    p.add_argument("--config", default=None,
                   help="key=value defaults file; explicit flags win")


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="conebessel",
        description="Special functions on matrix cones: evaluation, identity "
                    "verification, sampling, and the acceptance suite.")
    sub = parser.add_subparsers(dest="command", required=True)

    pe = sub.add_parser("eval", help="evaluate one function at a point")
    pe.add_argument("--fn", required=True,
                    choices=["bessel", "jack", "pochhammer", "dunklA",
                             "dunklB", "psi", "gamma-omega", "beta-const"])
    pe.add_argument("--q", type=int, default=None)
    pe.add_argument("--field", choices=["R", "C", "H"], default="R")
    pe.add_argument("--mu", default=None, help="index (complex as a+bi)")
    pe.add_argument("--nu", default=None)
    pe.add_argument("--x", default=None, help="spectrum as a comma list")
    pe.add_argument("--lam", default=None, help="partition, e.g. 2,1")
    pe.add_argument("--alpha", default=None, help="parameter, e.g. 2 or 1/2")
    pe.add_argument("--k", type=float, default=None, help="type-A multiplicity")
    pe.add_argument("--k1", type=float, default=None)
    pe.add_argument("--k2", type=float, default=None)
    pe.add_argument("--xi", default=None)
    pe.add_argument("--eta", default=None)
    pe.add_argument("--b", default=None)
    pe.add_argument("--a", default=None)
    pe.add_argument("--kmax", type=int, default=None,
                    help="series degree cap override")
    pe.add_argument("--json", action="store_true",
                    help="emit a JSON record instead of plain text")
    pe.add_argument("--matrix-file", default=None)
    pe.add_argument("--matrix-param", default=None)
    _common_flags(pe)
    pe.set_defaults(func=cmd_eval)

    pv = sub.add_parser("verify", help="run one verification identity")
    pv.add_argument("--identity", choices=cli_identities(), default=None)
    pv.add_argument("--list", action="store_true",
                    help="print the identity table and exit")
    pv.add_argument("--q", type=int, default=None)
    pv.add_argument("--field", choices=["R", "C"], default=None)
    pv.add_argument("--mu", type=float, default=None)
    pv.add_argument("--nu", type=float, default=None)
    pv.add_argument("--samples", type=int, default=None)
    pv.add_argument("--tol", type=float, default=None)
    pv.add_argument("--level", type=int, default=None,
                    help="quadrature refinement level")
    pv.add_argument("--r", default=None, help="cone point, or row count for "
                    "beta-projection")
    pv.add_argument("--s", default=None)
    pv.add_argument("--t", default=None)
    pv.add_argument("--m", default=None)
    pv.add_argument("--m1", default=None)
    pv.add_argument("--m2", default=None)
    pv.add_argument("--x", default=None)
    pv.add_argument("--y", default=None)
    pv.add_argument("--lam", default=None)
    pv.add_argument("--xi", default=None)
    pv.add_argument("--eta", default=None)
    pv.add_argument("--b", default=None)
    pv.add_argument("--mu-values", default=None, help="comma list of indices "
                    "for the limit identities")
    pv.add_argument("--ptilde", type=int, default=None)
    pv.add_argument("--p", type=int, default=None)
    pv.add_argument("--matrix-file", default=None)
    pv.add_argument("--matrix-param", default=None)
    _common_flags(pv)
    pv.set_defaults(func=cmd_verify)

    ps = sub.add_parser("sample", help="draw matrix samples as CSV")
    ps.add_argument("--what", required=True,
                    choices=["beta", "beta-general", "wishart", "ball"])
    ps.add_argument("--q", type=int, default=None)
    ps.add_argument("--ptilde", type=int, default=None)
    ps.add_argument("--field", choices=["R", "C"], default="R")
    ps.add_argument("--p", type=int, default=None)
    ps.add_argument("--r", type=int, default=None)
    ps.add_argument("--mu", type=float, default=None)
    ps.add_argument("--nu", type=float, default=None)
    ps.add_argument("--sigma", default=None, help="scale matrix (diag list "
                    "or @file)")
    ps.add_argument("--n", type=int, default=10)
    ps.add_argument("--out", default=None, help="output path (default stdout)")
    _common_flags(ps)
    ps.set_defaults(func=cmd_sample)

    pu = sub.add_parser("suite", help="run the full acceptance battery")
    pu.add_argument("--quick", action="store_true",
                    help="reduce Monte Carlo sample counts 10x")
    pu.add_argument("--json", default=None, help="also write the summary to "
                    "this path")
    _common_flags(pu)
    pu.set_defaults(func=cmd_suite)
    return parser


# --- eval -------------------------------------------------------------------

def _need(parser, args, *names):
    vals = []
    for n in names:
        v = getattr(args, n.replace("-", "_"))
        if v is None:
            parser.error(f"--fn {args.fn} requires --{n}")
        vals.append(v)
    return vals[0] if len(vals) == 1 else vals


def _file_override(args, parser):
    if not args.matrix_file:
        return None, None
    name = args.matrix_param or _PRINCIPAL.get(
        getattr(args, "fn", None) or getattr(args, "identity", None) or "")
    if not name:
        parser.error("--matrix-file needs --matrix-param for this target")
    try:
        return name, _read_matrix_file(args.matrix_file)
    except (OSError, ValueError) as e:
        parser.error(str(e))


def _eval_spectrum(args, parser, fname: str, flag: str, q: int) -> np.ndarray:
    name, mat = _file_override(args, parser)
    if name == flag and mat is not None:
        w, _ = jacobi_eigh(0.5 * (mat + mat.conj().T))
        return w
    raw = getattr(args, flag)
    if raw is None:
        parser.error(f"--fn {fname} requires --{flag}")
    try:
        vec = _parse_list(raw)
    except ValueError as e:
        parser.error(f"--{flag}: {e}")
    if vec.shape[0] != q:
        parser.error(f"--{flag} must have {q} entries")
    return vec


def _print_value(args, fn: str, value, diag: dict) -> None:
    if args.json:
        record = {"schema": SCHEMA_VERSION, "fn": fn,
                  "value": _json_value(value)}
        record.update({k: _json_value(v) for k, v in diag.items()})
        import json

        print(json.dumps(record, indent=2, sort_keys=True))
        return
    print(_format_number(value))
    if diag:
        bits = ", ".join(f"{k} {v}" for k, v in diag.items())
        print(bits)


def cmd_eval(args, parser) -> int:
    fn = args.fn
    ctrl = SeriesControl(k_max=args.kmax) if args.kmax else None
    if fn == "bessel":
        q = args.q or 1
        fp = field_params(args.field, q)
        mu = _scalar(_need(parser, args, "mu"))
        mu = mu.real if mu.imag == 0 else mu
        spec = _eval_spectrum(args, parser, fn, "x", q)
        info = bessel_J(mu, spec, fp, ctrl)
        diag = {"truncation_degree": info.truncation_degree,
                "est_tail": info.est_tail, "converged": info.converged}
        if not info.converged:
            print(f"domain error: {info.advice}", file=sys.stderr)
            return 3
        _print_value(args, fn, info.value, diag)
        return 0
    if fn == "jack":
        lam = [int(t) for t in _need(parser, args, "lam").split(",")]
        alpha = Fraction(_need(parser, args, "alpha"))
        q = args.q or len(_parse_list(_need(parser, args, "x")))
        spec = _eval_spectrum(args, parser, fn, "x", q)
        _print_value(args, fn, jack_C(lam, alpha, spec), {"exact": True})
        return 0
    if fn == "pochhammer":
        mu = _scalar(_need(parser, args, "mu"))
        mu = mu.real if mu.imag == 0 else mu
        lam = [int(t) for t in _need(parser, args, "lam").split(",")]
        alpha = Fraction(_need(parser, args, "alpha"))
        _print_value(args, fn, pochhammer_gen(mu, lam, alpha), {"exact": True})
        return 0
    if fn == "dunklA":
        k = _need(parser, args, "k")
        if k <= 0:
            parser.error("--k must be positive")
        xi = _parse_list(_need(parser, args, "xi"))
        eta = _parse_list(_need(parser, args, "eta"))
        info = dunkl_bessel_A(k, xi, eta, ctrl)
        if not info.converged:
            print(f"domain error: {info.advice}", file=sys.stderr)
            return 3
        _print_value(args, fn, info.value,
                     {"truncation_degree": info.truncation_degree,
                      "est_tail": info.est_tail})
        return 0
    if fn == "dunklB":
        k1, k2 = _need(parser, args, "k1", "k2")
        xi = _parse_list(_need(parser, args, "xi"))
        eta = _parse_list(_need(parser, args, "eta"))
        mult = MultiplicityB(k1, k2, xi.shape[0])
        info = dunkl_bessel_B(mult, xi, eta, ctrl)
        if not info.converged:
            print(f"domain error: {info.advice}", file=sys.stderr)
            return 3
        _print_value(args, fn, info.value,
                     {"truncation_degree": info.truncation_degree,
                      "est_tail": info.est_tail})
        return 0
    if fn == "psi":
        b = np.diag(_parse_list(_need(parser, args, "b")))
        name, mat = _file_override(args, parser)
        if name == "a" and mat is not None:
            a = mat
        else:
            a = np.diag(_parse_list(_need(parser, args, "a")))
        _print_value(args, fn, olshanski_psi(b, a, args.field),
                     {"exact": True})
        return 0
    if fn == "gamma-omega":
        fp = field_params(args.field, args.q or 1)
        mu = _scalar(_need(parser, args, "mu"))
        mu = mu.real if mu.imag == 0 else mu
        _print_value(args, fn, gamma_omega(mu, fp), {"closed_form": True})
        return 0
    if fn == "beta-const":
        fp = field_params(args.field, args.q or 1)
        mu = float(_scalar(_need(parser, args, "mu")).real)
        nu = float(_scalar(_need(parser, args, "nu")).real)
        _print_value(args, fn, beta_const(mu, nu, fp), {"closed_form": True})
        return 0
    parser.error(f"unknown function {fn}")


# --- verify -----------------------------------------------------------------

def _mat_or(args, parser, flag: str, default, override):
    name, mat = override
    if name == flag and mat is not None:
        return mat
    raw = getattr(args, flag.replace("-", "_"))
    if raw is None:
        return np.asarray(default, dtype=float) if not isinstance(
            default, np.ndarray) else default
    try:
        return _as_matrix(raw)
    except (OSError, ValueError) as e:
        parser.error(f"--{flag}: {e}")


def _vec_or(args, parser, flag: str, default) -> np.ndarray:
    raw = getattr(args, flag.replace("-", "_"))
    if raw is None:
        return np.asarray(default, dtype=float)
    try:
        return _parse_list(raw)
    except ValueError as e:
        parser.error(f"--{flag}: {e}")


def _d_of(args) -> int:
    return 2 if (args.field or "R") == "C" else 1


def cmd_verify(args, parser) -> int:
    if args.list:
        width = max(len(n) for n in REGISTRY) + 2
        for name, entry in REGISTRY.items():
            tag = "" if entry.cli else "  (suite only)"
            print(f"{name:<{width}}{entry.summary}{tag}")
        return 0
    if not args.identity:
        parser.error("verify needs --identity (or --list)")
    seed = _resolve_seed(args, parser)
    ident = args.identity
    ov = _file_override(args, parser)
    q = args.q
    field = args.field or "R"

    if ident == "product-formula":
        fp = field_params(field, q or 1)
        mu = args.mu if args.mu is not None else 3.0
        r = _mat_or(args, parser, "r", [[1.0]], ov)
        s = _mat_or(args, parser, "s", [[1.0]], ov)
        rep = verify_product_formula(mu, r, s, fp,
                                     args.samples or N_PRODUCT, seed,
                                     tol=args.tol)
    elif ident == "multiplicativity":
        fp = field_params(field, q or 1)
        mu = args.mu if args.mu is not None else 2.0
        s = _mat_or(args, parser, "s", [[0.6]], ov)
        r = _mat_or(args, parser, "r", [[0.8]], ov)
        t = _mat_or(args, parser, "t", [[0.5]], ov)
        rep = verify_multiplicativity(s, r, t, mu, fp,
                                      args.samples or N_PRODUCT, seed,
                                      tol=args.tol)
    elif ident == "wolf-haar":
        fp = field_params(field, q or 2)
        name, mat = ov
        x = mat if (name == "x" and mat is not None) else X_WOLF
        rep = wolf_haar_report(x, fp, args.samples or N_HAAR, seed)
    elif ident == "harish-chandra":
        xi = _vec_or(args, parser, "xi", [0.5, 0.2])
        eta = _vec_or(args, parser, "eta", [0.4, -0.3])
        rep = verify_harish_chandra(_d_of(args), xi, eta,
                                    args.samples or N_HAAR, seed)
    elif ident == "dunklchar":
        mu = args.mu if args.mu is not None else 3.0
        xi = _vec_or(args, parser, "xi", [0.8, 0.4])
        eta = _vec_or(args, parser, "eta", [0.9, 0.3])
        rep = dunklchar_check(mu, _d_of(args), xi, eta,
                              args.samples or N_HAAR, seed)
    elif ident == "limit-exp":
        fp = field_params(field, q or 2)
        y = np.diag(_vec_or(args, parser, "y", [0.5, 1.0]))
        mus = _vec_or(args, parser, "mu-values", [8, 16, 32, 64])
        rep = limit_exp_report(y, [float(m.real) for m in np.atleast_1d(mus)],
                               fp, seed=seed)
    elif ident == "limit-BtoA":
        xi = _vec_or(args, parser, "xi", [0.6, 0.3])
        b = _vec_or(args, parser, "b", [0.8, 0.4])
        mus = _vec_or(args, parser, "mu-values", [32, 64, 128])
        rep = limit_btoa_report(_d_of(args), xi, b,
                                [float(m.real) for m in np.atleast_1d(mus)],
                                seed=seed)
    elif ident == "laplace":
        fp = field_params(field, q or 1)
        mu = args.mu if args.mu is not None else 2.5
        default_y = [[2.0]] if fp.q == 1 else suite_mod.Y2
        y = _mat_or(args, parser, "y", default_y, ov)
        rep = verify_laplace(mu, y, fp, level=args.level, tol=args.tol)
    elif ident == "laplace-mod":
        fp = field_params(field, q or 1)
        mu = args.mu if args.mu is not None else 2.5
        default_y = [[2.0]] if fp.q == 1 else suite_mod.Y2
        default_m = [[0.8]] if fp.q == 1 else suite_mod.M2
        m = _mat_or(args, parser, "m", default_m, ov)
        y = _mat_or(args, parser, "y", default_y, ov)
        rep = verify_laplace_mod(mu, m, y, fp, level=args.level, tol=args.tol)
    elif ident == "addition":
        fp = field_params(field, q or 1)
        mu = args.mu if args.mu is not None else 2.2
        nu = args.nu if args.nu is not None else 2.0
        if fp.q == 1:
            dm1, dm2, dx = [[0.7]], [[0.4]], [[0.9]]
        else:
            dm1, dm2, dx = suite_mod.M1B, suite_mod.M2B, suite_mod.X2
        m1 = _mat_or(args, parser, "m1", dm1, ov)
        m2 = _mat_or(args, parser, "m2", dm2, ov)
        x = _mat_or(args, parser, "x", dx, ov)
        rep = verify_addition(mu, nu, m1, m2, x, fp, level=args.level,
                              tol=args.tol)
    elif ident == "sonine":
        fp = field_params(field, q or 1)
        mu = args.mu if args.mu is not None else 2.5
        nu = args.nu if args.nu is not None else 2.0
        dm = [[1.6]] if fp.q == 1 else suite_mod.MS2
        m = _mat_or(args, parser, "m", dm, ov)
        rep = verify_sonine(mu, nu, m, fp, level=args.level, tol=args.tol)
    elif ident == "sonine-phi":
        fp = field_params(field, q or 1)
        mu = args.mu if args.mu is not None else 2.5
        nu = args.nu if args.nu is not None else 2.0
        ds = [[1.1]] if fp.q == 1 else suite_mod.SPHI2
        dx = [[0.9]] if fp.q == 1 else suite_mod.X2
        s = _mat_or(args, parser, "s", ds, ov)
        x = _mat_or(args, parser, "x", dx, ov)
        rep = verify_sonine_phi(mu, nu, s, x, fp, level=args.level,
                                tol=args.tol)
    elif ident == "polar-route":
        fp = field_params(field, q or 1)
        ptilde = args.ptilde or 2
        p = args.p or 6
        lam = _mat_or(args, parser, "lam", [[1.0]], ov)
        x = _mat_or(args, parser, "x", [[1.3]], ov)
        rep = polar_route_report(ptilde, p, lam, x, fp,
                                 args.samples or N_POLAR, seed,
                                 tol=args.tol if args.tol else 1e-2)
    elif ident == "beta-projection":
        if q not in (None, 1):
            raise DomainError("the KS acceptance targets the scalar "
                              "projection; --q must be 1")
        ptilde = args.ptilde or 2
        fp = field_params(field, ptilde)
        p = args.p or 5
        r = int(args.r) if args.r is not None else 4
        rep = verify_beta_projection(ptilde, fp, p, r,
                                     args.samples or N_BETA, seed)
    elif ident == "example-q2":
        rep = verify_example_q2()
    else:
        parser.error(f"unknown identity {ident}")

    if args.no_timestamp:
        rep.wall_time_ms = 0
    print(rep.to_json())
    return 0 if rep.passed else 1


# --- sample -----------------------------------------------------------------

def _csv_entry(v) -> str:
    v = complex(v)
    if v.imag == 0.0:
        return f"{v.real:.17g}"
    return f"{v.real:.17g}{v.imag:+.17g}i"


def cmd_sample(args, parser) -> int:
    seed = _resolve_seed(args, parser)
    rng = RngStream(seed)
    what = args.what
    header: dict
    if what == "beta":
        ptilde = args.ptilde or args.q or 2
        fp = field_params(args.field, ptilde)
        p = args.p if args.p is not None else 2 * ptilde
        r = args.r if args.r is not None else 2 * ptilde
        draws = sample_matrix_beta(ptilde, fp, p, r, rng, size=args.n)
        header = {"what": what, "ptilde": ptilde, "field": args.field,
                  "p": p, "r": r}
    elif what == "beta-general":
        q = args.q or 1
        fp = field_params(args.field, q)
        if args.mu is None or args.nu is None:
            parser.error("beta-general needs --mu and --nu")
        draws = sample_beta_general(BetaParams(fp, args.mu, args.nu), rng,
                                    size=args.n)
        header = {"what": what, "q": q, "field": args.field,
                  "mu": args.mu, "nu": args.nu}
    elif what == "wishart":
        q = args.q or 2
        fp = field_params(args.field, q)
        p = args.p if args.p is not None else q + 2
        if args.sigma is not None:
            sigma = _as_matrix(args.sigma)
        else:
            sigma = np.eye(q)
        draws = wishart_sample(fp, p, sigma, rng, size=args.n)
        header = {"what": what, "q": q, "field": args.field, "p": p}
    elif what == "ball":
        q = args.q or 1
        fp = field_params(args.field, q)
        if args.mu is None:
            parser.error("ball sampling needs --mu")
        draws, rate = sample_ball(fp, args.mu, args.n, rng)
        header = {"what": what, "q": q, "field": args.field, "mu": args.mu,
                  "acceptance_rate": f"{rate:.4g}"}
    else:
        parser.error(f"unknown sample target {what}")
    header["n"] = args.n
    header["seed"] = seed
    lines = ["# " + " ".join(f"{k}={v}" for k, v in header.items())]
    flat = draws.reshape(draws.shape[0], -1)
    for row in flat:
        lines.append(",".join(_csv_entry(v) for v in row))
    text = "\n".join(lines) + "\n"
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return 0


# --- suite ------------------------------------------------------------------

def cmd_suite(args, parser) -> int:
    seed = _resolve_seed(args, parser)
    cfg = SuiteConfig(seed=seed, quick=args.quick)
    reports = []
    for entry in REGISTRY.values():
        reps = entry.runner(cfg)
        reports.extend(reps)
        for rep in reps:
            print(rep.line(), file=sys.stderr)
    summary = SuiteSummary(reports=reports)
    if args.no_timestamp:
        summary.strip_timestamps()
    text = summary.to_json()
    if args.json:
        Path(args.json).write_text(text + "\n")
    print(text)
    return summary.exit_status


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        argv = _expand_config(argv)
    except SystemExit as e:
        return e.code if isinstance(e.code, int) else 2
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return e.code if isinstance(e.code, int) else 2
    _apply_threads(args)
    try:
        return args.func(args, parser)
    except SystemExit as e:
        return e.code if isinstance(e.code, int) else 2
    except DomainError as e:
        print(f"domain error: {e}", file=sys.stderr)
        return 3
    except ArithmeticError as e:
        print(f"domain error: {e}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
