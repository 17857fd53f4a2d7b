"""Machine-readable verification reports and suite aggregation.

Every identity check in the package produces a VerificationReport with the
same pass semantics: the relative error must meet the configured tolerance,
and when the check is stochastic the absolute error must additionally fall
within four Monte Carlo standard errors.  Checks whose stated criterion is
"within k standard errors" encode that by setting the tolerance to the
k-sigma band expressed relatively, so the invariant

    pass  <=>  (abs_err <= 4 * mc_stderr when stochastic) and rel_err <= tolerance

holds verbatim for every report the package emits.  Structural criteria
(rate-band tables, majority-of-seeds KS votes) are encoded as deviation
reports: lhs carries the deviation, rhs the target 0, and the tolerance is
the allowed deviation, so the same invariant applies.

JSON output is versioned ("schema": 1), sorted, and uses [re, im] pairs for
complex values; wall-clock fields can be zeroed for byte-identical replays.
"""

from __future__ import annotations

import json
import time
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "SCHEMA_VERSION",
    "VerificationReport",
    "SuiteSummary",
    "make_report",
    "mc_sigma_report",
    "deviation_report",
]

SCHEMA_VERSION = 1

_TINY = 1e-300


def _json_value(v):
    """Encode one value for the report JSON (complex as [re, im])."""
    if isinstance(v, complex):
        return [float(v.real), float(v.imag)]
    if isinstance(v, (np.complexfloating,)):
        return [float(v.real), float(v.imag)]
    if isinstance(v, (np.floating,)):
        return float(v)
    if isinstance(v, (np.integer,)):
        return int(v)
    if isinstance(v, np.ndarray):
        return [_json_value(t) for t in v.tolist()]
    if isinstance(v, (list, tuple)):
        return [_json_value(t) for t in v]
    if isinstance(v, dict):
        return {str(k): _json_value(t) for k, t in sorted(v.items())}
    return v


@dataclass
class VerificationReport:
    """Outcome of one identity check.

    lhs / rhs are the two compared values (complex allowed); mc_stderr is
    None for deterministic checks.  `extras` carries bounded structured
    side products (rate tables, discretized mixing measures) and is part of
    the JSON output.
    """

    identity: str
    params: dict
    lhs: complex
    rhs: complex
    abs_err: float
    rel_err: float
    mc_stderr: float | None
    tolerance: float
    passed: bool
    seed: int
    wall_time_ms: int
    extras: dict = field(default_factory=dict)

    def to_json_dict(self) -> dict:
        out = {
            "schema": SCHEMA_VERSION,
            "identity": self.identity,
            "params": _json_value(self.params),
            "lhs": _json_value(self.lhs),
            "rhs": _json_value(self.rhs),
            "abs_err": float(self.abs_err),
            "rel_err": float(self.rel_err),
            "mc_stderr": None if self.mc_stderr is None else float(self.mc_stderr),
            "tolerance": float(self.tolerance),
            "pass": bool(self.passed),
            "seed": int(self.seed),
            "wall_time_ms": int(self.wall_time_ms),
        }
        if self.extras:
            out["extras"] = _json_value(self.extras)
        return out

    def to_json(self, indent: int | None = 2) -> str:
        return json.dumps(self.to_json_dict(), indent=indent, sort_keys=True)

    def line(self) -> str:
        tag = "PASS" if self.passed else "FAIL"
        err = f"rel_err={self.rel_err:.3e}"
        if self.mc_stderr is not None:
            err += f" stderr={self.mc_stderr:.3e}"
        brief = " ".join(f"{k}={v}" for k, v in list(self.params.items())[:4]
                         if not isinstance(v, (list, dict)))
        return f"[{tag}] {self.identity}: {brief} {err} tol={self.tolerance:.3e}"


def make_report(identity: str, params: dict, lhs, rhs, tolerance: float,
                mc_stderr: float | None = None, seed: int = 0,
                started: float | None = None, scale: float | None = None,
                extras: dict | None = None) -> VerificationReport:
    """Build a report from two compared values.

    scale overrides the relative-error denominator (used by deviation
    encodings where the natural scale is 1, not the compared magnitudes).
    """
    lhs_c = complex(lhs)
    rhs_c = complex(rhs)
    abs_err = abs(lhs_c - rhs_c)
    denom = scale if scale is not None else max(abs(lhs_c), abs(rhs_c), _TINY)
    rel_err = abs_err / denom
    ok = rel_err <= tolerance
    if mc_stderr is not None:
        ok = ok and abs_err <= 4.0 * mc_stderr
    wall = 0 if started is None else int(round((time.perf_counter() - started) * 1000))
    if lhs_c.imag == 0.0 and rhs_c.imag == 0.0:
        lhs_c, rhs_c = lhs_c.real, rhs_c.real
    return VerificationReport(
        identity=identity, params=dict(params), lhs=lhs_c, rhs=rhs_c,
        abs_err=abs_err, rel_err=rel_err, mc_stderr=mc_stderr,
        tolerance=float(tolerance), passed=bool(ok), seed=int(seed),
        wall_time_ms=wall, extras=dict(extras or {}),
    )


def mc_sigma_report(identity: str, params: dict, lhs, rhs, stderr: float,
                    seed: int, started: float | None = None, sigma: float = 3.0,
                    extras: dict | None = None) -> VerificationReport:
    """Report for a pure k-sigma Monte Carlo agreement criterion.

    The tolerance is set to the k-sigma band expressed relatively, so the
    generic pass rule reduces exactly to |lhs - rhs| <= sigma * stderr.
    """
    scale = max(abs(complex(lhs)), abs(complex(rhs)), _TINY)
    tol = sigma * stderr / scale
    params = dict(params)
    params.setdefault("criterion", f"{sigma:g}-sigma")
    return make_report(identity, params, lhs, rhs, tolerance=tol,
                       mc_stderr=stderr, seed=seed, started=started, extras=extras)


def deviation_report(identity: str, params: dict, deviation: float,
                     tolerance: float, seed: int = 0,
                     started: float | None = None, mc_stderr: float | None = None,
                     extras: dict | None = None) -> VerificationReport:
    """Report for a structural criterion measured as a single deviation >= 0."""
    return make_report(identity, params, deviation, 0.0, tolerance=tolerance,
                       mc_stderr=mc_stderr, seed=seed, started=started,
                       scale=1.0, extras=extras)


@dataclass
class SuiteSummary:
    """Aggregated outcome of a battery of reports."""

    reports: list

    @property
    def passed_count(self) -> int:
        return sum(1 for r in self.reports if r.passed)

    @property
    def failed_count(self) -> int:
        return len(self.reports) - self.passed_count

    @property
    def all_passed(self) -> bool:
        return self.failed_count == 0

    @property
    def exit_status(self) -> int:
        return 0 if self.all_passed else 1

    def to_json_dict(self) -> dict:
        return {
            "schema": SCHEMA_VERSION,
            "passed": self.passed_count,
            "failed": self.failed_count,
            "reports": [r.to_json_dict() for r in self.reports],
        }

    def to_json(self, indent: int | None = 2) -> str:
        return json.dumps(self.to_json_dict(), indent=indent, sort_keys=True)

    def strip_timestamps(self) -> None:
        for r in self.reports:
            r.wall_time_ms = 0
