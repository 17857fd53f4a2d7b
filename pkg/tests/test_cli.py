"""End-to-end CLI contract: exit codes, JSON schema, determinism, formats.

Every test drives the installed entry point through a fresh interpreter so
argument parsing, config expansion, environment handling, and exit codes
are exercised exactly as a shell user sees them.
"""

import json
import os
import subprocess
import sys

import numpy as np
import pytest

CMD = [sys.executable, "-m", "conebessel.cli"]


def run_cli(*args, env_extra=None, timeout=300):
    env = os.environ.copy()
    env.pop("CONEBESSEL_SEED", None)
    if env_extra:
        env.update(env_extra)
    return subprocess.run(CMD + list(args), capture_output=True, text=True,
                          env=env, timeout=timeout)


class TestEval:
    def test_bessel_scalar(self):
        r = run_cli("eval", "--fn", "bessel", "--mu", "1", "--x", "1",
                    "--field", "R", "--q", "1")
        assert r.returncode == 0, r.stderr
        assert "0.22389077914123" in r.stdout

    def test_gamma_omega(self):
        r = run_cli("eval", "--fn", "gamma-omega", "--mu", "2", "--field",
                    "R", "--q", "2")
        assert r.returncode == 0, r.stderr
        assert "2.2214414690791" in r.stdout

    def test_pochhammer(self):
        r = run_cli("eval", "--fn", "pochhammer", "--mu", "3", "--lam",
                    "2,1", "--alpha", "2")
        assert r.returncode == 0, r.stderr
        assert r.stdout.strip().splitlines()[0] == "30"

    def test_beta_const(self):
        r = run_cli("eval", "--fn", "beta-const", "--mu", "1.5", "--nu",
                    "1.5", "--field", "R", "--q", "2")
        assert r.returncode == 0, r.stderr
        assert "0.740480489693" in r.stdout

    def test_psi_identity_matrixes(self):
        r = run_cli("eval", "--fn", "psi", "--b", "0,0", "--a", "1,1",
                    "--q", "2")
        assert r.returncode == 0, r.stderr
        assert r.stdout.strip().splitlines()[0] == "1"

    def test_jack_value(self):
        r = run_cli("eval", "--fn", "jack", "--lam", "2", "--alpha", "2",
                    "--x", "1,1", "--q", "2")
        assert r.returncode == 0, r.stderr
        v = float(r.stdout.strip().splitlines()[0])
        # zonal polynomial at (1,1): Z_(2) = x1^2 + x2^2 + (2/3) x1 x2 scaled;
        # cross-check against the series: sum over both layer-2 partitions
        # equals (x1+x2)^2, so Z_(2)(1,1) = 4 - Z_(1,1)(1,1)
        r2 = run_cli("eval", "--fn", "jack", "--lam", "1,1", "--alpha", "2",
                     "--x", "1,1", "--q", "2")
        v2 = float(r2.stdout.strip().splitlines()[0])
        assert v + v2 == pytest.approx(4.0, rel=1e-12)

    def test_dunkl_kernels(self):
        ra = run_cli("eval", "--fn", "dunklA", "--k", "1", "--xi", "0.5,0.2",
                     "--eta", "0.4,0.1")
        assert ra.returncode == 0, ra.stderr
        rb = run_cli("eval", "--fn", "dunklB", "--k1", "0.8", "--k2", "0.5",
                     "--xi", "0.5,0.2", "--eta", "0.4,0.1")
        assert rb.returncode == 0, rb.stderr

    def test_json_record(self):
        r = run_cli("eval", "--fn", "bessel", "--mu", "2", "--x", "1",
                    "--field", "R", "--q", "1", "--json")
        assert r.returncode == 0
        rec = json.loads(r.stdout)
        assert rec["schema"] == 1
        assert rec["fn"] == "bessel"
        assert float(rec["value"]) == pytest.approx(0.5767248077568734,
                                                    rel=1e-12)

    def test_complex_index(self):
        r = run_cli("eval", "--fn", "bessel", "--mu", "2+0.5i", "--x", "0.4",
                    "--field", "R", "--q", "1")
        assert r.returncode == 0, r.stderr
        assert "i" in r.stdout.strip().splitlines()[0]

    def test_domain_error_exit_3(self):
        r = run_cli("eval", "--fn", "bessel", "--mu", "0.5", "--x",
                    "0.3,0.1", "--field", "R", "--q", "2")
        assert r.returncode == 3
        assert "domain error" in r.stderr

    def test_refusal_exit_3(self):
        r = run_cli("eval", "--fn", "bessel", "--mu", "1", "--x", "1e6",
                    "--field", "R", "--q", "1")
        assert r.returncode == 3
        assert "argument too large" in r.stderr


class TestUsageErrors:
    def test_missing_subcommand(self):
        r = run_cli()
        assert r.returncode == 2

    def test_unknown_flag(self):
        r = run_cli("eval", "--fn", "bessel", "--definitely-not-a-flag", "1")
        assert r.returncode == 2

    def test_unknown_identity(self):
        r = run_cli("verify", "--identity", "no-such-check")
        assert r.returncode == 2

    def test_bad_seed_env(self):
        r = run_cli("verify", "--identity", "sonine",
                    env_extra={"CONEBESSEL_SEED": "not-a-number"})
        assert r.returncode == 2


class TestVerify:
    def test_list_names_all_identities(self):
        r = run_cli("verify", "--list")
        assert r.returncode == 0
        for name in ("product-formula", "multiplicativity", "wolf-haar",
                     "harish-chandra", "dunklchar", "limit-exp", "limit-BtoA",
                     "laplace", "laplace-mod", "addition", "sonine",
                     "sonine-phi", "polar-route", "beta-projection",
                     "example-q2"):
            assert name in r.stdout, name

    def test_sonine_exact(self):
        r = run_cli("verify", "--identity", "sonine", "--q", "1", "--mu",
                    "2.5", "--nu", "2.0", "--m", "0", "--no-timestamp")
        assert r.returncode == 0, r.stderr
        rec = json.loads(r.stdout)
        assert rec["pass"] is True
        assert rec["abs_err"] <= 1e-12

    def test_laplace_domain_exit_3(self):
        r = run_cli("verify", "--identity", "laplace", "--q", "2", "--mu",
                    "0.2")
        assert r.returncode == 3

    def test_product_formula_seeded(self):
        r = run_cli("verify", "--identity", "product-formula", "--q", "1",
                    "--mu", "2.0", "--r", "0.9", "--s", "0.5", "--samples",
                    "200000", "--seed", "7", "--no-timestamp")
        assert r.returncode == 0, r.stderr
        rec = json.loads(r.stdout)
        assert rec["pass"] is True
        assert rec["seed"] == 7

    def test_failure_exits_1(self):
        # an impossible tolerance turns a pass into a reported failure
        r = run_cli("verify", "--identity", "product-formula", "--q", "1",
                    "--mu", "2.0", "--r", "0.9", "--s", "0.5", "--samples",
                    "20000", "--seed", "7", "--tol", "1e-18")
        assert r.returncode == 1
        rec = json.loads(r.stdout)
        assert rec["pass"] is False

    def test_byte_identical_reruns(self):
        args = ("verify", "--identity", "addition", "--q", "1", "--mu",
                "2.2", "--nu", "2.0", "--no-timestamp")
        a, b = run_cli(*args), run_cli(*args)
        assert a.returncode == b.returncode == 0
        assert a.stdout == b.stdout

    def test_seed_env_fallback(self):
        direct = run_cli("verify", "--identity", "product-formula", "--q",
                         "1", "--mu", "2.0", "--samples", "50000", "--seed",
                         "11", "--no-timestamp")
        via_env = run_cli("verify", "--identity", "product-formula", "--q",
                          "1", "--mu", "2.0", "--samples", "50000",
                          "--no-timestamp",
                          env_extra={"CONEBESSEL_SEED": "11"})
        assert direct.stdout == via_env.stdout

    def test_explicit_seed_beats_env(self):
        a = run_cli("verify", "--identity", "product-formula", "--q", "1",
                    "--mu", "2.0", "--samples", "50000", "--seed", "11",
                    "--no-timestamp", env_extra={"CONEBESSEL_SEED": "99"})
        b = run_cli("verify", "--identity", "product-formula", "--q", "1",
                    "--mu", "2.0", "--samples", "50000", "--seed", "11",
                    "--no-timestamp")
        assert a.stdout == b.stdout

    def test_matrix_file_input(self, tmp_path):
        mat = tmp_path / "y.txt"
        mat.write_text("# a 2x2 cone point\n2.0 0.3\n0.3 1.6\n")
        r = run_cli("verify", "--identity", "laplace", "--q", "2", "--mu",
                    "3.0", "--y", f"@{mat}", "--no-timestamp")
        assert r.returncode == 0, r.stderr
        rec = json.loads(r.stdout)
        assert rec["pass"] is True

    def test_config_file_with_flag_override(self, tmp_path):
        cfg = tmp_path / "run.cfg"
        cfg.write_text("identity=sonine\nq=1\nmu=2.5\nnu=2.0\n"
                       "no-timestamp=true\n# comment line\n")
        base = run_cli("verify", "--config", str(cfg))
        assert base.returncode == 0, base.stderr
        rec = json.loads(base.stdout)
        assert rec["params"]["mu"] == 2.5
        override = run_cli("verify", "--config", str(cfg), "--mu", "3.0")
        rec2 = json.loads(override.stdout)
        assert rec2["params"]["mu"] == 3.0


class TestSample:
    def test_wishart_csv(self):
        r = run_cli("sample", "--what", "wishart", "--q", "2", "--field",
                    "R", "--p", "4", "--sigma", "1,0.5", "--n", "6",
                    "--seed", "3")
        assert r.returncode == 0, r.stderr
        lines = r.stdout.strip().splitlines()
        assert lines[0].startswith("#")
        assert "seed=3" in lines[0]
        body = [ln for ln in lines[1:] if ln]
        assert len(body) == 6
        row = np.array([float(t) for t in body[0].split(",")])
        assert row.shape == (4,)  # 2x2 flattened row-major
        assert row[1] == pytest.approx(row[2], abs=1e-12)  # symmetry

    def test_complex_entries_use_i(self):
        r = run_cli("sample", "--what", "wishart", "--q", "2", "--field",
                    "C", "--p", "4", "--sigma", "1,1", "--n", "3", "--seed",
                    "5")
        assert r.returncode == 0, r.stderr
        body = [ln for ln in r.stdout.strip().splitlines()[1:] if ln]
        assert any("i" in ln for ln in body)

    def test_beta_csv_and_out_file(self, tmp_path):
        out = tmp_path / "draws.csv"
        r = run_cli("sample", "--what", "beta", "--ptilde", "2", "--field",
                    "R", "--p", "4", "--r", "5", "--n", "8", "--seed", "2",
                    "--out", str(out))
        assert r.returncode == 0, r.stderr
        lines = out.read_text().strip().splitlines()
        assert len([ln for ln in lines if not ln.startswith("#")]) == 8
        vals = np.array([[float(t) for t in ln.split(",")]
                         for ln in lines if not ln.startswith("#")])
        assert vals[:, [0, 3]].min() >= 0.0
        assert vals[:, [0, 3]].max() <= 1.0

    def test_beta_general_csv(self):
        r = run_cli("sample", "--what", "beta-general", "--q", "2",
                    "--field", "R", "--mu", "2.5", "--nu", "2.2", "--n",
                    "4", "--seed", "9")
        assert r.returncode == 0, r.stderr
        body = [ln for ln in r.stdout.strip().splitlines()[1:] if ln]
        assert len(body) == 4

    def test_ball_reports_acceptance(self):
        r = run_cli("sample", "--what", "ball", "--q", "1", "--field", "R",
                    "--mu", "2.0", "--n", "5", "--seed", "4")
        assert r.returncode == 0, r.stderr
        assert "acceptance_rate=" in r.stdout.splitlines()[0]

    def test_identical_seeds_identical_output(self):
        args = ("sample", "--what", "wishart", "--q", "1", "--field", "R",
                "--p", "3", "--sigma", "1", "--n", "5", "--seed", "8")
        assert run_cli(*args).stdout == run_cli(*args).stdout

    def test_sample_domain_error(self):
        r = run_cli("sample", "--what", "wishart", "--q", "2", "--field",
                    "R", "--p", "1", "--sigma", "1,1", "--n", "2")
        assert r.returncode == 3


class TestSuite:
    def test_quick_suite_json(self, tmp_path):
        out = tmp_path / "suite.json"
        r = run_cli("suite", "--quick", "--seed", "1", "--no-timestamp",
                    "--json", str(out), timeout=600)
        assert r.returncode == 0, r.stderr[-2000:]
        summary = json.loads(out.read_text())
        assert summary["schema"] == 1
        assert summary["failed"] == 0
        assert summary["passed"] == len(summary["reports"])
        names = {rep["identity"] for rep in summary["reports"]}
        assert {"jack-normalization", "scalar-reduction", "psi-functional",
                "product-formula", "example-q2"} <= names
        stdout_summary = json.loads(r.stdout)
        assert stdout_summary == summary


class TestThreads:
    def test_thread_flag_accepted_and_deterministic(self):
        a = run_cli("verify", "--identity", "sonine", "--q", "1", "--mu",
                    "2.5", "--nu", "2.0", "--threads", "1",
                    "--no-timestamp")
        b = run_cli("verify", "--identity", "sonine", "--q", "1", "--mu",
                    "2.5", "--nu", "2.0", "--threads", "4",
                    "--no-timestamp")
        assert a.returncode == b.returncode == 0
        assert a.stdout == b.stdout
