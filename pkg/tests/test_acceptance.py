"""Acceptance battery: fifteen numbered criteria, one pass/fail line each.

Each test drives the corresponding suite runner at its production sample
sizes and tolerances, prints the report lines for the log, asserts that
every report passed, and (where a runtime budget applies) that the run
stayed inside it.  The stated tolerances are asserted on the reports
themselves so loosening a runner is caught here.
"""

import time

import pytest

from conebessel.suite import SuiteConfig, run_identity

CFG = SuiteConfig(seed=0, quick=False)


def _run(name, capsys, budget=None, tolerance=None):
    start = time.perf_counter()
    reports = run_identity(name, CFG)
    wall = time.perf_counter() - start
    with capsys.disabled():
        for rep in reports:
            print(f"  {rep.line()}")
    for rep in reports:
        assert rep.passed, rep.line()
        if tolerance is not None:
            assert rep.tolerance == tolerance, rep.line()
    if budget is not None:
        assert wall < budget, f"{name} took {wall:.1f}s (budget {budget}s)"
    return reports


class TestAcceptance:
    def test_01_jack_normalization(self, capsys):
        _run("jack-normalization", capsys, budget=30.0, tolerance=1e-9)

    def test_02_scalar_reduction(self, capsys):
        _run("scalar-reduction", capsys, budget=5.0, tolerance=1e-10)

    def test_03_product_formula(self, capsys):
        reps = _run("product-formula", capsys, budget=300.0)
        assert len(reps) == 4  # q=1 at two indices, q=2 over both fields

    def test_04_multiplicativity(self, capsys):
        reps = _run("multiplicativity", capsys, budget=300.0)
        assert len(reps) == 4

    def test_05_wolf_haar(self, capsys):
        _run("wolf-haar", capsys, budget=60.0)

    def test_06_harish_chandra_and_characterization(self, capsys):
        hc = _run("harish-chandra", capsys)
        dc = _run("dunklchar", capsys)
        assert len(hc) == 2 and len(dc) == 2  # d = 1 and d = 2 each

    def test_07_exponential_limit(self, capsys):
        reps = _run("limit-exp", capsys)
        detail = reps[0].params
        errs = detail["errors"]
        assert all(a > b for a, b in zip(errs, errs[1:]))
        for r in detail["ratios"]:
            assert 1.6 <= r <= 2.4
        assert detail["indices"] == [8, 16, 32, 64]

    def test_08_b_to_a_degeneration(self, capsys):
        reps = _run("limit-BtoA", capsys)
        detail = reps[0].params
        assert all(a > b for a, b in zip(detail["errors"],
                                         detail["errors"][1:]))
        for r in detail["ratios"]:
            assert 1.6 <= r <= 2.4

    def test_09_laplace_transforms(self, capsys):
        start = time.perf_counter()
        lap = _run("laplace", capsys)
        mod = _run("laplace-mod", capsys)
        assert time.perf_counter() - start < 120.0
        by_rank = {rep.params["q"]: rep for rep in lap}
        assert by_rank[1].tolerance == 1e-8
        assert by_rank[2].tolerance == 1e-4
        assert {rep.params["q"] for rep in mod} == {1, 2}

    def test_10_addition(self, capsys):
        reps = _run("addition", capsys)
        tols = {rep.params["q"]: rep.tolerance for rep in reps}
        assert tols[1] == 1e-6 and tols[2] == 1e-3

    def test_11_sonine(self, capsys):
        son = _run("sonine", capsys)
        phi = _run("sonine-phi", capsys)
        assert {rep.params["q"]: rep.tolerance for rep in son} == \
            {1: 1e-8, 2: 1e-3}
        assert len(phi) >= 2

    def test_12_polar_route(self, capsys):
        reps = _run("polar-route", capsys, tolerance=1e-2)
        rep = reps[0]
        assert rep.params["ptilde"] == 2 and rep.params["p"] == 6
        assert rep.mc_stderr is not None

    def test_13_beta_projection(self, capsys):
        reps = _run("beta-projection", capsys)
        assert {rep.params["field"] for rep in reps} == {"R", "C"}
        for rep in reps:
            accepted = sum(1 for p in rep.params["p_values"] if p > 0.01)
            assert accepted >= 2
            assert rep.params["N"] == 200000

    def test_14_rank_two_example(self, capsys):
        _run("example-q2", capsys, tolerance=1e-8)

    def test_15_psi_functional_equation(self, capsys):
        reps = _run("psi-functional", capsys, tolerance=1e-12)
        assert reps[0].params["triples"] == 50
