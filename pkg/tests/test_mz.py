"""Gram matrices, the two-sided quadrature constant eta, exactness degrees."""

from __future__ import annotations

import math

import numpy as np
import pytest

from sphsolve import (
    QuadratureRule,
    equal_area_points,
    gram_matrix,
    mz_constant,
    quadrature_error_on_harmonics,
    random_rule,
    uniform_random_points,
)

FOUR_PI = 4.0 * math.pi


def test_gram_is_symmetric_identity_for_design(td20) -> None:
    # an exact-to-2n rule makes the degree-n Gram the identity
    G = gram_matrix(td20, 10)
    assert G.shape == (121, 121)
    assert np.array_equal(G, G.T)
    assert np.max(np.abs(G - np.eye(121))) <= 1e-10  # discrete orthonormality


def test_design_eta_at_half_degree(td20) -> None:
    report = mz_constant(td20, 10)
    assert report.eta <= 1e-10
    assert report.exact_to == 20
    assert report.mz_holds
    assert report.lambda_min == pytest.approx(1.0, abs=1e-10)
    assert report.lambda_max == pytest.approx(1.0, abs=1e-10)


def test_quadrature_error_on_harmonics_degrees(td20) -> None:
    # worst harmonic of each degree: exact through t, wrong beyond
    for d in (0, 1, 10, 20):
        assert quadrature_error_on_harmonics(td20, d) <= 1e-12
    assert quadrature_error_on_harmonics(td20, 21) > 1e-9


def test_single_point_rule_spectrum() -> None:
    # G = 4pi v v^T at the pole: lambda_max = 4pi |v|^2 = 4, so eta = 3
    rule = QuadratureRule(points=np.array([[0.0, 0.0, 1.0]]),
                          weights=np.array([FOUR_PI]), label="single")
    probe = uniform_random_points(2000, seed=5)
    report = mz_constant(rule, 1, probe=probe)
    assert report.lambda_max == pytest.approx(4.0, abs=1e-12)
    assert report.eta == pytest.approx(3.0, abs=1e-12)
    assert report.lambda_min == pytest.approx(0.0, abs=1e-12)
    assert not report.mz_holds
    assert "fails" in report.summary()


def test_underdetermined_rule_gram_is_singular() -> None:
    # fewer points than basis functions: the Gram cannot have full rank
    rule = equal_area_points(16)
    report = mz_constant(rule, 5)  # (n+1)^2 = 36 > 16
    assert report.lambda_min <= 1e-12
    assert report.eta >= 1.0
    assert not report.mz_holds


def test_random_rule_satisfies_mz_at_moderate_degree() -> None:
    # m ~ n^2 log n / eta^2 heuristic: 4000 points are plenty for n = 10
    report = mz_constant(random_rule(4000, 1), 10)
    assert report.eta < 1.0
    assert report.mz_holds
    assert report.exact_to == 0  # random points are exact only at degree 0
    assert report.degree_bound > 0.0
    assert math.isfinite(report.degree_bound)


def test_equal_area_analysis_values() -> None:
    report = mz_constant(equal_area_points(400), 10)
    assert report.mz_holds
    assert 0.0 < report.eta < 1.0
    assert report.n == 10
    # layout is symmetric but not polynomial-exact beyond the constant
    assert report.exact_to in (0, 1)


def test_mz_summary_mentions_fields(td10) -> None:
    report = mz_constant(td10, 5)
    s = report.summary()
    for token in ("n=5", "eta=", "exact_to=10", "mesh_norm="):
        assert token in s


def test_eta_definition_matches_gram_spectrum(td10) -> None:
    report = mz_constant(td10, 5)
    lam = np.linalg.eigvalsh(gram_matrix(td10, 5))
    eta = max(lam[-1] - 1.0, 1.0 - lam[0], 0.0)
    assert report.eta == pytest.approx(eta, abs=1e-15)
