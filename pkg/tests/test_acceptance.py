"""Acceptance gate: one PASS/FAIL line per criterion, at the stated sizes and tolerances."""

import pytest

from conecert.campaigns import (
    backward_campaign,
    chain_campaign,
    dual_pairing_campaign,
    quarter_annulus_campaign,
    exclusivity_campaign,
    lp_campaign,
)
from conecert.convexity import Sampling

CHAIN_SEEDS = range(200)


@pytest.fixture(scope="module")
def chain():
    return chain_campaign(CHAIN_SEEDS, Sampling(pair_count=500))


def test_criterion_1_example21(announce):
    res = quarter_annulus_campaign(pairs=10_000, point_checks=1000)
    ok = res.passed and res.elapsed <= 30.0
    c = res.counts
    detail = (
        f"convexlike={c['convexlike_verdict']} subconvexlike={c['subconvexlike_verdict']} "
        f"presubconvexlike={c['presubconvexlike_verdict']} "
        f"union->interior {c['union_samples_strict_interior']}/1000 "
        f"interior->union {c['interior_samples_in_union']}/{c['interior_samples']} "
        f"{res.elapsed:.1f}s"
    )
    assert announce(1, "quarter-annulus classification", ok, detail), res.failures
    assert c["convexlike_witness_verified"] and c["subconvexlike_witness_verified"]
    assert len(c["lambda_grid"]) >= 3 and c["pairs"] >= 10_000


def test_criterion_2_exclusivity(announce):
    res = exclusivity_campaign(range(500), tol=1e-9)
    ok = res.passed and res.cases == 500 and res.elapsed <= 60.0
    detail = f"{res.cases} instances, {len(res.failures)} violations, {res.counts}, {res.elapsed:.1f}s"
    assert announce(2, "alternative exclusivity", ok, detail), res.failures


def test_criterion_3_necessity(announce, chain):
    res = chain["necessity"]
    ok = res.passed and res.cases == 200 and res.counts.get("normalization_N1") == 200
    ok = ok and res.counts["max_abs_cs"] <= 1e-7
    detail = f"{res.counts.get('certified', 0)}/{res.cases} certified, max |cs| {res.counts['max_abs_cs']:.1e}"
    assert announce(3, "necessity on chain instances", ok, detail), res.failures


def test_criterion_4_sufficiency(announce, chain):
    res = chain["sufficiency"]
    ok = res.passed and res.cases > 0
    detail = f"{res.counts.get('confirmed', 0)}/{res.cases} certified candidates confirmed"
    assert announce(4, "sufficiency agreement", ok, detail), res.failures


def test_criterion_5_scalarization(announce, chain):
    res = chain["scalarization"]
    ok = res.passed and res.cases == chain["necessity"].cases
    detail = f"{res.cases - len(res.failures)}/{res.cases} argmin memberships"
    assert announce(5, "scalarization coherence", ok, detail), res.failures


def test_criterion_6_lagrangian(announce, chain):
    lag = chain["lagrangian"]
    back = backward_campaign(needed=200)
    ok = lag.passed and lag.cases == chain["necessity"].cases and back.passed
    detail = (
        f"construction {lag.cases - len(lag.failures)}/{lag.cases}, "
        f"backward {back.cases} draws with {len(back.failures)} violations"
    )
    assert announce(6, "vector Lagrangian construction and backward direction", ok, detail), (
        lag.failures, back.failures,
    )


def test_criterion_7_lp_engine(announce):
    res = lp_campaign(1000, 500, seed=0)
    ok = res.passed and res.cases == 1500
    detail = f"{res.cases} systems, {len(res.failures)} failures, {res.counts}"
    assert announce(7, "LP engine soundness", ok, detail), res.failures


def test_criterion_8_dual_pairing(announce):
    res = dual_pairing_campaign(1_000_000)
    ok = res.passed and res.cases >= 1_000_000
    detail = f"{res.cases} pairs, {len(res.failures)} violations, {res.elapsed:.1f}s"
    assert announce(8, "dual pairing positivity", ok, detail), res.failures
