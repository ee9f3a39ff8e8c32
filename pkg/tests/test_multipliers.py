import numpy as np
import pytest

from conecert.cones import PolyhedralCone
from conecert.convexity import Sampling
from conecert.generators import generate_random_instance
from conecert.instance import SetValuedMap, feasible_set, shift_objective
from conecert.multipliers import (
    MultiplierCertificate,
    alternative,
    check_nnamcq,
    check_scq,
    find_multipliers,
    scalarize_and_solve,
    solve_system_i,
    necessity_pipeline,
    sufficiency_check,
    characterization_check,
    verify_certificate,
    weak_efficiency_bruteforce,
    weak_efficiency_scan,
)
from conftest import inst

FAST = Sampling(pair_count=1000)


# ---------------------------------------------------------------- system (i)

def test_system_i_witness_by_sign():
    w = solve_system_i(inst({"a": ([[-1, -1]], [[0]], [[0]])}))
    assert w is not None and w.x == "a"
    assert np.allclose(w.y, [-1, -1]) and w.zero_index == 0


def test_system_i_needs_strict_negativity():
    assert solve_system_i(inst({"a": ([[-1, 1]], [[0]], [[0]])})) is None


def test_system_i_scans_every_label():
    I = inst({"a": ([[1, 1]], [[0]], [[0]]), "b": ([[-0.5, -0.5]], [[0]], [[0]])})
    w = solve_system_i(I)
    assert w.x == "b" and np.allclose(w.y, [-0.5, -0.5])


def test_system_i_respects_margin():
    I = inst({"a": ([[-1e-8, -1]], [[0]], [[0]])})
    assert solve_system_i(I) is None
    assert solve_system_i(I, margin=1e-9) is not None


# ---------------------------------------------------------------- system (ii)

def test_certificate_on_tiny_instance(tiny):
    D = feasible_set(tiny)
    cert = find_multipliers(tiny, D, tiny.f)
    assert cert.normalization == "N1"
    assert np.allclose(cert.xi, [1]) and np.allclose(cert.eta, [0]) and np.allclose(cert.zeta, [0])
    assert cert.xi_nonzero and cert.min_slack >= 0


def test_negative_shifted_value_blocks_nonzero_xi():
    I = inst({"a": ([[-1]], [[-1]], [[0]])}, p=1)
    assert find_multipliers(I, ["a"], I.f, require_xi_nonzero=True) is None
    relaxed = find_multipliers(I, ["a"], I.f)
    assert relaxed is not None and not relaxed.xi_nonzero


def test_empty_domain_is_vacuous(tiny):
    cert = find_multipliers(tiny, [], tiny.f, require_xi_nonzero=True)
    assert cert.vacuous and cert.xi_nonzero and cert.min_slack is None


def test_domain_outside_instance(tiny):
    with pytest.raises(Exception):
        find_multipliers(tiny, ["zz"], tiny.f)


def test_normalization_order():
    # xi must vanish (f = -1), eta must vanish (g = -1 at w = 0), zeta pinned negative
    I = inst({"a": ([[-1]], [[-1]], [[0], [1]]), "b": ([[-1]], [[-1]], [[0], [-2]])}, p=1)
    cert = find_multipliers(I, ["a", "b"], I.f)
    assert cert is None
    J = inst({"a": ([[-1]], [[-1]], [[0], [-1]])}, p=1)
    cert = find_multipliers(J, ["a"], J.f)
    assert cert.normalization == "N3[0]-" and cert.zeta[0] == pytest.approx(-1)


def test_certificates_are_sparse_vertices():
    I = inst({"a": ([[0, 0]], [[0]], [[0]]), "b": ([[1, 2]], [[0]], [[0]])})
    cert = find_multipliers(I, ["a", "b"], I.f)
    assert np.count_nonzero(np.abs(cert.xi) > 1e-12) == 1


# ---------------------------------------------------------------- verification

def test_verification_passes_on_tiny(tiny):
    D = feasible_set(tiny)
    cert = find_multipliers(tiny, D, tiny.f)
    chk = verify_certificate(tiny, D, tiny.f, cert, "a", [0])
    assert chk.passed
    assert chk.values["complementary_slackness"] == 0
    assert chk.values["min_slack"] >= 0


def test_complementary_slackness_failure():
    I = inst({"a": ([[0]], [[-1]], [[0]])}, p=1)
    cert = MultiplierCertificate(np.array([1.0]), np.array([1.0]), np.array([0.0]), "N1", None, True)
    chk = verify_certificate(I, ["a"], I.f, cert, "a", [0])
    assert not chk.clauses["complementary_slackness"]
    assert chk.values["complementary_slackness"] == pytest.approx(-1)


def test_zero_certificate_fails_normalization(tiny):
    cert = MultiplierCertificate(np.zeros(1), np.zeros(1), np.zeros(1), "N1", 0.0, False)
    chk = verify_certificate(tiny, ["a", "b"], tiny.f, cert, "a", [0])
    assert chk.values["normalization_residual"] == pytest.approx(1)
    assert not chk.passed


def test_equality_gap_is_reported(tiny):
    cert = MultiplierCertificate(np.ones(1), np.zeros(1), np.zeros(1), "N1", 0.0, True)
    chk = verify_certificate(tiny, ["b"], tiny.f, cert, "a", [0])
    assert chk.clauses["lagrangian_bound"]
    assert chk.values["equality_gap"] == pytest.approx(1)


# ---------------------------------------------------------------- efficiency

def test_incomparable_values_are_efficient():
    I = inst({"a": ([[0, 1]], [[-1]], [[0]]), "b": ([[1, 0]], [[-1]], [[0]])})
    assert weak_efficiency_bruteforce(I, ["a", "b"], "a").weakly_efficient


def test_dominated_value():
    I = inst({"a": ([[1, 1]], [[-1]], [[0]]), "b": ([[0, 0]], [[-1]], [[0]])})
    v = weak_efficiency_bruteforce(I, ["a", "b"], "a")
    assert not v.weakly_efficient
    assert v.dominator[0] == "b" and np.allclose(v.dominator[1], [0, 0])


def test_second_candidate_witnesses_efficiency():
    I = inst({"a": ([[1, 1], [0, 2]], [[-1]], [[0]]), "b": ([[0.5, 0.5]], [[-1]], [[0]])})
    v = weak_efficiency_bruteforce(I, ["a", "b"], "a")
    assert v.weakly_efficient and np.allclose(v.ybar, [0, 2])
    assert v.efficient_indices == (1,)
    assert v.dominators[0][1] == "b"


def _scan_other_order(instance, D, xbar, margin=1e-7):
    # independent oracle: loop over comparison values first, candidates second
    cands = instance.f[xbar]
    dominated = np.zeros(cands.shape[0], dtype=bool)
    N = instance.cone_y.facet_normals
    for x in reversed(D):
        for y in instance.f[x][::-1]:
            for k in range(cands.shape[0]):
                if np.all(N @ (cands[k] - y) > margin):
                    dominated[k] = True
    return not dominated.all()


@pytest.mark.parametrize("seed", range(500))
def test_bruteforce_agrees_with_reordered_scan(seed):
    I = generate_random_instance(seed, n_labels=6, values_per_map=3, cone_kind=("orthant", "skewed")[seed % 2])
    D = feasible_set(I).members
    for x in D:
        assert weak_efficiency_bruteforce(I, D, x).weakly_efficient == _scan_other_order(I, D, x)


def test_scan_with_empty_comparison():
    v = weak_efficiency_scan(np.zeros((1, 2)), [], PolyhedralCone.orthant(2))
    assert v.weakly_efficient


# ---------------------------------------------------------------- constraint qualifications

def test_nnamcq_holds_with_two_signed_equalities():
    I = inst({"a": ([[0, 0]], [[-1]], [[0], [-1]]), "b": ([[0, 0]], [[-1]], [[0], [1]])})
    assert check_nnamcq(I, ["a", "b"], "a").holds


def test_nnamcq_violated_by_pure_eta():
    I = inst({"a": ([[0, 0]], [[0]], [[0]])})
    res = check_nnamcq(I, ["a"], "a")
    assert not res.holds
    assert res.min_eta_at_xbar == pytest.approx(0)
    assert res.min_combined == pytest.approx(0)
    assert np.abs(np.concatenate([res.eta, res.zeta])).max() > 0


def test_nnamcq_without_equalities():
    I = inst({"a": ([[0, 0]], [[-1], [-2]])}, r=0)
    assert check_nnamcq(I, ["a"], "a").holds


def test_scq_common_negative_value():
    I = inst({"a": ([[0]], [[-1]], [[-1]])}, p=1)
    rep = check_scq(I, ["a"], direction_samples=60, seed=1)
    assert len(rep.satisfied) == 60
    for (eta, zeta), ok in zip(rep.directions, rep.satisfied):
        t = -eta[0]
        assert ok == (t < -1e-9 and abs(t - (-zeta[0])) <= 1e-9)
    assert rep.violated


def test_scq_zero_equalities_flagged():
    I = inst({"a": ([[0]], [[-1]], [[0]])}, p=1)
    rep = check_scq(I, ["a"], direction_samples=30)
    assert not any(rep.satisfied)
    assert any("= {0}" in f for f in rep.flags)


def test_scq_without_equalities_holds_on_negative_g():
    I = inst({"a": ([[0]], [[-1], [-3]])}, p=1, r=0)
    rep = check_scq(I, ["a"], direction_samples=50)
    assert all(rep.satisfied) and not rep.violated


def test_scq_needs_a_domain(tiny):
    with pytest.raises(ValueError):
        check_scq(tiny, [], 10)


# ---------------------------------------------------------------- scalarization

@pytest.mark.parametrize(
    "xi,f,argmin",
    [
        ([1, 1], {"a": [[0, 1]], "b": [[1, 0]]}, ("a", "b")),
        ([1, 0], {"a": [[0, 1]], "b": [[1, 0]]}, ("a",)),
        ([1, 1], {"a": [[1, 1], [0, 2]], "b": [[3, 0]]}, ("a",)),
    ],
)
def test_scalarization_argmin(xi, f, argmin):
    I = inst({x: (v, [[-1]], [[0]]) for x, v in f.items()})
    assert scalarize_and_solve(I, list(f), xi).argmin == argmin


def test_scalarization_rejects_non_dual_xi(tiny):
    with pytest.raises(ValueError):
        scalarize_and_solve(tiny, ["a"], [-1])


# ---------------------------------------------------------------- pipelines

def test_necessity_on_chain_instance(chain4):
    D = feasible_set(chain4).members
    xbar = next(x for x in D if weak_efficiency_bruteforce(chain4, D, x).weakly_efficient)
    rep = necessity_pipeline(chain4, xbar, FAST, require_xi_nonzero=True)
    assert rep.status == "certified"
    assert rep.check.passed
    assert not rep.a1.refuted


@pytest.fixture(scope="module")
def annulus_points(example21):
    """The quarter-annulus domain with the single-valued objective f(x) = {x}."""
    return example21.with_objective(SetValuedMap(2, {x: v[:1] for x, v in example21.f.items()}))


def test_full_arc_objective_is_certified_through_an_endpoint(example21, diagonal_label):
    # every f(x) contains (1, 0), where xi = (0, 1) supports f(D)
    rep = necessity_pipeline(example21, diagonal_label, FAST, require_xi_nonzero=True, check_a1=False)
    assert rep.status == "certified"
    assert np.allclose(rep.ybar, [1, 0])


def test_necessity_hypothesis_unmet_on_annulus(annulus_points, diagonal_label):
    rep = necessity_pipeline(annulus_points, diagonal_label, Sampling(), require_xi_nonzero=True)
    assert rep.efficiency.weakly_efficient
    assert rep.status == "hypothesis-unmet"
    assert rep.a1.objective.refuted


def test_necessity_relaxed_finds_abnormal_multipliers(annulus_points, diagonal_label):
    rep = necessity_pipeline(annulus_points, diagonal_label, FAST, check_a1=False)
    assert not rep.nnamcq.holds
    assert rep.status == "abnormal-certificate"


def test_necessity_short_circuits():
    I = inst({"a": ([[1, 1]], [[-1]], [[0]]), "b": ([[0, 0]], [[-1]], [[0]])})
    rep = necessity_pipeline(I, "a", FAST)
    assert rep.status == "not-weakly-efficient" and rep.certificate is None
    assert rep.efficiency.dominator[0] == "b"


def test_necessity_requires_feasibility():
    I = inst({"a": ([[1, 1]], [[1]], [[0]]), "b": ([[0, 0]], [[-1]], [[0]])})
    with pytest.raises(ValueError):
        necessity_pipeline(I, "a", FAST)


def _nnamcq_chain_case():
    for seed in range(0, 400, 2):
        I = generate_random_instance(seed, n_labels=5, r=0, family="chain")
        D = feasible_set(I).members
        for x in D:
            if check_nnamcq(I, D, x).holds:
                return I, x
    raise AssertionError("no chain instance with NNAMCQ")


def test_sufficiency_confirms():
    I, xbar = _nnamcq_chain_case()
    rep = necessity_pipeline(I, xbar, FAST, require_xi_nonzero=True, check_a1=False)
    if rep.status == "not-weakly-efficient":
        pytest.skip("first NNAMCQ label is dominated")
    s = sufficiency_check(I, xbar, rep.certificate, rep.ybar)
    assert s.status == "confirmed"
    assert s.efficiency.weakly_efficient


def test_sufficiency_rejects_zero_xi(tiny):
    cert = MultiplierCertificate(np.zeros(1), np.ones(1), np.zeros(1), "N2", 0.0, False)
    with pytest.raises(ValueError):
        sufficiency_check(tiny, "a", cert, [0])


def test_sufficiency_not_claimed_without_nnamcq(tiny):
    cert = find_multipliers(tiny, ["a", "b"], shift_objective(tiny, "a", [0]))
    s = sufficiency_check(tiny, "a", cert, [0])
    assert s.status == "cq-unmet"


def test_alternative_statuses():
    assert alternative(inst({"a": ([[-1, -1]], [[-1]], [[0]])})).status == "system-i"
    I = inst({"a": ([[0, 0]], [[-1]], [[0]]), "b": ([[1, 2]], [[-1]], [[0]])})
    rep = alternative(I, require_xi_nonzero=True)
    assert rep.status == "system-ii" and rep.certificate.xi_nonzero


def test_characterization_flags_scq(tiny):
    rep = characterization_check(tiny, "a", FAST, direction_samples=20)
    assert rep.scq.violated
    assert rep.status == "scq-unmet"
    assert rep.necessity.certified
