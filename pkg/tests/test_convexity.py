import numpy as np
import pytest

from conecert.cones import PolyhedralCone
from conecert.convexity import (
    FinitePointSet,
    RayUnion,
    Sampling,
    ScaledConeUnion,
    TranslatedCone,
    Verdict,
    check_condition_a1,
    check_condition_a2,
    check_condition_b1,
    check_set_convexity,
    classify,
    probe_pair,
)
from conecert.generators import generate_random_instance
from conecert.instance import SetValuedMap, feasible_set
from conftest import inst

R2 = PolyhedralCone.orthant(2)
FAST = Sampling(pair_count=2000)


def test_example21_midpoint_witness(example21):
    oracle = TranslatedCone(example21.f.image(), R2, strict=True)
    w = probe_pair(oracle, [1.1, 0.1], [0.1, 1.1], 0.5)
    assert w is not None
    assert np.allclose(w.midpoint, [0.6, 0.6])


def test_single_translated_orthant_is_convex():
    v = check_set_convexity(TranslatedCone(np.zeros((1, 2)), R2, strict=False), pair_count=3000)
    assert v.status is Verdict.NO_COUNTEREXAMPLE


def test_example21_scaled_union_is_the_open_quadrant(example21):
    oracle = ScaledConeUnion(example21.f.image(), R2)
    v = check_set_convexity(oracle, pair_count=3000, seed=4)
    assert v.status is Verdict.NO_COUNTEREXAMPLE
    rng = np.random.default_rng(0)
    assert R2.strict_mask(oracle.sample(rng, 1000)).all()
    Q = 10.0 ** rng.uniform(-3, 0.5, size=(1000, 2))
    assert oracle.contains_many(Q).all()


def test_classify_chain_map():
    f = SetValuedMap(2, {"a": [[0, 0]], "b": [[1, 1]]})
    rep = classify(f, R2, FAST)
    assert all(v.status is Verdict.NO_COUNTEREXAMPLE for v in rep.verdicts().values())
    assert rep.chain_consistent


def test_classify_example21(example21):
    rep = classify(example21.f, R2, Sampling())
    assert rep.convexlike.status is Verdict.NON_CONVEX
    assert rep.subconvexlike.status is Verdict.NON_CONVEX
    assert rep.presubconvexlike.status is Verdict.NO_COUNTEREXAMPLE
    assert rep.chain_consistent
    w = rep.subconvexlike.witness
    oracle = TranslatedCone(example21.f.image(), R2, strict=True)
    assert oracle(w.p1) and oracle(w.p2) and not oracle(w.midpoint)


@pytest.mark.parametrize("seed", range(5))
def test_scalar_objectives_are_subconvexlike(seed):
    rng = np.random.default_rng(seed)
    f = SetValuedMap(1, {f"x{i}": rng.normal(size=(3, 1)) for i in range(5)})
    rep = classify(f, PolyhedralCone.orthant(1), Sampling(pair_count=500, seed=seed))
    assert rep.subconvexlike.status is Verdict.NO_COUNTEREXAMPLE


def test_verdicts_are_seed_deterministic(example21):
    a = classify(example21.f, R2, Sampling(pair_count=500, seed=3)).subconvexlike
    b = classify(example21.f, R2, Sampling(pair_count=500, seed=3)).subconvexlike
    assert a.status is b.status
    assert np.array_equal(a.witness.p1, b.witness.p1)


def test_empty_set_is_vacuous():
    v = check_set_convexity(TranslatedCone(np.zeros((0, 2)), R2, strict=True))
    assert v.status is Verdict.VACUOUS


def test_callable_oracle_with_explicit_sampler():
    disk = lambda p: float(np.dot(p, p)) <= 1.0  # noqa: E731
    sampler = lambda rng, n: rng.uniform(-0.7, 0.7, size=(n, 2))  # noqa: E731
    assert check_set_convexity(disk, sampler, pair_count=500).status is Verdict.NO_COUNTEREXAMPLE
    ring = lambda p: 0.5 <= float(np.dot(p, p)) <= 1.0  # noqa: E731
    ring_sampler = lambda rng, n: np.column_stack(  # noqa: E731
        [np.cos(t := rng.uniform(0, 2 * np.pi, n)), np.sin(t)]
    ) * 0.9
    assert check_set_convexity(ring, ring_sampler, pair_count=500).status is Verdict.NON_CONVEX


def test_lambda_grid_validation():
    with pytest.raises(ValueError):
        Sampling(lambda_grid=(0.0, 0.5))


@pytest.mark.parametrize(
    "h,r,status",
    [
        ([[0]], 1, Verdict.NO_COUNTEREXAMPLE),
        ([[1], [2]], 1, Verdict.NO_COUNTEREXAMPLE),
        ([[1, 0], [0, 1]], 2, Verdict.NON_CONVEX),
    ],
)
def test_equality_factor_of_a1(h, r, status):
    I = inst({"a": ([[0, 0]], [[-1]], h + [[0] * r])}, r=r)
    rep = check_condition_a1(I, "a", [0, 0], FAST)
    assert rep.equality.status is status


def test_rays_miss_the_diagonal():
    w = probe_pair(RayUnion(np.array([[1.0, 0], [0, 1.0]])), [1, 0], [0, 1], 0.5)
    assert w is not None and np.allclose(w.midpoint, [0.5, 0.5])


def test_a2_by_dimension():
    assert check_condition_a2(inst({"a": ([[0, 0]], [[-1]])}, r=0)).holds
    for r in (1, 2):
        rep = check_condition_a2(inst({"a": ([[0, 0]], [[-1]], [[0] * r])}, r=r))
        assert not rep.holds and rep.explanation


def test_b1_on_chain_instance(chain4):
    D = feasible_set(chain4).members
    xbar = D[0]
    rep = check_condition_b1(chain4, xbar, chain4.f[xbar][0], FAST)
    assert not rep.refuted


def test_b1_shifted_example21(example21):
    rep = check_condition_b1(example21, "1,0", [1, 0], FAST)
    assert rep.objective.status is Verdict.NON_CONVEX


def test_b1_two_point_equality_factor():
    I = inst({"a": ([[0, 0]], [[-1]], [[0]]), "b": ([[0, 0]], [[-1]], [[1], [0]])})
    rep = check_condition_b1(I, "a", [0, 0], FAST)
    assert rep.equality.status is Verdict.NON_CONVEX
    assert FinitePointSet(np.array([[0.0], [1.0]])).contains([0.0])


def test_chain_family_classifies_clean(chain4):
    D = feasible_set(chain4).members
    rep = classify(chain4.f, chain4.cone_y, FAST, labels=D)
    assert all(v.status is Verdict.NO_COUNTEREXAMPLE for v in rep.verdicts().values())


def test_opposite_values_scale_to_a_half_plane():
    # the scaled union of (1,-1), (-1,1), (0,0) plus the open quadrant is {y1 + y2 > 0}
    I = inst({"a": ([[1, -1]], [[-1]], [[0]]), "b": ([[-1, 1]], [[-1]], [[0]]), "c": ([[0, 0]], [[-1]], [[0]])})
    rep = check_condition_a1(I, "c", [0, 0], Sampling(pair_count=5000))
    assert rep.objective.status is Verdict.NO_COUNTEREXAMPLE
    assert not rep.refuted


def test_random_two_dimensional_equality_values_refute_a1():
    J = generate_random_instance(3, n_labels=8, r=2)
    D = feasible_set(J).members
    assert check_condition_a1(J, D[0], J.f[D[0]][0], FAST).equality.status is Verdict.NON_CONVEX
