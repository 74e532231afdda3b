import math
from itertools import combinations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import random_metric, random_tree_metric
from golden import SEVEN_D, SIX_D
from hcctree import oracle
from hcctree.metricspace import (
    bad_triangles,
    check_distance_matrix,
    four_point,
    gromov_product,
    hyp_stats,
    hyperbolicity_vector,
    integral_bad_triangles,
    is_metric,
    load_distance_csv,
    save_distance_csv,
    three_point,
    ultrametricity_vector,
)


def test_check_distance_matrix_symmetrizes_small_asymmetry():
    d = np.array([[0, 1 + 1e-12], [1, 0]])
    out = check_distance_matrix(d)
    assert out[0, 1] == out[1, 0]


@pytest.mark.parametrize(
    "bad",
    [
        np.array([[0, 1], [2, 0]]),
        np.array([[1, 1], [1, 0]]),
        np.array([[0, -1], [-1, 0]]),
        np.zeros((2, 3)),
        np.array([[0, np.nan], [np.nan, 0]]),
    ],
)
def test_check_distance_matrix_rejects(bad):
    with pytest.raises(ValueError):
        check_distance_matrix(bad)


def test_csv_round_trip(tmp_path, rng):
    d = random_metric(rng, 6)
    save_distance_csv(tmp_path / "d.csv", d)
    assert np.array_equal(load_distance_csv(tmp_path / "d.csv"), d)


def test_is_metric():
    assert is_metric(SIX_D)
    # the rooted example is not a metric: d(r, d) = 10 > d(r, f) + d(f, d) = 9
    assert not is_metric(SEVEN_D)
    d = np.array([[0, 1, 5], [1, 0, 1], [5, 1, 0]], float)
    assert not is_metric(d)


def test_gromov_product_examples():
    assert gromov_product(SEVEN_D, 0, 1, 1) == 9
    assert gromov_product(SEVEN_D, 0, 1, 2) == 8.5
    assert 2 * (10 - gromov_product(SEVEN_D, 0, 1, 2)) == 3


def test_gromov_product_nonnegative_on_metrics(rng):
    d = random_metric(rng, 7)
    for w in range(7):
        for x in range(7):
            for y in range(7):
                assert gromov_product(d, w, x, y) >= -1e-12


def test_index_errors():
    with pytest.raises(IndexError):
        gromov_product(SEVEN_D, 0, 1, 9)
    with pytest.raises(ValueError):
        three_point(SEVEN_D, 1, 1, 2)
    with pytest.raises(ValueError):
        four_point(SEVEN_D, 1, 2, 3, 3)


def test_three_point_examples():
    d, _ = oracle.tightness_certificate(6)
    assert three_point(d, 0, 1, 2) == 1
    eq = np.ones((3, 3)) - np.eye(3)
    assert three_point(eq, 0, 1, 2) == 0


def test_three_point_matches_enumeration(rng):
    for _ in range(200):
        d = random_metric(rng, 3)
        assert three_point(d, 0, 1, 2) == pytest.approx(oracle.tp_by_enumeration(d, 0, 1, 2), abs=1e-12)


def test_four_point_matches_enumeration_on_many_quadruples(rng):
    # the pair-sum formula is only trusted after agreeing with the definition
    for _ in range(10_000 // 20):
        d = random_metric(rng, 6, integer=bool(rng.integers(2)))
        for q in list(combinations(range(6), 4))[:20]:
            assert four_point(d, *q) == pytest.approx(oracle.fp_by_enumeration(d, *q), abs=1e-12)


def test_four_point_symmetric_under_relabeling(rng):
    from itertools import permutations

    d = random_metric(rng, 8)
    for q in combinations(range(8), 4):
        vals = {round(four_point(d, *p), 12) for p in permutations(q)}
        assert len(vals) == 1


def test_four_point_zero_on_tree_metrics(rng):
    d = random_tree_metric(rng, 9)
    for q in combinations(range(9), 4):
        assert four_point(d, *q) == pytest.approx(0, abs=1e-12)


def test_four_point_bounded_by_three_point_sum(rng):
    d = random_metric(rng, 7)
    for x, y, z, w in combinations(range(7), 4):
        rhs = (three_point(d, x, y, z) + three_point(d, x, y, w)
               + three_point(d, x, z, w) + three_point(d, y, z, w)) / 2
        assert four_point(d, x, y, z, w) <= rhs + 1e-12


def test_vector_lengths_and_layout(rng):
    d = random_metric(rng, 7)
    hv = hyperbolicity_vector(d, 3)
    assert len(hv) == math.comb(6, 3) and hv.base == 3
    uv = ultrametricity_vector(d)
    assert len(uv) == math.comb(7, 3) and uv.base is None
    rest = [i for i in range(7) if i != 3]
    for k, (x, y, z) in enumerate(combinations(rest, 3)):
        assert hv.values[k] == pytest.approx(oracle.fp_by_enumeration(d, x, y, z, 3), abs=1e-12)
    for k, t in enumerate(combinations(range(7), 3)):
        assert uv.values[k] == pytest.approx(oracle.tp_by_enumeration(d, *t), abs=1e-12)


def test_degenerate_sizes():
    d = np.zeros((3, 3))
    assert len(hyperbolicity_vector(d, 0)) == 0
    assert len(ultrametricity_vector(np.zeros((2, 2)))) == 0
    s = hyp_stats(np.zeros((2, 2)))
    assert s.hyp == s.um == s.avg_hyp_1 == 0


def test_tightness_vector():
    d, _ = oracle.tightness_certificate(6)
    uv = ultrametricity_vector(d)
    assert np.count_nonzero(uv.values) == 1 and uv.norm(1) == 1


def test_sum_of_hyperbolicity_vectors(rng):
    for n in range(4, 13):
        d = random_metric(rng, n)
        total = sum(hyperbolicity_vector(d, w).norm(1) for w in range(n))
        assert total == pytest.approx(4 * math.comb(n, 4) * hyp_stats(d).avg_hyp_1, rel=1e-9)


def test_hyp_stats_against_oracle(rng):
    d = random_metric(rng, 10)
    s = hyp_stats(d)
    assert s.exact
    assert s.hyp == pytest.approx(max(oracle.hyperbolicity_max(d, w) for w in range(10)), abs=1e-12)
    assert s.um == pytest.approx(oracle.ultrametricity_max(d), abs=1e-12)
    assert s.avg_hyp_1 == pytest.approx(oracle.avg_hyp_1(d), rel=1e-12)
    assert s.avg_um_1 == pytest.approx(oracle.ultrametricity_l1(d) / math.comb(10, 3), rel=1e-12)
    assert s.hyp >= s.avg_hyp_1 >= 0 and s.um >= s.avg_um_1 >= 0


def test_hyp_stats_power_mean_monotone(rng):
    d = random_metric(rng, 9)
    vals = [hyp_stats(d, p).avg_hyp for p in (1, 2, 3, np.inf)]
    assert all(a <= b + 1e-12 for a, b in zip(vals, vals[1:]))
    assert vals[-1] == pytest.approx(hyp_stats(d).hyp)


def test_sampled_full_population_is_exact(rng):
    d = random_metric(rng, 10)
    exact = hyp_stats(d)
    s = hyp_stats(d, sample=math.comb(10, 4), seed=3)
    assert s.exact
    assert s.avg_hyp_1 == pytest.approx(exact.avg_hyp_1, rel=1e-12)
    assert s.hyp == exact.hyp


def test_sampled_estimate_close(rng):
    d = random_metric(rng, 30)
    exact = hyp_stats(d)
    s = hyp_stats(d, sample=5000, seed=1)
    assert not s.exact and s.seed == 1
    assert abs(s.avg_hyp_1 - exact.avg_hyp_1) <= 4 * s.hyp_halfwidth


def test_hyp_stats_refuses_large_exact():
    with pytest.raises(ValueError):
        hyp_stats(np.zeros((30, 30)), exact_limit=100)


def test_ultrametric_input_has_zero_um(rng):
    from hcctree.fitters import hcc_ultra_fit

    d_U, _ = hcc_ultra_fit(random_metric(rng, 9))
    s = hyp_stats(d_U)
    assert s.um == 0 and s.avg_um_1 == 0


def test_bound_formula():
    d, _ = oracle.tightness_certificate(6)
    s = hyp_stats(d)
    assert s.bound == pytest.approx(8 * math.comb(5, 3) * s.avg_hyp_1 / math.comb(6, 2))


def test_bad_triangles_small():
    assert bad_triangles(4, [(i, j) for i, j in combinations(range(4), 2)]) == 0
    assert bad_triangles(3, [(0, 1), (1, 2)]) == 1
    count, triples = bad_triangles(3, [(0, 1), (1, 2)], return_triples=True)
    assert triples == [(0, 1, 2)]


def test_bad_triangles_random(rng):
    for _ in range(20):
        A = np.triu(rng.random((12, 12)) < 0.4, 1)
        A = A | A.T
        edges = list(zip(*np.nonzero(np.triu(A, 1))))
        assert bad_triangles(12, edges) == oracle.bad_triangle_count(A)
        assert bad_triangles(12, A) == oracle.bad_triangle_count(A)


def test_integral_tightness_and_ultrametric(rng):
    d, _ = oracle.tightness_certificate(6)
    assert integral_bad_triangles(d) == 1
    from hcctree.fitters import hcc_ultra_fit

    assert integral_bad_triangles(hcc_ultra_fit(random_metric(rng, 8))[0]) == 0


@settings(max_examples=40, deadline=None)
@given(st.integers(3, 12), st.integers(0, 2**32 - 1), st.booleans())
def test_integral_identity_property(n, seed, integer):
    d = random_metric(np.random.default_rng(seed), n, integer=integer)
    assert integral_bad_triangles(d) == pytest.approx(oracle.ultrametricity_l1(d), abs=1e-9)
