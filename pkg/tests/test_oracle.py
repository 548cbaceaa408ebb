import math

import pytest

from hyperdiam.errors import FeasibilityError, ParameterError
from hyperdiam.hypergraph import UniformHypergraph
from hyperdiam.oracle import (
    brute_force_distance,
    brute_force_distances,
    enumerate_exact,
    exact_fkg_check,
    exact_pair_probabilities,
    exact_size_biased_check,
)
from hyperdiam.parametrization import exact_remote_pair_mean_d2, graph_remote_pair_mean

H = UniformHypergraph.from_edges


def test_triangle_diameter_one():
    law = enumerate_exact(3, 2, 0.5, 1)
    assert law.p_diam(1) == 0.125
    assert law.total() == 1.0


def test_triangle_remote_pairs_binomial():
    # with three vertices a pair is at distance > 1 iff its own edge is absent
    p = 0.37
    law = enumerate_exact(3, 2, p, 1)
    for k in range(4):
        assert law.remote[k] == pytest.approx(math.comb(3, k) * (1 - p) ** k * p ** (3 - k), rel=1e-14)


def test_single_edge_hypergraph():
    law = enumerate_exact(3, 3, 0.2, 1)
    assert law.diameter == {1: pytest.approx(0.2), math.inf: pytest.approx(0.8)}


@pytest.mark.parametrize("n,t,p,d", [(4, 2, 0.3, 1), (5, 2, 0.5, 2), (5, 3, 0.4, 1), (6, 4, 0.7, 2), (5, 2, 0.01, 3)])
def test_total_and_mean(n, t, p, d):
    law = enumerate_exact(n, t, p, d)
    assert abs(law.total() - 1) <= 1e-12
    assert abs(math.fsum(law.diameter.values()) - 1) <= 1e-12
    assert law.mean_w() == pytest.approx(math.comb(n, 2) * law.pair_marginal, rel=1e-12)
    single, _ = exact_pair_probabilities(n, t, p, d)
    assert max(single) - min(single) <= 1e-15  # exchangeable pairs


def test_known_diameter_law():
    law = enumerate_exact(5, 2, 0.5, 2)
    # counts of labelled graphs on 5 vertices by diameter, over 2^10
    assert law.p_diam(1) == 1 / 1024
    assert law.p_diam(2) == pytest.approx(367 / 1024, abs=1e-15)
    assert law.p_diam(3) == pytest.approx(300 / 1024, abs=1e-15)
    assert law.p_diam(4) == pytest.approx(60 / 1024, abs=1e-15)
    assert law.p_diam(math.inf) == pytest.approx(296 / 1024, abs=1e-15)


@pytest.mark.parametrize("n,t,p", [(5, 2, 0.3), (6, 2, 0.45), (5, 3, 0.2), (6, 3, 0.05)])
def test_exact_mean_matches_inclusion_exclusion(n, t, p):
    if math.comb(n, t) > 24:
        pytest.skip("outside enumeration cap")
    law = enumerate_exact(n, t, p, 2)
    assert law.mean_w() == pytest.approx(exact_remote_pair_mean_d2(n, t, p), rel=1e-12)
    if t == 2:
        assert law.mean_w() == pytest.approx(graph_remote_pair_mean(n, p), rel=1e-12)


def test_as_dict():
    doc = enumerate_exact(4, 2, 0.5, 1).as_dict()
    assert doc["total"] == 1.0
    assert "inf" in doc["diameter"]
    assert set(doc) >= {"n", "t", "p", "d", "remote_pairs", "mean_w"}


@pytest.mark.parametrize("n,t,d", [(4, 2, 1), (5, 2, 2), (5, 3, 1)])
def test_fkg_gap_nonnegative(n, t, d):
    for p in (0.1, 0.5, 0.9):
        assert exact_fkg_check(n, t, p, d) >= -1e-12


def test_fkg_degenerate_p():
    assert exact_fkg_check(4, 2, 0.0, 1) == 0.0
    assert exact_fkg_check(4, 2, 1.0, 1) == 0.0


@pytest.mark.parametrize("n,p,d", [(4, 0.5, 1), (5, 0.4, 2), (5, 0.7, 1)])
def test_size_biased_dominance(n, p, d):
    rep = exact_size_biased_check(n, 2, p, d)
    assert rep.holds
    assert rep.cdf_shifted[-1] == pytest.approx(1, abs=1e-12)
    assert rep.cdf_size_biased[-1] == pytest.approx(1, abs=1e-12)
    # E W* = E W^2 / E W
    law = enumerate_exact(n, 2, p, d)
    ew2 = math.fsum(k * k * v for k, v in law.remote.items())
    pmf = [b - a for a, b in zip([0.0] + rep.cdf_size_biased, rep.cdf_size_biased)]
    assert math.fsum(k * v for k, v in enumerate(pmf)) == pytest.approx(ew2 / law.mean_w(), rel=1e-10)


def test_size_biased_degenerate():
    with pytest.raises(ParameterError, match="degenerate"):
        exact_size_biased_check(4, 2, 1.0, 1)


def test_enumeration_cap():
    with pytest.raises(FeasibilityError):
        enumerate_exact(8, 2, 0.5, 2)
    with pytest.raises(FeasibilityError):
        enumerate_exact(5, 2, 0.5, 2, cap=9)
    with pytest.raises(ParameterError):
        enumerate_exact(4, 2, 0.5, 0)
    with pytest.raises(ParameterError):
        enumerate_exact(4, 2, 1.5, 1)


def test_brute_force_examples():
    h = H(5, 3, [(0, 1, 2), (2, 3, 4)])
    assert brute_force_distances(h, 0) == [0, 1, 1, 2, 2]
    assert brute_force_distance(h, 4, 0) == 2
    assert brute_force_distance(H(4, 3, [(0, 1, 2)]), 0, 3) == math.inf
    cycle = H(6, 2, [(i, (i + 1) % 6) for i in range(6)])
    assert brute_force_distances(cycle, 0) == [0, 1, 2, 3, 2, 1]


def test_brute_force_limits():
    big = UniformHypergraph.complete(6, 2)  # 15 edges
    with pytest.raises(FeasibilityError):
        brute_force_distances(big, 0)
    with pytest.raises(ParameterError):
        brute_force_distance(H(3, 2, [(0, 1)]), 0, 3)
