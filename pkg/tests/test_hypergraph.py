import math
from itertools import combinations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.stats import binom, chisquare

from hyperdiam.errors import FormatError, ParameterError
from hyperdiam.hypergraph import (
    SampleConfig,
    UniformHypergraph,
    coupled_sample,
    format_hypergraph,
    parse_hypergraph,
    rank_many,
    rank_subset,
    read_hypergraph,
    sample_uniform_hypergraph,
    sample_with_rng,
    sampling_strategy,
    unrank_many,
    unrank_subset,
    write_hypergraph,
)


def colex_listing(n, t):
    return sorted(combinations(range(n), t), key=lambda s: s[::-1])


def test_unrank_first_and_last():
    assert unrank_subset(0, 5, 2) == (0, 1)
    assert unrank_subset(9, 5, 2) == (3, 4)


def test_unrank_matches_brute_force_listing():
    listing = colex_listing(5, 3)
    assert unrank_subset(5, 5, 3) == listing[5] == (0, 2, 4)
    for n, t in [(5, 2), (6, 3), (7, 4), (8, 1)]:
        assert [unrank_subset(r, n, t) for r in range(math.comb(n, t))] == colex_listing(n, t)


def test_rank_examples():
    assert rank_subset((0, 1), 5) == 0
    assert rank_subset((3, 4), 5) == 9


def test_round_trip_exhaustive_7_3():
    for r in range(35):
        assert rank_subset(unrank_subset(r, 7, 3), 7) == r


@given(st.integers(3, 40), st.integers(2, 5), st.data())
def test_round_trip_property(n, t, data):
    t = min(t, n)
    r = data.draw(st.integers(0, math.comb(n, t) - 1))
    s = unrank_subset(r, n, t)
    assert list(s) == sorted(set(s)) and len(s) == t
    assert rank_subset(s, n) == r


def test_vectorised_unrank_agrees():
    ranks = np.arange(math.comb(9, 4))
    rows = unrank_many(ranks, 9, 4)
    assert [tuple(r) for r in rows] == colex_listing(9, 4)
    assert np.array_equal(rank_many(rows, 9), ranks)


@pytest.mark.parametrize("r,n,t", [(-1, 5, 2), (10, 5, 2)])
def test_unrank_out_of_range(r, n, t):
    with pytest.raises(ParameterError):
        unrank_subset(r, n, t)


@pytest.mark.parametrize("s", [(1, 1), (2, 1), (0, 5), ()])
def test_rank_malformed(s):
    with pytest.raises(ParameterError):
        rank_subset(s, 5)


def test_canonical_storage_and_incidence():
    h = UniformHypergraph.from_edges(5, 3, [(4, 3, 2), (2, 1, 0)])
    assert [tuple(e) for e in h.edges] == [(0, 1, 2), (2, 3, 4)]
    assert list(h.incidence(2)) == [0, 1]
    assert list(h.incidence(0)) == [0]
    for v in range(h.n):
        for e in range(h.m):
            assert (v in h.edges[e]) == (e in h.incidence(v))
    with pytest.raises(ValueError):
        h.edges[0, 0] = 3


@pytest.mark.parametrize("edges", [[(0, 1), (1, 0)], [(0, 0)], [(0, 7)], [(0, 1, 2)]])
def test_invalid_edges_rejected(edges):
    with pytest.raises(ParameterError):
        UniformHypergraph.from_edges(5, 2, edges)


def test_incidence_rebuild_identical():
    h = sample_uniform_hypergraph(SampleConfig(12, 3, 0.2, seed=4))
    again = UniformHypergraph(h.n, h.t, h.edges.copy())
    for v in range(h.n):
        assert np.array_equal(h.incidence(v), again.incidence(v))


def test_sample_degenerate_probabilities():
    assert sample_uniform_hypergraph(SampleConfig(5, 2, 0.0)).m == 0
    full = sample_uniform_hypergraph(SampleConfig(4, 3, 1.0))
    assert full == UniformHypergraph.complete(4, 3)
    assert full.m == 4


@pytest.mark.parametrize("n,t,p", [(5, 1, 0.5), (2, 3, 0.5), (5, 2, -0.1), (5, 2, 1.5)])
def test_sample_config_validation(n, t, p):
    with pytest.raises(ParameterError):
        SampleConfig(n, t, p)


def test_sampling_is_reproducible():
    cfg = SampleConfig(40, 3, 0.01, seed=123)
    assert sample_uniform_hypergraph(cfg) == sample_uniform_hypergraph(cfg)


def test_edge_count_is_binomial():
    trials = 100_000
    counts = np.zeros(11)
    for s in range(trials):
        counts[sample_uniform_hypergraph(SampleConfig(5, 2, 0.5, seed=s)).m] += 1
    expected = binom.pmf(np.arange(11), 10, 0.5) * trials
    assert chisquare(counts, expected).pvalue > 0.001


def test_per_edge_marginals_exchangeable():
    trials = 100_000
    rng = np.random.default_rng(7)
    hits = np.zeros(10)
    for _ in range(trials):
        h = sample_with_rng(rng, 5, 2, 0.3)
        hits[rank_many(h.edges, 5)] += 1
    sigma = math.sqrt(0.3 * 0.7 * trials)
    assert np.all(np.abs(hits - 0.3 * trials) <= 4 * sigma)


def test_sparse_path_edge_count():
    # C(200, 4) ~ 6.5e7 > dense limit
    assert sampling_strategy(200, 4, 1e-6)["path"] == "sparse"
    ms = [sample_uniform_hypergraph(SampleConfig(200, 4, 1e-6, seed=s)).m for s in range(400)]
    mean = math.comb(200, 4) * 1e-6
    assert abs(np.mean(ms) - mean) < 4 * math.sqrt(mean / 400)
    h = sample_uniform_hypergraph(SampleConfig(200, 4, 1e-6, seed=1))
    assert len(h.edge_set()) == h.m
    assert h.ranks() == sorted(h.ranks())


def test_huge_universe_uses_python_ints():
    info = sampling_strategy(3000, 8, 1e-22)
    assert info["universe"] > 2**63 and info["edge_count"] == "exact"
    h = sample_uniform_hypergraph(SampleConfig(3000, 8, 1e-22, seed=3))
    assert h.m < 200 and all(len(set(e)) == 8 for e in h.edge_set())
    assert sampling_strategy(3000, 8, 1e-10)["edge_count"] == "normal-approx"


def test_coupled_extremes():
    h1, h2 = coupled_sample(6, 2, 0.0, 1.0, seed=1)
    assert h1.m == 0 and h2 == UniformHypergraph.complete(6, 2)
    a, b = coupled_sample(20, 3, 0.2, 0.2, seed=9)
    assert a == b


def test_coupled_matches_marginal_sampler():
    a, _ = coupled_sample(15, 2, 0.3, 0.6, seed=11)
    assert a == sample_uniform_hypergraph(SampleConfig(15, 2, 0.3, seed=11))


def test_coupled_containment_500_samples():
    for s in range(500):
        h1, h2 = coupled_sample(50, 2, 0.1, 0.3, seed=s)
        assert h1.edge_set() <= h2.edge_set()


@settings(max_examples=30, deadline=None)
@given(st.floats(0, 1), st.floats(0, 1), st.integers(0, 2**32))
def test_coupled_containment_property(a, b, seed):
    p1, p2 = sorted((a, b))
    h1, h2 = coupled_sample(9, 3, p1, p2, seed)
    assert h1.is_subhypergraph_of(h2)


def test_coupled_sparse_containment():
    for s in range(20):
        h1, h2 = coupled_sample(200, 4, 2e-7, 1e-6, seed=s)
        assert h1.edge_set() <= h2.edge_set()


def test_coupled_rejects_reversed():
    with pytest.raises(ParameterError):
        coupled_sample(5, 2, 0.5, 0.2, seed=0)


def test_text_round_trip(tmp_path):
    h = sample_uniform_hypergraph(SampleConfig(10, 3, 0.1, seed=5))
    path = tmp_path / "h.txt"
    write_hypergraph(h, path)
    lines = path.read_text().splitlines()
    assert lines[0] == f"10 3 {h.m}"
    assert read_hypergraph(path) == h


@settings(max_examples=40)
@given(st.integers(3, 8), st.data())
def test_parse_format_property(n, data):
    t = data.draw(st.integers(2, min(n, 4)))
    ranks = data.draw(st.sets(st.integers(0, math.comb(n, t) - 1), max_size=12))
    h = UniformHypergraph.from_edges(n, t, [unrank_subset(r, n, t) for r in ranks])
    assert parse_hypergraph(format_hypergraph(h)) == h


@pytest.mark.parametrize("text,line", [
    ("", 1),
    ("4 2\n", 1),
    ("4 2 2\n0 1\n", 2),
    ("4 2 2\n0 1\n1 0\n", 3),
    ("4 2 1\n0 4\n", 2),
    ("4 2 1\n0 0\n", 2),
    ("4 2 1\n0 x\n", 2),
    ("4 3 1\n0 1\n", 2),
])
def test_reader_rejects_malformed(text, line):
    with pytest.raises(FormatError) as err:
        parse_hypergraph(text)
    assert err.value.line == line
