"""Acceptance criteria, each at its stated tolerance.

Run on its own with ``pytest tests/test_acceptance.py -v``; the per-criterion
PASS/FAIL lines are repeated in the terminal summary.
"""
import math
from itertools import combinations

import numpy as np

from hyperdiam.hypergraph import UniformHypergraph, _colex_combinations
from hyperdiam.metrics import UNREACHABLE, bfs_distances
from hyperdiam.montecarlo import (
    ExperimentConfig,
    coupling_monotonicity_test,
    records_jsonl,
    run_experiment,
    size_biased_dominance_test,
    tv_trend,
)
from hyperdiam.oracle import brute_force_distances, exact_fkg_check, exact_size_biased_check
from hyperdiam.probability import chernoff_tail_bound
from hyperdiam.verify import P_GRID, oracle_agreement


def test_c01_two_point_graph(graph_grid, report):
    s = graph_grid.summary_for(1000)
    two = s.p_diam_two_point
    target = math.exp(-0.5)
    ok = two >= 0.99 and abs(s.p_diam_d - target) <= 0.12
    report("C1 two-point concentration, graph n=1000", ok,
           f"P(diam in {{2,3}})={two:.4f} (>= 0.99), P(diam=2)={s.p_diam_d:.4f} "
           f"vs {target:.4f} +- 0.12, {s.trials} trials")


def test_c02_two_point_hypergraph(hypergraph_run, report):
    s = hypergraph_run.summaries[0]
    two = s.p_diam_two_point
    ok = two >= 0.98 and 0.30 <= s.mean_w <= 0.80
    report("C2 two-point concentration, t=3 n=300", ok,
           f"P(diam in {{2,3}})={two:.4f} (>= 0.98), mean W={s.mean_w:.4f} (in [0.30, 0.80]), "
           f"{s.trials} trials")


def test_c03_poisson_trend(graph_grid, report):
    ok, inversions = tv_trend(graph_grid.summaries)
    cells = ", ".join(f"n={s.n}: {s.tv_poisson:.4f}+-{s.tv_noise:.4f}" for s in graph_grid.summaries)
    report("C3 TV(W, Poi(1/2)) non-increasing in n", ok, f"{cells}; inversions at {inversions}")


def test_c04_oracle_agreement(report):
    check, rows = oracle_agreement(5, 2, 0.5, 2, trials=10**5, seed=4)
    report("C4 Monte Carlo vs exact law, n=5 p=0.5", check.passed, check.detail)


def test_c05_fkg(report):
    settings = [(4, 2, 1), (4, 2, 2), (5, 2, 1), (5, 2, 2), (5, 3, 1)]
    worst = min(exact_fkg_check(n, t, p, d) for n, t, d in settings for p in P_GRID)
    report("C5 FKG gap", worst >= -1e-12, f"min covariance gap {worst:.3e} over {len(settings)} settings x 9 p")


def test_c06_size_biased_dominance(report):
    gaps = [exact_size_biased_check(n, 2, p, d).max_gap for n in (4, 5) for d in (1, 2) for p in P_GRID]
    exact_ok = max(gaps) <= 1e-12
    mc = size_biased_dominance_test(5, 2, 0.4, 2, trials=5000, seed=6)
    direction = exact_size_biased_check(5, 2, 0.4, 2).holds
    report("C6 size-biased dominance", exact_ok and mc.consistent and direction,
           f"exact max CDF gap {max(gaps):.3e} over {len(gaps)} cases; MC (5,2,0.4,2) max gap "
           f"{mc.max_gap:.4f}, 3-sigma consistent={mc.consistent}")


def test_c07_coupling(report):
    a = coupling_monotonicity_test(60, 2, 0.1, 0.3, 3, 500, seed=7)
    b = coupling_monotonicity_test(30, 3, 0.005, 0.02, 3, 500, seed=7)
    report("C7 monotone coupling", a.violations == 0 and b.violations == 0,
           f"violations {a.violations} (n=60 t=2) and {b.violations} (n=30 t=3) over 500 trials each")


def test_c08_chernoff(report):
    rng = np.random.default_rng(8)
    s = rng.binomial(1000, 0.3, size=10**5)
    parts, ok = [], True
    for delta in (0.1, 0.2):
        freq = float(np.mean(np.abs(s - 300) >= delta * 300))
        bound = chernoff_tail_bound(300, delta)
        ok &= freq <= bound
        parts.append(f"delta={delta}: {freq:.5f} <= {bound:.5f}")
    report("C8 Chernoff tail", ok, "; ".join(parts))


def test_c09_determinism(report):
    base = dict(t=2, d=2, c=1.0, n_grid=[100, 200], trials=60, master_seed=99, collect_layers=True)
    streams = [records_jsonl(run_experiment(ExperimentConfig(workers=w, **base)).records).encode()
               for w in (1, 2, 3)]
    report("C9 determinism across worker counts", streams[0] == streams[1] == streams[2],
           f"records.jsonl sizes {[len(s) for s in streams]} bytes for workers 1, 2, 3")


def test_c10_bfs_matches_brute_force(report):
    checked = mismatches = 0
    for n in range(2, 7):
        for t in (2, 3):
            if t > n:
                continue
            universe = list(_colex_combinations(n, t))
            for k in range(min(8, len(universe)) + 1):
                for sub in combinations(universe, k):
                    h = UniformHypergraph.from_edges(n, t, sub)
                    for x in range(n):
                        got = bfs_distances(h, x).dist
                        ref = brute_force_distances(h, x)
                        mismatches += any((math.inf if g == UNREACHABLE else int(g)) != r
                                          for g, r in zip(got, ref))
                    checked += 1
    report("C10 BFS equals brute-force path search", mismatches == 0,
           f"{checked} hypergraphs (n<=6, t in {{2,3}}, <=8 edges), {mismatches} mismatching sources")
