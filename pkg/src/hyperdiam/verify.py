"""Pass/fail check battery behind ``hyperdiam verify``."""
from __future__ import annotations

import math
from dataclasses import dataclass

from .montecarlo import coupling_monotonicity_test, simulate_fixed_p, size_biased_dominance_test
from .oracle import enumerate_exact, exact_fkg_check, exact_size_biased_check

P_GRID = [round(0.1 * i, 1) for i in range(1, 10)]
FKG_TOL = 1e-12


@dataclass
class Check:
    name: str
    passed: bool
    detail: str


def fkg_check(n, t, d, p_grid=P_GRID, cap=24) -> Check:
    gaps = [exact_fkg_check(n, t, p, d, cap=cap) for p in p_grid]
    worst = min(gaps)
    return Check(f"fkg n={n} t={t} d={d}", worst >= -FKG_TOL, f"min gap {worst:.3e} over p in {p_grid}")


def exact_dominance_check(n, t, p, d, cap=24) -> Check:
    rep = exact_size_biased_check(n, t, p, d, cap=cap)
    return Check(f"size-biased exact n={n} t={t} p={p} d={d}", rep.holds,
                 f"max CDF(W*) - CDF(W+1-X_J) = {rep.max_gap:.3e}")


def mc_dominance_check(n, t, p, d, trials, seed) -> Check:
    exact = exact_size_biased_check(n, t, p, d)
    rep = size_biased_dominance_test(n, t, p, d, trials, seed=seed)
    ok = rep.consistent and exact.holds
    return Check(f"size-biased MC n={n} t={t} p={p} d={d}", ok,
                 f"max gap {rep.max_gap:.4f} (3-sigma consistent: {rep.consistent}; oracle holds: {exact.holds})")


def coupling_check(n, t, p1, p2, r, trials, seed) -> Check:
    rep = coupling_monotonicity_test(n, t, p1, p2, r, trials, seed=seed)
    return Check(f"coupling n={n} t={t} p1={p1} p2={p2}", rep.violations == 0,
                 f"{rep.violations} violations in {trials} trials; "
                 f"P(diam<={r}) {rep.freq_le_r_sparse:.3f} <= {rep.freq_le_r_dense:.3f}")


def exact_monotonicity_check(n, t, d, p_grid=P_GRID, cap=24) -> Check:
    laws = [enumerate_exact(n, t, p, d, cap=cap) for p in p_grid]
    radii = sorted({k for law in laws for k in law.diameter if k != math.inf})
    worst = 0.0
    for lo, hi in zip(laws, laws[1:]):
        for r in radii:
            worst = max(worst, lo.p_diam_le(r) - hi.p_diam_le(r))
    return Check(f"exact coupling monotonicity n={n} t={t}", worst <= FKG_TOL,
                 f"max P_lo(diam<=r) - P_hi(diam<=r) = {worst:.3e}")


def oracle_agreement(n, t, p, d, trials, seed, cap=24) -> tuple[Check, dict]:
    """Monte Carlo P(diam = k) against the exact law, 3 binomial SEs per k."""
    law = enumerate_exact(n, t, p, d, cap=cap)
    records = simulate_fixed_p(n, t, p, d, trials, master_seed=seed)
    counts: dict = {}
    for r in records:
        counts[r.diam] = counts.get(r.diam, 0) + 1
    rows = {}
    ok = abs(law.total() - 1.0) <= 1e-12
    for k in sorted(set(counts) | set(law.diameter)):
        exact = law.p_diam(k)
        emp = counts.get(k, 0) / trials
        se = math.sqrt(exact * (1 - exact) / trials)
        good = abs(emp - exact) <= 3 * se if se > 0 else emp == exact
        ok &= good
        rows[k] = (emp, exact, se, good)
    worst = max((abs(e - x) / s if s else 0.0) for e, x, s, _ in rows.values())
    return Check(f"oracle vs MC n={n} t={t} p={p} d={d}", ok,
                 f"{trials} trials, worst |emp-exact| = {worst:.2f} SE, oracle total {law.total():.15f}"), rows


def default_battery(trials: int = 20000, seed: int = 0, cap: int = 24) -> list[Check]:
    checks = []
    for n, t, d in [(4, 2, 1), (4, 2, 2), (5, 2, 1), (5, 2, 2), (5, 3, 1)]:
        checks.append(fkg_check(n, t, d, cap=cap))
    for n in (4, 5):
        for d in (1, 2):
            for p in (0.3, 0.5, 0.7):
                checks.append(exact_dominance_check(n, 2, p, d, cap=cap))
    checks.append(mc_dominance_check(5, 2, 0.4, 2, trials=min(trials, 5000), seed=seed))
    checks.append(coupling_check(60, 2, 0.1, 0.3, 3, 500, seed))
    checks.append(coupling_check(30, 3, 0.005, 0.02, 3, 500, seed))
    checks.append(exact_monotonicity_check(5, 2, 2, cap=cap))
    checks.append(oracle_agreement(5, 2, 0.5, 2, trials, seed, cap=cap)[0])
    return checks


def setting_battery(n: int, t: int, p: float, d: int, trials: int = 20000,
                    seed: int = 0, cap: int = 24) -> list[Check]:
    checks = [fkg_check(n, t, d, p_grid=[p], cap=cap),
              exact_monotonicity_check(n, t, d, cap=cap),
              oracle_agreement(n, t, p, d, trials, seed, cap=cap)[0]]
    if 0 < p < 1:
        checks.insert(1, exact_dominance_check(n, t, p, d, cap=cap))
    return checks
