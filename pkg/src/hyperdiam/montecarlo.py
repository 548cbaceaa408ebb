"""Deterministic, parallel Monte Carlo experiments on H(n, t, p).

Every trial draws from its own generator, seeded by a 64-bit mix of
(master_seed, n, trial_index), so results never depend on how trials are
scheduled across workers.
"""
from __future__ import annotations

import csv
import io
import json
import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np
from statsmodels.stats.proportion import proportion_confint

from .errors import InfeasibleConditioningError, ParameterError
from .hypergraph import check_model, coupled_with_rng, sample_with_rng
from .metrics import (
    ConcentrationParams,
    diameter,
    distance_matrix,
    intersection_threshold,
    layer_profile_from_distances,
    omega_star_holds,
)
from .parametrization import MODES, GRAPH, RegimeParams, solve_p, target_probabilities
from .probability import EmpiricalDist, poisson_limit_bound, tv_empirical_vs_poisson, tv_noise

log = logging.getLogger(__name__)

_MASK64 = (1 << 64) - 1


def splitmix64(x: int) -> int:
    x = (x + 0x9E3779B97F4A7C15) & _MASK64
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & _MASK64
    return x ^ (x >> 31)


def derive_seed(master_seed: int, n: int, trial: int) -> int:
    return splitmix64(splitmix64(splitmix64(master_seed & _MASK64) ^ n) ^ trial)


@dataclass
class ExperimentConfig:
    mode: str = GRAPH
    t: int = 2
    d: int = 2
    c: float = 1.0
    n_grid: list[int] = field(default_factory=lambda: [500, 1000])
    trials: int = 1000
    master_seed: int = 0
    workers: int = 1
    collect_layers: bool = False
    layer_sources: int = 1

    def __post_init__(self):
        self.n_grid = [int(n) for n in self.n_grid]
        self.validate()

    def validate(self) -> None:
        if self.mode not in MODES:
            raise ParameterError(f"unknown mode {self.mode!r}")
        if self.trials < 1:
            raise ParameterError(f"trials={self.trials} must be >= 1")
        if not self.n_grid:
            raise ParameterError("n_grid is empty")
        if any(b <= a for a, b in zip(self.n_grid, self.n_grid[1:])):
            raise ParameterError(f"n_grid {self.n_grid} must be strictly increasing")
        if self.workers < 1:
            raise ParameterError(f"workers={self.workers} must be >= 1")
        if self.layer_sources < 1:
            raise ParameterError(f"layer_sources={self.layer_sources} must be >= 1")

    @classmethod
    def from_dict(cls, doc: dict) -> ExperimentConfig:
        known = set(cls.__dataclass_fields__)
        unknown = set(doc) - known
        if unknown:
            raise ParameterError(f"unknown config fields: {sorted(unknown)}")
        return cls(**doc)

    def regimes(self) -> list[RegimeParams]:
        return [solve_p(self.t, self.d, self.c, n, self.mode) for n in self.n_grid]


@dataclass
class TrialRecord:
    n: int
    trial: int
    seed: int
    diam: float  # int or math.inf
    w: int
    layers: dict | None = None

    def to_dict(self) -> dict:
        out = {"n": self.n, "trial": self.trial, "seed": self.seed,
               "diam": "inf" if self.diam == math.inf else int(self.diam), "w": self.w}
        if self.layers:
            out.update(self.layers)
        return out

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), separators=(",", ":"))


def _layer_diagnostics(h, dist, rng, regime: RegimeParams, sources: int) -> dict:
    n, d = h.n, regime.d
    conc = ConcentrationParams.from_regime(regime)
    xs = rng.choice(n, size=min(sources, n), replace=False)
    out = {}
    flags = np.zeros(d - 1, dtype=int)
    exceed = 0
    largest = 0
    cap = intersection_threshold(regime)
    for x in xs:
        prof = layer_profile_from_distances(h, int(x), dist[x], d - 1)
        for k in range(1, d):
            flags[k - 1] += omega_star_holds(prof, regime, conc, k)
        z = int(rng.integers(0, n - 1))
        z += z >= x
        both = int(np.count_nonzero((dist[x] == d - 1) & (dist[z] == d - 1)))
        largest = max(largest, both)
        exceed += both > cap
    for k in range(1, d):
        out[f"omega{k}"] = int(flags[k - 1])
    out["sources"] = len(xs)
    out["gamma_meet_max"] = largest
    out["gamma_meet_exceed"] = exceed
    return out


def run_trial(regime: RegimeParams, trial: int, master_seed: int,
              collect_layers: bool = False, layer_sources: int = 1) -> TrialRecord:
    seed = derive_seed(master_seed, regime.n, trial)
    rng = np.random.default_rng(seed)
    h = sample_with_rng(rng, regime.n, regime.t, regime.p)
    dist = distance_matrix(h)
    w = int(np.count_nonzero(dist > regime.d)) // 2
    layers = _layer_diagnostics(h, dist, rng, regime, layer_sources) if collect_layers else None
    return TrialRecord(regime.n, trial, seed, diameter(h, dist).value, w, layers)


def simulate_fixed_p(n: int, t: int, p: float, d: int, trials: int,
                     master_seed: int = 0) -> list[TrialRecord]:
    """Trials at an arbitrary p (off the critical curve), e.g. for oracle checks."""
    check_model(n, t, p)
    out = []
    for i in range(trials):
        seed = derive_seed(master_seed, n, i)
        h = sample_with_rng(np.random.default_rng(seed), n, t, p)
        dist = distance_matrix(h)
        out.append(TrialRecord(n, i, seed, diameter(h, dist).value,
                               int(np.count_nonzero(dist > d)) // 2))
    return out


def _run_chunk(args) -> list[TrialRecord]:
    regime, start, stop, master_seed, collect_layers, layer_sources = args
    return [run_trial(regime, i, master_seed, collect_layers, layer_sources)
            for i in range(start, stop)]


def _chunks(cfg: ExperimentConfig, regimes, size: int):
    for regime in regimes:
        for start in range(0, cfg.trials, size):
            yield (regime, start, min(start + size, cfg.trials), cfg.master_seed,
                   cfg.collect_layers, cfg.layer_sources)


# -- summaries -------------------------------------------------------------

@dataclass
class NSummary:
    n: int
    p: float
    trials: int
    diam_counts: dict
    p_diam: dict  # key -> [estimate, wilson_lo, wilson_hi]
    p_diam_d: float
    p_diam_d1: float
    p_diam_two_point: float
    mean_w: float
    var_w: float
    w_counts: dict
    tv_poisson: float
    tv_noise: float
    stein_chen_bound: float | None
    poisson_shift_bound: float
    combined_bound: float | None
    stein_chen_negative: bool
    target_p_d: float
    target_p_d1: float
    target_mean_w: float
    omega_freq: dict | None = None
    gamma_meet_exceed_freq: float | None = None


def _key(k) -> str:
    return "inf" if k == math.inf else str(int(k))


def summarize(records: list[TrialRecord], regime: RegimeParams) -> NSummary:
    T = len(records)
    d, c = regime.d, regime.c
    diam_counts: dict = {}
    for r in records:
        diam_counts[r.diam] = diam_counts.get(r.diam, 0) + 1
    order = sorted(diam_counts)
    p_diam = {}
    for k in order:
        lo, hi = proportion_confint(diam_counts[k], T, alpha=0.05, method="wilson")
        p_diam[_key(k)] = [diam_counts[k] / T, float(max(lo, 0.0)), float(min(hi, 1.0))]
    ws = EmpiricalDist.from_samples(r.w for r in records)
    mean_w = ws.mean()
    var_w = ws.var() * T / (T - 1) if T > 1 else 0.0
    n_pairs = math.comb(regime.n, 2)
    pd_, pd1 = target_probabilities(c)
    if mean_w > 0:
        bound = poisson_limit_bound(mean_w, var_w, n_pairs, c / 2)
        sc, shift, total, neg = bound.stein_chen, bound.poisson_shift, bound.total, bound.negative_bracket
    else:
        sc, total, neg = None, None, False
        shift = abs(mean_w - c / 2)
    omega_freq = None
    exceed_freq = None
    if records[0].layers:
        srcs = sum(r.layers["sources"] for r in records)
        omega_freq = {str(k): sum(r.layers[f"omega{k}"] for r in records) / srcs for k in range(1, d)}
        exceed_freq = sum(r.layers["gamma_meet_exceed"] for r in records) / srcs
    count = diam_counts.get
    return NSummary(
        n=regime.n, p=regime.p, trials=T,
        diam_counts={_key(k): diam_counts[k] for k in order},
        p_diam=p_diam,
        p_diam_d=count(d, 0) / T,
        p_diam_d1=count(d + 1, 0) / T,
        p_diam_two_point=(count(d, 0) + count(d + 1, 0)) / T,
        mean_w=mean_w, var_w=var_w,
        w_counts={str(k): v for k, v in sorted(ws.counts.items())},
        tv_poisson=tv_empirical_vs_poisson(ws, c / 2),
        tv_noise=tv_noise(ws),
        stein_chen_bound=sc, poisson_shift_bound=shift, combined_bound=total,
        stein_chen_negative=neg,
        target_p_d=pd_, target_p_d1=pd1, target_mean_w=c / 2,
        omega_freq=omega_freq, gamma_meet_exceed_freq=exceed_freq,
    )


@dataclass
class ExperimentResult:
    config: ExperimentConfig
    regimes: list[RegimeParams]
    records: list[TrialRecord]
    summaries: list[NSummary]

    def records_for(self, n: int) -> list[TrialRecord]:
        return [r for r in self.records if r.n == n]

    def summary_for(self, n: int) -> NSummary:
        return next(s for s in self.summaries if s.n == n)

    def summary_dict(self) -> dict:
        return {"config": asdict(self.config),
                "regimes": [r.as_dict() for r in self.regimes],
                "per_n": [asdict(s) for s in self.summaries]}


def run_experiment(cfg: ExperimentConfig, chunk_size: int = 50) -> ExperimentResult:
    cfg.validate()
    regimes = cfg.regimes()
    jobs = list(_chunks(cfg, regimes, chunk_size))
    if cfg.workers == 1:
        batches = map(_run_chunk, jobs)
        records = [r for b in batches for r in b]
    else:
        with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
            records = [r for b in pool.map(_run_chunk, jobs) for r in b]
    records.sort(key=lambda r: (cfg.n_grid.index(r.n), r.trial))
    seeds = [r.seed for r in records]
    if len(set(seeds)) != len(seeds):
        raise RuntimeError("derived trial seeds collided")
    summaries = []
    for regime in regimes:
        summaries.append(summarize([r for r in records if r.n == regime.n], regime))
        log.info("n=%d done: P(diam=d)=%.4f mean W=%.4f", regime.n,
                 summaries[-1].p_diam_d, summaries[-1].mean_w)
    return ExperimentResult(cfg, regimes, records, summaries)


def tv_trend(summaries: list[NSummary]) -> tuple[bool, list[int]]:
    """Whether TV to Poi(c/2) is non-increasing in n, allowing one inversion
    smaller than twice the combined sampling noise. Returns (ok, indices of
    the inversions)."""
    inversions = []
    ok = True
    for i in range(1, len(summaries)):
        a, b = summaries[i - 1], summaries[i]
        if b.tv_poisson > a.tv_poisson:
            inversions.append(i)
            if b.tv_poisson - a.tv_poisson >= 2 * (a.tv_noise + b.tv_noise):
                ok = False
    return ok and len(inversions) <= 1, inversions


# -- persistence -----------------------------------------------------------

CSV_COLUMNS = [
    "n", "p", "trials", "p_diam_d", "p_diam_d_lo", "p_diam_d_hi",
    "p_diam_d1", "p_diam_d1_lo", "p_diam_d1_hi", "p_diam_other",
    "mean_w", "var_w", "tv_poisson", "tv_noise",
    "stein_chen_bound", "poisson_shift_bound", "combined_bound",
    "target_p_d", "target_p_d1", "target_mean_w",
]


def _interval(s: NSummary, k: int):
    est = s.p_diam.get(str(k))
    if est is not None:
        return est
    lo, hi = proportion_confint(0, s.trials, alpha=0.05, method="wilson")
    return [0.0, float(max(lo, 0.0)), float(hi)]


def summary_rows(result: ExperimentResult) -> list[dict]:
    d = result.config.d
    rows = []
    for s in result.summaries:
        pd_, pd1 = _interval(s, d), _interval(s, d + 1)
        rows.append({
            "n": s.n, "p": s.p, "trials": s.trials,
            "p_diam_d": pd_[0], "p_diam_d_lo": pd_[1], "p_diam_d_hi": pd_[2],
            "p_diam_d1": pd1[0], "p_diam_d1_lo": pd1[1], "p_diam_d1_hi": pd1[2],
            "p_diam_other": 1.0 - s.p_diam_two_point,
            "mean_w": s.mean_w, "var_w": s.var_w,
            "tv_poisson": s.tv_poisson, "tv_noise": s.tv_noise,
            "stein_chen_bound": "" if s.stein_chen_bound is None else s.stein_chen_bound,
            "poisson_shift_bound": s.poisson_shift_bound,
            "combined_bound": "" if s.combined_bound is None else s.combined_bound,
            "target_p_d": s.target_p_d, "target_p_d1": s.target_p_d1,
            "target_mean_w": s.target_mean_w,
        })
    return rows


def records_jsonl(records: list[TrialRecord]) -> str:
    return "".join(r.to_json() + "\n" for r in records)


def write_outputs(result: ExperimentResult, out_dir) -> dict[str, Path]:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    paths = {"records": out / "records.jsonl", "summary_json": out / "summary.json",
             "summary_csv": out / "summary.csv"}
    paths["records"].write_text(records_jsonl(result.records))
    paths["summary_json"].write_text(json.dumps(result.summary_dict(), indent=2) + "\n")
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=CSV_COLUMNS, lineterminator="\n")
    writer.writeheader()
    writer.writerows(summary_rows(result))
    paths["summary_csv"].write_text(buf.getvalue())
    return paths


# -- targeted tests --------------------------------------------------------

@dataclass
class CouplingReport:
    n: int
    t: int
    p1: float
    p2: float
    r: int
    trials: int
    violations: int
    freq_le_r_sparse: float
    freq_le_r_dense: float


def coupling_monotonicity_test(n: int, t: int, p1: float, p2: float, r: int,
                               trials: int, seed: int = 0) -> CouplingReport:
    """Sample coupled pairs H1 (at p1) within H2 (at p2) and count trials where
    some distance in H2 exceeds the same distance in H1."""
    check_model(n, t, p1)
    check_model(n, t, p2)
    if p1 > p2:
        raise ParameterError(f"need p1 <= p2, got {p1} > {p2}")
    if trials < 1:
        raise ParameterError("trials must be >= 1")
    violations = le1 = le2 = 0
    for i in range(trials):
        rng = np.random.default_rng(derive_seed(seed, n, i))
        h1, h2 = coupled_with_rng(rng, n, t, p1, p2)
        d1, d2 = distance_matrix(h1), distance_matrix(h2)
        violations += bool(np.any(d2 > d1))
        le1 += diameter(h1, d1).value <= r
        le2 += diameter(h2, d2).value <= r
    return CouplingReport(n, t, p1, p2, r, trials, violations, le1 / trials, le2 / trials)


@dataclass
class MCDominanceReport:
    support: list[int]
    cdf_shifted: list[float]
    cdf_size_biased: list[float]
    noise: list[float]
    samples: int
    acceptance_rate: float

    @property
    def cdf_gap(self) -> list[float]:
        return [b - a for a, b in zip(self.cdf_shifted, self.cdf_size_biased)]

    @property
    def max_gap(self) -> float:
        return max(self.cdf_gap)

    @property
    def consistent(self) -> bool:
        """No point where CDF(W*) exceeds CDF(W + 1 - X_J) by more than 3 sigma."""
        return all(g <= 3 * s for g, s in zip(self.cdf_gap, self.noise))


def _pair_index(n: int, j: int) -> tuple[int, int]:
    iu = np.triu_indices(n, k=1)
    return int(iu[0][j]), int(iu[1][j])


def size_biased_dominance_test(n: int, t: int, p: float, d: int, trials: int,
                               seed: int = 0, pilot: int = 2000,
                               min_acceptance: float = 1e-4) -> MCDominanceReport:
    """Empirical laws of W + 1 - X_J (J uniform over pairs) and of W*, the
    latter by rejection: draw J, resample until X_J = 1, record W."""
    check_model(n, t, p)
    npairs = math.comb(n, 2)
    base = derive_seed(seed, n, 0xD0D0)
    pilot_w = []
    for i in range(pilot):
        rng = np.random.default_rng(splitmix64(base ^ i))
        pilot_w.append(int(np.count_nonzero(distance_matrix(sample_with_rng(rng, n, t, p)) > d)) // 2)
    acceptance = float(np.mean(pilot_w)) / npairs
    if acceptance < min_acceptance:
        raise InfeasibleConditioningError(
            f"estimated P(X_J = 1) = {acceptance:.3g} < {min_acceptance:g}; "
            "conditioning on a remote pair is infeasible here")

    rng = np.random.default_rng(splitmix64(base ^ 0xFFFF_FFFF))
    shifted, biased = [], []
    draws = 0
    max_draws = int(50 * trials / acceptance) + 1000
    for _ in range(trials):
        h = sample_with_rng(rng, n, t, p)
        dist = distance_matrix(h)
        x, y = _pair_index(n, int(rng.integers(npairs)))
        w = int(np.count_nonzero(dist > d)) // 2
        shifted.append(w + 1 - int(dist[x, y] > d))
    for _ in range(trials):
        x, y = _pair_index(n, int(rng.integers(npairs)))
        while True:
            draws += 1
            if draws > max_draws:
                raise InfeasibleConditioningError("rejection sampler exceeded its draw budget")
            dist = distance_matrix(sample_with_rng(rng, n, t, p))
            if dist[x, y] > d:
                biased.append(int(np.count_nonzero(dist > d)) // 2)
                break
    top = max(max(shifted), max(biased))
    support = list(range(top + 1))
    cdf_a = np.cumsum(np.bincount(shifted, minlength=top + 1)) / trials
    cdf_b = np.cumsum(np.bincount(biased, minlength=top + 1)) / trials
    noise = np.sqrt((cdf_a * (1 - cdf_a) + cdf_b * (1 - cdf_b)) / trials)
    return MCDominanceReport(support, cdf_a.tolist(), cdf_b.tolist(), noise.tolist(),
                             trials, trials / draws)


@dataclass
class MomentReport:
    n: int
    trials: int
    pair_prob: float
    pair_prob_ci: tuple[float, float]
    pair_target: float
    pair_ratio: float
    joint_prob: float
    joint_prob_ci: tuple[float, float]
    joint_target: float
    joint_ratio: float


def moment_diagnostics(source) -> list[MomentReport]:
    """Compare P(X_a = 1) and P(X_a = 1, X_b = 1), estimated from W by
    exchangeability, against c/n^2 and c^2/n^4.

    ``source`` is an ExperimentConfig (run here) or an ExperimentResult.
    """
    result = run_experiment(source) if isinstance(source, ExperimentConfig) else source
    c = result.config.c
    z = 1.959963984540054
    out = []
    for regime in result.regimes:
        w = np.array([r.w for r in result.records_for(regime.n)], dtype=float)
        T = len(w)
        I = math.comb(regime.n, 2)
        ww = w * (w - 1)
        single = w.mean() / I
        joint = ww.mean() / (I * (I - 1))
        se1 = w.std(ddof=1) / math.sqrt(T) / I if T > 1 else 0.0
        se2 = ww.std(ddof=1) / math.sqrt(T) / (I * (I - 1)) if T > 1 else 0.0
        t1 = c / regime.n**2
        t2 = c * c / regime.n**4
        out.append(MomentReport(
            regime.n, T, single, (single - z * se1, single + z * se1), t1, single / t1,
            joint, (joint - z * se2, joint + z * se2), t2, joint / t2))
    return out
