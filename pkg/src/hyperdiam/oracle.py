"""Exact laws by complete enumeration at tiny n, plus explicit path search.

Nothing here reuses the BFS in ``metrics``: distances come from a bitmask
closure, and ``brute_force_distance`` enumerates alternating vertex/edge
sequences directly.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from itertools import combinations

import numpy as np

from .errors import FeasibilityError, ParameterError
from .hypergraph import UniformHypergraph, _colex_combinations, check_model

DEFAULT_CAP = 24
BRUTE_FORCE_EDGE_CAP = 12
_INF = 255  # distance code for "unreachable" in the enumeration tables


def _check_cap(n: int, t: int, cap: int) -> int:
    M = math.comb(n, t)
    if M > cap:
        raise FeasibilityError(f"C({n},{t}) = {M} potential edges exceeds the enumeration cap {cap}")
    return M


def _pair_distances(n: int, edge_masks: list[int]) -> list[int]:
    """Distances for pairs x < y (row-major), _INF when unreachable."""
    nbr = [0] * n
    for em in edge_masks:
        v = em
        while v:
            low = v & -v
            nbr[low.bit_length() - 1] |= em
            v ^= low
    out = []
    full = (1 << n) - 1
    for x in range(n):
        dist = [_INF] * n
        dist[x] = 0
        seen = 1 << x
        frontier = seen
        k = 0
        while frontier and seen != full:
            k += 1
            reach = 0
            v = frontier
            while v:
                low = v & -v
                reach |= nbr[low.bit_length() - 1]
                v ^= low
            frontier = reach & ~seen
            seen |= frontier
            v = frontier
            while v:
                low = v & -v
                dist[low.bit_length() - 1] = k
                v ^= low
        out.extend(dist[x + 1:])
    return out


@lru_cache(maxsize=32)
def _structure(n: int, t: int, cap: int):
    """p-independent tables over all 2^M edge subsets: edge counts and the
    distance of every pair. Subset s contains universe edge i iff bit i is set."""
    M = _check_cap(n, t, cap)
    universe = [sum(1 << v for v in e) for e in _colex_combinations(n, t)]
    S = 1 << M
    npairs = n * (n - 1) // 2
    dist = np.empty((S, npairs), dtype=np.uint8)
    m = np.empty(S, dtype=np.int64)
    for s in range(S):
        masks = [universe[i] for i in range(M) if s >> i & 1]
        m[s] = len(masks)
        dist[s] = _pair_distances(n, masks)
    dist.flags.writeable = False
    m.flags.writeable = False
    return M, m, dist


def _weights(M: int, m: np.ndarray, p: float) -> np.ndarray:
    return np.power(p, m) * np.power(1.0 - p, M - m)


def _fsum_by(keys: np.ndarray, w: np.ndarray) -> dict:
    uniq, inv = np.unique(keys, return_inverse=True, axis=0)
    order = np.argsort(inv, kind="stable")
    bounds = np.searchsorted(inv[order], np.arange(len(uniq) + 1))
    out = {}
    for i, key in enumerate(uniq):
        out[tuple(int(v) for v in np.atleast_1d(key))] = math.fsum(w[order[bounds[i]:bounds[i + 1]]])
    return out


def _diam_value(code: int):
    return math.inf if code == _INF else int(code)


@dataclass(frozen=True)
class ExactJointDistribution:
    n: int
    t: int
    p: float
    d: int
    entries: dict  # (diameter, W) -> probability; diameter may be math.inf
    diameter: dict = field(repr=False)
    remote: dict = field(repr=False)
    pair_marginal: float = 0.0  # P(X_alpha = 1), identical for every pair

    def total(self) -> float:
        return math.fsum(self.entries.values())

    def p_diam(self, k) -> float:
        return self.diameter.get(k, 0.0)

    def p_diam_le(self, r) -> float:
        return math.fsum(v for k, v in self.diameter.items() if k <= r)

    def mean_w(self) -> float:
        return math.fsum(k * v for k, v in self.remote.items())

    def as_dict(self) -> dict:
        def key(k):
            return "inf" if k == math.inf else int(k)
        return {
            "n": self.n, "t": self.t, "p": self.p, "d": self.d,
            "total": self.total(),
            "diameter": {str(key(k)): v for k, v in sorted(self.diameter.items())},
            "remote_pairs": {str(k): v for k, v in sorted(self.remote.items())},
            "mean_w": self.mean_w(),
            "pair_marginal": self.pair_marginal,
        }


def _setup(n: int, t: int, p: float, d: int, cap: int):
    check_model(n, t, p)
    if d < 1:
        raise ParameterError(f"threshold d={d} must be >= 1")
    M, m, dist = _structure(n, t, cap)
    return M, m, dist, _weights(M, m, p)


def enumerate_exact(n: int, t: int, p: float, d: int, cap: int = DEFAULT_CAP) -> ExactJointDistribution:
    """Exact joint law of (diameter, W at threshold d) over all of H(n, t, p)."""
    M, m, dist, w = _setup(n, t, p, d, cap)
    diam = dist.max(axis=1) if dist.shape[1] else np.zeros(len(m), dtype=np.uint8)
    X = dist > d
    W = X.sum(axis=1)
    joint = _fsum_by(np.stack([diam, W], axis=1), w)
    entries = {(_diam_value(a), b): v for (a, b), v in joint.items()}
    diameter = {_diam_value(a): v for (a,), v in _fsum_by(diam, w).items()}
    remote = {b: v for (b,), v in _fsum_by(W, w).items()}
    pair_marginal = math.fsum(w[X[:, 0]]) if X.shape[1] else 0.0
    return ExactJointDistribution(n, t, p, d, entries, diameter, remote, pair_marginal)


def exact_pair_probabilities(n: int, t: int, p: float, d: int, cap: int = DEFAULT_CAP):
    """(P(X_a = 1) per pair, P(X_a = 1, X_b = 1) matrix), each entry by fsum."""
    M, m, dist, w = _setup(n, t, p, d, cap)
    X = dist > d
    P = X.shape[1]
    single = np.array([math.fsum(w[X[:, a]]) for a in range(P)])
    joint = np.empty((P, P))
    for a in range(P):
        for b in range(a, P):
            joint[a, b] = joint[b, a] = math.fsum(w[X[:, a] & X[:, b]])
    return single, joint


def exact_fkg_check(n: int, t: int, p: float, d: int, cap: int = DEFAULT_CAP) -> float:
    """min over pairs a != b of P(X_a = 1, X_b = 1) - P(X_a = 1) P(X_b = 1).

    Each "pair is remote" event is decreasing in the edge set, so the
    Harris-FKG inequality says this is >= 0.
    """
    single, joint = exact_pair_probabilities(n, t, p, d, cap)
    P = len(single)
    if P < 2:
        return 0.0
    return min(joint[a, b] - single[a] * single[b] for a, b in combinations(range(P), 2))


@dataclass(frozen=True)
class DominanceReport:
    support: list[int]
    cdf_shifted: list[float]  # CDF of W + 1 - X_J
    cdf_size_biased: list[float]  # CDF of W*
    mean_w: float
    tol: float = 1e-12

    @property
    def cdf_gap(self) -> list[float]:
        """CDF(W*) - CDF(W + 1 - X_J) pointwise; dominance needs all <= 0."""
        return [b - a for a, b in zip(self.cdf_shifted, self.cdf_size_biased)]

    @property
    def max_gap(self) -> float:
        return max(self.cdf_gap)

    @property
    def holds(self) -> bool:
        return self.max_gap <= self.tol


def exact_size_biased_check(n: int, t: int, p: float, d: int, cap: int = DEFAULT_CAP) -> DominanceReport:
    """Exact laws of W + 1 - X_J and of W* = 1 + sum_{b != J} X_b^J.

    J is drawn with P(J = a) proportional to P(X_a = 1). Given X_J = 1,
    1 + sum_{b != J} X_b is just W, so W* has law sum_a P(J = a) P(W = . | X_a = 1).
    """
    M, m, dist, w = _setup(n, t, p, d, cap)
    X = dist > d
    W = X.sum(axis=1)
    single = np.array([math.fsum(w[X[:, a]]) for a in range(X.shape[1])])
    mean_w = math.fsum(single)
    if not mean_w > 0:
        raise ParameterError(f"degenerate: E W = 0 at n={n}, t={t}, p={p}, d={d}")
    top = int(W.max()) + 1
    support = list(range(top + 1))
    shifted = [[] for _ in support]
    biased = [[] for _ in support]
    for a in range(X.shape[1]):
        pj = single[a] / mean_w
        if pj == 0:
            continue
        vals = W + 1 - X[:, a]
        for k, v in _fsum_by(vals, w).items():
            shifted[k[0]].append(pj * v)
        hit = X[:, a]
        for k, v in _fsum_by(W[hit], w[hit]).items():
            biased[k[0]].append(pj * v / single[a])
    pmf_shift = [math.fsum(x) for x in shifted]
    pmf_bias = [math.fsum(x) for x in biased]
    cdf_shift = list(np.cumsum(pmf_shift))
    cdf_bias = list(np.cumsum(pmf_bias))
    return DominanceReport(support, [float(v) for v in cdf_shift], [float(v) for v in cdf_bias], mean_w)


def _brute_force_from(h: UniformHypergraph, x: int) -> list[float]:
    """Minimum length of an alternating sequence x = v0, e1, v1, ..., ek, vk with
    distinct vertices and distinct edges, to every vk. Iterative deepening:
    at limit k every sequence of length <= k is enumerated, so the first
    length at which a vertex shows up is its minimum."""
    edges = [tuple(int(v) for v in e) for e in h.edges]
    inc = [[] for _ in range(h.n)]
    for i, e in enumerate(edges):
        for v in e:
            inc[v].append(i)
    best = [math.inf] * h.n
    best[x] = 0
    deep = False

    def extend(v, used_v, used_e, k, limit):
        nonlocal deep
        for i in inc[v]:
            if used_e >> i & 1:
                continue
            for u in edges[i]:
                if used_v >> u & 1:
                    continue
                if k + 1 < best[u]:
                    best[u] = k + 1
                if k + 1 == limit:
                    deep = True
                else:
                    extend(u, used_v | 1 << u, used_e | 1 << i, k + 1, limit)

    limit = 0
    while math.inf in best:
        limit += 1
        deep = False
        extend(x, 1 << x, 0, 0, limit)
        if not deep:
            break  # no sequence has `limit` steps, so none are longer either
    return best


def _check_small(h: UniformHypergraph, cap: int) -> None:
    if h.m > cap:
        raise FeasibilityError(f"brute-force path search limited to {cap} edges, got {h.m}")


def brute_force_distance(h: UniformHypergraph, x: int, y: int, cap: int = BRUTE_FORCE_EDGE_CAP) -> float:
    _check_small(h, cap)
    if not (0 <= x < h.n and 0 <= y < h.n):
        raise ParameterError("vertex out of range")
    return _brute_force_from(h, x)[y]


def brute_force_distances(h: UniformHypergraph, x: int, cap: int = BRUTE_FORCE_EDGE_CAP) -> list[float]:
    _check_small(h, cap)
    if not 0 <= x < h.n:
        raise ParameterError("vertex out of range")
    return _brute_force_from(h, x)
