"""Distances, diameter, remote pairs and neighbourhood layers of a hypergraph."""
from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field

import numpy as np

from .errors import ParameterError
from .hypergraph import UniformHypergraph
from .parametrization import RegimeParams

# Distance value of an unreachable vertex; larger than every real distance so
# that "dist > d" and max() treat it as infinitely far.
UNREACHABLE = np.iinfo(np.int32).max


@dataclass(frozen=True)
class DistanceProfile:
    source: int
    dist: np.ndarray

    def distance(self, y: int) -> float:
        v = int(self.dist[y])
        return math.inf if v == UNREACHABLE else v

    def reachable(self) -> np.ndarray:
        return self.dist != UNREACHABLE


@dataclass(frozen=True)
class DiameterResult:
    value: float  # an int, or math.inf when disconnected

    @property
    def is_finite(self) -> bool:
        return self.value != math.inf

    def __str__(self):
        return "inf" if not self.is_finite else str(int(self.value))

    def to_json(self):
        return int(self.value) if self.is_finite else "inf"


def _check_vertex(h: UniformHypergraph, x: int) -> None:
    if not 0 <= x < h.n:
        raise ParameterError(f"vertex {x} outside [0, {h.n})")


def bfs_distances(h: UniformHypergraph, x: int) -> DistanceProfile:
    """Single-source BFS over the vertex/edge incidence structure."""
    _check_vertex(h, x)
    dist = np.full(h.n, UNREACHABLE, dtype=np.int32)
    dist[x] = 0
    used = np.zeros(h.m, dtype=bool)
    edges = h.edges
    queue = deque([x])
    while queue:
        u = queue.popleft()
        du = dist[u] + 1
        for e in h.incidence(u):
            if used[e]:
                continue
            used[e] = True
            for v in edges[e]:
                if dist[v] == UNREACHABLE:
                    dist[v] = du
                    queue.append(v)
    return DistanceProfile(x, dist)


def distance_matrix(h: UniformHypergraph) -> np.ndarray:
    """All-pairs distances, as an (n, n) int32 array with UNREACHABLE sentinels.

    Level-synchronous BFS from every source at once: the frontier of each
    source is a row, and one dense product with the 2-section adjacency
    expands all frontiers by one level. Sources whose BFS has finished drop
    out, so after the first couple of levels only a few rows remain.
    """
    n = h.n
    a = h.adjacency_matrix(np.float32)
    dist = np.full((n, n), UNREACHABLE, dtype=np.int32)
    np.fill_diagonal(dist, 0)
    reached = np.eye(n, dtype=bool)
    active = np.arange(n)
    frontier = None
    level = 0
    while active.size:
        level += 1
        if frontier is None:
            nxt = a > 0
        else:
            nxt = (frontier @ a) > 0
        seen = reached[active]
        nxt &= ~seen
        rows, cols = np.nonzero(nxt)
        dist[active[rows], cols] = level
        seen |= nxt
        reached[active] = seen
        keep = nxt.any(axis=1) & ~seen.all(axis=1)
        active = active[keep]
        frontier = nxt[keep].astype(np.float32)
    return dist


def _diameter_from(dist: np.ndarray) -> DiameterResult:
    if dist.size == 0:
        return DiameterResult(0)
    top = int(dist.max())
    return DiameterResult(math.inf if top == UNREACHABLE else top)


def diameter(h: UniformHypergraph, dist: np.ndarray | None = None) -> DiameterResult:
    if dist is None:
        dist = distance_matrix(h)
    return _diameter_from(dist)


def count_remote_pairs(h: UniformHypergraph, d: int, dist: np.ndarray | None = None) -> int:
    """Number of unordered pairs x < y with distance > d (unreachable counts)."""
    if d < 1:
        raise ParameterError(f"threshold d={d} must be >= 1")
    if dist is None:
        dist = distance_matrix(h)
    # dist is symmetric with a zero diagonal
    return int(np.count_nonzero(dist > d)) // 2


def remote_indicators(dist: np.ndarray, d: int) -> np.ndarray:
    """X_alpha for alpha = (x, y), x < y, in np.triu_indices order."""
    iu = np.triu_indices(dist.shape[0], k=1)
    return dist[iu] > d


# -- neighbourhood layers --------------------------------------------------

@dataclass(frozen=True)
class LayerProfile:
    """Layer sizes |Gamma_k(x)|, |N_k(x)| for k = 0..K and optional frontier
    counts for k = 1..K (index 0 of the frontier lists is unused).

    ``frontier[k]`` counts edges meeting Gamma_{k-1}(x), missing N_{k-2}(x) and
    reaching outside N_{k-1}(x); for graphs this is the edge set E_k(x).
    ``frontier_single[k]`` keeps those meeting Gamma_{k-1}(x) in exactly one
    vertex, and ``per_vertex_single[k]`` maps that vertex to its count.
    """

    source: int
    gamma: list[int]
    ball: list[int]
    frontier: list[int] | None = None
    frontier_single: list[int] | None = None
    per_vertex_single: list[dict[int, int]] | None = field(default=None, repr=False)

    @property
    def depth(self) -> int:
        return len(self.gamma) - 1


def layer_profile_from_distances(h: UniformHypergraph, x: int, dist_row: np.ndarray,
                                 K: int, with_frontiers: bool = False) -> LayerProfile:
    if K < 0:
        raise ParameterError(f"layer depth K={K} must be >= 0")
    counts = np.bincount(dist_row[dist_row != UNREACHABLE], minlength=K + 1)[:K + 1]
    gamma = [int(v) for v in counts]
    ball = [int(v) for v in np.cumsum(counts)]
    if not with_frontiers:
        return LayerProfile(x, gamma, ball)

    frontier = [0]
    single = [0]
    per_vertex: list[dict[int, int]] = [{}]
    if h.m:
        dd = dist_row[h.edges]
        lo = dd.min(axis=1)
        hi = dd.max(axis=1)
    for k in range(1, K + 1):
        if not h.m:
            frontier.append(0)
            single.append(0)
            per_vertex.append({})
            continue
        in_prev = dd == k - 1
        mask = (lo == k - 1) & (hi > k - 1)
        frontier.append(int(np.count_nonzero(mask)))
        one = mask & (in_prev.sum(axis=1) == 1)
        single.append(int(np.count_nonzero(one)))
        rows = np.flatnonzero(one)
        owners = h.edges[rows][in_prev[rows]]
        vals, cnt = np.unique(owners, return_counts=True)
        per_vertex.append({int(v): int(c) for v, c in zip(vals, cnt)})
    return LayerProfile(x, gamma, ball, frontier, single, per_vertex)


def layer_profile(h: UniformHypergraph, x: int, K: int, with_frontiers: bool = False) -> LayerProfile:
    return layer_profile_from_distances(h, x, bfs_distances(h, x).dist, K, with_frontiers)


@dataclass(frozen=True)
class ConcentrationParams:
    L: float
    delta: list[float]  # index k = 1..d-1; index 0 unused
    eps: list[float]
    eta: list[float]

    @classmethod
    def from_regime(cls, params: RegimeParams, L: float | None = None) -> ConcentrationParams:
        """delta_k = (L ln n / g^k)^(1/2) with g the expected first-layer size;
        eps_k = 2 delta_1 for every k; eta_k = exp(eps_1 + ... + eps_k) - 1."""
        if L is None:
            L = 72.0 if params.t == 2 else 72.0 * (params.t - 1)
        g = params.growth
        d = params.d
        delta = [0.0] + [math.sqrt(L * math.log(params.n) / g**k) for k in range(1, d)]
        eps = [0.0] + [2 * delta[1]] * (d - 1)
        eta = [0.0] + [math.expm1(sum(eps[1:k + 1])) for k in range(1, d)]
        return cls(L, delta, eps, eta)


def omega_star_holds(profile: LayerProfile, params: RegimeParams,
                     conc: ConcentrationParams, k: int) -> bool:
    """Whether every layer l <= k lies within eta_l of g^l, g = np or (t-1)Np."""
    if k > profile.depth:
        raise ParameterError(f"k={k} exceeds profile depth {profile.depth}")
    if k >= len(conc.eta):
        raise ParameterError(f"k={k} beyond the concentration window 1..{len(conc.eta) - 1}")
    g = params.growth
    return all(abs(profile.gamma[l] - g**l) <= conc.eta[l] * g**l for l in range(1, k + 1))


def layer_intersection(h: UniformHypergraph, x: int, z: int, k: int) -> int:
    """|Gamma_k(x) & Gamma_k(z)|."""
    _check_vertex(h, x)
    _check_vertex(h, z)
    if x == z:
        raise ParameterError("layer_intersection needs two distinct vertices")
    dx = bfs_distances(h, x).dist
    dz = bfs_distances(h, z).dist
    return int(np.count_nonzero((dx == k) & (dz == k)))


def intersection_threshold(params: RegimeParams) -> float:
    """10 g^(2d-2) / n; for graphs (g = np) this is 10 n^(2d-3) p^(2d-2)."""
    g = params.growth
    return 10 * g ** (2 * params.d - 2) / params.n

