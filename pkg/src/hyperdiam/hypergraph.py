"""Uniform hypergraphs, colex subset ranking and the H(n, t, p) samplers."""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property, lru_cache
from itertools import combinations
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .errors import FormatError, ParameterError

# Edge universes up to this size are sampled by one Bernoulli draw per rank.
DENSE_LIMIT = 2**23
# Above this variance the edge count is drawn from a normal approximation
# (only reachable when the universe does not fit in int64).
NORMAL_APPROX_VARIANCE = 1e6
_INT64_LIMIT = 2**63 - 1


# -- colex ranking ---------------------------------------------------------

def rank_subset(s: Sequence[int], n: int) -> int:
    """Colexicographic rank of a strictly increasing tuple drawn from range(n)."""
    s = tuple(int(v) for v in s)
    if not s:
        raise ParameterError("empty subset")
    for i, v in enumerate(s):
        if not 0 <= v < n:
            raise ParameterError(f"vertex {v} outside [0, {n})")
        if i and v <= s[i - 1]:
            raise ParameterError(f"subset {s} is not strictly increasing")
    return sum(math.comb(v, i + 1) for i, v in enumerate(s))


def unrank_subset(r: int, n: int, t: int) -> tuple[int, ...]:
    """The r-th t-subset of range(n) in colexicographic order."""
    total = math.comb(n, t)
    if not 0 <= r < total:
        raise ParameterError(f"rank {r} outside [0, C({n},{t})={total})")
    out = []
    hi = n - 1
    for i in range(t, 0, -1):
        # largest c <= hi with C(c, i) <= r
        lo_c, hi_c = i - 1, hi
        while lo_c < hi_c:
            mid = (lo_c + hi_c + 1) // 2
            if math.comb(mid, i) <= r:
                lo_c = mid
            else:
                hi_c = mid - 1
        out.append(lo_c)
        r -= math.comb(lo_c, i)
        hi = lo_c - 1
    return tuple(reversed(out))


@lru_cache(maxsize=64)
def binomial_table(n: int, t: int) -> np.ndarray:
    """table[c, i] = C(c, i) for 0 <= c <= n, 0 <= i <= t, as int64.

    Only built for universes that fit the dense path, so no entry overflows.
    """
    if math.comb(n, t) > _INT64_LIMIT:
        raise ParameterError(f"C({n},{t}) overflows int64; dense tables disabled")
    table = np.zeros((n + 1, t + 1), dtype=np.int64)
    for c in range(n + 1):
        for i in range(min(c, t) + 1):
            table[c, i] = math.comb(c, i)
    table.flags.writeable = False
    return table


def unrank_many(ranks: np.ndarray, n: int, t: int) -> np.ndarray:
    """Vectorised unrank_subset; returns an (m, t) int64 array."""
    r = np.asarray(ranks, dtype=np.int64).copy()
    table = binomial_table(n, t)
    out = np.empty((r.size, t), dtype=np.int64)
    for i in range(t, 0, -1):
        c = np.searchsorted(table[:n, i], r, side="right") - 1
        out[:, i - 1] = c
        r -= table[c, i]
    return out


def rank_many(edges: np.ndarray, n: int) -> np.ndarray:
    edges = np.asarray(edges, dtype=np.int64)
    t = edges.shape[1]
    table = binomial_table(n, t)
    return sum(table[edges[:, i], i + 1] for i in range(t))


# -- the hypergraph --------------------------------------------------------

class UniformHypergraph:
    """Immutable t-uniform hypergraph on vertices 0..n-1.

    Edges are kept as an (m, t) array of strictly increasing rows, sorted by
    colex rank. ``incidence(v)`` lists the ids (row indices) of the edges
    containing ``v``.
    """

    def __init__(self, n: int, t: int, edges: np.ndarray, *, _trusted: bool = False):
        if t < 2:
            raise ParameterError(f"edge size t={t} must be >= 2")
        if n < 1:
            raise ParameterError(f"vertex count n={n} must be >= 1")
        arr = np.asarray(edges, dtype=np.int64).reshape(-1, t)
        if not _trusted:
            arr = _canonical_edges(arr, n, t)
        arr.flags.writeable = False
        self.n = int(n)
        self.t = int(t)
        self.edges = arr

    @classmethod
    def from_edges(cls, n: int, t: int, edges: Iterable[Sequence[int]]) -> UniformHypergraph:
        rows = [tuple(e) for e in edges]
        for e in rows:
            if len(e) != t:
                raise ParameterError(f"edge {e} does not have {t} vertices")
        return cls(n, t, np.array(rows, dtype=np.int64).reshape(-1, t))

    @classmethod
    def empty(cls, n: int, t: int) -> UniformHypergraph:
        return cls(n, t, np.empty((0, t), dtype=np.int64), _trusted=True)

    @classmethod
    def complete(cls, n: int, t: int) -> UniformHypergraph:
        return cls(n, t, np.array(list(_colex_combinations(n, t)), dtype=np.int64).reshape(-1, t),
                   _trusted=True)

    @property
    def m(self) -> int:
        return int(self.edges.shape[0])

    def edge_set(self) -> set[tuple[int, ...]]:
        return {tuple(int(v) for v in e) for e in self.edges}

    def ranks(self) -> list[int]:
        return [rank_subset(e, self.n) for e in self.edges]

    @cached_property
    def _csr(self) -> tuple[np.ndarray, np.ndarray]:
        flat = self.edges.ravel()
        ids = np.repeat(np.arange(self.m, dtype=np.int64), self.t)
        order = np.argsort(flat, kind="stable")
        counts = np.bincount(flat, minlength=self.n)
        indptr = np.zeros(self.n + 1, dtype=np.int64)
        np.cumsum(counts, out=indptr[1:])
        indices = ids[order]
        indptr.flags.writeable = False
        indices.flags.writeable = False
        return indptr, indices

    def incidence(self, v: int) -> np.ndarray:
        indptr, indices = self._csr
        return indices[indptr[v]:indptr[v + 1]]

    def degree(self, v: int) -> int:
        indptr, _ = self._csr
        return int(indptr[v + 1] - indptr[v])

    def adjacency_matrix(self, dtype=np.float32) -> np.ndarray:
        """Dense 2-section adjacency: u ~ v iff some edge contains both."""
        a = np.zeros((self.n, self.n), dtype=dtype)
        for i, j in combinations(range(self.t), 2):
            a[self.edges[:, i], self.edges[:, j]] = 1
            a[self.edges[:, j], self.edges[:, i]] = 1
        return a

    def is_subhypergraph_of(self, other: UniformHypergraph) -> bool:
        if (self.n, self.t) != (other.n, other.t):
            return False
        return self.edge_set() <= other.edge_set()

    def __eq__(self, other):
        if not isinstance(other, UniformHypergraph):
            return NotImplemented
        return (self.n, self.t) == (other.n, other.t) and np.array_equal(self.edges, other.edges)

    def __hash__(self):
        return hash((self.n, self.t, self.edges.tobytes()))

    def __repr__(self):
        return f"UniformHypergraph(n={self.n}, t={self.t}, m={self.m})"


def _colex_combinations(n: int, t: int):
    # colex order == lexicographic order of the reversed tuples
    for c in sorted(combinations(range(n), t), key=lambda s: s[::-1]):
        yield c


def _canonical_edges(arr: np.ndarray, n: int, t: int) -> np.ndarray:
    if arr.size == 0:
        return np.empty((0, t), dtype=np.int64)
    arr = np.sort(arr, axis=1)
    if arr.min() < 0 or arr.max() >= n:
        raise ParameterError(f"edge vertex outside [0, {n})")
    if np.any(arr[:, 1:] == arr[:, :-1]):
        raise ParameterError("edge with a repeated vertex")
    keys = [tuple(int(v) for v in row) for row in arr]
    if len(set(keys)) != len(keys):
        raise ParameterError("duplicate edge")
    ranks = [rank_subset(k, n) for k in keys]
    order = sorted(range(len(keys)), key=ranks.__getitem__)
    return arr[order]


# -- sampling --------------------------------------------------------------

@dataclass(frozen=True)
class SampleConfig:
    n: int
    t: int
    p: float
    seed: int = 0

    def __post_init__(self):
        check_model(self.n, self.t, self.p)


def check_model(n: int, t: int, p: float) -> None:
    if t < 2:
        raise ParameterError(f"edge size t={t} must be >= 2")
    if n < t:
        raise ParameterError(f"need n >= t, got n={n}, t={t}")
    if not (0.0 <= p <= 1.0):
        raise ParameterError(f"probability p={p} outside [0, 1]")


def sampling_strategy(n: int, t: int, p: float) -> dict:
    """Describe how H(n, t, p) is sampled for these parameters."""
    M = math.comb(n, t)
    if M <= DENSE_LIMIT:
        return {"universe": M, "path": "dense", "edge_count": "exact"}
    if M <= _INT64_LIMIT:
        return {"universe": M, "path": "sparse", "edge_count": "exact"}
    approx = M * p * (1 - p) > NORMAL_APPROX_VARIANCE
    return {"universe": M, "path": "sparse",
            "edge_count": "normal-approx" if approx else "exact"}


def _edge_count(rng: np.random.Generator, M: int, p: float) -> int:
    if M <= _INT64_LIMIT:
        return int(rng.binomial(M, p))
    var = M * p * (1 - p)
    if var > NORMAL_APPROX_VARIANCE:
        m = math.floor(rng.normal(M * p, math.sqrt(var)) + 0.5)
        return min(max(m, 0), M)
    from scipy.stats import binom
    return int(binom.ppf(rng.random(), float(M), p))


def _distinct_ranks(rng: np.random.Generator, M: int, m: int) -> list[int]:
    if m > M // 2:
        raise ParameterError(f"sparse path asked for {m} of {M} ranks")
    seen: set[int] = set()
    if M <= _INT64_LIMIT:
        while len(seen) < m:
            seen.update(int(r) for r in rng.integers(0, M, size=m - len(seen)))
    else:
        nbits = (M - 1).bit_length()
        nbytes = (nbits + 7) // 8
        mask = (1 << nbits) - 1
        while len(seen) < m:
            r = int.from_bytes(rng.bytes(nbytes), "little") & mask
            if r < M:
                seen.add(r)
    return sorted(seen)


def _from_ranks(n: int, t: int, ranks) -> UniformHypergraph:
    if isinstance(ranks, np.ndarray):
        edges = unrank_many(ranks, n, t)
    else:
        edges = np.array([unrank_subset(r, n, t) for r in ranks], dtype=np.int64).reshape(-1, t)
    return UniformHypergraph(n, t, edges, _trusted=True)


def sample_with_rng(rng: np.random.Generator, n: int, t: int, p: float) -> UniformHypergraph:
    """One draw of H(n, t, p) consuming randomness from ``rng``."""
    check_model(n, t, p)
    M = math.comb(n, t)
    if M <= DENSE_LIMIT:
        u = rng.random(M)
        return _from_ranks(n, t, np.flatnonzero(u < p))
    if p > 0.5:
        raise ParameterError(f"p={p} too dense for a universe of {M} edges")
    return _from_ranks(n, t, _distinct_ranks(rng, M, _edge_count(rng, M, p)))


def sample_uniform_hypergraph(cfg: SampleConfig) -> UniformHypergraph:
    return sample_with_rng(np.random.default_rng(cfg.seed), cfg.n, cfg.t, cfg.p)


def coupled_with_rng(rng: np.random.Generator, n: int, t: int, p1: float, p2: float):
    check_model(n, t, p1)
    check_model(n, t, p2)
    if p1 > p2:
        raise ParameterError(f"coupling needs p1 <= p2, got {p1} > {p2}")
    M = math.comb(n, t)
    if M <= DENSE_LIMIT:
        u = rng.random(M)
        return (_from_ranks(n, t, np.flatnonzero(u < p1)),
                _from_ranks(n, t, np.flatnonzero(u < p2)))
    # conditional on U_e < p2, U_e is uniform on [0, p2): thin the p2 sample
    if p2 > 0.5:
        raise ParameterError(f"p2={p2} too dense for a universe of {M} edges")
    ranks2 = _distinct_ranks(rng, M, _edge_count(rng, M, p2))
    keep = rng.random(len(ranks2)) * p2 < p1
    ranks1 = [r for r, k in zip(ranks2, keep) if k]
    return _from_ranks(n, t, ranks1), _from_ranks(n, t, ranks2)


def coupled_sample(n: int, t: int, p1: float, p2: float, seed: int):
    """Monotone coupling: one uniform per potential edge shared by both samples,
    so the p1 sample is always a sub-hypergraph of the p2 sample."""
    return coupled_with_rng(np.random.default_rng(seed), n, t, p1, p2)


# -- text format -----------------------------------------------------------

def format_hypergraph(h: UniformHypergraph) -> str:
    lines = [f"{h.n} {h.t} {h.m}"]
    lines.extend(" ".join(str(int(v)) for v in e) for e in h.edges)
    return "\n".join(lines) + "\n"


def write_hypergraph(h: UniformHypergraph, path) -> None:
    Path(path).write_text(format_hypergraph(h))


def parse_hypergraph(text: str) -> UniformHypergraph:
    lines = [(i, ln.strip()) for i, ln in enumerate(text.splitlines(), start=1)]
    lines = [(i, ln) for i, ln in lines if ln and not ln.startswith("#")]
    if not lines:
        raise FormatError("empty file", line=1)
    lineno, header = lines[0]
    try:
        n, t, m = (int(x) for x in header.split())
    except ValueError:
        raise FormatError(f"bad header {header!r}, expected 'n t m'", line=lineno) from None
    if t < 2 or n < t or m < 0:
        raise FormatError(f"invalid header values n={n} t={t} m={m}", line=lineno)
    body = lines[1:]
    if len(body) != m:
        raise FormatError(f"header promises {m} edges, found {len(body)}",
                          line=body[-1][0] if body else lineno)
    seen = set()
    rows = []
    for lineno, ln in body:
        try:
            e = tuple(sorted(int(x) for x in ln.split()))
        except ValueError:
            raise FormatError(f"non-integer vertex in {ln!r}", line=lineno) from None
        if len(e) != t:
            raise FormatError(f"edge has {len(e)} vertices, expected {t}", line=lineno)
        if e[0] < 0 or e[-1] >= n:
            raise FormatError(f"vertex outside [0, {n})", line=lineno)
        if len(set(e)) != t:
            raise FormatError("repeated vertex in edge", line=lineno)
        if e in seen:
            raise FormatError(f"duplicate edge {e}", line=lineno)
        seen.add(e)
        rows.append(e)
    return UniformHypergraph(n, t, np.array(rows, dtype=np.int64).reshape(-1, t))


def read_hypergraph(path) -> UniformHypergraph:
    return parse_hypergraph(Path(path).read_text())
