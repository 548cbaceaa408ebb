"""Critical edge probability for a target diameter, and the limiting targets."""
from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import ParameterError, RegimeError

GRAPH = "graph-bollobas"
HYPERGRAPH = "hypergraph-general"
MODES = (GRAPH, HYPERGRAPH)


@dataclass(frozen=True)
class RegimeParams:
    t: int
    d: int
    c: float
    n: int
    N: int
    p: float
    mode: str

    @property
    def log_term(self) -> float:
        return math.log(self.n**2 / self.c)

    @property
    def growth(self) -> float:
        """Expected first-layer size: np for graphs, (t-1)Np for hypergraphs."""
        if self.mode == GRAPH:
            return self.n * self.p
        return (self.t - 1) * self.N * self.p

    def residual(self) -> float:
        """Relative residual of the defining equation, evaluated as written."""
        try:
            if self.mode == GRAPH:
                lhs = self.p**self.d * float(self.n) ** (self.d - 1)
            else:
                lhs = ((self.t - 1) * self.N * self.p) ** self.d / self.n
        except OverflowError:
            lhs = math.inf
        if not math.isfinite(lhs):
            # fall back to log space when the direct product overflows
            log_lhs = self.d * (math.log(self.t - 1) + math.log(self.N) + math.log(self.p)) - math.log(self.n)
            return abs(math.expm1(log_lhs - math.log(self.log_term)))
        return abs(lhs / self.log_term - 1)

    def as_dict(self) -> dict:
        return {"t": self.t, "d": self.d, "c": self.c, "n": self.n, "N": self.N,
                "p": self.p, "mode": self.mode, "residual": self.residual()}


def solve_p(t: int, d: int, c: float, n: int, mode: str = HYPERGRAPH) -> RegimeParams:
    """Solve for p on the critical curve.

    graph-bollobas:      p^d n^(d-1) = ln(n^2/c)
    hypergraph-general:  (t-1)^d N^d p^d / n = ln(n^2/c),  N = C(n-1, t-1)

    Both are solved in log space, so N^d never has to be formed.
    """
    if mode not in MODES:
        raise ParameterError(f"unknown mode {mode!r}; expected one of {MODES}")
    if t < 2 or d < 2:
        raise ParameterError(f"need t >= 2 and d >= 2, got t={t}, d={d}")
    if not c > 0:
        raise ParameterError(f"c={c} must be positive")
    if n <= t:
        raise ParameterError(f"need n > t, got n={n}, t={t}")
    if mode == GRAPH and t != 2:
        raise ParameterError(f"mode {GRAPH} requires t=2, got t={t}")
    if c >= n * n:
        raise ParameterError(f"nonpositive log: ln(n^2/c) <= 0 for n={n}, c={c}")

    N = math.comb(n - 1, t - 1)
    log_term = math.log(n * n / c)
    if mode == GRAPH:
        log_p = (math.log(log_term) - (d - 1) * math.log(n)) / d
    else:
        log_p = (math.log(n) + math.log(log_term)) / d - math.log(t - 1) - math.log(N)
    if log_p >= 0:
        raise RegimeError(f"regime violation: n too small for (t={t}, d={d}, c={c}); "
                          f"solved p = {math.exp(log_p):.6g} >= 1 at n={n}")
    return RegimeParams(t=t, d=d, c=float(c), n=n, N=N, p=math.exp(log_p), mode=mode)


def expected_remote_pairs(params: RegimeParams) -> float:
    """Leading-order mean of the remote-pair count: C(n,2) * c / n^2."""
    return math.comb(params.n, 2) * params.c / params.n**2


def target_probabilities(c: float) -> tuple[float, float]:
    """Limiting (P(diam = d), P(diam = d + 1)) = (e^{-c/2}, 1 - e^{-c/2})."""
    if not c > 0:
        raise ParameterError(f"c={c} must be positive")
    return math.exp(-c / 2), -math.expm1(-c / 2)


def graph_remote_pair_mean(n: int, p: float) -> float:
    """Exact E W for graphs at d=2: C(n,2)(1-p)(1-p^2)^(n-2).

    A pair is remote iff it is not adjacent and has no common neighbour; the
    n-2 "z is a common neighbour" events use disjoint edges, so they are
    independent.
    """
    return math.comb(n, 2) * (1 - p) * (1 - p * p) ** (n - 2)


def exact_remote_pair_mean_d2(n: int, t: int, p: float) -> float:
    """Exact E W at threshold d=2 for H(n, t, p), any t >= 2.

    Fix a pair (x, y) with no common edge. The edges through x (not y) and
    those through y (not x) are independent p-random families of
    (t-1)-subsets of the other n-2 vertices, and the pair is remote iff their
    vertex unions are disjoint. Inclusion-exclusion over the union of the
    x-family gives an alternating sum, evaluated with enough precision to
    survive the cancellation.
    """
    import mpmath

    if t == 2:
        return graph_remote_pair_mean(n, p)
    rest = n - 2
    M = math.comb(rest, t - 1)
    with mpmath.workdps(int(0.61 * rest) + 40):
        q = 1 - mpmath.mpf(p)
        total = mpmath.mpf(0)
        for a in range(rest + 1):
            # P(union of x-family equals a fixed a-set)
            exact_a = mpmath.fsum((-1) ** (a - b) * math.comb(a, b) * q ** (M - math.comb(b, t - 1))
                                  for b in range(a + 1))
            # y-family avoids that a-set
            total += math.comb(rest, a) * exact_a * q ** (M - math.comb(rest - a, t - 1))
        return float(math.comb(n, 2) * q ** math.comb(n - 2, t - 2) * total)
