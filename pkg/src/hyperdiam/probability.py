"""Poisson utilities, total-variation distances and explicit tail/TV bounds."""
from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from typing import Iterable, Mapping

from .errors import ParameterError

TAIL_MASS = 1e-12


def poisson_pmf(lam: float, k: int) -> float:
    """e^{-lam} lam^k / k!, evaluated in log space."""
    if not lam > 0:
        raise ParameterError(f"Poisson mean {lam} must be positive")
    if k < 0:
        return 0.0
    return math.exp(k * math.log(lam) - lam - math.lgamma(k + 1))


@dataclass(frozen=True)
class PoissonDist:
    lam: float

    def __post_init__(self):
        if not self.lam > 0:
            raise ParameterError(f"Poisson mean {self.lam} must be positive")

    def pmf(self, k: int) -> float:
        return poisson_pmf(self.lam, k)

    def support_end(self, tail: float = TAIL_MASS) -> int:
        """Smallest K with P(Y > K) < tail."""
        k = max(int(self.lam), 0)
        while self.tail_mass(k) >= tail:
            k += max(1, int(math.sqrt(self.lam)))
        while k > 0 and self.tail_mass(k - 1) < tail:
            k -= 1
        return k

    def tail_mass(self, K: int) -> float:
        """P(Y > K), summed upward (no 1 - cdf cancellation)."""
        total = 0.0
        k = K + 1
        term = self.pmf(k)
        while True:
            total += term
            k += 1
            term = self.pmf(k)
            if k > self.lam and term <= total * 1e-17:
                return total

    def pmf_array(self, K: int) -> list[float]:
        return [self.pmf(k) for k in range(K + 1)]


@dataclass(frozen=True)
class EmpiricalDist:
    """Empirical law of a nonnegative integer variable. Counts may be weights."""

    counts: Mapping[int, float]
    total: float

    @classmethod
    def from_samples(cls, samples: Iterable[int]) -> EmpiricalDist:
        c = Counter(int(s) for s in samples)
        if any(k < 0 for k in c):
            raise ParameterError("empirical values must be nonnegative")
        return cls(dict(c), sum(c.values()))

    @classmethod
    def from_counts(cls, counts: Mapping[int, float]) -> EmpiricalDist:
        if any(k < 0 for k in counts) or any(v < 0 for v in counts.values()):
            raise ParameterError("empirical values and counts must be nonnegative")
        return cls(dict(counts), math.fsum(counts.values()))

    def prob(self, k: int) -> float:
        return self.counts.get(k, 0) / self.total

    def mean(self) -> float:
        return math.fsum(k * v for k, v in self.counts.items()) / self.total

    def var(self) -> float:
        mu = self.mean()
        return math.fsum(v * (k - mu) ** 2 for k, v in self.counts.items()) / self.total

    @property
    def max_value(self) -> int:
        return max(self.counts) if self.counts else 0


def tv_empirical_vs_poisson(emp: EmpiricalDist, lam: float) -> float:
    if not emp.total > 0:
        raise ParameterError("empty sample")
    pois = PoissonDist(lam)
    K = max(pois.support_end(), emp.max_value)
    diff = math.fsum(abs(emp.prob(k) - pois.pmf(k)) for k in range(K + 1))
    return min(1.0, 0.5 * (diff + pois.tail_mass(K)))


def tv_noise(emp: EmpiricalDist) -> float:
    """Sampling-noise scale of an empirical TV estimate: (1/2) sum_k sd(p_hat_k)."""
    n = emp.total
    return 0.5 * math.fsum(math.sqrt(emp.prob(k) * (1 - emp.prob(k)) / n) for k in emp.counts)


def tv_poisson_poisson_bound(mean_x: float, beta: float) -> float:
    """Upper bound |E X - e^{-beta}| on d_TV(Poi(E X), Poi(e^{-beta}))."""
    return abs(mean_x - math.exp(-beta))


def chernoff_tail_bound(mean: float, delta: float) -> float:
    """2 exp(-delta^2 mean / 3) bounding P(|S - ES| >= delta ES); not clamped."""
    if not 0 < delta < 1:
        raise ParameterError(f"delta={delta} outside (0, 1)")
    if mean < 0:
        raise ParameterError(f"mean={mean} must be nonnegative")
    return 2.0 * math.exp(-delta * delta * mean / 3.0)


def stein_chen_tv_bound(mean_w: float, var_w: float, sum_p_sq: float) -> float:
    """(1 - e^{-EW})/EW * (Var W - EW + 2 sum p_i^2).

    Valid when the summands are positively dependent. A negative value means
    that presumption fails for the supplied moments; it is returned as is.
    """
    if not mean_w > 0:
        raise ParameterError(f"E W = {mean_w} must be positive")
    if var_w < 0 or sum_p_sq < 0:
        raise ParameterError("variance and sum of squares must be nonnegative")
    return -math.expm1(-mean_w) / mean_w * (var_w - mean_w + 2.0 * sum_p_sq)


def exchangeable_sum_p_sq(mean_w: float, n_pairs: int) -> float:
    """sum_i p_i^2 when all p_i are equal: (E W)^2 / |I|."""
    return mean_w * mean_w / n_pairs


@dataclass(frozen=True)
class PoissonLimitBound:
    stein_chen: float
    poisson_shift: float

    @property
    def total(self) -> float:
        return self.stein_chen + self.poisson_shift

    @property
    def negative_bracket(self) -> bool:
        return self.stein_chen < 0


def poisson_limit_bound(mean_w: float, var_w: float, n_pairs: int, target: float) -> PoissonLimitBound:
    """Triangle-inequality bound on d_TV(W, Poi(target)):
    d_TV(W, Poi(EW)) + d_TV(Poi(EW), Poi(target))."""
    sc = stein_chen_tv_bound(mean_w, var_w, exchangeable_sum_p_sq(mean_w, n_pairs))
    return PoissonLimitBound(sc, tv_poisson_poisson_bound(mean_w, -math.log(target)))
