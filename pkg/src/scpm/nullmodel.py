"""Expected structural correlation under uniform random vertex sampling.

Two models for the expected fraction of covered vertices in a random
size-sigma vertex subset: a Monte-Carlo estimator (mean over r independent
samples, each mined with the coverage engine) and an analytical upper bound
built from the degree distribution. A vertex needs degree at least
z = ceil(gamma_min * (min_size - 1)) inside the sample to sit in any
quasi-clique, and the chance that a degree-alpha vertex keeps beta of its
neighbors in the sample is the binomial term C(alpha, beta) * rho^beta *
(1 - rho)^(alpha - beta) with rho = (sigma - 1) / (n - 1). Summing the
binomial tail from z over the degree distribution bounds the expectation
from above, and the bound is non-decreasing in sigma.
"""

from __future__ import annotations

import math
import random
import threading
from dataclasses import dataclass

from .graph import AttributedGraph, DegreeHistogram, degree_distribution, induced_view
from .quasiclique import (
    DEFAULT_EXPANSION_BUDGET,
    QuasiCliqueParams,
    SearchStrategy,
    covered_vertices,
)

ANALYTICAL = "analytical"
SIMULATION = "simulation"

# Above this degree the binomial term is evaluated in log space.
_LOG_SPACE_DEGREE = 60

_MASK64 = (1 << 64) - 1


@dataclass(frozen=True)
class NullModelConfig:
    """Model choice plus the sample count and seed used by the simulation."""

    kind: str = ANALYTICAL
    samples: int = 100
    seed: int = 0

    def __post_init__(self):
        if self.kind not in (ANALYTICAL, SIMULATION):
            raise ValueError(f"unknown null model kind {self.kind!r}")
        if self.kind == SIMULATION and self.samples < 1:
            raise ValueError("simulation requires at least one sample")


@dataclass(frozen=True)
class ExpectedCorrelation:
    """An expected-correlation value in [0, 1] and the model that produced it."""

    value: float
    kind: str
    std_dev: float | None = None


def sample_prob(sigma: int, n: int) -> float:
    """Probability of a fixed other vertex joining a size-sigma sample: (sigma-1)/(n-1)."""
    if n < 2:
        raise ValueError(f"need at least two vertices, got {n}")
    if not 1 <= sigma <= n:
        raise ValueError(f"sigma must be in [1, {n}], got {sigma}")
    return (sigma - 1) / (n - 1)


def binomial_term(alpha: int, beta: int, rho: float) -> float:
    """C(alpha, beta) * rho^beta * (1-rho)^(alpha-beta), stable for large alpha."""
    if beta > alpha:
        raise ValueError(f"beta ({beta}) exceeds alpha ({alpha})")
    if alpha < 0 or beta < 0:
        raise ValueError("alpha and beta must be non-negative")
    if not 0.0 <= rho <= 1.0:
        raise ValueError(f"rho must be in [0, 1], got {rho}")
    if rho == 0.0:
        return 1.0 if beta == 0 else 0.0
    if rho == 1.0:
        return 1.0 if beta == alpha else 0.0
    if alpha <= _LOG_SPACE_DEGREE:
        return math.comb(alpha, beta) * rho**beta * (1.0 - rho) ** (alpha - beta)
    log_choose = (
        math.lgamma(alpha + 1) - math.lgamma(beta + 1) - math.lgamma(alpha - beta + 1)
    )
    return math.exp(log_choose + beta * math.log(rho) + (alpha - beta) * math.log1p(-rho))


def max_eps_exp(
    hist: DegreeHistogram, sigma: int, params: QuasiCliqueParams, n: int
) -> ExpectedCorrelation:
    """Analytical upper bound: P(a random vertex keeps degree >= z in the sample).

    Sums p(alpha) times the binomial tail from z over all degrees alpha >= z.
    Non-decreasing in sigma; clamped to [0, 1].
    """
    rho = sample_prob(sigma, n)
    z = params.z
    total = math.fsum(
        hist.prob(alpha)
        * math.fsum(binomial_term(alpha, beta, rho) for beta in range(z, alpha + 1))
        for alpha in range(z, hist.max_degree + 1)
        if hist.prob(alpha) > 0.0
    )
    return ExpectedCorrelation(value=min(1.0, max(0.0, total)), kind=ANALYTICAL)


def _stream_seed(seed: int, sigma: int, trial: int) -> int:
    """Independent 64-bit stream per (seed, support, trial), order-insensitive."""
    x = (seed ^ (sigma * 0x9E3779B97F4A7C15) ^ (trial * 0xC2B2AE3D27D4EB4F)) & _MASK64
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & _MASK64
    return x ^ (x >> 31)


def sim_eps_exp(
    g: AttributedGraph,
    sigma: int,
    params: QuasiCliqueParams,
    cfg: NullModelConfig,
    *,
    strategy: SearchStrategy = SearchStrategy.DFS,
    budget: int = DEFAULT_EXPANSION_BUDGET,
) -> ExpectedCorrelation:
    """Monte-Carlo estimate: mean covered fraction over r uniform samples.

    Each trial draws sigma vertices without replacement from its own seeded
    stream, so results are bit-for-bit reproducible and independent of
    evaluation order. Also reports the sample standard deviation.
    """
    if cfg.kind != SIMULATION:
        raise ValueError("sim_eps_exp requires a simulation-kind config")
    n = g.vertex_count
    if not 1 <= sigma <= n:
        raise ValueError(f"sigma must be in [1, {n}], got {sigma}")
    fractions_seen: dict[tuple[int, ...], float] = {}
    values = []
    for trial in range(cfg.samples):
        rng = random.Random(_stream_seed(cfg.seed, sigma, trial))
        members = tuple(sorted(rng.sample(range(n), sigma)))
        frac = fractions_seen.get(members)
        if frac is None:
            view = induced_view(g, members)
            covered = covered_vertices(view, params, strategy, budget=budget)
            frac = len(covered) / sigma
            fractions_seen[members] = frac
        values.append(frac)
    mean = math.fsum(values) / len(values)
    if len(values) > 1:
        var = math.fsum((x - mean) ** 2 for x in values) / (len(values) - 1)
        std = math.sqrt(var)
    else:
        std = 0.0
    return ExpectedCorrelation(value=mean, kind=SIMULATION, std_dev=std)


def normalized_delta(eps: float, eps_exp: ExpectedCorrelation) -> float:
    """eps / eps_exp, with 0/0 defined as 0 and positive/0 as +infinity."""
    if not 0.0 <= eps <= 1.0:
        raise ValueError(f"eps must be in [0, 1], got {eps}")
    if eps_exp.value == 0.0:
        return math.inf if eps > 0.0 else 0.0
    return eps / eps_exp.value


class NullModel:
    """Per-run provider of expected correlations, memoized by support.

    The expectation depends only on the support, the graph, and the
    quasi-clique parameters, so one cache serves a whole mining run. Safe
    for concurrent use; recomputation races are benign because every
    computation of a given support yields the identical value.
    """

    def __init__(
        self,
        g: AttributedGraph,
        params: QuasiCliqueParams,
        cfg: NullModelConfig,
        hist: DegreeHistogram | None = None,
    ):
        self._g = g
        self._params = params
        self._cfg = cfg
        self._hist = hist if hist is not None else degree_distribution(g)
        self._cache: dict[int, ExpectedCorrelation] = {}
        self._lock = threading.Lock()

    @property
    def kind(self) -> str:
        return self._cfg.kind

    def expected(self, sigma: int) -> ExpectedCorrelation:
        with self._lock:
            hit = self._cache.get(sigma)
        if hit is not None:
            return hit
        if self._g.vertex_count < 2:
            # No sample of a sub-2-vertex graph can reach any degree floor.
            value = ExpectedCorrelation(value=0.0, kind=self._cfg.kind)
        elif self._cfg.kind == ANALYTICAL:
            value = max_eps_exp(self._hist, sigma, self._params, self._g.vertex_count)
        else:
            value = sim_eps_exp(self._g, sigma, self._params, self._cfg)
        with self._lock:
            self._cache[sigma] = value
        return value
