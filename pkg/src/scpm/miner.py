"""Level-wise mining of attribute sets correlated with dense subgraphs.

The main miner walks the attribute-set lattice depth-first by equivalence
class: frontier entries are ordered by ascending support (ties by id) and
each entry unions with its earlier siblings to form the next class. Three
prunings keep it fast without changing the qualifying output:

* each child's quasi-clique search is restricted to the intersection of its
  parents' coverage sets (no quasi-clique can leave them),
* an attribute set is extended only while covered_count >= eps_min*sigma_min
  and covered_count >= delta_min * eps_exp(sigma_min) * sigma_min, which no
  superset can recover from once violated,
* coverage-set computation and top-k extraction use the pruned engine.

The exhaustive baseline visits every frequent attribute set, fully
enumerates the quasi-cliques of each induced graph, and applies the same
output filters, so both miners emit identical record and pattern sets.
"""

from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

from .graph import AttributedGraph, induced_view
from .index import AttributeIndex, frequent_attributes, intersect_sorted, vertex_set
from .nullmodel import ExpectedCorrelation, NullModel, NullModelConfig, normalized_delta
from .quasiclique import (
    DEFAULT_EXPANSION_BUDGET,
    QuasiClique,
    QuasiCliqueParams,
    SearchBudgetExceeded,
    SearchStats,
    SearchStrategy,
    covered_vertices,
    enumerate_maximal,
    top_k_patterns,
)

logger = logging.getLogger("scpm")


@dataclass
class MinerConfig:
    """Thresholds and knobs for one mining run."""

    qc_params: QuasiCliqueParams
    sigma_min: int = 1
    eps_min: float = 0.0
    delta_min: float = 0.0
    k: int | None = 5  # None = unlimited
    strategy: SearchStrategy = SearchStrategy.DFS
    null_model: NullModelConfig = field(default_factory=NullModelConfig)
    max_set_size: int | None = None
    expansion_budget: int = DEFAULT_EXPANSION_BUDGET
    fail_fast: bool = False
    threads: int = 1

    def __post_init__(self):
        if self.sigma_min < 1:
            raise ValueError("sigma_min must be at least 1")
        if not 0.0 <= self.eps_min <= 1.0:
            raise ValueError("eps_min must be in [0, 1]")
        if self.delta_min < 0.0:
            raise ValueError("delta_min must be non-negative")
        if self.k is not None and self.k < 1:
            raise ValueError("k must be at least 1 (or None for unlimited)")
        if self.max_set_size is not None and self.max_set_size < 1:
            raise ValueError("max_set_size must be at least 1")
        if self.threads < 1:
            raise ValueError("threads must be at least 1")


@dataclass(frozen=True)
class CorrelationRecord:
    """Per attribute set: support, coverage set, and the correlation figures."""

    attribute_set: tuple[int, ...]
    support: int
    covered: tuple[int, ...]
    eps: float
    eps_exp: ExpectedCorrelation
    delta: float


@dataclass(frozen=True)
class PatternRecord:
    """One reported pattern: an attribute set and a quasi-clique it induces."""

    attribute_set: tuple[int, ...]
    quasi_clique: QuasiClique


@dataclass
class MinerStats:
    """Counters for one run: visited sets, engine expansions, aborted sets."""

    sets_visited: int = 0
    expansions: int = 0
    overflow_sets: list[tuple[int, ...]] = field(default_factory=list)

    def merge(self, other: "MinerStats"):
        self.sets_visited += other.sets_visited
        self.expansions += other.expansions
        self.overflow_sets.extend(other.overflow_sets)


@dataclass
class MiningResult:
    records: list[CorrelationRecord]
    patterns: list[PatternRecord]
    stats: MinerStats

    def __iter__(self):
        yield self.records
        yield self.patterns


@dataclass
class _Entry:
    """Frontier entry: attribute set, its posting list, and its coverage set."""

    attrs: tuple[int, ...]
    posting: tuple[int, ...]
    covered: frozenset[int]


def structural_correlation(
    g: AttributedGraph,
    index: AttributeIndex,
    s,
    cfg: MinerConfig,
    restriction: frozenset[int] | set[int] | None = None,
    *,
    posting: tuple[int, ...] | None = None,
    null: NullModel | None = None,
    stats: SearchStats | None = None,
) -> CorrelationRecord:
    """Correlation record for attribute set ``s``.

    Support counts the full induced vertex set; the quasi-clique search runs
    on the view restricted to ``restriction`` when one is supplied (sound
    whenever the restriction contains every coverage set of a subset of s).
    """
    s = tuple(sorted(set(s)))
    if posting is None:
        posting = vertex_set(index, s)
    support = len(posting)
    if support < 1:
        raise ValueError(f"attribute set {s} has no supporting vertices")
    if restriction is None:
        members = posting
    else:
        members = tuple(v for v in posting if v in restriction)
    view = induced_view(g, members)
    covered = covered_vertices(
        view, cfg.qc_params, cfg.strategy, budget=cfg.expansion_budget, stats=stats
    )
    eps = len(covered) / support
    if null is None:
        null = NullModel(g, cfg.qc_params, cfg.null_model)
    eps_exp = null.expected(support)
    delta = normalized_delta(eps, eps_exp)
    return CorrelationRecord(
        attribute_set=s,
        support=support,
        covered=covered,
        eps=eps,
        eps_exp=eps_exp,
        delta=delta,
    )


def prune_extension(
    rec: CorrelationRecord, cfg: MinerConfig, eps_exp_at_sigma_min: ExpectedCorrelation
) -> bool:
    """True when ``rec``'s attribute set may still have qualifying supersets.

    Uses covered_count == eps * support exactly, so both tests are free of
    rounding: covered_count >= eps_min * sigma_min and covered_count >=
    delta_min * eps_exp(sigma_min) * sigma_min.
    """
    covered_count = len(rec.covered)
    if covered_count < cfg.eps_min * cfg.sigma_min:
        return False
    if covered_count < cfg.delta_min * eps_exp_at_sigma_min.value * cfg.sigma_min:
        return False
    return True


def _qualifies(rec: CorrelationRecord, cfg: MinerConfig) -> bool:
    return rec.eps >= cfg.eps_min and rec.delta >= cfg.delta_min


def _patterns_for(
    g: AttributedGraph,
    rec: CorrelationRecord,
    members: tuple[int, ...],
    cfg: MinerConfig,
    stats: SearchStats,
) -> list[PatternRecord]:
    view = induced_view(g, members)
    cliques = top_k_patterns(
        view, cfg.qc_params, cfg.k, budget=cfg.expansion_budget, stats=stats
    )
    return [PatternRecord(rec.attribute_set, q) for q in cliques]


def _union_attrs(a: tuple[int, ...], b: tuple[int, ...]) -> tuple[int, ...]:
    return tuple(sorted(set(a) | set(b)))


def _handle_overflow(s, cfg: MinerConfig, stats: MinerStats, exc: SearchBudgetExceeded):
    stats.overflow_sets.append(tuple(s))
    logger.warning("attribute set %s aborted: %s", s, exc)
    if cfg.fail_fast:
        raise exc


class _ScpmWorker:
    """Evaluates one attribute set and recursively extends one class entry."""

    def __init__(self, g, index, cfg, null, eps_exp_floor):
        self.g = g
        self.index = index
        self.cfg = cfg
        self.null = null
        self.eps_exp_floor = eps_exp_floor

    def evaluate(
        self,
        attrs: tuple[int, ...],
        posting: tuple[int, ...],
        restriction: frozenset[int] | None,
        records: list,
        patterns: list,
        stats: MinerStats,
    ) -> _Entry | None:
        """Record + patterns for one set; returns a frontier entry to extend."""
        cfg = self.cfg
        engine_stats = SearchStats()
        try:
            rec = structural_correlation(
                self.g,
                self.index,
                attrs,
                cfg,
                restriction,
                posting=posting,
                null=self.null,
                stats=engine_stats,
            )
            if _qualifies(rec, cfg):
                members = (
                    posting
                    if restriction is None
                    else tuple(v for v in posting if v in restriction)
                )
                pats = _patterns_for(self.g, rec, members, cfg, engine_stats)
            else:
                pats = []
        except SearchBudgetExceeded as exc:
            stats.expansions += engine_stats.expansions
            _handle_overflow(attrs, cfg, stats, exc)
            return None
        stats.expansions += engine_stats.expansions
        stats.sets_visited += 1
        if _qualifies(rec, cfg):
            records.append(rec)
            patterns.extend(pats)
        if prune_extension(rec, cfg, self.eps_exp_floor):
            return _Entry(attrs, posting, frozenset(rec.covered))
        return None

    def extend(
        self,
        entries: list[_Entry],
        i: int,
        records: list,
        patterns: list,
        stats: MinerStats,
    ):
        """Union entry i with every earlier sibling, then recurse per class."""
        cfg = self.cfg
        base = entries[i]
        children: list[_Entry] = []
        for j in range(i):
            other = entries[j]
            attrs = _union_attrs(base.attrs, other.attrs)
            if cfg.max_set_size is not None and len(attrs) > cfg.max_set_size:
                continue
            posting = intersect_sorted(base.posting, other.posting)
            if len(posting) < cfg.sigma_min:
                continue
            restriction = frozenset(base.covered & other.covered)
            child = self.evaluate(attrs, posting, restriction, records, patterns, stats)
            if child is not None:
                children.append(child)
        children.sort(key=lambda e: (len(e.posting), e.attrs))
        for ci in range(len(children)):
            self.extend(children, ci, records, patterns, stats)


def _pmap(fn, items, threads: int):
    if threads <= 1 or len(items) <= 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))


def run_scpm(g: AttributedGraph, index: AttributeIndex, cfg: MinerConfig) -> MiningResult:
    """Pruned mining run.

    Emits one record per visited attribute set with sigma >= sigma_min that
    satisfies eps >= eps_min and delta >= delta_min, plus its top-k patterns,
    in depth-first discovery order. Sets failing the extension tests are
    reported (when they qualify) but never extended. Overflowing induced
    graphs abort only their own attribute set unless fail_fast is set.
    """
    stats = MinerStats()
    if cfg.sigma_min > g.vertex_count:
        return MiningResult([], [], stats)
    null = NullModel(g, cfg.qc_params, cfg.null_model)
    singles = frequent_attributes(index, cfg.sigma_min)
    singles.sort(key=lambda e: (len(e[1]), e[0]))
    if not singles:
        return MiningResult([], [], stats)
    eps_exp_floor = null.expected(cfg.sigma_min)
    worker = _ScpmWorker(g, index, cfg, null, eps_exp_floor)

    def eval_single(entry):
        attrs, posting = entry
        records: list[CorrelationRecord] = []
        patterns: list[PatternRecord] = []
        local = MinerStats()
        frontier_entry = worker.evaluate(attrs, posting, None, records, patterns, local)
        return records, patterns, local, frontier_entry

    level1 = _pmap(eval_single, singles, cfg.threads)
    records: list[CorrelationRecord] = []
    patterns: list[PatternRecord] = []
    frontier: list[_Entry] = []
    for recs, pats, local, entry in level1:
        records.extend(recs)
        patterns.extend(pats)
        stats.merge(local)
        if entry is not None:
            frontier.append(entry)

    def run_subtree(i):
        recs: list[CorrelationRecord] = []
        pats: list[PatternRecord] = []
        local = MinerStats()
        worker.extend(frontier, i, recs, pats, local)
        return recs, pats, local

    if cfg.max_set_size is None or cfg.max_set_size > 1:
        for recs, pats, local in _pmap(run_subtree, list(range(len(frontier))), cfg.threads):
            records.extend(recs)
            patterns.extend(pats)
            stats.merge(local)
    return MiningResult(records, patterns, stats)


class _NaiveWorker:
    """Exhaustive evaluation: full enumeration, no restriction, no extension gates."""

    def __init__(self, g, index, cfg, null):
        self.g = g
        self.index = index
        self.cfg = cfg
        self.null = null

    def evaluate(self, attrs, posting, records, patterns, stats) -> bool:
        cfg = self.cfg
        engine_stats = SearchStats()
        try:
            view = induced_view(self.g, posting)
            cliques = enumerate_maximal(
                view, cfg.qc_params, cfg.strategy, budget=cfg.expansion_budget, stats=engine_stats
            )
        except SearchBudgetExceeded as exc:
            stats.expansions += engine_stats.expansions
            _handle_overflow(attrs, cfg, stats, exc)
            return False
        stats.expansions += engine_stats.expansions
        stats.sets_visited += 1
        covered_set: set[int] = set()
        for q in cliques:
            covered_set.update(q.vertices)
        covered = tuple(sorted(covered_set))
        support = len(posting)
        eps = len(covered) / support
        eps_exp = self.null.expected(support)
        delta = normalized_delta(eps, eps_exp)
        rec = CorrelationRecord(tuple(attrs), support, covered, eps, eps_exp, delta)
        if _qualifies(rec, cfg):
            records.append(rec)
            top = cliques if cfg.k is None else cliques[: cfg.k]
            patterns.extend(PatternRecord(rec.attribute_set, q) for q in top)
        return True

    def extend(self, entries, i, records, patterns, stats):
        cfg = self.cfg
        base = entries[i]
        children = []
        for j in range(i):
            other = entries[j]
            attrs = _union_attrs(base[0], other[0])
            if cfg.max_set_size is not None and len(attrs) > cfg.max_set_size:
                continue
            posting = intersect_sorted(base[1], other[1])
            if len(posting) < cfg.sigma_min:
                continue
            self.evaluate(attrs, posting, records, patterns, stats)
            children.append((attrs, posting))
        children.sort(key=lambda e: (len(e[1]), e[0]))
        for ci in range(len(children)):
            self.extend(children, ci, records, patterns, stats)


def run_naive(g: AttributedGraph, index: AttributeIndex, cfg: MinerConfig) -> MiningResult:
    """Exhaustive baseline: every frequent attribute set, full enumeration.

    Semantically equivalent filtered output to run_scpm; intended for small
    inputs, cross-validation, and benchmark comparisons.
    """
    stats = MinerStats()
    if cfg.sigma_min > g.vertex_count:
        return MiningResult([], [], stats)
    null = NullModel(g, cfg.qc_params, cfg.null_model)
    singles = frequent_attributes(index, cfg.sigma_min)
    singles.sort(key=lambda e: (len(e[1]), e[0]))
    if not singles:
        return MiningResult([], [], stats)
    worker = _NaiveWorker(g, index, cfg, null)

    def eval_single(entry):
        attrs, posting = entry
        records: list[CorrelationRecord] = []
        patterns: list[PatternRecord] = []
        local = MinerStats()
        worker.evaluate(attrs, posting, records, patterns, local)
        return records, patterns, local

    records: list[CorrelationRecord] = []
    patterns: list[PatternRecord] = []
    for recs, pats, local in _pmap(eval_single, singles, cfg.threads):
        records.extend(recs)
        patterns.extend(pats)
        stats.merge(local)

    frontier = [(attrs, posting) for attrs, posting in singles]

    def run_subtree(i):
        recs: list[CorrelationRecord] = []
        pats: list[PatternRecord] = []
        local = MinerStats()
        worker.extend(frontier, i, recs, pats, local)
        return recs, pats, local

    if cfg.max_set_size is None or cfg.max_set_size > 1:
        for recs, pats, local in _pmap(run_subtree, list(range(len(frontier))), cfg.threads):
            records.extend(recs)
            patterns.extend(pats)
            stats.merge(local)
    return MiningResult(records, patterns, stats)
