"""Quasi-clique search over graph views.

A quasi-clique for parameters (gamma_min, min_size) is a vertex set Q with
|Q| >= min_size in which every member is adjacent to at least
ceil(gamma_min * (|Q| - 1)) other members, and which is maximal: no strict
superset satisfying the same degree rule exists. The reported density of a
set is min_v deg_Q(v) / (|Q| - 1).

The search walks a set-enumeration tree over the view's vertices in a fixed
canonical order (ascending degree in the z-core-reduced view, ties by id).
Each node is a pair (chosen, extensions) of disjoint bitmasks; children
extend ``chosen`` by one vertex and keep only later-ordered extensions.
The same walk serves three purposes:

* full maximal enumeration (the exhaustive baseline),
* coverage-set computation (which vertices lie in any quasi-clique) via
  seeded walks that stop at the first hit and skip covered vertices,
* top-k extraction (size desc, density desc, lexicographic asc) with a
  dynamic size floor raised as the top set fills.

Pruning applied at every node, all of it sound for the above outputs:

* degree feasibility to a fixpoint: a chosen vertex must reach the degree
  floor of the smallest size any superset here can have (max(min_size, |X|)),
  an extension the floor of max(min_size, |X| + 1), both measured inside
  chosen | extensions;
* size-interval emptiness: any admissible superset found below this node
  has size at most min(|chosen | extensions|, min over chosen v of
  floor(deg(v) / gamma) + 1) and at least max(min_size, |X|); an empty
  interval kills the node (this is what stops runaway descents in views
  whose degree floor z is small);
* a lookahead that accepts chosen | extensions wholesale when it is
  already dense; and
* only when gamma_min >= 1/2, where quasi-cliques have diameter at most 2,
  restriction of extensions to vertices within distance 2 of every chosen
  vertex.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Iterator

from .graph import GraphView

DEFAULT_EXPANSION_BUDGET = 50_000_000


class SearchBudgetExceeded(RuntimeError):
    """The candidate-expansion ceiling was hit; results would be incomplete."""


class SearchStrategy(Enum):
    """Candidate traversal order: FIFO (breadth-first) or LIFO (depth-first)."""

    BFS = "bfs"
    DFS = "dfs"


@dataclass(frozen=True)
class QuasiCliqueParams:
    """Density threshold gamma_min in (0, 1] (exact rational) and minimum size."""

    gamma_min: Fraction
    min_size: int

    def __post_init__(self):
        gamma = self.gamma_min
        if not isinstance(gamma, Fraction):
            gamma = Fraction(gamma)
            object.__setattr__(self, "gamma_min", gamma)
        if not 0 < gamma <= 1:
            raise ValueError(f"gamma_min must be in (0, 1], got {gamma}")
        if self.min_size < 2:
            raise ValueError(f"min_size must be at least 2, got {self.min_size}")

    def degree_floor(self, size: int) -> int:
        """ceil(gamma_min * (size - 1)), computed exactly."""
        num = self.gamma_min.numerator * (size - 1)
        return -(-num // self.gamma_min.denominator)

    @property
    def z(self) -> int:
        """Degree every member of any admissible quasi-clique must reach."""
        return self.degree_floor(self.min_size)


@dataclass(frozen=True)
class QuasiClique:
    """A reported pattern: sorted vertex tuple and exact min-degree density."""

    vertices: tuple[int, ...]
    density: Fraction

    @property
    def size(self) -> int:
        return len(self.vertices)


def pattern_sort_key(q: QuasiClique):
    """Total order for reporting: size desc, density desc, vertex tuple asc."""
    return (-len(q.vertices), -q.density, q.vertices)


@dataclass
class SearchStats:
    """Counters accumulated across engine invocations."""

    expansions: int = 0
    lookahead_hits: int = 0
    emitted: int = 0


def _bits(mask: int) -> Iterator[int]:
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def is_gamma_dense(view: GraphView, q, params: QuasiCliqueParams) -> bool:
    """Degree test only: |q| >= min_size and every member meets the floor in q.

    Maximality is not checked here.
    """
    qset = set(q)
    if not qset <= set(view.members):
        raise ValueError("q must be a subset of the view's members")
    size = len(qset)
    if size < params.min_size:
        return False
    need = params.degree_floor(size)
    for v in qset:
        deg = sum(1 for u in view.neighbors(v) if u in qset)
        if deg < need:
            return False
    return True


def _restrict_view(view: GraphView, keep: set) -> GraphView:
    members = tuple(v for v in view.members if v in keep)
    local = tuple(
        tuple(u for u in view.local_adjacency[i] if u in keep)
        for i, v in enumerate(view.members)
        if v in keep
    )
    return GraphView(members=members, local_adjacency=local)


def vertex_prune(view: GraphView, params: QuasiCliqueParams) -> GraphView:
    """Iteratively remove vertices below the z degree floor (z-core reduction).

    No quasi-clique member is ever removed, so the returned view contains all
    quasi-cliques of the input view.
    """
    z = params.z
    degrees = {v: len(view.local_adjacency[i]) for i, v in enumerate(view.members)}
    alive = set(view.members)
    queue = deque(v for v, d in degrees.items() if d < z)
    while queue:
        v = queue.popleft()
        if v not in alive:
            continue
        alive.discard(v)
        for u in view.neighbors(v):
            if u in alive:
                degrees[u] -= 1
                if degrees[u] < z:
                    queue.append(u)
    if len(alive) == len(view.members):
        return view
    return _restrict_view(view, alive)


class _ViewSearch:
    """Bitmask set-enumeration search over one z-core-reduced view."""

    def __init__(self, view: GraphView, params: QuasiCliqueParams, budget: int):
        core = vertex_prune(view, params)
        # Canonical order: ascending degree in the pruned view, ties by id.
        degree = {v: len(core.local_adjacency[i]) for i, v in enumerate(core.members)}
        order = sorted(core.members, key=lambda v: (degree[v], v))
        pos = {v: p for p, v in enumerate(order)}
        n = len(order)
        adj = [0] * n
        for i, v in enumerate(core.members):
            p = pos[v]
            acc = 0
            for u in core.local_adjacency[i]:
                acc |= 1 << pos[u]
            adj[p] = acc
        self.params = params
        self.z = params.z
        self.min_size = params.min_size
        self.adj = adj
        self.n = n
        self.vertex_of = order
        self.full_mask = (1 << n) - 1
        self.budget = budget
        self.expansions = 0
        self.lookahead_hits = 0
        # Masks of positions strictly above p in the canonical order.
        self.above = [self.full_mask & ~((1 << (p + 1)) - 1) for p in range(n)]
        # floors[s] = degree floor for a size-s set; size_cap[d] = largest set
        # size a vertex of within-degree d can belong to.
        self.floors = [params.degree_floor(s) for s in range(n + 2)]
        num, den = params.gamma_min.numerator, params.gamma_min.denominator
        self.size_cap = [d * den // num + 1 for d in range(n + 1)]
        if params.gamma_min * 2 >= 1:
            self.reach2 = [self._distance2_mask(p) for p in range(n)]
        else:
            self.reach2 = None

    def _distance2_mask(self, p: int) -> int:
        mask = self.adj[p] | (1 << p)
        for q in _bits(self.adj[p]):
            mask |= self.adj[q]
        return mask

    def _is_dense(self, mask: int, size: int) -> bool:
        if size < self.min_size:
            return False
        need = self.floors[size]
        adj = self.adj
        m = mask
        while m:
            low = m & -m
            if (adj[low.bit_length() - 1] & mask).bit_count() < need:
                return False
            m ^= low
        return True

    def _locally_maximal(self, mask: int, size: int) -> bool:
        for p in _bits(self.full_mask & ~mask):
            if self._is_dense(mask | (1 << p), size + 1):
                return False
        return True

    def _refine(self, chosen: int, cand: int) -> tuple[int, int] | None:
        """Degree and size-interval filters to a fixpoint.

        Returns (refined extensions, size upper bound) or None when no
        admissible set can exist below this node.
        """
        adj = self.adj
        floors = self.floors
        size_cap = self.size_cap
        csize = chosen.bit_count()
        smallest = csize if csize > self.min_size else self.min_size
        need_chosen = floors[smallest]
        need_ext = floors[csize + 1 if csize + 1 > self.min_size else self.min_size]
        while True:
            union = chosen | cand
            upper = union.bit_count()
            m = chosen
            while m:
                low = m & -m
                d = (adj[low.bit_length() - 1] & union).bit_count()
                if d < need_chosen:
                    return None
                cap = size_cap[d]
                if cap < upper:
                    upper = cap
                m ^= low
            if upper < smallest:
                return None
            removed = 0
            m = cand
            while m:
                low = m & -m
                if (adj[low.bit_length() - 1] & union).bit_count() < need_ext:
                    removed |= low
                m ^= low
            if not removed:
                return cand, upper
            cand &= ~removed

    def _clique_from_mask(self, mask: int, size: int) -> QuasiClique:
        min_deg = min((self.adj[p] & mask).bit_count() for p in _bits(mask))
        vertices = tuple(sorted(self.vertex_of[p] for p in _bits(mask)))
        return QuasiClique(vertices=vertices, density=Fraction(min_deg, size - 1))

    def _tick(self):
        self.expansions += 1
        if self.expansions > self.budget:
            raise SearchBudgetExceeded(
                f"quasi-clique search exceeded {self.budget} candidate expansions "
                f"on a {self.n}-vertex view"
            )

    def enumerate_all(self, strategy: SearchStrategy) -> list[int]:
        """Masks of all maximal quasi-cliques (subset-filtered antichain)."""
        if self.n < self.min_size:
            return []
        pool: list[int] = []
        nodes = deque([(0, self.full_mask)])
        dfs = strategy is SearchStrategy.DFS
        while nodes:
            chosen, cand = nodes.pop() if dfs else nodes.popleft()
            self._tick()
            refined = self._refine(chosen, cand)
            if refined is None:
                continue
            cand, _upper = refined
            union = chosen | cand
            usize = union.bit_count()
            if self._is_dense(union, usize):
                self.lookahead_hits += 1
                _antichain_insert(pool, union)
                continue
            csize = chosen.bit_count()
            if (
                csize >= self.min_size
                and self._is_dense(chosen, csize)
                and self._locally_maximal(chosen, csize)
            ):
                _antichain_insert(pool, chosen)
            self._push_children(nodes, chosen, cand, dfs)
        return pool

    def cover(self, strategy: SearchStrategy) -> int:
        """Mask of all vertices lying in at least one quasi-clique.

        One seeded walk per still-uncovered vertex, stopping at the first
        admissible set found; every set found covers all of its members, so
        candidates made of covered vertices are never searched again. The
        result does not depend on the traversal strategy.
        """
        if self.n < self.min_size:
            return 0
        covered = 0
        dfs = strategy is SearchStrategy.DFS
        for root in range(self.n):
            if covered >> root & 1:
                continue
            hit = self._greedy_dense_from(root)
            if not hit:
                hit = self._first_dense_containing(root, dfs)
            covered |= hit
        return covered

    def _greedy_dense_from(self, root: int) -> int:
        """Grow a set around ``root`` densest-first; the largest admissible
        snapshot reached, or 0. A hit is always genuine; a miss proves nothing.
        """
        adj = self.adj
        root_bit = 1 << root
        chosen = root_bit
        csize = 1
        cand = (self.reach2[root] if self.reach2 is not None else self.full_mask) & ~root_bit
        best = 0
        while cand:
            self._tick()
            refined = self._refine(chosen, cand)
            if refined is None:
                break
            cand, _upper = refined
            if not cand:
                break
            union = chosen | cand
            usize = union.bit_count()
            if self._is_dense(union, usize):
                best = union
                break
            pick = -1
            pick_key = None
            m = cand
            while m:
                low = m & -m
                p = low.bit_length() - 1
                m ^= low
                key = ((adj[p] & chosen).bit_count(), (adj[p] & union).bit_count(), -p)
                if pick_key is None or key > pick_key:
                    pick_key = key
                    pick = p
            chosen |= 1 << pick
            csize += 1
            cand &= ~(1 << pick)
            if self.reach2 is not None:
                cand &= self.reach2[pick]
            if csize >= self.min_size and self._is_dense(chosen, csize):
                best = chosen
        return best

    def _first_dense_containing(self, root: int, dfs: bool) -> int:
        """Any admissible set containing ``root``, or 0 when none exists."""
        root_bit = 1 << root
        cand0 = (self.reach2[root] if self.reach2 is not None else self.full_mask) & ~root_bit
        nodes = deque([(root_bit, cand0)])
        while nodes:
            chosen, cand = nodes.pop() if dfs else nodes.popleft()
            self._tick()
            refined = self._refine(chosen, cand)
            if refined is None:
                continue
            cand, _upper = refined
            union = chosen | cand
            usize = union.bit_count()
            if self._is_dense(union, usize):
                self.lookahead_hits += 1
                return union
            csize = chosen.bit_count()
            if csize >= self.min_size and self._is_dense(chosen, csize):
                return chosen
            self._push_children(nodes, chosen, cand, dfs)
        return 0

    def top_k(self, k: int | None) -> tuple[list[int], int]:
        """Masks surviving the top-k search plus the largest size possibly lost.

        The dynamic size floor equals the size of the k-th best pooled set.
        Because the pool may briefly hold non-maximal sets, a floor prune can
        in principle drop a pattern whose size ties the final k-th answer;
        the returned ``lost_bound`` lets the caller detect that and fall back
        to the exhaustive walk.
        """
        if self.n < self.min_size:
            return [], 0
        pool: list[tuple[int, int, Fraction, tuple[int, ...]]] = []
        floor = self.min_size
        lost_bound = 0
        nodes = [(0, self.full_mask)]
        while nodes:
            chosen, cand = nodes.pop()
            self._tick()
            refined = self._refine(chosen, cand)
            if refined is None:
                continue
            cand, upper = refined
            union = chosen | cand
            usize = union.bit_count()
            if upper < floor:
                lost_bound = max(lost_bound, upper)
                continue
            if self._is_dense(union, usize):
                self.lookahead_hits += 1
                floor = self._pool_insert(pool, union, usize, k)
                continue
            csize = chosen.bit_count()
            if (
                csize >= self.min_size
                and self._is_dense(chosen, csize)
                and self._locally_maximal(chosen, csize)
            ):
                floor = self._pool_insert(pool, chosen, csize, k)
            self._push_children(nodes, chosen, cand, dfs=True)
        return [entry[1] for entry in pool], lost_bound

    def _pool_insert(self, pool, mask: int, size: int, k: int) -> int:
        """Antichain insert; returns the refreshed dynamic size floor."""
        skip = False
        for entry in pool:
            if mask & ~entry[1] == 0:
                skip = True
                break
        if not skip:
            pool[:] = [e for e in pool if e[1] & ~mask != 0]
            min_deg = min((self.adj[p] & mask).bit_count() for p in _bits(mask))
            vertices = tuple(sorted(self.vertex_of[p] for p in _bits(mask)))
            pool.append((size, mask, Fraction(min_deg, size - 1), vertices))
        if len(pool) >= k:
            return sorted(pool, key=_pool_key)[k - 1][0]
        return self.min_size

    def _push_children(self, nodes, chosen: int, cand: int, dfs: bool):
        children = []
        m = cand
        while m:
            low = m & -m
            p = low.bit_length() - 1
            m ^= low
            child_cand = cand & self.above[p]
            if self.reach2 is not None:
                child_cand &= self.reach2[p]
            children.append((chosen | low, child_cand))
        if dfs:
            children.reverse()
        nodes.extend(children)


def _pool_key(entry):
    size, _mask, density, vertices = entry
    return (-size, -density, vertices)


def _antichain_insert(pool: list[int], mask: int):
    """Keep ``pool`` a subset-free antichain while inserting ``mask``."""
    for existing in pool:
        if mask & ~existing == 0:
            return
    pool[:] = [e for e in pool if e & ~mask != 0]
    pool.append(mask)


def _finish(search: _ViewSearch, stats: SearchStats | None):
    if stats is not None:
        stats.expansions += search.expansions
        stats.lookahead_hits += search.lookahead_hits


def enumerate_maximal(
    view: GraphView,
    params: QuasiCliqueParams,
    strategy: SearchStrategy = SearchStrategy.DFS,
    *,
    budget: int = DEFAULT_EXPANSION_BUDGET,
    stats: SearchStats | None = None,
) -> list[QuasiClique]:
    """All maximal quasi-cliques of the view, in reporting order.

    The output is subset-free: it is exactly the family of maximal elements
    among all degree-admissible sets of size >= min_size, so its union covers
    every vertex belonging to any such set.
    """
    search = _ViewSearch(view, params, budget)
    try:
        masks = search.enumerate_all(strategy)
    finally:
        _finish(search, stats)
    cliques = [search._clique_from_mask(m, m.bit_count()) for m in masks]
    cliques.sort(key=pattern_sort_key)
    if stats is not None:
        stats.emitted += len(cliques)
    return cliques


def covered_vertices(
    view: GraphView,
    params: QuasiCliqueParams,
    strategy: SearchStrategy = SearchStrategy.DFS,
    *,
    budget: int = DEFAULT_EXPANSION_BUDGET,
    stats: SearchStats | None = None,
) -> tuple[int, ...]:
    """Sorted vertices lying in at least one quasi-clique of the view.

    Computed without full enumeration: each still-uncovered vertex seeds a
    walk that stops at the first admissible set found, and vertices already
    covered are never searched again. The result is identical for both
    strategies.
    """
    search = _ViewSearch(view, params, budget)
    try:
        covered = search.cover(strategy)
    finally:
        _finish(search, stats)
    return tuple(sorted(search.vertex_of[p] for p in _bits(covered)))


def top_k_patterns(
    view: GraphView,
    params: QuasiCliqueParams,
    k: int | None,
    *,
    budget: int = DEFAULT_EXPANSION_BUDGET,
    stats: SearchStats | None = None,
) -> list[QuasiClique]:
    """The k best maximal quasi-cliques under the reporting order.

    Depth-first with a dynamic size floor. If the floor could have clipped a
    pattern tying the final k-th size, the exhaustive enumeration is used
    instead, so the result always equals the first k of enumerate_maximal.
    """
    if k is not None and k < 1:
        raise ValueError("k must be at least 1")
    if k is None:
        return enumerate_maximal(view, params, SearchStrategy.DFS, budget=budget, stats=stats)
    search = _ViewSearch(view, params, budget)
    try:
        masks, lost_bound = search.top_k(k)
    finally:
        _finish(search, stats)
    cliques = [search._clique_from_mask(m, m.bit_count()) for m in masks]
    cliques.sort(key=pattern_sort_key)
    result = cliques[:k]
    safe = lost_bound == 0 or (len(result) >= k and result[-1].size > lost_bound)
    if not safe:
        full = enumerate_maximal(view, params, SearchStrategy.DFS, budget=budget, stats=stats)
        return full[:k]
    if stats is not None:
        stats.emitted += len(result)
    return result
