"""Attributed graph storage, degree statistics, and induced subgraph views.

The graph is immutable after loading: adjacency is a list of strictly sorted
neighbor tuples over dense vertex ids 0..n-1, and every vertex carries a
sorted tuple of dense attribute ids. Original file ids (arbitrary
non-negative integers) are remapped on load; ``external_ids`` maps back.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable

# File vertex ids above this are rejected so dense remapping stays in
# fixed-width integer territory.
MAX_VERTEX_ID = 2**63 - 1


class GraphFormatError(ValueError):
    """A line of an edge or attribute source could not be parsed."""

    def __init__(self, message: str, source: str = "input", line_number: int | None = None):
        self.source = source
        self.line_number = line_number
        if line_number is not None:
            message = f"{source}, line {line_number}: {message}"
        super().__init__(message)


@dataclass
class AttributeDictionary:
    """Bidirectional map between attribute tokens and dense integer ids.

    Ids are handed out in first-seen order while loading.
    """

    id_to_token: list[str] = field(default_factory=list)
    token_to_id: dict[str, int] = field(default_factory=dict)

    def intern(self, token: str) -> int:
        attr_id = self.token_to_id.get(token)
        if attr_id is None:
            attr_id = len(self.id_to_token)
            self.token_to_id[token] = attr_id
            self.id_to_token.append(token)
        return attr_id

    def id_for(self, token: str) -> int | None:
        return self.token_to_id.get(token)

    def token_for(self, attr_id: int) -> str:
        return self.id_to_token[attr_id]

    def __len__(self) -> int:
        return len(self.id_to_token)

    def __contains__(self, attr_id: int) -> bool:
        return 0 <= attr_id < len(self.id_to_token)


@dataclass
class AttributedGraph:
    """Undirected attributed graph over dense vertex ids.

    Invariants: adjacency is symmetric, self-loop free, and every neighbor
    tuple is strictly sorted; attribute tuples are strictly sorted ids known
    to ``attribute_dictionary``.
    """

    vertex_count: int
    adjacency: list[tuple[int, ...]]
    attributes: list[tuple[int, ...]]
    attribute_dictionary: AttributeDictionary
    external_ids: tuple[int, ...]
    dropped_self_loops: int = 0

    def neighbors(self, v: int) -> tuple[int, ...]:
        return self.adjacency[v]

    def degree(self, v: int) -> int:
        return len(self.adjacency[v])

    def attrs_of(self, v: int) -> tuple[int, ...]:
        return self.attributes[v]

    def original_id(self, v: int) -> int:
        return self.external_ids[v]

    @property
    def edge_count(self) -> int:
        return sum(len(a) for a in self.adjacency) // 2


@dataclass
class DegreeHistogram:
    """Degree distribution of a graph: counts, the maximum degree, and p(alpha)."""

    counts: dict[int, int]
    max_degree: int
    probabilities: dict[int, float]

    def prob(self, alpha: int) -> float:
        return self.probabilities.get(alpha, 0.0)


@dataclass
class GraphView:
    """Induced subgraph over a sorted member subset.

    ``local_adjacency[i]`` is the sorted tuple of neighbors of ``members[i]``
    restricted to the members. Vertex ids are those of the parent graph.
    """

    members: tuple[int, ...]
    local_adjacency: tuple[tuple[int, ...], ...]

    def __len__(self) -> int:
        return len(self.members)

    def neighbors(self, v: int) -> tuple[int, ...]:
        return self.local_adjacency[self.index_of(v)]

    def index_of(self, v: int) -> int:
        pos = self.__dict__.get("_pos")
        if pos is None:
            pos = {m: i for i, m in enumerate(self.members)}
            self.__dict__["_pos"] = pos
        return pos[v]

    @property
    def edge_count(self) -> int:
        return sum(len(a) for a in self.local_adjacency) // 2


def _parse_vertex_id(token: str, source: str, line_number: int) -> int:
    try:
        value = int(token)
    except ValueError:
        raise GraphFormatError(f"expected a vertex id, got {token!r}", source, line_number) from None
    if value < 0:
        raise GraphFormatError(f"vertex id must be non-negative, got {value}", source, line_number)
    if value > MAX_VERTEX_ID:
        raise GraphFormatError(f"vertex id {value} overflows the supported range", source, line_number)
    return value


def load_graph(edge_source: Iterable[str], attribute_source: Iterable[str]) -> AttributedGraph:
    """Build a validated graph from an edge line stream and an attribute line stream.

    Edge lines hold two whitespace-separated vertex ids; attribute lines hold
    a vertex id followed by attribute tokens. Lines starting with ``#`` and
    blank lines are ignored. Duplicate edges are deduplicated silently;
    self-loops are dropped and counted. Vertices seen only in the attribute
    source exist with empty adjacency, and an empty edge source is legal.
    """
    edges: set[tuple[int, int]] = set()
    vertices: set[int] = set()
    self_loops = 0

    for line_number, raw in enumerate(edge_source, start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if len(parts) != 2:
            raise GraphFormatError(
                f"expected two vertex ids, got {len(parts)} fields", "edge source", line_number
            )
        u = _parse_vertex_id(parts[0], "edge source", line_number)
        v = _parse_vertex_id(parts[1], "edge source", line_number)
        vertices.add(u)
        vertices.add(v)
        if u == v:
            self_loops += 1
            continue
        edges.add((u, v) if u < v else (v, u))

    raw_attrs: dict[int, set[str]] = {}
    dictionary = AttributeDictionary()
    attr_order: list[tuple[int, str]] = []
    for line_number, raw in enumerate(attribute_source, start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        v = _parse_vertex_id(parts[0], "attribute source", line_number)
        vertices.add(v)
        bucket = raw_attrs.setdefault(v, set())
        for token in parts[1:]:
            if token not in bucket:
                bucket.add(token)
                attr_order.append((v, token))

    original_ids = tuple(sorted(vertices))
    dense = {orig: i for i, orig in enumerate(original_ids)}
    n = len(original_ids)

    # Token ids in first-seen (file-order) sequence.
    for _, token in attr_order:
        dictionary.intern(token)

    adjacency_sets: list[set[int]] = [set() for _ in range(n)]
    for u, v in edges:
        du, dv = dense[u], dense[v]
        adjacency_sets[du].add(dv)
        adjacency_sets[dv].add(du)
    adjacency = [tuple(sorted(s)) for s in adjacency_sets]

    attributes: list[tuple[int, ...]] = [()] * n
    for orig, tokens in raw_attrs.items():
        attributes[dense[orig]] = tuple(sorted(dictionary.token_to_id[t] for t in tokens))

    return AttributedGraph(
        vertex_count=n,
        adjacency=adjacency,
        attributes=attributes,
        attribute_dictionary=dictionary,
        external_ids=original_ids,
        dropped_self_loops=self_loops,
    )


def degree_distribution(g: AttributedGraph) -> DegreeHistogram:
    """Histogram of vertex degrees, isolated vertices included at degree 0."""
    counts: dict[int, int] = {}
    for neighbors in g.adjacency:
        d = len(neighbors)
        counts[d] = counts.get(d, 0) + 1
    max_degree = max(counts) if counts else 0
    n = g.vertex_count
    probabilities = {d: c / n for d, c in counts.items()} if n else {}
    return DegreeHistogram(counts=counts, max_degree=max_degree, probabilities=probabilities)


def induced_view(g: AttributedGraph, members) -> GraphView:
    """View of ``g`` restricted to ``members`` (sorted, duplicate-free, all in V)."""
    members = tuple(members)
    member_set = set(members)
    if len(member_set) != len(members) or any(members[i] >= members[i + 1] for i in range(len(members) - 1)):
        raise ValueError("members must be strictly sorted and duplicate-free")
    local = []
    for v in members:
        if not 0 <= v < g.vertex_count:
            raise ValueError(f"vertex {v} is not in the graph")
        local.append(tuple(u for u in g.adjacency[v] if u in member_set))
    return GraphView(members=members, local_adjacency=tuple(local))
