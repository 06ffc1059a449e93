"""Independent reference implementations used to check the engine.

Everything here is deliberately naive: explicit subset enumeration, direct
degree counting, and exact rational arithmetic. Nothing is shared with the
package's search code paths.
"""

from __future__ import annotations

import math
import random
from fractions import Fraction
from itertools import combinations

from scpm import GraphView, load_graph


def degree_need(gamma: Fraction, size: int) -> int:
    return math.ceil(gamma * (size - 1))


def dense_subsets(view: GraphView, gamma: Fraction, min_size: int):
    """Every admissible vertex set of the view, by full subset enumeration."""
    adj = {v: set(view.local_adjacency[i]) for i, v in enumerate(view.members)}
    found = []
    for r in range(min_size, len(view.members) + 1):
        need = degree_need(gamma, r)
        for combo in combinations(view.members, r):
            cset = set(combo)
            if all(len(adj[v] & cset) >= need for v in combo):
                found.append(frozenset(combo))
    return found

def brute_maximal(view: GraphView, gamma: Fraction, min_size: int):
    """Maximal admissible sets as sorted (vertices, density) pairs."""
    dense = dense_subsets(view, gamma, min_size)
    adj = {v: set(view.local_adjacency[i]) for i, v in enumerate(view.members)}
    out = []
    for q in dense:
        if any(q < other for other in dense):
            continue
        min_deg = min(len(adj[v] & q) for v in q)
        out.append((tuple(sorted(q)), Fraction(min_deg, len(q) - 1)))
    out.sort(key=lambda item: (-len(item[0]), -item[1], item[0]))
    return out


def brute_covered(view: GraphView, gamma: Fraction, min_size: int) -> tuple[int, ...]:
    """Union of every admissible set of the view."""
    covered: set[int] = set()
    for q in dense_subsets(view, gamma, min_size):
        covered |= q
    return tuple(sorted(covered))


def as_pairs(cliques):
    """Engine output normalized to the oracle's (vertices, density) shape."""
    return [(q.vertices, q.density) for q in cliques]


def exact_expected_bound(counts: dict[int, int], n: int, sigma: int, gamma: Fraction, min_size: int) -> Fraction:
    """Exact-rational evaluation of the analytical expectation bound."""
    rho = Fraction(sigma - 1, n - 1)
    z = degree_need(gamma, min_size)
    total = Fraction(0)
    for alpha, count in counts.items():
        if alpha < z:
            continue
        p_alpha = Fraction(count, n)
        tail = Fraction(0)
        for beta in range(z, alpha + 1):
            tail += math.comb(alpha, beta) * rho**beta * (1 - rho) ** (alpha - beta)
        total += p_alpha * tail
    return total


def random_graph_lines(rng: random.Random, n: int, p: float):
    """Edge lines of an Erdos-Renyi style graph plus an isolated-vertex guard."""
    lines = []
    for u in range(n):
        for v in range(u + 1, n):
            if rng.random() < p:
                lines.append(f"{u} {v}")
    # Mention every vertex so isolated ones exist too.
    attr_guard = [f"{v}" for v in range(n)]
    return lines, attr_guard


def random_attributed_graph(rng: random.Random, n: int, p: float, n_attrs: int, attr_prob: float = 0.4):
    """A loaded random attributed graph built through the public loader."""
    edge_lines, _ = random_graph_lines(rng, n, p)
    attr_lines = []
    names = [f"a{i}" for i in range(n_attrs)]
    for v in range(n):
        present = [names[i] for i in range(n_attrs) if rng.random() < attr_prob]
        attr_lines.append(f"{v} " + " ".join(present) if present else f"{v}")
    return load_graph(iter(edge_lines), iter(attr_lines))
