"""Toric ideals of the bipartite graphs attached to 2 x n weight rows.

The graph on ``u_1..u_n`` and ``v_1..v_n`` has the edge ``{u_i, v_j}`` exactly
when ``w_i > w_j``.  Edge variables ``x_ij`` are kept as pairs ``(i, j)`` and
ordered so that ``x_ij > x_kl`` iff ``(i, j)`` is lexicographically smaller.
For r = 2 a bracket ``[p; q]`` is the same thing as the edge ``(p, q)``.
"""

from __future__ import annotations

import itertools
from collections import Counter
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Iterator, Sequence

from .exceptions import InvalidCycle
from .groebner import Binomial, BracketRing, GbReport, Monomial, buchberger_check, compare_revlex, mono
from .matchfield import Composition, WeightData, weight_vector

Edge = tuple[int, int]
EdgeMonomial = tuple[Edge, ...]  # sorted multiset of edges
EdgeBinomial = tuple[EdgeMonomial, EdgeMonomial]


@dataclass(frozen=True)
class BipartiteGraph:
    n: int
    edges: frozenset[Edge]

    def __post_init__(self) -> None:
        object.__setattr__(self, "edges", frozenset(self.edges))
        for i, j in self.edges:
            if not (1 <= i <= self.n and 1 <= j <= self.n):
                raise ValueError(f"edge {(i, j)} outside 1..{self.n}")

    @cached_property
    def adjacency(self) -> list[list[int]]:
        """``A[i-1][j-1] = 1`` iff ``{u_i, v_j}`` is an edge."""
        return [[int((i, j) in self.edges) for j in range(1, self.n + 1)] for i in range(1, self.n + 1)]

    def has_edge(self, i: int, j: int) -> bool:
        return (i, j) in self.edges

    def sorted_edges(self) -> list[Edge]:
        return sorted(self.edges)


def build_graph(w: WeightData | Sequence[int]) -> BipartiteGraph:
    if not isinstance(w, WeightData):
        w = WeightData(tuple(w))
    n = w.n
    edges = {(i, j) for i in range(1, n + 1) for j in range(1, n + 1) if w.at(i) > w.at(j)}
    return BipartiteGraph(n, frozenset(edges))


def graph_of(a: Composition) -> BipartiteGraph:
    return build_graph(weight_vector(a))


@dataclass(frozen=True)
class EvenCycle:
    """``(u_{i_1}, v_{j_1}, ..., u_{i_q}, v_{j_q})`` stored as the two index lists."""

    rows: tuple[int, ...]
    cols: tuple[int, ...]

    @property
    def q(self) -> int:
        return len(self.rows)

    @property
    def length(self) -> int:
        return 2 * self.q

    def edges(self) -> list[Edge]:
        q = self.q
        out = [(self.rows[k], self.cols[k]) for k in range(q)]
        out += [(self.rows[k + 1], self.cols[k]) for k in range(q - 1)]
        out.append((self.rows[0], self.cols[-1]))
        return out

    def validate(self, G: BipartiteGraph) -> None:
        if self.q < 2 or len(self.cols) != self.q:
            raise InvalidCycle(f"{self} is not an alternating sequence of length >= 4")
        if len(set(self.rows)) != self.q or len(set(self.cols)) != self.q:
            raise InvalidCycle(f"{self} repeats a vertex")
        missing = [e for e in self.edges() if not G.has_edge(*e)]
        if missing:
            raise InvalidCycle(f"{self}: edges {missing} are not in the graph")

    def __str__(self) -> str:
        return "(" + ", ".join(f"u{i}, v{j}" for i, j in zip(self.rows, self.cols)) + ")"


def cycle_binomial(C: EvenCycle, G: BipartiteGraph) -> EdgeBinomial:
    """``f_C``: the product along the odd steps minus the product along the even steps."""
    C.validate(G)
    q = C.q
    first = [(C.rows[k], C.cols[k]) for k in range(q)]
    second = [(C.rows[0], C.cols[-1])] + [(C.rows[k + 1], C.cols[k]) for k in range(q - 1)]
    return tuple(sorted(first)), tuple(sorted(second))


def even_cycles(G: BipartiteGraph, max_length: int | None = 6) -> Iterator[EvenCycle]:
    """Every even cycle of length at most ``max_length`` (all of them if ``None``), once each.

    A cycle is reported starting at its smallest row vertex, in the direction
    whose first column vertex is the smaller of its two neighbours there.
    """
    qmax = G.n if max_length is None else min(G.n, max_length // 2)
    nbr_u = {i: sorted(j for (k, j) in G.edges if k == i) for i in range(1, G.n + 1)}
    nbr_v = {j: sorted(i for (i, k) in G.edges if k == j) for j in range(1, G.n + 1)}

    def extend(rows: list[int], cols: list[int]) -> Iterator[EvenCycle]:
        start = rows[0]
        last_col = cols[-1]
        if len(rows) >= 2 and G.has_edge(start, last_col) and cols[0] < last_col:
            yield EvenCycle(tuple(rows), tuple(cols))
        if len(rows) == qmax:
            return
        for i in nbr_v[last_col]:
            if i <= start or i in rows:
                continue
            for j in nbr_u[i]:
                if j in cols:
                    continue
                yield from extend(rows + [i], cols + [j])

    for i1 in range(1, G.n + 1):
        for j1 in nbr_u[i1]:
            yield from extend([i1], [j1])


def quadratic_cycle_set(a: Composition | BipartiteGraph) -> list[EdgeBinomial]:
    """Binomials ``x_il x_kj - x_ij x_kl`` (i < k, j < l) over 4-cycles, initial monomial first."""
    G = a if isinstance(a, BipartiteGraph) else graph_of(a)
    out = []
    n = G.n
    for i, k in itertools.combinations(range(1, n + 1), 2):
        for j, l in itertools.combinations(range(1, n + 1), 2):
            if all(G.has_edge(*e) for e in ((i, l), (i, j), (k, j), (k, l))):
                out.append((tuple(sorted([(i, l), (k, j)])), tuple(sorted([(i, j), (k, l)]))))
    return out


def check_forbidden_submatrices(G: BipartiteGraph) -> bool:
    """True iff no rows k1 < k2 and columns k3 < k4 of the adjacency matrix form a 2x2 permutation matrix."""
    A = G.adjacency
    n = G.n
    for k1, k2 in itertools.combinations(range(n), 2):
        r1, r2 = A[k1], A[k2]
        for k3, k4 in itertools.combinations(range(n), 2):
            if (r1[k3], r1[k4], r2[k3], r2[k4]) in ((1, 0, 0, 1), (0, 1, 1, 0)):
                return False
    return True


def edge_image(m: Iterable[Edge]) -> Counter:
    """Image of an edge monomial under ``x_ij -> s_i t_j``."""
    c: Counter = Counter()
    for i, j in m:
        c["s", i] += 1
        c["t", j] += 1
    return c


def in_edge_kernel(f: EdgeBinomial) -> bool:
    return edge_image(f[0]) == edge_image(f[1])


class EdgeRing:
    """Edge variables of a graph indexed by the order ``x_ij > x_kl`` iff ``(i, j) < (k, l)``."""

    def __init__(self, G: BipartiteGraph):
        self.graph = G
        self.variables = G.sorted_edges()
        self.index = {e: k for k, e in enumerate(self.variables)}

    def monomial(self, edges: Iterable[Edge]) -> Monomial:
        return mono(self.index[e] for e in edges)

    def binomial(self, f: EdgeBinomial) -> Binomial:
        """Engine binomial with ``f[0]`` as lead; orientation is not checked here."""
        return Binomial(self.monomial(f[0]), self.monomial(f[1]))


def certify_cycle_basis(a: Composition) -> tuple[bool, GbReport]:
    """Orientation flag and Buchberger report for the 4-cycle binomials of ``G_a``."""
    ring = EdgeRing(graph_of(a))
    G = [ring.binomial(f) for f in quadratic_cycle_set(a)]
    oriented = all(compare_revlex(g.lead, g.trail) > 0 for g in G)
    if not oriented:
        return False, GbReport(passed=False, generators=len(G))
    return True, buchberger_check(G)


def bracket_to_edge(column: Sequence[int]) -> Edge:
    if len(column) != 2:
        raise ValueError("the bracket/edge bridge only exists for r = 2")
    return (column[0], column[1])


def generators_as_edges(ring: BracketRing, G: Iterable[Binomial]) -> set[EdgeBinomial]:
    """Translate r = 2 bracket binomials into edge binomials."""
    if ring.r != 2:
        raise ValueError("the bracket/edge bridge only exists for r = 2")

    def conv(m: Monomial) -> EdgeMonomial:
        return tuple(sorted(bracket_to_edge(b.column) for b in ring.brackets(m)))

    return {(conv(g.lead), conv(g.trail)) for g in G}
