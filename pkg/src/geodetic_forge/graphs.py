"""Labelled graphs: Cayley graphs, odd subdivision, slex geodesics, circuits.

Vertices are the integers ``0..n_vertices-1``. Every edge carries a label in each
direction and the two labels are mutually inverse letters.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from typing import Hashable, Iterable, Mapping, Sequence

from .caps import default_caps
from .errors import CircuitCapExceeded, Disconnected, Unreachable
from .groups import FiniteGroup, GenPartition, GenSet, partition_generators
from .words import Letter, LetterOrder, Word, letter_sort_key


@dataclass(frozen=True, eq=False)
class LabeledGraph:
    n_vertices: int
    labels: Mapping[tuple[int, int], Hashable]
    inverse: Mapping[Hashable, Hashable]

    def __post_init__(self):
        for (u, v), x in self.labels.items():
            if u == v:
                raise ValueError(f"loop at vertex {u}")
            if not (0 <= u < self.n_vertices and 0 <= v < self.n_vertices):
                raise ValueError(f"edge ({u}, {v}) leaves the vertex range")
            back = self.labels.get((v, u))
            if back is None:
                raise ValueError(f"edge ({u}, {v}) has no reverse label")
            if self.inverse.get(x) != back:
                raise ValueError(f"labels {x} and {back} on edge ({u}, {v}) are not inverse")

    @cached_property
    def adjacency(self) -> tuple[tuple[int, ...], ...]:
        adj: list[list[int]] = [[] for _ in range(self.n_vertices)]
        for u, v in self.labels:
            adj[u].append(v)
        return tuple(tuple(sorted(a)) for a in adj)

    @cached_property
    def out(self) -> tuple[dict, ...]:
        """Per vertex, outgoing letter -> neighbour (requires distinct outgoing labels)."""
        out: list[dict] = [{} for _ in range(self.n_vertices)]
        for (u, v), x in self.labels.items():
            if x in out[u]:
                raise ValueError(f"vertex {u} has two outgoing edges labelled {x}")
            out[u][x] = v
        return tuple(out)

    @cached_property
    def edges(self) -> tuple[tuple[int, int], ...]:
        return tuple(sorted((u, v) for u, v in self.labels if u < v))

    @cached_property
    def alphabet(self) -> tuple:
        return tuple(sorted(set(self.inverse), key=letter_sort_key))

    def label(self, u: int, v: int):
        return self.labels[(u, v)]

    def path_label(self, path: Sequence[int]) -> Word:
        return tuple(self.labels[(u, v)] for u, v in zip(path, path[1:]))

    def step(self, u: int, x) -> int | None:
        return self.out[u].get(x)

    def read(self, u: int, word: Iterable) -> int | None:
        """End vertex of the path from u labelled by word, or None if unreadable."""
        for x in word:
            u = self.out[u].get(x)
            if u is None:
                return None
        return u

    def trace(self, u: int, word: Iterable) -> list[int] | None:
        path = [u]
        for x in word:
            u = self.out[u].get(x)
            if u is None:
                return None
            path.append(u)
        return path

    def distances_from(self, source: int) -> list[int]:
        """BFS distances; -1 marks unreachable vertices."""
        dist = [-1] * self.n_vertices
        dist[source] = 0
        queue = deque([source])
        adj = self.adjacency
        while queue:
            u = queue.popleft()
            for v in adj[u]:
                if dist[v] < 0:
                    dist[v] = dist[u] + 1
                    queue.append(v)
        return dist

    @cached_property
    def all_distances(self) -> tuple[tuple[int, ...], ...]:
        return tuple(tuple(self.distances_from(s)) for s in range(self.n_vertices))

    def to_json(self) -> dict:
        return {
            "vertices": list(range(self.n_vertices)),
            "edges": [list(e) for e in self.edges],
            "labels": {f"{u}->{v}": str(x) for (u, v), x in sorted(self.labels.items())},
        }


def subdivided_inverse(x: Letter, n: int) -> Letter:
    """Inverse of a letter of the alphabet obtained by (2n+1)-fold subdivision."""
    if x.j is None:
        raise ValueError(f"{x} is a base letter")
    if x.klass == "a":
        return Letter("a", x.i, 2 * n + 2 - x.j, x.factor)
    return Letter("c" if x.klass == "b" else "b", x.i, x.j, x.factor)


def base_inverse(x: Letter) -> Letter:
    if x.klass == "a":
        return x
    return Letter("c" if x.klass == "b" else "b", x.i, None, x.factor)


def cayley_graph(
    group: FiniteGroup, genset: GenSet, partition: GenPartition | None = None
) -> LabeledGraph:
    """Cay(G, S) with L(g, h) the base letter naming g^-1 h."""
    partition = partition or partition_generators(group, genset)
    names = {s: Letter(*partition.symbol(s)) for s in genset.elements}
    labels = {}
    for g in range(group.order):
        for s in genset.elements:
            labels[(g, group.mul(g, s))] = names[s]
    inverse = {names[s]: names[group.inv(s)] for s in genset.elements}
    return LabeledGraph(group.order, labels, inverse)


@dataclass(frozen=True)
class GeodeticVerdict:
    geodetic: bool
    witness: tuple[int, int, tuple[int, ...], tuple[int, ...]] | None = None

    def __bool__(self) -> bool:
        return self.geodetic


def _bfs_counts(graph: LabeledGraph, source: int):
    n = graph.n_vertices
    dist = [-1] * n
    count = [0] * n
    preds: list[list[int]] = [[] for _ in range(n)]
    dist[source], count[source] = 0, 1
    queue = deque([source])
    adj = graph.adjacency
    while queue:
        u = queue.popleft()
        for v in adj[u]:
            if dist[v] < 0:
                dist[v] = dist[u] + 1
                queue.append(v)
            if dist[v] == dist[u] + 1:
                count[v] = min(2, count[v] + count[u])
                preds[v].append(u)
    return dist, count, preds


def _two_geodesics(v, count, preds):
    def one(x):
        path = [x]
        while preds[x]:
            x = preds[x][0]
            path.append(x)
        return path[::-1]

    if len(preds[v]) >= 2:
        return one(preds[v][0]) + [v], one(preds[v][1]) + [v]
    p = preds[v][0]
    first, second = _two_geodesics(p, count, preds)
    return first + [v], second + [v]


def is_geodetic(graph: LabeledGraph) -> GeodeticVerdict:
    for s in range(graph.n_vertices):
        dist, count, preds = _bfs_counts(graph, s)
        if min(dist, default=0) < 0:
            raise Disconnected(f"vertex {dist.index(-1)} is unreachable from {s}")
        for v in range(graph.n_vertices):
            if count[v] > 1:
                p, q = _two_geodesics(v, count, preds)
                return GeodeticVerdict(False, (s, v, tuple(p), tuple(q)))
    return GeodeticVerdict(True)


@dataclass(frozen=True, eq=False)
class SubdivisionMap:
    base: LabeledGraph
    graph: LabeledGraph
    n: int
    old_vertices: tuple[int, ...]
    # (g, h) with g < h -> vertex path g ... h of length 2n+1
    edge_paths: Mapping[tuple[int, int], tuple[int, ...]]

    def path(self, g: int, h: int) -> tuple[int, ...]:
        if g < h:
            return self.edge_paths[(g, h)]
        return self.edge_paths[(h, g)][::-1]

    def is_old(self, v: int) -> bool:
        return v < self.base.n_vertices


def subdivide(base: LabeledGraph, n: int) -> tuple[LabeledGraph, SubdivisionMap]:
    """Replace each edge by a path of 2n+1 edges labelled by sub-edge letters.

    For an edge g -> h labelled a_i or b_i the path reads x_{i,1} ... x_{i,2n+1};
    for c_i it reads c_{i,2n+1} ... c_{i,1}.
    """
    if n < 0:
        raise ValueError("n must be non-negative")
    width = 2 * n + 1
    labels = {}
    edge_paths = {}
    next_vertex = base.n_vertices
    for g, h in base.edges:
        x = base.label(g, h)
        if not isinstance(x, Letter) or not x.is_base:
            raise ValueError(f"subdivision needs base letters, edge ({g}, {h}) has {x!r}")
        js = range(width, 0, -1) if x.klass == "c" else range(1, width + 1)
        path = (g, *range(next_vertex, next_vertex + 2 * n), h)
        next_vertex += 2 * n
        for (u, v), j in zip(zip(path, path[1:]), js):
            letter = Letter(x.klass, x.i, j, x.factor)
            labels[(u, v)] = letter
            labels[(v, u)] = subdivided_inverse(letter, n)
        edge_paths[(g, h)] = path
    inverse = {}
    for x in base.inverse:
        for j in range(1, width + 1):
            letter = Letter(x.klass, x.i, j, x.factor)
            inverse[letter] = subdivided_inverse(letter, n)
    graph = LabeledGraph(next_vertex, labels, inverse)
    smap = SubdivisionMap(base, graph, n, tuple(range(base.n_vertices)), edge_paths)
    return graph, smap


def slex_geodesic(
    graph: LabeledGraph,
    u: int,
    v: int,
    order: LetterOrder,
    dist_to_v: Sequence[int] | None = None,
) -> Word:
    """Label of the shortlex-least path from u to v.

    Walks layer by layer towards v, keeping every vertex reachable by the least
    prefix so far, so repeated labels at a vertex are handled exactly.
    """
    dist = dist_to_v if dist_to_v is not None else graph.distances_from(v)
    if dist[u] < 0:
        raise Unreachable(f"vertex {v} is not reachable from {u}")
    frontier = {u}
    word = []
    for d in range(dist[u], 0, -1):
        options = {}
        for w in frontier:
            for z in graph.adjacency[w]:
                if dist[z] == d - 1:
                    options.setdefault(graph.label(w, z), set()).add(z)
        x = order.min_letter(options)
        word.append(x)
        frontier = options[x]
    return tuple(word)


def canonical_circuit(cycle: Sequence[int]) -> tuple[int, ...]:
    """Least vertex sequence over all rotations and both directions."""
    cycle = list(cycle)
    best = None
    for seq in (cycle, cycle[::-1]):
        for r in range(len(seq)):
            cand = tuple(seq[r:] + seq[:r])
            if best is None or cand < best:
                best = cand
    return best


def enumerate_embedded_circuits(
    graph: LabeledGraph,
    max_vertices: int | None = None,
    max_circuits: int | None = None,
) -> list[tuple[int, ...]]:
    """All embedded circuits, one canonical representative per rotation/reversal class."""
    caps = default_caps()
    max_vertices = caps.circuit_vertices if max_vertices is None else max_vertices
    max_circuits = caps.circuits if max_circuits is None else max_circuits
    if graph.n_vertices > max_vertices:
        raise CircuitCapExceeded(f"{graph.n_vertices} vertices exceed cap {max_vertices}")
    adj = graph.adjacency
    found = []

    for s in range(graph.n_vertices):
        path = [s]
        on_path = {s}
        # iterative DFS over simple paths through vertices > s
        stack = [iter(adj[s])]
        while stack:
            v = next(stack[-1], None)
            if v is None:
                stack.pop()
                on_path.discard(path.pop())
                continue
            if v == s:
                if len(path) >= 3 and path[1] < path[-1]:
                    found.append(tuple(path))
                    if len(found) > max_circuits:
                        raise CircuitCapExceeded(f"more than {max_circuits} circuits")
                continue
            if v > s and v not in on_path:
                path.append(v)
                on_path.add(v)
                stack.append(iter(adj[v]))
    return sorted(found, key=lambda c: (len(c), c))


def lift_circuits(circuits: Iterable[Sequence[int]], smap: SubdivisionMap) -> list[tuple[int, ...]]:
    lifted = []
    for cycle in circuits:
        seq: list[int] = []
        for g, h in zip(cycle, (*cycle[1:], cycle[0])):
            seq.extend(smap.path(g, h)[:-1])
        lifted.append(canonical_circuit(seq))
    return sorted(lifted, key=lambda c: (len(c), c))


def check_label_isomorphism(
    first: LabeledGraph,
    second: LabeledGraph,
    bijection: Mapping,
    base1: int,
    base2: int,
) -> bool:
    """Grow a vertex map from the base pair by following equally labelled edges."""
    if len(set(bijection.values())) != len(bijection):
        return False
    if first.n_vertices != second.n_vertices or len(first.labels) != len(second.labels):
        return False
    pi = {base1: base2}
    used = {base2}
    queue = deque([base1])
    while queue:
        u = queue.popleft()
        pu = pi[u]
        for v in first.adjacency[u]:
            y = bijection.get(first.label(u, v))
            if y is None:
                return False
            targets = [w for w in second.adjacency[pu] if second.label(pu, w) == y]
            if len(targets) != 1:
                return False
            w = targets[0]
            if v in pi:
                if pi[v] != w:
                    return False
            else:
                if w in used:
                    return False
                pi[v] = w
                used.add(w)
                queue.append(v)
            if second.label(w, pu) != bijection.get(first.label(v, u)):
                return False
    return len(pi) == first.n_vertices


def ball_sizes(graph: LabeledGraph, base: int, radius: int) -> list[int]:
    if radius < 0:
        raise ValueError("radius must be non-negative")
    sizes = [0] * (radius + 1)
    for d in graph.distances_from(base):
        if 0 <= d <= radius:
            sizes[d] += 1
    return sizes


def export_dot(graph: LabeledGraph, name: str = "G", vertex_names: Sequence[str] | None = None) -> str:
    lines = [f"graph {name} {{"]
    for v in range(graph.n_vertices):
        text = vertex_names[v] if vertex_names is not None else str(v)
        lines.append(f'  {v} [label="{text}"];')
    for u, v in graph.edges:
        lines.append(f'  {u} -- {v} [label="{graph.label(u, v)}/{graph.label(v, u)}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"
