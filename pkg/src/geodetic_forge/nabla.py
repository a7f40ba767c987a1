"""Rewriting systems read off odd subdivisions of Cayley graphs.

For a finite group with a geodetic inverse-closed generating set, the system
built here is finite, confluent and length-reducing, and presents the free
product of the group with a free group of rank n times the number of generators.
Also provides free-group systems, free-product composition and the relabelling
that identifies iterated subdivisions with a single one.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import Iterable, Mapping, Sequence

from .errors import AlphabetCollision, ParseError, SystemNotInverseClosed
from .graphs import (
    LabeledGraph,
    SubdivisionMap,
    cayley_graph,
    enumerate_embedded_circuits,
    lift_circuits,
    slex_geodesic,
    subdivide,
    subdivided_inverse,
)
from .groups import FiniteGroup, GenPartition, GenSet, Presentation, partition_generators
from .rewriting import RewritingSystem, Rule, is_inverse_closed, is_length_reducing
from .words import Letter, LetterOrder, Word, format_word, letter_sort_key, parse_word

RULE_TYPES = ("R1", "R2", "R3")


@dataclass(frozen=True)
class Provenance:
    kind: str
    circuit: tuple[int, ...]


def build_alphabet(partition: GenPartition, n: int) -> tuple[tuple[Letter, ...], dict[Letter, Letter]]:
    """Letters x_{i,j} for each generator symbol and j in 1..2n+1, with their inverses."""
    if n < 0:
        raise ValueError("n must be non-negative")
    letters = []
    for klass, count in (("a", partition.m1), ("b", partition.m2), ("c", partition.m2)):
        for i in range(1, count + 1):
            letters.extend(Letter(klass, i, j) for j in range(1, 2 * n + 2))
    letters.sort(key=letter_sort_key)
    return tuple(letters), {x: subdivided_inverse(x, n) for x in letters}


def _circuit_rules(graph: LabeledGraph, lifted: Sequence[int], slex) -> list[tuple[Rule, str]]:
    length = len(lifted)
    if length % 2 == 0 and length < 4:
        return []
    kind = "R2" if length % 2 else "R3"
    half = (length + 1) // 2
    found = []
    for seq in (list(lifted), list(lifted)[::-1]):
        for start in range(length):
            rot = seq[start:] + seq[:start]
            u, v = rot[0], rot[half]
            longer = rot[: half + 1]
            shorter = [u] + rot[half:][::-1]
            beta = graph.path_label(shorter)
            if beta != slex(u, v):
                continue
            alpha = graph.path_label(longer)
            if alpha != beta:
                found.append((Rule(alpha, beta), kind))
    return found


def enumerate_rules(
    graph: LabeledGraph,
    smap: SubdivisionMap,
    order: LetterOrder,
    max_vertices: int | None = None,
    max_circuits: int | None = None,
) -> list[tuple[Rule, Provenance]]:
    """All rules of the three kinds, each with the first circuit that produced it."""
    cache: dict[tuple[int, int], Word] = {}
    dist_to = {}

    def slex(u: int, v: int) -> Word:
        key = (u, v)
        if key not in cache:
            if v not in dist_to:
                dist_to[v] = graph.distances_from(v)
            cache[key] = slex_geodesic(graph, u, v, order, dist_to[v])
        return cache[key]

    out: dict[Rule, Provenance] = {}
    for u, v in sorted(graph.labels):
        rule = Rule((graph.label(u, v), graph.label(v, u)), ())
        out.setdefault(rule, Provenance("R1", (u, v)))
    base_circuits = enumerate_embedded_circuits(smap.base, max_vertices, max_circuits)
    for lifted in lift_circuits(base_circuits, smap):
        for rule, kind in _circuit_rules(graph, lifted, slex):
            out.setdefault(rule, Provenance(kind, tuple(lifted)))

    def key(item):
        rule, prov = item
        return (
            RULE_TYPES.index(prov.kind),
            len(rule.lhs),
            [letter_sort_key(x) for x in rule.lhs],
            [letter_sort_key(x) for x in rule.rhs],
        )

    return sorted(out.items(), key=key)


@dataclass(frozen=True, eq=False)
class NablaSystem:
    group: FiniteGroup
    genset: GenSet
    partition: GenPartition
    n: int
    base: LabeledGraph
    graph: LabeledGraph
    smap: SubdivisionMap
    order: LetterOrder
    system: RewritingSystem
    provenance: Mapping[Rule, Provenance] = field(repr=False)

    @property
    def pieces(self) -> tuple[LabeledGraph, ...]:
        return (self.graph,)

    def rules_of(self, kind: str) -> list[Rule]:
        return [r for r in self.system.rules if self.provenance[r].kind == kind]

    @cached_property
    def length_reducing(self) -> bool:
        return is_length_reducing(self.system)

    def to_json(self) -> dict:
        return {
            "group": self.group.name,
            "generators": list(self.genset.elements),
            "n": self.n,
            "order": [str(x) for x in self.order.letters()],
            "alphabet": [str(x) for x in self.system.alphabet],
            "involution": {str(x): str(y) for x, y in self.system.inverse.items()},
            "length_reducing": self.length_reducing,
            "rules": [
                {
                    "lhs": format_word(r.lhs),
                    "rhs": format_word(r.rhs),
                    "type": self.provenance[r].kind,
                    "circuit": list(self.provenance[r].circuit),
                }
                for r in self.system.rules
            ],
        }


def nabla(
    group: FiniteGroup,
    genset: GenSet,
    n: int,
    order: LetterOrder | Sequence | None = None,
    max_vertices: int | None = None,
    max_circuits: int | None = None,
) -> NablaSystem:
    partition = partition_generators(group, genset)
    base = cayley_graph(group, genset, partition)
    graph, smap = subdivide(base, n)
    alphabet, inverse = build_alphabet(partition, n)
    if order is None:
        order = LetterOrder.canonical(alphabet)
    elif not isinstance(order, LetterOrder):
        order = LetterOrder.from_sequence(order)
    if set(order.rank) != set(alphabet):
        raise ValueError("letter order must rank exactly the system's alphabet")
    rules = enumerate_rules(graph, smap, order, max_vertices, max_circuits)
    system = RewritingSystem.build(alphabet, (r for r, _ in rules), inverse)
    return NablaSystem(
        group, genset, partition, n, base, graph, smap, order, system, dict(rules)
    )


def free_group_system(k: int) -> RewritingSystem:
    """Free reduction on letters b_i, c_i (c_i the inverse of b_i), i in 1..k."""
    if k < 0:
        raise ValueError("rank must be non-negative")
    alphabet = [Letter("b", i) for i in range(1, k + 1)] + [Letter("c", i) for i in range(1, k + 1)]
    inverse = {}
    for i in range(1, k + 1):
        inverse[Letter("b", i)] = Letter("c", i)
        inverse[Letter("c", i)] = Letter("b", i)
    rules = [Rule((x, inverse[x]), ()) for x in alphabet]
    return RewritingSystem.build(alphabet, rules, inverse)


def is_free_reduction(system: RewritingSystem) -> bool:
    inv = system.inverse
    if inv is None or any(x not in inv for x in system.alphabet):
        return False
    expected = {Rule((x, inv[x]), ()) for x in system.alphabet}
    return set(system.rules) == expected


def free_pieces(system: RewritingSystem) -> tuple[LabeledGraph, ...]:
    """One single-edge graph per inverse pair of a free-reduction system."""
    pieces = []
    done = set()
    for x in system.alphabet:
        if x in done:
            continue
        y = system.inverse[x]
        done.update((x, y))
        pieces.append(LabeledGraph(2, {(0, 1): x, (1, 0): y}, {x: y, y: x}))
    return tuple(pieces)


@dataclass(frozen=True, eq=False)
class ComposedSystem:
    """Union of namespaced factor systems; pieces are None when some factor has no graph model."""

    system: RewritingSystem
    pieces: tuple[LabeledGraph, ...] | None
    factors: int


def _tag(x, offset: int):
    if not isinstance(x, Letter):
        return x
    return x.with_factor((x.factor or 1) + offset)


def _retag_graph(graph: LabeledGraph, offset: int) -> LabeledGraph:
    return LabeledGraph(
        graph.n_vertices,
        {e: _tag(x, offset) for e, x in graph.labels.items()},
        {_tag(x, offset): _tag(y, offset) for x, y in graph.inverse.items()},
    )


def _factor_parts(factor):
    if isinstance(factor, NablaSystem):
        return factor.system, factor.pieces, 1
    if isinstance(factor, ComposedSystem):
        return factor.system, factor.pieces, factor.factors
    if isinstance(factor, RewritingSystem):
        pieces = free_pieces(factor) if is_free_reduction(factor) else None
        return factor, pieces, 1
    raise TypeError(f"cannot compose {type(factor).__name__}")


def compose_free_product(first, second) -> ComposedSystem:
    """Disjoint union of two systems; letters gain factor tags f1, f2, ..."""
    sys_a, pieces_a, count_a = _factor_parts(first)
    sys_b, pieces_b, count_b = _factor_parts(second)
    parts = []
    for system, pieces, offset in ((sys_a, pieces_a, 0), (sys_b, pieces_b, count_a)):
        alphabet = [_tag(x, offset) for x in system.alphabet]
        inverse = {_tag(x, offset): _tag(y, offset) for x, y in (system.inverse or {}).items()}
        rules = [Rule(tuple(_tag(x, offset) for x in r.lhs), tuple(_tag(x, offset) for x in r.rhs)) for r in system.rules]
        graphs = None if pieces is None else [_retag_graph(g, offset) for g in pieces]
        parts.append((alphabet, inverse, rules, graphs))
    clash = set(parts[0][0]) & set(parts[1][0])
    if clash:
        raise AlphabetCollision(f"factors share letters {sorted(map(str, clash))}")
    alphabet = parts[0][0] + parts[1][0]
    inverse = {**parts[0][1], **parts[1][1]}
    rules = parts[0][2] + parts[1][2]
    pieces = None
    if parts[0][3] is not None and parts[1][3] is not None:
        pieces = tuple(parts[0][3] + parts[1][3])
    has_inverse = sys_a.inverse is not None and sys_b.inverse is not None
    system = RewritingSystem.build(alphabet, rules, inverse if has_inverse else None)
    return ComposedSystem(system, pieces, count_a + count_b)


def presentation_of(system: RewritingSystem) -> Presentation:
    """Generators are the letters; one relator lhs * rhs^-1 per rule."""
    if not is_inverse_closed(system):
        raise SystemNotInverseClosed("presentation needs an inverse-closed system")
    index = {x: k for k, x in enumerate(system.alphabet)}
    relators = []
    for rule in system.rules:
        rel = tuple((index[x], 1) for x in rule.lhs) + tuple((index[x], -1) for x in reversed(rule.rhs))
        relators.append(rel)
    return Presentation(len(system.alphabet), tuple(relators), tuple(str(x) for x in system.alphabet))


# Iterated subdivision


def intermediate_names(partition: GenPartition, m: int) -> dict[Letter, Letter]:
    """Name each letter of the m-th alphabet as a base letter of a new generator set.

    The centre letters a_{i,m+1} are the only involutions. Every other letter is
    paired with its inverse; walking the canonical order, the first letter of a
    pair becomes b_r and its inverse c_r.
    """
    alphabet, inverse = build_alphabet(partition, m)
    names: dict[Letter, Letter] = {}
    count = {"a": 0, "b": 0}
    for x in alphabet:
        if x in names:
            continue
        y = inverse[x]
        if x == y:
            count["a"] += 1
            names[x] = Letter("a", count["a"])
        else:
            count["b"] += 1
            names[x] = Letter("b", count["b"])
            names[y] = Letter("c", count["b"])
    return names


def relabel(graph: LabeledGraph, names: Mapping) -> LabeledGraph:
    return LabeledGraph(
        graph.n_vertices,
        {e: names[x] for e, x in graph.labels.items()},
        {names[x]: names[y] for x, y in graph.inverse.items()},
    )


def iterated_subdivision(base: LabeledGraph, partition: GenPartition, n: int, m: int) -> LabeledGraph:
    """Subdivide by m, rename the letters as base letters, then subdivide by n."""
    inner, _ = subdivide(base, m)
    outer, _ = subdivide(relabel(inner, intermediate_names(partition, m)), n)
    return outer


def combined_depth(n: int, m: int) -> int:
    k = 2 * n * m + n + m
    assert 2 * k + 1 == (2 * n + 1) * (2 * m + 1)
    return k


def phi_bijection(partition: GenPartition, n: int, m: int) -> dict[Letter, Letter]:
    """Letter map from the k-th alphabet onto the twice-subdivided one, k = 2nm+n+m.

    x_{i,(s-1)(2n+1)+t} goes to the t-th letter of the subdivided x_{i,s}, counted
    in the direction x_{i,s} is read along the original edge.
    """
    k = combined_depth(n, m)
    names = intermediate_names(partition, m)
    alphabet, _ = build_alphabet(partition, k)
    width = 2 * n + 1
    phi = {}
    for x in alphabet:
        s, t = divmod(x.j - 1, width)
        s, t = s + 1, t + 1
        mid = names[Letter(x.klass, x.i, s)]
        # a/b letters run forwards along an edge; c letters (both levels) run backwards
        forwards = x.klass != "c"
        if mid.klass == "c" and forwards:
            t = width + 1 - t
        phi[x] = Letter(mid.klass, mid.i, t)
    return phi


# Serialization


def load_system(path: str | Path) -> RewritingSystem:
    """Read a system JSON file (as written by the nabla command) or a plain rules file."""
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ParseError(f"cannot read system file {path}: {exc}") from exc
    if path.suffix != ".json":
        from .rewriting import parse_rules

        rules = parse_rules(text)
        letters = sorted({x for r in rules for x in r.lhs + r.rhs}, key=letter_sort_key)
        return RewritingSystem.build(letters, rules)
    try:
        doc = json.loads(text)
        alphabet = [Letter.parse(t) for t in doc["alphabet"]]
        inverse = {Letter.parse(k): Letter.parse(v) for k, v in doc.get("involution", {}).items()}
        rules = [Rule(parse_word(r["lhs"]), parse_word(r["rhs"])) for r in doc["rules"]]
    except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"malformed system file {path}: {exc}") from exc
    return RewritingSystem.build(alphabet, rules, inverse or None)


def system_to_json(system: RewritingSystem) -> dict:
    return {
        "alphabet": [str(x) for x in system.alphabet],
        "involution": {str(x): str(y) for x, y in (system.inverse or {}).items()},
        "length_reducing": is_length_reducing(system),
        "rules": [{"lhs": format_word(r.lhs), "rhs": format_word(r.rhs)} for r in system.rules],
    }
