"""Named verification procedures combining the other modules.

Each procedure returns a :class:`VerificationReport`; none of them raise on a
failed check, only on invalid input or exceeded caps.
"""

from __future__ import annotations

import json
import time
from collections import deque
from dataclasses import dataclass, field
from typing import Sequence

from .errors import CapExceeded
from .graphs import (
    LabeledGraph,
    cayley_graph,
    check_label_isomorphism,
    is_geodetic,
    subdivide,
)
from .groups import (
    AbelianInvariants,
    FiniteGroup,
    GenSet,
    abelianization,
    count_homs,
    group_presentation,
    make_cyclic,
    make_symmetric,
    partition_generators,
)
from .nabla import (
    ComposedSystem,
    NablaSystem,
    combined_depth,
    compose_free_product,
    free_group_system,
    iterated_subdivision,
    nabla,
    phi_bijection,
    presentation_of,
)
from .rewriting import (
    RewritingSystem,
    check_confluence_bounded,
    encode_system,
    is_inverse_closed,
    is_length_reducing,
    normal_form,
)
from .words import Letter, format_word, letter_sort_key


@dataclass
class VerificationReport:
    check: str
    inputs: dict
    passed: bool
    details: dict = field(default_factory=dict)
    millis: float = 0.0

    def __post_init__(self):
        if not self.passed and not self.details:
            raise ValueError("a failing report must carry details")

    def to_json(self) -> dict:
        return {
            "check": self.check,
            "inputs": self.inputs,
            "pass": self.passed,
            "details": self.details,
            "millis": round(self.millis, 3),
        }

    def to_text(self) -> str:
        verdict = "PASS" if self.passed else "FAIL"
        args = ", ".join(f"{k}={v}" for k, v in self.inputs.items())
        lines = [f"{verdict} {self.check}({args})"]
        for key, value in self.details.items():
            lines.append(f"  {key}: {json.dumps(value)}")
        return "\n".join(lines)


class _Timer:
    def __enter__(self):
        self.start = time.perf_counter()
        return self

    def __exit__(self, *exc):
        self.millis = (time.perf_counter() - self.start) * 1000.0


def _genset_label(genset: GenSet) -> str:
    group = genset.group
    return f"{group.name}/{{{','.join(group.element_name(g) for g in genset.elements)}}}"


# Cayley graph of the group presented by a system, built from graph pieces


class PieceGluing:
    """Cayley graph of a group glued tree-like from copies of finite labelled pieces.

    Vertices of each piece are typed by their set of outgoing letters; the types
    must partition the alphabet. Every vertex of the glued graph lies in exactly
    one copy per type, so stepping along a letter is: find the copy holding the
    letter's type (creating it on demand), step inside it, and map back.
    For a subdivided Cayley graph of a finite group this yields the Cayley graph
    of the free product presented by the matching rewriting system.
    """

    def __init__(self, pieces: Sequence[LabeledGraph]):
        self.pieces = tuple(pieces)
        self.letter_type: dict = {}
        self.vertex_type: list[list] = []
        self.representative: dict = {}
        for p, graph in enumerate(self.pieces):
            types = []
            for v in range(graph.n_vertices):
                letters = frozenset(graph.out[v])
                if not letters:
                    raise ValueError(f"piece {p} has an isolated vertex {v}")
                key = (p, letters)
                for x in letters:
                    known = self.letter_type.setdefault(x, key)
                    if known != key:
                        raise ValueError(f"letter {x} lies in two vertex types")
                self.representative.setdefault(key, v)
                types.append(key)
            self.vertex_type.append(types)
        self.attach: list[dict] = []
        self.copies: list[tuple[int, dict]] = []
        self.root = self._new_vertex()

    @property
    def alphabet(self) -> list:
        return sorted(self.letter_type, key=letter_sort_key)

    def _new_vertex(self) -> int:
        self.attach.append({})
        return len(self.attach) - 1

    def step(self, vertex: int, x) -> int:
        key = self.letter_type[x]
        slot = self.attach[vertex].get(key)
        if slot is None:
            local = self.representative[key]
            self.copies.append((key[0], {local: vertex}))
            slot = (len(self.copies) - 1, local)
            self.attach[vertex][key] = slot
        copy, local = slot
        piece_index, members = self.copies[copy]
        nxt_local = self.pieces[piece_index].out[local][x]
        nxt = members.get(nxt_local)
        if nxt is None:
            nxt = self._new_vertex()
            members[nxt_local] = nxt
            self.attach[nxt][self.vertex_type[piece_index][nxt_local]] = (copy, nxt_local)
        return nxt

    def read(self, word, start: int | None = None) -> int:
        v = self.root if start is None else start
        for x in word:
            v = self.step(v, x)
        return v

    def spheres(self, radius: int) -> tuple[list[int], dict[int, int]]:
        """Sphere sizes around the root and the BFS distance of every vertex reached."""
        letters = self.alphabet
        dist = {self.root: 0}
        sizes = [1] + [0] * radius
        frontier = [self.root]
        for d in range(1, radius + 1):
            nxt = []
            for v in frontier:
                for x in letters:
                    w = self.step(v, x)
                    if w not in dist:
                        dist[w] = d
                        nxt.append(w)
            sizes[d] = len(nxt)
            frontier = nxt
        return sizes, dist


def _pieces_of(target, pieces):
    if pieces is not None:
        return target if isinstance(target, RewritingSystem) else target.system, tuple(pieces)
    if isinstance(target, NablaSystem):
        return target.system, target.pieces
    if isinstance(target, ComposedSystem):
        if target.pieces is None:
            raise ValueError("composed system has a factor without a graph model")
        return target.system, target.pieces
    if isinstance(target, RewritingSystem):
        from .nabla import free_pieces, is_free_reduction

        if is_free_reduction(target):
            return target, free_pieces(target)
    raise ValueError("pass the graph pieces for a bare rewriting system")


def verify_cayley_correspondence(
    target: NablaSystem | ComposedSystem | RewritingSystem,
    radius: int,
    pieces: Sequence[LabeledGraph] | None = None,
) -> VerificationReport:
    """Irreducible words versus the glued Cayley graph, sphere by sphere.

    Also traces each irreducible word in the glued graph: it must end at a
    vertex whose distance from the root is the word's length, and distinct
    words must end at distinct vertices.
    """
    with _Timer() as timer:
        system, pieces = _pieces_of(target, pieces)
        gluing = PieceGluing(pieces)
        spheres, dist = gluing.spheres(radius)
        matcher = system.matcher
        letters = sorted(system.alphabet, key=letter_sort_key)
        if set(letters) != set(gluing.alphabet):
            raise ValueError("system alphabet differs from the letters on the pieces")
        census = [1] + [0] * radius
        seen = {gluing.root: ()}
        problem = None
        layer = [((), 0, gluing.root)]
        for k in range(1, radius + 1):
            nxt = []
            for word, state, vertex in layer:
                for x in letters:
                    s = matcher.delta(state, x)
                    if matcher.match[s] is not None:
                        continue
                    w = word + (x,)
                    v = gluing.step(vertex, x)
                    if problem is None:
                        if v in seen:
                            problem = {"same_vertex": [format_word(seen[v]), format_word(w)]}
                        elif dist.get(v) != k:
                            problem = {"not_geodesic": format_word(w), "distance": dist.get(v)}
                    seen[v] = w
                    nxt.append((w, s, v))
            census[k] = len(nxt)
            layer = nxt
        passed = census == spheres and problem is None
        details = {"census": census, "spheres": spheres}
        if census != spheres:
            first = next(k for k in range(radius + 1) if census[k] != spheres[k])
            details["first_mismatch_radius"] = first
            if census[first] > spheres[first]:
                details["surplus_irreducible_words"] = census[first] - spheres[first]
        if problem:
            details.update(problem)
    return VerificationReport(
        "cayley-correspondence",
        {"letters": len(letters), "radius": radius, "pieces": len(pieces)},
        passed,
        details,
        timer.millis,
    )


def verify_theorem_b(group: FiniteGroup, genset: GenSet, n: int) -> VerificationReport:
    """Geodetic base graph, geodetic subdivision and length-reducing system agree."""
    with _Timer() as timer:
        system = nabla(group, genset, n)
        base = is_geodetic(system.base)
        sub = is_geodetic(system.graph)
        reducing = system.length_reducing
        details = {
            "base_geodetic": base.geodetic,
            "subdivided_geodetic": sub.geodetic,
            "length_reducing": reducing,
            "rules": {k: len(system.rules_of(k)) for k in ("R1", "R2", "R3")},
        }
        if not base.geodetic:
            s, v, p, q = base.witness
            details["witness"] = {"from": s, "to": v, "paths": [list(p), list(q)]}
    passed = base.geodetic == sub.geodetic == reducing
    return VerificationReport(
        "theorem-b", {"fixture": _genset_label(genset), "n": n}, passed, details, timer.millis
    )


def default_probes() -> list[FiniteGroup]:
    return [make_cyclic(2), make_cyclic(3), make_symmetric(3)]


def verify_theorem_a(
    group: FiniteGroup,
    genset: GenSet,
    n: int,
    probes: Sequence[FiniteGroup] | None = None,
    hom_cap: int | None = None,
) -> VerificationReport:
    """Abelianization and homomorphism counts match the free product with F_{n|S|}.

    A probe whose search exceeds the cap is listed as skipped; it neither passes
    nor fails the report.
    """
    probes = default_probes() if probes is None else list(probes)
    with _Timer() as timer:
        system = nabla(group, genset, n)
        rank = n * len(genset.elements)
        pres = presentation_of(system.system)
        expected_ab = abelianization(group_presentation(genset)) + AbelianInvariants((), rank)
        actual_ab = abelianization(pres)
        passed = expected_ab == actual_ab
        details: dict = {"abelianization": str(actual_ab), "expected_abelianization": str(expected_ab)}
        homs = {}
        for q in probes:
            expected = count_homs(genset, q) * q.order**rank
            try:
                actual = count_homs(pres, q, hom_cap)
            except CapExceeded:
                homs[q.name] = {"expected": expected, "skipped": "cap exceeded"}
                continue
            homs[q.name] = {"expected": expected, "actual": actual}
            passed &= expected == actual
        details["hom_counts"] = homs
    return VerificationReport(
        "theorem-a",
        {"fixture": _genset_label(genset), "n": n, "probes": [q.name for q in probes]},
        passed,
        details,
        timer.millis,
    )


def verify_iterated_subdivision(group: FiniteGroup, genset: GenSet, n: int, m: int) -> VerificationReport:
    """Subdividing by m then n (and by n then m) matches one subdivision by k = 2nm+n+m."""
    with _Timer() as timer:
        partition = partition_generators(group, genset)
        base = cayley_graph(group, genset, partition)
        k = combined_depth(n, m)
        single, _ = subdivide(base, k)
        results = {}
        for outer, inner in ((n, m), (m, n)):
            twice = iterated_subdivision(base, partition, outer, inner)
            phi = phi_bijection(partition, outer, inner)
            results[f"{outer}o{inner}"] = check_label_isomorphism(single, twice, phi, 0, 0)
        details = {"k": k, "vertices": single.n_vertices, "isomorphic": results}
    return VerificationReport(
        "iterated-subdivision",
        {"fixture": _genset_label(genset), "n": n, "m": m},
        all(results.values()),
        details,
        timer.millis,
    )


# Truncated Cayley balls of a rewriting system


class TruncatedBall:
    """Irreducible words of length <= radius; w ~ nf(w x) for every letter x.

    Works on an integer-coded copy of the system. Each vertex keeps the matcher
    state of its word, so w x is irreducible exactly when no rule fires on x.
    """

    def __init__(self, system: RewritingSystem, radius: int):
        self.system = system
        self.radius = radius
        self.coded, self.letters = encode_system(system)
        matcher = self.coded.matcher
        words: list[tuple] = [()]
        states = [0]
        layer = [0]
        for _ in range(radius):
            nxt = []
            for v in layer:
                w, s = words[v], states[v]
                for x in range(len(self.letters)):
                    t = matcher.delta(s, x)
                    if matcher.match[t] is None:
                        nxt.append(len(words))
                        words.append(w + (x,))
                        states.append(t)
            layer = nxt
        self.words = words
        self.states = states
        self.index = {w: k for k, w in enumerate(words)}
        self._adj: dict[int, tuple[int, ...]] = {}

    def __len__(self) -> int:
        return len(self.words)

    def decode(self, v: int) -> tuple:
        return tuple(self.letters[x] for x in self.words[v])

    def neighbours(self, v: int) -> tuple[int, ...]:
        adj = self._adj.get(v)
        if adj is not None:
            return adj
        matcher = self.coded.matcher
        rules = self.coded.rules
        w, s = self.words[v], self.states[v]
        full = len(w) >= self.radius
        found = set()
        for x in range(len(self.letters)):
            t = matcher.delta(s, x)
            idx = matcher.match[t]
            if idx is None:
                if not full:
                    found.add(self.index[w + (x,)])
                continue
            rule = rules[idx]
            # w is irreducible, so the only redex ends at x
            rest = w[: len(w) + 1 - len(rule.lhs)] + rule.rhs
            u = self.index.get(normal_form(rest, self.coded, "stack"))
            if u is not None:
                found.add(u)
        found.discard(v)
        adj = self._adj[v] = tuple(sorted(found))
        return adj

    def geodetic_within(self, depth: int):
        """First pair (u, v) with |u|, |v| <= depth joined by two geodesics, else None.

        Requires 2 * depth <= radius, which keeps every geodesic between such
        pairs inside the ball. BFS from u skips x once d(u, x) + |x| exceeds
        |u| + 2 * depth, since no such x lies on a geodesic to a shallow target.
        """
        if 2 * depth > self.radius:
            raise ValueError("depth must be at most half the radius")
        size = [len(w) for w in self.words]
        shallow = [v for v in range(len(self.words)) if size[v] <= depth]
        for u in shallow:
            limit = size[u] + 2 * depth
            dist = {u: 0}
            count = {u: 1}
            queue = deque([u])
            while queue:
                x = queue.popleft()
                for y in self.neighbours(x):
                    d = dist[x] + 1
                    if y not in dist:
                        if d + size[y] > limit:
                            continue
                        dist[y] = d
                        count[y] = 0
                        queue.append(y)
                    if dist[y] == d:
                        count[y] = min(2, count[y] + count[x])
            for v in shallow:
                if count.get(v, 0) > 1:
                    return self.decode(u), self.decode(v)
        return None


def _factor_system(factor, n: int):
    if isinstance(factor, int):
        return free_group_system(factor), True
    return nabla(factor.group, factor, n), is_geodetic(cayley_graph(factor.group, factor)).geodetic


def verify_free_product_composition(
    first: GenSet | int,
    second: GenSet | int,
    n: int,
    radius: int,
    seed: int = 0,
) -> VerificationReport:
    """Compose two factors and check the composed system on a radius-``radius`` ball.

    A factor is a generating set of a finite group (subdivided by n) or an int,
    the rank of a free factor.
    """
    with _Timer() as timer:
        sys_a, geo_a = _factor_system(first, n)
        sys_b, geo_b = _factor_system(second, n)
        composed = compose_free_product(sys_a, sys_b)
        system = composed.system
        details: dict = {"letters": len(system.alphabet), "rules": len(system.rules)}
        details["inverse_closed"] = is_inverse_closed(system)
        confluence = check_confluence_bounded(system, radius, seed)
        details["confluent_up_to"] = radius if confluence.confluent else None
        if not confluence.confluent:
            details["counterexample"] = format_word(confluence.counterexample)
        reducing = is_length_reducing(system)
        details["length_reducing"] = reducing
        passed = details["inverse_closed"] and confluence.confluent
        if geo_a and geo_b and reducing:
            ball = TruncatedBall(system, radius)
            pair = ball.geodetic_within(radius // 2)
            details["ball_vertices"] = len(ball.words)
            details["ball_geodetic"] = pair is None
            if pair is not None:
                details["two_geodesics_between"] = [format_word(w) for w in pair]
            passed = passed and pair is None
        else:
            details["ball_geodetic"] = "skipped"

    def label(f):
        return f"F{f}" if isinstance(f, int) else _genset_label(f)

    return VerificationReport(
        "free-product-composition",
        {"first": label(first), "second": label(second), "n": n, "radius": radius},
        passed,
        details,
        timer.millis,
    )


def verify_subdivision_relabel(group: FiniteGroup, genset: GenSet) -> VerificationReport:
    """Subdividing by 0 only renames x_i to x_{i,1}."""
    with _Timer() as timer:
        base = cayley_graph(group, genset)
        sub, _ = subdivide(base, 0)
        bijection = {x: Letter(x.klass, x.i, 1, x.factor) for x in base.inverse}
        ok = check_label_isomorphism(base, sub, bijection, 0, 0)
    return VerificationReport(
        "zero-subdivision",
        {"fixture": _genset_label(genset)},
        ok,
        {"isomorphic": ok},
        timer.millis,
    )
