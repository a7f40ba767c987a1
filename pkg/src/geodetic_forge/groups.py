"""Finite groups given by multiplication tables, generating sets, and group oracles.

Elements are the indices ``0..order-1``; ``table[g][h]`` is the index of ``g*h``.
"""

from __future__ import annotations

import itertools
import json
from collections import deque
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

from .caps import default_caps
from .errors import (
    ContainsIdentity,
    DoesNotGenerate,
    EnumerationCapExceeded,
    InvalidGroup,
    NoIdentity,
    NoInverse,
    NotAssociative,
    NotInverseClosed,
    ParseError,
)


@dataclass(frozen=True)
class FiniteGroup:
    order: int
    table: tuple[tuple[int, ...], ...]
    identity: int
    inverses: tuple[int, ...]
    element_names: tuple[str, ...] | None = None
    name: str = ""

    def mul(self, g: int, h: int) -> int:
        return self.table[g][h]

    def inv(self, g: int) -> int:
        return self.inverses[g]

    def product(self, elements: Sequence[int]) -> int:
        acc = self.identity
        for g in elements:
            acc = self.table[acc][g]
        return acc

    def element_order(self, g: int) -> int:
        k, x = 1, g
        while x != self.identity:
            x = self.table[x][g]
            k += 1
        return k

    def element_name(self, g: int) -> str:
        if self.element_names is not None:
            return self.element_names[g]
        return str(g)

    def resolve(self, token: str) -> int:
        """Element index from a CLI token: an index, or a name from element_names."""
        token = token.strip()
        if self.element_names is not None and token in self.element_names:
            return self.element_names.index(token)
        try:
            g = int(token)
        except ValueError:
            raise ParseError(f"unknown group element {token!r}") from None
        if not 0 <= g < self.order:
            raise ParseError(f"element index {g} out of range for order {self.order}")
        return g


def validate_group(
    table: Sequence[Sequence[int]],
    identity_hint: int | None = None,
    *,
    element_names: Sequence[str] | None = None,
    name: str = "",
) -> FiniteGroup:
    """Check the group axioms exhaustively and compute identity and inverses."""
    m = len(table)
    if m == 0 or any(len(row) != m for row in table):
        raise InvalidGroup("table must be a non-empty square array")
    rows = tuple(tuple(int(x) for x in row) for row in table)
    if any(not 0 <= x < m for row in rows for x in row):
        raise InvalidGroup(f"table entries must lie in 0..{m - 1}")
    if element_names is not None and len(element_names) != m:
        raise InvalidGroup("element_names length does not match the order")

    candidates = [identity_hint] if identity_hint is not None else range(m)
    identity = next(
        (e for e in candidates if all(rows[e][g] == g == rows[g][e] for g in range(m))),
        None,
    )
    if identity is None:
        raise NoIdentity()

    inverses = []
    for g in range(m):
        h = next((h for h in range(m) if rows[g][h] == identity == rows[h][g]), None)
        if h is None:
            raise NoInverse(g)
        inverses.append(h)

    for g, h, k in itertools.product(range(m), repeat=3):
        if rows[rows[g][h]][k] != rows[g][rows[h][k]]:
            raise NotAssociative((g, h, k))

    return FiniteGroup(
        order=m,
        table=rows,
        identity=identity,
        inverses=tuple(inverses),
        element_names=None if element_names is None else tuple(element_names),
        name=name,
    )


def make_cyclic(m: int) -> FiniteGroup:
    if m < 1:
        raise ValueError("cyclic group order must be positive")
    table = [[(i + j) % m for j in range(m)] for i in range(m)]
    return validate_group(table, 0, name=f"C{m}")


def make_klein() -> FiniteGroup:
    # Z/2 x Z/2 with elements encoded as bit pairs
    table = [[i ^ j for j in range(4)] for i in range(4)]
    return validate_group(table, 0, element_names=["e", "x", "y", "xy"], name="V4")


def make_symmetric(k: int = 3) -> FiniteGroup:
    perms = sorted(itertools.permutations(range(k)))
    index = {p: n for n, p in enumerate(perms)}
    # (p*q)(x) = p(q(x)): apply q first
    table = [[index[tuple(p[q[x]] for x in range(k))] for q in perms] for p in perms]
    names = ["".join(str(x + 1) for x in p) for p in perms]
    return validate_group(table, index[tuple(range(k))], element_names=names, name=f"S{k}")


def group_from_spec(spec: str | Path) -> tuple[FiniteGroup, tuple[int, ...] | None]:
    """Load a group from ``cyclic:<m>``, ``klein``, ``symmetric:<k>`` or a JSON group file.

    Returns the group and the generator list stored in the file (None for shorthands).
    """
    text = str(spec)
    if text.startswith("cyclic:"):
        return make_cyclic(int(text.split(":", 1)[1])), None
    if text.startswith("symmetric:"):
        return make_symmetric(int(text.split(":", 1)[1])), None
    if text == "klein":
        return make_klein(), None
    path = Path(text)
    try:
        doc = json.loads(path.read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise ParseError(f"cannot read group file {path}: {exc}") from exc
    try:
        group = validate_group(
            doc["table"],
            element_names=doc.get("element_names"),
            name=doc.get("name", path.stem),
        )
        if "order" in doc and doc["order"] != group.order:
            raise InvalidGroup(f"declared order {doc['order']} != table size {group.order}")
        gens = doc.get("generators")
    except KeyError as exc:
        raise ParseError(f"group file {path} lacks field {exc}") from exc
    return group, None if gens is None else tuple(int(g) for g in gens)


@dataclass(frozen=True)
class GenSet:
    group: FiniteGroup
    elements: tuple[int, ...]


def check_genset(group: FiniteGroup, elements: Sequence[int]) -> GenSet:
    elements = tuple(dict.fromkeys(int(g) for g in elements))
    for g in elements:
        if not 0 <= g < group.order:
            raise InvalidGroup(f"generator index {g} out of range")
    if group.identity in elements:
        raise ContainsIdentity()
    members = set(elements)
    for g in elements:
        if group.inv(g) not in members:
            raise NotInverseClosed(g)
    seen = {group.identity}
    queue = deque([group.identity])
    while queue:
        g = queue.popleft()
        for s in elements:
            h = group.mul(s, g)
            if h not in seen:
                seen.add(h)
                queue.append(h)
    if len(seen) != group.order:
        raise DoesNotGenerate(min(set(range(group.order)) - seen))
    return GenSet(group, elements)


@dataclass(frozen=True)
class GenPartition:
    """Generators split into involutions (a_i) and inverse pairs (b_i, c_i = b_i^-1)."""

    sigma1: tuple[int, ...]
    sigma2: tuple[int, ...]
    sigma3: tuple[int, ...]

    @property
    def m1(self) -> int:
        return len(self.sigma1)

    @property
    def m2(self) -> int:
        return len(self.sigma2)

    def symbol(self, g: int) -> tuple[str, int]:
        """The (class, 1-based index) naming generator g."""
        for klass, part in (("a", self.sigma1), ("b", self.sigma2), ("c", self.sigma3)):
            if g in part:
                return klass, part.index(g) + 1
        raise KeyError(g)


def partition_generators(group: FiniteGroup, genset: GenSet) -> GenPartition:
    sigma1, sigma2, sigma3 = [], [], []
    placed = set()
    for g in genset.elements:
        if g in placed:
            continue
        g_inv = group.inv(g)
        if g_inv == g:
            sigma1.append(g)
        else:
            sigma2.append(g)
            sigma3.append(g_inv)
            placed.add(g_inv)
        placed.add(g)
    return GenPartition(tuple(sigma1), tuple(sigma2), tuple(sigma3))


# Presentations and oracles


@dataclass(frozen=True)
class Presentation:
    """Generators 0..generator_count-1; relators are words of (generator, ±1) pairs."""

    generator_count: int
    relators: tuple[tuple[tuple[int, int], ...], ...]
    generator_names: tuple[str, ...] | None = None

    def __post_init__(self):
        for rel in self.relators:
            for g, e in rel:
                if not 0 <= g < self.generator_count or e not in (1, -1):
                    raise ValueError(f"bad relator letter ({g}, {e})")

    def disjoint_union(self, other: Presentation) -> Presentation:
        shift = self.generator_count
        names = None
        if self.generator_names is not None and other.generator_names is not None:
            names = self.generator_names + other.generator_names
        return Presentation(
            self.generator_count + other.generator_count,
            self.relators + tuple(tuple((g + shift, e) for g, e in rel) for rel in other.relators),
            names,
        )


def group_presentation(genset: GenSet) -> Presentation:
    """A presentation of the group on the generators of ``genset``.

    Relators are w_g * s * w_{gs}^-1 over all Cayley-graph edges, where w_g is the
    BFS spanning-tree word reaching g.
    """
    group = genset.group
    gens = genset.elements
    tree: dict[int, tuple[tuple[int, int], ...]] = {group.identity: ()}
    queue = deque([group.identity])
    while queue:
        g = queue.popleft()
        for k, s in enumerate(gens):
            h = group.mul(g, s)
            if h not in tree:
                tree[h] = tree[g] + ((k, 1),)
                queue.append(h)
    relators = []
    for g in range(group.order):
        for k, s in enumerate(gens):
            h = group.mul(g, s)
            rel = tree[g] + ((k, 1),) + tuple((x, -e) for x, e in reversed(tree[h]))
            relators.append(_free_reduce(rel))
    relators = [r for r in dict.fromkeys(relators) if r]
    return Presentation(len(gens), tuple(relators), tuple(group.element_name(s) for s in gens))


def _free_reduce(word):
    out = []
    for g, e in word:
        if out and out[-1] == (g, -e):
            out.pop()
        else:
            out.append((g, e))
    return tuple(out)


def count_homs(source: Presentation | GenSet, target: FiniteGroup, cap: int | None = None) -> int:
    """Number of homomorphisms from the source group into ``target``."""
    cap = default_caps().hom_assignments if cap is None else cap
    if isinstance(source, GenSet):
        return _count_table_homs(source, target, cap)
    return _count_presentation_homs(source, target, cap)


def _count_table_homs(genset: GenSet, target: FiniteGroup, cap: int) -> int:
    group = genset.group
    gens = genset.elements
    if target.order ** len(gens) > cap:
        raise EnumerationCapExceeded(
            f"{target.order}^{len(gens)} generator assignments exceed cap {cap}"
        )
    count = 0
    for images in itertools.product(range(target.order), repeat=len(gens)):
        phi = [None] * group.order
        phi[group.identity] = target.identity
        queue = deque([group.identity])
        ok = True
        while queue and ok:
            g = queue.popleft()
            for s, img in zip(gens, images):
                h = group.mul(g, s)
                val = target.mul(phi[g], img)
                if phi[h] is None:
                    phi[h] = val
                    queue.append(h)
                elif phi[h] != val:
                    ok = False
                    break
        if ok and all(
            phi[group.mul(g, h)] == target.mul(phi[g], phi[h])
            for g in range(group.order)
            for h in range(group.order)
        ):
            count += 1
    return count


def _count_presentation_homs(pres: Presentation, target: FiniteGroup, cap: int) -> int:
    k = pres.generator_count
    relators = [r for r in pres.relators if r]
    by_gen: list[list[int]] = [[] for _ in range(k)]
    for idx, rel in enumerate(relators):
        for g in {g for g, _ in rel}:
            by_gen[g].append(idx)
    # most constrained generators first
    order = sorted(range(k), key=lambda g: -len(by_gen[g]))
    inv = target.inverses
    mul = target.table
    e = target.identity
    nodes = 0

    def value(rel, assignment):
        acc = e
        for g, s in rel:
            x = assignment[g]
            acc = mul[acc][x if s == 1 else inv[x]]
        return acc

    def propagate(assignment, touched):
        """Check or solve relators around newly assigned generators; False on conflict."""
        pending = list(touched)
        while pending:
            g0 = pending.pop()
            for idx in by_gen[g0]:
                rel = relators[idx]
                unknown = {g for g, _ in rel if assignment[g] is None}
                if not unknown:
                    if value(rel, assignment) != e:
                        return False
                    continue
                if len(unknown) != 1:
                    continue
                (x,) = unknown
                positions = [p for p, (g, _) in enumerate(rel) if g == x]
                if len(positions) != 1:
                    continue
                p = positions[0]
                before = value(rel[:p], assignment)
                after = value(rel[p + 1 :], assignment)
                # before * x^s * after = 1  =>  x^s = before^-1 * after^-1
                xs = mul[inv[before]][inv[after]]
                assignment[x] = xs if rel[p][1] == 1 else inv[xs]
                pending.append(x)
        return True

    def search(assignment):
        nonlocal nodes
        nodes += 1
        if nodes > cap:
            raise EnumerationCapExceeded(f"homomorphism search exceeded {cap} nodes")
        free = next((g for g in order if assignment[g] is None), None)
        if free is None:
            return 1
        total = 0
        for img in range(target.order):
            trial = list(assignment)
            trial[free] = img
            if propagate(trial, [free]):
                total += search(trial)
        return total

    start = [None] * k
    if not propagate(start, []):
        return 0
    # relators without generators only matter if they are non-empty; all are checked
    # once their generators are assigned, and generator-free relators were dropped.
    return search(start)


@dataclass(frozen=True)
class AbelianInvariants:
    torsion: tuple[int, ...] = ()
    free_rank: int = 0

    def __post_init__(self):
        for a, b in zip(self.torsion, self.torsion[1:]):
            if b % a:
                raise ValueError(f"invariant factors {self.torsion} break the divisibility chain")
        if any(d < 2 for d in self.torsion) or self.free_rank < 0:
            raise ValueError("invariant factors must be >= 2 and the free rank >= 0")

    def __add__(self, other: AbelianInvariants) -> AbelianInvariants:
        """Direct sum, re-normalised to invariant-factor form."""
        diag = list(self.torsion) + list(other.torsion)
        rows = [[d if r == c else 0 for c in range(len(diag))] for r, d in enumerate(diag)]
        torsion = tuple(d for d in smith_diagonal(rows, len(diag)) if d > 1)
        return AbelianInvariants(torsion, self.free_rank + other.free_rank)

    def __str__(self) -> str:
        parts = [f"Z/{d}" for d in self.torsion] + ["Z"] * self.free_rank
        return " + ".join(parts) if parts else "0"


def smith_diagonal(rows: Sequence[Sequence[int]], ncols: int) -> list[int]:
    """Non-negative Smith normal form diagonal d1 | d2 | ... (nonzero entries only)."""
    a = [list(map(int, r)) for r in rows if any(r)]
    nrows = len(a)
    diag = []
    t = 0
    while t < min(nrows, ncols):
        pivot = None
        for i in range(t, nrows):
            for j in range(t, ncols):
                if a[i][j] and (pivot is None or abs(a[i][j]) < abs(a[pivot[0]][pivot[1]])):
                    pivot = (i, j)
        if pivot is None:
            break
        i, j = pivot
        a[t], a[i] = a[i], a[t]
        for row in a:
            row[t], row[j] = row[j], row[t]
        while True:
            p = a[t][t]
            done = True
            for i in range(t + 1, nrows):
                q = a[i][t] // p
                if q:
                    a[i] = [x - q * y for x, y in zip(a[i], a[t])]
                if a[i][t]:
                    done = False
            for j in range(t + 1, ncols):
                q = a[t][j] // p
                if q:
                    for row in a:
                        row[j] -= q * row[t]
                if a[t][j]:
                    done = False
            if not done:
                # a remainder is smaller than the pivot; move it into place and repeat
                best = min(
                    [(abs(a[i][t]), i, t) for i in range(t + 1, nrows) if a[i][t]]
                    + [(abs(a[t][j]), t, j) for j in range(t + 1, ncols) if a[t][j]]
                )
                _, i, j = best
                a[t], a[i] = a[i], a[t]
                for row in a:
                    row[t], row[j] = row[j], row[t]
                continue
            bad = next(
                (i for i in range(t + 1, nrows) for j in range(t + 1, ncols) if a[i][j] % p),
                None,
            )
            if bad is None:
                break
            a[t] = [x + y for x, y in zip(a[t], a[bad])]
        diag.append(abs(a[t][t]))
        t += 1
    return diag


def abelianization(pres: Presentation) -> AbelianInvariants:
    vectors = set()
    for rel in pres.relators:
        v = [0] * pres.generator_count
        for g, e in rel:
            v[g] += e
        if any(v):
            vectors.add(tuple(v))
    diag = smith_diagonal(sorted(vectors), pres.generator_count)
    torsion = tuple(d for d in diag if d > 1)
    return AbelianInvariants(torsion, pres.generator_count - len(diag))
