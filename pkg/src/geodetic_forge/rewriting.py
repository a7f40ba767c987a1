"""String rewriting systems over an alphabet with an inverse involution.

Words are tuples of letters. Letters may be any hashable values; systems built
from subdivided Cayley graphs use :class:`~geodetic_forge.words.Letter`.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from functools import cached_property
from typing import Hashable, Iterable, Mapping, Sequence

from .caps import default_caps
from .errors import CensusCapExceeded, ParseError, StepCapExceeded
from .words import Word, format_word, letter_sort_key, parse_word

STRATEGIES = ("leftmost", "rightmost", "random", "stack")


@dataclass(frozen=True)
class Rule:
    lhs: Word
    rhs: Word

    def __post_init__(self):
        if not self.lhs:
            raise ValueError("rule left-hand side must be non-empty")
        if self.lhs == self.rhs:
            raise ValueError(f"rule {self} rewrites a word to itself")

    def __str__(self) -> str:
        return f"{format_word(self.lhs)} -> {format_word(self.rhs)}"


class _Matcher:
    """Aho-Corasick automaton over rule left-hand sides."""

    def __init__(self, rules: Sequence[Rule]):
        self.goto: list[dict] = [{}]
        terminal: list[int | None] = [None]
        ending: list[list[int]] = [[]]
        for idx, rule in enumerate(rules):
            s = 0
            for x in rule.lhs:
                nxt = self.goto[s].get(x)
                if nxt is None:
                    nxt = len(self.goto)
                    self.goto[s][x] = nxt
                    self.goto.append({})
                    terminal.append(None)
                    ending.append([])
                s = nxt
            if terminal[s] is None:
                terminal[s] = idx
            ending[s].append(idx)
        self.depth = [0] * len(self.goto)
        self.fail = [0] * len(self.goto)
        # match[s]: rule whose lhs is the longest suffix of state s that is an lhs
        self.match: list[int | None] = list(terminal)
        order = []
        frontier = [0]
        while frontier:
            nxt_frontier = []
            for s in frontier:
                for x, t in self.goto[s].items():
                    self.depth[t] = self.depth[s] + 1
                    if s:
                        f = self.fail[s]
                        while f and x not in self.goto[f]:
                            f = self.fail[f]
                        self.fail[t] = self.goto[f].get(x, 0)
                    nxt_frontier.append(t)
                    order.append(t)
            frontier = nxt_frontier
        # every[s]: all rules whose lhs is a suffix of state s
        self.every: list[tuple[int, ...]] = [()] * len(self.goto)
        for t in order:
            if self.match[t] is None:
                self.match[t] = self.match[self.fail[t]]
            self.every[t] = tuple(ending[t]) + self.every[self.fail[t]]
        self._delta: list[dict] = [dict() for _ in self.goto]

    def delta(self, s: int, x) -> int:
        cache = self._delta[s]
        t = cache.get(x)
        if t is None:
            u = s
            while True:
                t = self.goto[u].get(x)
                if t is not None or u == 0:
                    t = 0 if t is None else t
                    break
                u = self.fail[u]
            cache[x] = t
        return t


@dataclass(frozen=True, eq=False)
class RewritingSystem:
    alphabet: tuple
    rules: tuple[Rule, ...]
    inverse: Mapping | None = None

    def __post_init__(self):
        letters = set(self.alphabet)
        if len(letters) != len(self.alphabet):
            raise ValueError("alphabet lists a letter twice")
        if len(set(self.rules)) != len(self.rules):
            raise ValueError("duplicate rules")
        for rule in self.rules:
            stray = (set(rule.lhs) | set(rule.rhs)) - letters
            if stray:
                raise ValueError(f"rule {rule} uses letters outside the alphabet: {stray}")

    @classmethod
    def build(
        cls, alphabet: Iterable[Hashable], rules: Iterable[Rule | tuple], inverse: Mapping | None = None
    ) -> RewritingSystem:
        """Normalise inputs: rules given as pairs are wrapped, duplicates dropped."""
        rules = tuple(
            dict.fromkeys(r if isinstance(r, Rule) else Rule(tuple(r[0]), tuple(r[1])) for r in rules)
        )
        return cls(tuple(alphabet), rules, None if inverse is None else dict(inverse))

    @cached_property
    def max_lhs(self) -> int:
        return max((len(r.lhs) for r in self.rules), default=0)

    @cached_property
    def _trie(self) -> dict:
        root: dict = {}
        for idx, rule in enumerate(self.rules):
            node = root
            for x in rule.lhs:
                node = node.setdefault(x, {})
            node.setdefault(None, []).append(idx)
        return root

    @cached_property
    def matcher(self) -> _Matcher:
        return _Matcher(self.rules)

    @cached_property
    def by_lhs(self) -> dict[Word, list[Rule]]:
        table: dict[Word, list[Rule]] = {}
        for rule in self.rules:
            table.setdefault(rule.lhs, []).append(rule)
        return table

    def matches_at(self, word: Sequence, pos: int) -> list[int]:
        """Indices of rules whose lhs occurs at pos; longest lhs first, then rule order."""
        node = self._trie
        found: list[list[int]] = []
        for x in word[pos:]:
            node = node.get(x)
            if node is None:
                break
            if None in node:
                found.append(node[None])
        return [idx for group in reversed(found) for idx in group]

    def with_rules(self, rules: Iterable[Rule]) -> RewritingSystem:
        return RewritingSystem.build(self.alphabet, rules, self.inverse)


@dataclass(frozen=True)
class RewriteStep:
    reduced: Word
    rule: Rule
    position: int


def _apply(word: Word, rule: Rule, pos: int) -> Word:
    return word[:pos] + rule.rhs + word[pos + len(rule.lhs) :]


def rewrite_step(
    word: Sequence,
    system: RewritingSystem,
    strategy: str = "leftmost",
    rng: random.Random | None = None,
) -> RewriteStep | None:
    """One rewrite of the selected redex, or None when the word is irreducible."""
    word = tuple(word)
    if strategy in ("leftmost", "rightmost", "stack"):
        positions = range(len(word)) if strategy != "rightmost" else range(len(word) - 1, -1, -1)
        if strategy == "stack":
            # the redex ending earliest; at equal end, the longest
            best = None
            for pos in range(len(word)):
                for idx in system.matches_at(word, pos):
                    end = pos + len(system.rules[idx].lhs)
                    key = (end, -len(system.rules[idx].lhs), idx)
                    if best is None or key < best[0]:
                        best = (key, pos, idx)
            if best is None:
                return None
            _, pos, idx = best
            rule = system.rules[idx]
            return RewriteStep(_apply(word, rule, pos), rule, pos)
        for pos in positions:
            found = system.matches_at(word, pos)
            if found:
                rule = system.rules[found[0]]
                return RewriteStep(_apply(word, rule, pos), rule, pos)
        return None
    if strategy == "random":
        rng = rng or random.Random(0)
        redexes = _all_redexes(word, system)
        if not redexes:
            return None
        pos, idx = rng.choice(redexes)
        rule = system.rules[idx]
        return RewriteStep(_apply(word, rule, pos), rule, pos)
    raise ValueError(f"unknown strategy {strategy!r}; expected one of {STRATEGIES}")


def _all_redexes(word: Word, system: RewritingSystem) -> list[tuple[int, int]]:
    """Every (position, rule index) occurrence, ordered by position then rule index."""
    m, rules = system.matcher, system.rules
    found = []
    s = 0
    for end, x in enumerate(word, 1):
        s = m.delta(s, x)
        for idx in m.every[s]:
            found.append((end - len(rules[idx].lhs), idx))
    found.sort()
    return found


def reduce_word(
    word: Sequence,
    system: RewritingSystem,
    strategy: str = "leftmost",
    rng: random.Random | None = None,
    max_steps: int | None = None,
) -> tuple[Word, int]:
    """Normal form of word together with the number of rewrite steps taken."""
    max_steps = default_caps().rewrite_steps if max_steps is None else max_steps
    word = tuple(word)
    if strategy == "stack":
        return _reduce_stack(word, system, max_steps)
    if strategy == "random":
        rng = rng or random.Random(0)
        steps = 0
        while (step := rewrite_step(word, system, "random", rng)) is not None:
            word = step.reduced
            steps += 1
            if steps > max_steps:
                raise StepCapExceeded(f"no normal form within {max_steps} steps")
        return word, steps
    if strategy not in ("leftmost", "rightmost"):
        raise ValueError(f"unknown strategy {strategy!r}; expected one of {STRATEGIES}")

    # Only the region touched by the last rewrite can hold a new extreme redex.
    span = system.max_lhs
    steps = 0
    if strategy == "leftmost":
        start = 0
        while True:
            for pos in range(max(0, start), len(word)):
                found = system.matches_at(word, pos)
                if found:
                    rule = system.rules[found[0]]
                    word = _apply(word, rule, pos)
                    start = pos - span + 1
                    break
            else:
                return word, steps
            steps += 1
            if steps > max_steps:
                raise StepCapExceeded(f"no normal form within {max_steps} steps")
    start = len(word) - 1
    while True:
        for pos in range(min(start, len(word) - 1), -1, -1):
            found = system.matches_at(word, pos)
            if found:
                rule = system.rules[found[0]]
                word = _apply(word, rule, pos)
                start = pos + len(rule.rhs) - 1
                break
        else:
            return word, steps
        steps += 1
        if steps > max_steps:
            raise StepCapExceeded(f"no normal form within {max_steps} steps")


def _reduce_stack(word: Word, system: RewritingSystem, max_steps: int) -> tuple[Word, int]:
    m = system.matcher
    letters: list = []
    states = [0]
    pending = list(reversed(word))
    steps = 0
    while pending:
        x = pending.pop()
        s = m.delta(states[-1], x)
        letters.append(x)
        states.append(s)
        idx = m.match[s]
        if idx is not None:
            rule = system.rules[idx]
            k = len(rule.lhs)
            del letters[-k:]
            del states[-k:]
            pending.extend(reversed(rule.rhs))
            steps += 1
            if steps > max_steps:
                raise StepCapExceeded(f"no normal form within {max_steps} steps")
    return tuple(letters), steps


def normal_form(
    word: Sequence,
    system: RewritingSystem,
    strategy: str = "leftmost",
    rng: random.Random | None = None,
    max_steps: int | None = None,
) -> Word:
    return reduce_word(word, system, strategy, rng, max_steps)[0]


def is_irreducible(word: Sequence, system: RewritingSystem) -> bool:
    m = system.matcher
    s = 0
    for x in word:
        s = m.delta(s, x)
        if m.match[s] is not None:
            return False
    return True


def is_inverse_closed(system: RewritingSystem) -> bool:
    inv = system.inverse
    if inv is None:
        return False
    for x in system.alphabet:
        y = inv.get(x)
        if y is None or inv.get(y) != x:
            return False
        if normal_form((x, y), system, "stack") != ():
            return False
        if normal_form((y, x), system, "stack") != ():
            return False
        if normal_form((x,), system, "stack") == ():
            return False
    return True


def length_reduction_violation(system: RewritingSystem) -> Rule | None:
    return next((r for r in system.rules if len(r.lhs) <= len(r.rhs)), None)


def is_length_reducing(system: RewritingSystem) -> bool:
    return length_reduction_violation(system) is None


@dataclass(frozen=True)
class CriticalPair:
    overlap: Word
    left: Word
    right: Word
    rules: tuple[Rule, Rule]


def critical_pairs(system: RewritingSystem, max_len: int | None = None) -> list[CriticalPair]:
    """Overlaps and inclusions of left-hand sides, shortest overlap word first."""
    limit = max_len if max_len is not None else float("inf")
    rules = [r for r in system.rules if len(r.lhs) <= limit]
    by_prefix: dict[Word, list[Rule]] = {}
    for r in rules:
        for k in range(1, len(r.lhs) + 1):
            by_prefix.setdefault(r.lhs[:k], []).append(r)
    pairs = []
    for r1 in rules:
        l1 = r1.lhs
        # another lhs occurring inside l1
        for p in range(len(l1)):
            for q in range(p + 1, len(l1) + 1):
                for r2 in system.by_lhs.get(l1[p:q], ()):
                    if r2 is r1:
                        continue
                    pairs.append(CriticalPair(l1, r1.rhs, l1[:p] + r2.rhs + l1[q:], (r1, r2)))
        # proper suffix of l1 equal to a proper prefix of l2
        for k in range(1, len(l1)):
            for r2 in by_prefix.get(l1[-k:], ()):
                l2 = r2.lhs
                if len(l2) <= k or len(l1) + len(l2) - k > limit:
                    continue
                overlap = l1 + l2[k:]
                pairs.append(CriticalPair(overlap, r1.rhs + l2[k:], l1[:-k] + r2.rhs, (r1, r2)))
    pairs.sort(key=lambda c: (len(c.overlap), [letter_sort_key(x) for x in c.overlap]))
    return pairs


@dataclass(frozen=True)
class ConfluenceReport:
    confluent: bool
    max_len: int
    counterexample: Word | None = None
    normal_forms: tuple[Word, ...] = ()
    critical_pairs_checked: int = 0
    words_checked: int = 0

    def __bool__(self) -> bool:
        return self.confluent


def _strategy_forms(word, system, seed, max_steps):
    rng = random.Random(seed)
    return tuple(
        dict.fromkeys(
            normal_form(word, system, s, rng if s == "random" else None, max_steps)
            for s in STRATEGIES
        )
    )


def check_confluence_bounded(
    system: RewritingSystem,
    max_len: int,
    seed: int = 0,
    max_steps: int | None = None,
    exhaustive_cap: int | None = None,
) -> ConfluenceReport:
    """Decide whether every word of length <= max_len has a unique normal form.

    Every critical pair whose overlap word has length <= max_len is joined by
    comparing normal forms. For a terminating system whose rules never lengthen
    a word this settles all words up to that length, since every divergence
    inside such a word is an instance of one of those pairs. When the word space
    is small enough the strategies are also compared on every word directly.
    """
    caps = default_caps()
    exhaustive_cap = caps.confluence_words if exhaustive_cap is None else exhaustive_cap
    pairs = critical_pairs(system, max_len)
    for cp in pairs:
        forms = set()
        for start in (cp.left, cp.right):
            forms.update(_strategy_forms(start, system, seed, max_steps))
        if len(forms) > 1:
            ordered = tuple(sorted(forms, key=lambda w: (len(w), [letter_sort_key(x) for x in w])))
            return ConfluenceReport(False, max_len, cp.overlap, ordered, len(pairs), 0)

    letters = sorted(system.alphabet, key=letter_sort_key)
    total = sum(len(letters) ** k for k in range(max_len + 1))
    checked = 0
    if total <= exhaustive_cap:
        for k in range(max_len + 1):
            for word in itertools.product(letters, repeat=k):
                forms = _strategy_forms(word, system, seed, max_steps)
                checked += 1
                if len(forms) > 1:
                    return ConfluenceReport(False, max_len, word, forms, len(pairs), checked)
    return ConfluenceReport(True, max_len, None, (), len(pairs), checked)


def irreducible_words(
    system: RewritingSystem,
    max_len: int,
    collect: bool = False,
    cap: int | None = None,
):
    """Census of irreducible words by length 0..max_len.

    Returns the count list, or (counts, words) when ``collect`` is set; words come
    in shortlex order of the alphabet's canonical order.
    """
    cap = default_caps().census_words if cap is None else cap
    m = system.matcher
    letters = sorted(system.alphabet, key=letter_sort_key)
    if not collect:
        counts = [1] + [0] * max_len
        layer = {0: 1}
        for k in range(1, max_len + 1):
            nxt: dict[int, int] = {}
            for s, c in layer.items():
                for x in letters:
                    t = m.delta(s, x)
                    if m.match[t] is None:
                        nxt[t] = nxt.get(t, 0) + c
            layer = nxt
            counts[k] = sum(layer.values())
        return counts

    counts = [1] + [0] * max_len
    words: list[Word] = [()]
    layer = [((), 0)]
    for k in range(1, max_len + 1):
        nxt_layer = []
        for w, s in layer:
            for x in letters:
                t = m.delta(s, x)
                if m.match[t] is None:
                    nxt_layer.append((w + (x,), t))
        if len(words) + len(nxt_layer) > cap:
            raise CensusCapExceeded(f"more than {cap} irreducible words up to length {k}")
        layer = nxt_layer
        counts[k] = len(layer)
        words.extend(w for w, _ in layer)
    return counts, words


def encode_system(system: RewritingSystem) -> tuple[RewritingSystem, list]:
    """Copy of the system over letters 0..k-1 (canonical order) plus the decoding list."""
    letters = sorted(system.alphabet, key=letter_sort_key)
    code = {x: k for k, x in enumerate(letters)}
    rules = [Rule(tuple(code[x] for x in r.lhs), tuple(code[x] for x in r.rhs)) for r in system.rules]
    inverse = None
    if system.inverse is not None:
        inverse = {code[x]: code[y] for x, y in system.inverse.items() if x in code and y in code}
    return RewritingSystem.build(range(len(letters)), rules, inverse), letters


def format_rules(system: RewritingSystem) -> str:
    return "".join(f"{rule}\n" for rule in system.rules)


def parse_rules(text: str) -> list[Rule]:
    rules = []
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "->" not in line:
            raise ParseError(f"line {lineno}: expected 'LHS -> RHS'")
        lhs, rhs = line.split("->", 1)
        rules.append(Rule(parse_word(lhs), parse_word(rhs)))
    return rules
