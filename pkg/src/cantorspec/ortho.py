"""Zero set, digit expansions and orthogonality of integer sets."""
from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Optional

from .measure import MeasureParams
from .tree import (FiniteTrie, TreeMapping, Word, branch_label, format_word,
                   strip_zeros, words_upto)


@dataclass(frozen=True)
class Expansion:
    digits: tuple
    base: int

    @property
    def value(self) -> int:
        total = 0
        for d in reversed(self.digits):
            total = total * self.base + d
        return total

    def __len__(self):
        return len(self.digits)


def digit_expansion(b: int, lam: int) -> Expansion:
    """Finite base-b expansion of an integer with digits in {-1, ..., b-2}."""
    if b < 3:
        raise ValueError(f"base must be >= 3, got {b}")
    lam = int(lam)
    digits = []
    while lam:
        c = lam % b
        if c == b - 1:
            c = -1
        digits.append(c)
        lam = (lam - c) // b
    return Expansion(tuple(digits), b)


def in_zero_set(p: MeasureParams, x: int) -> bool:
    """x in {b**j * a : a not in qZ, j >= 0}."""
    x = int(x)
    if x == 0:
        return False
    while True:
        if x % p.q:
            return True
        if x % p.b:
            return False
        x //= p.b


@dataclass
class OrthoReport:
    orthogonal: bool
    violating_pair: Optional[tuple] = None
    maximal_at_depth: Optional[bool] = None
    extension_witness: Optional[int] = None
    size: int = 0

    def to_dict(self):
        return {"orthogonal": self.orthogonal,
                "violating_pair": list(self.violating_pair) if self.violating_pair else None,
                "maximal_at_depth": self.maximal_at_depth,
                "extension_witness": self.extension_witness,
                "size": self.size}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)


def is_orthogonal_set(p: MeasureParams, S: Iterable[int]) -> OrthoReport:
    """Pairwise differences must lie in the zero set; first violation in sorted order."""
    elems = sorted({int(x) for x in S})
    if 0 not in elems:
        raise ValueError("the set must contain 0")
    for i, a in enumerate(elems):
        for c in elems[i + 1:]:
            if not in_zero_set(p, c - a):
                return OrthoReport(False, (a, c), size=len(elems))
    return OrthoReport(True, size=len(elems))


class InconsistencyError(ValueError):
    def __init__(self, node: Word, labels: tuple, elements: tuple):
        super().__init__(f"node {format_word(node)} gets labels {labels[0]} and {labels[1]} "
                         f"(from elements {elements[0]} and {elements[1]})")
        self.node = node
        self.labels = labels
        self.elements = elements


def branch_of(p: MeasureParams, lam: int) -> tuple[Word, tuple]:
    """Branch word and labels carried by an integer."""
    digits = digit_expansion(p.b, lam).digits
    return tuple(c % p.q for c in digits), digits


def tree_from_set(p: MeasureParams, S: Iterable[int]) -> FiniteTrie:
    """Merge the branches of all elements into a trie; untouched words stay unknown.

    Raises :class:`InconsistencyError` when two elements disagree on a node
    (including a nonzero label on the zero-extension of another element).
    """
    elems = sorted({int(x) for x in S})
    if 0 not in elems:
        raise ValueError("the set must contain 0")
    labels: dict = {}
    owner: dict = {}
    mains = []
    for lam in elems:
        word, digits = branch_of(p, lam)
        for k in range(1, len(word) + 1):
            node = word[:k]
            c = digits[k - 1]
            if not any(node) and c != 0:
                raise InconsistencyError(node, (0, c), (0, lam))
            if node in labels and labels[node] != c:
                raise InconsistencyError(node, (labels[node], c), (owner[node], lam))
            labels.setdefault(node, c)
            owner.setdefault(node, lam)
        mains.append((word, lam))
    # an element's zero-extension must carry no further labels
    for word, lam in mains:
        k = len(word) + 1
        node = word + (0,)
        while node in labels:
            if labels[node] != 0:
                raise InconsistencyError(node, (0, labels[node]), (lam, owner[node]))
            k += 1
            node = node + (0,)
    trie = FiniteTrie(p, labels, default=None, main_words=[w for w, _ in mains], name="from-set")
    trie.elements = elems
    return trie


@dataclass
class MaximalityReport:
    maximal: bool
    depth: int
    witnesses: dict = field(default_factory=dict)
    failing_node: Optional[str] = None
    nodes_checked: int = 0

    def __bool__(self):
        return self.maximal


def _nodes(t: TreeMapping, max_len: int):
    if isinstance(t, FiniteTrie) and t.default is None:
        return sorted((w for w in t.labels if len(w) <= max_len), key=lambda w: (len(w), w))
    return words_upto(t.params.q, max_len)


def _quiet_through(t: TreeMapping, word: Word, depth: int) -> Optional[int]:
    """Last level in (len(word), depth] with a nonzero label on word 0^inf; 0 if none, None if unknown."""
    last = 0
    for level in range(len(word) + 1, depth + 1):
        v = branch_label(t, word, level)
        if v is None:
            return None
        if v:
            last = level
    return last


def _witness(t: TreeMapping, node: Word, depth: int, budget: int) -> Optional[Word]:
    last = _quiet_through(t, node, depth)
    # the zero tail must be nonempty before depth, else the check is vacuous
    if last is not None and last < depth:
        return (0,) * max(0, last - len(node))
    queue = deque([()])
    seen = 0
    while queue and seen < budget:
        ext = queue.popleft()
        seen += 1
        full = node + ext
        if ext and len(full) < depth and _quiet_through(t, full, depth) == 0:
            return ext
        if len(full) < depth:
            for s in range(t.params.q):
                if t.label(full + (s,)) is not None:
                    queue.append(ext + (s,))
    return None


def is_maximal_at_depth(t: TreeMapping, depth: int, budget: int = 20000) -> MaximalityReport:
    """Every node of length <= depth/2 has an extension whose labels vanish through ``depth``."""
    if depth < 2:
        raise ValueError("depth must be >= 2")
    report = MaximalityReport(True, depth)
    for node in _nodes(t, depth // 2):
        report.nodes_checked += 1
        ext = _witness(t, tuple(node), depth, budget)
        if ext is None:
            report.maximal = False
            report.failing_node = format_word(node)
            return report
        report.witnesses[format_word(node)] = format_word(ext)
    return report
