"""Words over {0..q-1}, tree mappings and the branch sums they induce.

A word is a tuple of symbols, level ``k`` stored at index ``k-1``.  A tree
mapping labels every nonempty word by an integer in ``{-1, ..., b-2}``;
labels along ``w 0 0 0 ...`` are read with :func:`branch_label`.
"""
from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Iterable, Iterator, Mapping, Optional

from .measure import MeasureParams

Word = tuple


class TreeMappingError(ValueError):
    """A labeling that breaks one of the tree-mapping clauses."""

    def __init__(self, word: Word, clause: str, message: str):
        super().__init__(f"word {format_word(word) or '<root>'} violates clause ({clause}): {message}")
        self.word = word
        self.clause = clause


class UnknownLabelError(LookupError):
    def __init__(self, word: Word):
        super().__init__(f"label of word {format_word(word)} is unknown")
        self.word = word


def parse_word(text: str, q: int) -> Word:
    text = text.strip()
    if text in ("", "-"):
        return ()
    if not text.isdigit():
        raise ValueError(f"word must be a string of digits, got {text!r}")
    word = tuple(int(ch) for ch in text)
    if any(s >= q for s in word):
        raise ValueError(f"word {text!r} has a symbol >= q={q}")
    return word


def format_word(word: Iterable[int]) -> str:
    return "".join(str(s) for s in word)


def strip_zeros(word: Word) -> Word:
    end = len(word)
    while end and word[end - 1] == 0:
        end -= 1
    return tuple(word[:end])


def words(q: int, length: int) -> Iterator[Word]:
    """All words of the given length in lexicographic order."""
    return itertools.product(range(q), repeat=length)


def words_upto(q: int, depth: int) -> Iterator[Word]:
    for n in range(1, depth + 1):
        yield from words(q, n)


def nonzero_ending(q: int, n: int) -> Iterator[Word]:
    for head in words(q, n - 1):
        for j in range(1, q):
            yield head + (j,)


class TreeMapping:
    """Base class.  Subclasses implement :meth:`label`.

    Optional analytic facts are exposed through ``zero_from`` (a level past
    which labels on the zero-extension vanish), ``analytic_gap_sup``,
    ``analytic_n_tau`` and ``label_language``; ``None`` means unknown.
    """

    kind = "rule-based"
    name = "mapping"
    # N(n) >= n_tau_slope * n for every n, when a construction knows it
    n_tau_slope = None

    def __init__(self, params: MeasureParams):
        self.params = params

    def label(self, word: Word) -> Optional[int]:
        raise NotImplementedError

    def zero_from(self, word: Word) -> Optional[int]:
        return None

    def analytic_gap_sup(self) -> Optional[int]:
        return None

    def analytic_n_tau(self, n: int) -> Optional[int]:
        return None

    def label_language(self) -> Optional[frozenset]:
        return None

    def __repr__(self):
        return f"<{type(self).__name__} {self.name} q={self.params.q} b={self.params.b}>"


def branch_label(t: TreeMapping, word: Word, level: int) -> Optional[int]:
    """Label of ``(word 0^inf)|_level``."""
    if level <= len(word):
        prefix = tuple(word[:level])
    else:
        prefix = tuple(word) + (0,) * (level - len(word))
    if not any(prefix):
        return 0
    return t.label(prefix)


def _known(t: TreeMapping, word: Word, level: int) -> int:
    value = branch_label(t, word, level)
    if value is None:
        raise UnknownLabelError(tuple(word) + (0,) * max(0, level - len(word)))
    return value


class RuleTreeMapping(TreeMapping):
    """A mapping given by a Python callable on nonempty words."""

    def __init__(self, params: MeasureParams, rule: Callable[[Word], int], *, name="rule",
                 zero_from: Callable[[Word], Optional[int]] | None = None,
                 gap_sup: Optional[int] = None,
                 n_tau_bound: Callable[[int], int] | None = None,
                 language: Optional[Iterable[int]] = None):
        super().__init__(params)
        self._rule = rule
        self._zero_from = zero_from
        self._gap_sup = gap_sup
        self._n_tau_bound = n_tau_bound
        self._language = frozenset(language) if language is not None else None
        self.name = name

    def label(self, word):
        return self._rule(tuple(word))

    def zero_from(self, word):
        return self._zero_from(tuple(word)) if self._zero_from else None

    def analytic_gap_sup(self):
        return self._gap_sup

    def analytic_n_tau(self, n):
        return self._n_tau_bound(n) if self._n_tau_bound else None

    def label_language(self):
        return self._language


class FiniteTrie(TreeMapping):
    """Explicit labels on finitely many words.

    Unlisted words get ``default="symbol"`` (their last symbol, the smallest
    label allowed) or are unknown (``default=None``).  ``main_words`` are
    branches known to carry only zero labels beyond their own length.
    """

    kind = "finite-trie"

    def __init__(self, params: MeasureParams, labels: Mapping[Word, int],
                 default: Optional[str] = "symbol", main_words: Iterable[Word] = (), name="trie"):
        super().__init__(params)
        self.labels = {tuple(w): int(v) for w, v in labels.items()}
        self.default = default
        self.name = name
        self._main = {}
        for w in main_words:
            w = tuple(w)
            key = strip_zeros(w)
            self._main[key] = max(self._main.get(key, 0), len(w))
        self.max_depth = max((len(w) for w in self.labels), default=0)

    def label(self, word):
        word = tuple(word)
        if word in self.labels:
            return self.labels[word]
        if not any(word):
            return 0
        if self.default == "symbol":
            return word[-1]
        stem = strip_zeros(word)
        end = self._main.get(stem)
        if end is not None and len(word) > end:
            return 0
        return None

    def zero_from(self, word):
        word = tuple(word)
        if self.default == "symbol":
            return max(len(word), self.max_depth)
        stem = strip_zeros(word)
        if not stem:
            return len(word)
        end = self._main.get(stem)
        if end is None:
            return None
        return max(len(word), end)

    def to_json(self) -> dict:
        rows = [[format_word(w), v] for w, v in sorted(self.labels.items(), key=lambda kv: (len(kv[0]), kv[0]))]
        return {"q": self.params.q, "b": self.params.b, "labels": rows}


def check_clauses(p: MeasureParams, word: Word, value: Optional[int]) -> None:
    if value is None:
        return
    if not -1 <= value <= p.b - 2:
        raise TreeMappingError(word, "range", f"label {value} outside [-1, {p.b - 2}]")
    if not any(word) and value != 0:
        raise TreeMappingError(word, "i", f"label {value} on a zero word")
    if (value - word[-1]) % p.q:
        raise TreeMappingError(word, "ii", f"label {value} not congruent to {word[-1]} mod {p.q}")


def make_trie(params: MeasureParams, labels: Mapping[Word, int] | Iterable, name="trie") -> FiniteTrie:
    """Finite trie with symbol-valued defaults; rejects clause violations."""
    if not isinstance(labels, Mapping):
        labels = {parse_word(w, params.q) if isinstance(w, str) else tuple(w): v for w, v in labels}
    clean = {}
    for w, v in labels.items():
        w = parse_word(w, params.q) if isinstance(w, str) else tuple(w)
        if not w:
            raise TreeMappingError(w, "domain", "the root carries no label")
        if any(not 0 <= s < params.q for s in w):
            raise ValueError(f"word {w} has symbols outside [0, {params.q - 1}]")
        check_clauses(params, w, int(v))
        clean[w] = int(v)
    return FiniteTrie(params, clean, default="symbol", name=name)


def trie_from_json(data: dict | str) -> FiniteTrie:
    if isinstance(data, str):
        data = json.loads(data)
    p = MeasureParams(int(data["q"]), int(data["b"]))
    return make_trie(p, [(w, v) for w, v in data.get("labels", [])], name="trie-file")


def trie_to_json(t: FiniteTrie) -> str:
    return json.dumps(t.to_json(), sort_keys=True)


# -- canonical constructions -------------------------------------------------

def make_symbol_mapping(p: MeasureParams) -> RuleTreeMapping:
    """label(w) = last symbol of w; every zero-extension is main."""
    return RuleTreeMapping(
        p, lambda w: w[-1], name=f"symbol({p.q},{p.b})",
        zero_from=len, gap_sup=0, language=range(p.q))


def make_tau24() -> RuleTreeMapping:
    t = make_symbol_mapping(MeasureParams(2, 4))
    t.name = "tau24"
    return t


class KappaMapping(TreeMapping):
    """The construction whose spectrum divided by b-1 stays maximal.

    For a stem ending in the nonzero symbol j at level n, the labels along
    its zero-extension are j at level n, q at levels n+1..n+K and at level
    2n+2b-1, and 0 elsewhere.  K in {0..b-2} makes the total label sum a
    multiple of b-1.
    """

    def __init__(self, params: MeasureParams):
        q, b = params.q, params.b
        if b <= 4:
            raise ValueError(f"kappa needs b > 4, got b={b}")
        if q > b - 3:
            raise ValueError(f"kappa needs q <= b-3, got q={q}, b={b}")
        super().__init__(params)
        self.name = f"kappa({q},{b})"
        self._k = lru_cache(maxsize=None)(self._compute_k)

    def far_level(self, n: int) -> int:
        return 2 * n + 2 * self.params.b - 1

    def _compute_k(self, stem: Word) -> int:
        q, b = self.params.q, self.params.b
        n = len(stem)
        before = sum(self.label(stem[:i]) for i in range(1, n))
        for k in range(b - 1):
            if (before + q * (k + 1) + stem[-1]) % (b - 1) == 0:
                return k
        raise AssertionError("q is invertible mod b-1")

    def k_of(self, stem: Word) -> int:
        stem = tuple(stem)
        if not stem or stem[-1] == 0:
            raise ValueError("stem must end in a nonzero symbol")
        return self._k(stem)

    def label(self, word):
        word = tuple(word)
        stem = strip_zeros(word)
        if not stem:
            return 0
        n = len(stem)
        k = len(word) - n
        if k == 0:
            return stem[-1]
        if k <= self._k(stem) or len(word) == self.far_level(n):
            return self.params.q
        return 0

    def zero_from(self, word):
        stem = strip_zeros(tuple(word))
        if not stem:
            return len(word)
        return max(len(word), self.far_level(len(stem)))

    def analytic_gap_sup(self):
        # D(delta) <= D(delta, 0^inf) <= K + 1 <= b - 1
        return self.params.b - 1


def make_kappa(p: MeasureParams) -> KappaMapping:
    return KappaMapping(p)


# -- branch sums --------------------------------------------------------------

@dataclass(frozen=True)
class NotRegular:
    word: Word
    deepest_nonzero: Optional[int]
    reason: str = "labels do not vanish within depth"

    def __bool__(self):
        return False


def pi_n(t: TreeMapping, word: Word, n: int) -> int:
    """sum_{k=1..n} label((w 0^inf)|_k) * b**(k-1), exact."""
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    b = t.params.b
    total = 0
    for k in range(n, 0, -1):
        total = total * b + _known(t, word, k)
    return total


def regular_end(t: TreeMapping, word: Word, depth: int):
    """Last level carrying a nonzero label on ``word 0^inf``, or NotRegular."""
    word = tuple(word)
    support = t.zero_from(word)
    top = support if support is not None else depth
    last = 0
    for level in range(top, 0, -1):
        value = branch_label(t, word, level)
        if value is None:
            return NotRegular(word, None, "unknown label on the zero-extension")
        if value != 0:
            last = level
            break
    if support is None and last >= depth:
        return NotRegular(word, last)
    return last


def pi_inf(t: TreeMapping, word: Word, depth: int = 64):
    """Exact sum along ``word 0^inf`` or :class:`NotRegular`."""
    word = tuple(word)
    if depth < len(word):
        raise ValueError("depth must be >= len(word)")
    end = regular_end(t, word, depth)
    if isinstance(end, NotRegular):
        return end
    return pi_n(t, word, end) if end else 0


@dataclass
class LambdaLevel:
    """Values of pi_inf over Sigma_q^level, with unresolved words kept apart."""

    values: list
    unknown: list = field(default_factory=list)

    def __iter__(self):
        return iter(self.values)

    def __len__(self):
        return len(self.values)

    def __contains__(self, x):
        return x in self.values

    @property
    def complete(self) -> bool:
        return not self.unknown


def enumerate_lambda(t: TreeMapping, level: int, depth: int = 64) -> LambdaLevel:
    if level < 0:
        raise ValueError("level must be >= 0")
    if level == 0:
        return LambdaLevel([0])
    if depth < level:
        raise ValueError("depth must be >= level")
    values, unknown = set(), []
    for w in words(t.params.q, level):
        try:
            v = pi_inf(t, w, depth)
        except UnknownLabelError:
            v = NotRegular(w, None, "unknown label")
        if isinstance(v, NotRegular):
            unknown.append(w)
        else:
            values.add(v)
    return LambdaLevel(sorted(values), unknown)


# -- validation ---------------------------------------------------------------

@dataclass
class ValidationReport:
    valid: bool
    depth: int
    violation: Optional[tuple] = None  # (word-string, clause, message)
    maximal_at_depth: Optional[bool] = None
    failing_node: Optional[str] = None

    def to_dict(self):
        return {"valid": self.valid, "depth": self.depth, "violation": self.violation,
                "maximal_at_depth": self.maximal_at_depth, "failing_node": self.failing_node}


def validate_tree_mapping(t: TreeMapping, depth: int, check_maximal: bool = True) -> ValidationReport:
    """Clauses (i), (ii) on all words up to ``depth``; maximality only at depth."""
    if depth < 1:
        raise ValueError("depth must be >= 1")
    p = t.params
    for w in words_upto(p.q, depth):
        try:
            check_clauses(p, w, t.label(w))
        except TreeMappingError as exc:
            return ValidationReport(False, depth, (format_word(w), exc.clause, str(exc)))
    report = ValidationReport(True, depth)
    if check_maximal and depth >= 2:
        from .ortho import is_maximal_at_depth
        result = is_maximal_at_depth(t, depth)
        report.maximal_at_depth = result.maximal
        report.failing_node = result.failing_node
    return report
