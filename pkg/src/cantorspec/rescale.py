"""Integer rescalings K * Lambda and the divided counterexample.

K * Lambda(tau) fails to be maximal exactly when some branch of tau
eventually repeats a word W whose base-b value over b**N - 1 equals i/K.
Such words are cycles of the digit graph x -> b*x - d*K, found here by
breadth-first search.
"""
from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional

from .gap import INCONCLUSIVE, NOT_MAXIMAL, REPETEND, SPECTRUM, Certificate
from .measure import MeasureParams
from .ortho import tree_from_set
from .tree import FiniteTrie, TreeMapping, Word, enumerate_lambda, format_word, make_kappa


@dataclass(frozen=True)
class RepetendWitness:
    K: int
    N: int
    W: tuple
    i: int
    M: int = 0
    branch_prefix: Optional[Word] = None

    def __post_init__(self):
        if self.i == 0 or not any(self.W):
            raise ValueError("a repetend needs i != 0 and a nonzero word")

    def value(self, b: int) -> Fraction:
        return Fraction(sum(w * b ** j for j, w in enumerate(self.W)), b ** self.N - 1)

    def to_dict(self):
        return {"N": self.N, "W": list(self.W), "i": self.i, "M": self.M,
                "branch_prefix": None if self.branch_prefix is None else format_word(self.branch_prefix)}


def _check_coprime(p: MeasureParams, K: int):
    if math.gcd(K, p.b) != 1:
        raise ValueError(f"K={K} must be coprime with b={p.b}")


def verify_repetend(p: MeasureParams, K: int, W: Iterable[int]) -> Optional[int]:
    """i = K * sum W_j b**(j-1) / (b**N - 1) when that is a nonzero integer."""
    _check_coprime(p, K)
    W = tuple(int(w) for w in W)
    if not W:
        raise ValueError("W must be nonempty")
    if any(not -1 <= w <= p.b - 2 for w in W):
        raise ValueError(f"entries of W must lie in [-1, {p.b - 2}]")
    if not any(W):
        return None
    num = K * sum(w * p.b ** j for j, w in enumerate(W))
    den = p.b ** len(W) - 1
    if num % den:
        return None
    i = num // den
    return i or None


def _digit_set(p: MeasureParams, admissible) -> list:
    if admissible is None:
        return list(p.digits)
    if callable(admissible):
        allowed = set()
        for r in range(p.q):
            for d in admissible(r):
                if (d - r) % p.q:
                    raise ValueError(f"label {d} is not in residue class {r}")
                allowed.add(int(d))
        return sorted(allowed)
    return sorted({int(d) for d in admissible})


def find_repetend(p: MeasureParams, K: int, admissible=None,
                  N_bound: Optional[int] = None) -> Optional[RepetendWitness]:
    """Shortest digit-graph cycle through the smallest nonzero node, or None.

    ``admissible`` is either a callable residue -> allowed labels or a plain
    collection of labels; default is the full digit set {-1, ..., b-2}.
    A ``None`` result with ``N_bound=None`` is exhaustive.
    """
    _check_coprime(p, K)
    if K < 1:
        raise ValueError("K must be positive")
    digits = _digit_set(p, admissible)
    b = p.b
    lo = math.ceil(Fraction(K * min(digits), b - 1))
    hi = math.floor(Fraction(K * max(digits), b - 1))
    nodes = sorted((x for x in range(lo, hi + 1) if x), key=lambda x: (abs(x), x))

    def successors(x):
        for d in digits:
            y = b * x - d * K
            if lo <= y <= hi:
                yield d, y

    for start in nodes:
        # BFS from start back to start; parents record (previous node, digit)
        parent = {}
        queue = deque([(start, 0)])
        seen = {start}
        found = None
        while queue and found is None:
            x, dist = queue.popleft()
            if N_bound is not None and dist >= N_bound:
                continue
            for d, y in successors(x):
                if y == start:
                    found = (x, d)
                    break
                if y not in seen:
                    seen.add(y)
                    parent[y] = (x, d)
                    queue.append((y, dist + 1))
        if found is None:
            continue
        x, d = found
        path = [d]
        while x != start:
            x, d = parent[x]
            path.append(d)
        # path holds the edge digits from last to first; W_j = d_{N+1-j}
        W = tuple(path)
        witness = RepetendWitness(K=K, N=len(W), W=W, i=start)
        assert witness.value(b) == Fraction(start, K)
        return witness
    return None


@dataclass
class KClassification:
    K: int
    verdict: str
    witness: Optional[RepetendWitness] = None

    def to_dict(self):
        return {"K": self.K, "verdict": self.verdict,
                "witness": None if self.witness is None else self.witness.to_dict()}


def classify_K_lambda4(K: int) -> KClassification:
    """K * Lambda_4 is a spectrum of mu_4 iff no 0/1 repetend of some i/K exists."""
    if K < 3 or K % 2 == 0:
        raise ValueError(f"K must be an odd integer >= 3, got {K}")
    w = find_repetend(MeasureParams(2, 4), K, admissible=(0, 1))
    if w is None:
        return KClassification(K, SPECTRUM)
    return KClassification(K, NOT_MAXIMAL, w)


def _realized(t: TreeMapping, w: RepetendWitness, depth: int) -> bool:
    """Does the branch prefix + (W periodic) carry labels W periodically to ``depth``?"""
    q = t.params.q
    prefix = tuple(w.branch_prefix or ())
    word = list(prefix)
    level = len(prefix)
    j = 0
    while level < depth:
        label = w.W[j % w.N]
        word.append(label % q)
        level += 1
        if t.label(tuple(word)) != label:
            return False
        j += 1
    return True


def classify_scaled(t: TreeMapping, K: int, depth: int = 64,
                    candidate: Optional[RepetendWitness] = None) -> Certificate:
    p = t.params
    _check_coprime(p, K)
    params = {"q": p.q, "b": p.b, "construction": t.name, "K": K, "depth": depth}
    sup = t.analytic_gap_sup()
    premises = {"gap_sup": sup, "gap_sup_analytic": sup is not None}
    if sup is None:
        return Certificate(INCONCLUSIVE, REPETEND, premises, [],
                           ["no analytic gap bound: maximality does not imply spectrality"], params)
    language = t.label_language()
    if language is not None:
        w = find_repetend(p, K, admissible=language)
        premises["search"] = "exhaustive digit-graph search over the declared label language"
        premises["label_language"] = sorted(language)
        if w is None:
            return Certificate(SPECTRUM, REPETEND, premises, [], [], params)
        witness = w.to_dict()
        witness["realized_to_depth"] = _realized(t, w, depth)
        return Certificate(NOT_MAXIMAL, REPETEND, premises, [witness], [], params)
    if candidate is not None:
        i = verify_repetend(p, K, candidate.W)
        premises["search"] = "candidate witness checked against the mapping"
        if i is not None and _realized(t, candidate, depth):
            return Certificate(NOT_MAXIMAL, REPETEND, premises, [candidate.to_dict()],
                               [f"periodic labels verified to depth {depth}"], params)
        return Certificate(INCONCLUSIVE, REPETEND, premises, [],
                           ["candidate witness not realized; other repetends not searched"], params)
    return Certificate(INCONCLUSIVE, REPETEND, premises, [],
                       ["mapping declares no label language and no candidate was supplied"], params)


def divide_set(p: MeasureParams, S: Iterable[int], divisor: int) -> list:
    if divisor < 1:
        raise ValueError("divisor must be positive")
    out = []
    for x in sorted(int(v) for v in S):
        if x % divisor:
            raise ValueError(f"element {x} is not divisible by {divisor}")
        out.append(x // divisor)
    return out


class RescaledCounterexample(FiniteTrie):
    """Trie of the kappa spectrum divided by b-1, from a finite truncation.

    Every zero-tail gap of a level-n word ending in a nonzero symbol is at
    least n, which the refutation engine uses as an analytic tail bound.
    """

    n_tau_slope = 1

    def analytic_n_tau(self, n):
        return n


def make_rescaled_counterexample(p: MeasureParams, level: int = 10) -> RescaledCounterexample:
    kappa = make_kappa(p)
    values = enumerate_lambda(kappa, level).values
    trie = tree_from_set(p, divide_set(p, values, p.b - 1))
    out = RescaledCounterexample(p, trie.labels, default=None,
                                 main_words=list(_mains(trie)),
                                 name=f"rescaled-counterexample({p.q},{p.b})")
    out.elements = trie.elements
    out.truncation_level = level
    return out


def _mains(trie: FiniteTrie):
    for stem, end in trie._main.items():
        yield stem + (0,) * (end - len(stem))


def rescaled_counterexample_covering(p: MeasureParams, n: int, start: Optional[int] = None,
                                     max_level: int = 20) -> RescaledCounterexample:
    """Smallest truncation whose trie labels every word up to level n."""
    level = max(1, n if start is None else start)
    while level <= max_level:
        t = make_rescaled_counterexample(p, level)
        if all(not enumerate_lambda(t, k).unknown for k in range(1, n + 1)):
            return t
        level += 1
    raise ValueError(f"no truncation up to level {max_level} covers level {n}")
