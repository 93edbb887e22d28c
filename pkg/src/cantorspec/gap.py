"""Gap quantity of a tree mapping and the certify / refute engine.

For a stem ``delta`` and an extension ``ext``, the gap counts the nonzero
labels on ``delta ext 0^inf`` strictly after ``delta`` and adds, for every
label outside ``qZ``, the number of levels skipped since the previous
nonzero label.  Offsets are relative to the end of ``delta``.
"""
from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field
from typing import Optional

from .measure import Constants, MeasureParams, in_Tb
from .tree import (TreeMapping, Word, branch_label, format_word, nonzero_ending,
                   validate_tree_mapping, words_upto)

SPECTRUM = "spectrum"
NOT_SPECTRUM = "not-spectrum"
NOT_MAXIMAL = "not-maximal"
INCONCLUSIVE = "inconclusive"

# criteria a certificate can rest on
BOUNDED_GAP = "bounded-gap-sufficiency"
LINEAR_GAP = "linear-gap-necessity"
SERIES = "series-necessity"
REPETEND = "repetend-characterization"


@dataclass
class GapValue:
    A: list
    B: list
    value: int
    partial: bool = False

    def __post_init__(self):
        assert set(self.B) <= set(self.A)

    def to_dict(self):
        return {"A": self.A, "B": self.B, "value": self.value, "partial": self.partial}


def _gap_formula(A, B) -> int:
    value = len(A)
    prev = 0
    Bs = set(B)
    for n in A:
        if n in Bs:
            value += n - prev - 1
        prev = n
    return value


def _tail(t: TreeMapping, branch: Word, start: int, horizon: int):
    """Nonzero labels on ``branch 0^inf`` at levels > len(branch).

    Returns (list of (relative offset, label), partial flag); offsets are
    relative to ``start``.
    """
    support = t.zero_from(branch)
    limit = start + horizon
    partial = False
    if support is None or support > limit:
        top, partial = limit, True
    else:
        top = support
    found = []
    for level in range(len(branch) + 1, top + 1):
        v = branch_label(t, branch, level)
        if v is None:
            return found, True
        if v:
            found.append((level - start, v))
    return found, partial


def gap_value(t: TreeMapping, delta: Word, ext: Word = (), horizon: int = 256) -> GapValue:
    """Gap of ``delta`` along the branch ``delta ext 0^inf``."""
    delta, ext = tuple(delta), tuple(ext)
    q = t.params.q
    start = len(delta)
    branch = delta + ext
    labelled = []
    partial = False
    for k in range(1, len(ext) + 1):
        v = t.label(branch[:start + k])
        if v is None:
            partial = True
            break
        if v:
            labelled.append((k, v))
    if not partial:
        tail, partial = _tail(t, branch, start, horizon)
        labelled += tail
    A = [m for m, _ in labelled]
    B = [m for m, v in labelled if v % q]
    return GapValue(A, B, _gap_formula(A, B), partial)


@dataclass
class MinGap:
    value: Optional[int]
    witness: Optional[Word]
    exact: bool
    nodes: int = 0

    def to_dict(self):
        return {"value": self.value,
                "witness": None if self.witness is None else format_word(self.witness),
                "exact": self.exact, "nodes": self.nodes}


def min_gap(t: TreeMapping, delta: Word, budget: int = 100000, horizon: int = 256,
            max_extension: int = 64) -> MinGap:
    """Infimum of the gap over extensions, by depth-first branch and bound.

    Partial costs never decrease along an extension, so a node is pruned as
    soon as its lower bound reaches the incumbent.  Children are visited in
    lexicographic order and the incumbent only moves on strict improvement.
    """
    delta = tuple(delta)
    q = t.params.q
    start = len(delta)
    best, best_ext = None, None
    # smallest lower bound among parts of the tree left unexplored
    open_lb = math.inf
    nodes = 0
    # (ext, cost so far, last nonzero offset, lower bound)
    stack = [((), 0, 0, 0)]
    while stack:
        ext, cost, last, bound = stack.pop()
        if best is not None and bound >= best:
            continue
        nodes += 1
        if nodes > budget:
            open_lb = min([open_lb, bound] + [item[3] for item in stack])
            break
        branch = delta + ext
        if not ext or ext[-1] != 0:
            tail, partial = _tail(t, branch, start, horizon)
            if partial:
                open_lb = min(open_lb, cost)
            else:
                total, prev = cost, last
                for m, v in tail:
                    total += 1 + ((m - prev - 1) if v % q else 0)
                    prev = m
                if best is None or total < best:
                    best, best_ext = total, ext
        if len(ext) >= max_extension:
            open_lb = min(open_lb, bound)
            continue
        offset = len(ext) + 1
        children = []
        for s in range(q):
            v = t.label(branch + (s,))
            if v is None:
                open_lb = min(open_lb, cost)
                continue
            c, l = cost, last
            if v:
                c += 1 + ((offset - last - 1) if v % q else 0)
                l = offset
            if s:
                lb = c
            else:
                # only descendants carrying a nonzero symbol differ from the zero-tail
                support = t.zero_from(branch + (0,))
                quiet = support is not None and support <= start + offset
                lb = c + 1 + ((offset - l) if quiet else 0)
            children.append((ext + (s,), c, l, lb))
        stack.extend(reversed(children))
    exact = best is not None and open_lb >= best
    return MinGap(best, best_ext, exact, nodes)


@dataclass
class SupGap:
    value: Optional[int]
    analytic: bool
    exact: bool = True
    witness: Optional[Word] = None


def empirical_sup_gap(t: TreeMapping, level: int, budget: int = 100000) -> SupGap:
    value, witness, exact = 0, None, True
    for w in words_upto(t.params.q, level):
        g = min_gap(t, w, budget)
        exact &= g.exact
        if g.value is not None and (witness is None or g.value > value):
            value, witness = g.value, w
    return SupGap(value, False, exact, witness)


def sup_gap(t: TreeMapping, level: int = 6, budget: int = 100000) -> SupGap:
    """Analytic supremum when the mapping declares one, else the scanned maximum."""
    analytic = t.analytic_gap_sup()
    if analytic is not None:
        return SupGap(analytic, True)
    return empirical_sup_gap(t, level, budget)


@dataclass
class NTau:
    value: Optional[int]
    witness: Optional[Word]
    partial: bool
    skipped: list = field(default_factory=list)


def n_tau(t: TreeMapping, n: int, horizon: int = 256) -> NTau:
    """Minimal zero-tail gap over words of length n ending in a nonzero symbol.

    Words whose zero-tail cannot be certified within ``horizon`` are left
    out and listed in ``skipped``.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    best, witness, skipped = None, None, []
    for w in nonzero_ending(t.params.q, n):
        g = gap_value(t, w, (), horizon)
        if g.partial:
            skipped.append(w)
            continue
        if best is None or g.value < best:
            best, witness = g.value, w
    return NTau(best, witness, bool(skipped), skipped)


# -- certificates -------------------------------------------------------------

@dataclass
class Certificate:
    verdict: str
    theorem: str
    premises: dict = field(default_factory=dict)
    witnesses: list = field(default_factory=list)
    caveats: list = field(default_factory=list)
    parameters: dict = field(default_factory=dict)

    @property
    def definitive(self) -> bool:
        return self.verdict != INCONCLUSIVE

    def to_dict(self):
        return asdict(self)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, default=_json_default)


def _json_default(obj):
    if isinstance(obj, tuple):
        return list(obj)
    if isinstance(obj, float):
        return repr(obj)
    raise TypeError(f"cannot serialise {type(obj)}")


def _params(t: TreeMapping, **extra) -> dict:
    out = {"q": t.params.q, "b": t.params.b, "construction": t.name}
    out.update(extra)
    return out


def certify_spectrum(t: TreeMapping, level: int = 8, budget: int = 100000,
                     scan_level: Optional[int] = None) -> Certificate:
    """Spectrum verdict only on an analytic finite bound for the gap supremum."""
    report = validate_tree_mapping(t, level)
    if not report.valid:
        raise ValueError(f"mapping fails validation: {report.violation}")
    scan_level = level if scan_level is None else scan_level
    empirical = empirical_sup_gap(t, min(scan_level, level), budget)
    sup = sup_gap(t, level, budget)
    premises = {
        "validated_depth": level,
        "maximal_at_depth": report.maximal_at_depth,
        "gap_sup": sup.value,
        "gap_sup_analytic": sup.analytic,
        "empirical_gap_max": empirical.value,
        "empirical_scan_level": min(scan_level, level),
        "empirical_scan_exact": empirical.exact,
    }
    witnesses = []
    if empirical.witness is not None:
        witnesses.append({"word": format_word(empirical.witness), "min_gap": empirical.value})
    caveats = ["maximality of the mapping checked to finite depth only"]
    params = _params(t, level=level, budget=budget)
    if sup.analytic and report.maximal_at_depth is not False:
        if empirical.value > sup.value:
            raise AssertionError("scanned gap exceeds the declared analytic bound")
        return Certificate(SPECTRUM, BOUNDED_GAP, premises, witnesses, caveats, params)
    caveats.append("finite-depth scan: a supremum over all words cannot be proved from a scan")
    return Certificate(INCONCLUSIVE, BOUNDED_GAP, premises, witnesses, caveats, params)


def refute_linear(t: TreeMapping, epsilon0: float, level: int = 6, budget: int = 100000) -> Certificate:
    """Linear growth of the gap in the word length rules out a spectrum."""
    if not epsilon0 > 0:
        raise ValueError("epsilon0 must be positive")
    failures, checked = [], 0
    for n in range(1, level + 1):
        for w in nonzero_ending(t.params.q, n):
            g = min_gap(t, w, budget)
            checked += 1
            if g.value is not None and g.value < epsilon0 * n:
                failures.append({"word": format_word(w), "min_gap": g.value, "needed": epsilon0 * n})
    slope = t.n_tau_slope
    premises = {"epsilon0": epsilon0, "scan_level": level, "words_checked": checked,
                "premise_failures": len(failures), "analytic_slope": slope}
    params = _params(t, level=level, budget=budget)
    caveats = []
    if slope is not None and slope >= epsilon0 and not failures:
        caveats.append("growth supplied by the construction's analytic zero-tail bound; "
                       "the conclusion goes through the series criterion")
        return Certificate(NOT_SPECTRUM, LINEAR_GAP, premises, failures[:5], caveats, params)
    caveats.append("finite-depth scan" if not failures else "premise fails on scanned words")
    return Certificate(INCONCLUSIVE, LINEAR_GAP, premises, failures[:5], caveats, params)


def _log_product(x_of_n, start: int, tail_bound) -> float:
    """log of prod_{n >= start} (1 - x_of_n(n)) from terms plus a tail estimate."""
    total = 0.0
    n = start
    while True:
        tail = tail_bound(n)
        if tail is not None and tail < 0.5:
            return total + math.log1p(-tail)
        x = x_of_n(n)
        if x >= 1.0:
            return -math.inf
        total += math.log1p(-x)
        n += 1
        if n - start > 10 ** 7:
            return -math.inf


def refute_series(t: TreeMapping, c: Constants, n_max: int = 6, horizon: int = 256) -> Certificate:
    """Series criterion: sum_n r2**(2 N(n)) < inf rules out a spectrum."""
    if n_max < 1:
        raise ValueError("n_max must be >= 1 (empty scan)")
    r2 = c.r2
    rows, partial_sum, log_prod = [], 0.0, 0.0
    for n in range(1, n_max + 1):
        nt = n_tau(t, n, horizon)
        hook = t.analytic_n_tau(n)
        # a minimum over only part of the words is no lower bound
        if nt.value is not None and not nt.partial:
            value = nt.value
        else:
            value = hook
        if value is None:
            rows.append({"n": n, "N": None, "partial": True})
            continue
        term = r2 ** (2 * value)
        partial_sum += term
        log_prod = log_prod + math.log1p(-term) if term < 1 else -math.inf
        rows.append({"n": n, "N": value, "computed": nt.value, "hook": hook,
                     "skipped_words": len(nt.skipped), "term": term})
    slope = t.n_tau_slope
    premises = {"r2": r2, "n_max": n_max, "partial_sum": partial_sum,
                "partial_product_log10": log_prod / math.log(10) if log_prod > -math.inf else None,
                "rows": rows}
    params = _params(t, n_max=n_max, horizon=horizon, grid_resolution=c.grid_resolution)
    caveats = ["grid-estimated constants"]
    if slope is not None and slope > 0 and r2 < 1:
        x = r2 ** (2 * slope)
        premises["analytic_lower_bound"] = f"N(n) >= {slope}*n"
        premises["tail_bound"] = x ** (n_max + 1) / (1 - x)
        premises["series_bound"] = x / (1 - x)
        return Certificate(NOT_SPECTRUM, SERIES, premises, [], caveats, params)
    caveats.append("no analytic lower bound on N(n); partial sums cannot decide convergence")
    return Certificate(INCONCLUSIVE, SERIES, premises, [], caveats, params)


@dataclass
class DefectBound:
    value: float
    log10_value: float
    q_n0: float
    q_error: float
    log10_product: float
    N0: int
    n_max: int

    def __float__(self):
        return self.value


def r2_upper(p: MeasureParams, c: Constants) -> float:
    """Grid maximum of |H| plus the Lipschitz slack of the grid."""
    lipschitz = math.pi * p.b * (p.q - 1) / p.q
    return min(c.r2 + lipschitz * c.grid_resolution / 2, 1.0)


def defect_lower_bound_detail(t: TreeMapping, c: Constants, xi: float, N0: int = 0,
                              n_max: int = 6, tol: float = 1e-10,
                              horizon: int = 256) -> Optional[DefectBound]:
    """Certified lower bound on 1 - Q(xi); ``None`` when no tail bound is available."""
    from .frame import qn
    p = t.params
    if not in_Tb(p, xi):
        raise ValueError(f"xi={xi} is not in T_b")
    slope = t.n_tau_slope
    if slope is None or slope <= 0:
        return None
    rho = r2_upper(p, c)
    if rho >= 1:
        return None
    counts = {}
    for n in range(N0 + 1, n_max + 1):
        nt = n_tau(t, n, horizon)
        hook = t.analytic_n_tau(n) or 0
        complete = nt.value is not None and not nt.partial
        counts[n] = max(hook, nt.value) if complete else hook
    if any(v < 1 for v in counts.values()):
        return None

    def x_of_n(n):
        return rho ** (2 * counts.get(n, math.ceil(slope * n)))

    ratio = rho ** (2 * slope)

    def tail(n):
        # sum_{k >= n} ratio**k, valid only past the explicitly counted levels
        if n <= n_max:
            return None
        return ratio ** n / (1 - ratio)

    log_prod = _log_product(x_of_n, N0 + 1, tail)
    row = qn(t, xi, N0, tol)
    slack = 1 - row.q_value - row.error_bound
    if slack <= 0 or log_prod == -math.inf:
        return DefectBound(0.0, -math.inf, row.q_value, row.error_bound,
                           log_prod / math.log(10), N0, n_max)
    log_val = log_prod + math.log(slack)
    return DefectBound(math.exp(log_val), log_val / math.log(10), row.q_value, row.error_bound,
                       log_prod / math.log(10), N0, n_max)


def defect_lower_bound(t: TreeMapping, c: Constants, xi: float, N0: int = 0,
                       n_max: int = 6, tol: float = 1e-10) -> Optional[float]:
    d = defect_lower_bound_detail(t, c, xi, N0, n_max, tol)
    return None if d is None else d.value
