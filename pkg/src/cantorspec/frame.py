"""Frame function partial sums Q_n and the finite-level Parseval identity."""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .measure import fourier_mu_shifted, shifted_product
from .tree import TreeMapping, UnknownLabelError, enumerate_lambda, pi_n, words

CSV_HEADER = ("xi", "n", "q_value", "error_bound", "terms")


@dataclass(frozen=True)
class FrameScanRow:
    xi: float
    n: int
    q_value: float
    error_bound: float
    terms: int

    def as_csv_row(self):
        return [repr(float(self.xi)), self.n, repr(self.q_value), repr(self.error_bound), self.terms]


def qn(t: TreeMapping, xi: float, n: int, tol: float = 1e-10, depth: int = 256) -> FrameScanRow:
    """sum over Lambda_n of |mu^(xi + lam)|**2, summed in ascending lam."""
    if n < 0:
        raise ValueError("n must be >= 0")
    lam = enumerate_lambda(t, n, max(depth, n))
    if lam.unknown:
        raise UnknownLabelError(lam.unknown[0])
    shifts = list(lam.values)
    values, errs = fourier_mu_shifted(t.params, xi, shifts, tol / len(shifts))
    mods = np.abs(values)
    total = math.fsum((mods * mods).tolist())
    # | |a|^2 - |a'|^2 | <= (2|a'| + e) e
    err = math.fsum(((2 * mods + errs) * errs).tolist()) + len(shifts) * 4 * np.finfo(float).eps
    return FrameScanRow(float(xi), n, total, float(err), len(shifts))


def parseval_deviation(t: TreeMapping, m: int, xis: Iterable[float], cap: int = 12) -> float:
    """max over xi of |sum over words of length m of |H_m(xi + pi_m(w))|**2 - 1|."""
    q = t.params.q
    if m < 1:
        raise ValueError("m must be >= 1")
    if m > cap:
        raise ValueError(f"m={m} exceeds the feasibility cap {cap}")
    shifts = [pi_n(t, w, m) for w in words(q, m)]
    worst = 0.0
    for xi in xis:
        vals = np.abs(shifted_product(t.params, m, float(xi), shifts))
        worst = max(worst, abs(math.fsum((vals * vals).tolist()) - 1.0))
    return worst


def scan_grid(t: TreeMapping, xi_min: float, xi_max: float, steps: int) -> np.ndarray:
    b = t.params.b
    lo, hi = -1 / (b - 1), (b - 2) / (b - 1)
    if steps <= 0:
        return np.zeros(0)
    if not (lo < xi_min < hi and lo < xi_max < hi):
        raise ValueError(f"grid [{xi_min}, {xi_max}] leaves ({lo:.6g}, {hi:.6g})")
    return np.linspace(xi_min, xi_max, steps)


def frame_scan(t: TreeMapping, xi_grid: Sequence[float], n: int, tol: float = 1e-10) -> list:
    b = t.params.b
    lo, hi = -1 / (b - 1), (b - 2) / (b - 1)
    rows = []
    for xi in xi_grid:
        if not lo < xi < hi:
            raise ValueError(f"xi={xi} outside ({lo:.6g}, {hi:.6g})")
        rows.append(qn(t, float(xi), n, tol))
    return rows


def rows_to_csv(rows: Iterable[FrameScanRow]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for row in rows:
        writer.writerow(row.as_csv_row())
    return buf.getvalue()
