"""Filter, Fourier transform and constants of the Cantor measure mu_{q,b}.

The measure is the invariant probability measure of the maps
``x -> x/b + l/q`` (``l = 0, ..., q-1``).  Its Fourier transform is the
infinite product of the filter ``H`` evaluated at ``xi / b**j``; every
evaluation here is truncated with an explicit error bar.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

EPS = np.finfo(float).eps


@dataclass(frozen=True)
class MeasureParams:
    q: int
    b: int

    def __post_init__(self):
        if not isinstance(self.q, (int, np.integer)) or not isinstance(self.b, (int, np.integer)):
            raise TypeError("q and b must be integers")
        if self.q < 2:
            raise ValueError(f"q must be >= 2, got {self.q}")
        if self.b % self.q != 0 or self.b // self.q < 2:
            raise ValueError(f"b/q must be an integer >= 2, got q={self.q}, b={self.b}")

    @property
    def support_max(self) -> float:
        """Right end point of the support, the fixed point of x -> x/b + (q-1)/q."""
        return (self.q - 1) * self.b / (self.q * (self.b - 1))

    @property
    def digits(self) -> range:
        return range(-1, self.b - 1)


@dataclass(frozen=True)
class CertifiedComplex:
    value: complex
    error_bound: float

    def __post_init__(self):
        if not (self.error_bound >= 0 and math.isfinite(self.error_bound)):
            raise ValueError(f"error_bound must be finite and >= 0, got {self.error_bound}")

    def __abs__(self) -> float:
        return abs(self.value)


@dataclass(frozen=True)
class Constants:
    r0: float
    r1: float
    r2: float
    support_max: float
    grid_resolution: float

    def __post_init__(self):
        if not (self.r0 > 0 and self.r1 > 0):
            raise ValueError("r0 and r1 must be positive")
        if not 0 < self.r2 < 1:
            raise ValueError("r2 must lie in (0, 1)")


def filter_H(p: MeasureParams, xi):
    """(1/q) * sum_l exp(-2 pi i l b xi / q); vectorised over ``xi``."""
    xi = np.asarray(xi, dtype=float)
    l = np.arange(p.q).reshape((-1,) + (1,) * xi.ndim)
    # reduce modulo the period q/b before forming phases
    t = np.mod(xi * p.b, p.q) / p.q
    out = np.exp(-2j * np.pi * l * t).mean(axis=0)
    return complex(out) if out.ndim == 0 else out


def partial_product_Hm(p: MeasureParams, m: int, xi):
    """prod_{j=1..m} H(xi / b**j)."""
    if m < 1:
        raise ValueError(f"m must be >= 1, got {m}")
    xi = np.asarray(xi, dtype=float)
    out = np.ones_like(xi, dtype=complex)
    scale = 1.0
    for _ in range(m):
        scale *= p.b
        out = out * filter_H(p, xi / scale)
    return complex(out) if out.ndim == 0 else out


def shifted_product(p: MeasureParams, m: int, xi: float, shifts: Sequence[int]) -> np.ndarray:
    """prod_{j=1..m} H((xi + s) / b**j) for integer shifts ``s``.

    Integer shifts are reduced exactly modulo the period ``q*b**(j-1)`` of
    ``H(./b**j)`` so huge shifts cost no phase accuracy.
    """
    shifts = [int(s) for s in shifts]
    out = np.ones(len(shifts), dtype=complex)
    period = p.q
    scale = p.b
    for _ in range(m):
        reduced = np.array([s % period for s in shifts], dtype=float)
        out *= filter_H(p, (xi + reduced) / scale)
        period *= p.b
        scale *= p.b
    return out


def truncation_depth(p: MeasureParams, magnitude: float, tol: float) -> int:
    """Smallest m >= 1 with 2 pi s |x| / b**m <= tol."""
    if tol <= 0:
        raise ValueError(f"tol must be positive, got {tol}")
    bound = 2 * math.pi * p.support_max * abs(magnitude)
    if bound <= tol:
        return 1
    return max(1, math.ceil(math.log(bound / tol, p.b)))


def truncation_error(p: MeasureParams, magnitude: float, m: int) -> float:
    return 2 * math.pi * p.support_max * abs(magnitude) / float(p.b) ** m


def rounding_allowance(m: int) -> float:
    # each factor costs a few ulps; products of unit-modulus-bounded terms
    return 8 * (m + 1) * EPS


def fourier_mu(p: MeasureParams, xi: float, tol: float = 1e-10) -> CertifiedComplex:
    """Certified value of the Fourier transform at ``xi``.

    Uses mu^(xi) = H_m(xi) * mu^(xi / b**m) together with
    |mu^(eta) - 1| <= 2 pi * support_max * |eta|.
    """
    if not tol > 0:
        raise ValueError(f"tol must be positive, got {tol}")
    m = truncation_depth(p, xi, tol)
    value = partial_product_Hm(p, m, xi)
    err = truncation_error(p, xi, m) + rounding_allowance(m)
    return CertifiedComplex(value, float(err))


def fourier_mu_shifted(p: MeasureParams, xi: float, shifts: Sequence[int], tol: float):
    """Vectorised :func:`fourier_mu` at ``xi + s``; returns (values, error_bounds)."""
    if not tol > 0:
        raise ValueError(f"tol must be positive, got {tol}")
    shifts = list(shifts)
    if not shifts:
        return np.zeros(0, dtype=complex), np.zeros(0)
    biggest = max(abs(xi + s) for s in shifts)
    m = truncation_depth(p, biggest, tol)
    values = shifted_product(p, m, xi, shifts)
    errs = np.array([truncation_error(p, xi + s, m) for s in shifts]) + rounding_allowance(m)
    return values, errs


def in_Tb(p: MeasureParams, xi: float) -> bool:
    b = p.b
    outer = -1 / (b - 1) < xi < (b - 2) / (b - 1)
    inner = -1 / (b * (b - 1)) < xi < (b - 2) / (b * (b - 1))
    return bool(outer and not inner)


def _grid(lo: float, hi: float, resolution: float) -> np.ndarray:
    n = max(2, math.ceil((hi - lo) / resolution) + 1)
    return np.linspace(lo, hi, n)


def compute_constants(p: MeasureParams, resolution: float = 1e-5) -> Constants:
    """Grid estimates of r0, r1 (minima) and r2 (maximum).

    The minima are taken over a uniform grid, so r0 and r1 are upper
    estimates of the true infima.
    """
    if not resolution > 0:
        raise ValueError(f"resolution must be positive, got {resolution}")
    b, q = p.b, p.q
    edge = (b - 2) / (b - 1)
    grid = _grid(-edge, edge, resolution)

    m = truncation_depth(p, edge, 1e-13)
    r0 = float(np.min(np.abs(partial_product_Hm(p, m, grid))))

    step = 1e-7
    r1 = math.inf
    nonzero = grid[grid != 0.0]
    for j in range(1, q):
        ratios = np.abs(filter_H(p, nonzero / b + j / b)) / np.abs(nonzero)
        # limit at xi = 0 from a one-sided difference quotient
        slope = abs(filter_H(p, step / b + j / b) - filter_H(p, j / b)) / step
        r1 = min(r1, float(ratios.min()), slope)

    lo = 1 / (b * b * (b - 1))
    hi = (b - 2) / (b * (b - 1))
    band = _grid(lo, hi, resolution)
    band = np.concatenate([band, -band])
    r2 = float(np.max(np.abs(filter_H(p, band))))
    return Constants(r0=r0, r1=r1, r2=r2, support_max=p.support_max, grid_resolution=resolution)


def decay_rate(p: MeasureParams, c: Constants) -> float:
    """r = min(r0, 1/b, r1/(b(b-1)))."""
    return min(c.r0, 1 / p.b, c.r1 / (p.b * (p.b - 1)))


def positions_lower_bound(p: MeasureParams, c: Constants,
                          positions: Iterable[tuple[int, int]]) -> float:
    """Lower bound on |mu^(xi + lam)| for xi in T_b, lam = sum d_j b**(n_j - 1).

    ``positions`` lists (n_j, d_j) with strictly increasing n_j >= 1 and
    nonzero digits d_j in {-1, 1, ..., b-2}.
    """
    positions = list(positions)
    prev = 0
    log_bound = (len(positions) + 1) * math.log(c.r0)
    for n, d in positions:
        if n <= prev:
            raise ValueError(f"positions must be strictly increasing, got {n} after {prev}")
        if d == 0 or not -1 <= d <= p.b - 2:
            raise ValueError(f"digit must be nonzero in [-1, {p.b - 2}], got {d}")
        if d % p.q:
            log_bound += math.log(c.r1 / (p.b * (p.b - 1))) - (n - prev - 1) * math.log(p.b)
        prev = n
    return math.exp(log_bound)


def positions_value(p: MeasureParams, positions: Iterable[tuple[int, int]]) -> int:
    return sum(d * p.b ** (n - 1) for n, d in positions)
