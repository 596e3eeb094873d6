"""Windowed de Rham cohomology of exponentially twisted Kummer connections.

On Laurent polynomials in x the connection acts by

    theta(x^k) = (k + s) x^k + c x^{k+1},

and H^0, H^1 are its kernel and cokernel.  Both are computed exactly on a
finite window of exponents.  The cokernel is measured on an inner window while
the domain is taken larger, so that classes hit only from outside the inner
window are not miscounted.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from math import ceil, lcm, prod
from typing import Callable, Hashable, Iterable, Sequence

from mellingamma.kernels import sparse_rank_int
from mellingamma.rootdata import TorusPoint

DEFAULT_WINDOW = 24
MIN_WINDOW = 8
STABILITY_STEP = 5


class WindowExhausted(RuntimeError):
    def __init__(self, window: int):
        super().__init__(f"window exhausted (no stabilization up to {window})")
        self.window = window


Column = dict  # exponent key -> Fraction


def _rank(columns: Iterable[Column], keep: Callable[[Hashable], bool] | None = None) -> int:
    kept = []
    for col in columns:
        entries = {k: v for k, v in col.items() if v and (keep is None or keep(k))}
        if entries:
            kept.append(entries)
    # sorted column order keeps elimination banded; first-seen order fills in badly
    index = {k: i for i, k in enumerate(sorted({k for e in kept for k in e}))}
    rows = []
    for entries in kept:
        den = lcm(*(v.denominator for v in entries.values()))
        rows.append({index[k]: v.numerator * (den // v.denominator) for k, v in entries.items()})
    return sparse_rank_int(rows)


def windowed_ker(columns: Sequence[Column]) -> int:
    return len(columns) - _rank(columns)


def windowed_coker(columns: Sequence[Column], inner: Callable[[Hashable], bool], inner_size: int) -> int:
    """dim of (inner span) / (image intersected with the inner span)."""
    total = _rank(columns)
    outside = _rank(columns, keep=lambda k: not inner(k))
    return inner_size - (total - outside)


def _theta_column(k: int, c: Fraction, s: Fraction) -> Column:
    col = {}
    if k + s:
        col[k] = Fraction(k) + s
    if c:
        col[k + 1] = c
    return col


@dataclass(frozen=True)
class CohomologyReport:
    dim_ker: int
    dim_coker: int
    window: int
    stabilized: bool
    c: Fraction = Fraction(0)
    s: Fraction = Fraction(0)

    def to_json(self) -> dict:
        return {
            "c": str(self.c),
            "s": str(self.s),
            "dim_ker": self.dim_ker,
            "dim_coker": self.dim_coker,
            "window": self.window,
            "stabilized": self.stabilized,
        }


def _start_window(window: int, exponents) -> int:
    """The window must contain the resonance at k = -s for integral s."""
    integral = [abs(s) for s in exponents if s.denominator == 1]
    return max([window] + [int(s) + MIN_WINDOW for s in integral])


def _gm_dims(c: Fraction, s: Fraction, n: int) -> tuple[int, int]:
    ker = windowed_ker([_theta_column(k, c, s) for k in range(-n, n + 1)])
    outer = n + STABILITY_STEP + ceil(abs(s))
    cols = [_theta_column(k, c, s) for k in range(-outer, outer + 1)]
    coker = windowed_coker(cols, lambda k: -n <= k <= n, 2 * n + 1)
    return ker, coker


def gm_exp_kummer_cohomology(c, s, window: int = DEFAULT_WINDOW) -> CohomologyReport:
    c, s = Fraction(c), Fraction(s)
    if window < MIN_WINDOW:
        raise ValueError(f"window must be at least {MIN_WINDOW}")
    n = _start_window(window, (s,))
    top = 2 * n
    dims = {}
    while n + STABILITY_STEP <= top:
        for m in (n, n + STABILITY_STEP):
            if m not in dims:
                dims[m] = _gm_dims(c, s, m)
        if dims[n] == dims[n + STABILITY_STEP]:
            return CohomologyReport(dims[n][0], dims[n][1], n, True, c, s)
        n += STABILITY_STEP
    raise WindowExhausted(top)


@dataclass
class MultiplierReport:
    factors: list[CohomologyReport] = field(default_factory=list)

    @property
    def product(self) -> int:
        return prod(f.dim_coker for f in self.factors)

    @property
    def stabilized(self) -> bool:
        return all(f.stabilized for f in self.factors)

    def to_json(self) -> dict:
        return {"factors": [f.to_json() for f in self.factors], "product": self.product, "stabilized": self.stabilized}


def multiplier_report(lambdas: Sequence[Sequence[int]], c, xi: TorusPoint, window: int = DEFAULT_WINDOW) -> MultiplierReport:
    """Factorwise cohomology with s_i = <lam_i, -mu0> (the inverse Kummer exponent)."""
    c = Fraction(c)
    if c == 0:
        raise ValueError("c must be nonzero")
    mu = xi.coset_rep
    rep = MultiplierReport()
    for lam in lambdas:
        s = -sum((Fraction(l) * m for l, m in zip(lam, mu)), Fraction(0))
        rep.factors.append(gm_exp_kummer_cohomology(c, s, window))
    return rep


def multiplier_dimension(gd, xi: TorusPoint, window: int = DEFAULT_WINDOW) -> int:
    return multiplier_report(gd.lambdas, gd.c, xi, window).product


# ------------------------------------------------- two-variable Koszul oracle


def _box(n: int):
    return product(range(-n, n + 1), repeat=2)


def _theta2_column(i: int, key: tuple[int, int], c: Fraction, s: Fraction) -> Column:
    k = key[i]
    col = {}
    if k + s:
        col[key] = Fraction(k) + s
    if c:
        up = list(key)
        up[i] += 1
        col[tuple(up)] = c
    return col


def _tag(col: Column, tag: int) -> Column:
    return {(tag, k): v for k, v in col.items()}


@dataclass(frozen=True)
class KoszulReport:
    dims: tuple[int, ...]  # (ker d0, middle, coker d1); middle is None unless requested
    window: int
    stabilized: bool

    @property
    def degree0(self) -> int:
        return self.dims[-1]


def _gm2_dims(c, s1, s2, n: int, middle: bool) -> tuple:
    ss = (s1, s2)
    outer = n + 2 + ceil(max(abs(s1), abs(s2)))
    # d1 : (f, g) -> theta1 f + theta2 g
    d1_cols = [_theta2_column(i, key, c, ss[i]) for i in (0, 1) for key in _box(outer)]
    coker = windowed_coker(d1_cols, lambda k: max(abs(k[0]), abs(k[1])) <= n, (2 * n + 1) ** 2)
    # d0 : h -> (theta1 h, theta2 h)
    d0 = [
        {**_tag(_theta2_column(0, key, c, s1), 0), **_tag(_theta2_column(1, key, c, s2), 1)} for key in _box(n)
    ]
    ker = windowed_ker(d0)
    mid = None
    if middle:
        inner = [_tag(_theta2_column(i, key, c, ss[i]), 0) for i in (0, 1) for key in _box(n)]
        z = windowed_ker(inner)
        d0_outer = [
            {**_tag(_theta2_column(0, key, c, s1), 0), **_tag(_theta2_column(1, key, c, s2), 1)}
            for key in _box(outer)
        ]
        # coboundaries whose components both lie in the inner box
        in_box = lambda k: max(abs(k[1][0]), abs(k[1][1])) <= n
        b = _rank(d0_outer) - _rank(d0_outer, keep=lambda k: not in_box(k))
        mid = z - b
    return (ker, mid, coker)


def gm2_koszul_check(c, s1, s2, window: int = MIN_WINDOW, middle: bool = False) -> KoszulReport:
    c, s1, s2 = Fraction(c), Fraction(s1), Fraction(s2)
    if window < MIN_WINDOW:
        raise ValueError(f"window must be at least {MIN_WINDOW}")
    n = _start_window(window, (s1, s2))
    top = 2 * n
    dims = {}
    while n + 2 <= top:
        for m in (n, n + 2):
            if m not in dims:
                dims[m] = _gm2_dims(c, s1, s2, m, middle)
        if dims[n] == dims[n + 2]:
            return KoszulReport(dims[n], n, True)
        n += 2
    raise WindowExhausted(top)
