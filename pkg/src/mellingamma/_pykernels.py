"""Pure-Python exact elimination kernels.

Both routines work on integer rows; callers clear denominators first.
"""
from __future__ import annotations

from math import gcd


def rref_int(rows: list[list[int]], ncols: int) -> tuple[list[list[int]], list[int]]:
    """Fraction-free Gauss-Jordan elimination.

    Returns the nonzero reduced rows and their pivot columns.  Every pivot
    entry of the output equals the same nonzero integer, so dividing a row by
    its pivot entry gives the reduced row echelon form over the rationals.
    """
    a = [list(r) for r in rows]
    m = len(a)
    prev = 1
    r = 0
    pivots: list[int] = []
    for c in range(ncols):
        if r == m:
            break
        p = r
        while p < m and a[p][c] == 0:
            p += 1
        if p == m:
            continue
        if p != r:
            a[p], a[r] = a[r], a[p]
        prow = a[r]
        piv = prow[c]
        for i in range(m):
            if i == r:
                continue
            row = a[i]
            f = row[c]
            if f == 0:
                if piv != prev:
                    for j in range(ncols):
                        if row[j]:
                            row[j] = row[j] * piv // prev
                continue
            for j in range(ncols):
                row[j] = (piv * row[j] - f * prow[j]) // prev
        prev = piv
        pivots.append(c)
        r += 1
    return a[:r], pivots


def _normalize(row: dict[int, int]) -> dict[int, int]:
    g = 0
    for v in row.values():
        g = gcd(g, v)
        if g == 1:
            return row
    if g > 1:
        return {k: v // g for k, v in row.items()}
    return row


def sparse_rank_int(rows: list[dict[int, int]]) -> int:
    """Rank of a sparse integer matrix given as column->value dicts."""
    return len(eliminate_sparse({}, rows))


def eliminate_sparse(pivots: dict[int, dict[int, int]], rows) -> dict[int, dict[int, int]]:
    """Reduce rows into an existing lead-column -> pivot-row table, in place."""
    for src in rows:
        row = {k: v for k, v in src.items() if v}
        while row:
            lead = min(row)
            prow = pivots.get(lead)
            if prow is None:
                pivots[lead] = _normalize(row)
                break
            a = prow[lead]
            b = row[lead]
            g = gcd(a, b)
            a //= g
            b //= g
            new = {k: a * v for k, v in row.items()}
            for k, v in prow.items():
                nv = new.get(k, 0) - b * v
                if nv:
                    new[k] = nv
                else:
                    new.pop(k, None)
            row = _normalize(new)
    return pivots
