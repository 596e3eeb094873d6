# cython: language_level=3, boundscheck=False, wraparound=False
"""Compiled exact elimination kernels.

Same contracts as ``_pykernels``.  Both kernels run in 64-bit machine
integers and restart on Python integers when any intermediate overflows.
"""
from libc.stdlib cimport malloc, free

from mellingamma import _pykernels

cdef extern from *:
    """
    static inline int mg_mul_ovf(long long a, long long b, long long *r) {
        return __builtin_mul_overflow(a, b, r);
    }
    static inline int mg_sub_ovf(long long a, long long b, long long *r) {
        return __builtin_sub_overflow(a, b, r);
    }
    """
    bint mg_mul_ovf(long long a, long long b, long long *r) nogil
    bint mg_sub_ovf(long long a, long long b, long long *r) nogil


cdef int _rref_ll(long long *a, Py_ssize_t m, Py_ssize_t n, Py_ssize_t *piv_out,
                  Py_ssize_t *rank_out) nogil:
    # returns 1 on overflow
    cdef long long prev = 1, piv, f, t1, t2, tmp
    cdef Py_ssize_t r = 0, c, p, i, j
    for c in range(n):
        if r == m:
            break
        p = r
        while p < m and a[p * n + c] == 0:
            p += 1
        if p == m:
            continue
        if p != r:
            for j in range(n):
                tmp = a[p * n + j]
                a[p * n + j] = a[r * n + j]
                a[r * n + j] = tmp
        piv = a[r * n + c]
        for i in range(m):
            if i == r:
                continue
            f = a[i * n + c]
            for j in range(n):
                if mg_mul_ovf(piv, a[i * n + j], &t1):
                    return 1
                if f != 0:
                    if mg_mul_ovf(f, a[r * n + j], &t2):
                        return 1
                    if mg_sub_ovf(t1, t2, &t1):
                        return 1
                a[i * n + j] = t1 // prev
        prev = piv
        piv_out[r] = c
        r += 1
    rank_out[0] = r
    return 0


def rref_int(rows, Py_ssize_t ncols):
    cdef Py_ssize_t m = len(rows), i, j, rank = 0
    cdef long long *a
    cdef Py_ssize_t *piv
    cdef int ovf
    cdef object v
    if m == 0 or ncols == 0:
        return _pykernels.rref_int(rows, ncols)
    for row in rows:
        for v in row:
            if not (-(1 << 62) < v < (1 << 62)):
                return _pykernels.rref_int(rows, ncols)
    a = <long long *> malloc(m * ncols * sizeof(long long))
    piv = <Py_ssize_t *> malloc(ncols * sizeof(Py_ssize_t))
    if a == NULL or piv == NULL:
        free(a)
        free(piv)
        raise MemoryError()
    try:
        for i in range(m):
            row = rows[i]
            for j in range(ncols):
                a[i * ncols + j] = row[j]
        with nogil:
            ovf = _rref_ll(a, m, ncols, piv, &rank)
        if ovf:
            return _pykernels.rref_int(rows, ncols)
        out = [[a[i * ncols + j] for j in range(ncols)] for i in range(rank)]
        return out, [piv[i] for i in range(rank)]
    finally:
        free(a)
        free(piv)


ctypedef struct SRow:
    Py_ssize_t len
    Py_ssize_t *col
    long long *val


cdef inline long long _llgcd(long long a, long long b) nogil:
    if a < 0:
        a = -a
    if b < 0:
        b = -b
    while b:
        a, b = b, a % b
    return a


cdef inline void _srow_free(SRow *r) nogil:
    free(r.col)
    free(r.val)
    r.col = NULL
    r.val = NULL
    r.len = 0


cdef int _reduce_row(SRow *row, SRow **pivots, Py_ssize_t *scratch_c,
                     long long *scratch_v) nogil:
    # Eliminates row against the pivot table; returns 1 on overflow.
    # On exit row.len == 0 or the row leads in a column with no pivot yet.
    cdef SRow *p
    cdef long long a, b, g, t1, t2
    cdef Py_ssize_t i, j, n
    while row.len > 0:
        p = pivots[row.col[0]]
        if p == NULL:
            return 0
        a = p.val[0]
        b = row.val[0]
        g = _llgcd(a, b)
        a = a // g
        b = b // g
        i = 0
        j = 0
        n = 0
        while i < row.len or j < p.len:
            if j == p.len or (i < row.len and row.col[i] < p.col[j]):
                if mg_mul_ovf(a, row.val[i], &t1):
                    return 1
                scratch_c[n] = row.col[i]
                scratch_v[n] = t1
                n += 1
                i += 1
            elif i == row.len or p.col[j] < row.col[i]:
                if mg_mul_ovf(b, p.val[j], &t2):
                    return 1
                scratch_c[n] = p.col[j]
                scratch_v[n] = -t2
                n += 1
                j += 1
            else:
                if mg_mul_ovf(a, row.val[i], &t1):
                    return 1
                if mg_mul_ovf(b, p.val[j], &t2):
                    return 1
                if mg_sub_ovf(t1, t2, &t1):
                    return 1
                if t1 != 0:
                    scratch_c[n] = row.col[i]
                    scratch_v[n] = t1
                    n += 1
                i += 1
                j += 1
        g = 0
        for i in range(n):
            g = _llgcd(g, scratch_v[i])
            if g == 1:
                break
        if g > 1:
            for i in range(n):
                scratch_v[i] = scratch_v[i] // g
        for i in range(n):
            row.col[i] = scratch_c[i]
            row.val[i] = scratch_v[i]
        row.len = n
    return 0


def sparse_rank_int(rows):
    """Rank of a sparse integer matrix given as column->value dicts.

    Rows are merged as sorted 64-bit (column, value) arrays.  When an entry
    or intermediate does not fit, the pivots found so far move to Python
    integers and the remaining rows finish in the pure-Python kernel.
    """
    cdef Py_ssize_t ncols, rank = 0, i, k, done = 0
    cdef SRow *store = NULL
    cdef SRow **pivots = NULL
    cdef Py_ssize_t *scratch_c = NULL
    cdef long long *scratch_v = NULL
    cdef int ovf = 0
    cdef SRow row
    row.len = 0
    row.col = NULL
    row.val = NULL
    rows = list(rows)
    keys = sorted({key for r in rows for key, v in r.items() if v})
    ncols = len(keys)
    if ncols == 0:
        return 0
    index = {key: n for n, key in enumerate(keys)}
    items = []
    for r in rows:
        entries = sorted((index[key], v) for key, v in r.items() if v)
        for _, v in entries:
            if not (-(1 << 62) < v < (1 << 62)):
                return _pykernels.sparse_rank_int(rows)
        items.append(entries)
    # a row never holds more entries than there are columns
    store = <SRow *> malloc(ncols * sizeof(SRow))
    pivots = <SRow **> malloc(ncols * sizeof(SRow *))
    scratch_c = <Py_ssize_t *> malloc(ncols * sizeof(Py_ssize_t))
    scratch_v = <long long *> malloc(ncols * sizeof(long long))
    row.col = <Py_ssize_t *> malloc(ncols * sizeof(Py_ssize_t))
    row.val = <long long *> malloc(ncols * sizeof(long long))
    try:
        if (store == NULL or pivots == NULL or scratch_c == NULL
                or scratch_v == NULL or row.col == NULL or row.val == NULL):
            raise MemoryError()
        for i in range(ncols):
            pivots[i] = NULL
        for entries in items:
            done += 1
            row.len = len(entries)
            for i in range(row.len):
                row.col[i] = entries[i][0]
                row.val[i] = entries[i][1]
            with nogil:
                ovf = _reduce_row(&row, pivots, scratch_c, scratch_v)
            if ovf:
                break
            if row.len == 0:
                continue
            k = row.col[0]
            store[rank].len = row.len
            store[rank].col = <Py_ssize_t *> malloc(row.len * sizeof(Py_ssize_t))
            store[rank].val = <long long *> malloc(row.len * sizeof(long long))
            rank += 1
            if store[rank - 1].col == NULL or store[rank - 1].val == NULL:
                raise MemoryError()
            for i in range(row.len):
                store[rank - 1].col[i] = row.col[i]
                store[rank - 1].val[i] = row.val[i]
            pivots[k] = &store[rank - 1]
        if ovf:
            pivots_py = {}
            for i in range(rank):
                pivots_py[store[i].col[0]] = {
                    store[i].col[k]: store[i].val[k] for k in range(store[i].len)
                }
            rest = [{index[key]: v for key, v in r.items() if v} for r in rows[done - 1:]]
            return len(_pykernels.eliminate_sparse(pivots_py, rest))
    finally:
        if store != NULL:
            for i in range(rank):
                _srow_free(&store[i])
        free(store)
        free(pivots)
        free(scratch_c)
        free(scratch_v)
        _srow_free(&row)
    return rank
