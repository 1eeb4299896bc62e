# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled elimination kernels.

Twin of ``graphcohom.kernels.pure`` with the same interface and (since RREF
is unique) identical output.  Over F_p the work happens on dense C int64
buffers; over Q rows are kept as parallel (column, integer) lists so the
merge loops compile while the values stay arbitrary-precision Python ints.
"""

from cpython cimport array
import array

from fractions import Fraction
from math import gcd, lcm

NAME = "speedups"


# ---------------------------------------------------------------------------
# Q

cdef tuple _int_row(dict row):
    cdef list cols = sorted(row)
    cdef list vals = []
    cdef object den = 1
    cdef object g = 0
    cdef object v, x
    for v in row.values():
        den = lcm(den, v.denominator)
    cdef list oc = []
    for c in cols:
        x = int(row[c] * den)
        if x:
            oc.append(c)
            vals.append(x)
            g = gcd(g, x)
    if g > 1:
        vals = [x // g for x in vals]
    return oc, vals


cdef tuple _combine(list c1, list v1, object a, list c2, list v2, object b):
    """a*row1 + b*row2, rows as sorted parallel lists; content-reduced."""
    cdef Py_ssize_t i = 0, j = 0, n1 = len(c1), n2 = len(c2)
    cdef list oc = [], ov = []
    cdef object w, g
    cdef int x1, x2
    while i < n1 and j < n2:
        x1 = c1[i]
        x2 = c2[j]
        if x1 == x2:
            w = a * v1[i] + b * v2[j]
            if w:
                oc.append(x1)
                ov.append(w)
            i += 1
            j += 1
        elif x1 < x2:
            w = a * v1[i]
            if w:
                oc.append(x1)
                ov.append(w)
            i += 1
        else:
            w = b * v2[j]
            if w:
                oc.append(x2)
                ov.append(w)
            j += 1
    while i < n1:
        w = a * v1[i]
        if w:
            oc.append(c1[i])
            ov.append(w)
        i += 1
    while j < n2:
        w = b * v2[j]
        if w:
            oc.append(c2[j])
            ov.append(w)
        j += 1
    g = 0
    for w in ov:
        g = gcd(g, w)
        if g == 1:
            return oc, ov
    if g > 1:
        ov = [w // g for w in ov]
    return oc, ov


cdef Py_ssize_t _find(list cols, int c):
    cdef Py_ssize_t lo = 0, hi = len(cols), mid
    while lo < hi:
        mid = (lo + hi) >> 1
        if <int> cols[mid] < c:
            lo = mid + 1
        else:
            hi = mid
    if lo < len(cols) and <int> cols[lo] == c:
        return lo
    return -1


def rref_frac(rows, ncols):
    """RREF over Q; see the pure twin for the contract."""
    cdef dict piv = {}
    cdef list r_cols, r_vals, pr
    cdef Py_ssize_t pos
    cdef int c, pc
    for row in rows:
        r_cols, r_vals = _int_row(row)
        for c in sorted(set(piv) & set(r_cols)):
            pos = _find(r_cols, c)
            if pos >= 0:
                pr = piv[c]
                r_cols, r_vals = _combine(
                    r_cols, r_vals, pr[1][_find(pr[0], c)], pr[0], pr[1], -r_vals[pos]
                )
        if not r_cols:
            continue
        c = r_cols[0]
        assert 0 <= c < ncols
        lead = r_vals[0]
        for pc in piv:
            pr = piv[pc]
            pos = _find(pr[0], c)
            if pos >= 0:
                npc, npv = _combine(pr[0], pr[1], lead, r_cols, r_vals, -pr[1][pos])
                piv[pc] = [npc, npv]
        piv[c] = [r_cols, r_vals]
    pivots = sorted(piv)
    out = []
    for c in pivots:
        pr = piv[c]
        lead = pr[1][0]
        out.append({k: Fraction(v, lead) for k, v in zip(pr[0], pr[1])})
    return pivots, out


# ---------------------------------------------------------------------------
# F_p

def rref_mod(rows, ncols, p):
    """RREF over F_p; see the pure twin for the contract."""
    cdef Py_ssize_t nrows = len(rows)
    if nrows == 0 or ncols == 0:
        return [], []
    if nrows * ncols <= 4_000_000:
        return _rref_mod_dense(rows, ncols, p)
    return _rref_mod_sparse(rows, ncols, p)


cdef _rref_mod_dense(list rows, Py_ssize_t ncols, long long p):
    cdef Py_ssize_t nrows = len(rows)
    cdef array.array buf = array.array("q", bytes(8 * nrows * ncols))
    cdef long long[::1] a = buf
    cdef Py_ssize_t i, k, r, pos
    cdef long long v, inv, factor
    cdef int c
    for i in range(nrows):
        row = rows[i]
        for c, v0 in row.items():
            v = v0 % p
            if v:
                if not (0 <= c < ncols):
                    raise AssertionError("column out of range")
                a[i * ncols + c] = v
    cdef list pivots = []
    cdef list pivrow = []
    r = 0
    for c in range(<int> ncols):
        pos = -1
        for i in range(r, nrows):
            if a[i * ncols + c]:
                pos = i
                break
        if pos < 0:
            continue
        if pos != r:
            for k in range(ncols):
                a[r * ncols + k], a[pos * ncols + k] = a[pos * ncols + k], a[r * ncols + k]
        inv = _powmod(a[r * ncols + c], p - 2, p)
        for k in range(c, ncols):
            a[r * ncols + k] = (a[r * ncols + k] * inv) % p
        for i in range(nrows):
            if i == r:
                continue
            factor = a[i * ncols + c]
            if factor:
                for k in range(c, ncols):
                    v = (a[i * ncols + k] - factor * a[r * ncols + k]) % p
                    if v < 0:
                        v += p
                    a[i * ncols + k] = v
        pivots.append(c)
        pivrow.append(r)
        r += 1
        if r == nrows:
            break
    cdef list out = []
    cdef dict d
    for i in range(len(pivots)):
        r = pivrow[i]
        d = {}
        for k in range(ncols):
            v = a[r * ncols + k] % p
            if v:
                d[k] = v
        out.append(d)
    return pivots, out


cdef long long _powmod(long long b, long long e, long long m):
    cdef long long acc = 1
    b %= m
    while e:
        if e & 1:
            acc = (acc * b) % m
        b = (b * b) % m
        e >>= 1
    return acc


cdef _rref_mod_sparse(list rows, Py_ssize_t ncols, long long p):
    cdef dict piv = {}
    cdef dict r, pr, nr
    cdef long long a, v, w, inv
    cdef int c, k, pc
    for row in rows:
        r = {}
        for c, v0 in row.items():
            v = v0 % p
            if v:
                r[c] = v
        for c in sorted(set(piv) & set(r)):
            if c in r:
                a = r[c]
                pr = piv[c]
                for k, v in pr.items():
                    w = (r.get(k, 0) - a * v) % p
                    if w:
                        r[k] = w
                    else:
                        r.pop(k, None)
        if not r:
            continue
        c = min(r)
        assert 0 <= c < ncols
        inv = _powmod(r[c], p - 2, p)
        r = {k: (v * inv) % p for k, v in r.items()}
        for pc in piv:
            pr = piv[pc]
            if c in pr:
                a = pr[c]
                nr = dict(pr)
                for k, v in r.items():
                    w = (nr.get(k, 0) - a * v) % p
                    if w:
                        nr[k] = w
                    else:
                        nr.pop(k, None)
                piv[pc] = nr
        piv[c] = r
    pivots = sorted(piv)
    return pivots, [piv[c] for c in pivots]
