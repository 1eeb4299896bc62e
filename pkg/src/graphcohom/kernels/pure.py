"""Pure-Python elimination kernels.

Two functions live here: reduced row echelon form over Q and over F_p.
The compiled twin (``graphcohom.kernels._speedups``) implements the same
interface; ``graphcohom.kernels`` selects whichever is importable.  RREF is
unique, so the backends agree entry for entry and everything downstream is
reproducible no matter which one is active.

Rows are sparse ``{column: value}`` dicts.  Over Q the public values are
`Fraction`s; internally each row is scaled to a primitive integer vector so
elimination is integer cross-multiplication followed by content removal.
"""

from fractions import Fraction
from math import gcd, lcm

NAME = "pure"


def _int_row(row):
    """Scale a {col: Fraction} dict to a primitive {col: int} dict."""
    den = 1
    for v in row.values():
        den = lcm(den, v.denominator)
    out = {}
    g = 0
    for c, v in row.items():
        x = int(v * den)
        if x:
            out[c] = x
            g = gcd(g, x)
    if g > 1:
        for c in out:
            out[c] //= g
    return out


def _combine_int(r1, a, r2, b):
    """a*r1 + b*r2 on {col: int} dicts, zero-stripped and content-reduced."""
    out = {}
    for c, v in r1.items():
        out[c] = a * v
    for c, v in r2.items():
        w = out.get(c, 0) + b * v
        if w:
            out[c] = w
        else:
            out.pop(c, None)
    g = 0
    for v in out.values():
        g = gcd(g, v)
        if g == 1:
            return out
    if g > 1:
        for c in out:
            out[c] //= g
    return out


def rref_frac(rows, ncols):
    """RREF over Q.

    ``rows`` is an iterable of {col: Fraction} dicts with 0 <= col < ncols.
    Returns ``(pivots, rref)``: pivot columns ascending, and for each one a
    {col: Fraction} dict whose entry at its pivot column is 1.
    """
    piv = {}
    for row in rows:
        r = _int_row(row)
        for c in sorted(piv.keys() & r.keys()):
            if c in r:
                pr = piv[c]
                r = _combine_int(r, pr[c], pr, -r[c])
        if not r:
            continue
        c = min(r)
        assert 0 <= c < ncols
        lead = r[c]
        for pc, pr in piv.items():
            if c in pr:
                piv[pc] = _combine_int(pr, lead, r, -pr[c])
        piv[c] = r
    pivots = sorted(piv)
    out = []
    for c in pivots:
        r = piv[c]
        lead = r[c]
        out.append({k: Fraction(v, lead) for k, v in r.items()})
    return pivots, out


def rref_mod(rows, ncols, p):
    """RREF over F_p.  Same contract as :func:`rref_frac`, values in [1, p)."""
    piv = {}
    for row in rows:
        r = {}
        for c, v in row.items():
            v %= p
            if v:
                r[c] = v
        for c in sorted(piv.keys() & r.keys()):
            if c in r:
                a = r[c]
                for k, v in piv[c].items():
                    w = (r.get(k, 0) - a * v) % p
                    if w:
                        r[k] = w
                    else:
                        r.pop(k, None)
        if not r:
            continue
        c = min(r)
        assert 0 <= c < ncols
        inv = pow(r[c], p - 2, p)
        r = {k: (v * inv) % p for k, v in r.items()}
        for pc, pr in piv.items():
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
