"""Tiny integer polynomial helpers for Poincare and chromatic polynomials.

One-variable polynomials are {exponent: int} dicts in the variable t;
two-variable ones are {(q, p): int} in (t, u).  Only the operations the
reports need live here.
"""


def p1_add(a, b):
    out = dict(a)
    for e, c in b.items():
        s = out.get(e, 0) + c
        if s:
            out[e] = s
        else:
            out.pop(e, None)
    return out


def p1_scale(a, k):
    return {e: c * k for e, c in a.items() if c * k}


def p1_mul(a, b):
    out = {}
    for e1, c1 in a.items():
        for e2, c2 in b.items():
            e = e1 + e2
            s = out.get(e, 0) + c1 * c2
            if s:
                out[e] = s
            else:
                out.pop(e, None)
    return out


def p1_pow(a, n):
    out = {0: 1}
    for _ in range(n):
        out = p1_mul(out, a)
    return out


def p1_eval(a, t):
    return sum(c * t**e for e, c in a.items())


def p1_str(a, var="t"):
    if not a:
        return "0"
    parts = []
    for e in sorted(a):
        c = a[e]
        if e == 0:
            parts.append(f"{c}")
        else:
            mono = var if e == 1 else f"{var}^{e}"
            if c == 1:
                parts.append(mono)
            elif c == -1:
                parts.append(f"-{mono}")
            else:
                parts.append(f"{c}*{mono}")
    out = parts[0]
    for part in parts[1:]:
        out += f" - {part[1:]}" if part.startswith("-") else f" + {part}"
    return out


def p2_add(a, b):
    out = dict(a)
    for e, c in b.items():
        s = out.get(e, 0) + c
        if s:
            out[e] = s
        else:
            out.pop(e, None)
    return out


def p2_eval_u(a, u):
    """Specialize u, leaving a one-variable polynomial in t."""
    out = {}
    for (q, p), c in a.items():
        v = c * u**p
        s = out.get(q, 0) + v
        if s:
            out[q] = s
        else:
            out.pop(q, None)
    return out


def p2_str(a, vars=("t", "u")):
    if not a:
        return "0"
    tv, uv = vars
    parts = []
    for q, p in sorted(a):
        c = a[(q, p)]
        mono = ""
        if q:
            mono += tv if q == 1 else f"{tv}^{q}"
        if p:
            mono += ("*" if mono else "") + (uv if p == 1 else f"{uv}^{p}")
        if not mono:
            parts.append(f"{c}")
        elif c == 1:
            parts.append(mono)
        elif c == -1:
            parts.append(f"-{mono}")
        else:
            parts.append(f"{c}*{mono}")
    out = parts[0]
    for part in parts[1:]:
        out += f" - {part[1:]}" if part.startswith("-") else f" + {part}"
    return out
