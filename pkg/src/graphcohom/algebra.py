"""Finite-dimensional graded-commutative algebras and DG algebras.

An algebra is presented by a full multiplication table over a named basis:
``basis[k]`` has a name and a degree, ``mult[(i, j)]`` is the sparse
expansion of basis_i * basis_j.  The basis is sorted by degree with the unit
(named "1", degree 0) first; every downstream bigrading relies on that order.

`validate` checks the whole axiom list exhaustively over the finite basis and
reports the first violated identity; builders here are expected to pass it
for every coefficient ring.
"""

import json

from .coeff import QQ, ring_from_name, vec_axpy
from .polyutil import p1_str


class GradedAlgebra:
    """Graded-commutative algebra with unit, given by structure constants."""

    is_dg = False

    def __init__(self, ring, names, degrees, mult):
        if len(names) != len(degrees):
            raise ValueError("names and degrees differ in length")
        if not names:
            raise ValueError("unit required: empty basis")
        if names[0] != "1" or degrees[0] != 0:
            raise ValueError('unit required: basis[0] must be "1" of degree 0')
        if any(d < 0 for d in degrees):
            raise ValueError("negative degree in basis")
        if list(degrees) != sorted(degrees):
            raise ValueError("basis must be sorted by degree")
        if len(set(names)) != len(names):
            raise ValueError("duplicate basis names")
        self.ring = ring
        self.names = tuple(names)
        self.degrees = tuple(degrees)
        self.index = {n: i for i, n in enumerate(names)}
        table = {}
        for (i, j), expansion in mult.items():
            clean = {k: v for k, v in expansion.items() if not ring.is_zero(v)}
            if clean:
                table[(i, j)] = clean
        one = ring.one()
        for i in range(len(names)):
            table.setdefault((0, i), {i: one})
            table.setdefault((i, 0), {i: one})
        self.mult = table

    @property
    def dim(self):
        return len(self.names)

    def deg(self, i):
        return self.degrees[i]

    def product(self, i, j):
        """Sparse expansion {k: scalar} of basis_i * basis_j."""
        return self.mult.get((i, j), {})

    def product_vec(self, u, v):
        """Bilinear extension of the product to sparse vectors."""
        ring = self.ring
        out = {}
        for i, a in u.items():
            for j, b in v.items():
                ab = ring.mul(a, b)
                if ring.is_zero(ab):
                    continue
                for k, c in self.product(i, j).items():
                    vec_axpy(ring, out, ring.mul(ab, c), {k: ring.one()})
        return out

    def qdim(self):
        """Graded dimensions as a {degree: count} polynomial."""
        out = {}
        for d in self.degrees:
            out[d] = out.get(d, 0) + 1
        return out

    def poincare_str(self):
        return p1_str(self.qdim())

    def __repr__(self):
        return f"GradedAlgebra({self.ring}, dim={self.dim})"


class DGAlgebra(GradedAlgebra):
    """Graded-commutative algebra with a degree +1 differential."""

    is_dg = True

    def __init__(self, ring, names, degrees, mult, diff):
        super().__init__(ring, names, degrees, mult)
        table = {}
        for i, expansion in diff.items():
            clean = {k: v for k, v in expansion.items() if not ring.is_zero(v)}
            if clean:
                table[i] = clean
        self.diff = table

    def d(self, i):
        return self.diff.get(i, {})

    def d_vec(self, u):
        ring = self.ring
        out = {}
        for i, a in u.items():
            for k, c in self.d(i).items():
                vec_axpy(ring, out, ring.mul(a, c), {k: ring.one()})
        return out

    def is_formal_presentation(self):
        """True when the differential is identically zero."""
        return not self.diff

    def __repr__(self):
        return f"DGAlgebra({self.ring}, dim={self.dim})"


def _vec_str(A, vec):
    if not vec:
        return "0"
    ring = A.ring
    return " + ".join(f"{ring.to_str(vec[k])}*{A.names[k]}" for k in sorted(vec))


def validate(A):
    """None when every axiom holds, else a message naming the violation.

    Checks degree additivity, the unit law, associativity on all basis
    triples, graded commutativity on all pairs (which over Z or odd/zero
    characteristic forces odd squares to vanish), and for DG algebras d
    degree, d*d = 0 and the graded Leibniz rule on all pairs.
    """
    ring = A.ring
    n = A.dim
    for (i, j), expansion in A.mult.items():
        for k, v in expansion.items():
            if A.deg(k) != A.deg(i) + A.deg(j):
                return (
                    f"degree additivity at ({A.names[i]},{A.names[j]}): "
                    f"term {A.names[k]} has degree {A.deg(k)}, "
                    f"expected {A.deg(i) + A.deg(j)}"
                )
    one = ring.one()
    for i in range(n):
        if A.product(0, i) != {i: one}:
            return f"unit law at (1,{A.names[i]})"
        if A.product(i, 0) != {i: one}:
            return f"unit law at ({A.names[i]},1)"
    for i in range(n):
        for j in range(n):
            lhs = A.product(i, j)
            sign = -1 if (A.deg(i) % 2) and (A.deg(j) % 2) else 1
            rhs = {k: ring.mul(ring.from_int(sign), v) for k, v in A.product(j, i).items()}
            if lhs != rhs:
                if i == j:
                    return f"odd square at {A.names[i]}: 2*{A.names[i]}^2 != 0"
                return f"graded commutativity at ({A.names[i]},{A.names[j]})"
    for i in range(n):
        for j in range(n):
            ij = A.product(i, j)
            for k in range(n):
                left = {}
                for m, c in ij.items():
                    for t, w in A.product(m, k).items():
                        vec_axpy(ring, left, ring.mul(c, w), {t: one})
                jk = A.product(j, k)
                right = {}
                for m, c in jk.items():
                    for t, w in A.product(i, m).items():
                        vec_axpy(ring, right, ring.mul(c, w), {t: one})
                if left != right:
                    return (
                        f"associativity at ({A.names[i]},{A.names[j]},{A.names[k]}): "
                        f"{_vec_str(A, left)} != {_vec_str(A, right)}"
                    )
    if A.is_dg:
        for i, expansion in A.diff.items():
            for k in expansion:
                if A.deg(k) != A.deg(i) + 1:
                    return f"differential degree at {A.names[i]}"
        for i in range(n):
            dd = A.d_vec(A.d(i))
            if dd:
                return f"d*d != 0 at {A.names[i]}: d(d({A.names[i]})) = {_vec_str(A, dd)}"
        for i in range(n):
            for j in range(n):
                lhs = A.d_vec(A.product(i, j))
                rhs = {}
                for k, c in A.d(i).items():
                    vec_axpy(ring, rhs, c, A.product(k, j))
                sign = ring.from_int(-1 if A.deg(i) % 2 else 1)
                for k, c in A.d(j).items():
                    vec_axpy(ring, rhs, ring.mul(sign, c), A.product(i, k))
                if lhs != rhs:
                    return f"Leibniz at ({A.names[i]},{A.names[j]})"
    return None


def _sorted_basis(entries):
    """Sort (name, degree, payload) entries by degree, unit first, then name."""
    return sorted(entries, key=lambda e: (e[1], e[0] != "1", e[0]))


# ---------------------------------------------------------------------------
# builders


def exterior(degrees, ring=QQ, names=None):
    """Exterior algebra on generators of the given degrees.

    Basis monomials are subsets of the generators; any generator squares to
    zero (also the even-degree ones, by fiat of the builder).
    """
    g = len(degrees)
    if names is None:
        names = [f"x{i+1}" for i in range(g)] if g != 1 else ["x"]
    if any(d < 1 for d in degrees):
        raise ValueError("exterior generators need positive degree")
    subsets = []
    for mask in range(1 << g):
        sub = tuple(i for i in range(g) if mask >> i & 1)
        subsets.append(sub)
    def name_of(sub):
        return "1" if not sub else "".join(names[i] for i in sub)
    def deg_of(sub):
        return sum(degrees[i] for i in sub)
    order = _sorted_basis([(name_of(s), deg_of(s), s) for s in subsets])
    basis = [s for (_, _, s) in order]
    index = {s: k for k, s in enumerate(basis)}
    one = ring.one()
    mult = {}
    for i, si in enumerate(basis):
        for j, sj in enumerate(basis):
            if set(si) & set(sj):
                continue
            sign = 1
            for a in si:
                for b in sj:
                    if b < a and degrees[a] % 2 and degrees[b] % 2:
                        sign = -sign
            merged = tuple(sorted(si + sj))
            coeff = ring.from_int(sign)
            if not ring.is_zero(coeff):
                mult[(i, j)] = {index[merged]: ring.mul(coeff, one)}
    A = GradedAlgebra(
        ring, [n for (n, _, _) in order], [d for (_, d, _) in order], mult
    )
    A.monomials = tuple(basis)  # generator-index tuples, aligned with the basis
    A.generator_degrees = tuple(degrees)
    return A


def exterior_dg(degrees, gen_diff, ring=QQ, names=None):
    """Exterior algebra with d given on generators, extended by Leibniz.

    ``gen_diff`` maps a generator name to a {basis name: coeff} expansion.
    d on a monomial x_{i1}...x_{ik} is the signed Leibniz sum
    sum_pos (-1)^{deg prefix} prefix * d(x_pos) * suffix.
    """
    A = exterior(degrees, ring=ring, names=names)
    mono_index = {m: k for k, m in enumerate(A.monomials)}
    dg = {}
    for gname, expansion in gen_diff.items():
        gi = A.monomials[A.index[gname]]
        if len(gi) != 1:
            raise ValueError(f"{gname} is not a generator")
        dg[gi[0]] = {A.index[n]: ring.parse(str(c)) for n, c in expansion.items()}
    diff = {}
    for k, mono in enumerate(A.monomials):
        out = {}
        degsum = 0
        for pos, gi in enumerate(mono):
            dgen = dg.get(gi)
            if dgen:
                sign = ring.from_int(-1 if degsum % 2 else 1)
                prefix = {mono_index[mono[:pos]]: ring.one()}
                suffix = {mono_index[mono[pos + 1 :]]: ring.one()}
                term = A.product_vec(A.product_vec(prefix, dgen), suffix)
                vec_axpy(ring, out, sign, term)
            degsum += A.generator_degrees[gi]
        if out:
            diff[k] = out
    B = DGAlgebra(ring, list(A.names), list(A.degrees), dict(A.mult), diff)
    B.monomials = A.monomials
    B.generator_degrees = A.generator_degrees
    return B


def sphere(m, ring=QQ):
    """H^*(S^m): basis 1, x with deg x = m and x^2 = 0."""
    if m < 1:
        raise ValueError("sphere dimension must be >= 1")
    return GradedAlgebra(ring, ["1", "x"], [0, m], {})


def torus(n, ring=QQ):
    """H^* of the n-torus: exterior algebra on n degree-1 generators."""
    if n < 1:
        raise ValueError("torus rank must be >= 1")
    return exterior([1] * n, ring=ring, names=[f"x{i+1}" for i in range(n)])


def truncated_poly(deg, power, ring=QQ):
    """R[x]/(x^power) with deg x = deg; needs even deg unless power <= 2."""
    if deg < 1 or power < 2:
        raise ValueError("need deg >= 1 and power >= 2")
    if deg % 2 and power > 2 and ring.char != 2:
        raise ValueError("odd-degree truncated polynomial needs power 2 (or char 2)")
    names = ["1", "x"] + [f"x^{k}" for k in range(2, power)]
    degrees = [0] + [deg * k for k in range(1, power)]
    one = ring.one()
    mult = {}
    for i in range(1, power):
        for j in range(1, power):
            if i + j < power:
                mult[(i, j)] = {i + j: one}
    return GradedAlgebra(ring, names, degrees, mult)


def surface(genus, ring=QQ):
    """H^* of a closed orientable surface of the given genus."""
    if genus < 1:
        raise ValueError("genus must be >= 1")
    names = ["1"]
    for i in range(1, genus + 1):
        names.append(f"a{i}")
    for i in range(1, genus + 1):
        names.append(f"b{i}")
    names.append("w")
    degrees = [0] + [1] * (2 * genus) + [2]
    top = len(names) - 1
    one = ring.one()
    neg = ring.neg(one)
    mult = {}
    for i in range(1, genus + 1):
        ai = names.index(f"a{i}")
        bi = names.index(f"b{i}")
        mult[(ai, bi)] = {top: one}
        mult[(bi, ai)] = {top: neg}
    return GradedAlgebra(ring, names, degrees, mult)


_BUILTINS = {
    "sphere": (sphere, 1),
    "torus": (torus, 1),
    "truncated_poly": (truncated_poly, 2),
    "exterior": (exterior, None),
    "surface": (surface, 1),
}


def builtin(name, params=(), ring=QQ):
    """Standard cohomology ring by name, e.g. builtin("sphere", (2,))."""
    if name not in _BUILTINS:
        raise ValueError(f"unknown builtin algebra {name!r}")
    fn, arity = _BUILTINS[name]
    params = tuple(int(p) for p in params)
    if arity is not None and len(params) != arity:
        raise ValueError(f"builtin {name} takes {arity} parameter(s)")
    if name == "exterior":
        if not params:
            raise ValueError("exterior needs at least one generator degree")
        return fn(list(params), ring=ring)
    return fn(*params, ring=ring)


# ---------------------------------------------------------------------------
# tensor product


def tensor(A, B):
    """Graded tensor product with the Koszul sign rule.

    (a (x) b)(a' (x) b') = (-1)^{deg b * deg a'} (aa' (x) bb').  The basis is
    re-sorted by total degree, unit first.
    """
    if A.ring != B.ring:
        raise ValueError(f"ring mismatch: {A.ring} vs {B.ring}")
    ring = A.ring
    pairs = [(i, j) for i in range(A.dim) for j in range(B.dim)]
    def name_of(p):
        if p == (0, 0):
            return "1"
        return f"{A.names[p[0]]}(x){B.names[p[1]]}"
    def deg_of(p):
        return A.deg(p[0]) + B.deg(p[1])
    order = _sorted_basis([(name_of(p), deg_of(p), p) for p in pairs])
    basis = [p for (_, _, p) in order]
    index = {p: k for k, p in enumerate(basis)}
    mult = {}
    for k1, (i1, j1) in enumerate(basis):
        for k2, (i2, j2) in enumerate(basis):
            sign = -1 if (B.deg(j1) % 2) and (A.deg(i2) % 2) else 1
            sv = ring.from_int(sign)
            if ring.is_zero(sv):
                continue
            out = {}
            for ik, ic in A.product(i1, i2).items():
                for jk, jc in B.product(j1, j2).items():
                    c = ring.mul(sv, ring.mul(ic, jc))
                    vec_axpy(ring, out, c, {index[(ik, jk)]: ring.one()})
            if out:
                mult[(k1, k2)] = out
    T = GradedAlgebra(
        ring, [n for (n, _, _) in order], [d for (_, d, _) in order], mult
    )
    T.pairs = tuple(basis)  # factor index pairs, aligned with the basis
    return T


# ---------------------------------------------------------------------------
# config files


def from_config(text):
    """Parse a JSON algebra description (see the file-format docs).

    Omitted products default to the graded-commutative completion of listed
    pairs, then to zero; unit products are filled in automatically.  The
    result is validated; a `ValueError` carries the offending field.
    """
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValueError(f"config syntax error: {exc}") from None
    if not isinstance(data, dict):
        raise ValueError("config must be a JSON object")
    try:
        ring = ring_from_name(data["ring"])
    except KeyError:
        raise ValueError('missing field "ring"') from None
    raw_basis = data.get("basis")
    if not raw_basis:
        raise ValueError('unit required: field "basis" is missing or empty')
    names, degrees = [], []
    for k, b in enumerate(raw_basis):
        try:
            names.append(b["name"])
            degrees.append(int(b["deg"]))
        except (KeyError, TypeError):
            raise ValueError(f'basis[{k}] needs "name" and "deg"') from None
    index = {n: i for i, n in enumerate(names)}
    if len(index) != len(names):
        raise ValueError("duplicate basis names")

    def parse_result(items, where):
        out = {}
        for item in items:
            try:
                k = index[item["basis"]]
            except KeyError:
                raise ValueError(
                    f'{where}: unknown basis name {item.get("basis")!r}'
                ) from None
            out[k] = ring.parse(str(item["coeff"]))
        return out

    listed = {}
    for entry in data.get("products", []):
        try:
            i = index[entry["left"]]
            j = index[entry["right"]]
        except KeyError:
            raise ValueError(
                f"products: unknown basis name in {entry.get('left')!r} * "
                f"{entry.get('right')!r}"
            ) from None
        listed[(i, j)] = parse_result(
            entry.get("result", []), f'product {entry["left"]}*{entry["right"]}'
        )
    mult = {}
    one = ring.one()
    for i in range(len(names)):
        mult[(0, i)] = {i: one}
        mult[(i, 0)] = {i: one}
    mult.update(listed)
    for (i, j), expansion in listed.items():
        if (j, i) not in mult:
            sign = -1 if (degrees[i] % 2) and (degrees[j] % 2) else 1
            mult[(j, i)] = {
                k: ring.mul(ring.from_int(sign), v) for k, v in expansion.items()
            }
    diff = None
    if "differential" in data:
        diff = {}
        for entry in data["differential"]:
            try:
                i = index[entry["of"]]
            except KeyError:
                raise ValueError(
                    f'differential: unknown basis name {entry.get("of")!r}'
                ) from None
            diff[i] = parse_result(entry.get("result", []), f'd({entry["of"]})')
    if diff is None:
        A = GradedAlgebra(ring, names, degrees, mult)
    else:
        A = DGAlgebra(ring, names, degrees, mult, diff)
    problem = validate(A)
    if problem is not None:
        raise ValueError(f"validation failure: {problem}")
    return A
