"""Finite simplicial sets: the independent topological oracle.

Simplices are stored nondegenerate; a possibly-degenerate simplex is a pair
(word, position) where ``word`` is a degeneracy word in canonical strictly
descending form (s_{i_1} ... s_{i_k}, i_1 > ... > i_k).  Faces of
nondegenerate simplices are recorded at construction and pushed through
degeneracy words with the simplicial identities, so products and diagonals
stay exact and small.  Cochains are normalized: they vanish on degenerate
simplices, which keeps every matrix tight.
"""

from itertools import combinations, product

from .bicomplex import Bicomplex
from .coeff import (
    CohomologySpace,
    SparseMatrix,
    integral_cohomology,
    rank,
)
from .algebra import GradedAlgebra, validate as validate_algebra


class ResourceCapError(RuntimeError):
    """Raised when a construction would exceed the simplex cap."""


DEFAULT_CAP = 200_000


# ---------------------------------------------------------------------------
# degeneracy-word calculus


def _insert_degeneracy(word, a):
    """Canonical form of s_a composed after s_word (word descending)."""
    out = []
    i = 0
    while i < len(word) and a <= word[i]:
        out.append(word[i] + 1)
        i += 1
    out.append(a)
    out.extend(word[i:])
    return tuple(out)


def compose_degeneracies(outer, inner):
    """Canonical word of s_outer . s_inner."""
    res = tuple(inner)
    for a in reversed(outer):
        res = _insert_degeneracy(res, a)
    return res


def _factor_degeneracy(word, a):
    """word' with s_word = s_a . s_word'; requires a in word."""
    idx = word.index(a)
    return tuple(b - 1 for b in word[:idx]) + word[idx + 1 :]


def _face_through_word(word, i):
    """Push d_i through s_word: returns (emitted word, residual face or None)."""
    out = []
    for k, j in enumerate(word):
        if i < j:
            out.append(j - 1)
        elif i == j or i == j + 1:
            return tuple(out) + word[k + 1 :], None
        else:
            out.append(j)
            i -= 1
    return tuple(out), i


class SimplicialSet:
    """Nondegenerate simplices per dimension with recorded faces.

    ``faces[n][k][i]`` is the i-th face of the k-th n-simplex as a
    (word, position) pair; simplicial identities are checked on construction.
    """

    def __init__(self, name, simplices, faces, check=True):
        self.name = name
        self.simplices = [list(level) for level in simplices]
        while self.simplices and not self.simplices[-1]:
            self.simplices.pop()
        self.index = [
            {key: k for k, key in enumerate(level)} for level in self.simplices
        ]
        self.faces = list(faces)[: len(self.simplices)]
        if check:
            problem = self._check_identities()
            if problem:
                raise ValueError(f"simplicial identities fail: {problem}")

    @property
    def top_dim(self):
        return len(self.simplices) - 1

    def n_cells(self, n):
        if 0 <= n <= self.top_dim:
            return len(self.simplices[n])
        return 0

    def total_cells(self):
        return sum(len(level) for level in self.simplices)

    def face(self, n, k, i):
        """i-th face of the k-th nondegenerate n-simplex: (word, pos)."""
        return self.faces[n][k][i]

    def face_deg(self, n, word, pos, i):
        """i-th face of the degenerate simplex s_word(simplex) in dim n."""
        emitted, residual = _face_through_word(word, i)
        if residual is None:
            return emitted, pos
        base_dim = n - len(word)
        w2, pos2 = self.face(base_dim, pos, residual)
        return compose_degeneracies(emitted, w2), pos2

    def _check_identities(self):
        for n in range(2, self.top_dim + 1):
            for k in range(self.n_cells(n)):
                for j in range(1, n + 1):
                    for i in range(j):
                        w1, p1 = self.face(n, k, j)
                        a = self.face_deg(n - 1, w1, p1, i)
                        w2, p2 = self.face(n, k, i)
                        b = self.face_deg(n - 1, w2, p2, j - 1)
                        if a != b:
                            return f"d_{i} d_{j} != d_{j-1} d_{i} on {n}-simplex {k}"
        return None

    def euler_characteristic(self):
        return sum((-1) ** n * self.n_cells(n) for n in range(self.top_dim + 1))

    def __repr__(self):
        counts = [self.n_cells(n) for n in range(self.top_dim + 1)]
        return f"SimplicialSet({self.name}, cells={counts})"


# ---------------------------------------------------------------------------
# constructions


def from_complex(facets, name="complex"):
    """Simplicial set of an ordered simplicial complex given by facets."""
    if not facets:
        raise ValueError("empty facet list")
    simplices = {}
    for facet in facets:
        vs = tuple(sorted(set(facet)))
        if not vs:
            raise ValueError("empty facet")
        n = len(vs) - 1
        for k in range(1, len(vs) + 1):
            for sub in combinations(vs, k):
                simplices.setdefault(len(sub) - 1, set()).add(sub)
    top = max(simplices)
    levels = [sorted(simplices.get(n, ())) for n in range(top + 1)]
    index = [{key: k for k, key in enumerate(level)} for level in levels]
    faces = [None]
    for n in range(1, top + 1):
        level_faces = []
        for key in levels[n]:
            row = []
            for i in range(n + 1):
                sub = key[:i] + key[i + 1 :]
                row.append(((), index[n - 1][sub]))
            level_faces.append(tuple(row))
        faces.append(level_faces)
    return SimplicialSet(name, levels, faces)


def point():
    return from_complex([[0]], name="point")


def interval():
    return from_complex([[0, 1]], name="interval")


def circle():
    return from_complex([[0, 1], [1, 2], [0, 2]], name="circle")


def sphere2():
    return from_complex(
        [[0, 1, 2], [0, 1, 3], [0, 2, 3], [1, 2, 3]], name="sphere2"
    )


def power(X, n, cap=DEFAULT_CAP):
    """n-fold categorical product of a simplicial set with itself.

    Nondegenerate k-simplices are n-tuples of (word, position) pairs of
    dimension k whose degeneracy words have no common letter.  Coordinates
    are the keys, so diagonal subsets read them off directly.
    """
    if n < 1:
        raise ValueError("power needs n >= 1")
    top = X.top_dim * n
    levels = []
    total = 0
    for k in range(top + 1):
        per_factor = []
        for p in range(min(k, X.top_dim) + 1):
            for word in combinations(range(k - 1, -1, -1), k - p):
                for pos in range(X.n_cells(p)):
                    per_factor.append((tuple(word), pos))
        level = []
        for combo in product(per_factor, repeat=n):
            common = set(combo[0][0])
            for (w, _) in combo[1:]:
                common &= set(w)
                if not common:
                    break
            if common:
                continue
            level.append(combo)
            total += 1
            if total > cap:
                raise ResourceCapError(
                    f"{X.name}^{n} exceeds the simplex cap ({cap})"
                )
        levels.append(sorted(level))
    index = [{key: k for k, key in enumerate(level)} for level in levels]
    faces = [None]
    for k in range(1, len(levels)):
        level_faces = []
        for key in levels[k]:
            row = []
            for i in range(k + 1):
                coords = [X.face_deg(k, w, pos, i) for (w, pos) in key]
                word, core = _normalize_tuple(coords)
                row.append((word, index[k - 1][core]))
            level_faces.append(tuple(row))
        faces.append(level_faces)
    return SimplicialSet(f"{X.name}^{n}", levels, faces)


def _normalize_tuple(coords):
    """Split a coordinate tuple into (common word, nondegenerate core)."""
    outer = []
    coords = list(coords)
    while True:
        common = set(coords[0][0])
        for (w, _) in coords[1:]:
            common &= set(w)
        if not common:
            break
        a = max(common)
        outer.append(a)
        coords = [(_factor_degeneracy(w, a), pos) for (w, pos) in coords]
    word = ()
    for a in reversed(outer):
        word = _insert_degeneracy(word, a)
    return word, tuple(coords)


def torus():
    return power(circle(), 2)


_BUILTIN_COMPLEXES = {
    "point": point,
    "interval": interval,
    "circle": circle,
    "sphere2": sphere2,
    "torus": torus,
}


def builtin_complex(name):
    if name not in _BUILTIN_COMPLEXES:
        raise ValueError(f"unknown complex builtin {name!r}")
    return _BUILTIN_COMPLEXES[name]()


def complex_from_config(text):
    """Parse {"facets": [[v, ...], ...]}."""
    import json

    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValueError(f"complex config syntax error: {exc}") from None
    try:
        facets = [list(f) for f in data["facets"]]
    except (KeyError, TypeError) as exc:
        raise ValueError(f'complex config needs "facets": {exc}') from None
    return from_complex(facets)


# ---------------------------------------------------------------------------
# subsets


class SimplicialSubset:
    """Membership flags per nondegenerate simplex, closed under faces."""

    def __init__(self, parent, members):
        self.parent = parent
        self.members = [set(level) for level in members]
        while len(self.members) < parent.top_dim + 1:
            self.members.append(set())
        problem = self._check_closed()
        if problem:
            raise ValueError(problem)
        self._index = [
            {k: i for i, k in enumerate(sorted(level))} for level in self.members
        ]

    def _check_closed(self):
        X = self.parent
        for n in range(1, X.top_dim + 1):
            for k in self.members[n]:
                for i in range(n + 1):
                    _, pos = X.face(n, k, i)
                    base_dim = n - 1 - len(X.face(n, k, i)[0])
                    if pos not in self.members[base_dim]:
                        return f"subset not closed under faces at dim {n}"
        return None

    def contains(self, n, k):
        return 0 <= n < len(self.members) and k in self.members[n]

    def n_cells(self, n):
        return len(self.members[n]) if 0 <= n < len(self.members) else 0

    def total_cells(self):
        return sum(len(level) for level in self.members)

    def positions(self, n):
        """Member positions in dimension n, ascending."""
        return sorted(self.members[n]) if 0 <= n < len(self.members) else []

    def is_everything(self):
        return all(
            len(self.members[n]) == self.parent.n_cells(n)
            for n in range(self.parent.top_dim + 1)
        )


def full_subset(X):
    return SimplicialSubset(
        X, [set(range(X.n_cells(n))) for n in range(X.top_dim + 1)]
    )


def empty_subset(X):
    return SimplicialSubset(X, [set() for _ in range(X.top_dim + 1)])


def diagonal(Xn, i, j):
    """Subset of a power where coordinates i and j agree (1-based, i < j)."""
    if not (1 <= i < j):
        raise ValueError("diagonal needs 1 <= i < j")
    members = []
    for n in range(Xn.top_dim + 1):
        level = set()
        for k, key in enumerate(Xn.simplices[n]):
            if key[i - 1] == key[j - 1]:
                level.add(k)
        members.append(level)
    return SimplicialSubset(Xn, members)


def diagonal_intersection(Xn, edges):
    """Z_s = the intersection of the edge diagonals: all endpoints agree."""
    members = []
    for n in range(Xn.top_dim + 1):
        level = set()
        for k, key in enumerate(Xn.simplices[n]):
            if all(key[i - 1] == key[j - 1] for (i, j) in edges):
                level.add(k)
        members.append(level)
    return SimplicialSubset(Xn, members)


def diagonal_union(Xn, edges):
    """Z_G = the union of the edge diagonals: some edge's endpoints agree."""
    members = []
    for n in range(Xn.top_dim + 1):
        level = set()
        for k, key in enumerate(Xn.simplices[n]):
            if any(key[i - 1] == key[j - 1] for (i, j) in edges):
                level.add(k)
        members.append(level)
    return SimplicialSubset(Xn, members)


# ---------------------------------------------------------------------------
# cochains and cohomology


def coboundary_matrix(X, ring, n):
    """Normalized coboundary C^n -> C^{n+1}."""
    rows = X.n_cells(n + 1)
    cols = X.n_cells(n)
    ent = {}
    for k in range(rows):
        for i in range(n + 2):
            word, pos = X.face(n + 1, k, i)
            if word:
                continue
            key = (k, pos)
            v = ring.add(ent.get(key, ring.zero()), ring.from_int((-1) ** i))
            if ring.is_zero(v):
                ent.pop(key, None)
            else:
                ent[key] = v
    return SparseMatrix(ring, rows, cols, ent)


def betti(X, ring):
    """{degree: rank} (plus torsion over Z as a second dict)."""
    mats = [coboundary_matrix(X, ring, n) for n in range(X.top_dim + 1)]
    ranks = {}
    torsion = {}
    for n in range(X.top_dim + 1):
        dim = X.n_cells(n)
        d_out = mats[n]
        d_in = mats[n - 1] if n > 0 else None
        if ring.is_field:
            r = dim - rank(d_out) - (rank(d_in) if d_in is not None else 0)
        else:
            r, tors = integral_cohomology(dim, d_in, d_out)
            if tors:
                torsion[n] = tors
        if r:
            ranks[n] = r
    return ranks, torsion


def relative_coboundary_matrix(X, Z, ring, n):
    """Coboundary on cochains vanishing on Z (basis: simplices not in Z)."""
    src = [k for k in range(X.n_cells(n)) if not Z.contains(n, k)]
    tgt = [k for k in range(X.n_cells(n + 1)) if not Z.contains(n + 1, k)]
    tpos = {k: i for i, k in enumerate(tgt)}
    spos = {k: j for j, k in enumerate(src)}
    ent = {}
    for k in tgt:
        for i in range(n + 2):
            word, pos = X.face(n + 1, k, i)
            if word or pos not in spos:
                continue
            key = (tpos[k], spos[pos])
            v = ring.add(ent.get(key, ring.zero()), ring.from_int((-1) ** i))
            if ring.is_zero(v):
                ent.pop(key, None)
            else:
                ent[key] = v
    return SparseMatrix(ring, len(tgt), len(src), ent)


def relative_cohomology(X, Z, ring, check_les=True):
    """(ranks, torsion) of H^*(X, Z): normalized cochains vanishing on Z.

    Over a field torsion is empty and the long-exact-sequence rank identity
    against H^*(X) and H^*(Z) is verified internally; over Z the LES check
    runs at rank level (via Q).
    """
    mats = [relative_coboundary_matrix(X, Z, ring, n) for n in range(X.top_dim + 1)]
    ranks = {}
    torsion = {}
    for n in range(X.top_dim + 1):
        dim = X.n_cells(n) - Z.n_cells(n)
        d_out = mats[n]
        d_in = mats[n - 1] if n > 0 else None
        if ring.is_field:
            r = dim - rank(d_out) - (rank(d_in) if d_in is not None else 0)
        else:
            r, tors = integral_cohomology(dim, d_in, d_out)
            if tors:
                torsion[n] = tors
        if r:
            ranks[n] = r
    if check_les:
        problem = _les_rank_check(X, Z, ring, ranks)
        if problem:
            raise AssertionError(f"relative cohomology LES check failed: {problem}")
    return ranks, torsion


def _restriction_rank(X, Z, ring, n, HX, HZ):
    """Rank of H^n(X) -> H^n(Z) induced by restriction."""
    if HX.dim == 0 or HZ.dim == 0:
        return 0
    zpos = {k: i for i, k in enumerate(Z.positions(n))}
    cols = []
    for rep in HX.reps:
        restricted = {zpos[k]: v for k, v in rep.items() if k in zpos}
        cols.append(HZ.classify(restricted))
    return rank(SparseMatrix.from_columns(ring, cols, HZ.dim))


def _subset_coboundary(X, Z, ring, n):
    """Coboundary of the subcomplex Z in its own basis."""
    src = Z.positions(n)
    tgt = Z.positions(n + 1)
    spos = {k: j for j, k in enumerate(src)}
    tpos = {k: i for i, k in enumerate(tgt)}
    ent = {}
    for k in tgt:
        for i in range(n + 2):
            word, pos = X.face(n + 1, k, i)
            if word:
                continue
            key = (tpos[k], spos[pos])
            v = ring.add(ent.get(key, ring.zero()), ring.from_int((-1) ** i))
            if ring.is_zero(v):
                ent.pop(key, None)
            else:
                ent[key] = v
    return SparseMatrix(ring, len(tgt), len(src), ent)


def _les_rank_check(X, Z, ring, rel_ranks):
    """dim H^n(X,Z) = dim ker(H^n X -> H^n Z) + dim coker at n-1."""
    if not ring.is_field:
        from .coeff import QQ

        return _les_rank_check(X, Z, QQ, rel_ranks)
    xmats = [coboundary_matrix(X, ring, n) for n in range(X.top_dim + 1)]
    zmats = [_subset_coboundary(X, Z, ring, n) for n in range(X.top_dim + 1)]
    HX = {}
    HZ = {}
    for n in range(X.top_dim + 1):
        HX[n] = CohomologySpace(
            ring, X.n_cells(n), xmats[n - 1] if n else None, xmats[n]
        )
        HZ[n] = CohomologySpace(
            ring, Z.n_cells(n), zmats[n - 1] if n else None, zmats[n]
        )
    rrank = {
        n: _restriction_rank(X, Z, ring, n, HX[n], HZ[n])
        for n in range(X.top_dim + 1)
    }
    for n in range(X.top_dim + 2):
        hx = HX[n].dim if n in HX else 0
        hz_prev = HZ[n - 1].dim if n - 1 in HZ else 0
        r_n = rrank.get(n, 0)
        r_prev = rrank.get(n - 1, 0)
        expect = (hx - r_n) + (hz_prev - r_prev)
        got = rel_ranks.get(n, 0)
        if got != expect:
            return f"degree {n}: rank {got}, LES predicts {expect}"
    return None


# ---------------------------------------------------------------------------
# the bicomplex of covers (diagonal subspaces over edge subsets)


def cover_bicomplex(X, graph, ring, cap=DEFAULT_CAP):
    """The bicomplex of C^*(Z_s) over edge subsets of a simple graph.

    Columns are p = |s| with Z_s the intersection of the edge diagonals
    (Z_empty = X^n); the horizontal differential is the signed restriction
    along Z_{s u a} < Z_s, matching the e_alpha ^ e_s sign convention of the
    graph complex; the vertical differential is the cochain differential
    with a (-1)^p twist.  Returns (bicomplex, Xn, subsets-by-subset).
    """
    if graph.has_loop():
        raise ValueError("cover bicomplex needs a loopless graph")
    if len(set(graph.edges)) != graph.num_edges:
        raise ValueError("cover bicomplex needs a simple graph")
    Xn = power(X, graph.n, cap=cap)
    E = graph.num_edges
    subsets = {}
    for p in range(E + 1):
        for s in combinations(range(E), p):
            subsets[s] = diagonal_intersection(Xn, [graph.edges[a] for a in s])
    cells = {}
    offsets = {}
    for p in range(E + 1):
        for q in range(Xn.top_dim + 1):
            off = {}
            total = 0
            for s in combinations(range(E), p):
                off[s] = total
                total += subsets[s].n_cells(q)
            cells[(p, q)] = total
            offsets[(p, q)] = off
    horiz = {}
    vert = {}
    for p in range(E + 1):
        for q in range(Xn.top_dim + 1):
            if not cells.get((p, q)):
                continue
            # vertical: coboundary of each Z_s with the (-1)^p twist
            ent = {}
            sign_p = ring.from_int(-1 if p % 2 else 1)
            for s in combinations(range(E), p):
                Zs = subsets[s]
                pos_q = {k: j for j, k in enumerate(Zs.positions(q))}
                pos_q1 = {k: i for i, k in enumerate(Zs.positions(q + 1))}
                for k in Zs.positions(q + 1):
                    for i in range(q + 2):
                        word, pos = Xn.face(q + 1, k, i)
                        if word:
                            continue
                        key = (
                            offsets[(p, q + 1)][s] + pos_q1[k],
                            offsets[(p, q)][s] + pos_q[pos],
                        )
                        v = ring.add(
                            ent.get(key, ring.zero()),
                            ring.mul(sign_p, ring.from_int((-1) ** i)),
                        )
                        if ring.is_zero(v):
                            ent.pop(key, None)
                        else:
                            ent[key] = v
            if ent or cells.get((p, q + 1)):
                vert[(p, q)] = SparseMatrix(
                    ring, cells.get((p, q + 1), 0), cells[(p, q)], ent
                )
            # horizontal: signed restrictions to Z_{s u a}
            if p < E:
                ent = {}
                for s in combinations(range(E), p):
                    Zs = subsets[s]
                    pos_q = {k: j for j, k in enumerate(Zs.positions(q))}
                    for a in range(E):
                        if a in s:
                            continue
                        s2 = tuple(sorted(s + (a,)))
                        Zt = subsets[s2]
                        sign = ring.from_int(
                            -1 if sum(1 for b in s if b < a) % 2 else 1
                        )
                        tpos = {k: i for i, k in enumerate(Zt.positions(q))}
                        for k in Zs.positions(q):
                            if Zt.contains(q, k):
                                key = (
                                    offsets[(p + 1, q)][s2] + tpos[k],
                                    offsets[(p, q)][s] + pos_q[k],
                                )
                                ent[(key)] = ring.add(
                                    ent.get(key, ring.zero()), sign
                                )
                horiz[(p, q)] = SparseMatrix(
                    ring, cells.get((p + 1, q), 0), cells[(p, q)], ent
                )
    bic = Bicomplex(ring, cells, horiz, vert)
    return bic, Xn, subsets


# ---------------------------------------------------------------------------
# cup product ring on cohomology


def _front_face(X, n, k, q):
    """Front q-face of a nondegenerate n-simplex: (word, pos)."""
    word, pos = (), k
    dim = n
    while dim > q:
        word, pos = X.face_deg(dim, word, pos, dim)
        dim -= 1
    return word, pos


def _back_face(X, n, k, r):
    """Back r-face (iterated d_0): (word, pos)."""
    word, pos = (), k
    dim = n
    while dim > r:
        word, pos = X.face_deg(dim, word, pos, 0)
        dim -= 1
    return word, pos


def cup_cochain(X, ring, q, f, r, g):
    """Alexander-Whitney cup product of cochain vectors f (deg q), g (deg r)."""
    out = {}
    n = q + r
    for k in range(X.n_cells(n)):
        wf, pf = _front_face(X, n, k, q)
        if wf:
            continue
        vf = f.get(pf)
        if vf is None:
            continue
        wb, pb = _back_face(X, n, k, r)
        if wb:
            continue
        vg = g.get(pb)
        if vg is None:
            continue
        v = ring.mul(vf, vg)
        if not ring.is_zero(v):
            out[k] = v
    return out


def cup_ring(X, ring):
    """H^*(X) as a validated graded-commutative algebra (field coefficients).

    Representative cocycles are chosen deterministically; the product of two
    classes is the Alexander-Whitney product of their representatives,
    classified back into the chosen basis.
    """
    if not ring.is_field:
        raise ValueError("cup_ring needs field coefficients")
    mats = [coboundary_matrix(X, ring, n) for n in range(X.top_dim + 1)]
    spaces = {}
    for n in range(X.top_dim + 1):
        spaces[n] = CohomologySpace(
            ring, X.n_cells(n), mats[n - 1] if n else None, mats[n]
        )
    if spaces[0].dim != 1:
        raise ValueError("cup_ring needs a connected complex (dim H^0 = 1)")
    basis = []
    for n in range(X.top_dim + 1):
        for i in range(spaces[n].dim):
            basis.append((n, i))
    names = []
    for (n, i) in basis:
        if n == 0:
            names.append("1")
        elif spaces[n].dim == 1:
            names.append(f"h{n}")
        else:
            names.append(f"h{n}_{i}")
    degrees = [n for (n, _) in basis]
    pos = {b: k for k, b in enumerate(basis)}
    mult = {}
    for k1, (q, i) in enumerate(basis):
        for k2, (r, j) in enumerate(basis):
            n = q + r
            if n > X.top_dim or spaces[n].dim == 0:
                continue
            prod = cup_cochain(X, ring, q, spaces[q].reps[i], r, spaces[r].reps[j])
            coords = spaces[n].classify(prod)
            expansion = {pos[(n, t)]: v for t, v in coords.items()}
            if expansion:
                mult[(k1, k2)] = expansion
    A = GradedAlgebra(ring, names, degrees, mult)
    problem = validate_algebra(A)
    if problem is not None:
        raise AssertionError(f"cup ring fails validation: {problem}")
    return A
