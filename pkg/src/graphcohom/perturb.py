"""Reductions, the Basic Perturbation Lemma, and Merkulov products.

A `FiniteComplex` is a finitely supported graded vector space with a degree
+1 differential; a `GradedMap` is a degree-homogeneous linear map between
two of them.  A `Reduction` (f, g, h) satisfies fg = 1, 1 - gf = dh + hd
and the side conditions hg = fh = hh = 0; `reduce_to_cohomology` builds one
deterministically over a field from the splitting K^n = B^{n+1} + B^n + L^n,
and `enforce_side_conditions` repairs an arbitrary homotopy by
h -> (dh+hd) h (dh+hd) -> h' d h'.

`bpl` transfers a perturbation across a reduction via the geometric series
X = delta - delta h delta + ... ; nilpotence is certified by a declared
integer filtration that the perturbation strictly raises and h does not
lower, so the series provably terminates.

`merkulov` runs the two-term recursion
    lambda_n = sum_p (-1)^{p+1} lambda_2 [h lambda_p (x) h lambda_{n-p}]
(with h lambda_1 = -id) and returns the transferred products
m_n = f . lambda_n . g^{(x)n}.  Operator application uses the Koszul rule
(u (x) v)(x (x) y) = (-1)^{deg v deg x} u(x) (x) v(y); with that convention
the products satisfy the Stasheff identities
    sum (-1)^{r + st} m_{r+1+t}(1 ... m_s ... 1) = 0
which the test suite checks exhaustively on basis tuples.
"""

from .algebra import GradedAlgebra
from .coeff import (
    SparseMatrix,
    kernel_basis,
    row_space,
    solve,
    vec_axpy,
    vec_scale,
)


class FiniteComplex:
    """Graded components with a degree +1 differential as sparse matrices."""

    def __init__(self, ring, dims, diff, labels=None):
        self.ring = ring
        self.dims = {n: d for n, d in dims.items() if d}
        self.diff = {}
        for n, M in diff.items():
            if M.rows != self.dim(n + 1) or M.cols != self.dim(n):
                raise ValueError(f"differential at degree {n} has wrong shape")
            if M.entries:
                self.diff[n] = M
        self.labels = labels

    def dim(self, n):
        return self.dims.get(n, 0)

    def degrees(self):
        return sorted(self.dims)

    def d(self, n):
        M = self.diff.get(n)
        if M is None:
            M = SparseMatrix.zero(self.ring, self.dim(n + 1), self.dim(n))
        return M

    def d_map(self):
        return GradedMap(self, self, 1, dict(self.diff))

    def check_d2(self):
        for n in self.degrees():
            if not self.d(n + 1).mul(self.d(n)).is_zero():
                return f"d^2 != 0 at degree {n}"
        return None

    def total_dim(self):
        return sum(self.dims.values())

    def __repr__(self):
        return f"FiniteComplex({self.ring}, dims={self.dims})"


class GradedMap:
    """Degree-homogeneous map between finite complexes."""

    def __init__(self, src, tgt, degree, mats):
        self.src = src
        self.tgt = tgt
        self.degree = degree
        self.mats = {}
        for n, M in mats.items():
            if M.rows != tgt.dim(n + degree) or M.cols != src.dim(n):
                raise ValueError(f"map at degree {n} has wrong shape")
            if M.entries:
                self.mats[n] = M

    @classmethod
    def zero(cls, src, tgt, degree):
        return cls(src, tgt, degree, {})

    @classmethod
    def identity(cls, cx):
        return cls(
            cx,
            cx,
            0,
            {n: SparseMatrix.identity(cx.ring, cx.dim(n)) for n in cx.degrees()},
        )

    def mat(self, n):
        M = self.mats.get(n)
        if M is None:
            M = SparseMatrix.zero(
                self.src.ring, self.tgt.dim(n + self.degree), self.src.dim(n)
            )
        return M

    def compose(self, other):
        """self . other (apply ``other`` first)."""
        if other.tgt is not self.src:
            raise ValueError("composition mismatch")
        mats = {}
        for n in other.src.degrees():
            M = self.mat(n + other.degree).mul(other.mat(n))
            if M.entries:
                mats[n] = M
        return GradedMap(other.src, self.tgt, self.degree + other.degree, mats)

    def add(self, other):
        if (self.src, self.tgt, self.degree) != (other.src, other.tgt, other.degree):
            raise ValueError("sum mismatch")
        mats = {}
        for n in set(self.mats) | set(other.mats):
            M = self.mat(n).add(other.mat(n))
            if M.entries:
                mats[n] = M
        return GradedMap(self.src, self.tgt, self.degree, mats)

    def scale(self, a):
        return GradedMap(
            self.src,
            self.tgt,
            self.degree,
            {n: M.scale(a) for n, M in self.mats.items()},
        )

    def neg(self):
        return self.scale(self.src.ring.from_int(-1))

    def sub(self, other):
        return self.add(other.neg())

    def is_zero(self):
        return all(M.is_zero() for M in self.mats.values())

    def apply(self, n, vec):
        """Apply to a sparse vector in degree n; lands in n + degree."""
        return self.mat(n).apply(vec)

    def __eq__(self, other):
        return (
            isinstance(other, GradedMap)
            and self.degree == other.degree
            and all(self.mat(n) == other.mat(n) for n in set(self.mats) | set(other.mats))
        )


class Reduction:
    """(f, g, h) with fg = 1, 1 - gf = dh + hd and hg = fh = hh = 0."""

    def __init__(self, big, small, f, g, h):
        self.big = big
        self.small = small
        self.f = f
        self.g = g
        self.h = h

    def verify(self):
        """None when all five identities (plus chain-map-ness) hold exactly."""
        dK = self.big.d_map()
        dL = self.small.d_map()
        if not self.f.compose(dK).sub(dL.compose(self.f)).is_zero():
            return "f is not a chain map"
        if not self.g.compose(dL).sub(dK.compose(self.g)).is_zero():
            return "g is not a chain map"
        if not self.f.compose(self.g).sub(GradedMap.identity(self.small)).is_zero():
            return "fg != 1"
        lhs = GradedMap.identity(self.big).sub(self.g.compose(self.f))
        rhs = dK.compose(self.h).add(self.h.compose(dK))
        if not lhs.sub(rhs).is_zero():
            return "1 - gf != dh + hd"
        if not self.h.compose(self.g).is_zero():
            return "hg != 0"
        if not self.f.compose(self.h).is_zero():
            return "fh != 0"
        if not self.h.compose(self.h).is_zero():
            return "hh != 0"
        return None


def reduce_to_cohomology(K, shuffle_seed=None):
    """Deterministic reduction of a field complex onto its cohomology.

    Splits K^n = B^{n+1} + B^n + L^n with canonical echelon bases: f is the
    projection onto the chosen representatives, g their embedding, h the
    inverse of d on the preimage of the coboundaries.  ``shuffle_seed``
    permutes coordinates first (and conjugates back), giving an alternative
    splitting for stability experiments.
    """
    if not K.ring.is_field:
        raise ValueError("reduce_to_cohomology needs field coefficients")
    if shuffle_seed is not None:
        return _reduce_shuffled(K, shuffle_seed)
    ring = K.ring
    degs = K.degrees()
    B = {}
    for n in degs:
        if n - 1 in K.diff or True:
            B[n + 1] = row_space(
                ring, [K.d(n).column(j) for j in range(K.dim(n))], K.dim(n + 1)
            ).basis()
    L_reps = {}
    C_basis = {}
    for n in degs:
        Z = kernel_basis(K.d(n))
        span = row_space(ring, B.get(n, []), K.dim(n))
        reps = []
        for z in Z:
            if span.insert(z):
                reps.append(z)
        L_reps[n] = reps
        C_basis[n] = [solve(K.d(n), b) for b in B.get(n + 1, [])]
    small = FiniteComplex(ring, {n: len(L_reps[n]) for n in degs}, {})
    f_mats = {}
    g_mats = {}
    h_mats = {}
    for n in degs:
        dimn = K.dim(n)
        cols = list(B.get(n, [])) + L_reps[n] + C_basis[n]
        nb = len(B.get(n, []))
        nl = len(L_reps[n])
        if len(cols) != dimn:
            raise AssertionError("splitting does not span")
        P = SparseMatrix.from_columns(ring, cols, dimn)
        # coordinates of each unit vector in the splitting basis
        coord_cols = [solve(P, {i: ring.one()}) for i in range(dimn)]
        f_ent = {}
        for j, coords in enumerate(coord_cols):
            for i, v in coords.items():
                if nb <= i < nb + nl:
                    f_ent[(i - nb, j)] = v
        f_mats[n] = SparseMatrix(ring, nl, dimn, f_ent)
        g_mats[n] = SparseMatrix.from_columns(ring, L_reps[n], dimn)
        # h on degree n+1: project to B^{n+1}, then the chosen d-preimage
        if B.get(n + 1) and K.dim(n + 1):
            dimn1 = K.dim(n + 1)
            cols1 = list(B.get(n + 1, [])) + L_reps.get(n + 1, []) + C_basis.get(n + 1, [])
            P1 = SparseMatrix.from_columns(ring, cols1, dimn1)
            nb1 = len(B.get(n + 1, []))
            h_ent = {}
            for j in range(dimn1):
                coords = solve(P1, {j: ring.one()})
                for i, v in coords.items():
                    if i < nb1:
                        for r, w in C_basis[n][i].items():
                            key = (r, j)
                            s = ring.add(h_ent.get(key, ring.zero()), ring.mul(v, w))
                            if ring.is_zero(s):
                                h_ent.pop(key, None)
                            else:
                                h_ent[key] = s
            h_mats[n + 1] = SparseMatrix(ring, dimn, dimn1, h_ent)
    f = GradedMap(K, small, 0, f_mats)
    g = GradedMap(small, K, 0, g_mats)
    h = GradedMap(K, K, -1, h_mats)
    red = Reduction(K, small, f, g, h)
    problem = red.verify()
    if problem is not None:
        raise AssertionError(f"reduce_to_cohomology produced a bad reduction: {problem}")
    return red


def _reduce_shuffled(K, seed):
    import random

    rng = random.Random(seed)
    ring = K.ring
    perms = {}
    for n in K.degrees():
        p = list(range(K.dim(n)))
        rng.shuffle(p)
        perms[n] = p
    P_mats = {}
    Pinv_mats = {}
    for n, p in perms.items():
        one = ring.one()
        P_mats[n] = SparseMatrix(
            ring, len(p), len(p), {(i, old): one for i, old in enumerate(p)}
        )
        Pinv_mats[n] = SparseMatrix(
            ring, len(p), len(p), {(old, i): one for i, old in enumerate(p)}
        )
    Kp = FiniteComplex(
        ring,
        dict(K.dims),
        {
            n: P_mats.get(n + 1, SparseMatrix.identity(ring, K.dim(n + 1)))
            .mul(K.d(n))
            .mul(Pinv_mats.get(n, SparseMatrix.identity(ring, K.dim(n))))
            for n in K.degrees()
        },
    )
    red_p = reduce_to_cohomology(Kp)
    P = GradedMap(K, Kp, 0, P_mats)
    Pinv = GradedMap(Kp, K, 0, Pinv_mats)
    # relabel the permuted complex's maps back to K's coordinates
    f = red_p.f.compose(P)
    g = Pinv.compose(red_p.g)
    h = Pinv.compose(red_p.h).compose(P)
    red = Reduction(K, red_p.small, f, g, h)
    problem = red.verify()
    if problem is not None:
        raise AssertionError(f"shuffled reduction invalid: {problem}")
    return red


def enforce_side_conditions(big, small, f, g, h):
    """Repair an arbitrary homotopy: h' = (dh+hd) h (dh+hd), h'' = h' d h'."""
    dK = big.d_map()
    if not f.compose(g).sub(GradedMap.identity(small)).is_zero():
        raise ValueError("fg != 1: not a homotopy equivalence datum")
    lhs = GradedMap.identity(big).sub(g.compose(f))
    if not lhs.sub(dK.compose(h).add(h.compose(dK))).is_zero():
        raise ValueError("1 - gf != dh + hd: not a homotopy")
    pi = dK.compose(h).add(h.compose(dK))
    h1 = pi.compose(h).compose(pi)
    h2 = h1.compose(dK).compose(h1)
    red = Reduction(big, small, f, g, h2)
    problem = red.verify()
    if problem is not None:
        raise AssertionError(f"side-condition enforcement failed: {problem}")
    return red


class BPLResult:
    def __init__(self, reduction, delta_small, iterations):
        self.reduction = reduction
        self.delta_small = delta_small
        self.iterations = iterations


def bpl(red, delta, filtration):
    """Basic Perturbation Lemma across ``red`` for the perturbation ``delta``.

    ``filtration`` assigns an integer level to every basis vector of the big
    complex ({degree: [level, ...]}); delta must strictly raise it and h must
    not lower it, which bounds the series X = delta - delta h delta + ...
    by the number of distinct levels.  Every output identity is verified.
    """
    K, L = red.big, red.small
    ring = K.ring
    dK = K.d_map()
    if delta.degree != 1 or delta.src is not K:
        raise ValueError("perturbation must be a degree +1 endomorphism of K")
    Dhat = dK.add(delta)
    if not Dhat.compose(Dhat).is_zero():
        raise ValueError("(d + delta)^2 != 0")
    levels = set()
    for n in K.degrees():
        if len(filtration.get(n, [])) != K.dim(n):
            raise ValueError(f"filtration missing levels at degree {n}")
        levels.update(filtration[n])
    for n, M in delta.mats.items():
        for (r, c) in M.entries:
            if filtration[n + 1][r] < filtration[n][c] + 1:
                raise ValueError("perturbation does not strictly raise the filtration")
    for n, M in red.h.mats.items():
        for (r, c) in M.entries:
            if filtration[n - 1][r] < filtration[n][c]:
                raise ValueError("homotopy lowers the filtration")
    cap = len(levels) + 1
    X = delta
    term = delta
    iterations = 0
    while True:
        term = delta.compose(red.h).compose(term).neg()
        iterations += 1
        if term.is_zero():
            break
        if iterations > cap:
            raise AssertionError("perturbation series failed to terminate")
        X = X.add(term)
    delta_L = red.f.compose(X).compose(red.g)
    f_hat = red.f.sub(red.f.compose(X).compose(red.h))
    g_hat = red.g.sub(red.h.compose(X).compose(red.g))
    h_hat = red.h.sub(red.h.compose(X).compose(red.h))
    K_hat = FiniteComplex(ring, dict(K.dims), {n: Dhat.mat(n) for n in K.degrees()})
    dL_hat = L.d_map().add(delta_L)
    L_hat = FiniteComplex(ring, dict(L.dims), {n: dL_hat.mat(n) for n in L.degrees()})
    out = Reduction(
        K_hat,
        L_hat,
        GradedMap(K_hat, L_hat, 0, f_hat.mats),
        GradedMap(L_hat, K_hat, 0, g_hat.mats),
        GradedMap(K_hat, K_hat, -1, h_hat.mats),
    )
    problem = out.verify()
    if problem is not None:
        raise AssertionError(f"BPL output fails: {problem}")
    return BPLResult(out, delta_L, iterations)


# ---------------------------------------------------------------------------
# DG algebras as complexes; induced algebra on cohomology


class GradedBasis:
    """Split a degree-sorted global basis into per-degree coordinates."""

    def __init__(self, degrees):
        self.degrees = tuple(degrees)
        self.by_deg = {}
        self.local = []
        for i, d in enumerate(degrees):
            self.local.append(len(self.by_deg.setdefault(d, [])))
            self.by_deg[d].append(i)

    def dims(self):
        return {d: len(v) for d, v in self.by_deg.items()}

    def split(self, vec):
        """Global sparse vector -> {degree: {local: value}}."""
        out = {}
        for i, v in vec.items():
            out.setdefault(self.degrees[i], {})[self.local[i]] = v
        return out

    def join(self, deg, vec):
        idxs = self.by_deg.get(deg, [])
        return {idxs[i]: v for i, v in vec.items()}


def algebra_complex(dga):
    """(FiniteComplex, GradedBasis) of a DG algebra's underlying complex."""
    gb = GradedBasis(dga.degrees)
    ring = dga.ring
    diff = {}
    for n, idxs in gb.by_deg.items():
        tgt = gb.by_deg.get(n + 1, [])
        tpos = {g: i for i, g in enumerate(tgt)}
        ent = {}
        for j, gidx in enumerate(idxs):
            for k, v in dga.d(gidx).items():
                ent[(tpos[k], j)] = v
        M = SparseMatrix(ring, len(tgt), len(idxs), ent)
        if M.entries:
            diff[n] = M
    K = FiniteComplex(ring, gb.dims(), diff)
    return K, gb


def apply_graded(gmap, gb_src, gb_tgt, vec):
    """Apply a GradedMap to a global sparse vector (mixed degrees allowed)."""
    out = {}
    for deg, local in gb_src.split(vec).items():
        img = gmap.apply(deg, local)
        for k, v in gb_tgt.join(deg + gmap.degree, img).items():
            vec_axpy(gmap.src.ring, out, gmap.src.ring.one(), {k: v})
    return out


def induced_algebra(dga, red, gb):
    """H(dga) as a GradedAlgebra with product f(g(a) g(b)).

    Basis classes are the reduction's representatives; class 0 must be the
    unit of the DG algebra (true for the deterministic splitting here).
    """
    ring = dga.ring
    L = red.small
    classes = []
    for n in sorted(L.dims):
        for i in range(L.dim(n)):
            classes.append((n, i))
    degrees = [n for (n, _) in classes]
    reps = []
    names = []
    for (n, i) in classes:
        rep = gb.join(n, red.g.mat(n).column(i))
        reps.append(rep)
        if len(rep) == 1:
            (gidx, coeff), = rep.items()
            if coeff == ring.one():
                names.append("1" if gidx == 0 else f"[{dga.names[gidx]}]")
                continue
        names.append(f"h{n}_{i}")
    if not classes or classes[0][0] != 0 or names[0] != "1":
        raise ValueError("induced algebra: class of the unit not found first")
    pos = {c: k for k, c in enumerate(classes)}
    gbL = GradedBasis(degrees)
    mult = {}
    for k1, r1 in enumerate(reps):
        for k2, r2 in enumerate(reps):
            prod = dga.product_vec(r1, r2)
            if not prod:
                continue
            out = {}
            for deg, local in gb.split(prod).items():
                img = red.f.apply(deg, local)
                for i, v in img.items():
                    out[pos[(deg, i)]] = v
            if out:
                mult[(k1, k2)] = out
    A = GradedAlgebra(ring, names, degrees, mult)
    A.class_reps = tuple(reps)
    return A


# ---------------------------------------------------------------------------
# Merkulov products


class AInfinity:
    """Transferred A-infinity products m_n on the cohomology algebra.

    ``m_basis(args)`` evaluates m_n on a tuple of basis classes and returns
    a sparse vector over the algebra's basis; ``m`` is its multilinear
    extension to sparse slots.
    """

    def __init__(self, dga, red, gb, algebra, N):
        self.dga = dga
        self.red = red
        self.gb = gb
        self.gbL = GradedBasis(algebra.degrees)
        self.algebra = algebra
        self.N = N
        self._cache = {}

    def _h(self, vec):
        return apply_graded(self.red.h, self.gb, self.gb, vec)

    def _f(self, vec):
        ring = self.dga.ring
        out = {}
        for deg, local in self.gb.split(vec).items():
            img = self.red.f.apply(deg, local)
            for k, v in self.gbL.join(deg, img).items():
                vec_axpy(ring, out, ring.one(), {k: v})
        return out

    def m_basis(self, args):
        """m_n on a tuple of basis-class indices, as {class index: scalar}."""
        if args in self._cache:
            return self._cache[args]
        n = len(args)
        if n == 1:
            return {}
        ring = self.dga.ring
        lifted = [dict(self.algebra.class_reps[a]) for a in args]
        degs = [self.algebra.deg(a) for a in args]
        lam = self._lambda_top(lifted, degs)
        out = self._f(lam)
        self._cache[args] = out
        return out

    def _lambda_top(self, lifted, degs):
        """lambda_n on the lifted tensor, with h lambda on all sub-intervals."""
        ring = self.dga.ring
        n = len(lifted)
        neg_one = ring.from_int(-1)
        hl = {(i, i): vec_scale(ring, neg_one, lifted[i]) for i in range(n)}
        for length in range(2, n + 1):
            for i in range(0, n - length + 1):
                j = i + length - 1
                acc = {}
                for p in range(1, length):
                    left = hl[(i, i + p - 1)]
                    right = hl[(i + p, j)]
                    prefix_par = sum(degs[i : i + p]) % 2
                    right_op_par = (length - p + 1) % 2  # parity of h lambda_{length-p}
                    sign = 1 if (p + 1) % 2 == 0 else -1
                    if right_op_par and prefix_par:
                        sign = -sign
                    term = self.dga.product_vec(left, right)
                    vec_axpy(ring, acc, ring.from_int(sign), term)
                if length == n:
                    return acc
                hl[(i, j)] = self._h(acc)
        raise AssertionError("unreachable")

    def m(self, slots):
        """Multilinear extension: slots are sparse {class: scalar} vectors."""
        ring = self.dga.ring
        out = {}

        def rec(k, args, coeff):
            if k == len(slots):
                vec_axpy(ring, out, coeff, self.m_basis(tuple(args)))
                return
            for a, v in slots[k].items():
                args.append(a)
                rec(k + 1, args, ring.mul(coeff, v))
                args.pop()

        rec(0, [], ring.one())
        return out

    def m1_is_zero(self):
        dL = self.red.small.d_map()
        return dL.is_zero()

    def m2_equals_product(self):
        A = self.algebra
        for i in range(A.dim):
            for j in range(A.dim):
                if self.m_basis((i, j)) != A.product(i, j):
                    return False
        return True

    def stasheff_defect(self, args):
        """sum_{r+s+t=n} (-1)^{r+st} m_{r+1+t}(1^r (x) m_s (x) 1^t) on args."""
        ring = self.dga.ring
        A = self.algebra
        n = len(args)
        one = ring.one()
        out = {}
        for s in range(2, n + 1):
            for r in range(0, n - s + 1):
                t = n - s - r
                if r + 1 + t == 1:
                    continue  # the outer map is m_1 = 0
                inner = self.m_basis(tuple(args[r : r + s]))
                koszul = sum(A.deg(a) for a in args[:r]) % 2
                sign = (-1) ** (r + s * t)
                # deg m_s = 2 - s, so passing it over the first r slots
                # contributes (-1)^{s * deg(prefix)}
                if (s % 2) and koszul:
                    sign = -sign
                slots = (
                    [{a: one} for a in args[:r]]
                    + [inner]
                    + [{a: one} for a in args[r + s :]]
                )
                vec_axpy(ring, out, ring.from_int(sign), self.m(slots))
        return out


def merkulov(dga, red=None, N=3):
    """AInfinity structure on H(dga) from a reduction (default splitting)."""
    if N < 2:
        raise ValueError("need N >= 2")
    K, gb = algebra_complex(dga)
    if red is None:
        red = reduce_to_cohomology(K)
    A = induced_algebra(dga, red, gb)
    return AInfinity(dga, red, gb, A, N)


def shuffle_perms(p, q):
    """All (p, q)-shuffles as index sequences of length p + q."""
    from itertools import combinations

    n = p + q
    for positions in combinations(range(n), p):
        seq = [None] * n
        for i, pos in enumerate(positions):
            seq[pos] = i
        rest = iter(range(p, n))
        for pos in range(n):
            if seq[pos] is None:
                seq[pos] = next(rest)
        yield seq


def shuffle_vanishing_violations(ainf, max_arity=4):
    """Count bar-side shuffle sums on which h(lambda) fails to vanish.

    For a graded-commutative coefficient algebra the count must be zero on
    every tuple of nonunit basis classes up to the given arity.  The signs
    are the suspended shuffle signs combined with the desuspension sign
    that h(lambda) picks up acting on (s^-1)^{(x)n} of the bar-side sum.
    """
    from itertools import product as iproduct

    A = ainf.algebra
    ring = ainf.dga.ring
    bad = 0
    for n in range(2, max_arity + 1):
        for args in iproduct(range(1, A.dim), repeat=n):
            degs = [A.deg(a) for a in args]
            lifted = [dict(A.class_reps[a]) for a in args]
            for cut in range(1, n):
                total = {}
                for seq in shuffle_perms(cut, n - cut):
                    sign = 1
                    for u in range(n):
                        for v in range(u + 1, n):
                            if (
                                seq[u] > seq[v]
                                and (degs[seq[u]] - 1) % 2
                                and (degs[seq[v]] - 1) % 2
                            ):
                                sign = -sign
                    desusp = sum((n - j - 1) * (degs[seq[j]] - 1) for j in range(n))
                    if desusp % 2:
                        sign = -sign
                    lam = ainf._lambda_top(
                        [lifted[i] for i in seq], [degs[i] for i in seq]
                    )
                    vec_axpy(ring, total, ring.from_int(sign), lam)
                if ainf._h(total):
                    bad += 1
    return bad


# ---------------------------------------------------------------------------
# bar-type model: the independent route to the transferred products


class BarModel:
    """Truncated tensor model (x)_{1<=k<=N} (s dga)^{(x)k}.

    Graded by sum (deg a_i - 1); b1 comes from the differential, the
    perturbation b0 from multiplication, both with shifted Leibniz signs.
    The tensor-trick reduction onto (x) (s H)^{(x)k} transfers b0 across the
    Basic Perturbation Lemma, and the transferred (sA)^{(x)n} -> sA blocks
    recover the Merkulov products up to the suspension sign
        (-1)^{(n-1)(n-2)/2} * (-1)^{sum_j (n-j)(deg a_j - 1)},
    which `matches_merkulov` checks entry by entry.
    """

    def __init__(self, dga, red, N):
        from itertools import product as iproduct

        self.dga = dga
        self.N = N
        ring = dga.ring
        self.ring = ring
        _, gb = algebra_complex(dga)
        self.gb = gb
        self.red0 = red
        self.A = induced_algebra(dga, red, gb)
        tuples = []
        for k in range(1, N + 1):
            tuples.extend(iproduct(range(dga.dim), repeat=k))
        self.by_deg = {}
        for t in tuples:
            self.by_deg.setdefault(self._bardeg(t), []).append(t)
        for d in self.by_deg:
            self.by_deg[d].sort(key=lambda t: (len(t), t))
        self.pos = {
            t: (d, i) for d, L in self.by_deg.items() for i, t in enumerate(L)
        }
        dims = {d: len(L) for d, L in self.by_deg.items()}
        self.K = FiniteComplex(ring, dims, self._matrix(self._b1))
        self.delta = GradedMap(self.K, self.K, 1, self._matrix(self._b0))
        sA = []
        for k in range(1, N + 1):
            sA.extend(iproduct(range(self.A.dim), repeat=k))
        self.sby = {}
        for t in sA:
            self.sby.setdefault(self._sdeg(t), []).append(t)
        for d in self.sby:
            self.sby[d].sort(key=lambda t: (len(t), t))
        self.spos = {
            t: (d, i) for d, L in self.sby.items() for i, t in enumerate(L)
        }
        self.small = FiniteComplex(ring, {d: len(L) for d, L in self.sby.items()}, {})
        self.reduction = self._tensor_reduction()

    def _bardeg(self, t):
        return sum(self.dga.deg(i) - 1 for i in t)

    def _sdeg(self, t):
        return sum(self.A.deg(i) - 1 for i in t)

    def _b1(self, t):
        ring, dga = self.ring, self.dga
        out = {}
        par = 0
        for i, a in enumerate(t):
            for k, v in dga.d(a).items():
                sign = ring.from_int(-1 if par % 2 else 1)
                vec_axpy(ring, out, ring.mul(sign, v), {t[:i] + (k,) + t[i + 1 :]: ring.one()})
            par += dga.deg(a) - 1
        return out

    def _b0(self, t):
        ring, dga = self.ring, self.dga
        out = {}
        for i in range(len(t) - 1):
            par = sum(dga.deg(t[j]) - 1 for j in range(i + 1))
            for k, v in dga.product(t[i], t[i + 1]).items():
                sign = ring.from_int(-1 if par % 2 else 1)
                vec_axpy(ring, out, ring.mul(sign, v), {t[:i] + (k,) + t[i + 2 :]: ring.one()})
        return out

    def _matrix(self, fn):
        ring = self.ring
        mats = {}
        for d, L in self.by_deg.items():
            ent = {}
            for j, t in enumerate(L):
                for t2, v in fn(t).items():
                    _, i2 = self.pos[t2]
                    ent[(i2, j)] = v
            M = SparseMatrix(ring, len(self.by_deg.get(d + 1, [])), len(L), ent)
            if M.entries:
                mats[d] = M
        return mats

    def _tensor_reduction(self):
        ring, dga, gb, red0 = self.ring, self.dga, self.gb, self.red0
        gbL = GradedBasis(self.A.degrees)
        fcache, hcache, gfcache = {}, {}, {}

        def fvec(idx):
            if idx not in fcache:
                out = {}
                for deg, local in gb.split({idx: ring.one()}).items():
                    for k, v in gbL.join(deg, red0.f.apply(deg, local)).items():
                        out[k] = v
                fcache[idx] = out
            return fcache[idx]

        def hvec(idx):
            if idx not in hcache:
                hcache[idx] = apply_graded(red0.h, gb, gb, {idx: ring.one()})
            return hcache[idx]

        gfmap = red0.g.compose(red0.f)

        def gfvec(idx):
            if idx not in gfcache:
                gfcache[idx] = apply_graded(gfmap, gb, gb, {idx: ring.one()})
            return gfcache[idx]

        f_mats, g_mats, h_mats = {}, {}, {}
        for d, L in self.by_deg.items():
            fent, hent = {}, {}
            for j, t in enumerate(L):
                outs = [((), ring.one())]
                for a in t:
                    img = fvec(a)
                    outs = [
                        (tup + (k,), ring.mul(c, v))
                        for (tup, c) in outs
                        for k, v in img.items()
                    ]
                for (tup, c) in outs:
                    if tup in self.spos:
                        _, i2 = self.spos[tup]
                        fent[(i2, j)] = ring.add(fent.get((i2, j), ring.zero()), c)
                par = 0
                for slot in range(len(t)):
                    hv = hvec(t[slot])
                    if hv:
                        sign = ring.from_int(-1 if par % 2 else 1)
                        outs = [((), sign)]
                        for i3 in range(slot):
                            img = gfvec(t[i3])
                            outs = [
                                (tup + (k,), ring.mul(c, v))
                                for (tup, c) in outs
                                for k, v in img.items()
                            ]
                        outs = [
                            (tup + (k,), ring.mul(c, v))
                            for (tup, c) in outs
                            for k, v in hv.items()
                        ]
                        for (tup, c) in outs:
                            full = tup + t[slot + 1 :]
                            _, i2 = self.pos[full]
                            hent[(i2, j)] = ring.add(hent.get((i2, j), ring.zero()), c)
                    par += dga.deg(t[slot]) - 1
            M = SparseMatrix(
                ring,
                len(self.sby.get(d, [])),
                len(L),
                {k: v for k, v in fent.items() if not ring.is_zero(v)},
            )
            if M.entries:
                f_mats[d] = M
            M = SparseMatrix(
                ring,
                len(self.by_deg.get(d - 1, [])),
                len(L),
                {k: v for k, v in hent.items() if not ring.is_zero(v)},
            )
            if M.entries:
                h_mats[d] = M
        for d, L in self.sby.items():
            gent = {}
            for j, t in enumerate(L):
                outs = [((), ring.one())]
                for a in t:
                    rep = self.A.class_reps[a]
                    outs = [
                        (tup + (k,), ring.mul(c, v))
                        for (tup, c) in outs
                        for k, v in rep.items()
                    ]
                for (tup, c) in outs:
                    _, i2 = self.pos[tup]
                    gent[(i2, j)] = c
            M = SparseMatrix(ring, len(self.by_deg.get(d, [])), len(L), gent)
            if M.entries:
                g_mats[d] = M
        red = Reduction(
            self.K,
            self.small,
            GradedMap(self.K, self.small, 0, f_mats),
            GradedMap(self.small, self.K, 0, g_mats),
            GradedMap(self.K, self.K, -1, h_mats),
        )
        problem = red.verify()
        if problem is not None:
            raise AssertionError(f"bar reduction invalid: {problem}")
        return red

    def filtration(self):
        return {d: [self.N - len(t) for t in L] for d, L in self.by_deg.items()}

    def run_bpl(self):
        return bpl(self.reduction, self.delta, self.filtration())

    def matches_merkulov(self, ainf):
        """None, or the first (args, got, expected) disagreement."""
        from itertools import product as iproduct

        ring = self.ring
        A = self.A
        res = self.run_bpl()
        for n in range(2, self.N + 1):
            sign_n = -1 if ((n - 1) * (n - 2) // 2) % 2 else 1
            for args in iproduct(range(A.dim), repeat=n):
                d_src, i_src = self.spos[args]
                col = res.delta_small.mat(d_src).column(i_src)
                barval = {}
                for i2, v in col.items():
                    t2 = self.sby[d_src + 1][i2]
                    if len(t2) == 1:
                        barval[t2[0]] = v
                susp = sum(
                    (n - j) * (A.deg(args[j - 1]) - 1) for j in range(1, n + 1)
                )
                sgn = sign_n * (-1 if susp % 2 else 1)
                expected = {
                    k: ring.mul(ring.from_int(sgn), v)
                    for k, v in ainf.m_basis(args).items()
                }
                if barval != expected:
                    return (args, barval, expected)
        return None


def bar_model(dga, red=None, N=3):
    K, _ = algebra_complex(dga)
    if red is None:
        red = reduce_to_cohomology(K)
    return BarModel(dga, red, N)
