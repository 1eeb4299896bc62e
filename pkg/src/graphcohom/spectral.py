"""Spectral sequences of first-quadrant bicomplexes, two independent ways.

`spectral_sequence` computes pages directly from the column filtration of
the total complex: E_r^{p,q} = Z_r / (Z_{r-1}' + D Z_{r-1}''), with explicit
representative bases and differential matrices.

`d_operators` realizes the perturbation route for a graph complex over a DG
algebra: a reduction of the coefficient algebra onto its cohomology is
extended to every column by

    f = f^{(x)l},  g = g^{(x)l},  h = sum_i (gf)^{(x)(i-1)} (x) h (x) 1^{...}

(Koszul signs when the odd map h passes graded slots, and a (-1)^{|s|} twist
matching the vertical differential), and

    d_i = (-1)^{i-1} f (delta h)^{i-1} delta g

on the first page.  `ss_via_perturbation` then rebuilds every page from the
d_i alone by solving the representative systems

    d_1 x = 0,  d_2 x + d_1 x_2 = 0, ..., sum_j d_{k+1-j} x_j = 0

modulo the matching boundary systems; it must agree with the direct route
page by page, which the acceptance suite checks.

The module also carries the three graph-specific theorems as executable
checks: locality of the d_i (support on subtree-contractible edge sets and
the tensor factorization shape), the tree formula relating d_{n-1} to the
transferred product m_n summed over linear extensions, and degeneration at
page k+1 for k the maximal subtree edge count.
"""

from .coeff import (
    RowSpace,
    SparseMatrix,
    kernel_basis,
    rank,
    row_space,
    solve,
    submatrix,
    vec_axpy,
)
from .graph_complex import GraphComplex, koszul_sign
from .perturb import (
    FiniteComplex,
    GradedBasis,
    algebra_complex,
    apply_graded,
    induced_algebra,
    reduce_to_cohomology,
)


class SpectralSequence:
    """Page dimensions and differential ranks, pages 1..stable_r."""

    def __init__(self, ring, pages, dranks, stable_r):
        self.ring = ring
        self.pages = pages
        self.dranks = dranks
        self.stable_r = stable_r

    def page(self, r):
        r = min(r, self.stable_r)
        return self.pages[r]

    def drank(self, r, p, q):
        return self.dranks.get(r, {}).get((p, q), 0)

    def einf(self):
        return self.pages[self.stable_r]

    def einf_by_total_degree(self):
        out = {}
        for (p, q), d in self.einf().items():
            out[p + q] = out.get(p + q, 0) + d
        return {k: v for k, v in sorted(out.items()) if v}

    def degenerates_at(self):
        """Smallest r with all differentials zero from page r on."""
        for r in range(1, self.stable_r + 1):
            if all(not self.dranks.get(t) for t in range(r, self.stable_r + 1)):
                return r
        return self.stable_r + 1

    def same_pages(self, other):
        """None if pages and differential ranks agree, else a message."""
        top = max(self.stable_r, other.stable_r)
        for r in range(1, top + 1):
            mine = self.page(r)
            theirs = other.page(r)
            if mine != theirs:
                return f"page E_{r} dimensions differ: {mine} vs {theirs}"
            rm = {k: v for k, v in self.dranks.get(min(r, self.stable_r), {}).items() if v}
            rt = {k: v for k, v in other.dranks.get(min(r, other.stable_r), {}).items() if v}
            if r <= min(self.stable_r, other.stable_r) and rm != rt:
                return f"page {r} differential ranks differ: {rm} vs {rt}"
        return None


def spectral_sequence(bic):
    """Pages of the vertical-filtration spectral sequence, directly.

    Verified invariants: every induced differential squares to zero and
    E_{r+1} has the homology dimensions of (E_r, d_r).
    """
    ring = bic.ring
    if not ring.is_field:
        raise ValueError("spectral sequences need field coefficients")
    cells = bic.cells
    if not cells:
        return SpectralSequence(ring, {1: {}}, {}, 1)
    pmax = max(p for (p, _) in cells)
    stable = max(pmax + 1, 1)
    tot_dim = {}
    offsets = {}
    Dmat = {}
    degrees = sorted({p + q for (p, q) in cells})
    for n in range(min(degrees), max(degrees) + 2):
        blocks = bic.total_basis(n)
        off = {}
        o = 0
        for (p, q, d) in blocks:
            off[p] = o
            o += d
        offsets[n] = off
        tot_dim[n] = o
        Dmat[n] = bic.total_matrix(n)

    def colrange(n, p_from):
        """Global T^n coordinates in columns >= p_from."""
        out = []
        for (p, q, d) in bic.total_basis(n):
            if p >= p_from:
                o = offsets[n][p]
                out.extend(range(o, o + d))
        return out

    zcache = {}

    def Z(r, p, q):
        """Basis of {x in F^p, T^{p+q} : D x in F^{p+r}} in T^n coordinates."""
        key = (r, p, q)
        if key in zcache:
            return zcache[key]
        n = p + q
        if n not in tot_dim:
            zcache[key] = []
            return []
        # F^p is everything for p <= 0 (first quadrant)
        src = colrange(n, max(p, 0))
        if not src:
            zcache[key] = []
            return []
        allowed = set(colrange(n + 1, p + r))
        bad_rows = [i for i in range(tot_dim.get(n + 1, 0)) if i not in allowed]
        M = submatrix(Dmat[n], bad_rows, src)
        vecs = []
        for v in kernel_basis(M):
            vecs.append({src[i]: x for i, x in v.items()})
        zcache[key] = vecs
        return vecs

    pages = {}
    dranks = {}
    reps_store = {}
    denom_store = {}
    for r in range(1, stable + 1):
        page = {}
        for (p, q) in sorted(cells):
            zr = Z(r, p, q)
            denom = RowSpace(ring, tot_dim[p + q])
            for v in Z(r - 1, p + 1, q - 1):
                denom.insert(v)
            for v in Z(r - 1, p - r + 1, q + r - 2):
                denom.insert(Dmat[p + q - 1].apply(v))
            denom_store[(r, p, q)] = denom.basis()
            reps = []
            for z in zr:
                if denom.insert(z):
                    reps.append(z)
            if reps:
                page[(p, q)] = len(reps)
            reps_store[(r, p, q)] = reps
        pages[r] = page
        ranks_r = {}
        dmats_r = {}
        classifiers = {}
        for (p, q) in page:
            tkey = (r, p + r, q - r + 1)
            tdenom = denom_store.get(tkey)
            if tdenom is None:
                continue
            treps = reps_store[tkey]
            cls = classifiers.get(tkey)
            if cls is None:
                cls = _TaggedClassifier(ring, tot_dim[p + q + 1], tdenom, treps)
                classifiers[tkey] = cls
            cols = [
                cls.classify(Dmat[p + q].apply(z)) for z in reps_store[(r, p, q)]
            ]
            M = SparseMatrix.from_columns(ring, cols, len(treps))
            dmats_r[(p, q)] = M
            rk = rank(M)
            if rk:
                ranks_r[(p, q)] = rk
        # the induced differential squares to zero on every page
        for (p, q), M1 in dmats_r.items():
            M2 = dmats_r.get((p + r, q - r + 1))
            if M2 is not None and not M2.mul(M1).is_zero():
                raise AssertionError(f"page {r} differential fails d^2 = 0 at {(p, q)}")
        dranks[r] = ranks_r
    out = SpectralSequence(ring, pages, {r: v for r, v in dranks.items() if v}, stable)
    _verify_page_consistency(out)
    return out


class _TaggedClassifier:
    """Row space of denominator + representatives with coefficient tags.

    Classifying a vector that lies in the span returns its coordinates over
    the representatives (modulo the denominator) in one reduction.
    """

    def __init__(self, ring, ambient, denom_basis, reps):
        self.ring = ring
        self.ambient = ambient
        self.nreps = len(reps)
        self.space = RowSpace(ring, ambient + len(reps))
        for v in denom_basis:
            self.space.insert(v)
        for i, z in enumerate(reps):
            tagged = dict(z)
            tagged[ambient + i] = ring.one()
            self.space.insert(tagged)

    def classify(self, vec):
        residue = self.space.reduce(dict(vec))
        if any(k < self.ambient for k in residue):
            raise AssertionError("vector to classify lies outside the span")
        return {
            k - self.ambient: self.ring.neg(v) for k, v in residue.items()
        }


def _verify_page_consistency(ss):
    for r in range(1, ss.stable_r):
        keys = set(ss.pages[r]) | set(ss.pages[r + 1])
        for key in keys:
            p, q = key
            here = ss.pages[r].get(key, 0)
            nxt = here - ss.drank(r, p, q) - ss.drank(r, p - r, q + r - 1)
            if nxt != ss.pages[r + 1].get(key, 0):
                raise AssertionError(
                    f"page consistency fails at r={r}, (p,q)={key}: "
                    f"{ss.pages[r + 1].get(key, 0)} != {here} "
                    f"- {ss.drank(r, p, q)} - {ss.drank(r, p - r, q + r - 1)}"
                )


# ---------------------------------------------------------------------------
# d_i operators for graph complexes over a DG algebra


class GraphDOperators:
    """The d_i on E_1 = C_A(G), via the tensor-extended column reduction."""

    def __init__(self, dga, graph, red=None, imax=None):
        self.dga = dga
        self.graph = graph
        self.ring = dga.ring
        K, gb = algebra_complex(dga)
        if red is None:
            red = reduce_to_cohomology(K)
        self.red = red
        self.gb = gb
        self.A = induced_algebra(dga, red, gb)
        self.CA = GraphComplex(self.A, graph)
        self.Cbig = GraphComplex(dga, graph)
        self.imax = graph.num_edges if imax is None else imax
        self._gf_cache = {}
        self._h_cache = {}
        self._f_cache = {}
        self._dmats = {}
        self._delta_cache = {}
        self._hgen_cache = {}

    # per-slot maps on global sparse vectors over the DG algebra's basis
    def _h_vec(self, idx):
        if idx not in self._h_cache:
            self._h_cache[idx] = apply_graded(
                self.red.h, self.gb, self.gb, {idx: self.ring.one()}
            )
        return self._h_cache[idx]

    def _gf_vec(self, idx):
        if idx not in self._gf_cache:
            gf = self.red.g.compose(self.red.f)
            self._gf_cache[idx] = apply_graded(
                gf, self.gb, self.gb, {idx: self.ring.one()}
            )
        return self._gf_cache[idx]

    def _f_vec(self, idx):
        if idx not in self._f_cache:
            gbL = GradedBasis(self.A.degrees)
            out = {}
            for deg, local in self.gb.split({idx: self.ring.one()}).items():
                img = self.red.f.apply(deg, local)
                for k, v in gbL.join(deg, img).items():
                    out[k] = v
            self._f_cache[idx] = out
        return self._f_cache[idx]

    def g_gen(self, gen):
        """Lift an E_1 generator (s, A-tuple) into the big complex."""
        s, t = gen
        ring = self.ring
        out = {(s, ()): ring.one()}
        for a in t:
            rep = self.A.class_reps[a]
            new = {}
            for (s0, tup), c in out.items():
                for idx, v in rep.items():
                    new[(s0, tup + (idx,))] = ring.mul(c, v)
            out = new
        return out

    def h_gen(self, gen):
        """Column homotopy on a big generator, with all signs."""
        s, t = gen
        ring = self.ring
        sign_s = -1 if len(s) % 2 else 1
        out = {}
        par = 0
        for i in range(len(t)):
            hv = self._h_vec(t[i])
            if hv:
                coeff = ring.from_int(-sign_s if par % 2 else sign_s)
                # (gf) on slots before i, h at slot i, identity after
                partial = {(): coeff}
                ok = True
                for j in range(i):
                    gfv = self._gf_vec(t[j])
                    if not gfv:
                        ok = False
                        break
                    new = {}
                    for tup, c in partial.items():
                        for idx, v in gfv.items():
                            new[tup + (idx,)] = ring.mul(c, v)
                    partial = new
                if not ok:
                    par += self.dga.deg(t[i])
                    continue
                new = {}
                for tup, c in partial.items():
                    for idx, v in hv.items():
                        new[tup + (idx,)] = ring.mul(c, v)
                partial = new
                tail = t[i + 1 :]
                for tup, c in partial.items():
                    key = (s, tup + tail)
                    vec_axpy(ring, out, c, {key: ring.one()})
            par += self.dga.deg(t[i])
        return out

    def f_gen(self, gen):
        """Project a big generator to E_1 coordinates (A-tuples)."""
        s, t = gen
        ring = self.ring
        out = {(s, ()): ring.one()}
        for idx in t:
            fv = self._f_vec(idx)
            if not fv:
                return {}
            new = {}
            for (s0, tup), c in out.items():
                for a, v in fv.items():
                    new[(s0, tup + (a,))] = ring.mul(c, v)
            out = new
        return out

    def _apply_linear(self, fn, vec):
        ring = self.ring
        out = {}
        for gen, c in vec.items():
            vec_axpy(ring, out, c, fn(gen))
        return out

    def _delta_cached(self, gen):
        v = self._delta_cache.get(gen)
        if v is None:
            v = self.Cbig.delta_of_gen(gen)
            self._delta_cache[gen] = v
        return v

    def _h_gen_cached(self, gen):
        v = self._hgen_cache.get(gen)
        if v is None:
            v = self.h_gen(gen)
            self._hgen_cache[gen] = v
        return v

    def d_matrix(self, i, p):
        """d_i from column p of E_1 to column p + i."""
        key = (i, p)
        if key in self._dmats:
            return self._dmats[key]
        ring = self.ring
        src = self.CA.gens(p)
        tgt_index = self.CA.gen_index(p + i)
        sign = ring.from_int(-1 if (i - 1) % 2 else 1)
        ent = {}
        for jcol, gen in enumerate(src):
            v = self.g_gen(gen)
            v = self._apply_linear(self._delta_cached, v)
            for _ in range(i - 1):
                v = self._apply_linear(self._h_gen_cached, v)
                v = self._apply_linear(self._delta_cached, v)
            v = self._apply_linear(self.f_gen, v)
            for g2, c in v.items():
                ent[(tgt_index[g2], jcol)] = ring.mul(sign, c)
        M = SparseMatrix(ring, len(tgt_index), len(src), ent)
        self._dmats[key] = M
        return M

    # the uniform interface consumed by ss_via_perturbation
    def dims(self):
        out = {}
        for p in range(self.CA.num_columns()):
            for gen in self.CA.gens(p):
                key = (p, self.CA.qdeg(gen))
                out[key] = out.get(key, 0) + 1
        return out

    def block(self, i, p, q):
        """d_i block E_1^{p,q} -> E_1^{p+i, q+1-i}."""
        if i < 1 or i > self.imax or p + i > self.graph.num_edges:
            rows = len(self.CA.block_indices(q + 1 - i, p + i)) if p + i <= self.graph.num_edges else 0
            return SparseMatrix.zero(self.ring, rows, len(self.CA.block_indices(q, p)))
        rows = self.CA.block_indices(q + 1 - i, p + i)
        cols = self.CA.block_indices(q, p)
        return submatrix(self.d_matrix(i, p), rows, cols)

    def p_max(self):
        return self.graph.num_edges


class BicomplexDOperators:
    """Generic d_i for any bicomplex: reduce each column, then the series."""

    def __init__(self, bic):
        self.bic = bic
        self.ring = bic.ring
        self.columns = {}
        self.reductions = {}
        pmax = max((p for (p, _) in bic.cells), default=0)
        self._pmax = pmax
        for p in range(pmax + 1):
            dims = {q: bic.dim(p, q) for q in bic.q_range() if bic.dim(p, q)}
            diff = {q: bic.vmat(p, q) for q in dims}
            col = FiniteComplex(self.ring, dims, {q: M for q, M in diff.items() if M.entries})
            self.columns[p] = col
            self.reductions[p] = reduce_to_cohomology(col)
        self._dims = {}
        for p, red in self.reductions.items():
            for q, d in red.small.dims.items():
                self._dims[(p, q)] = d

    def dims(self):
        return dict(self._dims)

    def p_max(self):
        return self._pmax

    def block(self, i, p, q):
        ring = self.ring
        rows = self._dims.get((p + i, q + 1 - i), 0)
        cols = self._dims.get((p, q), 0)
        if i < 1 or rows == 0 or cols == 0:
            return SparseMatrix.zero(ring, rows, cols)
        M = self.reductions[p].g.mat(q)
        pp, qq = p, q
        M = self.bic.hmat(pp, qq).mul(M)
        pp += 1
        for _ in range(i - 1):
            M = self.reductions[pp].h.mat(qq).mul(M)
            qq -= 1
            M = self.bic.hmat(pp, qq).mul(M)
            pp += 1
        M = self.reductions[pp].f.mat(qq).mul(M)
        sign = ring.from_int(-1 if (i - 1) % 2 else 1)
        return M.scale(sign)


def d_operators(dga, graph, red=None):
    """The tensor-extension-route d_i for C_dga(G); see GraphDOperators."""
    return GraphDOperators(dga, graph, red=red)


def graph_bpl_crosscheck(dops):
    """Run the BPL on (Tot C_dga(G), d_vert) perturbed by delta and compare.

    The transferred differential delta_L on the total E_1 must decompose by
    column shift into exactly the d_i matrices.  Returns None or a message.
    """
    ring = dops.ring
    Cbig, CA = dops.Cbig, dops.CA

    def total_basis(X, m):
        out = []
        for p in range(X.num_columns()):
            for k, gen in enumerate(X.gens(p)):
                if p + X.qdeg(gen) == m:
                    out.append((p, k))
        return out

    degrees = Cbig.total_degrees()
    big_basis = {m: total_basis(Cbig, m) for m in range(min(degrees), max(degrees) + 2)}
    big_pos = {
        m: {g: i for i, g in enumerate(basis)} for m, basis in big_basis.items()
    }
    small_basis = {m: total_basis(CA, m) for m in big_basis}
    small_pos = {
        m: {g: i for i, g in enumerate(basis)} for m, basis in small_basis.items()
    }
    vert_mats = {}
    delta_mats = {}
    f_mats = {}
    h_mats = {}
    g_mats = {}
    for m, basis in big_basis.items():
        vent, dent, fent, hent = {}, {}, {}, {}
        for j, (p, k) in enumerate(basis):
            gen = Cbig.gens(p)[k]
            idx_same = Cbig.gen_index(p)
            for g2, v in Cbig.d_of_gen(gen).items():
                vent[(big_pos[m + 1][(p, idx_same[g2])], j)] = v
            idx_next = Cbig.gen_index(p + 1)
            for g2, v in Cbig.delta_of_gen(gen).items():
                dent[(big_pos[m + 1][(p + 1, idx_next[g2])], j)] = v
            sidx = CA.gen_index(p)
            for g2, v in dops.f_gen(gen).items():
                fent[(small_pos[m][(p, sidx[g2])], j)] = v
            bidx = Cbig.gen_index(p)
            for g2, v in dops.h_gen(gen).items():
                hent[(big_pos[m - 1][(p, bidx[g2])], j)] = v
        n_next = len(big_basis.get(m + 1, []))
        n_prev = len(big_basis.get(m - 1, []))
        vert_mats[m] = SparseMatrix(ring, n_next, len(basis), vent)
        delta_mats[m] = SparseMatrix(ring, n_next, len(basis), dent)
        f_mats[m] = SparseMatrix(ring, len(small_basis[m]), len(basis), fent)
        h_mats[m] = SparseMatrix(ring, n_prev, len(basis), hent)
    for m, basis in small_basis.items():
        gent = {}
        for j, (p, k) in enumerate(basis):
            gen = CA.gens(p)[k]
            bidx = Cbig.gen_index(p)
            for g2, v in dops.g_gen(gen).items():
                gent[(big_pos[m][(p, bidx[g2])], j)] = v
        g_mats[m] = SparseMatrix(ring, len(big_basis[m]), len(basis), gent)
    from .perturb import FiniteComplex, GradedMap, Reduction, bpl

    K = FiniteComplex(
        ring,
        {m: len(b) for m, b in big_basis.items()},
        {m: M for m, M in vert_mats.items() if M.entries},
    )
    L = FiniteComplex(ring, {m: len(b) for m, b in small_basis.items()}, {})
    red = Reduction(
        K,
        L,
        GradedMap(K, L, 0, {m: M for m, M in f_mats.items() if M.entries}),
        GradedMap(L, K, 0, {m: M for m, M in g_mats.items() if M.entries}),
        GradedMap(K, K, -1, {m: M for m, M in h_mats.items() if M.entries}),
    )
    problem = red.verify()
    if problem is not None:
        return f"column reduction invalid: {problem}"
    delta = GradedMap(K, K, 1, {m: M for m, M in delta_mats.items() if M.entries})
    filt = {m: [p for (p, _) in basis] for m, basis in big_basis.items()}
    res = bpl(red, delta, filt)
    for m, basis in small_basis.items():
        DL = res.delta_small.mat(m)
        for j, (p, k) in enumerate(basis):
            got = DL.column(j)
            expect = {}
            for i in range(1, dops.imax + 1):
                if p + i > dops.graph.num_edges:
                    break
                col = dops.d_matrix(i, p).column(k)
                for r, v in col.items():
                    expect[small_pos[m + 1][(p + i, r)]] = v
            if got != expect:
                return f"delta_L block mismatch at m={m}, gen {(p, k)}"
    return None


# ---------------------------------------------------------------------------
# pages from the d_i alone


def ss_via_perturbation(dops):
    """Pages from the d_i by the representative/boundary linear systems."""
    ring = dops.ring if hasattr(dops, "ring") else dops.bic.ring
    dims = dops.dims()
    pmax = dops.p_max()
    stable = max(pmax + 1, 1)
    pages = {1: dict(dims)}
    dranks = {}
    rank1 = {}
    for (p, q) in dims:
        r = rank(dops.block(1, p, q))
        if r:
            rank1[(p, q)] = r
    if rank1:
        dranks[1] = rank1

    zspaces = {}
    bspaces = {}

    def zspace(i, p, q):
        key = (i, p, q)
        if key in zspaces:
            return zspaces[key]
        dim_x = dims.get((p, q), 0)
        if dim_x == 0:
            zspaces[key] = row_space(ring, [], 0)
            return zspaces[key]
        var_blocks = [(p, q)] + [(p + j - 1, q + 1 - j) for j in range(2, i)]
        eq_blocks = [(p + k, q + 1 - k) for k in range(1, i)]
        M, var_off, _ = _block_system(dops, dims, var_blocks, eq_blocks, shift=0)
        vecs = []
        for v in kernel_basis(M):
            x_part = {c: val for c, val in v.items() if c < dim_x}
            vecs.append(x_part)
        sp = row_space(ring, vecs, dim_x)
        zspaces[key] = sp
        return sp

    def bspace(i, p, q):
        key = (i, p, q)
        if key in bspaces:
            return bspaces[key]
        dim_x = dims.get((p, q), 0)
        sp = RowSpace(ring, dim_x)
        if dim_x == 0:
            bspaces[key] = sp
            return sp
        var_blocks = [(p - i + j - 1, q + i - j) for j in range(2, i + 1)]
        eq_blocks = [(p - i + 1 + k, q + i - k - 1) for k in range(1, i - 1)]
        M, var_off, var_dims = _block_system(dops, dims, var_blocks, eq_blocks, shift=0)
        if M.cols == 0:
            bspaces[key] = sp
            return sp
        for v in kernel_basis(M):
            img = {}
            for j_idx, (bp, bq) in enumerate(var_blocks):
                off = var_off[j_idx]
                d_here = var_dims[j_idx]
                local = {
                    c - off: val for c, val in v.items() if off <= c < off + d_here
                }
                if not local:
                    continue
                op = dops.block(i + 1 - (j_idx + 2), bp, bq)
                vec_axpy(ring, img, ring.one(), {k: val for k, val in op.apply(local).items()})
            sp.insert(img)
        bspaces[key] = sp
        return sp

    for r in range(2, stable + 1):
        page = {}
        reps_store = {}
        for (p, q) in sorted(dims):
            zsp = zspace(r, p, q)
            bsp = bspace(r, p, q)
            for v in bsp.basis():
                if not zsp.contains(v):
                    raise AssertionError(
                        f"boundary space escapes cycle space at r={r}, ({p},{q})"
                    )
            denom = RowSpace(ring, dims[(p, q)])
            for v in bsp.basis():
                denom.insert(v)
            reps = []
            for v in zsp.basis():
                if denom.insert(v):
                    reps.append(v)
            if reps:
                page[(p, q)] = len(reps)
            reps_store[(p, q)] = reps
        pages[r] = page
        ranks_r = {}
        for (p, q), reps in reps_store.items():
            if not reps:
                continue
            tgt = (p + r, q - r + 1)
            if dims.get(tgt, 0) == 0:
                continue
            residues = RowSpace(ring, dims[tgt])
            for v in bspace(r, *tgt).basis():
                residues.insert(v)
            count = 0
            for x in reps:
                val = _partial_value(dops, dims, ring, r, p, q, x)
                if residues.insert(val):
                    count += 1
            if count:
                ranks_r[(p, q)] = count
        if ranks_r:
            dranks[r] = ranks_r
    return SpectralSequence(ring, pages, dranks, stable)


def _block_system(dops, dims, var_blocks, eq_blocks, shift):
    """Assemble one of the staircase systems as a sparse matrix.

    Equation k_idx gets the term d_{k_idx + 1 - j_idx - shift} applied to
    variable block j_idx; shift 0 covers the cycle and boundary systems,
    shift 1 the tail system where the x variable is pinned.
    """
    ring = dops.ring if hasattr(dops, "ring") else dops.bic.ring
    var_dims = [dims.get(b, 0) for b in var_blocks]
    var_off = []
    o = 0
    for d in var_dims:
        var_off.append(o)
        o += d
    ncols = o
    eq_dims = [dims.get(b, 0) for b in eq_blocks]
    eq_off = []
    o = 0
    for d in eq_dims:
        eq_off.append(o)
        o += d
    nrows = o
    ent = {}
    for k_idx in range(len(eq_blocks)):
        for j_idx, vb in enumerate(var_blocks):
            idx = k_idx + 1 - j_idx - shift
            if idx < 1:
                continue
            op = dops.block(idx, vb[0], vb[1])
            assert op.rows == eq_dims[k_idx] and op.cols == var_dims[j_idx]
            for (r0, c0), v in op.entries.items():
                ent[(eq_off[k_idx] + r0, var_off[j_idx] + c0)] = v
    return SparseMatrix(ring, nrows, ncols, ent), var_off, var_dims


def _partial_value(dops, dims, ring, i, p, q, x):
    """Representative of the page-i differential on x: solve for the tail."""
    var_blocks = [(p + j - 1, q + 1 - j) for j in range(2, i)]
    eq_blocks = [(p + k, q + 1 - k) for k in range(1, i)]
    M, var_off, var_dims = _block_system(dops, dims, var_blocks, eq_blocks, shift=1)
    # right-hand side: equations with x fixed: -sum_k d_k(x) rows
    rhs = {}
    for k_idx, eb in enumerate(eq_blocks):
        k = k_idx + 1
        op = dops.block(k, p, q)
        img = op.apply(x)
        off = sum(dims.get(b, 0) for b in eq_blocks[:k_idx])
        for r0, v in img.items():
            rhs[off + r0] = ring.neg(v)
    tail = solve(M, rhs) if M.cols else ({} if not rhs else None)
    if tail is None:
        raise AssertionError("representative system has no solution")
    val = dict(dops.block(i, p, q).apply(x))
    for j_idx, vb in enumerate(var_blocks):
        off = var_off[j_idx]
        d_here = var_dims[j_idx]
        local = {c - off: v for c, v in tail.items() if off <= c < off + d_here}
        if local:
            op = dops.block(i - 1 - j_idx, vb[0], vb[1])
            vec_axpy(ring, val, ring.one(), {k: v for k, v in op.apply(local).items()})
    return val


# ---------------------------------------------------------------------------
# the three graph-specific checks


def locality_check(dops):
    """Support and factorization of every d_i entry for i >= 2.

    Each nonzero block C_i^{s < t} must have t \\ s of size i projecting to an
    i-edge tree in G/s, act as the identity on untouched tensor slots, and
    factor through an operator on the touched slots with the Koszul sign of
    pulling them together (plus the sign of the odd operator passing the
    spectators in front).  d_1 is covered by the stronger identity d_1 =
    delta of C_A(G), checked elsewhere: its internal-edge terms are identity
    maps whose t \\ s projects to a loop, which the i >= 2 statement excludes.
    """
    CA = dops.CA
    A = dops.A
    ring = dops.ring
    g = dops.graph
    E = g.num_edges
    for i in range(2, dops.imax + 1):
        for p in range(0, E - i + 1):
            M = dops.d_matrix(i, p)
            blocks = {}
            src = CA.gens(p)
            tgt = CA.gens(p + i)
            for (r, c), v in M.entries.items():
                s, t_src = src[c]
                t, t_tgt = tgt[r]
                blocks.setdefault((s, t), {})[(r, c)] = v
            for (s, t), entries in blocks.items():
                verdict = _check_block(dops, i, s, t, entries)
                if verdict is not None:
                    return {
                        "check": "locality",
                        "status": "fail",
                        "witness": {"i": i, "s": list(s), "t": list(t), "detail": verdict},
                    }
    return {"check": "locality", "status": "pass", "witness": {}}


def _tree_condition(g, s, t):
    """Does t \\ s have i elements projecting to a tree in G/s?"""
    u = tuple(b for b in t if b not in set(s))
    small, lab, edge_map = g.contract_subset(s)
    touched = set()
    for b in u:
        (x, y) = small.edges[edge_map[b]]
        if x == y:
            return None  # loop: never a tree edge
        touched.add(x)
        touched.add(y)
    if len(touched) != len(u) + 1:
        return None
    sub = small.components([edge_map[b] for b in u])
    comps = {sub.label[v - 1] for v in touched}
    if len(comps) != 1:
        return None
    return tuple(sorted(touched))


def _check_block(dops, i, s, t, entries):
    CA = dops.CA
    A = dops.A
    ring = dops.ring
    g = dops.graph
    touched = _tree_condition(g, s, t)
    if touched is None:
        return f"nonzero entries outside the tree condition: {sorted(entries)[:3]}"
    lab_s = CA.labeling(s)
    lab_t = CA.labeling(t)
    l = lab_s.count
    touched_slots = sorted(touched)  # components of [G:s] hit by t \\ s
    merged_slot = lab_t.label[lab_s.min_vertex(touched_slots[0]) - 1]
    untouched = [c for c in range(1, l + 1) if c not in touched]
    # slot map: untouched component -> its slot in the t-labeling
    slot_of = {c: lab_t.label[lab_s.min_vertex(c) - 1] for c in untouched}
    src_index = CA.gen_index(len(s))
    tgt_index = CA.gen_index(len(t))
    src = CA.gens(len(s))
    tgt = CA.gens(len(t))
    bycol = {}
    for (r, cc), v in entries.items():
        bycol.setdefault(cc, {})[r] = v
    # extract the touched-slot operator from unit-padded tuples
    unit = 0
    core = {}
    dim = A.dim
    from itertools import product as iproduct

    for ys in iproduct(range(dim), repeat=len(touched_slots)):
        tup = [unit] * l
        for c, y in zip(touched_slots, ys):
            tup[c - 1] = y
        col = src_index[(s, tuple(tup))]
        out = {}
        for r, v in bycol.get(col, {}).items():
            tt = tgt[r][1]
            # untouched slots must carry the unit here
            for c2 in untouched:
                if tt[slot_of[c2] - 1] != unit:
                    return "unit-padded image touches a spectator slot"
            out[tt[merged_slot - 1]] = v
        if out:
            core[ys] = out
    # now verify every column against the predicted factorized form
    for jcol, (s0, tup) in enumerate(src):
        if s0 != s:
            continue
        ys = tuple(tup[c - 1] for c in touched_slots)
        expected = {}
        cvals = core.get(ys, {})
        if cvals:
            # Koszul sign of pulling the touched slots together at the
            # first touched position, spectators keeping their order
            target_seq = []
            for slot in range(1, lab_t.count + 1):
                if slot == merged_slot:
                    target_seq.extend(c - 1 for c in touched_slots)
                else:
                    src_comp = next(c for c in untouched if slot_of[c] == slot)
                    target_seq.append(src_comp - 1)
            degs = [A.deg(a) for a in tup]
            eps = koszul_sign(target_seq, degs)
            # the touched-slot operator has degree 1 - i: passing it over
            # the spectators in front costs an extra Koszul sign
            if (i - 1) % 2:
                prefix_par = sum(
                    A.deg(tup[c - 1])
                    for c in untouched
                    if slot_of[c] < merged_slot
                )
                if prefix_par % 2:
                    eps = -eps
            for val, coeff in cvals.items():
                new_t = []
                for slot in range(1, lab_t.count + 1):
                    if slot == merged_slot:
                        new_t.append(val)
                    else:
                        src_comp = next(c for c in untouched if slot_of[c] == slot)
                        new_t.append(tup[src_comp - 1])
                expected[tgt_index[(t, tuple(new_t))]] = ring.mul(
                    ring.from_int(eps), coeff
                )
        actual = bycol.get(src_index[(s0, tup)], {})
        if actual != expected:
            return (
                f"factorization fails on column {(s0, tup)}: "
                f"got {actual}, predicted {expected}"
            )
    return None


TREE_FORMULA_SIGN = {2: 1, 3: -1, 4: -1, 5: 1, 6: 1}
# empirically pinned global sign (-1)^{(n-1)(n-2)/2}; see the ledger note on
# the n = 2 base case


def tree_formula_sign(n):
    if n in TREE_FORMULA_SIGN:
        return TREE_FORMULA_SIGN[n]
    return -1 if ((n - 1) * (n - 2) // 2) % 2 else 1


def tree_formula_check(dops, ainf):
    """d_{n-1} against the signed sum of m_n over linear extensions.

    For a connected loopless tree on n vertices, evaluated on every basis
    tensor of A^{(x)n}: d_{n-1}(a_1 (x) ... (x) a_n) must equal
    sign(n) * sum_{sigma in Sigma(G)} (-1)^sigma e_t m_n(sigma-permuted args)
    with the Koszul sign of the permutation acting on graded arguments.
    """
    g = dops.graph
    n = g.n
    ring = dops.ring
    A = dops.A
    if g.has_loop() or g.num_edges != n - 1 or g.components(range(n - 1)).count != 1:
        raise ValueError("tree formula needs a connected loopless tree")
    exts = g.linear_extensions()
    eps_n = tree_formula_sign(n)
    M = dops.d_matrix(n - 1, 0)
    src = dops.CA.gens(0)
    tgt_index = dops.CA.gen_index(n - 1)
    full = tuple(range(n - 1))
    from itertools import product as iproduct

    for args in iproduct(range(A.dim), repeat=n):
        jcol = dops.CA.gen_index(0)[((), args)]
        lhs = M.column(jcol)
        rhs = {}
        degs = [A.deg(a) for a in args]
        for sigma in exts:
            perm_sign = _perm_sign(sigma)
            seq = [v - 1 for v in sigma]
            kos = koszul_sign(seq, degs)
            permuted = tuple(args[v - 1] for v in sigma)
            val = ainf.m_basis(permuted)
            coeff = ring.from_int(eps_n * perm_sign * kos)
            for a_out, v in val.items():
                key = tgt_index[(full, (a_out,))]
                vec_axpy(ring, rhs, ring.mul(coeff, v), {key: ring.one()})
        if lhs != rhs:
            return {
                "check": "tree-formula",
                "status": "fail",
                "witness": {
                    "args": [A.names[a] for a in args],
                    "lhs": {str(k): str(v) for k, v in lhs.items()},
                    "rhs": {str(k): str(v) for k, v in rhs.items()},
                },
            }
    return {"check": "tree-formula", "status": "pass", "witness": {"n": n}}


def _perm_sign(sigma):
    sign = 1
    for i in range(len(sigma)):
        for j in range(i + 1, len(sigma)):
            if sigma[i] > sigma[j]:
                sign = -sign
    return sign


def degeneration_check(ss, graph, formal=False):
    """No differentials from page k+1 on, k = max subtree edge count."""
    k = graph.max_subtree_edges()
    bound = 2 if formal else k + 1
    for t in range(bound, ss.stable_r + 1):
        ranks = {key: v for key, v in ss.dranks.get(t, {}).items() if v}
        if ranks:
            (p, q), _ = sorted(ranks.items())[0]
            return {
                "check": "degeneration",
                "status": "fail",
                "witness": {"t": t, "p": p, "q": q, "bound": bound},
            }
    return {
        "check": "degeneration",
        "status": "pass",
        "witness": {"bound": bound, "stable": ss.stable_r},
    }
