"""First-quadrant bicomplexes with anticommuting differentials.

Cells live at (p, q) with a horizontal differential (p, q) -> (p+1, q) and a
vertical one (p, q) -> (p, q+1).  Callers hand in matrices that already
anticommute (the vertical map carries the (-1)^p twist), so the total
differential is plain D = horiz + vert.
"""

from .coeff import CohomologySpace, SparseMatrix, rank


class Bicomplex:
    def __init__(self, ring, cells, horiz, vert):
        self.ring = ring
        self.cells = {k: v for k, v in cells.items() if v}
        self.horiz = horiz
        self.vert = vert

    def dim(self, p, q):
        return self.cells.get((p, q), 0)

    def hmat(self, p, q):
        M = self.horiz.get((p, q))
        if M is None:
            M = SparseMatrix.zero(self.ring, self.dim(p + 1, q), self.dim(p, q))
        return M

    def vmat(self, p, q):
        M = self.vert.get((p, q))
        if M is None:
            M = SparseMatrix.zero(self.ring, self.dim(p, q + 1), self.dim(p, q))
        return M

    def p_range(self):
        return range(0, 1 + max((p for (p, _) in self.cells), default=-1))

    def q_range(self):
        return range(0, 1 + max((q for (_, q) in self.cells), default=-1))

    def check(self):
        """None when both differentials square to zero and anticommute."""
        for (p, q) in self.cells:
            if not self.hmat(p + 1, q).mul(self.hmat(p, q)).is_zero():
                return f"horizontal^2 != 0 at ({p},{q})"
            if not self.vmat(p, q + 1).mul(self.vmat(p, q)).is_zero():
                return f"vertical^2 != 0 at ({p},{q})"
            anti = self.vmat(p + 1, q).mul(self.hmat(p, q)).add(
                self.hmat(p, q + 1).mul(self.vmat(p, q))
            )
            if not anti.is_zero():
                return f"differentials fail to anticommute at ({p},{q})"
        return None

    # -- totalization -------------------------------------------------------

    def total_basis(self, m):
        """Cells of total degree m as (p, q, offset-range), p ascending."""
        out = []
        for p in sorted({p for (p, _) in self.cells}):
            q = m - p
            d = self.dim(p, q)
            if d:
                out.append((p, q, d))
        return out

    def total_degrees(self):
        return sorted({p + q for (p, q) in self.cells})

    def total_matrix(self, m):
        src = self.total_basis(m)
        tgt = self.total_basis(m + 1)
        src_off = {}
        off = 0
        for (p, q, d) in src:
            src_off[(p, q)] = off
            off += d
        ncols = off
        tgt_off = {}
        off = 0
        for (p, q, d) in tgt:
            tgt_off[(p, q)] = off
            off += d
        nrows = off
        ent = {}
        for (p, q, d) in src:
            co = src_off[(p, q)]
            H = self.hmat(p, q)
            if (p + 1, q) in tgt_off:
                ro = tgt_off[(p + 1, q)]
                for (r, c), v in H.entries.items():
                    ent[(ro + r, co + c)] = v
            V = self.vmat(p, q)
            if (p, q + 1) in tgt_off:
                ro = tgt_off[(p, q + 1)]
                for (r, c), v in V.entries.items():
                    ent[(ro + r, co + c)] = v
        return SparseMatrix(self.ring, nrows, ncols, ent)

    def total_cohomology(self):
        """{total degree: rank} of (Tot, horiz + vert) over a field."""
        if not self.ring.is_field:
            raise ValueError("total cohomology needs field coefficients")
        degs = self.total_degrees()
        ranks = {m: rank(self.total_matrix(m)) for m in degs}
        out = {}
        for m in degs:
            dim = sum(d for (_, _, d) in self.total_basis(m))
            r = dim - ranks.get(m, 0) - ranks.get(m - 1, 0)
            if r:
                out[m] = r
        return out

    # -- first page ---------------------------------------------------------

    def e1_page(self):
        """(dims, d1_ranks): column cohomology and induced-map ranks."""
        if not self.ring.is_field:
            raise ValueError("E_1 computation needs field coefficients")
        spaces = {}
        for p in self.p_range():
            for q in self.q_range():
                if self.dim(p, q) or self.dim(p, q - 1):
                    spaces[(p, q)] = CohomologySpace(
                        self.ring,
                        self.dim(p, q),
                        self.vmat(p, q - 1) if q > 0 else None,
                        self.vmat(p, q),
                    )
        dims = {k: sp.dim for k, sp in spaces.items() if sp.dim}
        d1_ranks = {}
        for (p, q), sp in spaces.items():
            tgt = spaces.get((p + 1, q))
            if sp.dim == 0 or tgt is None or tgt.dim == 0:
                continue
            H = self.hmat(p, q)
            cols = [tgt.classify(H.apply(rep)) for rep in sp.reps]
            M = SparseMatrix.from_columns(self.ring, cols, tgt.dim)
            r = rank(M)
            if r:
                d1_ranks[(p, q)] = r
        return dims, d1_ranks
