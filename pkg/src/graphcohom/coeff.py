"""Exact scalars and sparse linear algebra over Q, F_p and Z.

Scalars are plain Python objects: `Fraction` over Q, ints in [0, p) over F_p,
ints over Z.  A `Ring` object carries the arithmetic; everything downstream
is generic in the ring.  Matrices and vectors are sparse: a vector is a
{index: scalar} dict, a matrix stores {(row, col): scalar}.

All values are immutable by convention (nothing here mutates its inputs), so
objects can be shared freely.  Field elimination is delegated to
``graphcohom.kernels`` which picks the compiled or the pure backend; both
return the (unique) reduced row echelon form, so results are reproducible.
"""

from fractions import Fraction
from math import gcd

from . import kernels


class Ring:
    """Arithmetic for one coefficient ring.  Scalars are plain objects."""

    name = "?"
    is_field = False
    char = 0

    def zero(self):
        raise NotImplementedError

    def one(self):
        raise NotImplementedError

    def from_int(self, n):
        raise NotImplementedError

    def parse(self, text):
        """Parse a string like '3', '-1' or '2/5'."""
        raise NotImplementedError

    def add(self, a, b):
        raise NotImplementedError

    def neg(self, a):
        raise NotImplementedError

    def sub(self, a, b):
        return self.add(a, self.neg(b))

    def mul(self, a, b):
        raise NotImplementedError

    def is_zero(self, a):
        return a == self.zero()

    def to_str(self, a):
        return str(a)

    def __repr__(self):
        return self.name

    def __eq__(self, other):
        return type(self) is type(other) and self.name == other.name

    def __hash__(self):
        return hash((type(self).__name__, self.name))


class RationalField(Ring):
    name = "Q"
    is_field = True
    char = 0

    def zero(self):
        return Fraction(0)

    def one(self):
        return Fraction(1)

    def from_int(self, n):
        return Fraction(n)

    def parse(self, text):
        return Fraction(text)

    def add(self, a, b):
        return a + b

    def neg(self, a):
        return -a

    def mul(self, a, b):
        return a * b

    def inv(self, a):
        if a == 0:
            raise ZeroDivisionError("inverse of 0")
        return 1 / Fraction(a)

    def div(self, a, b):
        return Fraction(a) / b


class PrimeField(Ring):
    is_field = True

    def __init__(self, p):
        if p < 2 or any(p % q == 0 for q in range(2, int(p**0.5) + 1)):
            raise ValueError(f"{p} is not prime")
        self.p = p
        self.name = f"Fp:{p}"
        self.char = p

    def zero(self):
        return 0

    def one(self):
        return 1

    def from_int(self, n):
        return n % self.p

    def parse(self, text):
        f = Fraction(text)
        num = f.numerator % self.p
        den = f.denominator % self.p
        if den == 0:
            raise ZeroDivisionError(f"{text} has no image in F_{self.p}")
        return (num * pow(den, self.p - 2, self.p)) % self.p

    def add(self, a, b):
        return (a + b) % self.p

    def neg(self, a):
        return (-a) % self.p

    def mul(self, a, b):
        return (a * b) % self.p

    def inv(self, a):
        if a % self.p == 0:
            raise ZeroDivisionError("inverse of 0")
        return pow(a, self.p - 2, self.p)

    def div(self, a, b):
        return (a * self.inv(b)) % self.p

    def is_zero(self, a):
        return a % self.p == 0


class IntegerRing(Ring):
    name = "Z"
    is_field = False
    char = 0

    def zero(self):
        return 0

    def one(self):
        return 1

    def from_int(self, n):
        return n

    def parse(self, text):
        f = Fraction(text)
        if f.denominator != 1:
            raise ValueError(f"{text} is not an integer")
        return f.numerator

    def add(self, a, b):
        return a + b

    def neg(self, a):
        return -a

    def mul(self, a, b):
        return a * b


QQ = RationalField()
ZZ = IntegerRing()
_GF_CACHE = {}


def GF(p):
    if p not in _GF_CACHE:
        _GF_CACHE[p] = PrimeField(p)
    return _GF_CACHE[p]


def ring_from_name(name):
    """Ring from its config-file spelling: 'Q', 'Z' or 'Fp:<prime>'."""
    if name == "Q":
        return QQ
    if name == "Z":
        return ZZ
    if name.startswith("Fp:"):
        return GF(int(name[3:]))
    raise ValueError(f"unknown ring {name!r} (expected Q, Z or Fp:<prime>)")


# ---------------------------------------------------------------------------
# sparse vectors


def vec_add(ring, u, v):
    out = dict(u)
    for k, x in v.items():
        w = ring.add(out.get(k, ring.zero()), x)
        if ring.is_zero(w):
            out.pop(k, None)
        else:
            out[k] = w
    return out


def vec_scale(ring, a, u):
    if ring.is_zero(a):
        return {}
    out = {}
    for k, x in u.items():
        w = ring.mul(a, x)
        if not ring.is_zero(w):
            out[k] = w
    return out


def vec_axpy(ring, out, a, u):
    """out += a*u in place on a plain dict accumulator."""
    if ring.is_zero(a):
        return out
    for k, x in u.items():
        w = ring.add(out.get(k, ring.zero()), ring.mul(a, x))
        if ring.is_zero(w):
            out.pop(k, None)
        else:
            out[k] = w
    return out


def vec_eq(u, v):
    return u == v


# ---------------------------------------------------------------------------
# sparse matrices


class SparseMatrix:
    """Immutable sparse matrix; entries is {(row, col): nonzero scalar}."""

    __slots__ = ("ring", "rows", "cols", "entries", "_bycol", "_byrow")

    def __init__(self, ring, rows, cols, entries=None):
        self.ring = ring
        self.rows = rows
        self.cols = cols
        ent = {}
        if entries:
            for (r, c), v in entries.items():
                if not (0 <= r < rows and 0 <= c < cols):
                    raise ValueError(f"entry ({r},{c}) outside {rows}x{cols}")
                if not ring.is_zero(v):
                    ent[(r, c)] = v
        self.entries = ent
        self._bycol = None
        self._byrow = None

    @classmethod
    def zero(cls, ring, rows, cols):
        return cls(ring, rows, cols)

    @classmethod
    def identity(cls, ring, n):
        one = ring.one()
        return cls(ring, n, n, {(i, i): one for i in range(n)})

    @classmethod
    def from_rows(cls, ring, rowlists, cols=None):
        rowlists = [list(r) for r in rowlists]
        rows = len(rowlists)
        if cols is None:
            cols = len(rowlists[0]) if rowlists else 0
        ent = {}
        for i, r in enumerate(rowlists):
            if len(r) != cols:
                raise ValueError("ragged rows")
            for j, v in enumerate(r):
                v = ring.from_int(v) if isinstance(v, int) else v
                if not ring.is_zero(v):
                    ent[(i, j)] = v
        return cls(ring, rows, cols, ent)

    @classmethod
    def from_columns(cls, ring, columns, rows):
        """columns: list of {row: scalar} dicts."""
        ent = {}
        for j, col in enumerate(columns):
            for i, v in col.items():
                if not ring.is_zero(v):
                    ent[(i, j)] = v
        return cls(ring, rows, len(columns), ent)

    def column(self, j):
        return dict(self._columns().get(j, {}))

    def _columns(self):
        if self._bycol is None:
            by = {}
            for (r, c), v in self.entries.items():
                by.setdefault(c, {})[r] = v
            self._bycol = by
        return self._bycol

    def _rowdicts(self):
        if self._byrow is None:
            by = {}
            for (r, c), v in self.entries.items():
                by.setdefault(r, {})[c] = v
            self._byrow = by
        return self._byrow

    def row(self, i):
        return dict(self._rowdicts().get(i, {}))

    def apply(self, vec):
        """Matrix times sparse column vector: {col: x} -> {row: y}."""
        ring = self.ring
        cols = self._columns()
        out = {}
        for c, x in vec.items():
            col = cols.get(c)
            if col:
                vec_axpy(ring, out, x, col)
        return out

    def mul(self, other):
        if self.cols != other.rows:
            raise ValueError("shape mismatch")
        ring = self.ring
        mycols = self._columns()
        ent = {}
        for (r, c), v in other.entries.items():
            col = mycols.get(r)
            if not col:
                continue
            for i, w in col.items():
                key = (i, c)
                s = ring.add(ent.get(key, ring.zero()), ring.mul(w, v))
                if ring.is_zero(s):
                    ent.pop(key, None)
                else:
                    ent[key] = s
        return SparseMatrix(ring, self.rows, other.cols, ent)

    def __matmul__(self, other):
        return self.mul(other)

    def add(self, other):
        if (self.rows, self.cols) != (other.rows, other.cols):
            raise ValueError("shape mismatch")
        ring = self.ring
        ent = dict(self.entries)
        for k, v in other.entries.items():
            s = ring.add(ent.get(k, ring.zero()), v)
            if ring.is_zero(s):
                ent.pop(k, None)
            else:
                ent[k] = s
        return SparseMatrix(ring, self.rows, self.cols, ent)

    def scale(self, a):
        ring = self.ring
        return SparseMatrix(
            ring,
            self.rows,
            self.cols,
            {k: ring.mul(a, v) for k, v in self.entries.items()},
        )

    def neg(self):
        return self.scale(self.ring.neg(self.ring.one()))

    def sub(self, other):
        return self.add(other.neg())

    def transpose(self):
        return SparseMatrix(
            self.ring,
            self.cols,
            self.rows,
            {(c, r): v for (r, c), v in self.entries.items()},
        )

    def is_zero(self):
        return not self.entries

    def to_dense(self):
        z = self.ring.zero()
        out = [[z] * self.cols for _ in range(self.rows)]
        for (r, c), v in self.entries.items():
            out[r][c] = v
        return out

    def __eq__(self, other):
        return (
            isinstance(other, SparseMatrix)
            and self.ring == other.ring
            and (self.rows, self.cols) == (other.rows, other.cols)
            and self.entries == other.entries
        )

    def __repr__(self):
        return f"SparseMatrix({self.ring}, {self.rows}x{self.cols}, nnz={len(self.entries)})"


# ---------------------------------------------------------------------------
# field elimination (via the kernel backends)


def _rref(ring, rowdicts, ncols):
    if isinstance(ring, RationalField):
        rows = [
            {c: v if isinstance(v, Fraction) else Fraction(v) for c, v in r.items()}
            for r in rowdicts
        ]
        return kernels.rref_frac(rows, ncols)
    if isinstance(ring, PrimeField):
        return kernels.rref_mod(rowdicts, ncols, ring.p)
    raise TypeError(
        f"field elimination needs Q or F_p entries, not {ring}; "
        "pass integer matrices to smith_normal_form instead"
    )


def submatrix(M, row_indices, col_indices):
    """Submatrix on the given (ordered) row and column index lists."""
    rmap = {r: i for i, r in enumerate(row_indices)}
    cmap = {c: j for j, c in enumerate(col_indices)}
    ent = {}
    for (r, c), v in M.entries.items():
        i = rmap.get(r)
        j = cmap.get(c)
        if i is not None and j is not None:
            ent[(i, j)] = v
    return SparseMatrix(M.ring, len(row_indices), len(col_indices), ent)


def rank(M):
    """Rank of a matrix over Q or F_p, by exact elimination."""
    if M.rows == 0 or M.cols == 0:
        return 0
    pivots, _ = _rref(M.ring, list(M._rowdicts().values()), M.cols)
    return len(pivots)


def kernel_basis(M):
    """Canonical basis of ker M over a field, as {col: scalar} dicts.

    One vector per free column f, with entry 1 at f; rank + len = cols.
    """
    ring = M.ring
    pivots, rows = _rref(ring, list(M._rowdicts().values()), M.cols)
    pivset = set(pivots)
    basis = []
    one = ring.one()
    for f in range(M.cols):
        if f in pivset:
            continue
        v = {f: one}
        for pc, r in zip(pivots, rows):
            x = r.get(f)
            if x is not None:
                v[pc] = ring.neg(x)
        basis.append(v)
    return basis


NO_SOLUTION = None


def solve(M, b):
    """Any x with Mx = b over a field, or None when b is not in the image.

    Deterministic: the reduced echelon solution with free variables 0
    (leftmost-pivot convention).  ``b`` may be a dict or a sequence.
    """
    ring = M.ring
    if not isinstance(b, dict):
        b = {i: v for i, v in enumerate(b) if not ring.is_zero(v)}
    if any(not 0 <= i < M.rows for i in b):
        raise ValueError("right-hand side has wrong length")
    aug = []
    rowd = M._rowdicts()
    for i in range(M.rows):
        r = dict(rowd.get(i, {}))
        if i in b:
            r[M.cols] = b[i]
        if r:
            aug.append(r)
    pivots, rows = _rref(ring, aug, M.cols + 1)
    x = {}
    for pc, r in zip(pivots, rows):
        if pc == M.cols:
            return NO_SOLUTION
        v = r.get(M.cols)
        if v is not None:
            x[pc] = v
    return x


# ---------------------------------------------------------------------------
# row spaces, quotients, cohomology with representatives


class RowSpace:
    """A subspace of ring^n kept in reduced echelon form.

    Built incrementally; `insert` returns the residue of the vector against
    the current space (empty dict if it was already inside).  Deterministic.
    """

    def __init__(self, ring, ncols):
        self.ring = ring
        self.ncols = ncols
        self.rows = {}  # pivot col -> {col: scalar}, lead 1, mutually reduced

    @property
    def dim(self):
        return len(self.rows)

    def reduce(self, vec):
        ring = self.ring
        v = dict(vec)
        for c in sorted(self.rows.keys() & v.keys()):
            if c in v:
                vec_axpy(ring, v, ring.neg(v[c]), self.rows[c])
        return v

    def contains(self, vec):
        return not self.reduce(vec)

    def insert(self, vec):
        ring = self.ring
        v = self.reduce(vec)
        if not v:
            return {}
        c = min(v)
        inv = ring.inv(v[c])
        v = vec_scale(ring, inv, v)
        for pc in list(self.rows):
            r = self.rows[pc]
            if c in r:
                self.rows[pc] = vec_add(ring, r, vec_scale(ring, ring.neg(r[c]), v))
        self.rows[c] = v
        return v

    def basis(self):
        return [dict(self.rows[c]) for c in sorted(self.rows)]


def row_space(ring, vectors, ncols):
    sp = RowSpace(ring, ncols)
    for v in vectors:
        sp.insert(v)
    return sp


class CohomologySpace:
    """ker(d_out)/im(d_in) over a field, with chosen representatives.

    Representatives are picked deterministically from the canonical kernel
    basis; `classify` writes a cocycle as coordinates over them.
    """

    def __init__(self, ring, dim, d_in, d_out):
        self.ring = ring
        self.ambient_dim = dim
        self.boundaries = RowSpace(ring, dim)
        if d_in is not None:
            for j in range(d_in.cols):
                self.boundaries.insert(d_in.column(j))
        if d_out is not None:
            cocycles = kernel_basis(d_out)
        else:
            one = ring.one()
            cocycles = [{i: one} for i in range(dim)]
        self.cocycles = row_space(ring, cocycles, dim)
        span = RowSpace(ring, dim)
        for v in self.boundaries.basis():
            span.insert(v)
        reps = []
        for z in cocycles:
            if span.insert(z):
                reps.append(z)
        self.reps = reps

    @property
    def dim(self):
        return len(self.reps)

    def classify(self, vec):
        """Coordinates of a cocycle's class over the representatives."""
        ring = self.ring
        if not self.cocycles.contains(vec):
            raise ValueError("not a cocycle")
        cols = list(self.reps) + self.boundaries.basis()
        M = SparseMatrix.from_columns(ring, cols, self.ambient_dim)
        x = solve(M, vec)
        assert x is not None
        return {i: v for i, v in x.items() if i < len(self.reps)}

    def rep_vector(self, coords):
        ring = self.ring
        out = {}
        for i, a in coords.items():
            vec_axpy(ring, out, a, self.reps[i])
        return out


def integral_cohomology(dim, d_in, d_out):
    """(free rank, invariant factors > 1) of ker(d_out)/im(d_in) over Z."""
    rk_out = rank(_to_QQ(d_out)) if d_out is not None else 0
    rk_in = rank(_to_QQ(d_in)) if d_in is not None else 0
    free = dim - rk_out - rk_in
    torsion = []
    if d_in is not None and d_in.entries:
        diag, _, _ = smith_normal_form(d_in)
        torsion = [d for d in diag if d > 1]
    return free, torsion


def _to_QQ(M):
    return SparseMatrix(
        QQ, M.rows, M.cols, {k: Fraction(v) for k, v in M.entries.items()}
    )


# ---------------------------------------------------------------------------
# Smith normal form over Z


def smith_normal_form(M):
    """(diagonal, left, right) with left*M*right diagonal, d_i | d_{i+1}.

    The diagonal lists the nonzero invariant factors (nonnegative); left and
    right are unimodular.  Deterministic entry-size-aware pivoting.
    """
    if not isinstance(M.ring, IntegerRing):
        raise TypeError("smith_normal_form needs integer entries")
    m, n = M.rows, M.cols
    A = [[0] * n for _ in range(m)]
    for (r, c), v in M.entries.items():
        A[r][c] = v
    L = [[1 if i == j else 0 for j in range(m)] for i in range(m)]
    R = [[1 if i == j else 0 for j in range(n)] for i in range(n)]

    def swap_rows(i, j):
        A[i], A[j] = A[j], A[i]
        L[i], L[j] = L[j], L[i]

    def swap_cols(i, j):
        for row in A:
            row[i], row[j] = row[j], row[i]
        for row in R:
            row[i], row[j] = row[j], row[i]

    def addmul_row(dst, src, q):
        Ad, As = A[dst], A[src]
        for c in range(n):
            Ad[c] += q * As[c]
        Ld, Ls = L[dst], L[src]
        for c in range(m):
            Ld[c] += q * Ls[c]

    def addmul_col(dst, src, q):
        for row in A:
            row[dst] += q * row[src]
        for row in R:
            row[dst] += q * row[src]

    k = 0
    while k < m and k < n:
        best = None
        for i in range(k, m):
            Ai = A[i]
            for j in range(k, n):
                v = Ai[j]
                if v:
                    key = (abs(v), i, j)
                    if best is None or key < best:
                        best = key
        if best is None:
            break
        _, bi, bj = best
        swap_rows(k, bi)
        swap_cols(k, bj)
        while True:
            progressed = False
            for i in range(k + 1, m):
                if A[i][k]:
                    q = A[i][k] // A[k][k]
                    addmul_row(i, k, -q)
                    if A[i][k]:
                        swap_rows(k, i)
                        progressed = True
            for j in range(k + 1, n):
                if A[k][j]:
                    q = A[k][j] // A[k][k]
                    addmul_col(j, k, -q)
                    if A[k][j]:
                        swap_cols(k, j)
                        progressed = True
            if progressed:
                continue
            pivot = A[k][k]
            offender = None
            for i in range(k + 1, m):
                Ai = A[i]
                for j in range(k + 1, n):
                    if Ai[j] % pivot:
                        offender = i
                        break
                if offender is not None:
                    break
            if offender is None:
                break
            addmul_row(k, offender, 1)
        if A[k][k] < 0:
            addmul_row(k, k, -2)
        k += 1
    diag = [A[i][i] for i in range(k)]
    left = SparseMatrix(
        ZZ, m, m, {(i, j): L[i][j] for i in range(m) for j in range(m) if L[i][j]}
    )
    right = SparseMatrix(
        ZZ, n, n, {(i, j): R[i][j] for i in range(n) for j in range(n) if R[i][j]}
    )
    return diag, left, right


def determinant(M):
    """Exact determinant (Bareiss for Z, fraction cross-multiplied for Q)."""
    if M.rows != M.cols:
        raise ValueError("determinant of a non-square matrix")
    n = M.rows
    if n == 0:
        return M.ring.one()
    if isinstance(M.ring, IntegerRing):
        dense = [[v for v in row] for row in M.to_dense()]
        return _bareiss(dense)
    dense = M.to_dense()
    den = 1
    for row in dense:
        for v in row:
            den = den * v.denominator // gcd(den, v.denominator)
    ints = [[int(v * den) for v in row] for row in dense]
    d = _bareiss(ints)
    return Fraction(d, den**n)


def _bareiss(a):
    n = len(a)
    sign = 1
    prev = 1
    for k in range(n - 1):
        if a[k][k] == 0:
            for i in range(k + 1, n):
                if a[i][k]:
                    a[k], a[i] = a[i], a[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
            a[i][k] = 0
        prev = a[k][k]
    return sign * a[n - 1][n - 1]
