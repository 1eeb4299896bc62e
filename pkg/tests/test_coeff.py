import random
from fractions import Fraction

import pytest

from graphcohom.coeff import (
    GF,
    QQ,
    ZZ,
    SparseMatrix,
    CohomologySpace,
    determinant,
    integral_cohomology,
    kernel_basis,
    rank,
    ring_from_name,
    row_space,
    smith_normal_form,
    solve,
)


def M(ring, rows):
    return SparseMatrix.from_rows(ring, rows)


def test_ring_parsing():
    assert ring_from_name("Q") is QQ
    assert ring_from_name("Z") is ZZ
    assert ring_from_name("Fp:7").p == 7
    with pytest.raises(ValueError):
        ring_from_name("Fp:6")
    with pytest.raises(ValueError):
        ring_from_name("R")
    assert QQ.parse("-3/4") == Fraction(-3, 4)
    assert GF(5).parse("1/2") == 3
    with pytest.raises(ValueError):
        ZZ.parse("1/2")


def test_rank_examples():
    assert rank(M(QQ, [[1, 2], [2, 4]])) == 1
    assert rank(SparseMatrix.zero(QQ, 0, 0)) == 0
    assert rank(SparseMatrix.identity(QQ, 5)) == 5
    assert rank(M(GF(2), [[1, 1], [1, 1]])) == 1
    with pytest.raises(TypeError):
        rank(M(ZZ, [[1, 2], [3, 4]]))


def test_kernel_examples():
    ker = kernel_basis(M(QQ, [[1, 1]]))
    assert ker == [{1: Fraction(1), 0: Fraction(-1)}]
    assert kernel_basis(SparseMatrix.identity(QQ, 3)) == []
    ker = kernel_basis(M(QQ, [[1, 2], [2, 4]]))
    assert len(ker) == 1
    # spans (2, -1): check Mv = 0 by substitution
    v = ker[0]
    assert v[0] * 1 + v.get(1, 0) * 2 == 0
    assert v[0] * 2 + v.get(1, 0) * 4 == 0


def test_solve_examples():
    eye = SparseMatrix.identity(QQ, 3)
    b = {0: Fraction(5), 2: Fraction(-1)}
    assert solve(eye, b) == b
    x = solve(M(QQ, [[1, 1]]), [2])
    assert x == {0: Fraction(2)}  # first-pivot convention, free vars 0
    assert solve(M(QQ, [[0]]), [1]) is None
    with pytest.raises(ValueError):
        solve(M(QQ, [[1, 1]]), {3: Fraction(1)})


def test_smith_examples():
    d, L, R = smith_normal_form(M(ZZ, [[2, 4], [6, 8]]))
    assert d == [2, 4]
    assert d[0] * d[1] == abs(determinant(M(ZZ, [[2, 4], [6, 8]])))
    assert smith_normal_form(SparseMatrix.zero(ZZ, 3, 2))[0] == []
    assert smith_normal_form(SparseMatrix.identity(ZZ, 3))[0] == [1, 1, 1]
    with pytest.raises(TypeError):
        smith_normal_form(M(QQ, [[1]]))


def _random_int_matrix(rng, ring, rows, cols, density=0.6, lo=-4, hi=4):
    ent = {}
    for i in range(rows):
        for j in range(cols):
            if rng.random() < density:
                v = ring.from_int(rng.randint(lo, hi))
                if not ring.is_zero(v):
                    ent[(i, j)] = v
    return SparseMatrix(ring, rows, cols, ent)


def test_random_rank_kernel_snf_agree():
    rng = random.Random(20240817)
    for _ in range(40):
        r = rng.randint(0, 5)
        c = rng.randint(0, 5)
        Mz = _random_int_matrix(rng, ZZ, r, c)
        Mq = SparseMatrix(QQ, r, c, {k: Fraction(v) for k, v in Mz.entries.items()})
        diag, L, R = smith_normal_form(Mz)
        # rank over Q equals the number of nonzero SNF diagonal entries
        assert rank(Mq) == len(diag)
        # divisibility chain and unimodularity
        for a, b in zip(diag, diag[1:]):
            assert b % a == 0
        assert abs(determinant(L)) == 1
        assert abs(determinant(R)) == 1
        # L M R is the stated diagonal
        D = L.mul(Mz).mul(R)
        expect = {(i, i): d for i, d in enumerate(diag)}
        assert D.entries == expect
        # kernel: rank + nullity = cols, and M v = 0 exactly
        ker = kernel_basis(Mq)
        assert rank(Mq) + len(ker) == c
        for v in ker:
            assert Mq.apply(v) == {}


def test_random_solve_consistency():
    rng = random.Random(7)
    for ring in (QQ, GF(3), GF(7)):
        for _ in range(30):
            r = rng.randint(1, 5)
            c = rng.randint(1, 5)
            A = _random_int_matrix(rng, ring, r, c)
            xs = {j: ring.from_int(rng.randint(-3, 3)) for j in range(c)}
            b = A.apply(xs)
            x = solve(A, b)
            assert x is not None
            assert A.apply(x) == b


def test_row_space_and_cohomology_space():
    sp = row_space(QQ, [{0: Fraction(1), 1: Fraction(2)}, {0: Fraction(2), 1: Fraction(4)}], 2)
    assert sp.dim == 1
    assert sp.contains({0: Fraction(3), 1: Fraction(6)})
    assert not sp.contains({0: Fraction(1)})

    # 0 -> Q^2 -d-> Q^1, d = [1 1]: H^0 = ker, one class
    d = M(QQ, [[1, 1]])
    H = CohomologySpace(QQ, 2, None, d)
    assert H.dim == 1
    coords = H.classify({0: Fraction(2), 1: Fraction(-2)})
    assert len(coords) == 1


def test_integral_cohomology_torsion():
    # Z -2-> Z: H = Z/2 at the target
    d_in = M(ZZ, [[2]])
    free, torsion = integral_cohomology(1, d_in, None)
    assert free == 0 and torsion == [2]
