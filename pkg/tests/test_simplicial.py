import pytest

from graphcohom import algebra as alg
from graphcohom.coeff import GF, QQ, ZZ
from graphcohom.graph import Graph, builtin_graph
from graphcohom.graph_complex import build, cohomology
from graphcohom.polyutil import p1_mul, p1_pow
from graphcohom.simplicial import (
    ResourceCapError,
    betti,
    builtin_complex,
    circle,
    complex_from_config,
    cover_bicomplex,
    cup_ring,
    diagonal,
    empty_subset,
    from_complex,
    full_subset,
    interval,
    point,
    power,
    relative_cohomology,
    sphere2,
    torus,
)


def test_from_complex_counts():
    c = circle()
    assert [c.n_cells(n) for n in range(2)] == [3, 3]
    s = sphere2()
    assert [s.n_cells(n) for n in range(3)] == [4, 6, 4]
    assert point().n_cells(0) == 1
    with pytest.raises(ValueError):
        from_complex([])


def test_betti_of_builtins():
    assert betti(circle(), QQ)[0] == {0: 1, 1: 1}
    assert betti(sphere2(), QQ)[0] == {0: 1, 2: 1}
    assert betti(interval(), QQ)[0] == {0: 1}
    assert betti(sphere2(), ZZ)[0] == {0: 1, 2: 1}
    assert betti(sphere2(), GF(2))[0] == {0: 1, 2: 1}


def test_power_point_and_identity():
    p3 = power(point(), 3)
    assert p3.total_cells() == 1
    c1 = power(circle(), 1)
    assert betti(c1, QQ)[0] == betti(circle(), QQ)[0]


def test_power_circle_squared_is_torus():
    t = torus()
    # Kunneth: ranks 1, 2, 1
    assert betti(t, QQ)[0] == {0: 1, 1: 2, 2: 1}
    assert t.euler_characteristic() == 0
    # nondegenerate cell counts of the EZ product of two triangles
    assert [t.n_cells(n) for n in range(3)] == [9, 27, 18]


def test_power_circle_cubed_counts_and_kunneth():
    X = power(circle(), 3)
    assert [X.n_cells(n) for n in range(4)] == [27, 189, 324, 162]
    assert X.euler_characteristic() == 0
    assert betti(X, QQ)[0] == {0: 1, 1: 3, 2: 3, 3: 1}
    # graded convolution of the factors
    one = {0: 1, 1: 1}
    assert betti(X, QQ)[0] == p1_pow(one, 3)


def test_power_sphere2_squared_kunneth():
    X = power(sphere2(), 2)
    assert betti(X, QQ)[0] == p1_mul({0: 1, 2: 1}, {0: 1, 2: 1})


def test_resource_guard():
    with pytest.raises(ResourceCapError):
        power(sphere2(), 3, cap=500)


def test_diagonal_examples():
    X2 = power(circle(), 2)
    D = diagonal(X2, 1, 2)
    # the full diagonal of X^2 is isomorphic to X
    assert [D.n_cells(n) for n in range(2)] == [3, 3]
    with pytest.raises(ValueError):
        diagonal(X2, 1, 1)
    P2 = power(point(), 2)
    assert diagonal(P2, 1, 2).is_everything()


def test_relative_cohomology_edge_cases():
    X2 = power(circle(), 2)
    ranks, torsion = relative_cohomology(X2, full_subset(X2), QQ)
    assert ranks == {} and torsion == {}
    ranks, _ = relative_cohomology(X2, empty_subset(X2), QQ)
    assert ranks == betti(X2, QQ)[0]


def test_relative_cohomology_integral():
    X2 = power(circle(), 2)
    Z = diagonal(X2, 1, 2)
    ranks, torsion = relative_cohomology(X2, Z, ZZ)
    assert ranks == {1: 1, 2: 1} and torsion == {}


def test_relative_cohomology_circle_k2_matches_graph_complex():
    # the [DERIVED] cross-oracle: (M = circle, G = K_2)
    X2 = power(circle(), 2)
    Z = diagonal(X2, 1, 2)
    ranks, _ = relative_cohomology(X2, Z, QQ)
    assert ranks == {1: 1, 2: 1}
    table = cohomology(build(alg.exterior([1], names=["x"]), Graph(2, [(1, 2)])))
    assert table.total_by_degree() == ranks


def test_cup_ring_circle_and_sphere():
    A = cup_ring(circle(), QQ)
    assert A.dim == 2 and A.degrees == (0, 1)
    x = 1
    assert A.product(x, x) == {}  # x^2 = 0 forced by dimension
    S = cup_ring(sphere2(), QQ)
    assert S.dim == 2 and S.degrees == (0, 2)


def test_cup_ring_torus_matches_exterior():
    A = cup_ring(torus(), QQ)
    assert A.qdim() == {0: 1, 1: 2, 2: 1}
    i1, i2 = [k for k in range(A.dim) if A.deg(k) == 1]
    top = next(k for k in range(A.dim) if A.deg(k) == 2)
    p12 = A.product(i1, i2)
    p21 = A.product(i2, i1)
    assert p12 and p21
    assert p12 == {k: QQ.neg(v) for k, v in p21.items()}  # x y = -y x != 0
    assert set(p12) == {top}
    # and over F_2 as well
    A2 = cup_ring(torus(), GF(2))
    assert A2.qdim() == {0: 1, 1: 2, 2: 1}


def test_cover_bicomplex_k2_circle():
    bic, Xn, subsets = cover_bicomplex(circle(), builtin_graph("complete:2"), QQ)
    assert bic.check() is None
    # total cohomology = relative cohomology of (X^2, diagonal)
    Z = diagonal(Xn, 1, 2)
    ranks, _ = relative_cohomology(Xn, Z, QQ)
    assert bic.total_cohomology() == ranks
    assert ranks == {1: 1, 2: 1}
    # E_1 dimensions match C_A(K2) for A = cup ring of the circle
    dims, d1_ranks = bic.e1_page()
    A = cup_ring(circle(), QQ)
    C = build(A, builtin_graph("complete:2"))
    expect = {}
    for p in range(C.num_columns()):
        for gen in C.gens(p):
            key = (p, C.qdeg(gen))
            expect[key] = expect.get(key, 0) + 1
    assert dims == expect
    # d_1 ranks agree with the ranks of delta per bidegree
    from graphcohom.coeff import rank as mat_rank

    delta_ranks = {}
    for q in C.q_values():
        for p in range(C.num_columns()):
            r = mat_rank(C.delta_block(q, p))
            if r:
                delta_ranks[(p, q)] = r
    assert d1_ranks == delta_ranks


def test_cover_bicomplex_edgeless():
    bic, Xn, _ = cover_bicomplex(circle(), Graph(2, []), QQ)
    dims, d1 = bic.e1_page()
    assert d1 == {}
    assert bic.total_cohomology() == betti(Xn, QQ)[0]


def test_cover_bicomplex_rejects_bad_graphs():
    with pytest.raises(ValueError):
        cover_bicomplex(circle(), Graph(1, [(1, 1)]), QQ)
    with pytest.raises(ValueError):
        cover_bicomplex(circle(), Graph(2, [(1, 2), (1, 2)]), QQ)


def test_cup_ring_needs_connected():
    two_points = from_complex([[0], [1]])
    with pytest.raises(ValueError, match="connected"):
        cup_ring(two_points, QQ)
    with pytest.raises(ValueError, match="field"):
        cup_ring(circle(), ZZ)


def test_builtin_complex_and_config():
    assert builtin_complex("torus").n_cells(2) == 18
    with pytest.raises(ValueError):
        builtin_complex("klein")
    X = complex_from_config('{"facets": [[0, 1], [1, 2], [0, 2]]}')
    assert betti(X, QQ)[0] == {0: 1, 1: 1}
    with pytest.raises(ValueError):
        complex_from_config('{"n": 1}')
