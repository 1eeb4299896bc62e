import random
from fractions import Fraction

import pytest

from graphcohom import algebra as alg
from graphcohom.coeff import GF, QQ, ZZ, vec_axpy
from graphcohom.graph import Graph, builtin_graph
from graphcohom.graph_complex import (
    ContractionIso,
    DeletionContraction,
    build,
    cohomology,
    euler_checks,
    poincare,
    quotient_delta,
    quotient_gens,
    quotient_projection,
    total_cohomology,
    whitney_expansion,
)


def lam_x(ring=QQ):
    return alg.exterior([1], ring=ring, names=["x"])


def massey_dga(ring=QQ):
    return alg.exterior_dg([1, 1, 1], {"x": {"ab": 1}}, ring=ring, names=["a", "b", "x"])


def check_structural(C):
    E = C.graph.num_edges
    for p in range(E + 1):
        dd = C.delta_matrix(p + 1).mul(C.delta_matrix(p)) if p + 1 <= E else None
        if dd is not None:
            assert dd.is_zero(), f"delta^2 != 0 at p={p}"
        if C.algebra.is_dg:
            dv = C.d_matrix(p)
            assert dv.mul(dv).is_zero(), f"d^2 != 0 at p={p}"
            if p + 1 <= E:
                anti = C.d_matrix(p + 1).mul(C.delta_matrix(p)).add(
                    C.delta_matrix(p).mul(C.d_matrix(p))
                )
                assert anti.is_zero(), f"d delta + delta d != 0 at p={p}"
    if C.algebra.is_dg:
        for m in C.total_degrees():
            DD = C.total_matrix(m + 1).mul(C.total_matrix(m))
            assert DD.is_zero(), f"D^2 != 0 at m={m}"


def test_single_edge_delta_is_multiplication():
    C = build(lam_x(), Graph(2, [(1, 2)]))
    gens0 = C.gens(0)
    idx1 = C.gen_index(1)
    A = C.algebra
    x = A.index["x"]
    one = A.index["1"]
    d = C.delta_matrix(0)
    assert d.rows == 2 and d.cols == 4
    col = {g: d.column(j) for j, g in enumerate(gens0)}
    e = ((0,),)
    assert col[((), (one, one))] == {idx1[(e[0], (one,))]: Fraction(1)}
    assert col[((), (x, one))] == {idx1[(e[0], (x,))]: Fraction(1)}
    assert col[((), (one, x))] == {idx1[(e[0], (x,))]: Fraction(1)}
    assert col[((), (x, x))] == {}


def test_edgeless_and_loop_columns():
    C = build(lam_x(), Graph(3, []))
    assert C.num_columns() == 1 and len(C.gens(0)) == 8
    loop = build(alg.sphere(2), Graph(1, [(1, 1)]))
    d = loop.delta_matrix(0)
    assert len(loop.gens(0)) == len(loop.gens(1)) == 2
    # loop merges nothing: delta is the identity on the column
    assert d.entries == {(0, 0): Fraction(1), (1, 1): Fraction(1)}
    assert cohomology(loop).is_zero()


CORPUS = []
for ring in (QQ, GF(2), GF(3), ZZ):
    CORPUS.extend(
        [
            (lam_x(ring), builtin_graph("complete:3")),
            (alg.torus(2, ring), builtin_graph("path:3")),
            (alg.sphere(2, ring), Graph(2, [(1, 2), (1, 2)])),
            (alg.surface(1, ring), Graph(2, [(1, 1), (1, 2)])),
        ]
    )
CORPUS.extend(
    [
        (alg.truncated_poly(2, 3), builtin_graph("star:4")),
        (alg.exterior([1, 2]), builtin_graph("cycle:4")),
        (alg.torus(2), Graph(3, [(1, 2), (1, 2), (2, 3), (3, 3)])),
        (lam_x(), builtin_graph("cycle:6")),
        (alg.sphere(3), builtin_graph("path:6")),
        (massey_dga(), builtin_graph("path:3")),
        (massey_dga(GF(3)), builtin_graph("complete:3")),
        (massey_dga(GF(2)), Graph(2, [(1, 2), (1, 2)])),
    ]
)


@pytest.mark.parametrize("k", range(len(CORPUS)))
def test_structural_identities_on_corpus(k):
    A, G = CORPUS[k]
    check_structural(build(A, G))


def quotient_crosscheck(A, G):
    C = build(A, G)
    ring = C.ring
    for gen in quotient_gens(A, G):
        lhs = {}
        for g2, v in quotient_delta(ring, G, gen).items():
            vec_axpy(ring, lhs, v, quotient_projection(C, g2))
        rhs = {}
        for g2, v in quotient_projection(C, gen).items():
            for g3, w in C.delta_of_gen(g2).items():
                vec_axpy(ring, rhs, ring.mul(v, w), {g3: ring.one()})
        assert lhs == rhs, (gen, lhs, rhs)


@pytest.mark.parametrize(
    "A,G",
    [
        (lam_x(), Graph(2, [(1, 2)])),
        (lam_x(), builtin_graph("complete:3")),
        (alg.torus(2), builtin_graph("path:3")),
        (alg.surface(1), Graph(3, [(1, 3), (2, 3)])),
        (alg.torus(2, GF(3)), Graph(2, [(1, 2), (1, 2)])),
        (alg.exterior([1, 2], ZZ), Graph(2, [(1, 1), (1, 2)])),
        (alg.torus(2), Graph(4, [(1, 4), (2, 3), (2, 4)])),
    ],
)
def test_quotient_presentation_crosscheck(A, G):
    # pi is surjective and pi . delta_quot = delta . pi pins every sign of
    # delta against the wedge differential of the quotient presentation
    quotient_crosscheck(A, G)


def test_cohomology_k2_lambda_x():
    table = cohomology(build(lam_x(), Graph(2, [(1, 2)])))
    assert table.ranks == {(1, 0): 1, (2, 0): 1}


def test_loop_vanishing_on_corpus():
    for A, G in CORPUS:
        if G.has_loop():
            assert cohomology(build(A, G)).is_zero(), (A, G)


def test_edgeless_cohomology_is_tensor_power():
    A = alg.sphere(2)
    table = cohomology(build(A, Graph(2, [])))
    assert table.ranks == {(0, 0): 1, (2, 0): 2, (4, 0): 1}


def test_multi_edge_collapse():
    for A in (lam_x(), alg.sphere(2), alg.torus(2), alg.torus(2, GF(2))):
        double = cohomology(build(A, Graph(2, [(1, 2), (1, 2)])))
        single = cohomology(build(A, Graph(2, [(1, 2)])))
        assert double == single
    triple = cohomology(build(alg.torus(2), Graph(3, [(1, 2), (1, 2), (1, 2), (2, 3)])))
    plain = cohomology(build(alg.torus(2), builtin_graph("path:3")))
    assert triple == plain


def test_enumeration_invariance():
    rng = random.Random(11)
    for A, G in [
        (alg.torus(2), builtin_graph("path:3")),
        (lam_x(), builtin_graph("complete:3")),
        (alg.surface(1), Graph(4, [(1, 2), (2, 3), (2, 4)])),
    ]:
        base = cohomology(build(A, G))
        for _ in range(3):
            vals = list(range(1, G.n + 1))
            rng.shuffle(vals)
            perm = {i + 1: v for i, v in enumerate(vals)}
            assert cohomology(build(A, G.relabel(perm))) == base


def test_enumeration_invariance_integral_torsion():
    # the classical 2-torsion of the cycle is independent of the labeling
    A = alg.sphere(2, ZZ)
    G = builtin_graph("cycle:4")
    base = cohomology(build(A, G))
    assert any(base.torsion.values())
    perm = {1: 3, 2: 1, 3: 4, 4: 2}
    assert cohomology(build(A, G.relabel(perm))) == base


def test_poincare_k2():
    C = build(lam_x(), Graph(2, [(1, 2)]))
    rep = poincare(C)
    assert rep.cohom_poly == {(1, 0): 1, (2, 0): 1}  # t + t^2
    assert rep.complex_poly == {(0, 0): 1, (1, 0): 2, (2, 0): 1, (0, 1): 1, (1, 1): 1}
    assert rep.euler_complex() == rep.euler_cohomology()


def test_euler_whitney_chromatic_on_corpus():
    for A, G in CORPUS:
        C = build(A, G)
        checks = euler_checks(C)
        assert checks["whitney"], (A, G)
        assert checks["chromatic_at_dim"], (A, G)
        if C.ring.is_field:
            assert checks["euler_matches_cohomology"], (A, G)


def test_whitney_expansion_directly():
    C = build(alg.sphere(2), builtin_graph("complete:3"))
    assert whitney_expansion(C) == poincare(C).euler_complex()


def test_total_cohomology_examples():
    # d = 0: totalization collapses the Betti table along q + p
    C = build(lam_x(), Graph(2, [(1, 2)]))
    assert total_cohomology(C) == {1: 1, 2: 1}
    # massey algebra on the one-point edgeless graph: H(A) itself
    C = build(massey_dga(), Graph(1, []))
    assert total_cohomology(C) == {0: 1, 1: 2, 2: 2, 3: 1}


def test_dg_needs_field():
    with pytest.raises(ValueError):
        # exterior_dg over Z is representable, but complexes must reject it
        build(
            alg.DGAlgebra(
                ZZ,
                ["1", "x", "y"],
                [0, 1, 2],
                {},
                {1: {2: 1}},
            ),
            Graph(1, []),
        )


def test_deletion_contraction_k3_sphere2():
    C = build(alg.sphere(2), builtin_graph("complete:3"))
    for a in range(3):
        assert DeletionContraction(C, a).verify() is None


def test_deletion_contraction_more():
    cases = [
        (alg.torus(2), Graph(2, [(1, 2), (1, 2)]), 0),
        (lam_x(), Graph(2, [(1, 2)]), 0),
        (alg.torus(2, GF(3)), builtin_graph("path:3"), 1),
        (alg.exterior([1, 2], ZZ), builtin_graph("complete:3"), 2),
        (alg.surface(1), Graph(3, [(1, 1), (1, 2), (2, 3)]), 1),
    ]
    for A, G, a in cases:
        C = build(A, G)
        assert DeletionContraction(C, a).verify() is None, (A, G, a)
    with pytest.raises(ValueError):
        DeletionContraction(build(lam_x(), Graph(1, [(1, 1)])), 0)


def test_contraction_iso_examples():
    C = build(alg.torus(2), builtin_graph("complete:3"))
    assert ContractionIso(C, ()).verify() is None  # s = empty: identity
    K2 = build(lam_x(), Graph(2, [(1, 2)]))
    iso = ContractionIso(K2, (0,))
    assert iso.verify() is None
    assert iso.small_graph.n == 1 and iso.small_graph.num_edges == 0
    iso3 = ContractionIso(C, (0,))
    assert iso3.verify() is None
    assert iso3.small_graph.edges == ((1, 2), (1, 2))
    mixed = build(alg.surface(1), Graph(4, [(1, 4), (2, 3), (2, 4)]))
    assert ContractionIso(mixed, (0, 1)).verify() is None
    # a parallel pair inside s, and a subset merging non-adjacent slots
    multi = build(alg.torus(2), Graph(3, [(1, 2), (1, 2), (2, 3)]))
    assert ContractionIso(multi, (0, 1)).verify() is None
    crossing = build(alg.surface(1), Graph(4, [(1, 4), (2, 3), (3, 4)]))
    assert ContractionIso(crossing, (0, 1)).verify() is None
