from fractions import Fraction
from itertools import product as iproduct

import pytest

from graphcohom.algebra import DGAlgebra, exterior_dg, torus
from graphcohom.coeff import GF, QQ, SparseMatrix
from graphcohom.perturb import (
    FiniteComplex,
    GradedMap,
    Reduction,
    algebra_complex,
    bar_model,
    bpl,
    enforce_side_conditions,
    induced_algebra,
    merkulov,
    reduce_to_cohomology,
)


def massey_dga(ring=QQ):
    return exterior_dg([1, 1, 1], {"x": {"ab": 1}}, ring=ring, names=["a", "b", "x"])


def fourfold_dga(ring=QQ):
    return exterior_dg(
        [1, 1, 1, 1], {"x": {"ab": 1}, "y": {"bx": 1}}, ring=ring, names=["a", "b", "x", "y"]
    )


def evenpair_dga():
    names = ["1", "u1", "u2", "v", "u1u1", "u1u2", "u2u2", "u1v", "u2v"]
    degs = [0, 2, 2, 3, 4, 4, 4, 5, 5]
    ix = {n: i for i, n in enumerate(names)}
    one = QQ.one()
    mult = {}
    for a, b, c in [
        ("u1", "u1", "u1u1"),
        ("u1", "u2", "u1u2"),
        ("u2", "u1", "u1u2"),
        ("u2", "u2", "u2u2"),
        ("u1", "v", "u1v"),
        ("v", "u1", "u1v"),
        ("u2", "v", "u2v"),
        ("v", "u2", "u2v"),
    ]:
        mult[(ix[a], ix[b])] = {ix[c]: one}
    return DGAlgebra(QQ, names, degs, mult, {ix["v"]: {ix["u1u2"]: one}})


def formal_dga(A):
    return DGAlgebra(A.ring, list(A.names), list(A.degrees), dict(A.mult), {})


def two_step_complex():
    # 0 -> Q --id--> Q -> 0 in degrees 0, 1
    d = SparseMatrix.from_rows(QQ, [[1]])
    return FiniteComplex(QQ, {0: 1, 1: 1}, {0: d})


def test_reduce_two_step():
    K = two_step_complex()
    red = reduce_to_cohomology(K)
    assert red.verify() is None
    assert red.small.dims == {}  # contractible
    assert red.h.mat(1).entries == {(0, 0): Fraction(1)}  # h inverts d


def test_reduce_zero_differential():
    K = FiniteComplex(QQ, {0: 2, 3: 1}, {})
    red = reduce_to_cohomology(K)
    assert red.verify() is None
    assert red.small.dims == {0: 2, 3: 1}
    assert red.h.is_zero()
    assert red.f.compose(red.g) == GradedMap.identity(red.small)


def test_reduce_circle_cochains():
    from graphcohom.simplicial import circle, coboundary_matrix

    X = circle()
    d0 = coboundary_matrix(X, QQ, 0)
    K = FiniteComplex(QQ, {0: 3, 1: 3}, {0: d0})
    red = reduce_to_cohomology(K)
    assert red.verify() is None
    assert red.small.dims == {0: 1, 1: 1}


def test_reduce_shuffled_variant():
    K, _ = algebra_complex(massey_dga())
    for seed in (1, 2):
        red = reduce_to_cohomology(K, shuffle_seed=seed)
        assert red.verify() is None
        assert red.small.dims == {0: 1, 1: 2, 2: 2, 3: 1}


def test_enforce_side_conditions_idempotent_on_valid():
    K, _ = algebra_complex(massey_dga())
    red = reduce_to_cohomology(K)
    fixed = enforce_side_conditions(K, red.small, red.f, red.g, red.h)
    assert fixed.verify() is None
    assert fixed.h == red.h  # already satisfied, so unchanged


def test_enforce_side_conditions_cleans_polluted_h():
    K, _ = algebra_complex(massey_dga())
    red = reduce_to_cohomology(K)
    # pollute the homotopy with g (anything) f terms of degree -1
    noise = red.g.compose(
        GradedMap(
            red.small,
            red.small,
            -1,
            {
                2: SparseMatrix.from_rows(QQ, [[7, 0], [0, -3]]),
            },
        )
    ).compose(red.f)
    bad_h = red.h.add(noise)
    bad = Reduction(K, red.small, red.f, red.g, bad_h)
    assert bad.verify() is not None  # side conditions fail
    # but it is still a homotopy: d(gMf) + (gMf)d = 0 since f, g are chain
    # maps and the small differential vanishes
    fixed = enforce_side_conditions(K, red.small, red.f, red.g, bad_h)
    assert fixed.verify() is None


def test_enforce_side_conditions_zero_case():
    K = FiniteComplex(QQ, {0: 2}, {})
    red = reduce_to_cohomology(K)
    fixed = enforce_side_conditions(K, red.small, red.f, red.g, red.h)
    assert fixed.h.is_zero()


def test_bpl_zero_perturbation():
    K, _ = algebra_complex(massey_dga())
    red = reduce_to_cohomology(K)
    filt = {n: [0] * K.dim(n) for n in K.degrees()}
    res = bpl(red, GradedMap.zero(K, K, 1), filt)
    assert res.iterations == 1
    assert res.delta_small.is_zero()
    assert res.reduction.verify() is None


def test_bpl_rejects_bad_filtration():
    K, _ = algebra_complex(massey_dga())
    red = reduce_to_cohomology(K)
    # declare delta = d itself; it does not raise the constant filtration
    filt = {n: [0] * K.dim(n) for n in K.degrees()}
    with pytest.raises(ValueError, match="filtration"):
        bpl(red, K.d_map(), filt)


def test_bpl_rejects_non_square_zero():
    K = FiniteComplex(QQ, {0: 1, 1: 1}, {})
    red = reduce_to_cohomology(K)
    delta = GradedMap(K, K, 1, {0: SparseMatrix.from_rows(QQ, [[1]])})
    # delta^2 = 0 trivially here (two degrees), so corrupt the homotopy data
    res = bpl(red, delta, {0: [0], 1: [1]})
    assert res.reduction.verify() is None  # fine: this is a legal perturbation
    bad = GradedMap(
        FiniteComplex(QQ, {0: 1, 1: 1, 2: 1}, {}),
        FiniteComplex(QQ, {0: 1, 1: 1, 2: 1}, {}),
        1,
        {},
    )
    with pytest.raises(ValueError):
        bpl(red, bad, {0: [0], 1: [1]})


def test_bar_bpl_matches_merkulov_massey():
    dga = massey_dga()
    bm = bar_model(dga, N=3)
    ainf = merkulov(dga, bm.red0, N=3)
    assert bm.matches_merkulov(ainf) is None


def test_bar_bpl_matches_merkulov_fourfold():
    dga = fourfold_dga()
    bm = bar_model(dga, N=4)
    ainf = merkulov(dga, bm.red0, N=4)
    assert bm.matches_merkulov(ainf) is None


def test_induced_algebra_unit_and_validation():
    from graphcohom.algebra import validate

    for dga in (massey_dga(), fourfold_dga(), evenpair_dga()):
        K, gb = algebra_complex(dga)
        red = reduce_to_cohomology(K)
        A = induced_algebra(dga, red, gb)
        assert A.names[0] == "1"
        assert validate(A) is None


def test_merkulov_m1_m2():
    for dga in (massey_dga(), massey_dga(GF(3)), fourfold_dga(), evenpair_dga()):
        ainf = merkulov(dga, N=3)
        assert ainf.m1_is_zero()
        assert ainf.m2_equals_product()


def test_merkulov_m3_frozen_values():
    # hand-computed with the deterministic splitting (h(ab) = x):
    #   m3([a],[a],[b]) = [ax],  m3([a],[b],[b]) = -[bx]
    ainf = merkulov(massey_dga(), N=3)
    A = ainf.algebra
    ia, ib = A.index["[a]"], A.index["[b]"]
    assert ainf.m_basis((ia, ia, ib)) == {A.index["[ax]"]: Fraction(1)}
    assert ainf.m_basis((ia, ib, ib)) == {A.index["[bx]"]: Fraction(-1)}


def test_merkulov_nonformal_witnesses():
    af = merkulov(fourfold_dga(), N=4)
    A = af.algebra
    ia, ib = A.index["[a]"], A.index["[b]"]
    assert af.m_basis((ia, ib, ib, ib)) == {A.index["[by]"]: Fraction(-1)}
    ae = merkulov(evenpair_dga(), N=3)
    B = ae.algebra
    i1, i2 = B.index["[u1]"], B.index["[u2]"]
    assert ae.m_basis((i1, i2, i2)) == {B.index["[u2v]"]: Fraction(1)}


def test_formal_m3_and_above_vanish():
    dga = formal_dga(torus(2))
    ainf = merkulov(dga, N=4)
    dim = ainf.algebra.dim
    for n in (3, 4):
        for args in iproduct(range(dim), repeat=n):
            assert ainf.m_basis(args) == {}


def test_stasheff_small():
    for dga, N in ((massey_dga(), 4), (evenpair_dga(), 4)):
        ainf = merkulov(dga, N=N)
        dim = ainf.algebra.dim
        for n in range(2, N + 1):
            for args in iproduct(range(dim), repeat=n):
                assert ainf.stasheff_defect(args) == {}, args


def test_shuffle_vanishing():
    # h . lambda kills bar-side shuffle products of two nonempty tensors
    from graphcohom.perturb import shuffle_vanishing_violations

    for dga in (massey_dga(), fourfold_dga()):
        assert shuffle_vanishing_violations(merkulov(dga, N=4), max_arity=4) == 0
