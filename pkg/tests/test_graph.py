import random
from itertools import permutations
from math import factorial

import pytest

from graphcohom.graph import Graph, builtin_graph, chromatic_polynomial, from_config
from graphcohom.polyutil import p1_eval


def test_edge_normalization_and_order():
    g = Graph(3, [(3, 1), (2, 2), (1, 2)])
    assert g.edges == ((1, 2), (1, 3), (2, 2))
    with pytest.raises(ValueError):
        Graph(2, [(0, 1)])


def test_components_examples():
    path3 = builtin_graph("path:3")
    lab = path3.components({0})
    assert lab.count == 2 and lab.label == (1, 1, 2)
    lab = Graph(4, []).components(set())
    assert lab.count == 4 and lab.label == (1, 2, 3, 4)
    k3 = builtin_graph("complete:3")
    assert k3.components({0, 1, 2}).count == 1


def test_components_min_vertex_order():
    # edges (2,4) and (1,3): component of 1 is first even though 2 < 3
    g = Graph(4, [(2, 4), (1, 3)])
    lab = g.components({0, 1})
    assert lab.count == 2
    assert lab.label == (1, 2, 1, 2)
    assert lab.min_vertex(1) == 1 and lab.min_vertex(2) == 2


def test_contract_examples():
    k3 = builtin_graph("complete:3")
    g, vmap, emap = k3.contract(0)  # contract (1,2)
    assert g.n == 2 and g.edges == ((1, 2), (1, 2))
    assert vmap == {1: 1, 2: 1, 3: 2}
    path3 = builtin_graph("path:3")
    g, _, _ = path3.contract(0)
    assert g.n == 2 and g.edges == ((1, 2),)
    single = Graph(2, [(1, 2)])
    g, _, _ = single.contract(0)
    assert g.n == 1 and g.edges == ()
    with pytest.raises(ValueError):
        Graph(1, [(1, 1)]).contract(0)


def test_delete_examples():
    k3 = builtin_graph("complete:3")
    g, emap = k3.delete(1)  # remove (1,3)
    assert g.edges == ((1, 2), (2, 3))
    assert emap == {0: 0, 2: 1}
    g, _ = Graph(2, [(1, 2)]).delete(0)
    assert g.n == 2 and g.edges == ()
    g, _ = Graph(1, [(1, 1)]).delete(0)
    assert not g.has_loop()


def test_edge_count_identities():
    g = builtin_graph("complete:4")
    assert g.contract(2)[0].num_edges == g.num_edges - 1
    assert g.delete(2)[0].num_edges == g.num_edges - 1


def test_max_subtree_edges():
    for n in range(2, 7):
        assert builtin_graph(f"complete:{n}").max_subtree_edges() == n - 1
    assert Graph(4, []).max_subtree_edges() == 0
    assert Graph(4, [(1, 2), (3, 4)]).max_subtree_edges() == 1
    assert Graph(2, [(1, 1), (1, 2)]).max_subtree_edges() == 1


def test_linear_extensions_examples():
    assert builtin_graph("path:3").linear_extensions() == [(1, 2, 3)]
    star = Graph(3, [(1, 2), (1, 3)])
    assert star.linear_extensions() == [(1, 2, 3), (1, 3, 2)]
    assert len(Graph(3, []).linear_extensions()) == 6
    with pytest.raises(ValueError):
        Graph(2, [(1, 1)]).linear_extensions()


def brute_extensions(g):
    out = []
    for perm in permutations(range(1, g.n + 1)):
        pos = {v: k for k, v in enumerate(perm)}
        if all(pos[i] < pos[j] for (i, j) in g.edges):
            out.append(perm)
    return out


def test_linear_extensions_against_bruteforce():
    rng = random.Random(99)
    for _ in range(25):
        n = rng.randint(1, 7)
        edges = []
        for i in range(1, n + 1):
            for j in range(i + 1, n + 1):
                if rng.random() < 0.3:
                    edges.append((i, j))
        g = Graph(n, edges)
        assert g.linear_extensions() == brute_extensions(g)


def test_hook_length_formula_on_increasing_forests():
    # forests where every vertex has at most one smaller neighbour: the
    # number of linear extensions is n! / prod(subtree sizes)
    rng = random.Random(4)
    for _ in range(25):
        n = rng.randint(1, 7)
        parent = {}
        for v in range(2, n + 1):
            if rng.random() < 0.75:
                parent[v] = rng.randint(1, v - 1)
        g = Graph(n, [(p, v) for v, p in parent.items()])

        def subtree_size(v):
            return 1 + sum(subtree_size(w) for w in parent if parent[w] == v)

        hook = 1
        for v in range(1, n + 1):
            hook *= subtree_size(v)
        expect = factorial(n) // hook
        assert len(g.linear_extensions()) == expect
        assert g.linear_extensions() == brute_extensions(g)


def test_components_add_edge_property():
    rng = random.Random(5)
    for _ in range(30):
        n = rng.randint(2, 6)
        edges = [
            (i, j)
            for i in range(1, n + 1)
            for j in range(i, n + 1)
            if rng.random() < 0.4
        ]
        if not edges:
            continue
        g = Graph(n, edges)
        m = g.num_edges
        s = {a for a in range(m) if rng.random() < 0.5}
        extra = rng.randrange(m)
        if extra in s:
            continue
        before = g.components(s).count
        after = g.components(s | {extra}).count
        assert after in (before, before - 1)


def test_builtin_and_config_parsing():
    assert builtin_graph("cycle:4").num_edges == 4
    assert builtin_graph("star:5").edges == ((1, 2), (1, 3), (1, 4), (1, 5))
    with pytest.raises(ValueError):
        builtin_graph("petersen:1")
    g = from_config('{"n": 3, "edges": [[1, 2], [2, 3]]}')
    assert g == builtin_graph("path:3")
    with pytest.raises(ValueError):
        from_config('{"n": 3}')


def test_chromatic_polynomial():
    k3 = builtin_graph("complete:3")
    poly = chromatic_polynomial(k3)
    for k in range(6):
        assert p1_eval(poly, k) == k * (k - 1) * (k - 2)
    loopy = Graph(2, [(1, 1), (1, 2)])
    assert chromatic_polynomial(loopy) == {}  # loops make it vanish
    multi = Graph(2, [(1, 2), (1, 2)])
    assert chromatic_polynomial(multi) == chromatic_polynomial(Graph(2, [(1, 2)]))
