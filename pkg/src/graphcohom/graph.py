"""Finite graphs with the vertex-enumeration and edge-order conventions.

Vertices are 1..n; edges are (i, j) pairs with i <= j (i == j is a loop),
kept sorted lexicographically -- that order *is* the sign-relevant edge
order, so it is fixed at construction and never recomputed.  Multi-edges are
allowed.  The vertex enumeration is part of the input: relabeling changes
chain-level signs (and tests check that cohomology ranks do not care).
"""

import json
from itertools import combinations

from .polyutil import p1_add, p1_scale


class Graph:
    __slots__ = ("n", "edges")

    def __init__(self, n, edges):
        if n < 0:
            raise ValueError("vertex count must be nonnegative")
        norm = []
        for (i, j) in edges:
            if not (1 <= i <= n and 1 <= j <= n):
                raise ValueError(f"edge ({i},{j}) outside 1..{n}")
            norm.append((i, j) if i <= j else (j, i))
        norm.sort()
        self.n = n
        self.edges = tuple(norm)

    @property
    def num_edges(self):
        return len(self.edges)

    def is_loop(self, alpha):
        i, j = self.edges[alpha]
        return i == j

    def has_loop(self):
        return any(i == j for (i, j) in self.edges)

    def simple(self):
        """Underlying simple graph: loops dropped, multi-edges collapsed."""
        return Graph(self.n, sorted({e for e in self.edges if e[0] != e[1]}))

    def relabel(self, perm):
        """Relabel vertices; perm maps old vertex -> new vertex (1-based)."""
        if sorted(perm.values()) != list(range(1, self.n + 1)):
            raise ValueError("perm must be a bijection on 1..n")
        return Graph(self.n, [(perm[i], perm[j]) for (i, j) in self.edges])

    def components(self, members):
        """Component labeling of [G:s] for the edge-index subset ``members``."""
        parent = list(range(self.n + 1))

        def find(v):
            while parent[v] != v:
                parent[v] = parent[parent[v]]
                v = parent[v]
            return v

        for a in members:
            i, j = self.edges[a]
            ri, rj = find(i), find(j)
            if ri != rj:
                if ri < rj:
                    parent[rj] = ri
                else:
                    parent[ri] = rj
        roots = []
        seen = set()
        for v in range(1, self.n + 1):
            r = find(v)
            if r not in seen:
                seen.add(r)
                roots.append(r)
        # roots come out in increasing order of smallest contained vertex
        comp_of_root = {r: k + 1 for k, r in enumerate(roots)}
        label = tuple(comp_of_root[find(v)] for v in range(1, self.n + 1))
        return ComponentLabeling(len(roots), label)

    def contract(self, alpha):
        """Contract edge alpha: merged vertex is min(i, j), rest renumbered.

        Returns (graph, vertex_map, edge_map) where vertex_map[v] is the new
        label of old vertex v (1-based dict) and edge_map sends every old
        edge index except alpha to its index in the new graph.  Parallel
        copies of the contracted edge become loops and are kept.
        """
        i, j = self.edges[alpha]
        if i == j:
            raise ValueError("cannot contract a loop")
        vmap = {}
        for v in range(1, self.n + 1):
            if v == j:
                vmap[v] = i
            elif v > j:
                vmap[v] = v - 1
            else:
                vmap[v] = v
        mapped = []
        for b, (u, v) in enumerate(self.edges):
            if b == alpha:
                continue
            nu, nv = vmap[u], vmap[v]
            mapped.append(((nu, nv) if nu <= nv else (nv, nu), b))
        mapped.sort(key=lambda t: t[0])
        g = Graph(self.n - 1, [e for (e, _) in mapped])
        edge_map = {b: k for k, (_, b) in enumerate(mapped)}
        return g, vmap, edge_map

    def delete(self, alpha):
        """Remove edge alpha.  Returns (graph, edge_map) for the survivors."""
        kept = [e for b, e in enumerate(self.edges) if b != alpha]
        edge_map = {}
        k = 0
        for b in range(len(self.edges)):
            if b != alpha:
                edge_map[b] = k
                k += 1
        return Graph(self.n, kept), edge_map

    def contract_subset(self, members):
        """Collapse every component of [G:s] to one vertex.

        Vertices of the result are the components of [G:s] in their
        smallest-vertex order; edges outside ``members`` map over (possibly
        becoming loops or parallel edges).  Returns (graph, labeling,
        edge_map) with edge_map on the surviving old edge indices.
        """
        if any(self.is_loop(a) for a in members):
            raise ValueError("subset contains a loop")
        lab = self.components(members)
        mapped = []
        mset = set(members)
        for b, (u, v) in enumerate(self.edges):
            if b in mset:
                continue
            cu, cv = lab.label[u - 1], lab.label[v - 1]
            mapped.append(((cu, cv) if cu <= cv else (cv, cu), b))
        mapped.sort(key=lambda t: t[0])
        g = Graph(lab.count, [e for (e, _) in mapped])
        edge_map = {b: k for k, (_, b) in enumerate(mapped)}
        return g, lab, edge_map

    def max_subtree_edges(self):
        """Edge count of the largest spanning tree of any component."""
        lab = self.components(range(len(self.edges)))
        sizes = {}
        for v in range(1, self.n + 1):
            c = lab.label[v - 1]
            sizes[c] = sizes.get(c, 0) + 1
        return max(sizes.values(), default=1) - 1 if self.n else 0

    def linear_extensions(self):
        """All orderings refining i < j for every edge i -> j, in lex order."""
        if self.has_loop():
            raise ValueError("linear extensions need a loopless graph")
        smaller = {v: set() for v in range(1, self.n + 1)}
        for (i, j) in self.edges:
            if i != j:
                smaller[j].add(i)
        out = []
        seq = []
        placed = set()

        def rec():
            if len(seq) == self.n:
                out.append(tuple(seq))
                return
            for v in range(1, self.n + 1):
                if v not in placed and smaller[v] <= placed:
                    placed.add(v)
                    seq.append(v)
                    rec()
                    seq.pop()
                    placed.remove(v)

        rec()
        return out

    def __repr__(self):
        return f"Graph(n={self.n}, edges={list(self.edges)})"

    def __eq__(self, other):
        return (
            isinstance(other, Graph)
            and self.n == other.n
            and self.edges == other.edges
        )

    def __hash__(self):
        return hash((self.n, self.edges))


class ComponentLabeling:
    """Components of a spanning subgraph, numbered by smallest vertex."""

    __slots__ = ("count", "label", "_mins")

    def __init__(self, count, label):
        self.count = count
        self.label = label  # tuple, label[v-1] is the component of vertex v
        mins = [None] * count
        for v, c in enumerate(label, start=1):
            if mins[c - 1] is None:
                mins[c - 1] = v
        self._mins = tuple(mins)

    def min_vertex(self, comp):
        return self._mins[comp - 1]

    def component_sizes(self):
        sizes = [0] * self.count
        for c in self.label:
            sizes[c - 1] += 1
        return sizes


def builtin_graph(name):
    """Builtins: path:<n>, cycle:<n>, complete:<n>, star:<n>."""
    kind, _, arg = name.partition(":")
    try:
        n = int(arg)
    except ValueError:
        raise ValueError(f"bad graph builtin {name!r}") from None
    if n < 1:
        raise ValueError(f"bad graph builtin {name!r}: need n >= 1")
    if kind == "path":
        return Graph(n, [(i, i + 1) for i in range(1, n)])
    if kind == "cycle":
        if n < 3:
            raise ValueError("cycle needs n >= 3")
        return Graph(n, [(i, i + 1) for i in range(1, n)] + [(1, n)])
    if kind == "complete":
        return Graph(n, list(combinations(range(1, n + 1), 2)))
    if kind == "star":
        return Graph(n, [(1, i) for i in range(2, n + 1)])
    raise ValueError(f"unknown graph builtin {name!r}")


def from_config(text):
    """Parse {"n": int, "edges": [[i, j], ...]}."""
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValueError(f"graph config syntax error: {exc}") from None
    try:
        n = int(data["n"])
        edges = [(int(i), int(j)) for (i, j) in data["edges"]]
    except (KeyError, TypeError, ValueError) as exc:
        raise ValueError(f'graph config needs "n" and "edges": {exc}') from None
    return Graph(n, edges)


def chromatic_polynomial(G):
    """Chromatic polynomial by deletion-contraction, as a {exp: int} dict.

    Works on multigraphs: a loop makes it vanish identically, multi-edges
    are collapsed first.
    """
    if G.has_loop():
        return {}
    G = G.simple()

    def rec(g):
        if not g.edges:
            return {g.n: 1}
        g2 = g.simple()
        if g2.num_edges != g.num_edges:
            return rec(g2)
        d, _ = g.delete(0)
        c, _, _ = g.contract(0)
        return p1_add(rec(d), p1_scale(rec(c), -1))

    return rec(G)
