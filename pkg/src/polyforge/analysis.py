"""Holes, zigzags, Petrie schemes and medial layer graphs."""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import permutations

import networkx as nx
import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

from .cgroups import RotationSystem, StringCGroup, schlafli_type
from .errors import LimitExceeded, TypeMismatch, UnsupportedRank
from .groups import element_order
from .polytope import FlagGraph, Polytope, automorphism_group, combinatorial_profile, flag_graph
from .words import Word


# holes and zigzags ---------------------------------------------------------------

@dataclass(frozen=True)
class HoleZigzagProfile:
    q: int
    holes: dict[int, int]
    zigzags: dict[int, int]


def hole_word(j: int) -> Word:
    r0, r1, r2 = Word.gen(0), Word.gen(1), Word.gen(2)
    return r0 * r1 * (r2 * r1) ** (j - 1)


def zigzag_word(j: int) -> Word:
    r0, r1, r2 = Word.gen(0), Word.gen(1), Word.gen(2)
    return r0 * (r1 * r2) ** j


def hole_zigzag_profile(x: StringCGroup | RotationSystem) -> HoleZigzagProfile:
    """Lengths ``h_j`` (``2 <= j <= q/2``) and ``r_j`` (``1 <= j <= q/2``).

    Regular input uses the periods of ``r0 r1 (r2 r1)^(j-1)`` and
    ``r0 (r1 r2)^j``; chiral input uses ``s1 s2^(1-j)`` for holes and twice
    the period of ``s1 s2^-j s1^-1 s2^j`` for zigzags.
    """
    if x.rank != 3:
        raise UnsupportedRank("hole and zigzag lengths are defined for rank 3")
    q = schlafli_type(x)[1]
    k = q // 2
    g = x.group
    if isinstance(x, RotationSystem):
        s1, s2 = x.generators
        holes = {j: element_order(g, s1 * s2 ** (1 - j)) for j in range(2, k + 1)}
        zig = {j: 2 * element_order(g, s1 * s2 ** (-j) * s1.inverse() * s2 ** j)
               for j in range(1, k + 1)}
    else:
        holes = {j: element_order(g, hole_word(j)) for j in range(2, k + 1)}
        zig = {j: element_order(g, zigzag_word(j)) for j in range(1, k + 1)}
    return HoleZigzagProfile(q, holes, zig)


def _letter_ops(letter, rotation: bool):
    g, e = letter
    if not rotation:
        return [g]
    # sigma_i moves a flag by gamma_i then gamma_{i-1}
    i = g + 1
    return [i, i - 1] if e == 1 else [i - 1, i]


def word_flag_periods(fg: FlagGraph, w: Word, rotation: bool = False) -> np.ndarray:
    """Per flag, the cycle length of the flag walk that realizes left
    multiplication by ``w`` (in the ``rho`` or, with ``rotation``, the
    ``sigma`` generators)."""
    N = fg.n_flags
    cur = np.arange(N)
    for letter in reversed(w.letters):
        for c in _letter_ops(letter, rotation):
            cur = fg.gamma[c][cur]
    return cycle_lengths(cur)


def cycle_lengths(perm: np.ndarray) -> np.ndarray:
    N = perm.size
    out = np.zeros(N, np.int64)
    for x in range(N):
        if out[x]:
            continue
        cyc = [x]
        y = int(perm[x])
        while y != x:
            cyc.append(y)
            y = int(perm[y])
        out[cyc] = len(cyc)
    return out


# Petrie schemes ----------------------------------------------------------------

@dataclass(frozen=True)
class PetrieScheme:
    permutation: tuple[int, ...]
    cycle: tuple[int, ...]
    acoptic: bool


def product_map(fg: FlagGraph, perm) -> np.ndarray:
    """``gamma_{i1} ... gamma_{in}`` acting on flags, ``gamma_{i1}`` first."""
    cur = np.arange(fg.n_flags)
    for i in perm:
        cur = fg.gamma[i][cur]
    return cur


def canonical_cycle(cyc: list[int]) -> tuple[int, ...]:
    """Least rotation over both directions (ids are distinct, so start at
    the minimum and pick the direction with the smaller successor)."""
    k = cyc.index(min(cyc))
    fwd = cyc[k:] + cyc[:k]
    back = [fwd[0]] + fwd[1:][::-1]
    return tuple(min(fwd, back))


def petrie_schemes(fg: FlagGraph | Polytope) -> list[PetrieScheme]:
    """All cycles of all ``n!`` products, each in canonical form."""
    if isinstance(fg, Polytope):
        fg = flag_graph(fg)
    F = fg.flags
    n = fg.rank
    out = []
    for perm in permutations(range(n)):
        m = product_map(fg, perm)
        seen = np.zeros(fg.n_flags, bool)
        for x in range(fg.n_flags):
            if seen[x]:
                continue
            cyc = [x]
            seen[x] = True
            y = int(m[x])
            while y != x:
                cyc.append(y)
                seen[y] = True
                y = int(m[y])
            rows = F[cyc]
            acoptic = all(np.unique(rows[:, j]).size == len(cyc) for j in range(n))
            out.append(PetrieScheme(perm, canonical_cycle(cyc), bool(acoptic)))
    return out


def petrie_orbit_counts(fg: FlagGraph | Polytope) -> dict[tuple[int, ...], int]:
    """Per permutation, the number of automorphism-group orbits on its
    cycles.  Automorphisms commute with every ``gamma_i``, so they permute
    the cycles of each product."""
    if isinstance(fg, Polytope):
        fg = flag_graph(fg)
    gens = automorphism_group(fg).generators
    N = fg.n_flags
    out = {}
    for perm in permutations(range(fg.rank)):
        m = product_map(fg, perm)
        ncyc, label = connected_components(coo_matrix(
            (np.ones(N, np.int8), (np.arange(N), m)), shape=(N, N)), directed=False)
        rows = [label[np.arange(N)]] + [label[g] for g in gens]
        src = np.concatenate([rows[0]] * (len(rows) - 1)) if gens else np.empty(0, np.int64)
        dst = np.concatenate(rows[1:]) if gens else np.empty(0, np.int64)
        k, _ = connected_components(coo_matrix(
            (np.ones(src.size, np.int8), (src, dst)), shape=(ncyc, ncyc)), directed=False)
        out[perm] = int(k)
    return out

# medial layer graphs --------------------------------------------------------------

@dataclass
class MedialGraph:
    """Bipartite graph on the edges (side 1) and 2-faces (side 2) of a
    rank 4 polytope."""

    graph: nx.Graph
    side: dict = field(default_factory=dict)

    @property
    def vertices(self):
        return list(self.graph.nodes)

    @property
    def edges(self):
        return list(self.graph.edges)

    def is_bipartite(self) -> bool:
        return all(self.side[a] != self.side[b] for a, b in self.graph.edges)

    def is_trivalent(self) -> bool:
        return all(d == 3 for _, d in self.graph.degree)

    def to_dot(self) -> str:
        lines = ["graph medial {"]
        for v in self.graph.nodes:
            shape = "circle" if self.side[v] == 1 else "box"
            lines.append(f"  \"{v[0]}{v[1]}\" [shape={shape}];")
        for a, b in self.graph.edges:
            lines.append(f"  \"{a[0]}{a[1]}\" -- \"{b[0]}{b[1]}\";")
        lines.append("}")
        return "\n".join(lines) + "\n"


def medial_layer_graph(p: Polytope, require_trivalent: bool = False) -> MedialGraph:
    if p.rank != 4:
        raise TypeMismatch(f"medial layer graphs need rank 4, got {p.rank}")
    if require_trivalent:
        t = combinatorial_profile(p).equivelar_type
        if t is None or t[0] != 3 or t[2] != 3:
            raise TypeMismatch(f"trivalence needs type {{3,q,3}}, got {t}")
    g = nx.Graph()
    side = {}
    for e in range(p.counts[1]):
        g.add_node(("e", e))
        side[("e", e)] = 1
    for f in range(p.counts[2]):
        g.add_node(("f", f))
        side[("f", f)] = 2
    for e, f in p.cover[2].tolist():
        g.add_edge(("e", e), ("f", f))
    return MedialGraph(g, side)


# graph automorphisms by partition refinement -------------------------------------------

DEFAULT_SEARCH_BUDGET = 10**6


def _refine(adj: list[list[int]], colors: list[int]) -> list[int]:
    """Coarsest equitable refinement of a colouring (colour refinement)."""
    n = len(adj)
    while True:
        sig = [(colors[v], tuple(sorted(colors[w] for w in adj[v]))) for v in range(n)]
        names = {s: k for k, s in enumerate(sorted(set(sig)))}
        new = [names[s] for s in sig]
        if len(names) == len(set(colors)):
            return new
        colors = new


def graph_automorphisms(g, budget: int = DEFAULT_SEARCH_BUDGET) -> np.ndarray:
    """All automorphisms of a connected graph as rows ``f[v]`` over the
    vertex order ``list(g.nodes)``.

    Vertices are mapped in breadth-first order; each new vertex must go to
    a neighbour of its parent's image with the same refined colour, and
    adjacency to every mapped vertex is checked.  ``LimitExceeded`` is
    raised after ``budget`` search nodes.
    """
    if isinstance(g, MedialGraph):
        g = g.graph
    nodes = list(g.nodes)
    index = {v: k for k, v in enumerate(nodes)}
    n = len(nodes)
    adj = [[index[w] for w in g.neighbors(v)] for v in nodes]
    adjset = [set(a) for a in adj]
    colors = _refine(adj, [0] * n)
    order = [0]
    parent = {0: -1}
    for v in order:
        for w in adj[v]:
            if w not in parent:
                parent[w] = v
                order.append(w)
    if len(order) != n:
        raise TypeMismatch("graph is not connected")
    pos = {v: k for k, v in enumerate(order)}
    back = [[u for u in adj[v] if pos[u] < pos[v]] for v in order]
    found = []
    nodes_seen = 0
    f = [-1] * n
    used = [False] * n

    def extend(k):
        nonlocal nodes_seen
        nodes_seen += 1
        if nodes_seen > budget:
            raise LimitExceeded(budget, "search nodes")
        if k == n:
            found.append(list(f))
            return
        v = order[k]
        cands = range(n) if k == 0 else adj[f[parent[v]]]
        for c in cands:
            if used[c] or colors[c] != colors[v] or len(adj[c]) != len(adj[v]):
                continue
            if any(f[u] not in adjset[c] for u in back[k]):
                continue
            f[v] = c
            used[c] = True
            extend(k + 1)
            used[c] = False
            f[v] = -1

    extend(0)
    return np.array(found, np.int64)


def _t_arcs(adj: list[list[int]], t: int) -> np.ndarray:
    arcs = [[v] for v in range(len(adj))]
    for _ in range(t):
        arcs = [a + [w] for a in arcs for w in adj[a[-1]] if len(a) < 2 or w != a[-2]]
    return np.array(arcs, np.int64).reshape(len(arcs), t + 1)


MAX_ARC_T = 7


def arc_transitivity(g, budget: int = DEFAULT_SEARCH_BUDGET) -> int:
    """Largest ``t`` such that the automorphism group is transitive on
    ``s``-arcs for every ``s <= t`` (capped at 7).  A graph that is not even
    vertex-transitive also gets 0; see :func:`symmetry_summary`."""
    graph = g.graph if isinstance(g, MedialGraph) else g
    if not all(d == 3 for _, d in graph.degree):
        raise TypeMismatch("arc transitivity is computed for trivalent graphs")
    autos = graph_automorphisms(graph, budget)
    nodes = list(graph.nodes)
    index = {v: k for k, v in enumerate(nodes)}
    adj = [[index[w] for w in graph.neighbors(v)] for v in nodes]
    t = 0
    for s in range(0, MAX_ARC_T + 1):
        arcs = _t_arcs(adj, s)
        orbit = np.unique(autos[:, arcs[0]], axis=0)
        if orbit.shape[0] != arcs.shape[0]:
            break
        t = s
    return t


@dataclass(frozen=True)
class SymmetrySummary:
    automorphisms: int
    vertex_transitive: bool
    edge_transitive: bool


def symmetry_summary(g, budget: int = DEFAULT_SEARCH_BUDGET) -> SymmetrySummary:
    graph = g.graph if isinstance(g, MedialGraph) else g
    autos = graph_automorphisms(graph, budget)
    nodes = list(graph.nodes)
    index = {v: k for k, v in enumerate(nodes)}
    vt = np.unique(autos[:, 0]).size == len(nodes)
    a, b = next(iter(graph.edges))
    ia, ib = index[a], index[b]
    imgs = {frozenset((int(x), int(y))) for x, y in zip(autos[:, ia], autos[:, ib])}
    return SymmetrySummary(len(autos), bool(vt), len(imgs) == graph.number_of_edges())


def girth(g) -> int:
    graph = g.graph if isinstance(g, MedialGraph) else g
    return nx.girth(graph)
