"""Ranked incidence structures, flag graphs and their symmetries.

Proper faces of rank ``j`` are numbered ``0..f_j-1``.  The least and greatest
faces are implicit.  Incidence is stored as covering pairs between
consecutive ranks; a flag is a row ``(F_0, ..., F_{n-1})`` of face numbers.
Flags are numbered in lexicographic order of these rows.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Any, Sequence

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

from .cgroups import RotationSystem, StringCGroup, verify_rotation_system, verify_string_cgroup
from .errors import PolyforgeError
from .groups import ConcreteGroup, bfs_layers
from .words import Word


class NotAPolytope(PolyforgeError):
    def __init__(self, report):
        self.report = report
        super().__init__(f"not a polytope: {report.violation} (witness {report.witness!r})")


@dataclass(frozen=True)
class AxiomReport:
    ok: bool
    violation: str | None = None
    witness: Any = None

    def __bool__(self):
        return self.ok


class Polytope:
    """A ranked poset of rank ``n`` with implicit least and greatest faces.

    ``cover[j]`` (``1 <= j <= n-1``) is an ``(m, 2)`` array of pairs
    ``(lower (j-1)-face, upper j-face)``.
    """

    def __init__(self, rank: int, counts: Sequence[int], cover: dict[int, np.ndarray],
                 provenance: str = "FromFlagGraph", source=None):
        if rank < 1 or len(counts) != rank:
            raise ValueError("need one face count per proper rank")
        self.rank = rank
        self.counts = tuple(int(c) for c in counts)
        self.cover = {}
        for j in range(1, rank):
            a = np.asarray(cover.get(j, np.empty((0, 2))), np.int64).reshape(-1, 2)
            self.cover[j] = np.unique(a, axis=0)
        self.provenance = provenance
        self.source = source

    def __repr__(self):
        return f"<Polytope rank={self.rank} f={self.counts}>"

    @classmethod
    def from_chains(cls, chains: np.ndarray, provenance: str = "FromFlagGraph",
                    source=None) -> Polytope:
        """Poset generated by the given maximal chains (rows)."""
        chains = np.asarray(chains, np.int64)
        n = chains.shape[1]
        cols = []
        counts = []
        for j in range(n):
            _, inv = np.unique(chains[:, j], return_inverse=True)
            cols.append(inv.reshape(-1))
            counts.append(int(inv.max()) + 1 if inv.size else 0)
        cover = {j: np.stack([cols[j - 1], cols[j]], axis=1) for j in range(1, n)}
        return cls(n, counts, cover, provenance, source)

    # structure ------------------------------------------------------------

    @property
    def f_vector(self) -> tuple[int, ...]:
        return self.counts

    def _up(self, j: int):
        """CSR of the upward covering from rank ``j-1`` to rank ``j``."""
        pairs = self.cover[j]
        order = np.lexsort((pairs[:, 1], pairs[:, 0]))
        pairs = pairs[order]
        ptr = np.zeros(self.counts[j - 1] + 1, np.int64)
        np.add.at(ptr, pairs[:, 0] + 1, 1)
        return np.cumsum(ptr), pairs[:, 1]

    def down(self, j: int, face: int) -> list[int]:
        pairs = self.cover[j]
        return sorted(pairs[pairs[:, 1] == face, 0].tolist())

    def up(self, j: int, face: int) -> list[int]:
        """Faces of rank ``j+1`` covering ``face`` of rank ``j``."""
        pairs = self.cover[j + 1]
        return sorted(pairs[pairs[:, 0] == face, 1].tolist())

    @cached_property
    def flags(self) -> np.ndarray:
        """All maximal chains, lexicographically sorted, shape ``(N, n)``."""
        chains = np.arange(self.counts[0], dtype=np.int64).reshape(-1, 1)
        for j in range(1, self.rank):
            ptr, idx = self._up(j)
            last = chains[:, -1]
            deg = ptr[last + 1] - ptr[last]
            rows = np.repeat(np.arange(chains.shape[0]), deg)
            start = np.repeat(ptr[last], deg)
            offs = np.arange(rows.size) - np.repeat(np.cumsum(deg) - deg, deg)
            chains = np.concatenate([chains[rows], idx[start + offs].reshape(-1, 1)], axis=1)
        if self.rank > 0:
            chains = chains[np.lexsort(chains.T[::-1])]
        chains.flags.writeable = False
        return chains

    @property
    def n_flags(self) -> int:
        return self.flags.shape[0]

    def flag_index(self, chain: Sequence[int]) -> int:
        f = self.flags
        hits = np.flatnonzero((f == np.asarray(chain)).all(axis=1))
        if hits.size != 1:
            raise KeyError(chain)
        return int(hits[0])

    # serialization --------------------------------------------------------

    def labels(self) -> list[list[int]]:
        """Global integer labels per rank ``-1..n``."""
        out = [[0]]
        nxt = 1
        for c in self.counts:
            out.append(list(range(nxt, nxt + c)))
            nxt += c
        out.append([nxt])
        return out

    def to_json(self) -> dict:
        lab = self.labels()
        inc = [[0, v] for v in lab[1]]
        for j in range(1, self.rank):
            inc += [[lab[j][a], lab[j + 1][b]] for a, b in self.cover[j].tolist()]
        inc += [[f, lab[-1][0]] for f in lab[self.rank]]
        return {"rank": self.rank, "faces": lab, "incidence": sorted(inc)}

    @classmethod
    def from_json(cls, data: dict) -> Polytope:
        n = int(data["rank"])
        faces = data["faces"]
        if len(faces) != n + 2:
            raise ValueError("expected face lists for ranks -1..n")
        where = {}
        for r, labs in enumerate(faces):
            for k, lab in enumerate(labs):
                if lab in where:
                    raise ValueError(f"duplicate face label {lab}")
                where[lab] = (r - 1, k)
        cover: dict[int, list] = {j: [] for j in range(1, n)}
        for lo, hi in data["incidence"]:
            (ra, a), (rb, b) = where[lo], where[hi]
            if rb != ra + 1:
                raise ValueError(f"incidence {lo}-{hi} is not between consecutive ranks")
            if 1 <= rb <= n - 1:
                cover[rb].append((a, b))
        return cls(n, [len(faces[j + 1]) for j in range(n)],
                   {j: np.array(v, np.int64).reshape(-1, 2) for j, v in cover.items()},
                   "FromJson")


# axioms ---------------------------------------------------------------------

def verify_axioms(p: Polytope) -> AxiomReport:
    """Check rankedness, the diamond condition and strong flag-connectivity.

    Strong flag-connectivity is tested section by section: for ranks
    ``a < b`` the flags sharing their faces outside ``(a, b)`` must be
    connected through adjacencies of ranks strictly between.
    """
    n = p.rank
    if any(c == 0 for c in p.counts):
        return AxiomReport(False, "ranked", ("empty rank", p.counts.index(0)))
    for j in range(1, n):
        pairs = p.cover[j]
        lonely = np.setdiff1d(np.arange(p.counts[j]), pairs[:, 1])
        if lonely.size:
            return AxiomReport(False, "ranked", ((j, int(lonely[0])), "covers nothing"))
        lonely = np.setdiff1d(np.arange(p.counts[j - 1]), pairs[:, 0])
        if lonely.size:
            return AxiomReport(False, "ranked", ((j - 1, int(lonely[0])), "is covered by nothing"))
    # diamond: pairs F < G two ranks apart, including the improper faces
    if n >= 2:
        deg = np.bincount(p.cover[1][:, 1], minlength=p.counts[1])
        bad = np.flatnonzero(deg != 2)
        if bad.size:
            return AxiomReport(False, "diamond", ((-1, 0), (1, int(bad[0])), int(deg[bad[0]])))
        deg = np.bincount(p.cover[n - 1][:, 0], minlength=p.counts[n - 2])
        bad = np.flatnonzero(deg != 2)
        if bad.size:
            return AxiomReport(False, "diamond", ((n - 2, int(bad[0])), (n, 0), int(deg[bad[0]])))
    else:
        if p.counts[0] != 2:
            return AxiomReport(False, "diamond", ((-1, 0), (1, 0), p.counts[0]))
    for j in range(1, n - 1):
        lo, hi = p.cover[j], p.cover[j + 1]
        # join (F, H) with (H, G) on H
        lo = lo[np.argsort(lo[:, 1], kind="stable")]
        starts = np.searchsorted(lo[:, 1], hi[:, 0], "left")
        ends = np.searchsorted(lo[:, 1], hi[:, 0], "right")
        cnt = ends - starts
        rows = np.repeat(np.arange(hi.shape[0]), cnt)
        offs = np.arange(rows.size) - np.repeat(np.cumsum(cnt) - cnt, cnt)
        f = lo[np.repeat(starts, cnt) + offs, 0]
        g = hi[rows, 1]
        keys, counts = np.unique(np.stack([f, g], axis=1), axis=0, return_counts=True)
        bad = np.flatnonzero(counts != 2)
        if bad.size:
            k = bad[0]
            return AxiomReport(False, "diamond",
                               ((j - 1, int(keys[k, 0])), (j + 1, int(keys[k, 1])), int(counts[k])))
    fg = FlagGraph.of(p)
    F = fg.flags
    N = F.shape[0]
    for a in range(-1, n):
        for b in range(a + 3, n + 1):
            colors = list(range(a + 1, b))
            ncomp, comp = _components(fg.gamma[colors], N)
            outer = [c for c in range(n) if c <= a or c >= b]
            if outer:
                _, key = np.unique(F[:, outer], axis=0, return_inverse=True)
                key = key.reshape(-1)
                nkeys = int(key.max()) + 1
            else:
                key = np.zeros(N, np.int64)
                nkeys = 1
            if ncomp != nkeys:
                # a key whose flags fall into two components
                first = np.full(nkeys, -1)
                for x in range(N):
                    k = key[x]
                    if first[k] < 0:
                        first[k] = x
                    elif comp[first[k]] != comp[x]:
                        return AxiomReport(False, "flag-connectivity",
                                           ((a, b), int(first[k]), x))
    return AxiomReport(True)


def _components(gammas: np.ndarray, N: int):
    if len(gammas) == 0:
        return N, np.arange(N)
    src = np.tile(np.arange(N), len(gammas))
    dst = np.concatenate(list(gammas))
    m = coo_matrix((np.ones(src.size, np.int8), (src, dst)), shape=(N, N))
    return connected_components(m, directed=False)


def require_polytope(p: Polytope) -> Polytope:
    r = verify_axioms(p)
    if not r.ok:
        raise NotAPolytope(r)
    return p


# flag graphs ----------------------------------------------------------------

class FlagGraph:
    """Flags and the ``i``-adjacency involutions ``gamma[i]``."""

    def __init__(self, flags: np.ndarray, gamma: np.ndarray):
        self.flags = flags
        self.gamma = gamma
        self.rank = flags.shape[1]

    @classmethod
    def of(cls, p: Polytope) -> FlagGraph:
        cached = getattr(p, "_flag_graph", None)
        if cached is not None:
            return cached
        F = p.flags
        N, n = F.shape
        gamma = np.empty((n, N), np.int64)
        for i in range(n):
            rest = [c for c in range(n) if c != i]
            keys = F[:, rest]
            order = np.lexsort(keys.T[::-1]) if rest else np.arange(N)
            ks = keys[order]
            if N % 2:
                bad = True
            elif rest:
                bad = not (ks[0::2] == ks[1::2]).all() or (ks[1:-1:2] == ks[2::2]).all(axis=1).any()
            else:
                bad = N != 2
            if bad:
                raise NotAPolytope(AxiomReport(False, "diamond", ("adjacency", i)))
            a, b = order[0::2], order[1::2]
            gamma[i, a] = b
            gamma[i, b] = a
        gamma.flags.writeable = False
        fg = cls(F, gamma)
        p._flag_graph = fg
        return fg

    @property
    def n_flags(self) -> int:
        return self.flags.shape[0]

    @cached_property
    def layers(self):
        return bfs_layers(list(self.gamma), self.n_flags)

    def is_connected(self) -> bool:
        return self.layers is not None

    def to_dot(self) -> str:
        lines = ["graph flags {"]
        for i in range(self.rank):
            g = self.gamma[i]
            for x in range(self.n_flags):
                y = int(g[x])
                if x < y:
                    lines.append(f"  {x} -- {y} [color={i}];")
        lines.append("}")
        return "\n".join(lines) + "\n"


def flag_graph(p: Polytope) -> FlagGraph:
    return FlagGraph.of(require_polytope(p))


# propagation of flag maps ----------------------------------------------------

_CHUNK_CELLS = 1 << 22


def _propagate(src: FlagGraph, dst: FlagGraph, colors: Sequence[int], targets: np.ndarray,
               base: int = 0):
    """Yield ``(target, map)`` for every target flag that extends to a
    colour-respecting bijection ``x -> map[x]`` with ``gamma_i`` of ``src``
    carried to ``gamma_{colors[i]}`` of ``dst``."""
    N = src.n_flags
    if dst.n_flags != N or src.layers is None or dst.layers is None:
        return
    if base != 0:
        raise ValueError("propagation starts at flag 0")
    dg = dst.gamma[list(colors)]
    chunk = max(1, _CHUNK_CELLS // max(N, 1))
    for s in range(0, len(targets), chunk):
        T = np.asarray(targets[s:s + chunk], np.int64)
        M = np.empty((T.size, N), np.int64)
        M[:, 0] = T
        for child, parent, gi in src.layers:
            for i in range(src.rank):
                sel = gi == i
                if sel.any():
                    M[:, child[sel]] = dg[i][M[:, parent[sel]]]
        ok = np.ones(T.size, bool)
        for i in range(src.rank):
            ok &= (M[:, src.gamma[i]] == dg[i][M]).all(axis=1)
        for k in np.flatnonzero(ok):
            yield int(T[k]), M[k]


@dataclass
class AutomorphismGroup:
    """Colour-preserving automorphisms of a flag graph.

    The action on flags is free, so an automorphism is fixed by the image
    of flag 0; ``base_images`` lists those images and :meth:`perm`
    rebuilds any element.
    """

    flag_graph: FlagGraph
    base_images: np.ndarray
    generators: list[np.ndarray]
    orbit: np.ndarray
    _perms: dict = field(default_factory=dict, repr=False)

    @property
    def order(self) -> int:
        return int(self.base_images.size)

    @property
    def n_orbits(self) -> int:
        return int(self.orbit.max()) + 1

    def perm(self, image: int) -> np.ndarray:
        if image not in self._perms:
            fg = self.flag_graph
            got = list(_propagate(fg, fg, range(fg.rank), np.array([image])))
            if not got:
                raise KeyError(image)
            self._perms[image] = got[0][1]
        return self._perms[image]

    def __iter__(self):
        for t in self.base_images.tolist():
            yield self.perm(t)


def automorphism_group(fg: FlagGraph | Polytope) -> AutomorphismGroup:
    if isinstance(fg, Polytope):
        fg = flag_graph(fg)
    N = fg.n_flags
    images = []
    gens: list[np.ndarray] = []
    reach = np.zeros(N, bool)
    reach[0] = True
    for t, m in _propagate(fg, fg, range(fg.rank), np.arange(N)):
        images.append(t)
        if not reach[t]:
            gens.append(m.copy())
            reach = _orbit_of_zero(gens, N)
    ncomp, orbit = _components(np.array(gens) if gens else np.empty((0, N), np.int64), N)
    # relabel orbits by first flag
    _, first = np.unique(orbit, return_index=True)
    relabel = np.empty(ncomp, np.int64)
    relabel[np.argsort(first)] = np.arange(ncomp)
    return AutomorphismGroup(fg, np.array(sorted(images), np.int64), gens, relabel[orbit])


def _orbit_of_zero(gens, N):
    seen = np.zeros(N, bool)
    seen[0] = True
    frontier = np.array([0])
    while frontier.size:
        nxt = np.unique(np.concatenate([g[frontier] for g in gens]))
        nxt = nxt[~seen[nxt]]
        seen[nxt] = True
        frontier = nxt
    return seen


# transitivity -----------------------------------------------------------------

REGULAR, CHIRAL = "Regular", "Chiral"
FULLY_TRANSITIVE, EDGE_TRANSITIVE, OTHER = "FullyTransitive", "EdgeTransitive", "Other"


@dataclass(frozen=True)
class TransitivityReport:
    flag_orbits: int
    orbit_counts_per_rank: tuple[int, ...]
    classification: str
    adjacency_orbit_data: tuple[bool, ...]
    automorphism_order: int

    @property
    def fully_transitive(self) -> bool:
        return all(c == 1 for c in self.orbit_counts_per_rank)


def face_orbits(p: Polytope, orbit: np.ndarray) -> list[np.ndarray]:
    """Orbit label per face of each rank, given the flag-orbit labels."""
    F = p.flags
    k = int(orbit.max()) + 1
    out = []
    for j in range(p.rank):
        f = p.counts[j]
        m = coo_matrix((np.ones(F.shape[0], np.int8), (F[:, j], f + orbit)),
                       shape=(f + k, f + k))
        _, lab = connected_components(m, directed=False)
        out.append(lab[:f])
    return out


def transitivity_report(p: Polytope, aut: AutomorphismGroup | None = None) -> TransitivityReport:
    fg = flag_graph(p)
    aut = automorphism_group(fg) if aut is None else aut
    orbit = aut.orbit
    per_rank = tuple(int(np.unique(lab).size) for lab in face_orbits(p, orbit))
    adj = tuple(bool((orbit == orbit[fg.gamma[i]]).any()) for i in range(p.rank))
    k = aut.n_orbits
    if k == 1:
        cls = REGULAR
    elif k == 2 and not any(adj):
        cls = CHIRAL
    elif all(c == 1 for c in per_rank):
        cls = FULLY_TRANSITIVE
    elif p.rank >= 2 and per_rank[1] == 1:
        cls = EDGE_TRANSITIVE
    else:
        cls = OTHER
    return TransitivityReport(k, per_rank, cls, adj, aut.order)


# duality and isomorphism --------------------------------------------------------

def dual(p: Polytope) -> Polytope:
    n = p.rank
    cover = {n - j: p.cover[j][:, ::-1] for j in range(1, n)}
    return Polytope(n, p.counts[::-1], cover, "Dual", p)


@dataclass(frozen=True)
class Duality:
    flag_map: np.ndarray
    is_polarity: bool
    count: int


def find_duality(p: Polytope, cap: int = 10**4) -> Duality | None:
    """A duality of ``p`` as a flag map reversing colours, or ``None``.

    The first one found (by image of flag 0) is reported; ``is_polarity``
    looks at up to ``cap`` dualities for one of period 2.
    """
    fg = flag_graph(p)
    n = p.rank
    if p.counts != p.counts[::-1]:
        return None
    first = None
    polar = False
    count = 0
    idx = np.arange(fg.n_flags)
    for _, m in _propagate(fg, fg, [n - 1 - i for i in range(n)], idx):
        count += 1
        if first is None:
            first = m.copy()
        if np.array_equal(m[m], idx):
            polar = True
            break
        if count >= cap:
            break
    if first is None:
        return None
    return Duality(first, polar, count)


def is_isomorphic(p: Polytope, q: Polytope):
    """Colour-preserving flag isomorphism ``p -> q`` as a flag map, or ``None``."""
    if p.rank != q.rank or p.counts != q.counts:
        return None
    fp, fq = flag_graph(p), flag_graph(q)
    if fp.n_flags != fq.n_flags:
        return None
    for _, m in _propagate(fp, fq, range(p.rank), np.arange(fq.n_flags)):
        return m
    return None


# profiles and sections ---------------------------------------------------------

@dataclass(frozen=True)
class CombinatorialProfile:
    f_vector: tuple[int, ...]
    equivelar_type: tuple[int, ...] | None
    is_neighborly: bool


def section_sizes(fg: FlagGraph, j: int) -> np.ndarray:
    """Per flag, half the size of its orbit under gamma_{j-1}, gamma_j."""
    _, comp = _components(fg.gamma[[j - 1, j]], fg.n_flags)
    sizes = np.bincount(comp)
    return sizes[comp] // 2


def combinatorial_profile(p: Polytope) -> CombinatorialProfile:
    fg = flag_graph(p)
    etype = []
    for j in range(1, p.rank):
        s = np.unique(section_sizes(fg, j))
        if s.size != 1:
            etype = None
            break
        etype.append(int(s[0]))
    if p.rank >= 2:
        ends = p.cover[1][np.argsort(p.cover[1][:, 1], kind="stable")][:, 0].reshape(-1, 2)
        pairs = np.unique(np.sort(ends, axis=1), axis=0)
        v = p.counts[0]
        neighborly = pairs.shape[0] == v * (v - 1) // 2
    else:
        neighborly = True
    return CombinatorialProfile(p.counts, tuple(etype) if etype is not None else None,
                                bool(neighborly))


def section(p: Polytope, lower: tuple[int, int] | None, upper: tuple[int, int] | None) -> Polytope:
    """The section ``G/F`` for ``F = (rank, face)`` below ``G``; ``None`` means
    the improper face at that end."""
    F = p.flags
    a = -1 if lower is None else lower[0]
    b = p.rank if upper is None else upper[0]
    if b - a < 2:
        raise ValueError("section needs rank at least 1")
    sel = np.ones(F.shape[0], bool)
    if lower is not None:
        sel &= F[:, a] == lower[1]
    if upper is not None:
        sel &= F[:, b] == upper[1]
    if not sel.any():
        raise ValueError("faces are not incident")
    sub = np.unique(F[sel][:, a + 1:b], axis=0)
    return Polytope.from_chains(sub, "Section", p)


def facet(p: Polytope, k: int = 0) -> Polytope:
    return section(p, None, (p.rank - 1, k))


def vertex_figure(p: Polytope, k: int = 0) -> Polytope:
    return section(p, (0, k), None)


# polytopes from groups -------------------------------------------------------------

def _left_cosets_labels(g: ConcreteGroup, words: Sequence[Word]) -> np.ndarray:
    """Label of the right coset ``H x`` for every element ``x``, ``H = <words>``."""
    N = g.order
    if not words:
        return np.arange(N)
    _, lab = _components(np.array([g.left_perm(w) for w in words]), N)
    _, first = np.unique(lab, return_index=True)
    relabel = np.empty(first.size, np.int64)
    relabel[np.argsort(first)] = np.arange(first.size)
    return relabel[lab]


def _coset_polytope(g: ConcreteGroup, stabilizers: Sequence[Sequence[Word]],
                    provenance: str, source) -> Polytope:
    n = len(stabilizers)
    cols = [_left_cosets_labels(g, ws) for ws in stabilizers]
    counts = [int(c.max()) + 1 for c in cols]
    cover = {j: np.stack([cols[j - 1], cols[j]], axis=1) for j in range(1, n)}
    return Polytope(n, counts, cover, provenance, source)


def polytope_from_cgroup(c: StringCGroup) -> Polytope:
    """Faces of rank ``j`` are the right cosets of ``<rho_i : i != j>``."""
    n = c.rank
    stabs = [[Word.gen(i) for i in range(n) if i != j] for j in range(n)]
    return _coset_polytope(c.group, stabs, "FromCGroup", c)


def polytope_from_rotation_system(r: RotationSystem) -> Polytope:
    """Cosets of the base-face stabilizers in the rotation group."""
    stabs = [r.face_stabilizer_words(j) for j in range(r.rank)]
    return _coset_polytope(r.group, stabs, "FromRotationSystem", r)


def _base_automorphisms(fg: FlagGraph, targets: Sequence[int]) -> list[np.ndarray]:
    out = []
    for t in targets:
        got = list(_propagate(fg, fg, range(fg.rank), np.array([t])))
        if not got:
            raise ValueError(f"no automorphism moves the base flag to flag {t}")
        out.append(got[0][1])
    return out


def cgroup_of(p: Polytope) -> StringCGroup:
    """The automorphism group of a regular polytope with generators
    ``rho_i`` sending flag 0 to its ``i``-adjacent flag."""
    fg = flag_graph(p)
    perms = _base_automorphisms(fg, [int(fg.gamma[i][0]) for i in range(p.rank)])
    return verify_string_cgroup(ConcreteGroup.from_generators(perms))


def rotation_system_of(p: Polytope) -> RotationSystem:
    """Rotations ``sigma_i`` sending flag 0 to ``(flag 0)^{i, i-1}``."""
    fg = flag_graph(p)
    g = fg.gamma
    targets = [int(g[i - 1][g[i][0]]) for i in range(1, p.rank)]
    perms = _base_automorphisms(fg, targets)
    grp = ConcreteGroup.from_generators(perms)
    return verify_rotation_system(grp, p.rank, heuristic=p.rank >= 5)
