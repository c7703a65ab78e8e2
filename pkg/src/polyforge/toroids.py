"""Toroidal polytopes: quotients of Euclidean tessellations by lattices,
and presentation builders for toroidal families.

Plane tessellations use integer lattice coordinates.  For the triangular
lattice the coordinates are taken along ``e1 = (1, 0)`` and
``e2 = (1/2, sqrt(3)/2)``, so a rotation by 60 degrees is
``(a, b) -> (-b, a + b)`` and no floating point is involved.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations, permutations, product
from math import comb, factorial

import numpy as np

from .errors import DegenerateQuotient, InvalidRange, LimitExceeded
from .polytope import Polytope, dual, verify_axioms
from .words import Presentation, Word

SQ44, TRI36, HEX63 = "Sq44", "Tri36", "Hex63"
FAMILIES = (SQ44, TRI36, HEX63)

MAX_TOROID_FLAGS = 2 * 10**6


@dataclass(frozen=True)
class LatticeBasis:
    u: tuple[int, int]
    v: tuple[int, int]

    def __post_init__(self):
        object.__setattr__(self, "u", tuple(int(x) for x in self.u))
        object.__setattr__(self, "v", tuple(int(x) for x in self.v))
        if self.det == 0:
            raise InvalidRange(f"basis {self.u}, {self.v} is degenerate")

    @property
    def det(self) -> int:
        return self.u[0] * self.v[1] - self.u[1] * self.v[0]

    @classmethod
    def square(cls, s: int, t: int) -> LatticeBasis:
        """``(s, t)`` and its quarter turn ``(-t, s)``."""
        return cls((s, t), (-t, s))

    @classmethod
    def triangular(cls, s: int, t: int) -> LatticeBasis:
        """``(s, t)`` and its sixth turn, in triangular-lattice coordinates."""
        return cls((s, t), (-t, s + t))


@dataclass(frozen=True)
class ToroidSpec:
    family: str
    params: tuple[int, ...]


# lattice arithmetic ----------------------------------------------------------

def hnf(rows) -> np.ndarray:
    """Upper triangular basis (positive diagonal, reduced above it) of the
    full-rank lattice spanned by the integer ``rows``."""
    a = [list(map(int, r)) for r in rows]
    if not a:
        raise InvalidRange("empty lattice")
    d = len(a[0])
    out = []
    for col in range(d):
        live = [r for r in a if r[col] != 0]
        rest = [r for r in a if r[col] == 0]
        while len(live) > 1:
            live.sort(key=lambda r: abs(r[col]))
            piv = live[0]
            nxt = [piv]
            for r in live[1:]:
                q = r[col] // piv[col]
                r = [x - q * y for x, y in zip(r, piv)]
                (nxt if r[col] != 0 else rest).append(r)
            live = nxt
        if not live:
            raise InvalidRange("lattice is not of full rank")
        piv = live[0]
        if piv[col] < 0:
            piv = [-x for x in piv]
        out.append(piv)
        a = rest
    for i in range(d):
        for k in range(i):
            q = out[k][i] // out[i][i]
            out[k] = [x - q * y for x, y in zip(out[k], out[i])]
    return np.array(out, np.int64)


def reduce_points(H: np.ndarray, pts: np.ndarray) -> np.ndarray:
    """Canonical representatives ``0 <= x_i < H_ii`` of points mod the lattice."""
    x = np.array(pts, np.int64, copy=True)
    for i in range(H.shape[0]):
        q = np.floor_divide(x[:, i], H[i, i])
        x -= q[:, None] * H[i]
    return x


def _point_index(H: np.ndarray, pts: np.ndarray) -> np.ndarray:
    r = reduce_points(H, pts)
    idx = np.zeros(r.shape[0], np.int64)
    for i in range(H.shape[0]):
        idx = idx * H[i, i] + r[:, i]
    return idx


def _cells(H: np.ndarray) -> np.ndarray:
    diag = [int(H[i, i]) for i in range(H.shape[0])]
    return np.array(list(product(*[range(m) for m in diag])), np.int64).reshape(-1, len(diag))


# plane tessellations ------------------------------------------------------------
# Edges are endpoint offsets from a cell; faces list their edges as
# (edge type, cell offset) in cyclic order.  Type 0 items at cell 0 form
# the base flag.

_SQ_EDGES = [((0, 0), (0, 1)), ((0, 0), (1, 0))]
_SQ_FACES = [[(1, (0, 0)), (0, (1, 0)), (1, (0, 1)), (0, (0, 0))]]

_TRI_EDGES = [((0, 0), (1, 0)), ((0, 0), (0, 1)), ((1, 0), (0, 1))]
_TRI_FACES = [[(0, (0, 0)), (2, (0, 0)), (1, (0, 0))],
              [(2, (0, 0)), (1, (1, 0)), (0, (0, 1))]]

_PLANE = {SQ44: (_SQ_EDGES, _SQ_FACES), TRI36: (_TRI_EDGES, _TRI_FACES)}

_ROT = {SQ44: np.array([[0, -1], [1, 0]]), TRI36: np.array([[0, -1], [1, 1]])}


def _plane_quotient(family: str, H: np.ndarray) -> Polytope:
    edges, faces = _PLANE[family]
    cells = _cells(H)
    D = cells.shape[0]
    base = _point_index(H, cells)
    order = np.argsort(base)
    cells = cells[order]
    ev, fe = [], []
    for t, (o1, o2) in enumerate(edges):
        eid = t * D + np.arange(D)
        for o in (o1, o2):
            ev.append(np.stack([_point_index(H, cells + np.array(o)), eid], axis=1))
    for t, fedges in enumerate(faces):
        fid = t * D + np.arange(D)
        for et, o in fedges:
            fe.append(np.stack([et * D + _point_index(H, cells + np.array(o)), fid], axis=1))
    return Polytope(3, (D, len(edges) * D, len(faces) * D),
                    {1: np.concatenate(ev), 2: np.concatenate(fe)}, "FromQuotient")


def torus_map(family: str, basis: LatticeBasis) -> Polytope:
    """Quotient of the plane tessellation ``{4,4}``, ``{3,6}`` or ``{6,3}``
    by the lattice spanned by ``basis``."""
    if family not in FAMILIES:
        raise InvalidRange(f"unknown family {family!r}")
    if not isinstance(basis, LatticeBasis):
        basis = LatticeBasis(*basis)
    if 12 * abs(basis.det) * 2 > MAX_TOROID_FLAGS:
        raise LimitExceeded(MAX_TOROID_FLAGS, "flags")
    H = hnf([basis.u, basis.v])
    p = _plane_quotient(SQ44 if family == SQ44 else TRI36, H)
    if family == HEX63:
        p = dual(p)
    report = verify_axioms(p)
    if not report.ok:
        raise DegenerateQuotient(report)
    p.provenance = "FromQuotient"
    p.source = ToroidSpec(family, basis.u + basis.v)
    return p


# the affine plane model: rotations and translation words -------------------------

class _PlaneModel:
    """The infinite tessellation with its rotation group acting on flags."""

    def __init__(self, family: str, radius: int = 6):
        edges, faces = _PLANE[family]
        self.family = family
        self.rot = [np.linalg.matrix_power(_ROT[family], k) for k in range(6 if family == TRI36 else 4)]
        self.face_edges = {}
        self.edge_faces: dict[frozenset, list] = {}
        rng = range(-radius, radius + 1)
        for x, y in product(rng, rng):
            for fedges in faces:
                es = []
                for et, o in fedges:
                    c = (x + o[0], y + o[1])
                    a, b = edges[et]
                    es.append(frozenset({(c[0] + a[0], c[1] + a[1]), (c[0] + b[0], c[1] + b[1])}))
                key = frozenset().union(*es)
                self.face_edges[key] = es
                for e in es:
                    self.edge_faces.setdefault(e, []).append(key)
        a, b = edges[0]
        e0 = frozenset({a, b})
        f0 = frozenset()
        for et, o in faces[0]:
            f0 |= {(o[0] + p[0], o[1] + p[1]) for p in edges[et]}
        self.base = ((0, 0), e0, f0)

    def adjacent(self, flag, i):
        v, e, f = flag
        if i == 0:
            return (next(iter(e - {v})), e, f)
        if i == 1:
            return (v, next(x for x in self.face_edges[f] if v in x and x != e), f)
        return (v, e, next(x for x in self.edge_faces[e] if x != f))

    @staticmethod
    def _apply(g, pt):
        A, b = g
        return (int(A[0, 0] * pt[0] + A[0, 1] * pt[1] + b[0]),
                int(A[1, 0] * pt[0] + A[1, 1] * pt[1] + b[1]))

    def map_flag(self, g, flag):
        v, e, f = flag
        return (self._apply(g, v), frozenset(self._apply(g, p) for p in e),
                frozenset(self._apply(g, p) for p in f))

    def carrying(self, src, dst):
        """The rotation (affine, orientation preserving) taking ``src`` to ``dst``."""
        for A in self.rot:
            w = A @ np.array(src[0])
            g = (A, (dst[0][0] - int(w[0]), dst[0][1] - int(w[1])))
            if self.map_flag(g, src) == dst:
                return g
        raise ValueError("no rotation carries these flags")

    def sigmas(self):
        b = self.base
        s1 = self.carrying(b, self.adjacent(self.adjacent(b, 1), 0))
        s2 = self.carrying(b, self.adjacent(self.adjacent(b, 2), 1))
        return s1, s2


def _key(g):
    A, b = g
    return (tuple(int(x) for x in A.ravel()), tuple(b))


def _compose(g, h):
    """Apply ``g`` first, then ``h``."""
    A, a = g
    B, b = h
    w = B @ np.array(a)
    return (B @ A, (int(w[0]) + b[0], int(w[1]) + b[1]))


def _inverse(g):
    A, a = g
    Ai = np.round(np.linalg.inv(A)).astype(np.int64)
    w = Ai @ np.array(a)
    return (Ai, (-int(w[0]), -int(w[1])))


@lru_cache(maxsize=None)
def translation_words(family: str) -> tuple[Word, Word]:
    """Shortest words in ``sigma_1, sigma_2`` acting as the unit
    translations along the two lattice axes (breadth-first search)."""
    m = _PlaneModel(family)
    s1, s2 = m.sigmas()
    gens = [((0, 1), s1), ((0, -1), _inverse(s1)), ((1, 1), s2), ((1, -1), _inverse(s2))]
    ident = (np.eye(2, dtype=np.int64), (0, 0))
    want = {_key((np.eye(2, dtype=np.int64), (1, 0))): None,
            _key((np.eye(2, dtype=np.int64), (0, 1))): None}
    seen = {_key(ident)}
    queue = deque([(ident, ())])
    while queue and any(v is None for v in want.values()):
        g, w = queue.popleft()
        for letter, h in gens:
            nxt = _compose(g, h)
            k = _key(nxt)
            if k in seen:
                continue
            seen.add(k)
            nw = w + (letter,)
            if k in want and want[k] is None:
                want[k] = Word(nw)
            if len(nw) < 12:
                queue.append((nxt, nw))
    t1, t2 = want.values()
    if t1 is None or t2 is None:
        raise RuntimeError("translation words not found")
    return t1, t2


def rotation_presentation(family: str, s: int, t: int) -> Presentation:
    """Rotation group presentation of the torus map of type
    ``{4,4}``, ``{3,6}`` or ``{6,3}`` with parameters ``(s, t)``."""
    s1, s2 = Word.gen(0), Word.gen(1)
    if family == SQ44:
        extra = (s1.inverse() * s2) ** s * (s1 * s2.inverse()) ** t
        return Presentation(2, (False, False), (s1 ** 4, s2 ** 4, (s1 * s2) ** 2, extra))
    if family == TRI36:
        t1, t2 = translation_words(TRI36)
        return Presentation(2, (False, False),
                            (s1 ** 3, s2 ** 6, (s1 * s2) ** 2, t1 ** s * t2 ** t))
    if family == HEX63:
        base = rotation_presentation(TRI36, s, t)
        # duality: sigma_1 -> sigma_2^-1, sigma_2 -> sigma_1^-1
        images = [s2.inverse(), s1.inverse()]
        return Presentation(2, (False, False), tuple(r.substitute(images) for r in base.relators))
    raise InvalidRange(f"unknown family {family!r}")


def family_basis(family: str, s: int, t: int) -> LatticeBasis:
    return LatticeBasis.square(s, t) if family == SQ44 else LatticeBasis.triangular(s, t)


@dataclass
class TorusResult:
    polytope: Polytope
    presentation: Presentation
    regular: bool


def regular_or_chiral_torus(family: str, s: int, t: int) -> TorusResult:
    """The map ``{p,q}_(s,t)`` with a presentation of its rotation group.

    The map is regular when ``t == 0`` or ``s == t`` (or ``s == 0``) and
    chiral otherwise.
    """
    if (s, t) == (0, 0):
        raise InvalidRange("(s, t) must be nonzero")
    p = torus_map(family, family_basis(family, s, t))
    regular = s == 0 or t == 0 or s == t
    return TorusResult(p, rotation_presentation(family, s, t), regular)


def torus44_cgroup_presentation(s: int, t: int) -> Presentation:
    """String C-group presentation of the regular ``{4,4}_(s,0)`` or ``{4,4}_(s,s)``."""
    if t == 0 or s == 0:
        return hole_zigzag_presentation(4, 4, holes=[(2, max(s, t))])
    if s == t:
        return hole_zigzag_presentation(4, 4, zigzags=[(1, 2 * s)])
    raise InvalidRange(f"{{4,4}}_({s},{t}) is chiral")


# cubic toroids -------------------------------------------------------------------

def _cubic_lattice(d: int, s: int, k: int) -> list[tuple[int, ...]]:
    base = (s,) * k + (0,) * (d - k)
    vecs = set()
    for perm in set(permutations(base)):
        nz = [i for i, x in enumerate(perm) if x]
        for signs in product((1, -1), repeat=len(nz)):
            v = list(perm)
            for i, sg in zip(nz, signs):
                v[i] *= sg
            vecs.add(tuple(v))
    return sorted(vecs)


def cubic_toroid(n: int, s: int, k: int) -> Polytope:
    """``{4,3^(n-3),4}_(s^k,0^(n-1-k))``: the cubical tessellation of
    ``(n-1)``-space modulo the lattice of signed permutations of
    ``(s^k, 0^(n-1-k))``."""
    if n < 3:
        raise InvalidRange("cubic toroids need rank n >= 3")
    d = n - 1
    if s < 2 or k not in {1, 2, d}:
        raise InvalidRange(f"need s >= 2 and k in {{1, 2, {d}}}")
    H = hnf(_cubic_lattice(d, s, k))
    D = int(np.prod(np.diag(H)))
    if D * 2 ** d * factorial(d) > MAX_TOROID_FLAGS:
        raise LimitExceeded(MAX_TOROID_FLAGS, "flags")
    cells = _cells(H)
    cells = cells[np.argsort(_point_index(H, cells))]
    subsets = [list(combinations(range(d), j)) for j in range(d + 1)]
    where = [{S: m for m, S in enumerate(subs)} for subs in subsets]
    cover = {}
    for j in range(1, d + 1):
        pairs = []
        for m, S in enumerate(subsets[j]):
            up = m * D + np.arange(D)
            for i in S:
                T = tuple(x for x in S if x != i)
                off = np.zeros(d, np.int64)
                off[i] = 1
                for shift in (0, 1):
                    low = where[j - 1][T] * D + _point_index(H, cells + shift * off)
                    pairs.append(np.stack([low, up], axis=1))
        cover[j] = np.concatenate(pairs)
    p = Polytope(n, [comb(d, j) * D for j in range(d + 1)], cover, "FromQuotient",
                 ToroidSpec("Cubic", (n, s, k)))
    report = verify_axioms(p)
    if not report.ok:
        raise DegenerateQuotient(report)
    return p


# presentations -------------------------------------------------------------------

R5_FORWARD = (3, 3, 4, 3)
R5_DUAL = (3, 4, 3, 3)


def rank5_toroid_presentation(which, s: int, k: int) -> Presentation:
    """Coxeter relations of ``{3,3,4,3}`` (or its dual) plus the extra
    relator ``(r0 S T S)^s`` (k = 1) or ``(r0 S T)^(2s)`` (k = 2) with
    ``S = r1 r2 r3 r2 r1`` and ``T = r4 r3 r2 r3 r4``."""
    which = tuple(which)
    if which not in (R5_FORWARD, R5_DUAL):
        raise InvalidRange(f"unknown rank-5 type {which}")
    if s < 2 or k not in (1, 2):
        raise InvalidRange("need s >= 2 and k in {1, 2}")
    S = Word.of(1, 2, 3, 2, 1)
    T = Word.of(4, 3, 2, 3, 4)
    r0 = Word.gen(0)
    extra = (r0 * S * T * S) ** s if k == 1 else (r0 * S * T) ** (2 * s)
    if which == R5_DUAL:
        extra = extra.substitute([Word.gen(4 - i) for i in range(5)])
    return Presentation.coxeter(which, [extra])


def hole_zigzag_presentation(p: int, q: int, holes=(), zigzags=()) -> Presentation:
    """``[p, q]`` with ``(r0 r1 (r2 r1)^(j-1))^h_j`` per hole ``(j, h_j)``
    and ``(r0 (r1 r2)^j)^r_j`` per zigzag ``(j, r_j)``."""
    extra = []
    r0, r1, r2 = Word.gen(0), Word.gen(1), Word.gen(2)
    for j, h in holes:
        if not 2 <= j <= q // 2:
            raise InvalidRange(f"hole index {j} outside 2..{q // 2}")
        extra.append((r0 * r1 * (r2 * r1) ** (j - 1)) ** h)
    for j, r in zigzags:
        if not 1 <= j <= q // 2:
            raise InvalidRange(f"zigzag index {j} outside 1..{q // 2}")
        extra.append((r0 * (r1 * r2) ** j) ** r)
    return Presentation.coxeter((p, q), extra)
