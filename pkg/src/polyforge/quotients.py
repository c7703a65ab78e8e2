"""Orbit quotients of regular polytopes and the semisparse test."""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Iterator, Sequence

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

from .cgroups import StringCGroup
from .errors import LimitExceeded, TypeMismatch
from .groups import (DEFAULT_EXPLICIT_SET_BOUND, ConcreteGroup, closure, conjugate_mask,
                     generators_of, subgroup_mask)
from .polytope import AxiomReport, Polytope, _base_automorphisms, flag_graph, verify_axioms
from .words import Word


@dataclass(frozen=True)
class SubgroupSelection:
    ambient: StringCGroup
    generators: tuple[Word, ...]
    elements: frozenset[int]

    @classmethod
    def of(cls, ambient: StringCGroup, generators: Sequence[Word]) -> SubgroupSelection:
        m = subgroup_mask(ambient.group, list(generators))
        return cls(ambient, tuple(generators), frozenset(np.flatnonzero(m).tolist()))

    @classmethod
    def from_mask(cls, ambient: StringCGroup, mask: np.ndarray) -> SubgroupSelection:
        return cls.of(ambient, generators_of(ambient.group, mask))

    @property
    def order(self) -> int:
        return len(self.elements)

    @property
    def mask(self) -> np.ndarray:
        m = np.zeros(self.ambient.order, bool)
        m[list(self.elements)] = True
        return m

    def conjugate(self, phi: int) -> SubgroupSelection:
        w = self.ambient.group.word(phi)
        return SubgroupSelection.of(self.ambient, [w.inverse() * s * w for s in self.generators])


# quotients ---------------------------------------------------------------------

@dataclass
class QuotientResult:
    polytope: Polytope
    report: AxiomReport
    face_orbits: list[np.ndarray]

    @property
    def ok(self) -> bool:
        return self.report.ok


def quotient(p: Polytope, sigma: SubgroupSelection) -> QuotientResult:
    """Orbits of faces of ``p`` under ``sigma``; orbits are incident when
    they contain incident faces.  ``p`` must be regular with group
    ``sigma.ambient`` (``rho_i`` moving flag 0 to its ``i``-adjacent flag)."""
    fg = flag_graph(p)
    n = p.rank
    if n != sigma.ambient.rank:
        raise TypeMismatch("rank of the polytope and the group differ")
    gens = _base_automorphisms(fg, [int(fg.gamma[i][0]) for i in range(n)])
    perms = []
    for w in sigma.generators:
        cur = np.arange(fg.n_flags)
        for g, _ in w.letters:
            cur = gens[g][cur]
        perms.append(cur)
    F = fg.flags
    labels = []
    for j in range(n):
        src = np.concatenate([F[:, j]] * len(perms)) if perms else np.empty(0, np.int64)
        dst = np.concatenate([F[perm, j] for perm in perms]) if perms else src
        labels.append(_first_seen(_orbit_labels(src, dst, p.counts[j])))
    counts = [int(c.max()) + 1 for c in labels]
    cover = {j: np.stack([labels[j - 1][p.cover[j][:, 0]], labels[j][p.cover[j][:, 1]]], axis=1)
             for j in range(1, n)}
    q = Polytope(n, counts, cover, "FromQuotient", (p, sigma))
    return QuotientResult(q, verify_axioms(q), labels)


def _orbit_labels(src, dst, m):
    g = coo_matrix((np.ones(src.size, np.int8), (src, dst)), shape=(m, m))
    return connected_components(g, directed=False)[1]


def _first_seen(comp: np.ndarray) -> np.ndarray:
    _, first = np.unique(comp, return_index=True)
    relabel = np.empty(first.size, np.int64)
    relabel[np.argsort(first)] = np.arange(first.size)
    return relabel[comp]


# semisparse subgroups ------------------------------------------------------------

@dataclass(frozen=True)
class FailedCondition:
    name: str
    phi: Word | None = None
    i: int | None = None
    k: int | None = None
    j: int | None = None

    def __str__(self):
        parts = []
        if self.phi is not None:
            parts.append(f"phi={self.phi if self.phi.letters else 'e'}")
        for key in ("i", "k", "j"):
            v = getattr(self, key)
            if v is not None:
                parts.append(f"{key}={v}")
        return self.name + "{" + ", ".join(parts) + "}"


@dataclass(frozen=True)
class SemisparseReport:
    is_semisparse: bool
    failed_condition: FailedCondition | None
    eq9_holds: bool
    local_semisparse: bool


class _Frame:
    """A string C-group sitting inside a concrete group: generator words
    ``rho`` and the subgroup they generate."""

    def __init__(self, g: ConcreteGroup, rho: Sequence[Word]):
        self.g = g
        self.rho = list(rho)
        self.n = len(rho)
        self._left = [g.left_perm(w) for w in rho]
        self._masks = {}
        self.universe = self.mask(range(self.n))

    def mask(self, idx) -> np.ndarray:
        key = tuple(sorted(idx))
        if key not in self._masks:
            start = np.zeros(self.g.order, bool)
            start[0] = True
            m = closure(start, [self.g.perm(self.rho[i]) for i in key])
            m.flags.writeable = False
            self._masks[key] = m
        return self._masks[key]

    def left(self, idx, s: np.ndarray) -> np.ndarray:
        """``<rho_i : i in idx> * S``."""
        return closure(s, [self._left[i] for i in idx])

    def gamma(self, i):
        return self.mask([m for m in range(self.n) if m != i])

    def below(self, i):
        return range(0, i)

    def above(self, i):
        return range(i + 1, self.n)

    def conjugates(self, s: np.ndarray) -> Iterator[tuple[int, np.ndarray]]:
        """Distinct ``phi^-1 S phi`` for ``phi`` in the frame, with the first
        ``phi`` (in element order) giving each."""
        seen = set()
        for phi in np.flatnonzero(self.universe).tolist():
            c = conjugate_mask(self.g, s, phi)
            key = c.tobytes()
            if key not in seen:
                seen.add(key)
                yield phi, c


def _subset(a: np.ndarray, b: np.ndarray) -> bool:
    return not (a & ~b).any()


def _semisparse_conditions(fr: _Frame, s: np.ndarray) -> FailedCondition | None:
    g = fr.g
    n = fr.n
    conj = list(fr.conjugates(s))
    for phi, c in conj:
        for i in range(n):
            coset = np.zeros(g.order, bool)
            coset[g.perm(fr.rho[i])[np.flatnonzero(fr.gamma(i))]] = True
            if (c & coset).any():
                return FailedCondition("C1", g.word(phi), i=i)
    for phi, c in conj:
        for i in range(n):
            for j in range(i + 2, n):
                lhs = fr.mask(fr.above(i)) & fr.left(fr.below(j), c)
                mid = fr.left(range(i + 1, j), c)
                for k in range(i + 1, j):
                    rhs = fr.left([m for m in range(n) if m != k], mid)
                    if not _subset(lhs, rhs):
                        return FailedCondition("C2", g.word(phi), i=i, k=k, j=j)
    for i in range(n - 1):
        lhs = fr.mask(fr.above(i)) & fr.left(fr.below(i + 1), s)
        if not _subset(lhs, s):
            return FailedCondition("C3", i=i)
    return None


def _eq9(fr: _Frame, s: np.ndarray) -> bool:
    g = fr.g
    g0, gl = fr.gamma(0), fr.gamma(fr.n - 1)
    g0gl = fr.left([m for m in range(fr.n) if m != 0], gl)
    for _, c in fr.conjugates(s):
        a, b = c & g0, c & gl
        prod = closure(a, [g.perm(w) for w in generators_of(g, b)])
        if not np.array_equal(c & g0gl, prod):
            return False
    return True


def _local(fr: _Frame, s: np.ndarray) -> bool:
    if fr.n < 2:
        return True
    f0 = _Frame(fr.g, fr.rho[1:])
    fl = _Frame(fr.g, fr.rho[:-1])
    for _, c in fr.conjugates(s):
        if _semisparse_conditions(f0, c & f0.universe) is not None:
            return False
        if _semisparse_conditions(fl, c & fl.universe) is not None:
            return False
    return True


def _frame_of(sigma: SubgroupSelection, bound: int | None) -> _Frame:
    bound = DEFAULT_EXPLICIT_SET_BOUND if bound is None else bound
    c = sigma.ambient
    if c.order > bound:
        raise LimitExceeded(bound, "explicit set size")
    return _Frame(c.group, [Word.gen(i) for i in range(c.rank)])


def is_semisparse(sigma: SubgroupSelection, bound: int | None = None) -> SemisparseReport:
    """Check the three semisparse conditions on explicit element sets,
    together with the local conditions and the intersection factorization."""
    fr = _frame_of(sigma, bound)
    s = sigma.mask
    failed = _semisparse_conditions(fr, s)
    return SemisparseReport(failed is None, failed, _eq9(fr, s), _local(fr, s))


def check_problem23_hypotheses(sigma: SubgroupSelection, bound: int | None = None) -> dict:
    r = is_semisparse(sigma, bound)
    return {"local_semisparse": r.local_semisparse, "eq9": r.eq9_holds,
            "semisparse": r.is_semisparse}


# subgroup scans -------------------------------------------------------------------

def all_subgroups(g: ConcreteGroup, bound: int = 4096) -> list[np.ndarray]:
    """Every subgroup as a mask, by repeatedly joining cyclic subgroups.
    Ordered by size, then by membership bytes."""
    if g.order > bound:
        raise LimitExceeded(bound, "group order for subgroup scans")
    cyclic = {}
    for x in range(g.order):
        m = subgroup_mask(g, [g.word(x)])
        cyclic.setdefault(m.tobytes(), (m, x))
    cyc = list(cyclic.values())
    found = {k: v[0] for k, v in cyclic.items()}
    frontier = list(found.values())
    while frontier:
        new = []
        for h in frontier:
            for m, x in cyc:
                if _subset(m, h):
                    continue
                j = closure(h, [g.perm(g.word(x))])
                j = closure(j, [g.perm(w) for w in generators_of(g, j)])
                key = j.tobytes()
                if key not in found:
                    found[key] = j
                    new.append(j)
        frontier = new
    subs = list(found.values())
    subs.sort(key=lambda m: (int(m.sum()), m.tobytes()))
    return subs


def semisparse_scan(c: StringCGroup, bound: int | None = None,
                    with_quotients: bool = False) -> Iterator[dict]:
    """One record per subgroup of ``c``: the semisparse verdict, the two
    hypotheses of the converse question, and whether they would refute it."""
    p = None
    if with_quotients:
        from .polytope import polytope_from_cgroup
        p = polytope_from_cgroup(c)
    for idx, m in enumerate(all_subgroups(c.group)):
        sel = SubgroupSelection.from_mask(c, m)
        r = is_semisparse(sel, bound)
        rec = {
            "index": idx,
            "order": sel.order,
            "generators": [str(w) for w in sel.generators],
            "semisparse": r.is_semisparse,
            "failed_condition": None if r.failed_condition is None else str(r.failed_condition),
            "local_semisparse": r.local_semisparse,
            "eq9": r.eq9_holds,
            "counterexample": r.local_semisparse and r.eq9_holds and not r.is_semisparse,
        }
        if p is not None:
            rec["quotient_is_polytope"] = quotient(p, sel).ok
        yield rec


def scan_lines(c: StringCGroup, **kw) -> Iterator[str]:
    for rec in semisparse_scan(c, **kw):
        yield json.dumps(rec, sort_keys=True, separators=(",", ":"))
