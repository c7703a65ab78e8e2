"""String C-groups and rotation systems.

A :class:`StringCGroup` is a finite group with distinguished involutions
``rho_0 .. rho_{n-1}`` satisfying the string relations and the intersection
property.  A :class:`RotationSystem` carries the rotations
``sigma_1 .. sigma_{n-1}`` of a chiral or directly regular polytope.
Subgroups are handled as boolean masks over the regular action.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Sequence

import numpy as np

from .errors import NotACGroup, NotARotationGroup, UnsupportedRank
from .groups import (ConcreteGroup, closure, extend_hom, is_bijection,
                     subgroup_group, synthesize_presentation)
from .words import Presentation, Word

CHIRAL = "Chiral"
DIRECTLY_REGULAR = "DirectlyRegular"
UNVERIFIED = "Unverified"


@dataclass(frozen=True)
class SchlafliType:
    entries: tuple[int, ...]

    def __iter__(self):
        return iter(self.entries)

    def __len__(self):
        return len(self.entries)

    def __getitem__(self, k):
        return self.entries[k]

    def __str__(self):
        return "{" + ",".join(map(str, self.entries)) + "}"


class _MaskCache:
    """Subgroups generated by subsets of a fixed list of words."""

    def __init__(self, group: ConcreteGroup, words: Sequence[Word]):
        self.group = group
        self.words = tuple(words)
        self._perms = [group.perm(w) for w in self.words]
        self._masks: dict[frozenset, np.ndarray] = {}

    def perm(self, i: int) -> np.ndarray:
        return self._perms[i]

    def mask(self, idx) -> np.ndarray:
        key = frozenset(idx)
        m = self._masks.get(key)
        if m is None:
            start = np.zeros(self.group.order, bool)
            start[0] = True
            m = closure(start, [self._perms[i] for i in sorted(key)])
            m.flags.writeable = False
            self._masks[key] = m
        return m

    def mask_words(self, words: Sequence[Word]) -> np.ndarray:
        start = np.zeros(self.group.order, bool)
        start[0] = True
        return closure(start, [self.group.perm(w) for w in words])


class StringCGroup:
    """A verified string C-group; build with :func:`verify_string_cgroup`."""

    def __init__(self, group: ConcreteGroup, rank: int):
        self.group = group
        self.rank = rank
        self.generators = tuple(Word.gen(i) for i in range(rank))
        self._cache = _MaskCache(group, self.generators)

    def __repr__(self):
        return f"<StringCGroup rank={self.rank} order={self.order}>"

    @property
    def order(self) -> int:
        return self.group.order

    def perm(self, i: int) -> np.ndarray:
        """Right multiplication by ``rho_i``."""
        return self._cache.perm(i)

    def subgroup(self, idx) -> np.ndarray:
        """Mask of ``<rho_i : i in idx>``."""
        return self._cache.mask(idx)

    def gamma(self, j: int) -> np.ndarray:
        """Stabilizer of the base ``j``-face, ``<rho_i : i != j>``."""
        return self.subgroup(i for i in range(self.rank) if i != j)

    def presentation(self) -> Presentation:
        """A presentation on ``rho_0 .. rho_{n-1}``."""
        p = self.group.presentation
        if p is not None and p.n_generators == self.rank:
            return p
        return synthesize_presentation(self.group, self.generators, [True] * self.rank)


def verify_string_cgroup(g: ConcreteGroup, rank: int | None = None) -> StringCGroup:
    """Check involutions, string relations and the intersection property.

    Every pair of index sets is compared, so the first failing pair is
    reported as the witness ``(I, J)``.
    """
    n = g.n_generators if rank is None else rank
    if n < 1 or n > g.n_generators:
        raise NotACGroup("rank", n)
    c = StringCGroup(g, n)
    idx = np.arange(g.order)
    for i in range(n):
        p = c.perm(i)
        if np.array_equal(p, idx) or not np.array_equal(p[p], idx):
            raise NotACGroup("involution", i)
    for i in range(n):
        for j in range(i + 2, n):
            q = c.perm(j)[c.perm(i)]
            if not np.array_equal(q[q], idx):
                raise NotACGroup("string", (i, j))
    if not c.subgroup(range(n)).all():
        raise NotACGroup("generation", tuple(range(n)))
    subsets = [frozenset(s) for k in range(n + 1) for s in combinations(range(n), k)]
    for a, b in combinations(subsets, 2):
        if a <= b or b <= a:
            continue
        both = c.subgroup(a) & c.subgroup(b)
        if not np.array_equal(both, c.subgroup(a & b)):
            raise NotACGroup("intersection", (tuple(sorted(a)), tuple(sorted(b))))
    return c


def schlafli_type(c) -> SchlafliType:
    """Periods of ``rho_{j-1} rho_j`` (or of ``sigma_j`` for rotation systems)."""
    if isinstance(c, RotationSystem):
        return SchlafliType(tuple(_period(c.perm(i)) for i in range(c.rank - 1)))
    return SchlafliType(tuple(_period(c.perm(j)[c.perm(j - 1)]) for j in range(1, c.rank)))


def _period(p: np.ndarray) -> int:
    x, k = int(p[0]), 1
    while x != 0:
        x = int(p[x])
        k += 1
    return k


# rotation systems -----------------------------------------------------------

class RotationSystem:
    """Group with distinguished rotations ``sigma_1 .. sigma_{n-1}``.

    ``generators[k]`` is the word for ``sigma_{k+1}`` in the generators of
    ``group``.  ``verdict`` is ``Chiral``, ``DirectlyRegular`` or
    ``Unverified``; a rank >= 5 system checked with the heuristic keeps
    ``Unverified`` and records its would-be verdict in ``heuristic_verdict``.
    """

    def __init__(self, group: ConcreteGroup, rank: int, generators: Sequence[Word],
                 verdict: str = UNVERIFIED, heuristic: bool = False, mirror_of=None):
        if rank < 3 or len(generators) != rank - 1:
            raise ValueError("rotation systems need rank >= 3 and rank-1 generators")
        self.group = group
        self.rank = rank
        self.generators = tuple(generators)
        self.verdict = verdict
        self.heuristic = heuristic
        self.heuristic_verdict: str | None = None
        self._mirror_of = mirror_of
        self._cache = _MaskCache(group, self.generators)

    def __repr__(self):
        return f"<RotationSystem rank={self.rank} order={self.order} {self.verdict}>"

    @property
    def order(self) -> int:
        return self.group.order

    def perm(self, k: int) -> np.ndarray:
        """Right multiplication by ``sigma_{k+1}`` (0-based ``k``)."""
        return self._cache.perm(k)

    def sigma(self, i: int) -> Word:
        """Word of ``sigma_i`` (1-based, as in the usual notation)."""
        return self.generators[i - 1]

    def subgroup(self, idx) -> np.ndarray:
        """Mask of ``<sigma_i : i in idx>`` with 1-based ``i``."""
        return self._cache.mask(i - 1 for i in idx)

    def face_stabilizer_words(self, j: int) -> list[Word]:
        """Generators of the stabilizer of the base ``j``-face."""
        n = self.rank
        s = self.sigma
        out = [s(i) for i in range(1, j)]
        if 1 <= j <= n - 2:
            out.append(s(j) * s(j + 1))
        out += [s(i) for i in range(j + 2, n)]
        return out

    def face_stabilizer(self, j: int) -> np.ndarray:
        return self._cache.mask_words(self.face_stabilizer_words(j))

    def same_generators(self, other: RotationSystem) -> bool:
        return self.group is other.group and all(
            self.group.element(a) == other.group.element(b)
            for a, b in zip(self.generators, other.generators))

    def presentation(self) -> Presentation:
        """A presentation on ``sigma_1 .. sigma_{n-1}`` (none involutory)."""
        p = self.group.presentation
        if (p is not None and p.n_generators == self.rank - 1
                and self.generators == tuple(Word.gen(i) for i in range(self.rank - 1))):
            return p
        if self._mirror_of is not None:
            base = self._mirror_of.presentation()
            rels = tuple(r.substitute(_mirror_images(self.rank)) for r in base.relators)
            out, seen = [], set()
            for r in rels + rotation_relators(self.rank):
                if r.letters not in seen:
                    seen |= _cyclic_forms(r)
                    out.append(r)
            return Presentation(base.n_generators, base.involutory, tuple(out))
        return synthesize_presentation(self.group, self.generators, [False] * (self.rank - 1))


def _mirror_images(n: int) -> list[Word]:
    """Images of ``sigma_i`` under the base-flag swap, as words in ``sigma``."""
    s1, s2 = Word.gen(0), Word.gen(1)
    return [s1.inverse(), s1 ** 2 * s2] + [Word.gen(i) for i in range(2, n - 1)]


def _check_relations(r: RotationSystem):
    idx = np.arange(r.order)
    for k in range(r.rank - 1):
        if np.array_equal(r.perm(k), idx):
            raise NotARotationGroup("trivial generator", k + 1)
    for i in range(1, r.rank):
        for j in range(i + 1, r.rank):
            q = idx
            for k in range(i, j + 1):
                q = r.perm(k - 1)[q]
            if not np.array_equal(q[q], idx):
                raise NotARotationGroup("relation", (i, j))
    if not r.subgroup(range(1, r.rank)).all():
        raise NotARotationGroup("generation", tuple(range(1, r.rank)))


def _intersection_pairs(n: int, heuristic: bool):
    if n == 3:
        return [((1,), (2,))]
    if n == 4:
        return [((1,), (2,)), ((2,), (3,)), ((1, 2), (2, 3))]
    # rank >= 5: compare all intervals of 1..n-1 pairwise
    iv = [tuple(range(a, b + 1)) for a in range(1, n) for b in range(a, n)]
    return [(a, b) for a, b in combinations(iv, 2)
            if not (set(a) <= set(b) or set(b) <= set(a))]


def verify_rotation_system(g: ConcreteGroup, rank: int | None = None,
                           generators: Sequence[Word] | None = None,
                           heuristic: bool = False) -> RotationSystem:
    """Check the rotation relations and the rank-appropriate intersection
    condition, then decide between chiral and directly regular."""
    n = g.n_generators + 1 if rank is None else rank
    if n < 3:
        raise UnsupportedRank(f"rotation systems need rank >= 3, got {n}")
    if n >= 5 and not heuristic:
        raise UnsupportedRank(
            f"no intersection condition is available for rank {n}; pass heuristic=True")
    if generators is None:
        if g.n_generators < n - 1:
            raise NotARotationGroup("rank", n)
        generators = [Word.gen(i) for i in range(n - 1)]
    r = RotationSystem(g, n, generators, heuristic=n >= 5)
    _check_relations(r)
    for a, b in _intersection_pairs(n, heuristic):
        both = r.subgroup(a) & r.subgroup(b)
        if not np.array_equal(both, r.subgroup(set(a) & set(b))):
            raise NotARotationGroup("intersection", (a, b))
    ok, _ = is_directly_regular(r)
    verdict = DIRECTLY_REGULAR if ok else CHIRAL
    if n >= 5:
        r.heuristic_verdict = verdict
    else:
        r.verdict = verdict
    return r


def _alpha_images(r: RotationSystem) -> list[Word]:
    s = r.generators
    return [s[0].inverse(), s[0] ** 2 * s[1]] + list(s[2:])


def is_directly_regular(r: RotationSystem):
    """``(True, alpha)`` if the swap ``sigma_1 -> sigma_1^-1``,
    ``sigma_2 -> sigma_1^2 sigma_2`` extends to an automorphism, where
    ``alpha`` maps element ids; otherwise ``(False, None)``."""
    src = [r.perm(k) for k in range(r.rank - 1)]
    dst = [r.group.perm(w) for w in _alpha_images(r)]
    f = extend_hom(src, dst, r.order)
    if f is None or not is_bijection(f, r.order):
        return False, None
    return True, f


def enantiomorph(r: RotationSystem) -> RotationSystem:
    """The rotation system of the 0-adjacent base flag."""
    images = _alpha_images(r)
    m = RotationSystem(r.group, r.rank, images, r.verdict, r.heuristic, mirror_of=r)
    m.heuristic_verdict = r.heuristic_verdict
    return m


def rotation_isomorphism(a: RotationSystem, b: RotationSystem):
    """Element map sending each ``sigma_i`` of ``a`` to that of ``b``, or ``None``."""
    if a.rank != b.rank or a.order != b.order:
        return None
    f = extend_hom([a.perm(k) for k in range(a.rank - 1)],
                   [b.perm(k) for k in range(b.rank - 1)], a.order)
    if f is None or not is_bijection(f, a.order):
        return None
    return f


def rotation_subgroup(c: StringCGroup):
    """``(RotationSystem, index)`` for ``sigma_i = rho_{i-1} rho_i``."""
    if c.rank < 3:
        raise UnsupportedRank("rotation subgroups need rank >= 3")
    words = [Word.of(i - 1, i) for i in range(1, c.rank)]
    sub, _ = subgroup_group(c.group, words)
    index = c.order // sub.order
    gens = [Word.gen(i) for i in range(c.rank - 1)]
    r = RotationSystem(sub, c.rank, gens)
    if index == 2:
        r.verdict = DIRECTLY_REGULAR
    return r, index


def _cyclic_forms(w: Word) -> set:
    out = set()
    for v in (w, w.inverse()):
        t = v.letters
        out.update(t[k:] + t[:k] for k in range(len(t)))
    return out


def rotation_relators(rank: int) -> tuple[Word, ...]:
    """``(sigma_i .. sigma_j)^2`` for ``1 <= i < j <= rank-1``."""
    return tuple(Word.of(*range(i - 1, j)) ** 2 for i in range(1, rank) for j in range(i + 1, rank))


def rotation_coxeter_presentation(schlafli, extra=()) -> Presentation:
    """Rotation subgroup of ``[p1, ..., p_{n-1}]`` on ``sigma_1 .. sigma_{n-1}``."""
    k = len(schlafli)
    pows = tuple(Word.gen(i) ** schlafli[i] for i in range(k))
    return Presentation(k, (False,) * k, pows + rotation_relators(k + 1) + tuple(extra))


def missing_rotation_relators(p: Presentation, rank: int) -> list[tuple[int, int]]:
    """Pairs ``(i, j)`` whose relator ``(sigma_i .. sigma_j)^2`` does not
    occur in ``p`` (up to cyclic shift and inversion)."""
    have = set()
    for r in p.relators:
        have |= _cyclic_forms(r)
    out = []
    for i in range(1, rank):
        for j in range(i + 1, rank):
            w = Word.of(*range(i - 1, j)) ** 2
            if w.letters not in have:
                out.append((i, j))
    return out


def rotation_system_from_presentation(p: Presentation, rank: int | None = None,
                                      max_cosets: int | None = None,
                                      heuristic: bool = False) -> RotationSystem:
    """Enumerate ``p`` and verify it.  The relators ``(sigma_i..sigma_j)^2``
    must appear literally, which rejects malformed input before a possibly
    unbounded enumeration."""
    n = p.n_generators + 1 if rank is None else rank
    if n >= 3:
        missing = missing_rotation_relators(p, n)
        if missing:
            raise NotARotationGroup("relation", missing[0])
    return verify_rotation_system(ConcreteGroup.from_presentation(p, max_cosets), rank,
                                  heuristic=heuristic)


def cgroup_from_presentation(p: Presentation, max_cosets: int | None = None) -> StringCGroup:
    return verify_string_cgroup(ConcreteGroup.from_presentation(p, max_cosets))
