"""Finite groups as regular permutation actions.

Elements are ids ``0..order-1`` with 0 the identity.  ``action[c, i]`` is the
product ``c * g_i`` (right multiplication), exactly as in a coset table over
the trivial subgroup.
"""

from __future__ import annotations

from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

from .cosets import CosetTable, enumerate_cosets
from .errors import LimitExceeded, MalformedPresentation
from .words import Presentation, Word

DEFAULT_EXPLICIT_SET_BOUND = 10**6


class ConcreteGroup:
    """A finite group given by its regular right action on itself.

    ``presentation`` may be ``None`` for groups built directly from a
    permutation action (subgroups, automorphism groups of polytopes).
    """

    def __init__(self, action: np.ndarray, involutory: Sequence[bool],
                 presentation: Presentation | None = None,
                 table: CosetTable | None = None):
        self.action = np.ascontiguousarray(action, dtype=np.int64)
        self.n_generators = self.action.shape[1]
        self.involutory = tuple(bool(x) for x in involutory)
        self.presentation = presentation
        self.table = table
        inv = np.empty_like(self.action)
        idx = np.arange(self.order)
        for i in range(self.n_generators):
            inv[self.action[:, i], i] = idx
        self.inverse_action = inv

    @classmethod
    def from_presentation(cls, p: Presentation, max_cosets: int | None = None) -> ConcreteGroup:
        t = enumerate_cosets(p, (), max_cosets)
        return cls(t.action, p.involutory, p, t)

    @classmethod
    def from_generators(cls, perms: Sequence[np.ndarray], base: int = 0) -> ConcreteGroup:
        """Group generated by ``perms`` acting on the orbit of ``base``.

        The action on that orbit must be regular (true for automorphisms of
        a polytope acting on flags, or for a subgroup acting on itself).
        """
        perms = [np.asarray(p, np.int64) for p in perms]
        seen = {base: 0}
        order = [base]
        head = 0
        while head < len(order):
            x = order[head]
            head += 1
            for p in perms:
                y = int(p[x])
                if y not in seen:
                    seen[y] = len(order)
                    order.append(y)
        pts = np.array(order, np.int64)
        action = np.empty((len(order), len(perms)), np.int64)
        for i, p in enumerate(perms):
            action[:, i] = [seen[int(y)] for y in p[pts]]
        involutory = [bool(np.array_equal(action[action[:, i], i], np.arange(len(order))))
                      for i in range(len(perms))]
        g = cls(action, involutory)
        g.points = pts
        return g

    # basic structure ---------------------------------------------------

    @property
    def order(self) -> int:
        return self.action.shape[0]

    def __len__(self) -> int:
        return self.order

    def __repr__(self) -> str:
        return f"<ConcreteGroup order={self.order} gens={self.n_generators}>"

    def _check(self, w: Word):
        if w.max_generator() >= self.n_generators:
            raise MalformedPresentation(f"word {w} uses an unknown generator")

    def apply(self, c: int, w: Word) -> int:
        """``c * w`` for an element id ``c``."""
        self._check(w)
        a, ia = self.action, self.inverse_action
        for g, e in w.letters:
            c = a[c, g] if e == 1 else ia[c, g]
        return int(c)

    def element(self, w: Word) -> int:
        return self.apply(0, w)

    def perm(self, w: Word) -> np.ndarray:
        """Right multiplication by ``w`` as a permutation of element ids."""
        self._check(w)
        cur = np.arange(self.order)
        for g, e in w.letters:
            cur = self.action[cur, g] if e == 1 else self.inverse_action[cur, g]
        return cur

    def equal(self, u: Word, v: Word) -> bool:
        return self.element(u) == self.element(v)

    @cached_property
    def _tree(self):
        """Breadth-first spanning tree from the identity: parent, letter, layers."""
        n = self.order
        parent = np.full(n, -1, np.int64)
        letter_g = np.full(n, -1, np.int64)
        letter_e = np.zeros(n, np.int64)
        seen = np.zeros(n, bool)
        seen[0] = True
        layers = []
        frontier = np.array([0], np.int64)
        while frontier.size:
            layer_c, layer_p, layer_g, layer_e = [], [], [], []
            for i in range(self.n_generators):
                for e, tab in ((1, self.action), (-1, self.inverse_action)):
                    if e == -1 and self.involutory[i]:
                        continue
                    img = tab[frontier, i]
                    fresh = ~seen[img]
                    if not fresh.any():
                        continue
                    img_f, src_f = img[fresh], frontier[fresh]
                    img_u, first = np.unique(img_f, return_index=True)
                    # keep the first proposal per new element
                    keep = np.zeros(img_f.size, bool)
                    keep[first] = True
                    img_f, src_f = img_f[keep], src_f[keep]
                    seen[img_f] = True
                    parent[img_f] = src_f
                    letter_g[img_f] = i
                    letter_e[img_f] = e
                    layer_c.append(img_f)
                    layer_p.append(src_f)
                    layer_g.append(np.full(img_f.size, i))
                    layer_e.append(np.full(img_f.size, e))
            if not layer_c:
                break
            c = np.concatenate(layer_c)
            layers.append((c, np.concatenate(layer_p), np.concatenate(layer_g),
                           np.concatenate(layer_e)))
            frontier = c
        if not seen.all():
            raise ValueError("generators do not act transitively")
        return parent, letter_g, letter_e, layers

    def word(self, c: int) -> Word:
        """A shortest word for element ``c``."""
        parent, lg, le, _ = self._tree
        letters = []
        c = int(c)
        while c != 0:
            letters.append((int(lg[c]), int(le[c])))
            c = int(parent[c])
        return Word(tuple(reversed(letters)))

    def left_mult(self, x: int) -> np.ndarray:
        """``L[c] = x * c`` for every element ``c``."""
        _, _, _, layers = self._tree
        L = np.empty(self.order, np.int64)
        L[0] = x
        for c, p, g, e in layers:
            src = L[p]
            L[c] = np.where(e == 1, self.action[src, g], self.inverse_action[src, g])
        return L

    @cached_property
    def left_generators(self) -> list[np.ndarray]:
        return [self.left_mult(self.element(Word.gen(i))) for i in range(self.n_generators)]

    def left_perm(self, w: Word) -> np.ndarray:
        return self.left_mult(self.element(w))

    def mul(self, a: int, b: int) -> int:
        return self.apply(a, self.word(b))

    def inverse(self, a: int) -> int:
        return self.element(self.word(a).inverse())

    def element_order(self, w: Word) -> int:
        return element_order(self, w)


def element_order(g: ConcreteGroup, w: Word) -> int:
    """Smallest ``k >= 1`` with ``w^k = 1``: the cycle length of the identity."""
    x = g.element(w)
    if x == 0:
        return 1
    c = x
    k = 1
    while c != 0:
        c = g.apply(c, w)
        k += 1
        if k > g.order:
            raise RuntimeError("element order exceeds group order")
    return k


# explicit element sets --------------------------------------------------

def closure(mask: np.ndarray, perms: Iterable[np.ndarray]) -> np.ndarray:
    """Smallest superset of ``mask`` closed under the given permutations."""
    perms = list(perms)
    out = mask.copy()
    frontier = np.flatnonzero(out)
    while frontier.size and perms:
        new = []
        for p in perms:
            img = p[frontier]
            img = img[~out[img]]
            if img.size:
                out[img] = True
                new.append(img)
        frontier = np.unique(np.concatenate(new)) if new else np.empty(0, np.int64)
    return out


def subgroup_mask(g: ConcreteGroup, gens: Sequence[Word], bound: int | None = None) -> np.ndarray:
    """Boolean membership vector of ``<gens>``."""
    bound = DEFAULT_EXPLICIT_SET_BOUND if bound is None else bound
    if g.order > bound:
        raise LimitExceeded(bound, "explicit set size")
    start = np.zeros(g.order, bool)
    start[0] = True
    return closure(start, [g.perm(w) for w in gens])


def subgroup_elements(g: ConcreteGroup, gens: Sequence[Word], bound: int | None = None) -> frozenset[int]:
    return frozenset(np.flatnonzero(subgroup_mask(g, gens, bound)).tolist())


def mask_of(g: ConcreteGroup, ids: Iterable[int]) -> np.ndarray:
    m = np.zeros(g.order, bool)
    m[list(ids)] = True
    return m


def right_product(g: ConcreteGroup, a: np.ndarray, b_gens: Sequence[Word]) -> np.ndarray:
    """``A * <b_gens>`` as a mask."""
    return closure(a, [g.perm(w) for w in b_gens])


def left_product(g: ConcreteGroup, a_gens: Sequence[Word], b: np.ndarray) -> np.ndarray:
    """``<a_gens> * B`` as a mask."""
    return closure(b, [g.left_perm(w) for w in a_gens])


def product_set(g: ConcreteGroup, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """``A * B`` for arbitrary element sets (cost ``|B|`` permutations)."""
    out = np.zeros(g.order, bool)
    ai = np.flatnonzero(a)
    for y in np.flatnonzero(b):
        out[g.perm(g.word(int(y)))[ai]] = True
    return out


def conjugate_mask(g: ConcreteGroup, mask: np.ndarray, phi: int) -> np.ndarray:
    """``phi^-1 * S * phi``."""
    wphi = g.word(phi)
    left = g.left_perm(wphi.inverse())
    right = g.perm(wphi)
    out = np.zeros(g.order, bool)
    out[right[left[np.flatnonzero(mask)]]] = True
    return out


def subgroup_group(g: ConcreteGroup, gens: Sequence[Word]) -> tuple[ConcreteGroup, np.ndarray]:
    """``<gens>`` as a group in its own right.

    Returns the group (generators = ``gens`` in order) and ``ids`` mapping
    its element ids to ids of ``g``.
    """
    mask = subgroup_mask(g, gens)
    members = np.flatnonzero(mask)
    perms = []
    for w in gens:
        p = np.arange(g.order)
        p[members] = g.perm(w)[members]
        perms.append(p)
    sub = ConcreteGroup.from_generators(perms, base=0)
    return sub, sub.points


def generators_of(g: ConcreteGroup, mask: np.ndarray) -> list[Word]:
    """A small generating set (as words) for the subgroup with this mask."""
    gens: list[Word] = []
    cur = np.zeros(g.order, bool)
    cur[0] = True
    for x in np.flatnonzero(mask):
        if not cur[x]:
            gens.append(g.word(int(x)))
            cur = subgroup_mask(g, gens)
    return gens


# homomorphisms ------------------------------------------------------------

def bfs_layers(perms: Sequence[np.ndarray], n: int):
    """Layers ``(child, parent, gen)`` of a breadth-first tree from point 0
    under the given permutations, or ``None`` if they are not transitive."""
    seen = np.zeros(n, bool)
    seen[0] = True
    frontier = np.array([0], np.int64)
    layers = []
    while frontier.size:
        cs, ps, gs = [], [], []
        for i, p in enumerate(perms):
            img = p[frontier]
            fresh = ~seen[img]
            if not fresh.any():
                continue
            img_f, src_f = img[fresh], frontier[fresh]
            _, first = np.unique(img_f, return_index=True)
            img_f, src_f = img_f[first], src_f[first]
            seen[img_f] = True
            cs.append(img_f)
            ps.append(src_f)
            gs.append(np.full(img_f.size, i))
        if not cs:
            break
        frontier = np.concatenate(cs)
        layers.append((frontier, np.concatenate(ps), np.concatenate(gs)))
    if not seen.all():
        return None
    return layers


def extend_hom(src_perms: Sequence[np.ndarray], dst_perms: Sequence[np.ndarray],
               n_src: int) -> np.ndarray | None:
    """Extend ``s_i -> d_i`` to a map on element ids, if it is a homomorphism.

    ``src_perms`` are right multiplications by the source generators in a
    regular action of size ``n_src`` (they must generate); ``dst_perms`` the
    same for the images in the target group.  Returns ``f`` with ``f[0] = 0``
    or ``None`` when the assignment violates a relation.
    """
    layers = bfs_layers(src_perms, n_src)
    if layers is None:
        return None
    f = np.empty(n_src, np.int64)
    f[0] = 0
    for c, p, gi in layers:
        src = f[p]
        out = np.empty(c.size, np.int64)
        for i, d in enumerate(dst_perms):
            sel = gi == i
            out[sel] = d[src[sel]]
        f[c] = out
    for s, d in zip(src_perms, dst_perms):
        if not np.array_equal(f[s], d[f]):
            return None
    return f


def is_bijection(f: np.ndarray, n: int) -> bool:
    return f.size == n and np.unique(f).size == n


def synthesize_presentation(g: ConcreteGroup, gens: Sequence[Word],
                            involutory: Sequence[bool] | None = None,
                            max_cosets: int | None = None) -> Presentation:
    """A presentation of ``g`` on new generators ``x_i = gens[i]``.

    Relators are read off the Cayley graph (one per non-tree edge), sorted
    by length after a few cheap power relators, and the shortest prefix
    that still presents a group of order ``|g|`` is kept.  Since every
    candidate holds in ``g``, equal order means the presented group is ``g``.
    """
    perms = [g.perm(w) for w in gens]
    n = g.order
    k = len(perms)
    idx = np.arange(n)
    if involutory is None:
        involutory = [bool(np.array_equal(p[p], idx)) and not np.array_equal(p, idx) for p in perms]
    layers = bfs_layers(perms, n)
    if layers is None:
        raise ValueError("words do not generate the group")
    parent = np.full(n, -1, np.int64)
    letter = np.full(n, -1, np.int64)
    for c, p, gi in layers:
        parent[c] = p
        letter[c] = gi
    words: list[tuple] = [()] * n
    for c, _, _ in layers:
        for x in c.tolist():
            words[x] = words[int(parent[x])] + ((int(letter[x]), 1),)

    cand: list[Word] = []
    for i in range(k):
        cand.append(Word.gen(i) ** _cycle_len(perms[i]))
        for j in range(i + 1, k):
            cand.append((Word.gen(i) * Word.gen(j)) ** _cycle_len(perms[j][perms[i]]))
    tree = set(zip(parent.tolist(), letter.tolist()))
    edges = []
    for i, p in enumerate(perms):
        for c in range(n):
            d = int(p[c])
            if (c, i) in tree or (parent[d] == c and letter[d] == i):
                continue
            edges.append(Word(words[c] + ((i, 1),)) * Word(words[d]).inverse())
    edges.sort(key=len)
    pres = Presentation(k, tuple(involutory), ())
    seen = set()
    rels: list[Word] = []
    for w in cand + edges:
        w = pres.normalize(w)
        if w.is_identity or w in seen or w.inverse() in seen:
            continue
        seen.add(w)
        rels.append(w)

    cap = max_cosets if max_cosets is not None else max(4 * n, 1000)

    def presents(m: int) -> bool:
        try:
            return group_order_of(Presentation(k, tuple(involutory), tuple(rels[:m])), cap) == n
        except LimitExceeded:
            return False

    lo, hi = 0, len(rels)
    if not presents(hi):
        raise RuntimeError("Cayley-graph relators fail to present the group")
    while lo < hi:
        mid = (lo + hi) // 2
        if presents(mid):
            hi = mid
        else:
            lo = mid + 1
    keep = rels[:hi]
    if len(keep) <= 40:
        # drop redundant ones, longest first
        for r in sorted(keep, key=len, reverse=True):
            trial = [x for x in keep if x is not r]
            try:
                ok = group_order_of(Presentation(k, tuple(involutory), tuple(trial)), cap) == n
            except LimitExceeded:
                ok = False
            if ok:
                keep = trial
    return Presentation(k, tuple(involutory), tuple(keep))


def group_order_of(p: Presentation, cap: int) -> int:
    return enumerate_cosets(p, (), cap).n_cosets


def _cycle_len(p: np.ndarray) -> int:
    c, k = int(p[0]), 1
    while c != 0:
        c = int(p[c])
        k += 1
    return k
