"""Todd-Coxeter coset enumeration on top of :mod:`polyforge._tc_kernel`."""

from __future__ import annotations

import os
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import _tc_kernel as kernel
from .errors import LimitExceeded, MalformedPresentation
from .words import Presentation, Word

DEFAULT_MAX_COSETS = 10**6


def default_max_cosets() -> int:
    env = os.environ.get("POLYFORGE_MAX_COSETS")
    if env:
        try:
            v = int(env)
        except ValueError:
            raise MalformedPresentation(f"POLYFORGE_MAX_COSETS={env!r} is not an integer")
        if v > 0:
            return v
    return DEFAULT_MAX_COSETS


class _Columns:
    """Column layout of a coset table for one presentation."""

    def __init__(self, p: Presentation):
        self.pos = []
        self.neg = []
        inv = []
        col = 0
        for i in range(p.n_generators):
            self.pos.append(col)
            if p.involutory[i]:
                self.neg.append(col)
                inv.append(col)
                col += 1
            else:
                self.neg.append(col + 1)
                inv += [col + 1, col]
                col += 2
        self.ncols = col
        self.inv = np.array(inv, np.int64)
        # generator index and sign per column
        self.letter = [None] * col
        for i in range(p.n_generators):
            self.letter[self.pos[i]] = (i, 1)
            if self.neg[i] != self.pos[i]:
                self.letter[self.neg[i]] = (i, -1)

    def word(self, w: Word) -> list[int]:
        return [self.pos[g] if e == 1 else self.neg[g] for g, e in w.letters]


def _flatten(words: Sequence[list[int]]):
    flat = [x for w in words for x in w]
    off = np.zeros(len(words) + 1, np.int64)
    for k, w in enumerate(words):
        off[k + 1] = off[k] + len(w)
    return np.array(flat, np.int64), off


def _conjugates(rels: Sequence[list[int]], cols: _Columns):
    inv = cols.inv
    seen = set()
    out = []
    for r in rels:
        ri = [int(inv[x]) for x in reversed(r)]
        for w in (r, ri):
            for k in range(len(w)):
                c = tuple(w[k:] + w[:k])
                if c not in seen:
                    seen.add(c)
                    out.append(list(c))
    out.sort(key=lambda w: w[0])
    flat, off = _flatten(out)
    bycol = np.zeros(cols.ncols + 1, np.int64)
    for w in out:
        bycol[w[0] + 1] += 1
    bycol = np.cumsum(bycol)
    return flat, off, np.arange(len(out), dtype=np.int64), bycol


@dataclass(frozen=True, eq=False)
class CosetTable:
    """A closed coset table.

    ``action[c, i]`` is the coset ``c . g_i``; coset 0 is the subgroup.
    ``parent``/``parent_letter`` describe a breadth-first spanning tree used
    to read off coset representatives.
    """

    presentation: Presentation
    subgroup_generators: tuple[Word, ...]
    action: np.ndarray
    inverse_action: np.ndarray
    parent: np.ndarray
    parent_letter: tuple
    high_water: int

    @property
    def n_cosets(self) -> int:
        return self.action.shape[0]

    def apply(self, c: int, w: Word) -> int:
        for g, e in w.letters:
            c = int(self.action[c, g] if e == 1 else self.inverse_action[c, g])
        return c

    def representative(self, c: int) -> Word:
        letters = []
        while c != 0:
            letters.append(self.parent_letter[c])
            c = int(self.parent[c])
        return Word(tuple(reversed(letters)))


def enumerate_cosets(p: Presentation, subgroup_gens: Sequence[Word] = (),
                     max_cosets: int | None = None, *, deductions: bool = True) -> CosetTable:
    """Enumerate the cosets of ``<subgroup_gens>`` in the group presented by ``p``.

    Raises :class:`LimitExceeded` when more than ``max_cosets`` live cosets
    would be needed.
    """
    if max_cosets is None:
        max_cosets = default_max_cosets()
    if max_cosets < 1:
        raise ValueError("max_cosets must be positive")
    cols = _Columns(p)
    subs = [p.normalize(h) for h in subgroup_gens]
    rels = [cols.word(r) for r in p.relators]
    sub_cols = [cols.word(h) for h in subs if not h.is_identity]
    rw, roff = _flatten(rels)
    sw, soff = _flatten(sub_cols)
    cw, coff, cidx, cbycol = _conjugates(rels, cols)
    min_free = max(1, max_cosets // 50)
    status, T, n, hw = kernel.enumerate_hlt(
        cols.ncols, cols.inv, rw, roff, sw, soff, cw, coff, cidx, cbycol,
        max_cosets, min_free, deductions)
    if status == kernel.EXCEEDED:
        raise LimitExceeded(max_cosets, "cosets", int(hw))
    table, parent, pcol = kernel.standardize(T[:n], n, cols.inv)
    action = np.ascontiguousarray(table[:, cols.pos])
    inverse_action = np.ascontiguousarray(table[:, cols.neg])
    letters = tuple(cols.letter[x] if x >= 0 else None for x in pcol)
    return CosetTable(p, tuple(subs), action, inverse_action, parent, letters, int(hw))


def group_order(p: Presentation, max_cosets: int | None = None) -> int:
    return enumerate_cosets(p, (), max_cosets).n_cosets


def table_violations(t: CosetTable) -> list[str]:
    """Check the table invariants directly; returns a list of problems."""
    problems = []
    n = t.n_cosets
    p = t.presentation
    idx = np.arange(n)
    for i in range(p.n_generators):
        a = t.action[:, i]
        if sorted(a.tolist()) != list(range(n)):
            problems.append(f"g{i} is not a bijection")
            continue
        if not np.array_equal(t.inverse_action[a, i], idx):
            problems.append(f"g{i} inverse column mismatch")
        if p.involutory[i] and not np.array_equal(a[a], idx):
            problems.append(f"g{i} is not an involution")
    for r in p.all_relators():
        cur = idx.copy()
        for g, e in r.letters:
            cur = t.action[cur, g] if e == 1 else t.inverse_action[cur, g]
        if not np.array_equal(cur, idx):
            problems.append(f"relator {r} not closed")
    for h in t.subgroup_generators:
        if t.apply(0, h) != 0:
            problems.append(f"subgroup generator {h} moves coset 0")
    seen = np.zeros(n, bool)
    seen[0] = True
    frontier = [0]
    while frontier:
        nxt = []
        for c in frontier:
            for i in range(p.n_generators):
                for d in (int(t.action[c, i]), int(t.inverse_action[c, i])):
                    if not seen[d]:
                        seen[d] = True
                        nxt.append(d)
        frontier = nxt
    if not seen.all():
        problems.append("action is not transitive")
    return problems
