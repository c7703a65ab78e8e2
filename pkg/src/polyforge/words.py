"""Words over abstract generators and finite presentations.

A letter is a pair ``(generator, sign)`` with ``sign`` in ``{+1, -1}``.  Words
are kept freely reduced.  Presentations additionally normalise inverse letters
of involutory generators and cancel ``g g`` for them.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .errors import MalformedPresentation

Letter = tuple[int, int]

_TOKEN = re.compile(r"^g(\d+)(\^-1)?$")


def _reduce(letters: Iterable[Letter], involutory: Sequence[bool] | None = None) -> tuple[Letter, ...]:
    out: list[Letter] = []
    for g, e in letters:
        if involutory is not None and g < len(involutory) and involutory[g]:
            e = 1
        if out and out[-1][0] == g and out[-1][1] == -e:
            out.pop()
        else:
            out.append((g, e))
    return tuple(out)


@dataclass(frozen=True)
class Word:
    """A freely reduced word; the empty word is the identity."""

    letters: tuple[Letter, ...] = ()

    def __post_init__(self):
        for g, e in self.letters:
            if g < 0 or e not in (1, -1):
                raise ValueError(f"bad letter {(g, e)!r}")
        object.__setattr__(self, "letters", _reduce(self.letters))

    @classmethod
    def gen(cls, i: int) -> Word:
        return cls(((i, 1),))

    @classmethod
    def of(cls, *gens: int) -> Word:
        """``Word.of(0, 1, 2)`` is g0 g1 g2 (positive letters only)."""
        return cls(tuple((g, 1) for g in gens))

    @classmethod
    def parse(cls, text: str) -> Word:
        letters = []
        for tok in text.split():
            m = _TOKEN.match(tok)
            if not m:
                raise MalformedPresentation(f"bad token {tok!r}")
            letters.append((int(m.group(1)), -1 if m.group(2) else 1))
        return cls(tuple(letters))

    def __str__(self) -> str:
        return " ".join(f"g{g}" if e == 1 else f"g{g}^-1" for g, e in self.letters)

    def __repr__(self) -> str:
        return f"Word({str(self)!r})"

    def __len__(self) -> int:
        return len(self.letters)

    def __iter__(self):
        return iter(self.letters)

    def __mul__(self, other: Word) -> Word:
        return Word(self.letters + other.letters)

    def __pow__(self, k: int) -> Word:
        if k < 0:
            return self.inverse() ** (-k)
        return Word(self.letters * k)

    def inverse(self) -> Word:
        return Word(tuple((g, -e) for g, e in reversed(self.letters)))

    @property
    def is_identity(self) -> bool:
        return not self.letters

    def max_generator(self) -> int:
        return max((g for g, _ in self.letters), default=-1)

    def substitute(self, images: Sequence[Word]) -> Word:
        """Replace generator ``i`` by ``images[i]``."""
        out: tuple[Letter, ...] = ()
        for g, e in self.letters:
            w = images[g] if e == 1 else images[g].inverse()
            out += w.letters
        return Word(out)

    def shift(self, k: int) -> Word:
        return Word(tuple((g + k, e) for g, e in self.letters))


IDENTITY = Word()


@dataclass(frozen=True)
class Presentation:
    """Generators ``g0 .. g{k-1}``, involution flags and relators.

    ``relators`` excludes the squares of involutory generators; those are
    implied by the flags and reported by :meth:`all_relators`.
    """

    n_generators: int
    involutory: tuple[bool, ...]
    relators: tuple[Word, ...] = field(default=())

    def __post_init__(self):
        if self.n_generators < 1:
            raise MalformedPresentation("need at least one generator")
        inv = tuple(bool(x) for x in self.involutory)
        if len(inv) != self.n_generators:
            raise MalformedPresentation(
                f"{len(inv)} involution flags for {self.n_generators} generators")
        object.__setattr__(self, "involutory", inv)
        rels = []
        for r in self.relators:
            if r.max_generator() >= self.n_generators:
                raise MalformedPresentation(f"relator {r} uses an unknown generator")
            w = self.normalize(r)
            if not w.is_identity:
                rels.append(w)
        object.__setattr__(self, "relators", tuple(rels))

    @classmethod
    def coxeter(cls, schlafli: Sequence[int], extra: Iterable[Word] = ()) -> Presentation:
        """String Coxeter group ``[p1, ..., p_{n-1}]`` on involutions g0..g_{n-1}."""
        n = len(schlafli) + 1
        rels = []
        for i in range(n - 1):
            rels.append(Word.of(i, i + 1) ** schlafli[i])
        for i in range(n):
            for j in range(i + 2, n):
                rels.append(Word.of(i, j) ** 2)
        return cls(n, (True,) * n, tuple(rels) + tuple(extra))

    def normalize(self, w: Word) -> Word:
        if w.max_generator() >= self.n_generators:
            raise MalformedPresentation(f"word {w} uses an unknown generator")
        return Word(_reduce(w.letters, self.involutory))

    def all_relators(self) -> tuple[Word, ...]:
        squares = tuple(_square(i) for i in range(self.n_generators) if self.involutory[i])
        return squares + self.relators

    def with_relators(self, extra: Iterable[Word]) -> Presentation:
        return Presentation(self.n_generators, self.involutory, self.relators + tuple(extra))

    # text format -------------------------------------------------------

    def to_text(self) -> str:
        lines = [f"generators {self.n_generators}",
                 "involutory " + " ".join("1" if f else "0" for f in self.involutory)]
        lines += [str(r) for r in self.relators]
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> Presentation:
        lines = [ln.strip() for ln in text.splitlines()]
        lines = [ln for ln in lines if ln and not ln.startswith("#")]
        if len(lines) < 2:
            raise MalformedPresentation("expected 'generators' and 'involutory' lines")
        head = lines[0].split()
        if len(head) != 2 or head[0] != "generators" or not head[1].isdigit():
            raise MalformedPresentation(f"bad header {lines[0]!r}")
        k = int(head[1])
        flags = lines[1].split()
        if not flags or flags[0] != "involutory" or any(f not in ("0", "1") for f in flags[1:]):
            raise MalformedPresentation(f"bad involution line {lines[1]!r}")
        rels = tuple(Word.parse(ln) for ln in lines[2:])
        return cls(k, tuple(f == "1" for f in flags[1:]), rels)


def _square(i: int) -> Word:
    return Word(((i, 1), (i, 1)))
