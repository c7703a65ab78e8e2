"""Universal polytopes with prescribed facets and vertex-figures."""

from __future__ import annotations

from dataclasses import dataclass

from .cgroups import (RotationSystem, StringCGroup, enantiomorph, rotation_relators,
                      rotation_subgroup, verify_rotation_system, verify_string_cgroup)
from .cosets import default_max_cosets
from .errors import IncompatibleSections, LimitExceeded, NotACGroup, NotARotationGroup, TypeMismatch
from .groups import ConcreteGroup, subgroup_group
from .polytope import (Polytope, combinatorial_profile, facet, is_isomorphic,
                       polytope_from_cgroup, polytope_from_rotation_system, vertex_figure)
from .words import Presentation, Word

REGULAR = "Regular"
CHIRAL = "Chiral"

FINITE = "Finite"
EXCEEDS_LIMIT = "ExceedsLimit"
DEGENERATE = "Degenerate"


def _polytope(x) -> Polytope:
    if isinstance(x, RotationSystem):
        return polytope_from_rotation_system(x)
    return polytope_from_cgroup(x)


@dataclass
class AmalgamSpec:
    facet: StringCGroup | RotationSystem
    vertex_figure: StringCGroup | RotationSystem
    variant: str = REGULAR
    mirror_facet: bool = False
    mirror_vertex_figure: bool = False

    def __post_init__(self):
        if self.variant not in (REGULAR, CHIRAL):
            raise ValueError(f"unknown variant {self.variant!r}")
        if self.variant == REGULAR:
            if not (isinstance(self.facet, StringCGroup) and isinstance(self.vertex_figure, StringCGroup)):
                raise TypeMismatch("regular amalgams need string C-groups on both sides")
            if self.mirror_facet or self.mirror_vertex_figure:
                raise TypeMismatch("enantiomorphic forms apply to the chiral variant only")
        else:
            # a regular side enters through its rotation subgroup
            if isinstance(self.facet, StringCGroup):
                self.facet = rotation_subgroup(self.facet)[0]
            if isinstance(self.vertex_figure, StringCGroup):
                self.vertex_figure = rotation_subgroup(self.vertex_figure)[0]

    @property
    def rank(self) -> int:
        return self.facet.rank + 1

    def sides(self):
        """The two sides with the requested enantiomorphic forms applied."""
        f, v = self.facet, self.vertex_figure
        if self.mirror_facet:
            f = enantiomorph(f)
        if self.mirror_vertex_figure:
            v = enantiomorph(v)
        return f, v

    def mirrored(self) -> AmalgamSpec:
        return AmalgamSpec(self.facet, self.vertex_figure, self.variant,
                           not self.mirror_facet, not self.mirror_vertex_figure)


def check_compatible(spec: AmalgamSpec):
    """The vertex-figures of the facet must match the facets of the
    vertex-figure."""
    if spec.facet.rank != spec.vertex_figure.rank:
        raise IncompatibleSections(
            f"facet rank {spec.facet.rank} and vertex-figure rank {spec.vertex_figure.rank} differ")
    if spec.facet.rank < 3:
        return
    a = vertex_figure(_polytope(spec.facet))
    b = facet(_polytope(spec.vertex_figure))
    if is_isomorphic(a, b) is None:
        raise IncompatibleSections(
            f"vertex-figure of the facet {a.f_vector} does not match facet of the vertex-figure {b.f_vector}")


def amalgam_presentation(spec: AmalgamSpec, check: bool = True) -> Presentation:
    """Facet relators on the first generators, vertex-figure relators on
    the last ones, plus every commuting pair written out."""
    if check:
        check_compatible(spec)
    f, v = spec.sides()
    pf, pv = f.presentation(), v.presentation()
    n = spec.rank
    if spec.variant == REGULAR:
        rels = list(pf.relators) + [r.shift(1) for r in pv.relators]
        rels += [Word.of(i, j) ** 2 for i in range(n) for j in range(i + 2, n)]
        return Presentation(n, (True,) * n, _dedupe(rels))
    k = n - 1
    rels = list(pf.relators) + [r.shift(1) for r in pv.relators]
    rels += list(rotation_relators(n))
    return Presentation(k, (False,) * k, _dedupe(rels))


def _dedupe(rels):
    seen = set()
    out = []
    for r in rels:
        if r.letters not in seen:
            seen.add(r.letters)
            out.append(r)
    return tuple(out)


@dataclass
class AmalgamProbeResult:
    status: str
    order: int | None = None
    max_cosets: int | None = None
    high_water: int | None = None
    reason: str | None = None
    cgroup_ok: bool = False
    facet_ok: bool = False
    vertex_figure_ok: bool = False
    group: ConcreteGroup | None = None

    @property
    def exists(self) -> bool:
        return self.status == FINITE and self.cgroup_ok and self.facet_ok and self.vertex_figure_ok

    def to_json(self) -> dict:
        out = {"status": self.status, "cgroup_ok": self.cgroup_ok,
               "facet_ok": self.facet_ok, "vertex_figure_ok": self.vertex_figure_ok}
        for key in ("order", "max_cosets", "high_water", "reason"):
            v = getattr(self, key)
            if v is not None:
                out[key] = v
        return out


def _side_ok(g: ConcreteGroup, words, side, chiral: bool) -> bool:
    sub, _ = subgroup_group(g, words)
    if sub.order != side.order:
        return False
    try:
        if chiral:
            s = verify_rotation_system(sub, side.rank, heuristic=side.rank >= 5)
        else:
            s = verify_string_cgroup(sub, side.rank)
    except (NotACGroup, NotARotationGroup):
        return False
    return is_isomorphic(_polytope(s), _polytope(side)) is not None


def probe_universal(spec: AmalgamSpec, max_cosets: int | None = None) -> AmalgamProbeResult:
    """Enumerate the amalgamated group and check that it is a (rotation)
    C-group whose distinguished subgroups give back the two sides."""
    max_cosets = default_max_cosets() if max_cosets is None else max_cosets
    pres = amalgam_presentation(spec)
    try:
        g = ConcreteGroup.from_presentation(pres, max_cosets)
    except LimitExceeded as e:
        return AmalgamProbeResult(EXCEEDS_LIMIT, max_cosets=max_cosets, high_water=e.high_water)
    n = spec.rank
    chiral = spec.variant == CHIRAL
    res = AmalgamProbeResult(FINITE, order=g.order, group=g)
    try:
        if chiral:
            verify_rotation_system(g, n, heuristic=n >= 5)
        else:
            verify_string_cgroup(g, n)
        res.cgroup_ok = True
    except (NotACGroup, NotARotationGroup) as e:
        res.reason = str(e)
    f, v = spec.sides()
    k = n - 1 if chiral else n
    res.facet_ok = _side_ok(g, [Word.gen(i) for i in range(k - 1)], f, chiral)
    res.vertex_figure_ok = _side_ok(g, [Word.gen(i) for i in range(1, k)], v, chiral)
    if not res.exists:
        res.status = DEGENERATE
        if res.reason is None:
            bad = [name for name, ok in (("facet", res.facet_ok), ("vertex-figure", res.vertex_figure_ok))
                   if not ok]
            res.reason = " and ".join(bad) + " not recovered"
    return res


# neighborliness ---------------------------------------------------------------

def cross_polytope_presentation(n: int) -> Presentation:
    return Presentation.coxeter([3] * (n - 2) + [4])


def neighborly_criterion_check(p1: Polytope, n: int | None = None) -> str:
    """Predicted finiteness of the universal polytope with facets ``p1``
    and cross-polytope vertex-figures."""
    if n is not None and n != p1.rank:
        raise TypeMismatch(f"facet has rank {p1.rank}, not {n}")
    return FINITE if combinatorial_profile(p1).is_neighborly else "Infinite"
