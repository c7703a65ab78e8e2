import json

import pytest

from conftest import coxeter, coxeter_polytope, hemicube, rot, torus44
from polyforge.amalgam import (CHIRAL, DEGENERATE, EXCEEDS_LIMIT, FINITE, AmalgamSpec,
                               amalgam_presentation, check_compatible, cross_polytope_presentation,
                               neighborly_criterion_check, probe_universal)
from polyforge.cgroups import verify_rotation_system, verify_string_cgroup
from polyforge.errors import IncompatibleSections, TypeMismatch
from polyforge.groups import subgroup_group
from polyforge.polytope import (facet, is_isomorphic, polytope_from_cgroup,
                                polytope_from_rotation_system, vertex_figure)
from polyforge.toroids import SQ44
from polyforge.words import Presentation, Word


def _chiral(f, v, **kw):
    return AmalgamSpec(f, v, CHIRAL, **kw)


def test_regular_spherical_presentation():
    pres = amalgam_presentation(AmalgamSpec(coxeter(3, 3), coxeter(3, 4)))
    assert Word.of(0, 3) ** 2 in pres.relators
    # exactly the Coxeter relations, nothing extra
    assert set(pres.all_relators()) == set(Presentation.coxeter([3, 3, 4]).all_relators())


def test_chiral_single_extra_relator():
    s, t = 1, 2
    pres = amalgam_presentation(_chiral(rot(SQ44, s, t), coxeter(4, 3)))
    s1, s2 = Word.gen(0), Word.gen(1)
    extra = (s1.inverse() * s2) ** s * (s1 * s2.inverse()) ** t
    assert extra in pres.relators
    s3 = Word.gen(2)
    for w in (s1 ** 4, s2 ** 4, s3 ** 3, (s1 * s2) ** 2, (s2 * s3) ** 2, (s1 * s2 * s3) ** 2):
        assert w in pres.relators
    assert pres.n_generators == 3 and not any(pres.involutory)


def test_two_extra_relators_one_per_side():
    pres = amalgam_presentation(_chiral(rot(SQ44, 1, 3), rot(SQ44, 1, 3)))
    s1, s2, s3 = Word.gen(0), Word.gen(1), Word.gen(2)
    left = (s1.inverse() * s2) * (s1 * s2.inverse()) ** 3
    right = (s2.inverse() * s3) * (s2 * s3.inverse()) ** 3
    assert left in pres.relators and right in pres.relators


def test_incompatible_sections():
    with pytest.raises(IncompatibleSections):
        check_compatible(AmalgamSpec(coxeter(4, 3), coxeter(4, 3)))
    with pytest.raises(IncompatibleSections):
        amalgam_presentation(AmalgamSpec(coxeter(3, 3), coxeter(3, 3, 3)))
    with pytest.raises(TypeMismatch):
        AmalgamSpec(rot(SQ44, 1, 3), coxeter(4, 3))


def test_spherical_amalgam():
    res = probe_universal(AmalgamSpec(coxeter(3, 3), coxeter(3, 4)))
    assert res.status == FINITE and res.order == 384 and res.exists


def test_chiral_variant_has_index_two():
    reg = probe_universal(AmalgamSpec(coxeter(3, 3), coxeter(3, 4)))
    ch = probe_universal(_chiral(coxeter(3, 3), coxeter(3, 4)))
    assert ch.status == FINITE and ch.exists
    assert reg.order == 2 * ch.order


def test_enantiomorph_coherence():
    spec = _chiral(rot(SQ44, 3, 1), rot(SQ44, 1, 3))
    a = probe_universal(spec)
    b = probe_universal(spec.mirrored())
    assert a.status == b.status == FINITE
    assert a.order == b.order == 960
    assert b.exists


def test_monotone_in_budget():
    spec = AmalgamSpec(coxeter(3, 3), coxeter(3, 4))
    orders = {probe_universal(spec, m).order for m in (5000, 50000, 10**6)}
    assert orders == {384}


def test_toroidal_facets_with_hemicube_figures():
    res = probe_universal(AmalgamSpec(torus44(3, 0), hemicube()))
    assert res.status == DEGENERATE and not res.exists
    assert not res.facet_ok
    sub, _ = subgroup_group(res.group, [Word.gen(0), Word.gen(1), Word.gen(2)])
    assert sub.order != 72


@pytest.mark.parametrize("make", [
    lambda: AmalgamSpec(coxeter(3, 3), coxeter(3, 4)),
    lambda: AmalgamSpec(torus44(2, 0), coxeter(4, 3)),
    lambda: _chiral(rot(SQ44, 1, 2), coxeter(4, 3)),
])
def test_built_polytope_has_the_given_sections(make):
    spec = make()
    res = probe_universal(spec)
    assert res.status == FINITE and res.cgroup_ok
    f, v = spec.sides()
    if spec.variant == CHIRAL:
        p = polytope_from_rotation_system(verify_rotation_system(res.group, spec.rank))
        pf, pv = polytope_from_rotation_system(f), polytope_from_rotation_system(v)
    else:
        p = polytope_from_cgroup(verify_string_cgroup(res.group, spec.rank))
        pf, pv = polytope_from_cgroup(f), polytope_from_cgroup(v)
    assert is_isomorphic(facet(p), pf) is not None
    assert is_isomorphic(vertex_figure(p), pv) is not None


def test_small_regression_orders():
    assert probe_universal(AmalgamSpec(torus44(2, 0), coxeter(4, 3))).order == 192
    assert probe_universal(_chiral(rot(SQ44, 1, 2), coxeter(4, 3))).order == 120


def test_budget_exhaustion_is_reported():
    res = probe_universal(AmalgamSpec(coxeter(4, 3), coxeter(3, 4)), 20000)
    assert res.status == EXCEEDS_LIMIT and res.order is None
    assert res.high_water > 0
    assert res.to_json()["max_cosets"] == 20000


def test_result_json():
    res = probe_universal(AmalgamSpec(coxeter(3, 3), coxeter(3, 4)))
    rec = res.to_json()
    assert json.loads(json.dumps(rec)) == rec
    assert rec == {"status": FINITE, "order": 384, "cgroup_ok": True, "facet_ok": True,
                   "vertex_figure_ok": True}


def test_neighborly_predictions():
    assert neighborly_criterion_check(coxeter_polytope(3, 3)) == FINITE
    assert neighborly_criterion_check(coxeter_polytope(4, 3)) == "Infinite"
    assert neighborly_criterion_check(polytope_from_cgroup(hemicube())) == FINITE
    with pytest.raises(TypeMismatch):
        neighborly_criterion_check(coxeter_polytope(3, 3), 4)


def test_hemicube_with_octahedral_figures():
    # neighborly facets, so a finite universal polytope is predicted
    res = probe_universal(AmalgamSpec(hemicube(), coxeter(3, 4)))
    assert res.status == FINITE and res.exists
    assert res.order == 192


def test_cross_polytope_presentation():
    assert cross_polytope_presentation(3) == Presentation.coxeter([3, 4])
    assert cross_polytope_presentation(4) == Presentation.coxeter([3, 3, 4])
