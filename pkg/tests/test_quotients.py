import json

import pytest
from hypothesis import given, settings, strategies as st

from conftest import coxeter, coxeter_polytope, torus44
from polyforge.errors import TypeMismatch
from polyforge.polytope import is_isomorphic, polytope_from_cgroup
from polyforge.quotients import (SubgroupSelection, all_subgroups, check_problem23_hypotheses,
                                 is_semisparse, quotient, scan_lines, semisparse_scan)
from polyforge.toroids import SQ44, LatticeBasis, torus_map
from polyforge.words import Word

CENTRAL = Word.of(0, 1, 2) ** 3
_cube_subgroups = all_subgroups(coxeter(4, 3).group)


def _sel(c, *words):
    return SubgroupSelection.of(c, list(words))


def test_hemicube_quotient(cube):
    sel = _sel(coxeter(4, 3), CENTRAL)
    assert sel.order == 2
    res = quotient(cube, sel)
    assert res.ok and res.polytope.f_vector == (4, 6, 3)
    r = is_semisparse(sel)
    assert r.is_semisparse and r.failed_condition is None
    assert check_problem23_hypotheses(sel) == {"local_semisparse": True, "eq9": True, "semisparse": True}


def test_mirror_quotient_fails(cube):
    sel = _sel(coxeter(4, 3), Word.gen(0))
    res = quotient(cube, sel)
    assert not res.ok
    r = is_semisparse(sel)
    assert not r.is_semisparse
    assert str(r.failed_condition) == "C1{phi=e, i=0}"
    h = check_problem23_hypotheses(sel)
    assert h["semisparse"] is False and set(h) == {"local_semisparse", "eq9", "semisparse"}


def test_trivial_subgroup(cube):
    sel = _sel(coxeter(4, 3))
    assert sel.order == 1
    assert is_semisparse(sel).is_semisparse
    res = quotient(cube, sel)
    assert res.ok and is_isomorphic(res.polytope, cube) is not None


def test_torus_translation_quotient():
    c = torus44(6, 0)
    p = polytope_from_cgroup(c)
    t1, t2 = Word.of(2, 1, 0, 1), Word.of(0, 1, 2, 1)
    sel = _sel(c, t1 ** 3, t2 ** 3)
    assert sel.order == 4
    res = quotient(p, sel)
    assert res.ok
    assert res.polytope.f_vector == (9, 18, 9)
    assert is_isomorphic(res.polytope, torus_map(SQ44, LatticeBasis.square(3, 0))) is not None
    assert is_semisparse(sel).is_semisparse
    # translations act freely on flags
    assert res.polytope.n_flags * sel.order == p.n_flags


def test_translation_chain():
    c = torus44(4, 0)
    p = polytope_from_cgroup(c)
    t1, t2 = Word.of(2, 1, 0, 1), Word.of(0, 1, 2, 1)
    for sel, s in [(_sel(c, t1 ** 2, t2 ** 2), 2), (_sel(c), 4)]:
        res = quotient(p, sel)
        assert is_semisparse(sel).is_semisparse and res.ok
        assert res.polytope.n_flags * sel.order == p.n_flags
        assert res.polytope.f_vector == (s * s, 2 * s * s, s * s)


def test_cube_subgroup_invariants(cube):
    c = coxeter(4, 3)
    assert len(_cube_subgroups) == 98
    for m in _cube_subgroups:
        sel = SubgroupSelection.from_mask(c, m)
        r = is_semisparse(sel)
        if r.is_semisparse:
            assert r.local_semisparse and r.eq9_holds
            assert quotient(cube, sel).ok


@settings(max_examples=40, deadline=None)
@given(st.integers(0, len(_cube_subgroups) - 1), st.integers(0, 47))
def test_conjugation_invariance(k, phi):
    c = coxeter(4, 3)
    sel = SubgroupSelection.from_mask(c, _cube_subgroups[k])
    conj = sel.conjugate(phi)
    assert conj.order == sel.order
    assert is_semisparse(conj).is_semisparse == is_semisparse(sel).is_semisparse


def test_scan_of_small_torus():
    c = torus44(2, 0)
    recs = list(semisparse_scan(c, with_quotients=True))
    assert len(recs) == 106
    assert [r["index"] for r in recs] == list(range(106))
    for r in recs:
        if r["semisparse"]:
            assert r["local_semisparse"] and r["eq9"] and r["quotient_is_polytope"]
        assert r["counterexample"] == (r["local_semisparse"] and r["eq9"] and not r["semisparse"])
    assert recs[0]["order"] == 1 and recs[-1]["order"] == 32


def test_scan_lines_are_canonical_json():
    for line in scan_lines(coxeter(3, 3)):
        rec = json.loads(line)
        assert json.dumps(rec, sort_keys=True, separators=(",", ":")) == line


def test_rank_mismatch(cube):
    with pytest.raises(TypeMismatch):
        quotient(coxeter_polytope(3, 3, 3), _sel(coxeter(4, 3), CENTRAL))
