import json

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from conftest import coxeter, coxeter_polytope, rot
from polyforge.cgroups import is_directly_regular
from polyforge.polytope import (NotAPolytope, Polytope, automorphism_group, cgroup_of,
                                combinatorial_profile, dual, facet, find_duality, flag_graph,
                                is_isomorphic, polytope_from_rotation_system,
                                rotation_system_of, transitivity_report, verify_axioms,
                                vertex_figure)
from polyforge.toroids import LatticeBasis, torus_map

EXAMPLES = [(4, 3), (3, 3), (3, 4), (3, 3, 3), (4, 3, 3)]


@pytest.mark.parametrize("sch,f", [((4, 3), (8, 12, 6)), ((3, 3), (4, 6, 4)),
                                   ((3, 3, 3), (5, 10, 10, 5)), ((4, 3, 3), (16, 32, 24, 8))])
def test_coset_polytopes(sch, f):
    p = coxeter_polytope(*sch)
    assert p.f_vector == f
    assert p.n_flags == coxeter(*sch).order
    assert verify_axioms(p).ok
    assert automorphism_group(p).order == p.n_flags


def test_cube_with_a_face_removed(cube):
    keep = cube.cover[2][:, 1] != 5
    broken = Polytope(3, (8, 12, 5), {1: cube.cover[1], 2: cube.cover[2][keep]})
    rep = verify_axioms(broken)
    assert not rep.ok and rep.violation == "diamond"
    assert rep.witness is not None


def test_triangle_flags():
    p = Polytope(2, (3, 3), {1: np.array([[0, 0], [1, 0], [1, 1], [2, 1], [2, 2], [0, 2]])})
    fg = flag_graph(p)
    assert fg.n_flags == 6
    walk = [0]
    for k in range(6):
        walk.append(int(fg.gamma[k % 2][walk[-1]]))
    assert walk[-1] == 0 and len(set(walk[:-1])) == 6


@pytest.mark.parametrize("sch", EXAMPLES)
def test_flag_graph_invariants(sch):
    p = coxeter_polytope(*sch)
    fg = flag_graph(p)
    idx = np.arange(fg.n_flags)
    for i in range(p.rank):
        g = fg.gamma[i]
        assert not (g == idx).any()
        assert np.array_equal(g[g], idx)
        diff = fg.flags[g] != fg.flags
        assert (diff.sum(axis=1) == 1).all() and diff[:, i].all()
        for j in range(i + 2, p.rank):
            h = fg.gamma[j]
            assert np.array_equal(g[h], h[g])
    assert fg.is_connected()


def test_automorphisms_commute_with_adjacency():
    p = torus_map("Sq44", LatticeBasis((3, 1), (-1, 3)))
    aut = automorphism_group(p)
    fg = flag_graph(p)
    assert aut.order == 40 and aut.n_orbits == 2
    for a in aut:
        for i in range(3):
            assert np.array_equal(a[fg.gamma[i]], fg.gamma[i][a])


@pytest.mark.parametrize("basis,cls,orbits", [
    (((3, 0), (0, 3)), "Regular", 1),
    (((3, 1), (-1, 3)), "Chiral", 2),
    (((3, 1), (1, 3)), "FullyTransitive", 2),
])
def test_transitivity(basis, cls, orbits):
    p = torus_map("Sq44", LatticeBasis(*basis))
    tr = transitivity_report(p)
    assert (tr.classification, tr.flag_orbits) == (cls, orbits)
    if cls == "Chiral":
        assert not any(tr.adjacency_orbit_data)
    if cls == "FullyTransitive":
        assert tr.adjacency_orbit_data[1]
        assert tr.automorphism_order == 32
    if cls in ("Regular", "FullyTransitive"):
        assert tr.fully_transitive


@pytest.mark.parametrize("s,t", [(3, 0), (3, 1), (1, 2), (2, 2)])
def test_chirality_agrees_with_rotation_group(s, t):
    p = torus_map("Sq44", LatticeBasis.square(s, t))
    chiral = transitivity_report(p).classification == "Chiral"
    assert chiral == (not is_directly_regular(rotation_system_of(p))[0])


def test_duality(cube):
    assert is_isomorphic(dual(dual(cube)), cube) is not None
    assert find_duality(cube) is None
    d = find_duality(coxeter_polytope(3, 3))
    assert d is not None and d.is_polarity
    assert find_duality(coxeter_polytope(3, 3, 3)).is_polarity
    assert is_isomorphic(dual(cube), coxeter_polytope(3, 4)) is not None
    assert is_isomorphic(cube, coxeter_polytope(3, 4)) is None


@pytest.mark.parametrize("sch", EXAMPLES)
def test_double_dual(sch):
    p = coxeter_polytope(*sch)
    assert is_isomorphic(dual(dual(p)), p) is not None


@settings(max_examples=20, deadline=None)
@given(st.permutations(range(8)), st.permutations(range(12)), st.permutations(range(6)))
def test_relabelled_cube_is_isomorphic(pv, pe, pf):
    cube = coxeter_polytope(4, 3)
    pv, pe, pf = np.array(pv), np.array(pe), np.array(pf)
    c1 = np.stack([pv[cube.cover[1][:, 0]], pe[cube.cover[1][:, 1]]], axis=1)
    c2 = np.stack([pe[cube.cover[2][:, 0]], pf[cube.cover[2][:, 1]]], axis=1)
    q = Polytope(3, cube.counts, {1: c1, 2: c2})
    assert is_isomorphic(cube, q) is not None


def test_profiles():
    t = combinatorial_profile(coxeter_polytope(3, 3))
    assert (t.f_vector, t.equivelar_type, t.is_neighborly) == ((4, 6, 4), (3, 3), True)
    c = combinatorial_profile(coxeter_polytope(4, 3))
    assert (c.f_vector, c.equivelar_type, c.is_neighborly) == ((8, 12, 6), (4, 3), False)
    g = combinatorial_profile(torus_map("Sq44", LatticeBasis.square(3, 0)))
    assert (g.f_vector, g.equivelar_type, g.is_neighborly) == ((9, 18, 9), (4, 4), False)


def test_sections(cube):
    assert facet(cube).f_vector == (4, 4)
    assert vertex_figure(cube).f_vector == (3, 3)
    p = coxeter_polytope(4, 3, 3)
    assert is_isomorphic(facet(p), cube) is not None
    assert is_isomorphic(vertex_figure(p), coxeter_polytope(3, 3)) is not None


@pytest.mark.parametrize("sch", EXAMPLES)
def test_json_round_trip(sch):
    p = coxeter_polytope(*sch)
    text = json.dumps(p.to_json(), sort_keys=True)
    q = Polytope.from_json(json.loads(text))
    assert json.dumps(q.to_json(), sort_keys=True) == text
    assert q.f_vector == p.f_vector


def test_flag_graph_dot(cube):
    dot = flag_graph(cube).to_dot()
    assert dot.count("--") == 48 * 3 // 2
    assert "[color=2]" in dot


def test_group_round_trips():
    c = cgroup_of(coxeter_polytope(4, 3))
    assert c.order == 48
    r = rot("Sq44", 3, 1)
    p = polytope_from_rotation_system(r)
    assert p.f_vector == (10, 20, 10) and p.n_flags == 80
    assert transitivity_report(p).classification == "Chiral"
    assert rotation_system_of(p).order == 40


def test_bad_adjacency_is_reported():
    # two triangles glued along all three edges, with a dangling extra edge
    p = Polytope(2, (3, 4), {1: np.array([[0, 0], [1, 0], [1, 1], [2, 1], [2, 2], [0, 2], [0, 3]])})
    assert not verify_axioms(p).ok
    with pytest.raises(NotAPolytope):
        flag_graph(p)
