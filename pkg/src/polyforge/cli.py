"""Command-line front end.

Exit status: 0 success, 1 verified negative result, 2 resource limit,
3 malformed input or usage error.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass
from pathlib import Path

from . import amalgam as am
from .analysis import (arc_transitivity, girth, hole_zigzag_profile, medial_layer_graph,
                       petrie_schemes, symmetry_summary)
from .cgroups import (CHIRAL, RotationSystem, cgroup_from_presentation,
                      enantiomorph, rotation_coxeter_presentation,
                      rotation_system_from_presentation, schlafli_type)
from .cosets import default_max_cosets
from .errors import (DegenerateQuotient, IncompatibleSections, InvalidRange, LimitExceeded,
                     MalformedPresentation, NotACGroup, NotARotationGroup, PolyforgeError,
                     TypeMismatch, UnsupportedRank)
from .polytope import (NotAPolytope, Polytope, cgroup_of, combinatorial_profile, dual,
                       flag_graph, polytope_from_cgroup, polytope_from_rotation_system,
                       rotation_system_of, transitivity_report, verify_axioms)
from .quotients import SubgroupSelection, is_semisparse, quotient, scan_lines
from .toroids import (HEX63, SQ44, TRI36, LatticeBasis, cubic_toroid, family_basis,
                      rotation_presentation, torus44_cgroup_presentation, torus_map)
from .words import Presentation, Word

EXIT_OK, EXIT_NEGATIVE, EXIT_LIMIT, EXIT_INPUT = 0, 1, 2, 3

CLI_EXPLICIT_SET_BOUND = 10**5

FAMILIES = {"sq44": SQ44, "torus44": SQ44, "tri36": TRI36, "torus36": TRI36,
            "hex63": HEX63, "torus63": HEX63}


@dataclass(frozen=True)
class RunConfig:
    max_cosets: int
    explicit_set_bound: int
    output: str
    seed: int | None = None

    def __post_init__(self):
        if self.max_cosets <= 0 or self.explicit_set_bound <= 0:
            raise InvalidRange("bounds must be positive")


def canonical_json(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


# input helpers ---------------------------------------------------------------

def read_presentation(path: str) -> Presentation:
    try:
        text = Path(path).read_text()
    except OSError as e:
        raise MalformedPresentation(f"cannot read {path}: {e.strerror}")
    return Presentation.from_text(text)


def read_polytope(path: str) -> Polytope:
    try:
        data = json.loads(Path(path).read_text())
    except OSError as e:
        raise MalformedPresentation(f"cannot read {path}: {e.strerror}")
    except json.JSONDecodeError as e:
        raise MalformedPresentation(f"{path} is not JSON: {e}")
    try:
        return Polytope.from_json(data)
    except (KeyError, TypeError, ValueError) as e:
        raise MalformedPresentation(f"{path} is not a polytope record: {e}")


def is_rotation_presentation(p: Presentation) -> bool:
    return not any(p.involutory)


def group_from_presentation(p: Presentation, cfg: RunConfig, rotation: bool | None = None):
    if rotation is None:
        rotation = is_rotation_presentation(p)
    if rotation:
        return rotation_system_from_presentation(p, max_cosets=cfg.max_cosets)
    return cgroup_from_presentation(p, cfg.max_cosets)


def polytope_of(x) -> Polytope:
    if isinstance(x, RotationSystem):
        return polytope_from_rotation_system(x)
    return polytope_from_cgroup(x)


def parse_side(text: str, chiral: bool, cfg: RunConfig):
    """``torus44 s t``, ``tri36 s t``, ``hex63 s t``, ``coxeter p q ...``
    or a presentation file."""
    parts = text.split()
    head = parts[0].lower() if parts else ""
    if head in FAMILIES or head == "coxeter":
        try:
            nums = [int(x) for x in parts[1:]]
        except ValueError:
            raise MalformedPresentation(f"bad numbers in {text!r}")
        if head == "coxeter":
            if not nums:
                raise MalformedPresentation("coxeter needs a Schlafli symbol")
            if chiral:
                return rotation_system_from_presentation(rotation_coxeter_presentation(nums),
                                                         max_cosets=cfg.max_cosets)
            return cgroup_from_presentation(Presentation.coxeter(nums), cfg.max_cosets)
        if len(nums) != 2:
            raise MalformedPresentation(f"{head} needs two parameters")
        fam = FAMILIES[head]
        s, t = nums
        if chiral:
            return rotation_system_from_presentation(rotation_presentation(fam, s, t),
                                                     max_cosets=cfg.max_cosets)
        if fam != SQ44:
            raise TypeMismatch(f"{text!r}: only {{4,4}} tori have a regular builder here")
        return cgroup_from_presentation(torus44_cgroup_presentation(s, t), cfg.max_cosets)
    return group_from_presentation(read_presentation(text), cfg, rotation=chiral)


def profile_record(p: Polytope) -> dict:
    prof = combinatorial_profile(p)
    tr = transitivity_report(p)
    rec = {
        "rank": p.rank,
        "f_vector": list(prof.f_vector),
        "equivelar_type": None if prof.equivelar_type is None else list(prof.equivelar_type),
        "neighborly": prof.is_neighborly,
        "flags": p.n_flags,
        "flag_orbits": tr.flag_orbits,
        "classification": tr.classification,
        "face_orbits": list(tr.orbit_counts_per_rank),
        "adjacent_in_same_orbit": list(tr.adjacency_orbit_data),
        "automorphisms": tr.automorphism_order,
        "chiral": tr.classification == CHIRAL,
    }
    if p.rank == 3 and tr.flag_orbits <= 2 and tr.classification in ("Regular", CHIRAL):
        g = cgroup_of(p) if tr.flag_orbits == 1 else rotation_system_of(p)
        hz = hole_zigzag_profile(g)
        rec["holes"] = {str(k): v for k, v in hz.holes.items()}
        rec["zigzags"] = {str(k): v for k, v in hz.zigzags.items()}
    return rec


# commands --------------------------------------------------------------------

def cmd_verify_cgroup(args, cfg):
    p = read_presentation(args.file)
    g = group_from_presentation(p, cfg, rotation=args.rotation or None)
    rec = {"order": g.order, "rank": g.rank, "schlafli": list(schlafli_type(g))}
    if isinstance(g, RotationSystem):
        rec["verdict"] = g.verdict
    emit(rec, cfg, f"verified: order {g.order}, type {schlafli_type(g)}")
    return EXIT_OK


def cmd_schlafli(args, cfg):
    g = group_from_presentation(read_presentation(args.file), cfg, rotation=args.rotation or None)
    t = schlafli_type(g)
    emit({"schlafli": list(t)}, cfg, str(t))
    return EXIT_OK


def cmd_build(args, cfg):
    g = group_from_presentation(read_presentation(args.file), cfg, rotation=args.rotation or None)
    p = polytope_of(g)
    if cfg.output == "dot":
        write_out(flag_graph(p).to_dot(), args.out)
    else:
        write_out(canonical_json(p.to_json()) + "\n", args.out)
    return EXIT_OK


def cmd_toroid(args, cfg):
    fam = args.family.lower()
    if fam == "cubic":
        if len(args.params) != 3:
            raise MalformedPresentation("cubic toroids need n s k")
        n, s, k = args.params
        p = cubic_toroid(n, s, k)
        spec = {"family": "cubic", "params": [n, s, k]}
    else:
        if fam not in FAMILIES:
            raise MalformedPresentation(f"unknown family {args.family!r}")
        family = FAMILIES[fam]
        if args.basis:
            basis = LatticeBasis(tuple(args.basis[:2]), tuple(args.basis[2:]))
            spec = {"family": family, "basis": list(args.basis)}
        else:
            if len(args.params) != 2:
                raise MalformedPresentation("torus maps need s t (or --basis)")
            basis = family_basis(family, *args.params)
            spec = {"family": family, "params": list(args.params)}
        p = torus_map(family, basis)
    if args.analyze:
        rec = dict(spec)
        rec.update(profile_record(p))
        emit(rec, cfg, _text_profile(rec))
    elif cfg.output == "dot":
        write_out(flag_graph(p).to_dot(), args.out)
    else:
        write_out(canonical_json(p.to_json()) + "\n", args.out)
    return EXIT_OK


def _text_profile(rec: dict) -> str:
    return "\n".join(f"{k}: {v}" for k, v in sorted(rec.items()))


def cmd_analyze(args, cfg):
    p = read_polytope(args.file)
    rep = verify_axioms(p)
    if not rep.ok:
        emit({"polytope": False, "violation": rep.violation}, cfg,
             f"not a polytope: {rep.violation}")
        return EXIT_NEGATIVE
    if args.what == "profile":
        rec = profile_record(p)
        emit(rec, cfg, _text_profile(rec))
    elif args.what == "transitivity":
        tr = transitivity_report(p)
        rec = {"classification": tr.classification, "flag_orbits": tr.flag_orbits,
               "face_orbits": list(tr.orbit_counts_per_rank),
               "adjacent_in_same_orbit": list(tr.adjacency_orbit_data),
               "automorphisms": tr.automorphism_order}
        emit(rec, cfg, _text_profile(rec))
    elif args.what == "petrie":
        schemes = petrie_schemes(p)
        rec = {"schemes": [{"permutation": list(s.permutation), "cycle": list(s.cycle),
                            "acoptic": s.acoptic} for s in schemes],
               "all_acoptic": all(s.acoptic for s in schemes)}
        emit(rec, cfg, f"{len(schemes)} schemes, all acoptic: {rec['all_acoptic']}")
    else:
        m = medial_layer_graph(p, require_trivalent=args.trivalent)
        if cfg.output == "dot":
            write_out(m.to_dot(), args.out)
            return EXIT_OK
        rec = {"vertices": len(m.vertices), "edges": len(m.edges),
               "bipartite": m.is_bipartite(), "trivalent": m.is_trivalent(),
               "girth": girth(m)}
        summary = symmetry_summary(m)
        rec["vertex_transitive"] = summary.vertex_transitive
        rec["edge_transitive"] = summary.edge_transitive
        if m.is_trivalent():
            rec["arc_transitivity"] = arc_transitivity(m)
        emit(rec, cfg, _text_profile(rec))
    return EXIT_OK


def cmd_dual(args, cfg):
    write_out(canonical_json(dual(read_polytope(args.file)).to_json()) + "\n", args.out)
    return EXIT_OK


def _subgroup_words(specs):
    words = []
    for spec in specs:
        for part in spec.split(","):
            if part.strip():
                words.append(Word.parse(part))
    return words


def cmd_quotient(args, cfg):
    c = cgroup_from_presentation(read_presentation(args.file), cfg.max_cosets)
    sel = SubgroupSelection.of(c, _subgroup_words(args.subgroup))
    res = quotient(polytope_from_cgroup(c), sel)
    rep = is_semisparse(sel, cfg.explicit_set_bound)
    rec = {"subgroup_order": sel.order, "f_vector": list(res.polytope.f_vector),
           "polytope": res.ok, "violation": res.report.violation,
           "semisparse": rep.is_semisparse,
           "failed_condition": None if rep.failed_condition is None else str(rep.failed_condition),
           "eq9": rep.eq9_holds, "local_semisparse": rep.local_semisparse}
    if args.out and res.ok:
        Path(args.out).write_text(canonical_json(res.polytope.to_json()) + "\n")
    emit(rec, cfg, _text_profile(rec))
    return EXIT_OK if res.ok else EXIT_NEGATIVE


def cmd_semisparse_scan(args, cfg):
    c = cgroup_from_presentation(read_presentation(args.file), cfg.max_cosets)
    for line in scan_lines(c, bound=cfg.explicit_set_bound, with_quotients=args.quotients):
        print(line, flush=True)
    return EXIT_OK


def cmd_amalgamate(args, cfg):
    chiral = args.chiral
    f = parse_side(args.facet, chiral, cfg)
    v = parse_side(args.vertex_figure, chiral, cfg)
    spec = am.AmalgamSpec(f, v, am.CHIRAL if chiral else am.REGULAR,
                          args.mirror_facet, args.mirror_vertex_figure)
    res = am.probe_universal(spec, cfg.max_cosets)
    rec = res.to_json()
    emit(rec, cfg, _text_profile(rec))
    return {am.FINITE: EXIT_OK, am.DEGENERATE: EXIT_NEGATIVE, am.EXCEEDS_LIMIT: EXIT_LIMIT}[res.status]


def cmd_enantiomorph(args, cfg):
    r = rotation_system_from_presentation(read_presentation(args.file), max_cosets=cfg.max_cosets)
    m = enantiomorph(r)
    text = m.presentation().to_text()
    if cfg.output == "json":
        print(canonical_json({"verdict": r.verdict, "presentation": text}))
    else:
        write_out(text, args.out)
    return EXIT_OK


# plumbing --------------------------------------------------------------------

def emit(rec: dict, cfg: RunConfig, text: str):
    if cfg.output == "json":
        print(canonical_json(rec))
    else:
        print(text)


def write_out(text: str, path: str | None):
    if path:
        Path(path).write_text(text)
    else:
        sys.stdout.write(text)


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="polyforge", description="Abstract regular and chiral polytope experiments.")
    ap.add_argument("--max-cosets", type=int, default=None,
                    help="coset enumeration budget (default: $POLYFORGE_MAX_COSETS or 10^6)")
    ap.add_argument("--explicit-set-bound", type=int, default=CLI_EXPLICIT_SET_BOUND)
    ap.add_argument("--output", choices=["text", "json", "dot"], default="text")
    ap.add_argument("--json", dest="output", action="store_const", const="json")
    ap.add_argument("--seed", type=int, default=None)
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def add(name, fn, **kw):
        s = sub.add_parser(name, **kw)
        s.set_defaults(fn=fn)
        # repeated here so options may follow the subcommand
        s.add_argument("--max-cosets", type=int, default=argparse.SUPPRESS)
        s.add_argument("--output", choices=["text", "json", "dot"], default=argparse.SUPPRESS)
        s.add_argument("--json", dest="output", action="store_const", const="json",
                       default=argparse.SUPPRESS)
        return s

    s = add("verify-cgroup", cmd_verify_cgroup, help="verify a presentation as a string C-group")
    s.add_argument("file")
    s.add_argument("--rotation", action="store_true", help="treat as a rotation group")

    s = add("schlafli", cmd_schlafli, help="Schlafli type")
    s.add_argument("file")
    s.add_argument("--rotation", action="store_true")

    s = add("build", cmd_build, help="polytope from a presentation")
    s.add_argument("file")
    s.add_argument("--rotation", action="store_true")
    s.add_argument("-o", "--out")

    s = add("toroid", cmd_toroid, help="torus maps and cubic toroids")
    s.add_argument("family", help="sq44, tri36, hex63 or cubic")
    s.add_argument("params", type=int, nargs="*")
    s.add_argument("--basis", type=int, nargs=4, metavar=("U1", "U2", "V1", "V2"))
    s.add_argument("--analyze", action="store_true")
    s.add_argument("-o", "--out")

    s = add("analyze", cmd_analyze, help="profile, petrie, medial or transitivity")
    s.add_argument("file")
    s.add_argument("what", choices=["profile", "petrie", "medial", "transitivity"])
    s.add_argument("--trivalent", action="store_true", help="require a {3,q,3} type")
    s.add_argument("-o", "--out")

    s = add("dual", cmd_dual, help="dual polytope")
    s.add_argument("file")
    s.add_argument("-o", "--out")

    s = add("quotient", cmd_quotient, help="orbit quotient by a subgroup")
    s.add_argument("file")
    s.add_argument("--subgroup", action="append", required=True,
                   help="generator words, comma separated (repeatable)")
    s.add_argument("-o", "--out")

    s = add("semisparse-scan", cmd_semisparse_scan, help="all subgroups, one JSON line each")
    s.add_argument("file")
    s.add_argument("--quotients", action="store_true", help="also test each quotient")

    s = add("amalgamate", cmd_amalgamate, help="probe a universal polytope")
    s.add_argument("--facet", required=True)
    s.add_argument("--vertex-figure", required=True)
    s.add_argument("--chiral", action="store_true")
    s.add_argument("--mirror-facet", action="store_true")
    s.add_argument("--mirror-vertex-figure", action="store_true")

    s = add("enantiomorph", cmd_enantiomorph, help="presentation of the mirror image")
    s.add_argument("file")
    s.add_argument("-o", "--out")
    return ap


def config_from(args) -> RunConfig:
    mc = args.max_cosets if args.max_cosets is not None else default_max_cosets()
    return RunConfig(mc, args.explicit_set_bound, args.output, args.seed)


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        cfg = config_from(args)
        return args.fn(args, cfg)
    except (NotACGroup, NotARotationGroup, DegenerateQuotient, NotAPolytope,
            IncompatibleSections) as e:
        print(f"negative: {e}", file=sys.stderr)
        return EXIT_NEGATIVE
    except LimitExceeded as e:
        print(f"limit: {e}", file=sys.stderr)
        return EXIT_LIMIT
    except (MalformedPresentation, InvalidRange, TypeMismatch, UnsupportedRank) as e:
        print(f"input: {e}", file=sys.stderr)
        return EXIT_INPUT
    except PolyforgeError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
