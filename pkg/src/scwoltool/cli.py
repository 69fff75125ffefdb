"""Command-line front end: ``scwoltool <command> ...``.

Exit codes: 0 success, 2 invalid input, 3 undecided or budget exhausted,
4 a violation was found (or a certificate provably does not exist),
5 an internal search limit was hit.
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import Callable, Sequence

import yaml

from . import coarse, development
from .complex import complex_to_dict, induced_complex, validate_complex
from .fixtures import data_path
from .groups import GroupError
from .io import ProjectError, load_metric, load_project, load_union_config
from .metric import DisconnectedError
from .scwol import ScwolError, skeleton_dot, one_skeleton, to_dot, validate_action, validate_scwol
from .words import Undecided, Verdict, WordError, word_equal

EXIT_OK, EXIT_INPUT, EXIT_UNDECIDED, EXIT_VIOLATION, EXIT_LIMIT = 0, 2, 3, 4, 5


class CliExit(Exception):
    def __init__(self, code: int, message: str = ""):
        super().__init__(message)
        self.code = code


def _emit(out: Callable[[str], None], payload, fmt: str, text_lines: Sequence[str] | None = None) -> None:
    if fmt == "json":
        out(json.dumps(payload, indent=2, sort_keys=False, default=str))
    elif fmt == "yaml":
        out(yaml.safe_dump(payload, sort_keys=False))
    else:
        for line in text_lines if text_lines is not None else [str(payload)]:
            out(line)


def _resolve(path: str) -> str:
    """Bundled fixtures can be named as ``@name`` (e.g. ``@z2z3``)."""
    if path.startswith("@"):
        name = path[1:]
        return str(data_path(name if "." in name else f"{name}.yaml"))
    return path


def _project(path: str):
    return load_project(_resolve(path))


def _param(args, name: str, project, default):
    val = getattr(args, name, None)
    if val is not None:
        return val
    return project.run.get(name, default) if project is not None else default


# -- commands -------------------------------------------------------------


def cmd_validate(args, out) -> int:
    proj = _project(args.file)
    report = validate_scwol(proj.scwol)
    if proj.action is not None:
        report.extend(validate_action(proj.scwol, proj.action))
    if report.ok and proj.complex is not None:
        report = validate_complex(proj.complex)
    _emit(out, report.to_dict(), args.out, report.lines())
    return EXIT_OK if report.ok else EXIT_VIOLATION


def cmd_skeleton(args, out) -> int:
    proj = _project(args.file)
    if args.out == "dot":
        out(skeleton_dot(proj.scwol))
    elif args.out == "json":
        out(json.dumps(one_skeleton(proj.scwol).to_dict(), indent=2))
    else:
        out(to_dot(proj.scwol))
    return EXIT_OK


def cmd_cog(args, out) -> int:
    proj = _project(args.file)
    if args.action_cmd == "validate":
        if proj.complex is None and proj.action is not None:
            pre = validate_action(proj.scwol, proj.action)
            if not pre.ok:
                _emit(out, pre.to_dict(), args.out, pre.lines())
                return EXIT_VIOLATION
        c = proj.complex_of_groups()
        report = validate_complex(c)
        _emit(out, report.to_dict(), args.out, report.lines())
        return EXIT_OK if report.ok else EXIT_VIOLATION
    act_proj = _project(args.action) if args.action else proj
    if act_proj.action is None:
        raise CliExit(EXIT_INPUT, "no action declared")
    report = validate_action(proj.scwol, act_proj.action)
    if not report.ok:
        _emit(out, report.to_dict(), args.out, report.lines())
        return EXIT_VIOLATION
    ind = induced_complex(proj.scwol, act_proj.action)
    check = validate_complex(ind.complex)
    payload = complex_to_dict(ind.complex)
    payload["validation"] = check.to_dict()
    _emit(out, payload, "yaml" if args.out == "text" else args.out)
    return EXIT_OK if check.ok else EXIT_VIOLATION


def _presentation(proj, args):
    budget = _param(args, "budget", proj, None)
    return proj.presentation(budget)


def cmd_word(args, out) -> int:
    proj = _project(args.file)
    p = _presentation(proj, args)
    if args.word_cmd == "reduce":
        w = proj.parse_word(p, args.word)
        try:
            r = p.reduce(w)
        except Undecided as exc:
            best = p.format(exc.best) if exc.best is not None else "?"
            _emit(out, {"status": "undecided", "best": best, "explored": exc.explored}, args.out,
                  [f"undecided after {exc.explored} words; shortest seen: {best}"])
            return EXIT_UNDECIDED
        payload = {"word": p.format(r.word), "path_length": r.word.path_length, "certified": r.certified}
        _emit(out, payload, args.out, [f"{payload['word']}  (path length {payload['path_length']}, certified reduced)"])
        return EXIT_OK
    u, v = proj.parse_word(p, args.word), proj.parse_word(p, args.other)
    verdict = word_equal(u, v, p)
    _emit(out, {"verdict": verdict.value}, args.out, [verdict.value])
    return EXIT_UNDECIDED if verdict is Verdict.UNDECIDED else EXIT_OK


def cmd_develop(args, out) -> int:
    proj = _project(args.file)
    p = _presentation(proj, args)
    ball = development.develop_ball(p, _param(args, "radius", proj, 2))
    if args.out == "dot":
        out(ball.to_dot())
    elif args.out == "json":
        out(json.dumps(ball.to_dict(), indent=2))
    else:
        out(f"radius {ball.radius}: {len(ball)} vertices, {len(ball.edges)} edges")
        out("vertices by distance: " + " ".join(map(str, ball.counts_by_distance())))
        for line in ball.labels():
            out("  " + line)
    return EXIT_OK


def cmd_stabilizer(args, out) -> int:
    proj = _project(args.file)
    p = _presentation(proj, args)
    R = _param(args, "radius", proj, 2)
    stab = development.r_stabilizer(p, R)
    words = sorted((p.format(w) for w in stab.values()), key=lambda x: (len(x), x))
    _emit(out, {"radius": R, "size": len(words), "elements": words}, args.out,
          [f"W_{R}: {len(words)} elements"] + ["  " + w for w in words])
    return EXIT_OK


def cmd_prop1(args, out) -> int:
    proj = _project(args.file)
    p = _presentation(proj, args)
    R = _param(args, "radius", proj, 2)
    ball = development.develop_ball(p, R)
    reports = [development.check_prop1(p, r, ball=ball) for r in range(R + 1)]
    lines = [line for rep in reports for line in rep.lines()]
    _emit(out, [rep.__dict__ for rep in reports], args.out, lines)
    if not all(rep.ok for rep in reports):
        return EXIT_VIOLATION
    return EXIT_UNDECIDED if any(rep.undecided for rep in reports) else EXIT_OK


def cmd_ball(args, out) -> int:
    proj = _project(args.file)
    p = _presentation(proj, args)
    R = _param(args, "radius", proj, 2)
    gb = development.group_ball(p, R)
    if args.out == "json":
        out(json.dumps(gb.space.to_dict(), indent=2))
    else:
        out(f"word ball of radius {R}: {len(gb.words)} elements, diameter {gb.space.diameter()}")
        out("generators: " + ", ".join(p.format(g) for g in gb.generators))
        for w, n in zip(gb.words, gb.norms):
            out(f"  {n}  {p.format(w)}")
    return EXIT_OK


def cmd_asdim(args, out) -> int:
    X = load_metric(_resolve(args.file))
    try:
        cert = coarse.find_asdim_certificate(X, args.n, args.R, args.D, args.node_limit or None)
    except coarse.SearchLimitExceeded as exc:
        _emit(out, {"status": "limit", "nodes": exc.nodes}, args.out, [str(exc)])
        return EXIT_LIMIT
    if cert is None:
        _emit(out, {"status": "none"}, args.out,
              [f"no certificate with {args.n + 1} families at R={args.R}, D={args.D} (exhaustive)"])
        return EXIT_VIOLATION
    check = coarse.check_certificate(X, cert)
    payload = {"status": "found", "certificate": cert.to_dict(X), "valid": check.ok}
    lines = [f"certificate with {args.n + 1} families at R={args.R}, D={args.D}: {'valid' if check.ok else 'INVALID'}"]
    for f, fam in enumerate(cert.families):
        lines.append(f"  family {f}: " + " | ".join(",".join(str(X.labels[i]) for i in s) for s in fam))
    _emit(out, payload, args.out, lines)
    return EXIT_OK if check.ok else EXIT_VIOLATION


def cmd_propa(args, out) -> int:
    X = load_metric(_resolve(args.file))
    center = X.index(args.center) if args.center is not None else None
    profile = coarse.variation_profile(X, args.nmax, args.K, center=center, interior=center is not None)
    support = all(ok for _, _, ok in profile)
    rows = [{"n": n, "variation": None if v is None else str(v), "support_ok": ok} for n, v, ok in profile]
    lines = [f"n={n}  max variation {'-' if v is None else v}  support {'ok' if ok else 'FAILED'}" for n, v, ok in profile]
    _emit(out, rows, args.out, lines)
    return EXIT_OK if support else EXIT_VIOLATION


def cmd_union(args, out) -> int:
    cfg = load_union_config(_resolve(args.file))
    P = cfg.params
    if cfg.kind == "union":
        rep = coarse.union_harness(cfg.space, cfg.pieces, cfg.core, P["n"], P["R"], P["D"], P["r"])
    else:
        rep = coarse.finite_union_harness(cfg.space, cfg.pieces, P["R"], P["D"], P.get("max_n", 3))
    payload = {
        "kind": cfg.kind,
        "hypotheses": rep.hypotheses.to_dict(),
        "n": rep.n,
        "achieved": None if rep.achieved is None else {"R": rep.achieved.R, "D": rep.achieved.D},
    }
    _emit(out, payload, args.out, rep.lines())
    return EXIT_OK if rep.ok else EXIT_VIOLATION


def report_lines(proj, radius: int, budget: int | None = None) -> tuple[list[str], bool]:
    """The full pipeline.  Sections that do not depend on ``radius`` come first,
    then one section per radius 0..radius, so a smaller radius gives a prefix."""
    lines: list[str] = [f"== {proj.name} =="]
    ok = True
    rep = validate_scwol(proj.scwol)
    if proj.action is not None:
        rep.extend(validate_action(proj.scwol, proj.action))
    c = proj.complex_of_groups()
    rep.extend(validate_complex(c))
    lines.append(f"[validate] {'ok' if rep.ok else 'FAILED'}")
    lines += ["  " + x for x in rep.lines()] if not rep.ok else []
    if not rep.ok:
        return lines, False
    p = proj.presentation(budget)
    run = proj.run
    gr, scale, bound = run.get("group_ball_radius"), run.get("scale"), run.get("bound")
    if gr is not None and scale is not None and bound is not None:
        gb = development.group_ball(p, gr)
        m = coarse.minimal_families(gb.space, scale, bound, max_n=3)
        lines.append(f"[bound] word ball radius {gr}: {len(gb.words)} points, probe R={scale} D={bound}")
        if m is None:
            lines.append("  no certificate with at most 4 families")
            ok = False
        else:
            br = coarse.dimension_bound_report(run.get("local_asdim", 0), run.get("development_asdim", 1), m)
            lines += ["  " + x for x in br.lines()]
            ok &= br.within_bound
    if run.get("nmax") is not None:
        probe = coarse.stabilizer_propA_probe(
            p, run.get("stabilizer_radius", 2), run["nmax"], run.get("K", 1), gr
        )
        lines.append("[propa]")
        lines += ["  " + x for x in probe.lines()]
    ball = development.develop_ball(p, radius)
    for r in range(radius + 1):
        counts = ball.counts_by_distance()[: r + 1]
        lines.append(f"[radius {r}] development vertices by distance: {' '.join(map(str, counts))}")
        pr = development.check_prop1(p, r, ball=ball)
        lines += ["  " + x for x in pr.lines()]
        ok &= pr.ok
    return lines, ok


def cmd_report(args, out) -> int:
    proj = _project(args.file)
    lines, ok = report_lines(proj, _param(args, "radius", proj, 2), _param(args, "budget", proj, None))
    for line in lines:
        out(line)
    return EXIT_OK if ok else EXIT_VIOLATION


# -- parser ---------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="scwoltool", description="Complexes of groups over scwols.")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name: str, func, help_: str, file_help: str = "project file (or @fixture)"):
        sp = sub.add_parser(name, help=help_)
        sp.add_argument("file", help=file_help)
        sp.add_argument("--out", choices=["text", "json", "dot", "yaml"], default="text")
        sp.add_argument("--budget", type=int, default=None, help="rewriting budget (words explored)")
        sp.set_defaults(func=func)
        return sp

    add("validate", cmd_validate, "check scwol, action and complex axioms")
    add("skeleton", cmd_skeleton, "export the scwol or its 1-skeleton")
    sp = sub.add_parser("cog", help="complex-of-groups tools")
    cog = sp.add_subparsers(dest="action_cmd", required=True)
    v = cog.add_parser("validate")
    v.add_argument("file")
    v.add_argument("--out", choices=["text", "json", "yaml"], default="text")
    v.set_defaults(func=cmd_cog)
    ind = cog.add_parser("induce")
    ind.add_argument("file", help="scwol (project) file")
    ind.add_argument("action", nargs="?", help="file declaring the action (default: same file)")
    ind.add_argument("--out", choices=["text", "json", "yaml"], default="text")
    ind.set_defaults(func=cmd_cog)

    sp = sub.add_parser("word", help="reduce words or test equality in the fundamental group")
    wsub = sp.add_subparsers(dest="word_cmd", required=True)
    r = wsub.add_parser("reduce")
    r.add_argument("file")
    r.add_argument("word")
    eq = wsub.add_parser("eq")
    eq.add_argument("file")
    eq.add_argument("word")
    eq.add_argument("other")
    for w in (r, eq):
        w.add_argument("--budget", type=int, default=None)
        w.add_argument("--out", choices=["text", "json"], default="text")
        w.set_defaults(func=cmd_word)

    for name, func, help_ in (
        ("develop", cmd_develop, "enumerate a ball of the development"),
        ("stabilizer", cmd_stabilizer, "list the R-stabilizer of the base vertex"),
        ("prop1-check", cmd_prop1, "compare R-stabilizers with short reduced words"),
        ("ball", cmd_ball, "word-metric ball in the fundamental group"),
        ("report", cmd_report, "run the whole pipeline"),
    ):
        sp = add(name, func, help_)
        sp.add_argument("--radius", type=int, default=None)

    sp = add("asdim", cmd_asdim, "search for an asymptotic-dimension certificate", "metric file")
    sp.add_argument("-n", "--families", dest="n", type=int, required=True, help="n (uses n+1 families)")
    sp.add_argument("-R", "--scale", dest="R", type=int, required=True)
    sp.add_argument("-D", "--bound", dest="D", type=int, required=True)
    sp.add_argument("--node-limit", type=int, default=2_000_000, help="0 disables the limit")

    sp = add("propa", cmd_propa, "ball-averaging property-A witnesses", "metric file")
    sp.add_argument("--nmax", type=int, required=True)
    sp.add_argument("-K", type=int, default=1)
    sp.add_argument("--center", default=None, help="restrict pairs to points whose balls avoid the boundary")

    add("union-check", cmd_union, "union harnesses", "union configuration file")
    return parser


def main(argv: Sequence[str] | None = None, out: Callable[[str], None] = print) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args, out)
    except CliExit as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code
    except development.DevelopmentInconsistent as exc:
        print(f"undecided: {exc}", file=sys.stderr)
        return EXIT_UNDECIDED
    except Undecided as exc:
        print(f"undecided: {exc}", file=sys.stderr)
        return EXIT_UNDECIDED
    except coarse.SearchLimitExceeded as exc:
        print(f"limit: {exc}", file=sys.stderr)
        return EXIT_LIMIT
    except (ProjectError, ScwolError, GroupError, WordError, DisconnectedError, OSError, yaml.YAMLError, KeyError) as exc:
        print(f"invalid input: {exc}", file=sys.stderr)
        return EXIT_INPUT


def main_entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    main_entry()
