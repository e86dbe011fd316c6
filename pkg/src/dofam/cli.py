"""Command-line front end: derivations, axiom checks, separations, suites.

Exit codes: 0 on success / all-hold, 1 on a property failure or axiom
violation, 2 on usage or input errors.  JSON output is deterministic:
sorted keys, rationals in lowest terms.
"""

from __future__ import annotations

import argparse
import json
import sys

from .graph import (
    Bdmg,
    CriterionError,
    GraphError,
    SeparationQuery,
    acyclify,
    connecting_path,
    separated,
)
from .dist import DistError, JointTable
from .scm import Scm, ScmError, intervene_standard, joint, standard_family, validate
from .derive import (
    CapabilityError,
    DeriveError,
    InterventionalFamily,
    check_transitivity,
    derive,
    derive_variants,
    pip_adjust,
)
from .axioms import AXIOM_CHECKS, AxiomError, AxiomReport
from .verify import VerifyError, run_suite


class UsageError(Exception):
    pass


def _dump(data, args):
    text = json.dumps(data, sort_keys=True, indent=2) + "\n"
    _write(text, args)


def _write(text, args):
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _load_json(path):
    try:
        with open(path) as fh:
            return json.load(fh)
    except OSError as exc:
        raise UsageError("cannot read %s: %s" % (path, exc))
    except json.JSONDecodeError as exc:
        raise UsageError("%s: malformed JSON at line %d column %d: %s"
                         % (path, exc.lineno, exc.colno, exc.msg))


def _load_family(path):
    return InterventionalFamily.from_json_dict(_load_json(path))


def _load_table(path):
    return JointTable.from_json_dict(_load_json(path))


def _load_graph(path):
    return Bdmg.from_json_dict(_load_json(path))


def _split_nodes(text):
    return [t for t in text.split(",") if t]


# --- subcommands -------------------------------------------------------------


def cmd_derive(args):
    fam = _load_family(args.family)
    mode = args.mode.replace("-", "_")
    derivation = derive(fam, mode=mode)
    report = derivation.to_json_dict()
    if args.arc_rule != "standard" or args.arc_policy != "every_i":
        variant = derive_variants(
            fam,
            derivation,
            arc_rule=args.arc_rule.replace("-", "_").replace("every_c", "every_C"),
            arc_policy=args.arc_policy.replace("-", "_"),
        )
        report["variant_graph"] = variant.to_json_dict()
    if args.pip_adjust:
        adjustment = pip_adjust(fam, derivation)
        report["pip_adjustment"] = adjustment.to_json_dict()
    if args.format == "dot":
        parts = [derivation.graph.to_dot("G")]
        for i in derivation.roster:
            parts.append(derivation.intervened_graphs[i].to_dot("G_%s" % i))
        _write("".join(parts), args)
    elif args.format == "text":
        lines = ["rounds: %d" % derivation.rounds]
        for k in derivation.roster:
            lines.append("dcause(%s) = {%s}" % (k, ", ".join(sorted(derivation.dcause[k]))))
        lines.append("graph: %s" % derivation.graph.to_json())
        _write("\n".join(lines) + "\n", args)
    else:
        _dump(report, args)
    return 0


def cmd_check(args):
    fam = _load_family(args.family)
    names = _split_nodes(args.axioms)
    unknown = [n for n in names if n not in AXIOM_CHECKS and n != "A1"]
    if unknown:
        raise UsageError("unknown axioms: %s (have A1, %s)"
                         % (", ".join(unknown), ", ".join(sorted(AXIOM_CHECKS))))
    observed = None
    if any(n != "A1" for n in names):
        if not args.dist:
            raise UsageError("axioms other than A1 need --dist with the observed table")
        observed = _load_table(args.dist)
    reports = []
    for name in names:
        if name == "A1":
            tr = check_transitivity(fam)
            reports.append(
                AxiomReport(
                    "A1",
                    tuple(
                        {"i": i, "j": j, "k": k} for (i, j, k) in tr.violations
                    ),
                    checked=1,
                )
            )
        else:
            reports.append(AXIOM_CHECKS[name](fam, observed))
    data = [r.to_json_dict() for r in reports]
    if args.format == "text":
        lines = ["%s: %s" % (r.axiom, "holds" if r.holds else "fails") for r in reports]
        _write("\n".join(lines) + "\n", args)
    else:
        _dump(data, args)
    return 0 if all(r.holds for r in reports) else 1


def cmd_separate(args):
    g = _load_graph(args.graph)
    a = frozenset(_split_nodes(args.a))
    b = frozenset(_split_nodes(args.b))
    c = frozenset(_split_nodes(args.c or ""))
    query = SeparationQuery(a, b, c, args.criterion)
    is_sep = separated(g, query)
    witness = None
    if not is_sep:
        path = connecting_path(g, a, b, c, args.criterion)
        witness = str(path) if path else None
    if args.format == "text":
        _write(("separated" if is_sep else "connected: %s" % witness) + "\n", args)
    else:
        _dump({"separated": is_sep, "witness": witness}, args)
    return 0 if is_sep else 1


def cmd_acyclify(args):
    g = _load_graph(args.graph)
    out = acyclify(g)
    if args.format == "dot":
        _write(out.to_dot("G_acy"), args)
    else:
        _dump(out.to_json_dict(), args)
    return 0


def cmd_scm(args):
    scm = Scm.from_json_dict(_load_json(args.scm))
    report = validate(scm)
    if not report.ok:
        _dump({"valid": False, "problems": list(report.problems)}, args)
        return 1
    if args.joint:
        _dump(joint(scm).to_json_dict(), args)
        return 0
    if args.intervene:
        node, path = args.intervene
        table = _load_table(path)
        _dump(joint(intervene_standard(scm, node, table)).to_json_dict(), args)
        return 0
    if args.family:
        overrides = {}
        for item in args.override or []:
            if "=" not in item:
                raise UsageError("--override wants node=table.json")
            node, path = item.split("=", 1)
            overrides[node] = _load_table(path)
        fam = standard_family(scm, overrides=overrides or None)
        _dump(fam.to_json_dict(), args)
        return 0
    raise UsageError("choose one of --joint, --family, --intervene")


def cmd_verify(args):
    result = run_suite(args.suite, seed=args.seed, budget=args.budget)
    sys.stderr.write(
        "suite %s: %d cases, %d failures, %.2fs\n"
        % (result.suite, result.cases, len(result.failures), result.wall_time)
    )
    _dump(result.to_json_dict(), args)
    return 0 if result.ok else 1


def build_parser():
    parser = argparse.ArgumentParser(
        prog="dofam",
        description="Derive causal graphs from families of single-intervention "
        "distributions; check axioms; run verification suites.",
    )
    parser.add_argument("--format", choices=["json", "dot", "text"], default="json")
    parser.add_argument("--output", help="write to a file instead of stdout")
    parser.add_argument("--seed", type=int, default=7)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("derive", help="run the direct-cause derivation on a family")
    p.add_argument("family", help="family JSON (interventions or oracle)")
    p.add_argument("--mode", choices=["iterative", "ancestral-shortcut"],
                   default="iterative")
    p.add_argument("--arc-rule", choices=["standard", "every-c"], default="standard")
    p.add_argument("--arc-policy", choices=["every-i", "some-i"], default="every_i".replace("_", "-"))
    p.add_argument("--pip-adjust", action="store_true")
    p.set_defaults(func=cmd_derive)

    p = sub.add_parser("check", help="check axioms of a family against an observation")
    p.add_argument("family")
    p.add_argument("--dist", help="observed joint table JSON")
    p.add_argument("--axioms", default="A2,A3", help="comma list: A1,A2,A3,A4,A5,compatible")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("separate", help="answer a separation query on a graph")
    p.add_argument("graph")
    p.add_argument("--criterion", choices=["sigma", "m", "d"], default="sigma")
    p.add_argument("-A", dest="a", required=True, help="comma list of nodes")
    p.add_argument("-B", dest="b", required=True)
    p.add_argument("-C", dest="c", default="")
    p.set_defaults(func=cmd_separate)

    p = sub.add_parser("acyclify", help="acyclification of a graph")
    p.add_argument("graph")
    p.set_defaults(func=cmd_acyclify)

    p = sub.add_parser("scm", help="exact SCM computations")
    p.add_argument("scm")
    p.add_argument("--joint", action="store_true")
    p.add_argument("--family", action="store_true")
    p.add_argument("--override", action="append", metavar="node=table.json")
    p.add_argument("--intervene", nargs=2, metavar=("node", "table.json"))
    p.set_defaults(func=cmd_scm)

    p = sub.add_parser("verify", help="run a named verification suite")
    p.add_argument("--suite", required=True)
    p.add_argument("--budget", type=int, default=50)
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        sys.stderr.write("error: %s\n" % exc)
        return 2
    except (GraphError, DistError, ScmError, DeriveError, AxiomError,
            VerifyError, CriterionError, CapabilityError) as exc:
        sys.stderr.write("error: %s\n" % exc)
        return 2


if __name__ == "__main__":
    sys.exit(main())
