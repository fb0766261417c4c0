# colorlab/cli.py
"""
Command-line interface for colorlab
Subcommands: gen, lp, sa, cert, bichrom, gap, run, validate, schema.
JSON goes to stdout, logs to stderr.
"""
import argparse
import json
import sys
from pathlib import Path
from typing import List, Optional

from loguru import logger

from colorlab import __version__
from colorlab.config import DOCS_DIR, REPRODUCE_PRESET, get_sa_budget
from colorlab.model import instance_to_dict, load_instance, parse_rational, save_instance
from colorlab.reports import canonical_json
from colorlab.validators import CertificateError, ColorLabError, InstanceError

FAMILIES = ["hypercube", "c4chain", "cyclic", "cyclic_square", "exemplar", "rainbow_c4"]


def emit(value) -> None:
    print(canonical_json(value))


def load_source(args):
    """Instance from --in FILE or from --family/--param/--eps"""
    from colorlab.generators import gen_by_name

    if getattr(args, "input", None):
        return load_instance(args.input)
    if getattr(args, "family", None):
        eps = parse_rational(args.eps) if args.eps else None
        return gen_by_name(args.family, args.param, eps)
    raise InstanceError("Give an instance with --in FILE or --family NAME")


def add_source(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--in", dest="input", help="Instance JSON file")
    parser.add_argument("--family", choices=FAMILIES, help="Generate the instance instead")
    parser.add_argument("--param", help="Family parameter: ℓ, k or left/right")
    parser.add_argument("--eps", help="ε as p/q for the hypercube family (default 1/100)")


# ==============================================================================
# COMMANDS
# ==============================================================================

def cmd_gen(args) -> int:
    from colorlab.generators import gen_by_name

    family = args.family or args.name
    if not family:
        raise InstanceError("Give a family with --family NAME")
    eps = parse_rational(args.eps) if args.eps else None
    inst = gen_by_name(family, args.param, eps)
    if args.out:
        save_instance(inst, args.out)
        logger.info(f"✅ Saved {inst.name} to {args.out}")
    else:
        emit(instance_to_dict(inst))
    return 0


def cmd_validate(args) -> int:
    from colorlab.validators import validate

    inst = load_source(args)
    violations = validate(inst)
    emit({"instance": inst.name, "valid": not violations, "violations": [v.to_dict() for v in violations]})
    return 1 if violations else 0


def build_relaxation(inst, relaxation: str, chvatal: bool = False):
    """M_c, HM_c or the covering dual, optionally with first-round Chvátal cuts"""
    from colorlab.model import to_hypergraph
    from colorlab.ratlp import build_dual, build_hm, build_mc, chvatal_round_ones, color_row_ids

    if relaxation == "mc":
        lp = build_mc(inst)
        rows = color_row_ids(lp)
    elif relaxation == "hm":
        lp = build_hm(to_hypergraph(inst))
        rows = [row.id for row in lp.constraints if row.id.startswith("vtx:c:")]
    else:
        if chvatal:
            raise InstanceError("Chvátal cuts need a packing relaxation (mc or hm)", {"relaxation": relaxation})
        return build_dual(to_hypergraph(inst))
    return chvatal_round_ones(lp, rows) if chvatal else lp


def cmd_lp(args) -> int:
    from colorlab.ratlp import export_lp, solve

    inst = load_source(args)
    lp = build_relaxation(inst, args.relaxation, args.chvatal)
    if args.export:
        print(export_lp(lp))
        return 0
    solution = solve(lp)
    emit({"instance": inst.name, "lp": lp.name, "relaxation": args.relaxation, **solution.to_dict()})
    return 0


def cmd_sa(args) -> int:
    from colorlab.ratlp import build_mc, solve
    from colorlab.sa import candidate_vector, check_closed_form, check_explicit, eps_sweep, hypercube_dimension, sa_lift

    inst = load_source(args)
    budget = get_sa_budget(args.budget)
    result = {"instance": inst.name, "level": args.level}

    if args.check_candidate or args.sweep:
        eps = parse_rational(args.eps) if args.eps else parse_rational("1/100")
        ell = hypercube_dimension(inst, eps)
        if args.check_candidate:
            mv = candidate_vector(inst, args.level, eps)
            closed = check_closed_form(inst, mv, args.level)
            explicit = check_explicit(inst, mv, args.level, budget)
            result["status"] = closed.status
            if closed.witness is not None:
                result["witness"] = closed.witness
            result["closed_form"] = closed.to_dict()
            result["explicit"] = explicit.to_dict()
            result["agree"] = closed.status == explicit.status
        if args.sweep:
            result["sweep"] = eps_sweep(ell, args.level, [parse_rational(e) for e in args.sweep])
    else:
        solution = solve(sa_lift(build_mc(inst), args.level, budget))
        result["status"] = solution.status
        result["optimum"] = solution.objective_value
    emit(result)
    return 0 if result.get("agree", True) else 1


def cmd_cert(args) -> int:
    from colorlab.dualcert import build_certificate, verify_certificate
    from colorlab.model import to_hypergraph
    from colorlab.ratlp import build_hm, solve

    inst = load_source(args)
    h = to_hypergraph(inst)
    primal = solve(build_hm(h))
    bipartite = args.bipartite or inst.is_bipartite()
    cert = build_certificate(h, primal, bipartite)
    report = verify_certificate(h, cert, primal.objective_value)
    emit({"instance": inst.name, "lp_opt": primal.objective_value, **cert.to_dict(), "checks": report["checks"]})
    return 0 if report["valid"] else 1


def cmd_bichrom(args) -> int:
    from colorlab.bichrom import enhanced_lp, enumerate_bc, sa2_implies_bc
    from colorlab.ratlp import solve

    inst = load_source(args)
    cycles = enumerate_bc(inst)
    result = {"instance": inst.name, "cycles": [c.to_dict() for c in cycles]}
    verdicts = []
    if args.enhanced_lp:
        solution = solve(enhanced_lp(inst))
        result["enhanced"] = {"status": solution.status, "optimum": solution.objective_value}
    if args.sa2:
        budget = get_sa_budget(args.budget)
        verdicts = [sa2_implies_bc(inst, cycle, budget).to_dict() for cycle in cycles]
        result["sa2"] = verdicts
    emit(result)
    return 1 if any(v["verdict"] == "not-implied" for v in verdicts) else 0


def parse_levels(text: str) -> List[int]:
    """Comma-separated SA levels: "1,2,3" -> [1, 2, 3]"""
    try:
        return [int(part) for part in text.split(",") if part.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated levels, got {text!r}")


def cmd_gap(args) -> int:
    from colorlab.oracle import gap_report
    from colorlab.reports import write_gap_csv, write_json

    inst = load_source(args)
    report = gap_report(inst, args.sa_levels, get_sa_budget(args.budget), with_cuts=args.cuts)
    if args.out:
        if str(args.out).endswith(".csv"):
            write_gap_csv([report.to_row()], args.out)
        else:
            write_json(report.to_dict(), args.out)
            logger.info(f"✅ Gap report written to {args.out}")
    emit(report.to_dict())
    return 0


def cmd_run(args) -> int:
    from colorlab.runner import load_config, run

    path = Path(args.config) if args.config else REPRODUCE_PRESET
    if not args.config and not args.reproduce_paper:
        raise InstanceError("Give a config file or --reproduce-paper")
    config = load_config(path)
    exit_code, summary = run(config, base_dir=path.parent, output_dir=args.out)
    emit({"exit_code": exit_code, "failures": summary["failures"], "errors": summary["errors"]})
    return exit_code


def cmd_schema(args) -> int:
    from colorlab.schemas import SCHEMAS

    out = Path(args.out) if args.out else DOCS_DIR / "schemas"
    out.mkdir(parents=True, exist_ok=True)
    for filename, model in SCHEMAS.items():
        (out / filename).write_text(json.dumps(model.model_json_schema(), indent=2) + "\n", encoding="utf-8")
        logger.info(f"✅ Wrote {out / filename}")
    emit({"written": sorted(str(out / f) for f in SCHEMAS)})
    return 0


# ==============================================================================
# PARSER
# ==============================================================================

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="colorlab",
        description="Exact-arithmetic laboratory for Bounded Color Matching LPs",
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    parser.add_argument("--version", action="version", version=f"colorlab {__version__}")
    parser.add_argument("--log-level", default="WARNING",
                        choices=["DEBUG", "INFO", "WARNING", "ERROR"], help="Log level on stderr (default: WARNING)")
    subparsers = parser.add_subparsers(dest="command", help="Available commands")

    gen = subparsers.add_parser("gen", help="Generate a family instance")
    gen.add_argument("name", nargs="?", choices=FAMILIES, help="Family name (same as --family)")
    gen.add_argument("--family", choices=FAMILIES, help="Family name")
    gen.add_argument("--param", help="ℓ, k or left/right")
    gen.add_argument("--eps", help="ε as p/q (hypercube only)")
    gen.add_argument("--out", help="Write the instance here instead of stdout")
    gen.set_defaults(handler=cmd_gen)

    validate = subparsers.add_parser("validate", help="List instance invariant violations")
    add_source(validate)
    validate.set_defaults(handler=cmd_validate)

    lp = subparsers.add_parser("lp", help="Solve a relaxation exactly")
    add_source(lp)
    lp.add_argument("--relaxation", choices=["mc", "hm", "dual"], default="mc",
                    help="M_c (default), hypergraph matching LP or its covering dual")
    lp.add_argument("--hm", dest="relaxation", action="store_const", const="hm", help="Same as --relaxation hm")
    lp.add_argument("--chvatal", action="store_true", help="Add first-round Chvátal cuts over the color rows")
    lp.add_argument("--export", action="store_true", help="Print the LP in plain text and exit")
    lp.set_defaults(handler=cmd_lp)

    sa = subparsers.add_parser("sa", help="Sherali-Adams lift, candidate checks and ε sweeps")
    add_source(sa)
    sa.add_argument("--level", type=int, required=True, help="SA level ψ")
    sa.add_argument("--budget", type=int, help="Lifted-variable budget (default COLORLAB_BUDGET)")
    mode = sa.add_mutually_exclusive_group()
    mode.add_argument("--check-candidate", "--candidate", dest="check_candidate", action="store_true",
                      help="Check the hypercube candidate vector with both checkers")
    mode.add_argument("--optimize", action="store_true", help="Solve the lifted LP (default)")
    sa.add_argument("--sweep", nargs="+", help="ε values (p/q) for a closed-form sweep")
    sa.set_defaults(handler=cmd_sa)

    cert = subparsers.add_parser("cert", help="Build and verify a dual certificate")
    add_source(cert)
    cert.add_argument("--bipartite", action="store_true", help="Use the bipartite bound 3μ/2 + q/2")
    cert.set_defaults(handler=cmd_cert)

    bichrom = subparsers.add_parser("bichrom", help="Bi-chromatic 4-cycles and level-2 checks")
    add_source(bichrom)
    mode = bichrom.add_mutually_exclusive_group()
    mode.add_argument("--enumerate", action="store_true", help="List the cycles only (default)")
    mode.add_argument("--enhanced-lp", action="store_true", help="Also solve M_c plus the bi-chromatic rows")
    mode.add_argument("--sa2-check", "--sa2", dest="sa2", action="store_true",
                      help="Maximize each cycle over the level-2 lift")
    bichrom.add_argument("--budget", type=int, help="Lifted-variable budget")
    bichrom.set_defaults(handler=cmd_bichrom)

    gap = subparsers.add_parser("gap", help="LP, ILP, gap and SA values")
    add_source(gap)
    gap.add_argument("--sa", dest="sa_levels", type=parse_levels, default=[], help="SA levels, e.g. 1,2,3")
    gap.add_argument("--sa-levels", dest="sa_levels", type=int, nargs="*", help="SA levels as separate values")
    gap.add_argument("--budget", type=int, help="Lifted-variable budget")
    gap.add_argument("--cuts", action="store_true", help="Also solve the enhanced and Chvátal LPs")
    gap.add_argument("--out", help="Write the report here (.json, or .csv for one gap table row)")
    gap.set_defaults(handler=cmd_gap)

    run = subparsers.add_parser("run", help="Run a batch experiment config")
    run.add_argument("config", nargs="?", help="YAML or JSON experiment config")
    run.add_argument("--reproduce-paper", action="store_true", help="Run the bundled acceptance preset")
    run.add_argument("--out", help="Override the config's output directory")
    run.set_defaults(handler=cmd_run)

    schema = subparsers.add_parser("schema", help="Write JSON schemas for the file formats")
    schema.add_argument("--out", help="Target directory (default docs/schemas)")
    schema.set_defaults(handler=cmd_schema)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logger.remove()
    logger.add(sys.stderr, level=args.log_level)

    if not getattr(args, "handler", None):
        parser.print_help()
        return 2
    try:
        return args.handler(args)
    except CertificateError as e:
        emit({"error": type(e).__name__, "reason": e.reason, "details": e.details})
        return 1
    except ColorLabError as e:
        emit({"error": type(e).__name__, "reason": e.reason, "details": e.details})
        return 2
    except OSError as e:
        emit({"error": type(e).__name__, "reason": str(e), "details": {}})
        return 2


if __name__ == "__main__":
    sys.exit(main())
