"""
Command-line surface

Data goes to stdout (or --output, written atomically); logs go to stderr.
Exit codes: 0 success, 1 usage error, 2 internal invariant violation.
"""

import argparse
import json
import logging
import sys
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Sequence

import pandas as pd
from pydantic import ValidationError
from tabulate import tabulate

from config.settings import HINGE_SCOPES, Settings
from core.errors import InvariantViolation, ParseError, PreconditionError
from core.utils import atomic_write, setup_logging

logger = logging.getLogger('Nielsen.CLI')

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_INTERNAL = 2

FORMATS = ("json", "csv", "table")
ORACLE_TARGETS = ("odd-order", "signed-odd-order", "subspaces", "even-subspaces", "partitions")
PARTITION_PREDICATES = ("all", "odd", "odd_ge3", "distinct")


class UsageError(PreconditionError):
    pass


class _Parser(argparse.ArgumentParser):
    """ArgumentParser raising instead of exiting, so usage errors map to exit code 1"""

    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


# ----------------------------------------------------------------------------
# Output
# ----------------------------------------------------------------------------

def _cell(value: Any) -> Any:
    if isinstance(value, (dict, list, tuple)):
        return json.dumps(value, sort_keys=True, default=str)
    return value


def render(payload: Any, fmt: str) -> str:
    """JSON document, or CSV/text table with one row per record (nested values JSON-encoded)"""
    if isinstance(payload, pd.DataFrame) and fmt == "table":
        return tabulate(payload.to_dict("records"), headers="keys", tablefmt="github") + "\n"
    if isinstance(payload, pd.DataFrame):
        from core.experiments import ExperimentEngine

        return ExperimentEngine.render(payload, fmt)
    if fmt == "json":
        return json.dumps(payload, indent=2, default=str) + "\n"
    records = payload if isinstance(payload, list) else [payload]
    rows = [{k: _cell(v) for k, v in r.items()} for r in records]
    if fmt == "table":
        return tabulate(rows, headers="keys", tablefmt="github") + "\n"
    df = pd.DataFrame(rows)
    return df.to_csv(index=False, lineterminator="\n")


def emit(payload: Any, args: argparse.Namespace, settings: Settings) -> None:
    text = render(payload, args.format)
    if args.output:
        path = settings.resolve_output(args.output)
        atomic_write(path, text)
        logger.info(f"Output written to {path}")
    else:
        sys.stdout.write(text)


def _read(path: str) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as e:
        raise ParseError(f"Cannot read {path}: {e}") from e


def _subspace_from_args(args: argparse.Namespace):
    from core.subspaces import Subspace2

    if args.rows:
        return Subspace2.from_rows(_read(args.rows).splitlines())
    if args.words:
        if args.n is None:
            raise UsageError("--words needs --n")
        return Subspace2.from_words(args.n, [w for w in args.words.split(',') if w])
    raise UsageError("Give the subgroup with --rows FILE or --words e1,e2e3 --n N")


# ----------------------------------------------------------------------------
# Handlers
# ----------------------------------------------------------------------------

def cmd_verdict(args: argparse.Namespace, settings: Settings) -> Any:
    search = dict(log_base=settings.LOG_BASE, max_depth=settings.SL_MAX_DEPTH,
                  node_budget=settings.SL_NODE_BUDGET)
    if args.target == "element":
        if args.cycle_type:
            from core.ht_odd import verdict_odd_element
            from core.signed_perm import parse_cycle_type

            ct = parse_cycle_type(args.cycle_type, args.n)
            return verdict_odd_element(ct, args.n, **search).to_dict()
        if args.element:
            from core.signed_perm import parse_element
            from core.subgroup_verdicts import verdict_signed_element

            f = parse_element(args.element)
            return verdict_signed_element(f, hinge_scope=settings.CATALOG_HINGE_SCOPE, **search).to_dict()
        raise UsageError("verdict element needs --cycle-type or --element")

    if args.target == "diagonal":
        from core.subspaces import verdict_diagonal

        H = _subspace_from_args(args)
        return verdict_diagonal(H, args.n, settings.CATALOG_HINGE_SCOPE).to_dict()

    from core.subgroup_verdicts import ExplicitGroup, close_group, parse_group_text, verdict_group

    if not args.file:
        raise UsageError("verdict group needs --file")
    elements = parse_group_text(_read(args.file))
    if args.close:
        G = close_group(elements, settings.MAX_GROUP_ORDER)
    else:
        G = ExplicitGroup(elements[0].n, elements, settings.MAX_GROUP_ORDER)
    return verdict_group(G, hinge_scope=settings.CATALOG_HINGE_SCOPE, **search).to_dict()


def cmd_sample(args: argparse.Namespace, settings: Settings) -> Any:
    from core.experiments import ExperimentEngine

    engine = ExperimentEngine(settings, show_progress=args.progress)
    stats = [s for s in args.stats.split(',') if s] if args.stats else None
    common = dict(trials=args.trials, seed=args.seed, jobs=args.jobs)
    if stats:
        common["stats"] = stats
    if args.kind == "odd-perm":
        return engine.run_odd_perm(args.n, args.theta, **common)
    if args.kind == "subspace":
        return engine.run_subspace(args.n, args.k, **common)
    return engine.run_partition(args.n, args.t_max, a=args.a, b=args.b, **common)


def cmd_table(args: argparse.Namespace, settings: Settings) -> Any:
    from core import analytic

    if args.kind == "gf":
        table = analytic.alpha_table(args.theta, args.max_n)
        rows = []
        for n in range(args.max_n + 1):
            alpha = table.alpha(n)
            rows.append({"n": n, "alpha_num": alpha.numerator, "alpha_den": alpha.denominator,
                         "a_scaled": table.scaled[n]})
        return rows

    if args.kind == "partitions":
        tables = analytic.q_tables(args.max_n)
        return [{"N": N, "q_odd": tables.q_odd(N), "q_ge3": tables.q_ge3(N)} for N in range(args.max_n + 1)]

    if args.kind == "counts":
        return [analytic.counting_bounds(n).to_dict() for n in range(1, args.max_n + 1)]

    if args.kind == "pn":
        return [analytic.expected_P_n(n, args.theta, settings.LOG_BASE, settings.EXACT_CUTOFF).to_dict()
                for n in _int_list(args.n_values)]

    rows = []
    for N in _int_list(args.n_values):
        t_max = analytic.default_t_max(N) if args.t_max is None else args.t_max
        rows.append({
            "N": N,
            "t_max": t_max,
            "expected_R_n": analytic.expected_R_n(N, args.a, args.b),
            "expected_R_n_constrained": analytic.expected_R_n_constrained(N, t_max, args.a, args.b),
            "k_hat": analytic.k_hat(N),
        })
    return rows


def _int_list(text: Optional[str]) -> List[int]:
    if not text:
        raise UsageError("Give --n-values as a comma-separated list")
    try:
        return [int(x) for x in text.split(',') if x.strip()]
    except ValueError as e:
        raise ParseError(f"Bad integer list '{text}'") from e


def cmd_gsig(args: argparse.Namespace, settings: Settings) -> Any:
    from core.g_signature import gsignature_sweep, verify_gsignature_cp2

    if args.sweep:
        reports = gsignature_sweep(args.sweep)
        failures = [r for r in reports if not r.holds]
        if failures:
            raise InvariantViolation(f"G-signature balance fails for {len(failures)} triples, "
                                     f"first {failures[0].to_dict()}")
        return [r.to_dict() for r in reports]
    if args.m is None or args.a is None or args.b is None:
        raise UsageError("gsig needs --m, --a and --b (or --sweep M)")
    return verify_gsignature_cp2(args.a, args.b, args.m).to_dict()


def cmd_trees(args: argparse.Namespace, settings: Settings) -> Any:
    from core.cp2_trees import generator_name, rank3_catalog, realize_rank2

    if args.kind == "catalog":
        if args.n is None:
            raise UsageError("trees catalog needs --n")
        scope = args.scope or settings.CATALOG_HINGE_SCOPE
        catalog = rank3_catalog(args.n, args.max_vertices, scope)
        return [entry.to_dict() for entry in catalog.values()]
    H = _subspace_from_args(args)
    tree, generators = realize_rank2(H)
    return {"subgroup": H.describe(), "tree": tree.to_dict(),
            "generators": [generator_name(g) for g in generators]}


def cmd_edmonds(args: argparse.Namespace, settings: Settings) -> Any:
    from core.fixed_points import edmonds_report
    from core.signed_perm import parse_element

    return edmonds_report(parse_element(args.element), args.p)


def cmd_facts(args: argparse.Namespace, settings: Settings) -> Any:
    from core.subgroup_verdicts import headline_facts

    return [fact.to_dict() for fact in headline_facts(args.n)]


def cmd_oracle(args: argparse.Namespace, settings: Settings) -> Any:
    from core import oracle

    if args.what == "odd-order":
        census = oracle.enum_odd_order(args.n, args.strategy, args.jobs or settings.JOBS)
        return census.to_dict()
    if args.what == "signed-odd-order":
        return {"n": args.n, "count": oracle.enum_signed_odd_order(args.n, args.jobs or settings.JOBS)}
    if args.what in ("subspaces", "even-subspaces"):
        if args.what == "even-subspaces":
            if args.k is None:
                raise UsageError("even-subspaces needs --k")
            found = list(oracle.enum_even_subspaces(args.n, args.k))
        else:
            found = list(oracle.enum_subspaces(args.n, args.k))
        return {"n": args.n, "k": args.k, "count": len(found)}
    predicates: Dict[str, Optional[Callable]] = {
        "all": None, "odd": oracle.odd_parts, "odd_ge3": oracle.odd_parts_ge3, "distinct": oracle.distinct_parts,
    }
    parts = oracle.enum_partitions(args.n, predicates[args.predicate])
    return {"N": args.n, "predicate": args.predicate, "count": len(parts)}


# ----------------------------------------------------------------------------
# Parser
# ----------------------------------------------------------------------------

def _common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--format", choices=FORMATS, default="json")
    parser.add_argument("--output", help="Output file (bare names go to REPORTS_DIR)")


def _subgroup_input(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--rows", help="File with one 0/1 row per line")
    parser.add_argument("--words", help="Comma-separated products such as e1,e2e3")
    parser.add_argument("--n", type=int)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="nielsen-realize", description="Nielsen realizability toolkit for O(n, Z)")
    parser.add_argument("--log-level", help="Override LOG_LEVEL")
    parser.add_argument("--jobs", type=int, help="Worker processes (default NRZ_JOBS or 1)")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    verdict = sub.add_parser("verdict", help="Realizability verdicts")
    verdict.add_argument("target", choices=("element", "diagonal", "group"))
    verdict.add_argument("--cycle-type")
    verdict.add_argument("--element", help="'n; i1,...,in; s1,...,sn'")
    verdict.add_argument("--file", help="Group file, one element per line")
    verdict.add_argument("--close", action="store_true", help="Close the listed elements into a group")
    _subgroup_input(verdict)
    _common(verdict)
    verdict.set_defaults(handler=cmd_verdict)

    sample = sub.add_parser("sample", help="Seeded Monte Carlo runs")
    sample.add_argument("kind", choices=("odd-perm", "subspace", "partition"))
    sample.add_argument("--n", type=int, required=True)
    sample.add_argument("--seed", type=int, required=True)
    sample.add_argument("--trials", type=int, default=10000)
    sample.add_argument("--theta", default="1")
    sample.add_argument("--k", type=int, help="Subspace rank (default: uniform over all ranks)")
    sample.add_argument("--t-max", type=int, help="Bound on ones (default floor(sqrt(n)/ln n))")
    sample.add_argument("--a", type=float, default=0.5)
    sample.add_argument("--b", type=float, default=2.0)
    sample.add_argument("--stats", help="Comma-separated statistics")
    sample.add_argument("--progress", action="store_true")
    _common(sample)
    sample.set_defaults(handler=cmd_sample, format="csv")

    table = sub.add_parser("table", help="Exact tables")
    table.add_argument("kind", choices=("gf", "partitions", "counts", "pn", "rn"))
    table.add_argument("--theta", default="1")
    table.add_argument("--max-n", type=int, default=50)
    table.add_argument("--n-values", help="Comma-separated sizes for pn/rn")
    table.add_argument("--t-max", type=int)
    table.add_argument("--a", type=float, default=0.5)
    table.add_argument("--b", type=float, default=2.0)
    _common(table)
    table.set_defaults(handler=cmd_table)

    gsig = sub.add_parser("gsig", help="G-signature balance on CP2")
    gsig.add_argument("--m", type=int)
    gsig.add_argument("--a", type=int)
    gsig.add_argument("--b", type=int)
    gsig.add_argument("--sweep", type=int, metavar="M", help="All valid weights for odd m <= M")
    _common(gsig)
    gsig.set_defaults(handler=cmd_gsig)

    trees = sub.add_parser("trees", help="CP2-tree constructions")
    trees.add_argument("kind", choices=("catalog", "realize-rank2"))
    trees.add_argument("--scope", choices=HINGE_SCOPES,
                       help="hub: hinges at the hub only, a lower bound on the realized classes; "
                            "any: every tree, exhaustive up to --max-vertices")
    trees.add_argument("--max-vertices", type=int)
    _subgroup_input(trees)
    _common(trees)
    trees.set_defaults(handler=cmd_trees)

    edmonds = sub.add_parser("edmonds", help="Fixed-point data of a prime-order element")
    edmonds.add_argument("--element", required=True)
    edmonds.add_argument("--p", type=int)
    _common(edmonds)
    edmonds.set_defaults(handler=cmd_edmonds)

    facts = sub.add_parser("facts", help="Known realizability facts for n")
    facts.add_argument("--n", type=int, required=True)
    _common(facts)
    facts.set_defaults(handler=cmd_facts)

    oracle = sub.add_parser("oracle", help="Brute-force counts for small n")
    oracle.add_argument("--what", choices=ORACLE_TARGETS, required=True)
    oracle.add_argument("--n", type=int, required=True)
    oracle.add_argument("--k", type=int)
    oracle.add_argument("--strategy", choices=("iterate", "classes"), default="iterate")
    oracle.add_argument("--predicate", choices=PARTITION_PREDICATES, default="odd")
    _common(oracle)
    oracle.set_defaults(handler=cmd_oracle)

    return parser


def run(argv: Optional[Sequence[str]] = None) -> int:
    """
    Parse argv, run one command and return the exit code

    Args:
        argv: Arguments without the program name

    Returns:
        0 on success, 1 on usage errors, 2 on internal failures
    """
    try:
        args = build_parser().parse_args(argv)
        overrides = {}
        if args.log_level:
            overrides["LOG_LEVEL"] = args.log_level
        if args.jobs is not None:
            overrides["JOBS"] = args.jobs
        settings = Settings(**overrides)
        if args.command == "sample":
            settings.validate_for_experiments()
    except SystemExit as e:  # --help
        return e.code if isinstance(e.code, int) else EXIT_OK
    except (PreconditionError, ValidationError, ValueError) as e:
        sys.stderr.write(f"{e}\n")
        return EXIT_USAGE

    setup_logging(settings)
    try:
        payload = args.handler(args, settings)
        emit(payload, args, settings)
    except PreconditionError as e:
        logger.error(f"{args.command}: {e}")
        return EXIT_USAGE
    except InvariantViolation as e:
        logger.error(f"Invariant violation in {args.command}: {e}", exc_info=True)
        return EXIT_INTERNAL
    except Exception as e:
        logger.error(f"Unexpected failure in {args.command}: {e}", exc_info=True)
        return EXIT_INTERNAL
    return EXIT_OK
