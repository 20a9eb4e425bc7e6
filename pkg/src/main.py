"""
Command line front end for ghzwl

Every command is non-interactive. Data goes to stdout (or --out), log lines
and reference checks go to stderr. Exit codes: 0 success, 1 invalid input,
2 computation failure.
"""

import argparse
import csv
import io
import json
import logging
import sys
from typing import Any, Dict, Iterable, List, Optional, Sequence

import numpy as np

from .criteria import TauConfig, evaluate
from .errors import GhzwlError, InfeasibleError, ValidationError
from .ghz_core import GhzDiagonalState, correlations, state_from_document, state_to_document, t_from_r
from .reference import (ASYMMETRIC_GAP_L_ASYMMETRIC, ASYMMETRIC_GAP_L_SYMMETRIC, ASYMMETRIC_GAP_TOLERANCE,
                        asymmetric_gap_correlations, landmark_references)
from .separable_constructions import decompose_family_point, verify
from .symmetric_family import (CSV_HEADER, FamilyPoint, boundary, boundary_rows, tangency_curves,
                               landmarks, to_state)
from .utils import Tolerances, load_config, read_json, setup_logger, write_text
from .witness_engine import OracleConfig, check_witness_validity, witness_from_document, witness_report
from .witness_optimizer import SCAN_HEADER, OptimizerConfig, minimize_L, scan_numeric_boundary, verify_hierarchy

logger = logging.getLogger("ghzwl.cli")

REPRODUCE_TARGETS = ("first-layout", "second-layout", "tangency", "landmarks", "asymmetric-gap", "hierarchy")
REPRODUCE_ALIASES = {"figure1": "first-layout", "figure2": "second-layout", "figure3": "tangency",
                     "appendix-e": "asymmetric-gap"}


class _Parser(argparse.ArgumentParser):
    """ArgumentParser that reports bad flags as ValidationError"""

    def error(self, message):
        raise ValidationError(message)


def _to_csv(header: Sequence[str], rows: Iterable[Sequence[Any]]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buf.getvalue()


def _to_json(doc: Any) -> str:
    return json.dumps(doc, indent=2) + "\n"


def _emit_table(args, header: Sequence[str], rows: List[List[Any]]) -> None:
    if args.format == "json":
        write_text(_to_json([dict(zip(header, row)) for row in rows]), args.out)
    else:
        write_text(_to_csv(header, rows), args.out)


def _check(name: str, value: float, expected: float, tol: float) -> bool:
    deviation = abs(value - expected)
    passed = deviation <= tol
    level = logging.INFO if passed else logging.WARNING
    logger.log(level, f"{'PASS' if passed else 'FAIL'} {name}: {value:.9g} vs {expected:.9g} "
                      f"(deviation {deviation:.3e}, tolerance {tol:.1e})")
    return passed


def _load_state(args, config: Dict[str, Any]) -> GhzDiagonalState:
    if not args.state:
        raise ValidationError("--state FILE is required")
    return state_from_document(read_json(args.state), tol=Tolerances.from_config(config).probability)


def _family_point(args) -> FamilyPoint:
    if args.p15 is not None or args.p2 is not None:
        if args.p15 is None or args.p2 is None:
            raise ValidationError("--p15 and --p2 go together")
        return FamilyPoint.from_probs(args.p15, args.p2, args.p16)
    if args.v is None or args.alpha is None:
        raise ValidationError("Give either --v and --alpha or --p15 and --p2")
    return FamilyPoint(args.p16, args.v, args.alpha)


# state

def cmd_state(args, config: Dict[str, Any]) -> int:
    state = _load_state(args, config)
    doc = state_to_document(state)
    if args.action == "show":
        doc["T"] = t_from_r(correlations(state)).tolist()
    write_text(_to_json(doc), args.out)
    return 0


# criteria

def cmd_criteria(args, config: Dict[str, Any]) -> int:
    report = evaluate(_load_state(args, config), TauConfig.from_config(config), cross_check=args.cross_check)
    logger.info(f"Verdict: {report.verdict}")
    write_text(_to_json(report.to_dict()), args.out)
    return 0


# witness

def cmd_witness(args, config: Dict[str, Any]) -> int:
    state = _load_state(args, config)
    if args.action == "eval":
        if not args.witness:
            raise ValidationError("--witness FILE is required")
        M = witness_from_document(read_json(args.witness))
        report = witness_report(M, state, OracleConfig.from_config(config))
        doc = report.to_dict()
        if args.samples:
            rng = np.random.default_rng(args.seed if args.seed is not None else 0)
            doc["sampled_min_slack"] = check_witness_validity(M, report.lambda_, args.samples, rng)
            if doc["sampled_min_slack"] < -1e-9:
                logger.warning(f"A product state exceeds Lambda by {-doc['sampled_min_slack']:.3e}")
        write_text(_to_json(doc), args.out)
        return 0

    cfg = OptimizerConfig.from_config(config, mode=args.mode, seed=args.seed)
    result = minimize_L(state, cfg, multistarts=args.multistarts)
    write_text(_to_json(result.to_dict()), args.out)
    return 0


# family

def _landmark_rows(p16: float, tau_cfg: TauConfig) -> List[Dict[str, Any]]:
    references = landmark_references(p16)
    rows = []
    for label, mark in landmarks(p16, tau_cfg).items():
        row = mark.to_dict()
        if label in references:
            entry, tol = references[label]
            dev = max(abs(mark.point.v - entry["v"]), abs(mark.point.alpha - entry["alpha"]))
            row.update({"ref_v": entry["v"], "ref_alpha": entry["alpha"], "deviation": dev,
                        "check": "pass" if dev <= tol else "fail"})
            _check(f"landmark {label} (p16 = {p16})", dev, 0.0, tol)
            if "published_alpha" in entry:
                row["published_alpha"] = entry["published_alpha"]
        rows.append(row)
    return rows


def _write_records(args, records: List[Dict[str, Any]]) -> None:
    if args.format == "json":
        write_text(_to_json(records), args.out)
        return
    header: List[str] = []
    for record in records:
        header += [key for key in record if key not in header]
    write_text(_to_csv(header, [[_fmt(record.get(key, "")) for key in header] for record in records]), args.out)


def _fmt(value: Any) -> Any:
    return f"{value:.9g}" if isinstance(value, float) else value


def cmd_family(args, config: Dict[str, Any]) -> int:
    tau_cfg = TauConfig.from_config(config)
    if args.action == "landmarks":
        _write_records(args, _landmark_rows(args.p16, tau_cfg))
    elif args.action == "boundary":
        segments = boundary(args.p16, args.n, tau_cfg)
        _emit_table(args, CSV_HEADER, boundary_rows(segments))
    else:
        pt = _family_point(args)
        doc = state_to_document(to_state(pt))
        doc["family"] = pt.to_dict()
        write_text(_to_json(doc), args.out)
    return 0


# construct

def cmd_construct(args, config: Dict[str, Any]) -> int:
    tau_cfg = TauConfig.from_config(config)
    records = []
    for seg in boundary(args.p16, args.n, tau_cfg):
        if args.segment and seg.label != args.segment:
            continue
        for pt in seg.points:
            record = {"segment": seg.label, "criterion": seg.criterion, "v": pt.v, "alpha": pt.alpha}
            if seg.criterion == "physical":
                record["status"] = "skipped"
            else:
                try:
                    report = verify(decompose_family_point(pt, seg.criterion, tau_cfg), args.tol)
                    record.update(report.to_dict())
                    record["status"] = "ok" if report.ok else "failed"
                except InfeasibleError as e:
                    record.update({"status": "infeasible", "reason": e.reason})
            records.append(record)
    if not records:
        raise ValidationError(f"No boundary segment {args.segment!r} at p16 = {args.p16}")

    counts = {status: sum(r["status"] == status for r in records) for status in ("ok", "failed", "infeasible", "skipped")}
    logger.info(f"Constructions: {counts}")
    _write_records(args, records)
    return 2 if counts["failed"] else 0


# reproduce

def _reproduce_boundary(args, p16: float, tau_cfg: TauConfig) -> int:
    segments = boundary(p16, args.n, tau_cfg)
    references = landmark_references(p16)
    computed = landmarks(p16, tau_cfg)
    for label, (entry, tol) in references.items():
        pt = computed[label].point
        _check(f"vertex {label} v", pt.v, entry["v"], tol)
        _check(f"vertex {label} alpha", pt.alpha, entry["alpha"], tol if label != "H" else 5e-6)
    _emit_table(args, CSV_HEADER, boundary_rows(segments))
    return 0


def _reproduce_tangency(args, tau_cfg: TauConfig) -> int:
    curves = tangency_curves(args.n, tau_cfg)
    c = curves["C"]
    _check("C v", c["v"], 0.7492394, 5e-6)
    _check("C alpha", c["alpha"], 8.900032, 5e-6)
    _check("C K", c["K"], 0.6626275, 5e-6)
    _check("tangency slope difference", curves["tangency"]["difference"], 0.0, 1e-3)
    if args.format == "json":
        write_text(_to_json(curves), args.out)
        return 0
    rows = [[name, f"{a:.9g}", f"{v:.9g}"] for name in ("criterion_III", "criterion_IV") for a, v in curves[name]]
    write_text(_to_csv(("curve", "alpha", "v"), rows), args.out)
    return 0


def _reproduce_asymmetric_gap(args, config: Dict[str, Any]) -> int:
    R = asymmetric_gap_correlations()
    out = {}
    for mode, expected in (("symmetric", ASYMMETRIC_GAP_L_SYMMETRIC), ("asymmetric", ASYMMETRIC_GAP_L_ASYMMETRIC)):
        result = minimize_L(R, OptimizerConfig.from_config(config, mode=mode, seed=args.seed),
                            multistarts=args.multistarts)
        _check(f"{mode} L_min", result.L_min, expected, ASYMMETRIC_GAP_TOLERANCE)
        out[mode] = result.to_dict()
        out[mode]["published"] = expected
    out["asymmetric_better"] = out["asymmetric"]["L_min"] < out["symmetric"]["L_min"]
    write_text(_to_json(out), args.out)
    return 0


def cmd_reproduce(args, config: Dict[str, Any]) -> int:
    tau_cfg = TauConfig.from_config(config)
    target = REPRODUCE_ALIASES.get(args.target, args.target)
    if target == "first-layout":
        return _reproduce_boundary(args, 0.0, tau_cfg)
    if target == "second-layout":
        return _reproduce_boundary(args, 0.3, tau_cfg)
    if target == "tangency":
        return _reproduce_tangency(args, tau_cfg)
    if target == "landmarks":
        records = []
        for p16 in (0.0, 0.3):
            records += _landmark_rows(p16, tau_cfg)
        _write_records(args, records)
        return 0
    if target == "asymmetric-gap":
        return _reproduce_asymmetric_gap(args, config)
    report = verify_hierarchy(OptimizerConfig.from_config(config, seed=args.seed))
    write_text(_to_json(report.to_dict()), args.out)
    return 0


def cmd_scan(args, config: Dict[str, Any]) -> int:
    cfg = OptimizerConfig.from_config(config, seed=args.seed)
    result = scan_numeric_boundary(args.p16, args.grid, cfg)
    _emit_table(args, SCAN_HEADER, result.rows())
    return 0


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--config", help="YAML configuration file")
    common.add_argument("--debug", action="store_true", help="Debug output on the console")
    common.add_argument("--out", help="Output file (default stdout)")
    common.add_argument("--format", choices=("csv", "json"), default="csv", help="Tabular output format")
    common.add_argument("--seed", type=int, help="RNG seed for optimizer runs")

    parser = _Parser(prog="ghzwl", description="Tripartite-separability witnesses for four-qubit GHZ-diagonal states")
    sub = parser.add_subparsers(dest="command", required=True)

    state = sub.add_parser("state", parents=[common], help="Inspect or convert state documents")
    state.add_argument("action", choices=("show", "convert"))
    state.add_argument("--state", help="State JSON file")

    crit = sub.add_parser("criteria", parents=[common], help="Evaluate criteria I, I', II, III and IV")
    crit.add_argument("action", choices=("check",))
    crit.add_argument("--state", help="State JSON file")
    crit.add_argument("--cross-check", action="store_true", help="Compare both criterion IV routes")

    wit = sub.add_parser("witness", parents=[common], help="Evaluate or optimise witnesses")
    wit.add_argument("action", choices=("eval", "optimize"))
    wit.add_argument("--state", help="State JSON file")
    wit.add_argument("--witness", help="Witness JSON file with an M block")
    wit.add_argument("--mode", choices=("symmetric", "asymmetric"), default="symmetric")
    wit.add_argument("--multistarts", type=int, help="Override the configured multistart count")
    wit.add_argument("--samples", type=int, default=0, help="Random product states for the Lambda sanity check")

    fam = sub.add_parser("family", parents=[common], help="Highly symmetric family")
    fam.add_argument("action", choices=("landmarks", "boundary", "state"))
    fam.add_argument("--p16", type=float, default=0.0)
    fam.add_argument("--n", type=int, default=50, help="Points per boundary segment")
    fam.add_argument("--v", type=float)
    fam.add_argument("--alpha", type=float)
    fam.add_argument("--p15", type=float)
    fam.add_argument("--p2", type=float)

    con = sub.add_parser("construct", parents=[common], help="Build and check separable decompositions")
    con.add_argument("action", choices=("verify",))
    con.add_argument("--p16", type=float, default=0.3)
    con.add_argument("--segment", help="Boundary segment label, e.g. AB or CD (default all)")
    con.add_argument("--n", type=int, default=5, help="Points per segment")
    con.add_argument("--tol", type=float, default=1e-8, help="Reconstruction tolerance")

    scan = sub.add_parser("scan", parents=[common], help="Numerical L_min map over (p15, p2)")
    scan.add_argument("--p16", type=float, default=0.0)
    scan.add_argument("--grid", type=int, help="Grid points per axis (default optimizer.scan_grid)")

    rep = sub.add_parser("reproduce", parents=[common], help="Regenerate published boundaries and reference values")
    rep.add_argument("target", choices=REPRODUCE_TARGETS + tuple(REPRODUCE_ALIASES))
    rep.add_argument("--n", type=int, default=50, help="Points per curve segment")
    rep.add_argument("--multistarts", type=int, help="Override the configured multistart count")
    return parser


COMMANDS = {
    "state": cmd_state,
    "criteria": cmd_criteria,
    "witness": cmd_witness,
    "family": cmd_family,
    "construct": cmd_construct,
    "scan": cmd_scan,
    "reproduce": cmd_reproduce,
}


def run(argv: Optional[Sequence[str]] = None) -> int:
    """
    Parse argv and run one command

    Returns:
        Process exit code
    """
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except ValidationError as e:
        setup_logger("ghzwl")
        logger.error(f"Invalid arguments: {e}")
        return 1
    except SystemExit as e:
        return int(e.code or 0)

    setup_logger("ghzwl", debug=args.debug)
    try:
        config = load_config(args.config)
        return COMMANDS[args.command](args, config)
    except ValidationError as e:
        logger.error(f"Invalid input: {e}")
        return 1
    except (GhzwlError, ArithmeticError, np.linalg.LinAlgError) as e:
        logger.error(f"Computation failed: {e}")
        return 2


def main():
    """Main entry point"""
    sys.exit(run())


if __name__ == "__main__":
    main()
