# colorlab/runner.py
"""
Batch experiment runner
Includes: config loading, per-item pipelines with expectation checks,
Celery fan-out and artifact merging
"""
import re
from fractions import Fraction
from pathlib import Path
from typing import Dict, List, Optional, Tuple

import yaml
from loguru import logger
from pydantic import ValidationError

from colorlab.config import CERTIFY_MAX_VARS, DEFAULT_EPS, get_sa_budget
from colorlab.model import ColoredInstance, format_rational, is_colorful_matching, load_instance, parse_rational, to_hypergraph
from colorlab.reports import to_jsonable, write_gap_csv, write_json
from colorlab.schemas import ExperimentConfig, ItemConfig
from colorlab.validators import CertificateError, ColorLabError, ConfigError, InstanceError, validate

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_ERROR = 2


# ==============================================================================
# CONFIG
# ==============================================================================

def load_config(path) -> ExperimentConfig:
    """
    Parse a YAML or JSON experiment config and check referenced files exist

    Raises:
        ConfigError: If the file is missing, unparsable, invalid or names
            instance files that do not exist
    """
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"Config file not found: {path}", {"path": str(path)})
    try:
        raw = yaml.safe_load(path.read_text(encoding="utf-8"))
    except yaml.YAMLError as e:
        raise ConfigError(f"Config is not valid YAML/JSON: {e}", {"path": str(path)})
    try:
        config = ExperimentConfig.model_validate(raw or {})
    except ValidationError as e:
        raise ConfigError("Config failed schema validation", {"path": str(path), "errors": e.errors(include_url=False)})

    missing = [str(p) for p in config.resolve_files(path.parent) if not p.exists()]
    if missing:
        raise ConfigError("Config references missing instance files", {"missing": missing})
    return config


# ==============================================================================
# ITEM PIPELINES
# ==============================================================================

class ItemRun:
    """Collects values, artifacts and checks for one item"""

    def __init__(self, item: ItemConfig, settings: dict):
        self.item = item
        self.settings = settings
        self.values: Dict[str, object] = {}
        self.artifacts: Dict[str, object] = {}
        self.checks: List[dict] = []
        self.csv_row: Optional[dict] = None
        self.inst = self._load()
        self.name = item.name or self.inst.name

    def _load(self) -> ColoredInstance:
        from colorlab.generators import gen_by_name

        if self.item.file is not None:
            path = Path(self.item.file)
            if not path.is_absolute():
                path = Path(self.settings.get("base_dir", ".")) / path
            return load_instance(path)
        eps = parse_rational(self.item.eps) if self.item.eps is not None else None
        return gen_by_name(self.item.family, self.item.param, eps)

    @property
    def budget(self) -> int:
        return get_sa_budget(self.settings.get("sa_budget"))

    def check(self, name: str, passed: bool, **detail) -> None:
        self.checks.append({"check": name, "passed": bool(passed), **detail})
        if not passed:
            logger.warning(f"⚠️ {self.name}: check {name} failed {detail}")

    # ------------------------------------------------------------------

    def op_validate(self) -> None:
        violations = validate(self.inst)
        self.values["violations"] = len(violations)
        self.artifacts["violations"] = [v.to_dict() for v in violations]
        self.check("valid", not violations)

    def op_lp(self) -> None:
        from colorlab.ratlp import build_mc, solve

        lp = build_mc(self.inst)
        solution = solve(lp)
        self.values["lp"] = solution.objective_value
        self.artifacts["lp"] = solution.to_dict()
        if len(lp.variables) <= CERTIFY_MAX_VARS:
            self.check("vertex-certificate", solution.certified)

    def op_sa(self) -> None:
        from colorlab.ratlp import build_mc, solve
        from colorlab.sa import sa_lift

        lp = build_mc(self.inst)
        previous = solve(lp).objective_value
        for level in sorted(set(self.item.sa_levels)):
            value = solve(sa_lift(lp, level, self.budget)).objective_value
            self.values[f"sa_{level}"] = value
            self.check(f"sa-monotone-{level}", value <= previous, value=format_rational(value))
            previous = value

    def op_candidate(self) -> None:
        from colorlab.sa import candidate_vector, check_closed_form, check_explicit, eps_sweep, hypercube_dimension, moment_value

        eps = parse_rational(self.item.eps) if self.item.eps is not None else DEFAULT_EPS
        ell = hypercube_dimension(self.inst, eps)
        results = []
        for level in sorted(set(self.item.sa_levels)):
            mv = candidate_vector(self.inst, level, eps)
            closed = check_closed_form(self.inst, mv, level)
            explicit = check_explicit(self.inst, mv, level, self.budget)
            self.values[f"candidate_{level}"] = closed.status
            self.values[f"candidate_value_{level}"] = moment_value(self.inst, mv)
            agree = closed.status == explicit.status and (
                closed.witness is None or closed.witness["row"] == explicit.witness["row"]
            )
            self.check(f"checkers-agree-{level}", agree, closed=closed.status, explicit=explicit.status)
            results.append({"closed_form": closed.to_dict(), "explicit": explicit.to_dict()})
            sweep = self.settings.get("eps_sweep") or []
            if sweep:
                self.artifacts[f"eps_sweep_{level}"] = eps_sweep(ell, level, [parse_rational(e) for e in sweep])
        self.artifacts["candidate"] = results

    def op_cert(self) -> None:
        from colorlab.dualcert import SupportHypergraph, build_certificate, hyperedge_values, low_degree_vertex, q_oracle, verify_certificate
        from colorlab.oracle import max_colorful_matching
        from colorlab.ratlp import build_dual, build_hm, solve

        if not self.inst.all_unit_bounds():
            raise InstanceError("Dual certificates need every bound equal to 1", {"instance": self.name})
        h = to_hypergraph(self.inst)
        primal = solve(build_hm(h))
        dual = solve(build_dual(h))
        self.values["hm_lp"] = primal.objective_value
        self.check("weak-duality-equality", primal.objective_value == dual.objective_value)

        values = hyperedge_values(h, primal)
        fractional = tuple(he for he in h.hyperedges if 0 < values[he] < 1)
        if fractional and not any(v == 1 for v in values.values()):
            try:
                low_degree_vertex(SupportHypergraph(fractional, {he: values[he] for he in fractional}))
                self.check("sparsity", True)
            except CertificateError as e:
                self.check("sparsity", False, reason=e.reason)

        cert = build_certificate(h, primal, self.inst.is_bipartite(), self.settings.get("mu_limit"))
        report = verify_certificate(h, cert, primal.objective_value)
        self.values.update({"mu": cert.mu, "q": cert.q, "cert_value": cert.value, "cert_bound": cert.bound})
        self.artifacts["certificate"] = cert.to_dict()
        self.artifacts["verification"] = report
        self.check("certificate", report["valid"], failures=report["failures"])
        ilp, _ = max_colorful_matching(self.inst, self.settings.get("ilp_limit"))
        self.check("mu-equals-ilp", ilp == cert.mu)
        self.check("q-agrees", q_oracle(self.inst, self.settings.get("mu_limit")) == cert.q)

    def op_bichrom(self) -> None:
        from colorlab.bichrom import enhanced_lp, enumerate_bc, sa2_implies_bc
        from colorlab.ratlp import solve

        cycles = enumerate_bc(self.inst)
        self.values["bc_cycles"] = len(cycles)
        self.values["enhanced"] = solve(enhanced_lp(self.inst)).objective_value
        verdicts = []
        for cycle in cycles:
            verdict = sa2_implies_bc(self.inst, cycle, self.budget)
            self.values[f"bc_max:{cycle.label}"] = verdict.max_value
            verdicts.append(verdict.to_dict())
            if verdict.verdict != "value-only":
                self.check(f"bc-implied:{cycle.label}", verdict.verdict == "implied")
        self.artifacts["bichrom"] = verdicts

    def op_gap(self) -> None:
        from colorlab.oracle import gap_report

        report = gap_report(
            self.inst,
            self.item.sa_levels,
            self.budget,
            self.settings.get("ilp_limit"),
            with_cuts=True,
        )
        self.values.update({
            "lp": report.lp_value,
            "ilp": report.ilp_value,
            "gap": report.gap,
            "greedy": report.greedy_value,
            "enhanced": report.enhanced_value,
            "chvatal": report.chvatal_value,
        })
        for level, value in report.sa_values.items():
            self.values[f"sa_{level}"] = value
        self.artifacts["gap"] = report.to_dict()
        row = report.to_row()
        row["instance"] = self.name
        self.csv_row = row
        self.check("greedy-third", 3 * report.greedy_value >= report.ilp_value)

    def op_latin(self) -> None:
        from colorlab.oracle import color_matrix, latin_transversal, ryser_matching

        table = color_matrix(self.inst)
        cells = latin_transversal(table)
        self.values["transversal"] = "yes" if cells is not None else "no"
        self.artifacts["transversal"] = cells
        order = len(table)
        if order % 2 == 1:
            index = {frozenset((e.u, e.v)): i for i, e in enumerate(self.inst.edges)}
            chosen = [index[frozenset((e.u, e.v))] for e in ryser_matching(order)]
            self.check("ryser-matching", is_colorful_matching(self.inst, chosen) and len(chosen) == order)

    # ------------------------------------------------------------------

    def compare_expectations(self) -> None:
        for key, expected in sorted(self.item.expect.items()):
            actual = self.values.get(key)
            try:
                passed = actual is not None and Fraction(actual) == parse_rational(expected)
            except (TypeError, ValueError, InstanceError):
                passed = str(actual) == expected
            self.check(f"expect:{key}", passed, expected=expected, actual=to_jsonable(actual))

    def result(self) -> dict:
        return to_jsonable({
            "name": self.name,
            "values": self.values,
            "artifacts": self.artifacts,
            "checks": self.checks,
            "csv_row": self.csv_row,
        })


OPERATIONS = {
    "validate": ItemRun.op_validate,
    "lp": ItemRun.op_lp,
    "sa": ItemRun.op_sa,
    "candidate": ItemRun.op_candidate,
    "cert": ItemRun.op_cert,
    "bichrom": ItemRun.op_bichrom,
    "gap": ItemRun.op_gap,
    "latin": ItemRun.op_latin,
}


def run_item(item: dict, settings: dict) -> dict:
    """
    Run every requested operation of one item

    Errors are folded into the result so one item cannot stop a batch:
    "error" holds the exception type, reason and details.
    """
    config = ItemConfig.model_validate(item)
    label = config.name or config.file or f"{config.family}:{config.param}"
    try:
        run = ItemRun(config, settings)
        for operation in config.operations:
            logger.info(f"Running {operation} on {run.name}")
            OPERATIONS[operation](run)
        run.compare_expectations()
        return run.result()
    except (ColorLabError, OSError) as e:
        logger.error(f"❌ Item {label} failed: {e}")
        details = getattr(e, "details", {})
        return to_jsonable({
            "name": label,
            "values": {},
            "artifacts": {},
            "checks": [],
            "csv_row": None,
            "error": {"type": type(e).__name__, "reason": str(e), "details": details},
        })


# ==============================================================================
# BATCH
# ==============================================================================

def _dispatch(items: List[dict], settings: dict, broker_url: Optional[str]) -> List[dict]:
    from colorlab import tasks, worker

    if tasks.run_item_task is None:
        return [run_item(item, settings) for item in items]
    worker.configure(worker.celery_app, broker_url)
    pending = [tasks.run_item_task.delay(item, settings) for item in items]
    return [result.get() for result in pending]


def _slug(name: str) -> str:
    return re.sub(r"[^A-Za-z0-9_.-]+", "_", name).strip("_") or "item"


def run(config: ExperimentConfig, base_dir=".", output_dir=None) -> Tuple[int, dict]:
    """
    Execute a batch and write per-item JSON, summary.json and the gap CSV

    Returns:
        (exit code, summary): 0 when every check passes, 1 when a check
        fails, 2 when an item hit a budget, instance or I/O error
    """
    out = Path(output_dir or config.output_dir)
    if not out.is_absolute():
        out = Path(base_dir) / out
    settings = {
        "base_dir": str(base_dir),
        "sa_budget": config.sa_budget,
        "mu_limit": config.mu_limit,
        "ilp_limit": config.ilp_limit,
        "eps_sweep": list(config.eps_sweep),
    }
    items = [item.model_dump() for item in config.items]
    results = _dispatch(items, settings, config.broker_url)

    failures = []
    errors = []
    rows = []
    for index, result in enumerate(results):
        write_json(result, out / "items" / f"{index:03d}-{_slug(result['name'])}.json")
        if "error" in result:
            errors.append({"item": result["name"], **result["error"]})
        failures.extend(
            {"item": result["name"], **check} for check in result["checks"] if not check["passed"]
        )
        if result.get("csv_row"):
            rows.append(result["csv_row"])

    hard = [e for e in errors if e["type"] != CertificateError.__name__]
    exit_code = EXIT_ERROR if hard else (EXIT_CHECK_FAILED if failures or errors else EXIT_OK)

    summary = {
        "items": [{"name": r["name"], "values": r["values"]} for r in results],
        "failures": failures,
        "errors": errors,
        "exit_code": exit_code,
    }
    write_json(summary, out / "summary.json")
    if rows:
        write_gap_csv(rows, out / config.csv_name)

    if exit_code == EXIT_OK:
        logger.info(f"✅ All {len(results)} item(s) passed")
    else:
        logger.warning(f"⚠️ Batch finished with {len(failures)} failed check(s) and {len(errors)} error(s)")
    return exit_code, summary
