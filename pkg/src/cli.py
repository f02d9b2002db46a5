#!/usr/bin/env python
"""Command-line runner for grpcoho.

Parses group/hom/module input files, drives the engines and renders reports
with rich. Exit codes: 0 claims certified, 2 refuted/infeasible/verification
failure, 1 error.
"""
import argparse
import json
import logging
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Sequence

import pandas as pd
import yaml
from dotenv import load_dotenv
from rich.console import Console
from rich.markup import escape
from rich.table import Table

from certificates import Certificate, CertificateKind, hom_to_dict, load_certificate, save_certificate
from certify import CdCertifier, HomotopyEngine, HomotopyInfeasible, LowerBoundEngine, format_cd, verify_certificate
from cohomology import cohomology_table, induced_hom_summary
from config_loader import ConfigLoader, EngineConfig, LoggingConfig
from errors import GroupCohomologyError, UnsupportedInputError
from freegroups import FactorizationError, verify_free_factorization
from grammar import ParsedInputs, parse_inputs
from group_model import GModule, GroupHom, GroupSpec, module_family
from ktheory import (
    certify_cat_infinite,
    cup_length_nonzero,
    cyclotomic_residue,
    mod_p_discrepancies,
    pullback_exponent,
    pulled_back_class,
)

console = Console()
logger = logging.getLogger(__name__)

COMMANDS = [
    "cohomology",
    "induced",
    "cd-bounds",
    "chain-homotopy",
    "bs-pullback",
    "ktheory",
    "cat-infinite",
    "verify-factorization",
    "verify-cert",
    "survey",
    "eg-report",
]

EXIT_CERTIFIED, EXIT_ERROR, EXIT_REFUTED = 0, 1, 2

CAT_BRIDGING_NOTE = "cat = ∞ (cyclotomic witness, bridging: K-theory cup-length bound)"
ONE_RELATOR_THEOREM = "one-relator groups have cohomological dimension at most 2"


def setup_logging(verbose: bool = False, logging_config: Optional[LoggingConfig] = None):
    """Configure logging for the runner."""
    logging_config = logging_config or LoggingConfig()
    level = logging.DEBUG if verbose else getattr(logging, logging_config.level, logging.INFO)
    logging.basicConfig(level=level, format=logging_config.format)


@dataclass
class RunConfig:
    """One CLI invocation: command, inputs, caps and output choices."""

    command: str
    inputs: List[Path] = field(default_factory=list)
    max_degree: int = 8
    max_bar_degree: int = 3
    modules: Optional[str] = None
    out: Optional[Path] = None
    verbose: bool = False
    json_output: bool = False
    degree: Optional[int] = None
    facts: List[Path] = field(default_factory=list)
    declare_one_relator: bool = False
    config_dir: Path = Path("config")
    engine: EngineConfig = field(default_factory=EngineConfig)
    metrics: bool = True

    def __post_init__(self):
        if self.command not in COMMANDS:
            raise UnsupportedInputError(f"Unknown command '{self.command}'")
        if self.max_degree < 1 or self.max_bar_degree < 1:
            raise UnsupportedInputError("Degree caps must be positive")
        if self.degree is not None and self.degree < 0:
            raise UnsupportedInputError(f"Degree must be >= 0, got {self.degree}")
        for path in list(self.inputs) + list(self.facts):
            if not Path(path).exists():
                raise FileNotFoundError(f"Input file '{path}' not found")
        self.engine.max_degree = self.max_degree
        self.engine.max_bar_degree = self.max_bar_degree


@dataclass
class Report:
    """Structured outcome of one command; deterministic for fixed inputs and config."""

    command: str
    results: Dict[str, Any] = field(default_factory=dict)
    certificates: List[str] = field(default_factory=list)
    discrepancies: List[str] = field(default_factory=list)
    exit_status: int = EXIT_CERTIFIED
    summary: List[str] = field(default_factory=list)
    table: Optional[pd.DataFrame] = None

    def to_dict(self) -> Dict[str, Any]:
        data = {
            "command": self.command,
            "results": self.results,
            "certificates": list(self.certificates),
            "discrepancies": list(self.discrepancies),
            "exit_status": self.exit_status,
            "summary": list(self.summary),
        }
        if self.table is not None:
            data["table"] = _records(self.table)
        return data

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2, default=str) + "\n"


def _records(table: pd.DataFrame) -> List[Dict[str, Any]]:
    return [{k: _plain(v) for k, v in row.items()} for row in table.to_dict(orient="records")]


def _plain(value: Any) -> Any:
    if hasattr(value, "item"):
        return value.item()
    if isinstance(value, tuple):
        return list(value)
    return value


# Input helpers

def _require_hom(inputs: ParsedInputs) -> GroupHom:
    if inputs.hom is None:
        raise UnsupportedInputError("This command needs `hom = hom{...}` in an input file")
    return inputs.hom


def _require_group(inputs: ParsedInputs) -> GroupSpec:
    group = inputs.group
    if group is None:
        raise UnsupportedInputError("This command needs `group = ...` or `hom = ...` in an input file")
    return group


def _family_entries(cfg: RunConfig, loader: Optional[ConfigLoader]) -> Optional[List[Dict]]:
    """Module family entries from a YAML file path, a named family, or the default."""
    if cfg.modules and Path(cfg.modules).suffix in (".yml", ".yaml"):
        path = Path(cfg.modules)
        if not path.exists():
            raise FileNotFoundError(f"Module family file '{path}' not found")
        with open(path) as f:
            data = yaml.safe_load(f) or {}
        return list(data.get("modules", []))
    if loader is not None and "modules" in loader.configs:
        return loader.get_module_family(cfg.modules).as_dicts()
    if cfg.modules:
        raise UnsupportedInputError(f"Module family '{cfg.modules}' needs config/modules.yml")
    return None


def _modules(cfg: RunConfig, inputs: ParsedInputs, group: GroupSpec, loader: Optional[ConfigLoader]) -> List[GModule]:
    module = inputs.module(group)
    if module is not None:
        return [module]
    return module_family(group, _family_entries(cfg, loader))


def _emit(cfg: RunConfig, report: Report, certificate: Certificate) -> None:
    report.results.setdefault("certificate", certificate.to_dict())
    if cfg.out is not None:
        path = save_certificate(certificate, cfg.out)
        report.certificates.append(str(path))


# Commands

def _cmd_cohomology(cfg: RunConfig, inputs: ParsedInputs, loader: Optional[ConfigLoader]) -> Report:
    group = _require_group(inputs)
    modules = _modules(cfg, inputs, group, loader)
    top = cfg.degree if cfg.degree is not None else cfg.max_degree
    table = cohomology_table(group, modules, top)
    if cfg.degree is not None:
        table = table[table["degree"] == cfg.degree].reset_index(drop=True)
    report = Report(cfg.command, table=table)
    report.summary.append(f"H^*({group.describe()}; M) for {len(modules)} modules through degree {top}")
    return report


def _cmd_induced(cfg: RunConfig, inputs: ParsedInputs, loader: Optional[ConfigLoader]) -> Report:
    hom = _require_hom(inputs)
    modules = _modules(cfg, inputs, hom.codomain, loader)
    degrees = [cfg.degree] if cfg.degree is not None else list(range(cfg.max_degree + 1))
    rows = []
    for module in modules:
        for k in degrees:
            induced = induced_hom_summary(hom, module, k)
            rows.append({
                "module": module.name,
                "degree": k,
                "source": str(induced.source.invariants),
                "target": str(induced.target.invariants),
                "matrix": [list(r) for r in induced.matrix.to_rows()],
                "zero": induced.is_zero,
            })
    report = Report(cfg.command, table=pd.DataFrame(rows, columns=["module", "degree", "source", "target", "matrix", "zero"]))
    report.summary.append(f"phi^* along {hom.describe()}")
    return report


def _cmd_cd_bounds(cfg: RunConfig, inputs: ParsedInputs, loader: Optional[ConfigLoader]) -> Report:
    hom = _require_hom(inputs)
    certifier = CdCertifier(cfg.engine, cfg.metrics, _family_entries(cfg, loader))
    certificate = certifier.certify_cd(hom, cfg.max_degree)
    report = Report(cfg.command)
    if certificate.kind == CertificateKind.CD_ZERO:
        lower = upper = 0
    elif certificate.kind == CertificateKind.CD_EXACT:
        lower = upper = certificate.claims["cd"]
    else:
        lower, upper = certificate.claims["cd_lower"], certificate.claims["cd_upper"]
    report.results.update({"hom": hom.describe(), "cd_lower": lower, "cd_upper": upper})
    report.summary.append(f"cd = {format_cd(lower, upper)}")
    _emit(cfg, report, certificate)
    return report


def _cmd_chain_homotopy(cfg: RunConfig, inputs: ParsedInputs, loader: Optional[ConfigLoader]) -> Report:
    hom = _require_hom(inputs)
    if cfg.degree is None:
        raise UnsupportedInputError("chain-homotopy needs --degree k (the annihilation threshold)")
    engine = HomotopyEngine(cfg.engine, cfg.metrics)
    result = engine.homotopy_annihilate(hom, cfg.degree)
    report = Report(cfg.command)
    if isinstance(result, HomotopyInfeasible):
        report.results.update({"feasible": False, "infeasible_degree": result.degree, "detail": result.detail})
        report.summary.append(f"No homotopy kills psi above degree {cfg.degree}: infeasible at degree {result.degree}")
        report.exit_status = EXIT_REFUTED
        return report
    report.results.update({"feasible": True, **result.to_payload()})
    report.summary.append(
        f"psi is homotopic to a map vanishing above degree {cfg.degree} "
        f"(degrees {cfg.degree + 1}..{result.top_degree}, periodic={result.periodic})"
    )
    if result.periodic:
        _emit(cfg, report, engine.upper_certificate(result))
    return report


def _cmd_bs_pullback(cfg: RunConfig, inputs: ParsedInputs, loader: Optional[ConfigLoader]) -> Report:
    hom = _require_hom(inputs)
    degree = 1 if cfg.degree is None else cfg.degree
    engine = LowerBoundEngine(cfg.engine, cfg.metrics)
    witness = engine.bs_power_pullback(hom, degree)
    report = Report(cfg.command)
    report.results.update({"hom": hom.describe(), "degree": degree, "nonzero": witness.nonzero})
    state = "nonzero" if witness.nonzero else "zero"
    report.summary.append(f"phi^*(beta^{degree}) is {state}")
    if witness.nonzero:
        _emit(cfg, report, engine.lower_certificate(witness))
    else:
        report.exit_status = EXIT_REFUTED
    return report


def _cmd_ktheory(cfg: RunConfig, inputs: ParsedInputs, loader: Optional[ConfigLoader]) -> Report:
    hom = _require_hom(inputs)
    n = hom.domain.order
    element = pulled_back_class(hom)
    powers = cfg.engine.k_theory_max_power
    nonzero = [cup_length_nonzero(hom, e, cfg.engine.k_theory_max_bits)[0] for e in range(1, powers + 1)]
    report = Report(cfg.command)
    report.results.update({
        "exponent": pullback_exponent(hom),
        "pulled_back_class": list(element.coefficients),
        "cyclotomic_residue": list(cyclotomic_residue(element, n)),
        "powers_nonzero_through": powers if all(nonzero) else nonzero.index(False),
    })
    report.summary.append(f"phi^*(eta - 1) = eta^{pullback_exponent(hom)} - 1 in K^0(BZ/{n})")
    for record in mod_p_discrepancies(hom):
        report.discrepancies.append(
            f"mod {record['p']}: (eta^{record['exponent']} - 1)^{record['power']} = 0, "
            "while the integral class is nonzero"
        )
    return report


def _cmd_cat_infinite(cfg: RunConfig, inputs: ParsedInputs, loader: Optional[ConfigLoader]) -> Report:
    hom = _require_hom(inputs)
    certificate = certify_cat_infinite(hom, cfg.engine.k_theory_max_power)
    report = Report(cfg.command)
    if certificate is None:
        report.summary.append("No cyclotomic witness: the pulled-back class vanishes modulo Phi_n")
        report.exit_status = EXIT_REFUTED
        return report
    report.summary.append(CAT_BRIDGING_NOTE)
    for record in certificate.payload["mod_p_discrepancies"]:
        report.discrepancies.append(
            f"mod {record['p']}: (eta^{record['exponent']} - 1)^{record['power']} = 0; "
            "the integral residue is the witness"
        )
    _emit(cfg, report, certificate)
    return report


def _cmd_verify_factorization(cfg: RunConfig, inputs: ParsedInputs, loader: Optional[ConfigLoader]) -> Report:
    hom = _require_hom(inputs)
    q_images, r_images, rank = inputs.factorization_maps()
    report = Report(cfg.command)
    try:
        certificate = verify_free_factorization(hom, q_images, r_images, rank)
    except FactorizationError as e:
        report.results["failed_condition"] = e.condition
        report.summary.append(f"Factorization rejected: {e}")
        report.exit_status = EXIT_REFUTED
        return report
    claims = certificate.claims
    report.summary.append(f"cat = cd = {claims['cd']} via F{rank}")
    _emit(cfg, report, certificate)
    return report


def _cmd_verify_cert(cfg: RunConfig, inputs: ParsedInputs, loader: Optional[ConfigLoader]) -> Report:
    report = Report(cfg.command)
    for path in cfg.inputs:
        certificate = load_certificate(path)
        verification = verify_certificate(certificate)
        failure = verification.first_failure
        report.results[str(path)] = {
            "kind": certificate.kind.value,
            "passed": verification.passed,
            "checks": len(verification.checks),
            "failed_check": failure.name if failure else None,
        }
        if verification.passed:
            report.summary.append(f"{path}: {certificate.summary()} [verified, {len(verification.checks)} checks]")
        else:
            name = failure.name if failure else "no checks"
            report.summary.append(f"{path}: verification failed at '{name}'")
            report.exit_status = EXIT_REFUTED
    return report


def _cmd_survey(cfg: RunConfig, inputs: ParsedInputs, loader: Optional[ConfigLoader]) -> Report:
    if loader is None:
        raise UnsupportedInputError("survey needs the corpus in config/corpus.yml")
    certifier = CdCertifier(cfg.engine, cfg.metrics, _family_entries(cfg, loader))
    table = certifier.survey_config(loader.get_corpus())
    report = Report(cfg.command, table=table)
    for row in table.to_dict(orient="records"):
        closed, lower, upper = row["cd_closed_form"], row["cd_lower"], row["cd_upper"]
        if closed is not None and not (lower <= closed and (upper is None or closed <= upper)):
            report.discrepancies.append(f"{row['name']}: closed form {closed} outside [{lower}, {upper}]")
    report.summary.append(f"Surveyed {len(table)} homomorphisms")
    return report


def _cmd_eg_report(cfg: RunConfig, inputs: ParsedInputs, loader: Optional[ConfigLoader]) -> Report:
    facts = [load_certificate(path) for path in cfg.facts]
    hom = inputs.hom if cfg.inputs else None
    return eg_report(facts, cfg.declare_one_relator, hom)


def eg_report(facts: Sequence[Certificate], declared_one_relator: bool, hom: Optional[GroupHom] = None) -> Report:
    """
    cat = cd in {1, 2} for epimorphisms out of a declared one-relator group.

    Case 1: a verified factorization through a free group gives cat = cd = 1.
    Case 2: a declared one-relator domain with a verified cd >= 2 certificate
    gives cat = cd = 2. A one-relator group has cd <= 2, so a verified bound
    above 2 is a discrepancy and the verdict stays undetermined.
    """
    report = Report("eg-report")
    assumptions: List[str] = []
    valid: List[Certificate] = []
    for certificate in facts:
        verification = verify_certificate(certificate)
        if verification.passed:
            valid.append(certificate)
        else:
            report.discrepancies.append(f"{certificate.kind.value} certificate failed '{verification.first_failure.name}'")

    subjects = {json.dumps(hom_to_dict(c.hom), sort_keys=True) for c in valid}
    if hom is not None:
        subjects.add(json.dumps(hom_to_dict(hom), sort_keys=True))
    if len(subjects) > 1:
        report.discrepancies.append("facts concern different homomorphisms")
        valid = []

    if declared_one_relator:
        assumptions.append("domain declared one-relator by the user")
        domain = hom.domain if hom is not None else (valid[0].hom.domain if valid else None)
        if domain is not None:
            count = len(domain.defining_relators())
            report.results["one_relator_check"] = {"relators": count, "syntactic": True, "holds": count == 1}
            if count != 1:
                report.discrepancies.append(f"declared one-relator but the presentation has {count} relators")

    factorization = next((c for c in valid if c.kind == CertificateKind.FACTORIZATION), None)
    lower_two = next((c for c in valid if _certified_lower(c) == 2), None)
    too_high = [c for c in valid if _certified_lower(c) > 2]
    if declared_one_relator:
        for certificate in too_high:
            k = _certified_lower(certificate)
            report.discrepancies.append(f"certified cd >= {k} contradicts the one-relator bound cd <= 2")
    if factorization is not None and factorization.claims.get("cd") == 1:
        verdict = "cat=cd=1 (Case 1)"
        assumptions.extend(factorization.assumptions)
    elif declared_one_relator and lower_two is not None and not too_high:
        verdict = "cat=cd=2 (Case 2)"
        assumptions.extend(lower_two.assumptions)
        assumptions.append(ONE_RELATOR_THEOREM)
    else:
        verdict = "undetermined"
        report.exit_status = EXIT_REFUTED

    report.results.update({"verdict": verdict, "assumptions": assumptions, "facts": [c.kind.value for c in valid]})
    report.summary.append(verdict)
    return report


def _certified_lower(certificate: Certificate) -> int:
    if certificate.kind == CertificateKind.CD_LOWER:
        return certificate.claims["cd_lower"]
    if certificate.kind == CertificateKind.CD_EXACT:
        return certificate.claims["cd"]
    if certificate.kind == CertificateKind.CD_INTERVAL:
        return certificate.claims["cd_lower"]
    return 0


_COMMANDS: Dict[str, Callable[[RunConfig, ParsedInputs, Optional[ConfigLoader]], Report]] = {
    "cohomology": _cmd_cohomology,
    "induced": _cmd_induced,
    "cd-bounds": _cmd_cd_bounds,
    "chain-homotopy": _cmd_chain_homotopy,
    "bs-pullback": _cmd_bs_pullback,
    "ktheory": _cmd_ktheory,
    "cat-infinite": _cmd_cat_infinite,
    "verify-factorization": _cmd_verify_factorization,
    "verify-cert": _cmd_verify_cert,
    "survey": _cmd_survey,
    "eg-report": _cmd_eg_report,
}


def run_command(cfg: RunConfig, loader: Optional[ConfigLoader] = None) -> Report:
    """Run one command; engine errors propagate to the caller."""
    inputs = ParsedInputs() if cfg.command == "verify-cert" else parse_inputs(cfg.inputs)
    report = _COMMANDS[cfg.command](cfg, inputs, loader)
    logger.debug(f"{cfg.command} finished with exit status {report.exit_status}")
    return report


def render_report(report: Report, json_output: bool = False) -> None:
    """Print a report as JSON or as rich text and tables."""
    if json_output:
        console.print_json(report.to_json())
        return
    colour = "green" if report.exit_status == EXIT_CERTIFIED else "red"
    for line in report.summary:
        console.print(f"[{colour}]{escape(line)}[/{colour}]")
    if report.table is not None and len(report.table):
        table = Table(title=report.command)
        for column in report.table.columns:
            table.add_column(str(column))
        for row in _records(report.table):
            table.add_row(*("-" if v is None else escape(str(v)) for v in row.values()))
        console.print(table)
    for path in report.certificates:
        console.print(f"[cyan]certificate written to {path}[/cyan]")
    for note in report.discrepancies:
        console.print(f"[yellow]discrepancy: {escape(note)}[/yellow]")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(description="Group cohomology certificates for homomorphisms")
    parser.add_argument("command", choices=COMMANDS, help="Command to run")
    parser.add_argument("-i", "--input", action="append", default=[], help="Input file (repeatable)")
    parser.add_argument("-o", "--out", help="Write the emitted certificate to this path")
    parser.add_argument("--max-degree", type=int, help="Degree cap K (default from config)")
    parser.add_argument("--max-bar-degree", type=int, help="Largest bar-resolution degree (default from config)")
    parser.add_argument("--modules", help="Module family name from config, or a YAML file")
    parser.add_argument("-k", "--degree", type=int, help="Single degree or annihilation threshold")
    parser.add_argument("--fact", action="append", default=[], help="Certificate used by eg-report (repeatable)")
    parser.add_argument("--declare-one-relator", action="store_true", help="Declare the domain one-relator")
    parser.add_argument("--config-dir", default="config", help="Directory holding the YAML configuration")
    parser.add_argument("--json", action="store_true", help="Print the report as JSON")
    parser.add_argument("-v", "--verbose", action="store_true", help="Enable verbose output")
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Main entry point; returns the exit status."""
    args = build_parser().parse_args(argv)
    load_dotenv()

    loader = None
    engine, logging_config = EngineConfig(), LoggingConfig()
    try:
        if Path(args.config_dir).exists():
            loader = ConfigLoader(args.config_dir)
            engine = loader.get_engine_config()
            logging_config = loader.get_logging_config()
        setup_logging(args.verbose, logging_config)

        cfg = RunConfig(
            command=args.command,
            inputs=[Path(p) for p in args.input],
            max_degree=args.max_degree or engine.max_degree,
            max_bar_degree=args.max_bar_degree or engine.max_bar_degree,
            modules=args.modules,
            out=Path(args.out) if args.out else None,
            verbose=args.verbose,
            json_output=args.json,
            degree=args.degree,
            facts=[Path(p) for p in args.fact],
            declare_one_relator=args.declare_one_relator,
            config_dir=Path(args.config_dir),
            engine=engine,
            metrics=logging_config.metrics,
        )
        report = run_command(cfg, loader)
    except (GroupCohomologyError, FileNotFoundError, yaml.YAMLError) as e:
        console.print(f"[red]✗ {type(e).__name__}: {escape(str(e))}[/red]")
        return EXIT_ERROR

    render_report(report, args.json)
    return report.exit_status


if __name__ == "__main__":
    sys.exit(main())
