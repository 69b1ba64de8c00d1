"""Command-line front end.

Exit codes: 0 when every check passes (for ``theorem``: when the two sides
agree), 1 when a check fails, 2 when the input is invalid or unusable.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from dataclasses import replace
from pathlib import Path
from typing import Optional, Sequence

from . import __version__
from .algebroid import (
    THEOREMS,
    TheoremInputs,
    build_phi,
    build_psi,
    check_eps_hyper_lie,
    check_hyper_with_torsion,
    theorem_suite,
)
from .courant import CourantStructure, axioms_pre_courant, is_courant
from .errors import DocumentError, HyperCourantError, InternalConsistencyError
from .hyper import (
    SWAP_PATTERNS,
    check_eps_hypersymplectic,
    check_hyperkahler,
    from_hyperkahler,
    swap_structure,
    to_hyperkahler,
)
from .instances import KINDS, InstanceSpec
from .report import CheckReport, element_json
from .serialize import InstanceDocument, document_from, dumps, emit, digest, parse, with_quad, with_triple

REPORT_SCHEMA = "hypercourant/report/1"
FIXTURE_ENV = "HYPERCOURANT_FIXTURES"
SUITES = ("hyper", "hyper-lie", "torsion", "hyperkahler", "courant")
VARIANTS = ("valid", "broken-inverse", "non-skew")

EXIT_OK, EXIT_FAIL, EXIT_INVALID = 0, 1, 2


class Invalid(Exception):
    """Input that cannot be checked; maps to exit code 2."""


# -- file handling ------------------------------------------------------------------------


def resolve_input(name: str) -> Path:
    """Use ``name`` as given, falling back to the fixture directory for relative names."""
    path = Path(name)
    if path.exists() or path.is_absolute():
        return path
    base = os.environ.get(FIXTURE_ENV)
    if base and (Path(base) / path).exists():
        return Path(base) / path
    return path


def resolve_output(name: str) -> Path:
    path = Path(name)
    base = os.environ.get(FIXTURE_ENV)
    if base and not path.is_absolute() and path.parent == Path("."):
        return Path(base) / path
    return path


def load(name: str) -> tuple[InstanceDocument, str]:
    path = resolve_input(name)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise Invalid(f"cannot read {name}: {exc.strerror}") from exc
    return parse(text), text


# -- per-command work ---------------------------------------------------------------------


def _theta(doc: InstanceDocument, audit: bool) -> CourantStructure:
    return doc.theta(extras=audit)


def _audit(doc: InstanceDocument) -> CheckReport:
    """Compare the explicit ψ/φ against the values derived from μ, γ and the first form."""
    report = CheckReport("audit of explicit potentials")
    extra = doc.theta_extra or {}
    forms = doc.forms()
    if "psi" in extra:
        derived = build_psi(doc.mu(), forms.pi(1))
        report.add("psi matches ½{π₁,{π₁,μ}}", derived == extra["psi"],
                   element_json(derived - extra["psi"]) if derived != extra["psi"] else None)
    if "phi" in extra:
        derived = build_phi(doc.gamma(), forms.omega(1))
        report.add("phi matches ½{ω₁,{ω₁,γ}}", derived == extra["phi"],
                   element_json(derived - extra["phi"]) if derived != extra["phi"] else None)
    if not extra:
        report.notes.append("no theta_extra section to audit")
    return report


def run_check(doc: InstanceDocument, suite: str, audit: bool) -> list[CheckReport]:
    if doc.theta_extra and not audit:
        raise Invalid("theta_extra is accepted only with --audit")
    reports = []
    if audit:
        reports.append(_audit(doc))
    theta = _theta(doc, audit)
    if suite == "courant":
        reports.append(axioms_pre_courant(theta))
        verdict = is_courant(theta)
        rep = CheckReport("Courant condition {Θ, Θ} = 0")
        rep.add("{Θ, Θ} = 0", verdict.is_courant,
                None if verdict.witness is None or verdict.witness.is_zero() else element_json(verdict.witness))
        reports.append(rep)
    elif suite == "hyper":
        reports.append(check_eps_hypersymplectic(theta, doc.hyper_triple()))
    elif suite == "hyper-lie":
        reports.append(check_eps_hyper_lie(doc.mu(), doc.forms()))
    elif suite == "torsion":
        reports.append(check_hyper_with_torsion(doc.mu(), doc.forms()))
    elif suite == "hyperkahler":
        q = doc.quad() if doc.hyperkahler is not None else to_hyperkahler(doc.hyper_triple(), theta)
        reports.append(check_hyperkahler(theta, q))
    return reports


def run_theorem(doc: InstanceDocument, name: str):
    if name in ("thm8_1", "prop9_5", "thm9_6") and doc.dual_structure_constants is None:
        raise Invalid(f"{name} needs the 'dual_structure_constants' section")
    gamma = doc.gamma() if doc.dual_structure_constants is not None else None
    return theorem_suite(name, TheoremInputs(doc.mu(), doc.forms(), gamma))


def parse_direction(direction: str):
    if direction in ("to-hk", "from-hk"):
        return direction, None
    if direction.startswith("swap:"):
        tail = direction[5:]
        if tail in ("", "none", "0"):
            return "swap", frozenset()
        if tail.isdigit() and frozenset(int(c) for c in tail) in SWAP_PATTERNS and len(set(tail)) == len(tail) == 2:
            return "swap", frozenset(int(c) for c in tail)
    raise Invalid(f"unknown direction {direction!r}; use to-hk, from-hk, swap:none, swap:23, swap:13 or swap:12")


def run_correspond(doc: InstanceDocument, direction: str) -> tuple[InstanceDocument, list[CheckReport]]:
    kind, pattern = parse_direction(direction)
    theta = doc.theta()
    if doc.eps().product != -1:
        raise Invalid(f"sign triple {doc.eps()} has product +1, so it is neither hypersymplectic nor para-hypersymplectic")
    if kind == "to-hk":
        h = doc.hyper_triple()
        q = to_hyperkahler(h, theta)
        out = with_quad(doc, q)
        return out, [check_hyperkahler(theta, q)]
    if kind == "from-hk":
        q = doc.quad()
        h = from_hyperkahler(q, doc.eps(), theta)
        out = with_triple(doc, h)
        return out, [check_eps_hypersymplectic(theta, h)]
    res = swap_structure(doc.hyper_triple(), pattern, theta)
    res.report.notes.append(f"metric sign {res.metric_sign:+d}")
    return with_triple(doc, res.triple), [res.report]


def run_fixture(kind: str, dim: int, seed: int, budget: int, variant: str) -> InstanceDocument:
    mu, forms = InstanceSpec(kind, dim, seed, budget).build()
    doc = document_from(mu, forms)
    if variant == "broken-inverse":
        pis = [forms.p(i) for i in (1, 2, 3)]
        pis[0] = pis[0] * 2
        doc = replace(doc, pi=tuple(pis))
    return doc


def _non_skew(text: str) -> str:
    """Corrupt the first form so that it is no longer skew-symmetric."""
    obj = json.loads(text)
    obj["omega"][0][0][1] = {"n": 7, "d": 1}
    obj["omega"][0][1][0] = {"n": 7, "d": 1}
    return dumps(obj) + "\n"


# -- reporting ----------------------------------------------------------------------------


def report_document(command: str, target: str, input_text: Optional[str], status: int,
                    reports=(), equivalence=None, error: Optional[DocumentError | str] = None,
                    output: Optional[str] = None, seconds: float = 0.0) -> dict:
    body: dict = {
        "schema": REPORT_SCHEMA,
        "tool": {"name": "hypercourant", "version": __version__},
        "command": command,
        "target": target,
        "input_digest": digest(input_text) if input_text is not None else None,
        "exit_code": status,
        "status": {EXIT_OK: "pass", EXIT_FAIL: "fail", EXIT_INVALID: "invalid"}[status],
    }
    if reports:
        body["reports"] = [r.to_dict() for r in reports]
    if equivalence is not None:
        body["equivalence"] = equivalence.to_dict()
    if output is not None:
        body["output_digest"] = digest(output)
    if error is not None:
        body["error"] = {"message": str(error), "location": getattr(error, "location", "")}
    body["report_digest"] = digest(dumps(body))
    body["timing"] = {"seconds": round(seconds, 6)}
    return body


def human(body: dict) -> str:
    lines = [f"hypercourant {body['command']} {body['target']}: {body['status'].upper()}"]
    for rep in body.get("reports", []):
        lines.append(f"{rep['title']}: {'PASS' if rep['passed'] else 'FAIL'}")
        for v in rep["verdicts"]:
            lines.append(f"  {'ok  ' if v['passed'] else 'FAIL'} {v['name']}")
        lines.extend(f"  note: {n}" for n in rep.get("notes", []))
    eq = body.get("equivalence")
    if eq is not None:
        lines.append(f"left side  ({eq['left']['title']}): {'holds' if eq['left']['passed'] else 'fails'}")
        for v in eq["left"]["verdicts"]:
            if not v["passed"]:
                lines.append(f"  FAIL {v['name']}")
        lines.append(f"right side ({eq['right']['title']}): {'holds' if eq['right']['passed'] else 'fails'}")
        for v in eq["right"]["verdicts"]:
            if not v["passed"]:
                lines.append(f"  FAIL {v['name']}")
        lines.append(f"sides agree: {eq['agree']}")
        lines.extend(f"  note: {n}" for n in eq.get("notes", []))
    if "error" in body:
        lines.append(f"error: {body['error']['message']}")
    return "\n".join(lines)


# -- entry point --------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="hypercourant", description="Exact checks of hypersymplectic structures on Courant algebroids.")
    p.add_argument("--version", action="version", version=f"hypercourant {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--json", action="store_true", help="print the machine-readable report")
        sp.add_argument("--report", metavar="PATH", help="also write the JSON report to PATH")

    c = sub.add_parser("check", help="run one checker on an instance file")
    c.add_argument("file")
    c.add_argument("--suite", choices=SUITES, required=True)
    c.add_argument("--audit", action="store_true", help="include and audit explicit theta_extra terms")
    common(c)

    t = sub.add_parser("theorem", help="compare both sides of an equivalence theorem")
    t.add_argument("file")
    t.add_argument("--theorem", choices=THEOREMS, required=True)
    common(t)

    r = sub.add_parser("correspond", help="convert between triples and quadruples, or swap S_j for T_j")
    r.add_argument("file")
    r.add_argument("--direction", required=True, help="to-hk, from-hk or swap:<pattern> (none, 23, 13, 12)")
    r.add_argument("--emit-fixture", metavar="PATH", help="write the resulting document here instead of stdout")
    common(r)

    f = sub.add_parser("fixture", help="generate an instance document")
    f.add_argument("--kind", choices=KINDS, required=True)
    f.add_argument("--dim", type=int, default=4)
    f.add_argument("--seed", type=int, default=0)
    f.add_argument("--budget", type=int, default=200)
    f.add_argument("--variant", choices=VARIANTS, default="valid",
                   help="emit a deliberately broken document for negative tests")
    f.add_argument("--emit-fixture", metavar="PATH", help="write the document here instead of stdout")
    return p


def _write(path: str, text: str) -> None:
    target = resolve_output(path)
    target.parent.mkdir(parents=True, exist_ok=True)
    target.write_text(text, encoding="utf-8")


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    start = time.perf_counter()

    if args.command == "fixture":
        try:
            text = emit(run_fixture(args.kind, args.dim, args.seed, args.budget, args.variant))
        except (HyperCourantError, ValueError) as exc:
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_INVALID
        if args.variant == "non-skew":
            text = _non_skew(text)
        if args.emit_fixture:
            _write(args.emit_fixture, text)
        else:
            sys.stdout.write(text)
        return EXIT_OK

    target = {"check": getattr(args, "suite", None), "theorem": getattr(args, "theorem", None),
              "correspond": getattr(args, "direction", None)}[args.command]
    text = None
    output = None
    reports: list[CheckReport] = []
    equivalence = None
    error = None
    try:
        doc, text = load(args.file)
        if args.command == "check":
            reports = run_check(doc, args.suite, args.audit)
            status = EXIT_OK if all(r.passed for r in reports) else EXIT_FAIL
        elif args.command == "theorem":
            equivalence = run_theorem(doc, args.theorem)
            status = EXIT_OK if equivalence.agree else EXIT_FAIL
        else:
            out_doc, reports = run_correspond(doc, args.direction)
            output = emit(out_doc)
            status = EXIT_OK if all(r.passed for r in reports) else EXIT_FAIL
    except InternalConsistencyError:
        raise
    except (Invalid, HyperCourantError) as exc:
        error, status, reports, equivalence, output = exc, EXIT_INVALID, [], None, None
        pre = getattr(exc, "report", None)
        if pre is not None:
            reports = [pre]

    body = report_document(args.command, target, text, status, reports, equivalence, error, output,
                           time.perf_counter() - start)
    rendered = json.dumps(body, ensure_ascii=False, indent=2) + "\n"
    if args.report:
        Path(args.report).write_text(rendered, encoding="utf-8")
    report_stream = sys.stdout
    if output is not None:
        if args.emit_fixture:
            _write(args.emit_fixture, output)
        else:
            sys.stdout.write(output)
            report_stream = sys.stderr
    if args.json:
        report_stream.write(rendered)
    else:
        print(human(body), file=report_stream if error is None else sys.stderr)
    return status


def entry() -> None:
    sys.exit(main())


__all__ = ["EXIT_FAIL", "EXIT_INVALID", "EXIT_OK", "SUITES", "build_parser", "main", "report_document"]
