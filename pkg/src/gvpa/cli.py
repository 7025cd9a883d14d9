"""Batch command-line front end.

Exit codes: 0 success (and verdict "true" where applicable), 1 a checked
verdict is false, 2 input error, 3 a resource cap was exceeded.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import translate as tr
from .bisim import (
    distinguishing_formula_state_based, distinguishing_formula_stateless,
    state_based_bisim, stateless_bisim, strong_bisim,
)
from .errors import GvpaError, ResourceLimitError
from .hml import build_state_space, formula_str, fragment, parse_formula, satisfies
from .parser import parse_expr, parse_spec
from .sos import ExplorationConfig, GvState, explore, export_lts, generate_lts
from .syntax import Valuation, validate_spec

EXIT_OK = 0
EXIT_FALSE = 1
EXIT_INPUT = 2
EXIT_RESOURCE = 3


def _build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true",
                        default=argparse.SUPPRESS,
                        help="machine-readable output")
    common.add_argument("--max-states", type=int, metavar="N",
                        default=argparse.SUPPRESS)
    common.add_argument("--max-valuations", type=int, metavar="N",
                        default=argparse.SUPPRESS)

    top = argparse.ArgumentParser(
        prog="gvpa", parents=[common],
        description="Tooling for a process algebra with global variables.")
    sub = top.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", parents=[common],
                       help="parse and check a specification")
    p.add_argument("file")

    p = sub.add_parser("lts", parents=[common],
                       help="generate the LTS of the init state")
    p.add_argument("file")
    p.add_argument("--format", choices=("aut", "dot"), default="aut")
    p.add_argument("--out", metavar="PATH")

    p = sub.add_parser("bisim", parents=[common], help="decide a bisimilarity")
    p.add_argument("file")
    p.add_argument("--mode", required=True,
                   choices=("strong", "state-based", "stateless"))
    p.add_argument("--left", required=True, metavar="NAME_OR_EXPR")
    p.add_argument("--right", required=True, metavar="NAME_OR_EXPR")
    p.add_argument("--valuation", metavar="x=v,...")

    p = sub.add_parser("modelcheck", parents=[common],
                       help="evaluate a formula at the init state")
    p.add_argument("file")
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--formula", metavar="STR")
    group.add_argument("--formula-file", metavar="PATH")

    p = sub.add_parser("distinguish", parents=[common],
                       help="synthesize a distinguishing formula")
    p.add_argument("file")
    p.add_argument("--mode", required=True, choices=("state-based", "stateless"))
    p.add_argument("--left", required=True, metavar="NAME_OR_EXPR")
    p.add_argument("--right", required=True, metavar="NAME_OR_EXPR")
    p.add_argument("--valuation", metavar="x=v,...")

    p = sub.add_parser("translate", parents=[common],
                       help="emit .mcrl2/.mcf files")
    p.add_argument("file")
    p.add_argument("--out", required=True, metavar="DIR")
    p.add_argument("--formulas", metavar="PATH",
                   help="file with one check-fragment formula per line")
    p.add_argument("--multi", action="store_true",
                   help="use the multi-variable translation")

    p = sub.add_parser("verify-translation", parents=[common],
                       help="machine-check the translation on this spec")
    p.add_argument("file")
    p.add_argument("--formulas", metavar="PATH")

    return top


def _config(args) -> ExplorationConfig:
    return ExplorationConfig(max_states=args.max_states,
                             max_valuations=args.max_valuations)


def _load(args):
    text = Path(args.file).read_text(encoding="utf-8")
    return parse_spec(text)


def _valuation(args, spec, init) -> Valuation:
    if not args.valuation:
        return init.valuation
    assignment = {}
    for part in args.valuation.split(","):
        var, _, value = part.partition("=")
        var, value = var.strip(), value.strip()
        if var not in spec.variables:
            raise GvpaError(f"unknown variable {var}")
        if value not in spec.domain:
            raise GvpaError(f"unknown value {value}")
        assignment[var] = value
    missing = [v for v in spec.variables if v not in assignment]
    if missing:
        raise GvpaError(f"valuation misses variables: {', '.join(missing)}")
    return Valuation.make(spec.variables, assignment)


def _emit(args, payload: dict, human: str) -> None:
    if args.json:
        print(json.dumps(payload, indent=2, sort_keys=True))
    else:
        print(human)


def _cmd_validate(args) -> int:
    spec, init = _load(args)
    problems = validate_spec(spec, init)
    _emit(args, {"ok": not problems, "problems": problems},
          "ok" if not problems else "\n".join(problems))
    return EXIT_OK if not problems else EXIT_FALSE


def _cmd_lts(args) -> int:
    spec, init = _load(args)
    lts = generate_lts(spec, init, _config(args))
    text = export_lts(lts, args.format)
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
        _emit(args, {"states": len(lts.states),
                     "transitions": len(lts.transitions),
                     "out": args.out},
              f"wrote {args.out}: {len(lts.states)} states, "
              f"{len(lts.transitions)} transitions")
    else:
        sys.stdout.write(text)
    return EXIT_OK


def _bisim_report(args, mode, result, formula=None, witness=None) -> int:
    payload = {
        "mode": mode,
        "verdict": result.equivalent,
        "relation_size": result.relation_size,
        "witness_formula": formula_str(formula) if formula is not None else None,
        "witness_valuation": str(witness) if witness is not None else None,
    }
    human = f"{mode}: {'bisimilar' if result.equivalent else 'not bisimilar'}"
    if formula is not None:
        human += f"\nformula: {formula_str(formula)}"
    if witness is not None:
        human += f"\nvaluation: {witness}"
    _emit(args, payload, human)
    return EXIT_OK if result.equivalent else EXIT_FALSE


def _cmd_bisim(args) -> int:
    spec, init = _load(args)
    cfg = _config(args)
    left = parse_expr(args.left, spec)
    right = parse_expr(args.right, spec)
    valuation = _valuation(args, spec, init)
    if args.mode == "strong":
        lts, (si, ti) = explore(spec, [GvState(left, valuation),
                                       GvState(right, valuation)], cfg)
        return _bisim_report(args, "strong", strong_bisim(lts, si, ti))
    if args.mode == "state-based":
        result = state_based_bisim(spec, GvState(left, valuation),
                                   GvState(right, valuation), cfg)
        formula = None
        if not result.equivalent:
            formula = distinguishing_formula_state_based(
                spec, GvState(left, valuation), GvState(right, valuation), cfg)
        return _bisim_report(args, "state-based", result, formula,
                             valuation if formula is not None else None)
    result = stateless_bisim(spec, left, right, cfg)
    formula = witness = None
    if not result.equivalent:
        formula, witness = distinguishing_formula_stateless(
            spec, left, right, cfg, at=valuation)
    return _bisim_report(args, "stateless", result, formula, witness)


def _cmd_modelcheck(args) -> int:
    spec, init = _load(args)
    cfg = _config(args)
    if args.formula is not None:
        text = args.formula
    else:
        text = Path(args.formula_file).read_text(encoding="utf-8").strip()
    formula = parse_formula(text, spec)
    space = build_state_space(spec, [init.root], cfg)
    verdict = satisfies(space, GvState(init.root, init.valuation), formula)
    _emit(args, {"verdict": verdict,
                 "fragment": fragment(formula),
                 "formula": formula_str(formula)},
          "true" if verdict else "false")
    return EXIT_OK if verdict else EXIT_FALSE


def _cmd_distinguish(args) -> int:
    spec, init = _load(args)
    cfg = _config(args)
    left = parse_expr(args.left, spec)
    right = parse_expr(args.right, spec)
    valuation = _valuation(args, spec, init)
    if args.mode == "stateless":
        result = stateless_bisim(spec, left, right, cfg)
        if result.equivalent:
            _emit(args, {"verdict": None,
                         "message": "bisimilar: no distinguishing formula exists"},
                  "bisimilar: no distinguishing formula exists")
            return EXIT_FALSE
        formula, witness = distinguishing_formula_stateless(
            spec, left, right, cfg, at=valuation)
        _emit(args, {"formula": formula_str(formula),
                     "valuation": str(witness)},
              f"{formula_str(formula)}\nvaluation: {witness}")
        return EXIT_OK
    result = state_based_bisim(spec, GvState(left, valuation),
                               GvState(right, valuation), cfg)
    if result.equivalent:
        _emit(args, {"verdict": None,
                     "message": "bisimilar: no distinguishing formula exists"},
              "bisimilar: no distinguishing formula exists")
        return EXIT_FALSE
    formula = distinguishing_formula_state_based(
        spec, GvState(left, valuation), GvState(right, valuation), cfg)
    _emit(args, {"formula": formula_str(formula), "valuation": str(valuation)},
          f"{formula_str(formula)}\nvaluation: {valuation}")
    return EXIT_OK


def _load_formulas(path: str | None, spec) -> list:
    if path is None:
        return []
    out = []
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        line = line.strip()
        if line and not line.startswith("//"):
            out.append(parse_formula(line, spec))
    return out


def _cmd_translate(args) -> int:
    spec, init = _load(args)
    cfg = _config(args)
    out = tr.translate_init(spec, init.root, init.valuation, multi=args.multi)
    formulas = [tr.translate_formula(f)
                for f in _load_formulas(args.formulas, spec)]
    base = Path(args.file).stem
    files = tr.emit_mcrl2_files(out, formulas, base=base)
    # .aut exports of both sides, for external ltscompare cross-validation
    from .mcrl2 import generate_lts_mcrl2

    gv_lts = generate_lts(spec, init, cfg)
    m_lts = generate_lts_mcrl2(out.menv, out.top, cfg)
    files[f"{base}.source.aut"] = export_lts(gv_lts, "aut")
    files[f"{base}.translated.aut"] = export_lts(m_lts, "aut")
    directory = Path(args.out)
    directory.mkdir(parents=True, exist_ok=True)
    for name, text in files.items():
        (directory / name).write_text(text, encoding="utf-8")
    _emit(args, {"files": sorted(files)},
          "\n".join(f"wrote {directory / name}" for name in sorted(files)))
    return EXIT_OK


def _cmd_verify_translation(args) -> int:
    spec, init = _load(args)
    cfg = _config(args)
    pipeline = tr.run_pipeline(spec, init.root, init.valuation, cfg,
                               multi=len(spec.variables) != 1)
    checks: list[tuple[str, bool, str]] = []
    consistency = pipeline.consistency
    checks.append(("variable-consistency", consistency.ok,
                   "" if consistency.ok else
                   f"condition {consistency.condition}: {consistency.witness}"))
    expected = (len(pipeline.gv_lts.transitions)
                + len(pipeline.gv_lts.states) * len(spec.variables))
    counts_ok = (len(pipeline.m_lts.states) == len(pipeline.gv_lts.states)
                 and len(pipeline.m_lts.transitions) == expected)
    checks.append(("structure-preservation", counts_ok,
                   f"source {len(pipeline.gv_lts.states)}/"
                   f"{len(pipeline.gv_lts.transitions)}, translated "
                   f"{len(pipeline.m_lts.states)}/{len(pipeline.m_lts.transitions)}"))
    formulas = _load_formulas(args.formulas, spec)
    if not formulas:
        texts = [f"<{a}> true" for a in spec.actions]
        texts += [f"({v} = {d})" for v in spec.variables
                  for d in spec.domain.values]
        formulas = [parse_formula(t, spec) for t in texts]
    for formula in formulas:
        report = tr.check_theorem4(spec, init.root, init.valuation, formula,
                                   cfg, pipeline=pipeline)
        checks.append((f"formula-preservation {formula_str(formula)}",
                       report.agrees,
                       f"source={report.source_verdict} "
                       f"translated={report.translated_verdict}"))
    corollary = tr.check_corollary1(spec, init.root, init.root,
                                    init.valuation, init.valuation, cfg)
    checks.append(("bisimilarity-preservation", corollary.agrees,
                   f"source={corollary.source.equivalent} "
                   f"translated={corollary.translated.equivalent}"))

    all_ok = all(ok for _, ok, _ in checks)
    payload = {"ok": all_ok,
               "consistency": consistency.as_dict(),
               "checks": [{"name": name, "ok": ok, "detail": detail}
                          for name, ok, detail in checks]}
    human = "\n".join(
        f"{'PASS' if ok else 'FAIL'} {name}" + (f" ({detail})" if detail else "")
        for name, ok, detail in checks)
    _emit(args, payload, human)
    return EXIT_OK if all_ok else EXIT_FALSE


_COMMANDS = {
    "validate": _cmd_validate,
    "lts": _cmd_lts,
    "bisim": _cmd_bisim,
    "modelcheck": _cmd_modelcheck,
    "distinguish": _cmd_distinguish,
    "translate": _cmd_translate,
    "verify-translation": _cmd_verify_translation,
}


def main(argv=None) -> int:
    defaults = argparse.Namespace(json=False, max_states=100_000,
                                  max_valuations=4096)
    args = _build_parser().parse_args(argv, namespace=defaults)
    try:
        return _COMMANDS[args.command](args)
    except ResourceLimitError as err:
        print(f"resource limit: {err}", file=sys.stderr)
        return EXIT_RESOURCE
    except GvpaError as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_INPUT
    except FileNotFoundError as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_INPUT


def console_main() -> None:
    sys.exit(main())


if __name__ == "__main__":
    console_main()
