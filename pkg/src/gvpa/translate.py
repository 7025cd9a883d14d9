"""Translation of parallel-sequential processes into the mCRL2 fragment.

A dedicated Globs process tracks the global variables; each translated
prefix carries a checkP action whose Boolean parameter encodes the
accumulated condition constraints, so a step can only synchronise with
Globs when the constraints hold for the current values. The verifier
checks the three variable-consistency conditions relating the source LTS
to the translated one, and the theorem checkers compare formula
satisfaction and bisimilarity verdicts across the translation.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

from .errors import FragmentError, SpecValidationError
from .hml import (
    And, Box, Check, Diamond, HFalse, HTrue, HmlFormula, Not, Or, SetVar,
    TRUE, build_state_space, eval_modal_on_lts, satisfies,
)
from .bisim import StateBasedResult, StrongResult, state_based_bisim, strong_bisim
from .mcrl2 import (
    DAnd, DBool, DConst, DEq, DVar, DataExpr, MAct, MAllow, MBar, MCall,
    MChoice, MComm, MDELTA, MDeadlock, MHide, MParallel, MPrefix, MSum,
    Mcrl2Process, Mcrl2Spec, Multiset, generate_lts_mcrl2,
)
from .sos import DEFAULT_CONFIG, ExplorationConfig, GvState, Lts, explore, state_str
from .syntax import (
    Action, Assign, Choice, Cond, Deadlock, Encap, Name, Parallel, Prefix,
    ProcessExpr, RecursiveSpec, Valuation, expr_str, label_str,
)

#: Action and process names the translation introduces; source specs must
#: not use them.
MACHINERY_NAMES = frozenset(
    {"check", "checkP", "checkG", "assign", "assignP", "assignG",
     "value", "Globs"})


# ---------------------------------------------------------------------------
# Input validation


def _check_seq(expr: ProcessExpr, path: str, problems: list[str]):
    if isinstance(expr, Deadlock):
        return
    if isinstance(expr, Choice):
        _check_seq(expr.left, path + "/left", problems)
        _check_seq(expr.right, path + "/right", problems)
        return
    if isinstance(expr, Cond):
        _check_seq(expr.body, path + "/body", problems)
        return
    if isinstance(expr, Prefix):
        if isinstance(expr.body, Name):
            return
        _check_seq(expr.body, path + "/body", problems)
        return
    if isinstance(expr, Name):
        problems.append(
            f"{path}: bare process name; sequential grammar only allows "
            "names directly under a prefix")
        return
    if isinstance(expr, Parallel):
        problems.append(f"{path}: parallel composition inside a sequential expression")
        return
    if isinstance(expr, Encap):
        problems.append(f"{path}: encapsulation inside a sequential expression")
        return
    problems.append(f"{path}: unsupported construct")


def _check_parseq(expr: ProcessExpr, path: str, problems: list[str]):
    if isinstance(expr, Parallel):
        _check_parseq(expr.left, path + "/left", problems)
        _check_parseq(expr.right, path + "/right", problems)
        return
    if isinstance(expr, Name):
        return
    if isinstance(expr, Encap):
        problems.append(f"{path}: nested encapsulation")
        return
    _check_seq(expr, path, problems)


def validate_parseq(spec: RecursiveSpec, expr: ProcessExpr,
                    single_variable: bool = True) -> tuple[frozenset[str], ProcessExpr]:
    """Accepts an optionally encapsulated parallel-sequential expression
    over a sequential recursive specification; returns (blocked, inner)."""
    problems: list[str] = []
    clashes = sorted((set(spec.actions) | set(spec.process_names))
                     & MACHINERY_NAMES)
    for name in clashes:
        problems.append(
            f"name {name} collides with an action the translation introduces")
    if single_variable and len(spec.variables) != 1:
        problems.append(
            f"single-variable translation requires exactly one global "
            f"variable, found {len(spec.variables)}")
    if not spec.variables:
        problems.append("translation requires at least one global variable")
    for name, body in spec.equations:
        _check_seq(body, f"proc {name}", problems)
    if isinstance(expr, Encap):
        blocked, inner = expr.blocked, expr.body
    else:
        blocked, inner = frozenset(), expr
    _check_parseq(inner, "input", problems)
    if problems:
        raise SpecValidationError(problems)
    return blocked, inner


# ---------------------------------------------------------------------------
# The expression translation (chi) and Globs


def _slot_binders(n: int) -> tuple[str, ...]:
    return tuple(f"d{i + 1}" for i in range(n))


def _constraint(eps: frozenset[tuple[str, str]], slots: Sequence[str],
                binders: Sequence[str], domain) -> DataExpr:
    ordered = sorted(eps, key=lambda vd: (slots.index(vd[0]), domain.index(vd[1])))
    conjuncts = tuple(
        DEq(DVar(binders[slots.index(var)]), DConst(value))
        for var, value in ordered)
    if not conjuncts:
        return DBool(True)
    if len(conjuncts) == 1:
        return conjuncts[0]
    return DAnd(conjuncts)


def chi(spec: RecursiveSpec, expr: ProcessExpr,
        eps: frozenset[tuple[str, str]] = frozenset(),
        slots: Sequence[str] | None = None) -> Mcrl2Process:
    """The six translation clauses; conditions accumulate into the checkP
    constraint of the next prefix, parallel distributes at the top."""
    if slots is None:
        slots = spec.variables
    binders = _slot_binders(len(slots))
    if isinstance(expr, Choice):
        return MChoice(chi(spec, expr.left, eps, slots),
                       chi(spec, expr.right, eps, slots))
    if isinstance(expr, Cond):
        return chi(spec, expr.body, eps | {(expr.var, expr.value)}, slots)
    if isinstance(expr, Prefix):
        condition = _constraint(eps, slots, binders, spec.domain)
        check_args = tuple(DVar(b) for b in binders) + (condition,)
        if isinstance(expr.label, Action):
            head = MAct(expr.label.name)
        else:
            head = MAct("assignP", (DConst(expr.label.var), DConst(expr.label.value)))
        multi = MBar(head, MAct("checkP", check_args))
        if isinstance(expr.body, Name):
            cont: Mcrl2Process = MCall(expr.body.name)
        else:
            cont = chi(spec, expr.body, frozenset(), slots)
        out: Mcrl2Process = MPrefix(multi, cont)
        for binder in reversed(binders):
            out = MSum(binder, out)
        return out
    if isinstance(expr, Name):
        return MCall(expr.name)
    if isinstance(expr, Deadlock):
        return MDELTA
    if isinstance(expr, Parallel):
        if eps:
            raise SpecValidationError(
                ["parallel composition under a condition is not translatable"])
        return MParallel(chi(spec, expr.left, frozenset(), slots),
                         chi(spec, expr.right, frozenset(), slots))
    raise SpecValidationError([f"untranslatable construct: {expr_str(expr)}"])


def make_globs(slots: Sequence[str], domain_values: Sequence[str]) -> tuple[str, tuple[str, ...], Mcrl2Process]:
    """The variable tracker: single check, double check (for handshakes),
    check-and-assign per variable, and one value self-loop per variable."""
    n = len(slots)
    params = ("d",) if n == 1 else _slot_binders(n)
    param_args = tuple(DVar(p) for p in params)
    check = MAct("checkG", param_args + (DBool(True),))
    stay = MCall("Globs", param_args)

    summands: list[Mcrl2Process] = [
        MPrefix(check, stay),
        MPrefix(MBar(check, check), stay),
    ]
    for i, slot in enumerate(slots):
        updated = tuple(DVar("new") if j == i else DVar(p)
                        for j, p in enumerate(params))
        summands.append(MSum("new", MPrefix(
            MBar(check, MAct("assignG", (DConst(slot), DVar("new")))),
            MCall("Globs", updated))))
    for i, slot in enumerate(slots):
        summands.append(MPrefix(
            MAct("value", (DConst(slot), DVar(params[i]))), stay))

    body = summands[0]
    for summand in summands[1:]:
        body = MChoice(body, summand)
    return ("Globs", params, body)


# ---------------------------------------------------------------------------
# Pipeline assembly


@dataclass(frozen=True)
class TranslationOutput:
    spec: RecursiveSpec
    slots: tuple[str, ...]
    blocked: frozenset[str]
    root: ProcessExpr           # the inner parallel-sequential expression
    wrapped: bool               # whether the source root carried the encap
    initial_valuation: Valuation
    menv: Mcrl2Spec
    top: Mcrl2Process
    comm_entries: tuple[tuple[Multiset, str], ...]
    comm_render: tuple[tuple[tuple[str, ...], str], ...]
    allow_names: tuple[str, ...]
    allow_set: frozenset[Multiset]
    hidden: frozenset[str]


def _comm_sets(spec: RecursiveSpec):
    gamma = sorted(spec.comm.entries, key=lambda kr: tuple(sorted(kr[0])))
    entries: list[tuple[Multiset, str]] = []
    render: list[tuple[tuple[str, ...], str]] = []
    for key, result in gamma:
        names = tuple(sorted(key))
        if len(names) == 1:
            entries.append((Multiset([names[0], names[0]]), result))
            render.append(((names[0], names[0]), result))
        else:
            entries.append((Multiset(names), result))
            render.append((names, result))
    entries.append((Multiset(["checkP", "checkG"]), "check"))
    render.append((("checkP", "checkG"), "check"))
    entries.append((Multiset(["assignP", "assignG"]), "assign"))
    render.append((("assignP", "assignG"), "assign"))
    return tuple(entries), tuple(render)


def _psi_term(spec, slots, allow_set, hidden, comm_entries, expr, valuation):
    globs_args = tuple(DConst(valuation.value_of(slot)) for slot in slots)
    par = MParallel(chi(spec, expr, frozenset(), slots),
                    MCall("Globs", globs_args))
    return MAllow(allow_set, MHide(hidden, MComm(comm_entries, par)))


def _assemble(spec: RecursiveSpec, blocked: frozenset[str], inner: ProcessExpr,
              valuation: Valuation, slots: tuple[str, ...], wrapped: bool) -> TranslationOutput:
    comm_entries, comm_render = _comm_sets(spec)
    allow_names = tuple(sorted(set(spec.actions) - blocked)) + ("value", "assign")
    allow_set = frozenset(Multiset([name]) for name in allow_names)
    hidden = frozenset({"check"})

    equations = [(name, (), chi(spec, body, frozenset(), slots))
                 for name, body in spec.equations]
    equations.append(make_globs(slots, spec.domain.values))
    menv = Mcrl2Spec(domain=spec.domain.values, equations=tuple(equations))

    return TranslationOutput(
        spec=spec, slots=slots, blocked=blocked, root=inner, wrapped=wrapped,
        initial_valuation=valuation, menv=menv,
        top=_psi_term(spec, slots, allow_set, hidden, comm_entries, inner, valuation),
        comm_entries=comm_entries, comm_render=comm_render,
        allow_names=allow_names, allow_set=allow_set, hidden=hidden,
    )


def translate_state(out: TranslationOutput, expr: ProcessExpr,
                    valuation: Valuation) -> Mcrl2Process:
    """The translated term for one source state; the consistency map is
    this function applied pointwise."""
    return _psi_term(out.spec, out.slots, out.allow_set, out.hidden,
                     out.comm_entries, expr, valuation)


def psi(spec: RecursiveSpec, expr: ProcessExpr, valuation: Valuation) -> TranslationOutput:
    """Single-variable translation of an (optionally encapsulated)
    parallel-sequential expression with an initial valuation."""
    blocked, inner = validate_parseq(spec, expr, single_variable=True)
    return _assemble(spec, blocked, inner, valuation,
                     slots=tuple(spec.variables),
                     wrapped=isinstance(expr, Encap))


def translate_multi(spec: RecursiveSpec, expr: ProcessExpr,
                    valuation: Valuation) -> TranslationOutput:
    """Any number of variables; check slots are ordered lexicographically."""
    blocked, inner = validate_parseq(spec, expr, single_variable=False)
    return _assemble(spec, blocked, inner, valuation,
                     slots=tuple(sorted(spec.variables)),
                     wrapped=isinstance(expr, Encap))


def translate_init(spec: RecursiveSpec, root: ProcessExpr, valuation: Valuation,
                   multi: bool = False) -> TranslationOutput:
    if multi or len(spec.variables) != 1:
        return translate_multi(spec, root, valuation)
    return psi(spec, root, valuation)


# ---------------------------------------------------------------------------
# Formula translation (theta)


def _label_image(label) -> str:
    return label_str(label)


def translate_formula(formula: HmlFormula) -> HmlFormula:
    """check (v=e) becomes a diamond over the value(v,e) self-loop; modal
    label sets carry over as canonical label strings."""
    if isinstance(formula, (HTrue, HFalse)):
        return formula
    if isinstance(formula, Check):
        return Diamond(frozenset({f"value({formula.var},{formula.value})"}), TRUE)
    if isinstance(formula, Not):
        return Not(translate_formula(formula.sub))
    if isinstance(formula, And):
        return And(translate_formula(formula.left), translate_formula(formula.right))
    if isinstance(formula, Or):
        return Or(translate_formula(formula.left), translate_formula(formula.right))
    if isinstance(formula, Diamond):
        return Diamond(frozenset(_label_image(l) for l in formula.labels),
                       translate_formula(formula.sub))
    if isinstance(formula, Box):
        return Box(frozenset(_label_image(l) for l in formula.labels),
                   translate_formula(formula.sub))
    if isinstance(formula, SetVar):
        raise FragmentError(
            "the formula translation is defined on the check fragment only; "
            "set operators cannot be translated")
    raise TypeError(f"not a formula: {formula!r}")


# ---------------------------------------------------------------------------
# Variable consistency


@dataclass
class ConsistencyReport:
    ok: bool
    condition: int | None = None
    witness: str | None = None

    def as_dict(self) -> dict:
        return {"ok": self.ok, "condition": self.condition, "witness": self.witness}


def build_consistency_map(out: TranslationOutput, gv_lts: Lts, m_lts: Lts) -> list[int]:
    """Maps the i-th source state to the index of its translated term."""
    m_index = {term: i for i, term in enumerate(m_lts.states)}
    link = []
    for state in gv_lts.states:
        expr = state.expr
        if out.wrapped:
            if not (isinstance(expr, Encap) and expr.blocked == out.blocked):
                raise SpecValidationError(
                    [f"source state lost its encapsulation: {state_str(state)}"])
            expr = expr.body
        term = translate_state(out, expr, state.valuation)
        if term not in m_index:
            raise SpecValidationError(
                [f"translated term of {state_str(state)} is not a state of "
                 "the translated LTS"])
        link.append(m_index[term])
    return link


def verify_variable_consistency(spec: RecursiveSpec, gv_lts: Lts, m_lts: Lts,
                                link: Sequence[int]) -> ConsistencyReport:
    """Checks the three conditions in order and reports the first failure."""
    value_labels = {f"value({v},{d})": (v, d)
                    for v in spec.variables for d in spec.domain.values}
    tl_labels = {label_str(Action(a)) for a in spec.actions}
    for v in spec.variables:
        for d in spec.domain.values:
            tl_labels.add(label_str(Assign(v, d)))

    # Condition 1: reachable translated labels stay inside TL + value loops.
    for src, label, dst in m_lts.transitions:
        if label not in tl_labels and label not in value_labels:
            return ConsistencyReport(
                ok=False, condition=1,
                witness=f"transition {src} --{label}--> {dst}")

    # Condition 2: value(v,d) self-loops exactly at the current value.
    for i, state in enumerate(gv_lts.states):
        m_state = link[i]
        observed = {}
        for label, target in m_lts.successors(m_state):
            if label in value_labels:
                var, value = value_labels[label]
                if target != m_state:
                    return ConsistencyReport(
                        ok=False, condition=2,
                        witness=(f"value({var},{value}) from the image of "
                                 f"{state_str(state)} is not a self-loop"))
                observed[(var, value)] = True
        for var in spec.variables:
            for value in spec.domain.values:
                expected = state.valuation.value_of(var) == value
                if expected != ((var, value) in observed):
                    return ConsistencyReport(
                        ok=False, condition=2,
                        witness=(f"value({var},{value}) self-loop at the image of "
                                 f"{state_str(state)} is "
                                 f"{'missing' if expected else 'spurious'}"))

    # Condition 3: label-for-label correspondence through the map.
    gv_trans = {(i, label_str(label), j) for i, label, j in gv_lts.transitions}
    m_trans = {(s, label, t) for s, label, t in m_lts.transitions}
    for i, label, j in gv_lts.transitions:
        image = (link[i], label_str(label), link[j])
        if image not in m_trans:
            return ConsistencyReport(
                ok=False, condition=3,
                witness=(f"source transition {state_str(gv_lts.states[i])} "
                         f"--{label_str(label)}--> {state_str(gv_lts.states[j])} "
                         "has no image"))
    preimages: dict[int, list[int]] = {}
    for i, m_state in enumerate(link):
        preimages.setdefault(m_state, []).append(i)
    for s, label, t in m_lts.transitions:
        if label not in tl_labels:
            continue
        for i in preimages.get(s, ()):
            for j in preimages.get(t, ()):
                if (i, label, j) not in gv_trans:
                    return ConsistencyReport(
                        ok=False, condition=3,
                        witness=(f"translated transition {s} --{label}--> {t} has "
                                 f"no source counterpart between "
                                 f"{state_str(gv_lts.states[i])} and "
                                 f"{state_str(gv_lts.states[j])}"))
    return ConsistencyReport(ok=True)


# ---------------------------------------------------------------------------
# End-to-end checks (theorem validation surfaces)


@dataclass
class PipelineResult:
    out: TranslationOutput
    gv_root: GvState
    gv_lts: Lts
    m_lts: Lts
    link: list[int]
    consistency: ConsistencyReport


def run_pipeline(spec: RecursiveSpec, root: ProcessExpr, valuation: Valuation,
                 cfg: ExplorationConfig = DEFAULT_CONFIG,
                 multi: bool = False) -> PipelineResult:
    """Translate, generate both LTSs, build the state map, verify."""
    out = translate_init(spec, root, valuation, multi=multi)
    gv_root = GvState(root, valuation)
    gv_lts, _ = explore(spec, [gv_root], cfg)
    m_lts = generate_lts_mcrl2(out.menv, out.top, cfg)
    link = build_consistency_map(out, gv_lts, m_lts)
    report = verify_variable_consistency(spec, gv_lts, m_lts, link)
    return PipelineResult(out=out, gv_root=gv_root, gv_lts=gv_lts,
                          m_lts=m_lts, link=link, consistency=report)


@dataclass
class Theorem4Report:
    formula: HmlFormula
    source_verdict: bool
    translated_verdict: bool

    @property
    def agrees(self) -> bool:
        return self.source_verdict == self.translated_verdict


def check_theorem4(spec: RecursiveSpec, root: ProcessExpr, valuation: Valuation,
                   formula: HmlFormula,
                   cfg: ExplorationConfig = DEFAULT_CONFIG,
                   pipeline: PipelineResult | None = None) -> Theorem4Report:
    """Evaluates a check-fragment formula on both sides of the translation."""
    if pipeline is None:
        pipeline = run_pipeline(spec, root, valuation, cfg)
    space = build_state_space(spec, [root], cfg)
    source = satisfies(space, pipeline.gv_root, formula)
    translated = (pipeline.m_lts.initial
                  in eval_modal_on_lts(pipeline.m_lts, translate_formula(formula)))
    return Theorem4Report(formula=formula, source_verdict=source,
                          translated_verdict=translated)


@dataclass
class Corollary1Report:
    source: StateBasedResult
    translated: StrongResult

    @property
    def agrees(self) -> bool:
        return self.source.equivalent == self.translated.equivalent


# ---------------------------------------------------------------------------
# File emission (.mcrl2 / .mcf)

_MCRL2_RESERVED = frozenset(
    "sort cons map var eqn act glob proc init struct true false if div mod in "
    "lambda forall exists whr end sum dist delta tau block allow hide rename "
    "comm min max pred succ Bool Pos Nat Int Real List Set Bag FSet FBag".split())

_BINDERS = frozenset({"d", "new"})


def _needs_prefix(name: str) -> bool:
    if not name or not (name[0].isalpha() or name[0] == "_"):
        return True
    if not all(ch.isalnum() or ch == "_" for ch in name):
        return True
    if name in _MCRL2_RESERVED or name in MACHINERY_NAMES or name in _BINDERS:
        return True
    if name in {"GvValue", "GvName"}:
        return True
    return name[0] == "d" and name[1:].isdigit()


class _Namer:
    """Deterministic renaming into valid, pairwise distinct mCRL2 ids."""

    def __init__(self):
        self.maps: dict[str, dict[str, str]] = {}
        self.taken: set[str] = set(MACHINERY_NAMES) | {"d", "new", "GvValue", "GvName"}

    def add(self, kind: str, prefix: str, names: Iterable[str]):
        table = self.maps.setdefault(kind, {})
        for name in names:
            rendered = f"{prefix}{name}" if _needs_prefix(name) else name
            if rendered in self.taken:
                raise SpecValidationError(
                    [f"cannot render {kind} name {name!r}: identifier "
                     f"{rendered!r} is already in use"])
            self.taken.add(rendered)
            table[name] = rendered

    def get(self, kind: str, name: str) -> str:
        if name in MACHINERY_NAMES or name in _BINDERS or (
                name and name[0] == "d" and name[1:].isdigit()):
            return name
        return self.maps[kind][name]


def _build_namer(out: TranslationOutput) -> _Namer:
    namer = _Namer()
    namer.add("value", "v_", out.spec.domain.values)
    namer.add("var", "g_", out.spec.variables)
    namer.add("action", "a_", out.spec.actions)
    namer.add("proc", "P_", out.spec.process_names)
    return namer


def _render_data(expr, namer: _Namer, symbols: dict[str, str]) -> str:
    if isinstance(expr, DConst):
        return symbols[expr.symbol]
    if isinstance(expr, DBool):
        return "true" if expr.value else "false"
    if isinstance(expr, DVar):
        return expr.name
    if isinstance(expr, DEq):
        return (f"{_render_data(expr.left, namer, symbols)} == "
                f"{_render_data(expr.right, namer, symbols)}")
    if isinstance(expr, DAnd):
        return " && ".join(_render_data(c, namer, symbols) for c in expr.conjuncts)
    raise TypeError(f"not a data expression: {expr!r}")


def _render_act(act, namer: _Namer, symbols: dict[str, str]) -> str:
    name = namer.get("action", act.name)
    if not act.args:
        return name
    args = ", ".join(_render_data(a, namer, symbols) for a in act.args)
    return f"{name}({args})"


def _render_maction(action, namer: _Namer, symbols: dict[str, str]) -> str:
    parts = []

    def collect(node):
        if isinstance(node, MBar):
            collect(node.left)
            collect(node.right)
        elif isinstance(node, MAct):
            parts.append(_render_act(node, namer, symbols))
        else:
            parts.append("tau")

    collect(action)
    text = "|".join(parts)
    return f"({text})" if len(parts) > 1 else text


_M_CHOICE, _M_PAR, _M_PREFIX, _M_ATOM = 0, 1, 2, 3


def _render_proc(proc, namer: _Namer, symbols: dict[str, str],
                 req: int = _M_CHOICE) -> str:
    if isinstance(proc, MDeadlock):
        text, level = "delta", _M_ATOM
    elif isinstance(proc, MCall):
        name = namer.get("proc", proc.name)
        if proc.args:
            args = ", ".join(_render_data(a, namer, symbols) for a in proc.args)
            text = f"{name}({args})"
        else:
            text = name
        level = _M_ATOM
    elif isinstance(proc, MPrefix):
        act = _render_maction(proc.action, namer, symbols)
        text = f"{act} . {_render_proc(proc.body, namer, symbols, _M_PREFIX)}"
        level = _M_PREFIX
    elif isinstance(proc, MSum):
        body = _render_proc(proc.body, namer, symbols, _M_CHOICE)
        text, level = f"(sum {proc.var}: GvValue . {body})", _M_ATOM
    elif isinstance(proc, MParallel):
        text = (f"{_render_proc(proc.left, namer, symbols, _M_PAR)} || "
                f"{_render_proc(proc.right, namer, symbols, _M_PREFIX)}")
        level = _M_PAR
    elif isinstance(proc, MChoice):
        text = (f"{_render_proc(proc.left, namer, symbols, _M_CHOICE)} + "
                f"{_render_proc(proc.right, namer, symbols, _M_PAR)}")
        level = _M_CHOICE
    elif isinstance(proc, MAllow):
        names = ", ".join(
            "|".join(sorted(m.elements())) for m in sorted(
                proc.allowed, key=lambda m: sorted(m.elements())))
        # the allow set is rendered from the caller's ordered name list
        text = f"allow({{{names}}}, {_render_proc(proc.body, namer, symbols)})"
        level = _M_ATOM
    elif isinstance(proc, MHide):
        names = ", ".join(sorted(proc.hidden))
        text = f"hide({{{names}}}, {_render_proc(proc.body, namer, symbols)})"
        level = _M_ATOM
    elif isinstance(proc, MComm):
        entries = ", ".join(
            "|".join(lhs.elements()) + " -> " + result
            for lhs, result in proc.entries)
        text = f"comm({{{entries}}}, {_render_proc(proc.body, namer, symbols)})"
        level = _M_ATOM
    else:
        raise TypeError(f"not an mCRL2 process: {proc!r}")
    if level < req:
        return f"({text})"
    return text


def render_mcrl2_spec(out: TranslationOutput) -> str:
    """The .mcrl2 model; deterministic, byte-stable rendering."""
    namer = _build_namer(out)
    symbols = {}
    for value in out.spec.domain.values:
        symbols[value] = namer.get("value", value)
    for var in out.spec.variables:
        if var in symbols:
            raise SpecValidationError(
                [f"variable {var} also names a domain value; the rendered "
                 "model cannot keep both"])
        symbols[var] = namer.get("var", var)

    lines = ["% mCRL2 model generated from a global-variable process specification.",
             ""]
    lines.append("sort GvValue = struct "
                 + " | ".join(symbols[v] for v in out.spec.domain.values) + ";")
    lines.append("sort GvName = struct "
                 + " | ".join(symbols[v] for v in out.spec.variables) + ";")
    lines.append("")

    lines.append("act")
    plain = sorted(namer.get("action", a) for a in out.spec.actions)
    if plain:
        lines.append("  " + ", ".join(plain) + ";")
    lines.append("  assign, assignG, assignP: GvName # GvValue;")
    lines.append("  value: GvName # GvValue;")
    check_sorts = " # ".join(["GvValue"] * len(out.slots)) + " # Bool"
    lines.append(f"  check, checkG, checkP: {check_sorts};")
    lines.append("")

    lines.append("proc")
    for name, params, body in out.menv.equations:
        rendered_body = _render_proc(body, namer, symbols)
        shown = namer.get("proc", name) if name != "Globs" else "Globs"
        if params:
            plist = ", ".join(f"{p}: GvValue" for p in params)
            lines.append(f"  {shown}({plist}) = {rendered_body};")
        else:
            lines.append(f"  {shown} = {rendered_body};")
    lines.append("")

    allow_names = ", ".join(
        name if name in {"value", "assign"} else namer.get("action", name)
        for name in out.allow_names)
    comm_part = ", ".join(
        "|".join(namer.get("action", n) if n not in MACHINERY_NAMES else n
                 for n in names) + " -> " + result
        for names, result in out.comm_render)
    hide_part = ", ".join(sorted(out.hidden))
    inner_par = out.top.body.body.body  # MAllow(MHide(MComm(parallel)))
    par = _render_proc(inner_par, namer, symbols, _M_CHOICE)
    lines.append(f"init allow({{{allow_names}}}, hide({{{hide_part}}}, "
                 f"comm({{{comm_part}}}, {par})));")
    return "\n".join(lines) + "\n"


def _mcf_action(label: str, namer: _Namer, symbols: dict[str, str]) -> str:
    if "(" not in label:
        return namer.get("action", label)
    name, rest = label.split("(", 1)
    args = rest.rstrip(")").split(",")
    shown = name if name in MACHINERY_NAMES else namer.get("action", name)
    return f"{shown}({', '.join(symbols.get(a, a) for a in args)})"


_F_OR, _F_AND, _F_UNARY = 0, 1, 2


def _render_mcf(formula: HmlFormula, namer: _Namer, symbols: dict[str, str],
                req: int = _F_OR) -> str:
    if isinstance(formula, HTrue):
        text, level = "true", _F_UNARY
    elif isinstance(formula, HFalse):
        text, level = "false", _F_UNARY
    elif isinstance(formula, Not):
        text = f"!{_render_mcf(formula.sub, namer, symbols, _F_UNARY)}"
        level = _F_UNARY
    elif isinstance(formula, And):
        text = (f"{_render_mcf(formula.left, namer, symbols, _F_AND)} && "
                f"{_render_mcf(formula.right, namer, symbols, _F_UNARY)}")
        level = _F_AND
    elif isinstance(formula, Or):
        text = (f"{_render_mcf(formula.left, namer, symbols, _F_OR)} || "
                f"{_render_mcf(formula.right, namer, symbols, _F_AND)}")
        level = _F_OR
    elif isinstance(formula, (Diamond, Box)):
        acts = " || ".join(sorted(
            _mcf_action(l, namer, symbols) for l in formula.labels))
        sub = _render_mcf(formula.sub, namer, symbols, _F_UNARY)
        if isinstance(formula, Diamond):
            text = f"<{acts}>{sub}"
        else:
            text = f"[{acts}]{sub}"
        level = _F_UNARY
    elif isinstance(formula, (Check, SetVar)):
        raise FragmentError(
            "emit translated formulas; check/set do not exist on the mCRL2 side")
    else:
        raise TypeError(f"not a formula: {formula!r}")
    if level < req:
        return f"({text})"
    return text


def render_mcf(formula: HmlFormula, out: TranslationOutput) -> str:
    """A single translated formula in mCRL2 modal-formula syntax."""
    namer = _build_namer(out)
    symbols = {v: namer.get("value", v) for v in out.spec.domain.values}
    symbols.update({v: namer.get("var", v) for v in out.spec.variables})
    return _render_mcf(formula, namer, symbols) + "\n"


def emit_mcrl2_files(out: TranslationOutput,
                     formulas: Sequence[HmlFormula] = (),
                     base: str = "model") -> dict[str, str]:
    """Translated model plus one .mcf per (already translated) formula."""
    files = {f"{base}.mcrl2": render_mcrl2_spec(out)}
    for i, formula in enumerate(formulas, start=1):
        files[f"{base}_prop{i}.mcf"] = render_mcf(formula, out)
    return files


def check_corollary1(spec: RecursiveSpec, p: ProcessExpr, q: ProcessExpr,
                     v1: Valuation, v2: Valuation,
                     cfg: ExplorationConfig = DEFAULT_CONFIG) -> Corollary1Report:
    """State-based bisimilarity of sources versus strong bisimilarity of
    their translations, on the joint translated LTS."""
    from .mcrl2 import explore_mcrl2

    source = state_based_bisim(spec, GvState(p, v1), GvState(q, v2), cfg)
    out_p = translate_init(spec, p, v1)
    out_q = translate_init(spec, q, v2)
    m_lts, (ip, iq) = explore_mcrl2(out_p.menv, [out_p.top, out_q.top], cfg)
    translated = strong_bisim(m_lts, ip, iq)
    return Corollary1Report(source=source, translated=translated)
