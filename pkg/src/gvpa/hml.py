"""Hennessy-Milner logic with valuation checks and valuation rewrites.

Formulas are evaluated over a grid state space: the reachable-expression
closure of the roots crossed with every valuation. The grid is the
smallest carrier closed under both transitions and the valuation rewrite
that the set operator performs, which may leave the reachable fragment.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .errors import FragmentError, SpecSyntaxError
from .parser import TokenStream, tokenize
from .sos import (
    DEFAULT_CONFIG, ExplorationConfig, GvState, Lts, reachable_exprs, state_str, step,
)
from .syntax import (
    Action, Assign, ProcessExpr, RecursiveSpec, TransitionLabel, Valuation,
    enumerate_valuations, label_str,
)


class HmlFormula:
    __slots__ = ()


@dataclass(frozen=True)
class HTrue(HmlFormula):
    pass


@dataclass(frozen=True)
class HFalse(HmlFormula):
    pass


@dataclass(frozen=True)
class Check(HmlFormula):
    var: str
    value: str


@dataclass(frozen=True)
class Not(HmlFormula):
    sub: HmlFormula


@dataclass(frozen=True)
class And(HmlFormula):
    left: HmlFormula
    right: HmlFormula


@dataclass(frozen=True)
class Or(HmlFormula):
    left: HmlFormula
    right: HmlFormula


@dataclass(frozen=True)
class Diamond(HmlFormula):
    labels: frozenset
    sub: HmlFormula

    def __post_init__(self):
        if not self.labels:
            raise ValueError("modal label set must be nonempty")


@dataclass(frozen=True)
class Box(HmlFormula):
    labels: frozenset
    sub: HmlFormula

    def __post_init__(self):
        if not self.labels:
            raise ValueError("modal label set must be nonempty")


@dataclass(frozen=True)
class SetVar(HmlFormula):
    var: str
    value: str
    sub: HmlFormula


TRUE = HTrue()
FALSE = HFalse()


def conjunction(parts: Sequence[HmlFormula]) -> HmlFormula:
    """Right-nested conjunction; empty input is `true`."""
    if not parts:
        return TRUE
    out = parts[-1]
    for part in reversed(parts[:-1]):
        out = And(part, out)
    return out


def set_all(valuation: Valuation, sub: HmlFormula) -> HmlFormula:
    """One set operator per variable, nested in declaration order."""
    out = sub
    for var, value in reversed(valuation.entries):
        out = SetVar(var, value, out)
    return out


def fragment(formula: HmlFormula) -> str:
    """One of HML, HML^check, HML^set, HML^check+set."""
    has_check = False
    has_set = False
    todo = [formula]
    while todo:
        node = todo.pop()
        if isinstance(node, Check):
            has_check = True
        elif isinstance(node, SetVar):
            has_set = True
            todo.append(node.sub)
        elif isinstance(node, Not):
            todo.append(node.sub)
        elif isinstance(node, (And, Or)):
            todo.extend((node.left, node.right))
        elif isinstance(node, (Diamond, Box)):
            todo.append(node.sub)
    if has_check and has_set:
        return "HML^check+set"
    if has_check:
        return "HML^check"
    if has_set:
        return "HML^set"
    return "HML"


def modal_depth(formula: HmlFormula) -> int:
    if isinstance(formula, (HTrue, HFalse, Check)):
        return 0
    if isinstance(formula, (Not, SetVar)):
        return modal_depth(formula.sub)
    if isinstance(formula, (And, Or)):
        return max(modal_depth(formula.left), modal_depth(formula.right))
    return 1 + modal_depth(formula.sub)


# ---------------------------------------------------------------------------
# Pretty printing

_OR, _AND, _UNARY = 0, 1, 2


def _labels_str(labels: frozenset) -> str:
    rendered = sorted(
        (label_str(l) if isinstance(l, (Action, Assign)) else str(l))
        for l in labels
    )
    return ",".join(rendered)


def formula_str(formula: HmlFormula, _req: int = _OR) -> str:
    if isinstance(formula, HTrue):
        text, level = "true", _UNARY
    elif isinstance(formula, HFalse):
        text, level = "false", _UNARY
    elif isinstance(formula, Check):
        text, level = f"({formula.var} = {formula.value})", _UNARY
    elif isinstance(formula, Not):
        text, level = f"!{formula_str(formula.sub, _UNARY)}", _UNARY
    elif isinstance(formula, Diamond):
        text = f"<{_labels_str(formula.labels)}> {formula_str(formula.sub, _UNARY)}"
        level = _UNARY
    elif isinstance(formula, Box):
        text = f"[{_labels_str(formula.labels)}] {formula_str(formula.sub, _UNARY)}"
        level = _UNARY
    elif isinstance(formula, SetVar):
        text = (f"set {formula.var} := {formula.value} . "
                f"{formula_str(formula.sub, _UNARY)}")
        level = _UNARY
    elif isinstance(formula, And):
        text = (f"{formula_str(formula.left, _AND)} && "
                f"{formula_str(formula.right, _UNARY)}")
        level = _AND
    elif isinstance(formula, Or):
        text = (f"{formula_str(formula.left, _OR)} || "
                f"{formula_str(formula.right, _AND)}")
        level = _OR
    else:
        raise TypeError(f"not a formula: {formula!r}")
    if level < _req:
        return f"({text})"
    return text


# ---------------------------------------------------------------------------
# Parsing


class _FormulaParser:
    def __init__(self, ts: TokenStream, spec: RecursiveSpec):
        self.ts = ts
        self.spec = spec

    def parse(self) -> HmlFormula:
        return self._or()

    def _or(self) -> HmlFormula:
        out = self._and()
        while self.ts.peek().kind == "BARBAR":
            self.ts.next()
            out = Or(out, self._and())
        return out

    def _and(self) -> HmlFormula:
        out = self._unary()
        while self.ts.peek().kind == "AMPAMP":
            self.ts.next()
            out = And(out, self._unary())
        return out

    def _unary(self) -> HmlFormula:
        tok = self.ts.peek()
        if tok.kind == "BANG":
            self.ts.next()
            return Not(self._unary())
        if tok.kind == "LT":
            self.ts.next()
            labels = self._label_set("GT")
            self.ts.expect("GT", "'>'")
            return Diamond(labels, self._unary())
        if tok.kind == "LBRACK":
            self.ts.next()
            labels = self._label_set("RBRACK")
            self.ts.expect("RBRACK", "']'")
            return Box(labels, self._unary())
        if tok.kind == "WORD" and tok.text == "set":
            self.ts.next()
            var = self.ts.expect("WORD", "variable name")
            if var.text not in self.spec.variables:
                raise SpecSyntaxError(f"unknown variable {var.text}", var.line, var.col)
            self.ts.expect("COLONEQ", "':='")
            value = self.ts.expect("WORD", "domain value")
            if value.text not in self.spec.domain:
                raise SpecSyntaxError(f"unknown value {value.text}",
                                      value.line, value.col)
            self.ts.expect("DOT", "'.'")
            return SetVar(var.text, value.text, self._unary())
        if tok.kind == "WORD" and tok.text == "true":
            self.ts.next()
            return TRUE
        if tok.kind == "WORD" and tok.text == "false":
            self.ts.next()
            return FALSE
        if tok.kind == "LPAREN":
            if (self.ts.peek(1).kind == "WORD"
                    and self.ts.peek(2).kind == "EQUALS"):
                self.ts.next()
                var = self.ts.expect("WORD", "variable name")
                if var.text not in self.spec.variables:
                    raise SpecSyntaxError(f"unknown variable {var.text}",
                                          var.line, var.col)
                self.ts.expect("EQUALS")
                value = self.ts.expect("WORD", "domain value")
                if value.text not in self.spec.domain:
                    raise SpecSyntaxError(f"unknown value {value.text}",
                                          value.line, value.col)
                self.ts.expect("RPAREN")
                return Check(var.text, value.text)
            self.ts.next()
            out = self._or()
            self.ts.expect("RPAREN")
            return out
        raise SpecSyntaxError(
            f"found {tok.text!r}" if tok.kind != "EOF" else "unexpected end of input",
            tok.line, tok.col, expected=("formula",),
        )

    def _label_set(self, closing: str) -> frozenset:
        tok = self.ts.peek()
        if tok.kind == closing:
            raise SpecSyntaxError("modal label set must be nonempty",
                                  tok.line, tok.col, expected=("transition label",))
        labels: list[TransitionLabel] = []
        while True:
            labels.extend(self._label())
            if self.ts.peek().kind != "COMMA":
                break
            self.ts.next()
        return frozenset(labels)

    def _label(self) -> list[TransitionLabel]:
        tok = self.ts.peek()
        if tok.kind == "STAR":
            self.ts.next()
            return list(all_labels(self.spec))
        word = self.ts.expect("WORD", "transition label")
        if word.text == "assign":
            self.ts.expect("LPAREN")
            var = self.ts.expect("WORD", "variable name")
            if var.text not in self.spec.variables:
                raise SpecSyntaxError(f"unknown variable {var.text}", var.line, var.col)
            self.ts.expect("COMMA")
            value = self.ts.expect("WORD", "domain value")
            if value.text not in self.spec.domain:
                raise SpecSyntaxError(f"unknown value {value.text}",
                                      value.line, value.col)
            self.ts.expect("RPAREN")
            return [Assign(var.text, value.text)]
        if word.text not in self.spec.actions:
            raise SpecSyntaxError(f"unknown action {word.text}", word.line, word.col)
        return [Action(word.text)]


def all_labels(spec: RecursiveSpec) -> tuple[TransitionLabel, ...]:
    """The full label alphabet TL of a spec, in declaration order."""
    out: list[TransitionLabel] = [Action(a) for a in spec.actions]
    for var in spec.variables:
        for value in spec.domain.values:
            out.append(Assign(var, value))
    return tuple(out)


def parse_formula(text: str, spec: RecursiveSpec) -> HmlFormula:
    ts = TokenStream(tokenize(text))
    out = _FormulaParser(ts, spec).parse()
    ts.expect("EOF", "end of formula")
    return out


# ---------------------------------------------------------------------------
# State space and evaluation


@dataclass(frozen=True)
class StateSpace:
    """Expression closure x full valuation grid, with its transitions."""

    spec: RecursiveSpec
    exprs: tuple[ProcessExpr, ...]
    valuations: tuple[Valuation, ...]
    states: tuple[GvState, ...]
    transitions: tuple[tuple[tuple[TransitionLabel, int], ...], ...]
    _expr_index: dict = field(init=False, repr=False, compare=False, default=None)
    _val_index: dict = field(init=False, repr=False, compare=False, default=None)
    _rewrites: dict = field(init=False, repr=False, compare=False, default=None)

    def __post_init__(self):
        object.__setattr__(self, "_expr_index",
                           {e: i for i, e in enumerate(self.exprs)})
        object.__setattr__(self, "_val_index",
                           {v: i for i, v in enumerate(self.valuations)})
        object.__setattr__(self, "_rewrites", {})

    def index_of(self, state: GvState) -> int:
        try:
            e_i = self._expr_index[state.expr]
            v_i = self._val_index[state.valuation]
        except KeyError:
            raise KeyError(f"state outside the grid: {state_str(state)}") from None
        return e_i * len(self.valuations) + v_i

    def rewrite_index(self, index: int, var: str, value: str) -> int:
        nv = len(self.valuations)
        v_i = index % nv
        key = (v_i, var, value)
        target = self._rewrites.get(key)
        if target is None:
            target = self._val_index[self.valuations[v_i].updated(var, value)]
            self._rewrites[key] = target
        return (index // nv) * nv + target

    @property
    def all_indices(self) -> frozenset[int]:
        return frozenset(range(len(self.states)))


def build_state_space(spec: RecursiveSpec,
                      roots: ProcessExpr | Iterable[ProcessExpr],
                      cfg: ExplorationConfig = DEFAULT_CONFIG) -> StateSpace:
    exprs = reachable_exprs(spec, roots, cfg)
    valuations = enumerate_valuations(spec, cfg.max_valuations)
    expr_index = {e: i for i, e in enumerate(exprs)}
    val_index = {v: i for i, v in enumerate(valuations)}
    nv = len(valuations)
    states = tuple(GvState(e, v) for e in exprs for v in valuations)
    transitions = []
    for state in states:
        row = []
        for label, target in step(spec, state):
            j = expr_index[target.expr] * nv + val_index[target.valuation]
            row.append((label, j))
        transitions.append(tuple(row))
    return StateSpace(spec=spec, exprs=exprs, valuations=valuations,
                      states=states, transitions=tuple(transitions))


def eval_formula(space: StateSpace, formula: HmlFormula,
                 _memo: dict | None = None) -> frozenset[int]:
    """Denotation of a formula on the grid, memoized on subformulas."""
    memo = _memo if _memo is not None else {}
    if formula in memo:
        return memo[formula]
    n = len(space.states)
    if isinstance(formula, HTrue):
        out = space.all_indices
    elif isinstance(formula, HFalse):
        out = frozenset()
    elif isinstance(formula, Check):
        out = frozenset(
            i for i in range(n)
            if space.states[i].valuation.value_of(formula.var) == formula.value)
    elif isinstance(formula, Not):
        out = space.all_indices - eval_formula(space, formula.sub, memo)
    elif isinstance(formula, And):
        out = (eval_formula(space, formula.left, memo)
               & eval_formula(space, formula.right, memo))
    elif isinstance(formula, Or):
        out = (eval_formula(space, formula.left, memo)
               | eval_formula(space, formula.right, memo))
    elif isinstance(formula, Diamond):
        sub = eval_formula(space, formula.sub, memo)
        out = frozenset(
            i for i in range(n)
            if any(label in formula.labels and j in sub
                   for label, j in space.transitions[i]))
    elif isinstance(formula, Box):
        sub = eval_formula(space, formula.sub, memo)
        out = frozenset(
            i for i in range(n)
            if all(label not in formula.labels or j in sub
                   for label, j in space.transitions[i]))
    elif isinstance(formula, SetVar):
        sub = eval_formula(space, formula.sub, memo)
        out = frozenset(
            i for i in range(n)
            if space.rewrite_index(i, formula.var, formula.value) in sub)
    else:
        raise TypeError(f"not a formula: {formula!r}")
    memo[formula] = out
    return out


def satisfies(space: StateSpace, state: GvState, formula: HmlFormula) -> bool:
    return space.index_of(state) in eval_formula(space, formula)


def eval_modal_on_lts(lts: Lts, formula: HmlFormula,
                      _memo: dict | None = None) -> frozenset[int]:
    """Plain modal evaluation on an arbitrary LTS (no check, no set).

    Used on the translated side, where labels are canonical multi-action
    strings and states carry no valuation.
    """
    memo = _memo if _memo is not None else {}
    if formula in memo:
        return memo[formula]
    n = len(lts.states)
    everything = frozenset(range(n))
    if isinstance(formula, HTrue):
        out = everything
    elif isinstance(formula, HFalse):
        out = frozenset()
    elif isinstance(formula, Not):
        out = everything - eval_modal_on_lts(lts, formula.sub, memo)
    elif isinstance(formula, And):
        out = (eval_modal_on_lts(lts, formula.left, memo)
               & eval_modal_on_lts(lts, formula.right, memo))
    elif isinstance(formula, Or):
        out = (eval_modal_on_lts(lts, formula.left, memo)
               | eval_modal_on_lts(lts, formula.right, memo))
    elif isinstance(formula, Diamond):
        sub = eval_modal_on_lts(lts, formula.sub, memo)
        out = frozenset(
            i for i in range(n)
            if any(label in formula.labels and j in sub
                   for label, j in lts.successors(i)))
    elif isinstance(formula, Box):
        sub = eval_modal_on_lts(lts, formula.sub, memo)
        out = frozenset(
            i for i in range(n)
            if all(label not in formula.labels or j in sub
                   for label, j in lts.successors(i)))
    elif isinstance(formula, (Check, SetVar)):
        raise FragmentError(
            "check/set operators are not defined on plain LTSs")
    else:
        raise TypeError(f"not a formula: {formula!r}")
    memo[formula] = out
    return out
