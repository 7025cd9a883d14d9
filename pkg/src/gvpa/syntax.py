"""Term language of the process algebra with global variables.

Process expressions, transition labels, valuations, recursive
specifications, the communication function, and the well-formedness
checks everything downstream relies on. All values are immutable; state
identity throughout the toolkit is structural equality of these terms.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product
from typing import Iterable, Mapping

from .errors import ResourceLimitError, SpecValidationError

#: Names that the concrete syntax reserves; they cannot be declared.
RESERVED_WORDS = frozenset(
    {"domain", "vars", "acts", "comm", "proc", "init", "with",
     "delta", "encap", "assign", "set", "true", "false"}
)


# ---------------------------------------------------------------------------
# Transition labels


@dataclass(frozen=True)
class Action:
    name: str


@dataclass(frozen=True)
class Assign:
    var: str
    value: str


TransitionLabel = Action | Assign


def label_str(label: TransitionLabel) -> str:
    """Canonical rendering, also used verbatim in .aut output."""
    if isinstance(label, Action):
        return label.name
    return f"assign({label.var},{label.value})"


def label_sort_key(label: TransitionLabel) -> tuple:
    if isinstance(label, Action):
        return (0, label.name, "")
    return (1, label.var, label.value)


# ---------------------------------------------------------------------------
# Process expressions


class ProcessExpr:
    """Base class; concrete nodes below mirror the grammar."""

    __slots__ = ()


@dataclass(frozen=True)
class Prefix(ProcessExpr):
    label: TransitionLabel
    body: ProcessExpr


@dataclass(frozen=True)
class Deadlock(ProcessExpr):
    pass


@dataclass(frozen=True)
class Choice(ProcessExpr):
    left: ProcessExpr
    right: ProcessExpr


@dataclass(frozen=True)
class Parallel(ProcessExpr):
    left: ProcessExpr
    right: ProcessExpr


@dataclass(frozen=True)
class Encap(ProcessExpr):
    blocked: frozenset[str]
    body: ProcessExpr


@dataclass(frozen=True)
class Name(ProcessExpr):
    name: str


@dataclass(frozen=True)
class Cond(ProcessExpr):
    var: str
    value: str
    body: ProcessExpr


DELTA = Deadlock()

# Rendering levels: choice is loosest, prefix-like operators are tightest.
_CHOICE, _PAR, _TIGHT = 0, 1, 2


def expr_str(expr: ProcessExpr, _req: int = _CHOICE) -> str:
    """Pretty-print so that reparsing yields a structurally identical AST."""
    if isinstance(expr, Deadlock):
        text, level = "delta", _TIGHT
    elif isinstance(expr, Name):
        text, level = expr.name, _TIGHT
    elif isinstance(expr, Prefix):
        text, level = f"{label_str(expr.label)}.{expr_str(expr.body, _TIGHT)}", _TIGHT
    elif isinstance(expr, Cond):
        text = f"({expr.var} = {expr.value}) -> {expr_str(expr.body, _TIGHT)}"
        level = _TIGHT
    elif isinstance(expr, Encap):
        inner = ", ".join(sorted(expr.blocked))
        text, level = f"encap({{{inner}}}) {expr_str(expr.body, _TIGHT)}", _TIGHT
    elif isinstance(expr, Parallel):
        text = f"{expr_str(expr.left, _PAR)} || {expr_str(expr.right, _TIGHT)}"
        level = _PAR
    elif isinstance(expr, Choice):
        text = f"{expr_str(expr.left, _CHOICE)} + {expr_str(expr.right, _PAR)}"
        level = _CHOICE
    else:
        raise TypeError(f"not a process expression: {expr!r}")
    if level < _req:
        return f"({text})"
    return text


# ---------------------------------------------------------------------------
# Domain, valuations


@dataclass(frozen=True)
class DomainDef:
    """The finite data domain D; declaration order is the iteration order."""

    values: tuple[str, ...]

    def __post_init__(self):
        if not self.values:
            raise SpecValidationError(["domain must not be empty"])
        if len(set(self.values)) != len(self.values):
            raise SpecValidationError(["domain values must be distinct"])

    def index(self, value: str) -> int:
        return self.values.index(value)

    def __contains__(self, value: str) -> bool:
        return value in self.values


@dataclass(frozen=True)
class Valuation:
    """Total map from the spec's variables to domain values.

    Entries are kept in variable declaration order so that equal
    valuations compare and hash equal.
    """

    entries: tuple[tuple[str, str], ...]

    @staticmethod
    def make(variables: Iterable[str], mapping: Mapping[str, str]) -> "Valuation":
        return Valuation(tuple((v, mapping[v]) for v in variables))

    def value_of(self, var: str) -> str:
        for v, d in self.entries:
            if v == var:
                return d
        raise KeyError(var)

    def updated(self, var: str, value: str) -> "Valuation":
        return Valuation(
            tuple((v, value if v == var else d) for v, d in self.entries)
        )

    def as_dict(self) -> dict[str, str]:
        return dict(self.entries)

    def __str__(self) -> str:
        return ",".join(f"{v}={d}" for v, d in self.entries) or "{}"


# ---------------------------------------------------------------------------
# Communication function


@dataclass(frozen=True)
class CommFunction:
    """ACP-style handshake communication: unordered action pair -> action."""

    entries: tuple[tuple[frozenset[str], str], ...] = ()
    _index: dict = field(init=False, repr=False, compare=False, default=None)

    def __post_init__(self):
        index = {}
        for key, result in self.entries:
            if key in index:
                pair = "|".join(sorted(key))
                raise SpecValidationError([f"duplicate comm entry for {pair}"])
            index[key] = result
        object.__setattr__(self, "_index", index)

    def lookup(self, a: str, b: str) -> str | None:
        return self._index.get(frozenset((a, b)))

    def is_empty(self) -> bool:
        return not self.entries


def validate_comm(comm: CommFunction, actions: Iterable[str]) -> list[str]:
    """Handshake and membership checks; returns a list of violations."""
    acts = set(actions)
    problems = []
    results = {result for _, result in comm.entries}
    for key, result in comm.entries:
        shown = "|".join(sorted(key)) + " -> " + result
        for name in key:
            if name not in acts:
                problems.append(f"comm entry {shown}: {name} is not a declared action")
        if result not in acts:
            problems.append(f"comm entry {shown}: result {result} is not a declared action")
        overlap = key & results
        for name in sorted(overlap):
            problems.append(
                f"comm entry {shown}: {name} is itself a communication result "
                "(handshake violation)"
            )
    return problems


# ---------------------------------------------------------------------------
# Recursive specifications


@dataclass(frozen=True)
class RecursiveSpec:
    """A full specification: domain, variables, actions, equations, gamma."""

    domain: DomainDef
    variables: tuple[str, ...]
    actions: tuple[str, ...]
    equations: tuple[tuple[str, ProcessExpr], ...]
    comm: CommFunction = CommFunction()
    _eqmap: dict = field(init=False, repr=False, compare=False, default=None)

    def __post_init__(self):
        eqmap = {}
        for name, body in self.equations:
            if name in eqmap:
                raise SpecValidationError([f"duplicate equation for {name}"])
            eqmap[name] = body
        object.__setattr__(self, "_eqmap", eqmap)

    @property
    def process_names(self) -> tuple[str, ...]:
        return tuple(name for name, _ in self.equations)

    def equation(self, name: str) -> ProcessExpr:
        return self._eqmap[name]

    def has_equation(self, name: str) -> bool:
        return name in self._eqmap


@dataclass(frozen=True)
class InitSpec:
    root: ProcessExpr
    valuation: Valuation


# ---------------------------------------------------------------------------
# Validators


def _walk_names(expr: ProcessExpr, guarded: bool, path: str, out: list):
    if isinstance(expr, Name):
        if not guarded:
            out.append((expr.name, path))
    elif isinstance(expr, Prefix):
        _walk_names(expr.body, True, path + "/body", out)
    elif isinstance(expr, (Cond, Encap)):
        _walk_names(expr.body, guarded, path + "/body", out)
    elif isinstance(expr, Choice):
        _walk_names(expr.left, guarded, path + "/left", out)
        _walk_names(expr.right, guarded, path + "/right", out)
    elif isinstance(expr, Parallel):
        _walk_names(expr.left, guarded, path + "/left", out)
        _walk_names(expr.right, guarded, path + "/right", out)


def validate_guardedness(spec: RecursiveSpec) -> list[str]:
    """Every process-name occurrence in every equation body must sit under
    an action prefix. Returns one entry per unguarded occurrence."""
    problems = []
    for name, body in spec.equations:
        found: list = []
        _walk_names(body, False, name, found)
        for used, path in found:
            problems.append(f"unguarded occurrence of {used} at {path}")
    return problems


def _check_expr_names(spec: RecursiveSpec, expr: ProcessExpr, where: str,
                      problems: list[str]):
    if isinstance(expr, Name):
        if not spec.has_equation(expr.name):
            problems.append(f"{where}: unknown process name {expr.name}")
    elif isinstance(expr, Prefix):
        label = expr.label
        if isinstance(label, Action):
            if label.name not in spec.actions:
                problems.append(f"{where}: unknown action {label.name}")
        else:
            if label.var not in spec.variables:
                problems.append(f"{where}: unknown variable {label.var}")
            if label.value not in spec.domain:
                problems.append(f"{where}: unknown value {label.value}")
        _check_expr_names(spec, expr.body, where, problems)
    elif isinstance(expr, Cond):
        if expr.var not in spec.variables:
            problems.append(f"{where}: unknown variable {expr.var}")
        if expr.value not in spec.domain:
            problems.append(f"{where}: unknown value {expr.value}")
        _check_expr_names(spec, expr.body, where, problems)
    elif isinstance(expr, Encap):
        for name in sorted(expr.blocked):
            if name not in spec.actions:
                problems.append(f"{where}: encap blocks unknown action {name}")
        _check_expr_names(spec, expr.body, where, problems)
    elif isinstance(expr, (Choice, Parallel)):
        _check_expr_names(spec, expr.left, where, problems)
        _check_expr_names(spec, expr.right, where, problems)


def validate_spec(spec: RecursiveSpec, init: InitSpec | None = None) -> list[str]:
    """Name resolution, comm checks and guardedness for a whole spec."""
    problems = []
    if len(set(spec.variables)) != len(spec.variables):
        problems.append("variable names must be distinct")
    if len(set(spec.actions)) != len(spec.actions):
        problems.append("action names must be distinct")
    for name in spec.variables:
        if name in spec.actions:
            problems.append(f"{name} is declared both as variable and action")
    problems.extend(validate_comm(spec.comm, spec.actions))
    for name, body in spec.equations:
        _check_expr_names(spec, body, f"proc {name}", problems)
    problems.extend(validate_guardedness(spec))
    if init is not None:
        _check_expr_names(spec, init.root, "init", problems)
        given = init.valuation.as_dict()
        for var in spec.variables:
            if var not in given:
                problems.append(f"init valuation misses variable {var}")
        for var, value in init.valuation.entries:
            if var not in spec.variables:
                problems.append(f"init valuation sets unknown variable {var}")
            elif value not in spec.domain:
                problems.append(f"init valuation: unknown value {value}")
    return problems


def require_valid(spec: RecursiveSpec, init: InitSpec | None = None):
    problems = validate_spec(spec, init)
    if problems:
        raise SpecValidationError(problems)


# ---------------------------------------------------------------------------
# Valuation enumeration


def enumerate_valuations(spec: RecursiveSpec, cap: int = 4096) -> tuple[Valuation, ...]:
    """All total valuations, lexicographic in (variable order, domain order)."""
    count = len(spec.domain.values) ** len(spec.variables)
    if count > cap:
        raise ResourceLimitError(
            f"valuation space has {count} elements, exceeding the cap of {cap}",
            limit=cap,
            reached=count,
        )
    combos = product(spec.domain.values, repeat=len(spec.variables))
    return tuple(Valuation(tuple(zip(spec.variables, combo))) for combo in combos)
