"""Seeded random generators for test corpora.

Two families: small guarded specs over the full grammar (for the
equivalence/logic criteria) and parallel-sequential single-variable specs
(for the translation criteria). The parallel-sequential generator never
puts a condition directly over delta and never nests conditions, so the
translated state map stays injective and the structure-preservation
counts are meaningful.
"""
from __future__ import annotations

import random

from gvpa.errors import ResourceLimitError
from gvpa.sos import ExplorationConfig, GvState, explore, reachable_exprs
from gvpa.syntax import (
    Action, Assign, Choice, CommFunction, Cond, Deadlock, DomainDef, Encap,
    Name, Parallel, Prefix, RecursiveSpec, enumerate_valuations,
    validate_spec,
)

_ACTIONS = ("a", "b", "c")
_VARS = ("u", "v")
_VALUES = ("0", "1", "2")
_NAMES = ("X", "Y", "Z")


def _label(rng: random.Random, spec_parts):
    actions, variables, values = spec_parts
    if variables and rng.random() < 0.35:
        return Assign(rng.choice(variables), rng.choice(values))
    return Action(rng.choice(actions))


def gen_expr(rng: random.Random, spec_parts, depth: int, guarded: bool,
             names: tuple[str, ...]):
    """Random expression; process names appear only under a prefix."""
    actions, variables, values = spec_parts
    if depth <= 0:
        if guarded and names and rng.random() < 0.5:
            return Name(rng.choice(names))
        return Deadlock()
    roll = rng.random()
    if roll < 0.40:
        return Prefix(_label(rng, spec_parts),
                      gen_expr(rng, spec_parts, depth - 1, True, names))
    if roll < 0.58:
        return Choice(gen_expr(rng, spec_parts, depth - 1, guarded, names),
                      gen_expr(rng, spec_parts, depth - 1, guarded, names))
    if roll < 0.70 and variables:
        return Cond(rng.choice(variables), rng.choice(values),
                    gen_expr(rng, spec_parts, depth - 1, guarded, names))
    if roll < 0.80:
        return Parallel(gen_expr(rng, spec_parts, depth - 1, guarded, names),
                        gen_expr(rng, spec_parts, depth - 1, guarded, names))
    if roll < 0.85 and actions:
        blocked = frozenset(rng.sample(actions, rng.randint(1, len(actions))))
        return Encap(blocked, gen_expr(rng, spec_parts, depth - 1, guarded, names))
    if guarded and names and roll < 0.95:
        return Name(rng.choice(names))
    return Deadlock()


def gen_spec(rng: random.Random, max_names: int = 3, max_vars: int = 2,
             max_domain: int = 3, closure_cap: int = 50) -> RecursiveSpec:
    """A random guarded spec whose name closures stay under the cap."""
    for _ in range(60):
        n_actions = rng.randint(1, 3)
        actions = _ACTIONS[:n_actions]
        n_vars = rng.randint(1, max_vars)
        variables = _VARS[:n_vars]
        n_values = rng.randint(2, max_domain)
        values = _VALUES[:n_values]
        comm_entries = ()
        if n_actions == 3 and rng.random() < 0.4:
            comm_entries = ((frozenset(("a", "b")), "c"),)
        n_names = rng.randint(1, max_names)
        names = _NAMES[:n_names]
        parts = (actions, variables, values)
        equations = tuple(
            (name, gen_expr(rng, parts, rng.randint(1, 3), False, names))
            for name in names)
        spec = RecursiveSpec(
            domain=DomainDef(values), variables=variables, actions=actions,
            equations=equations, comm=CommFunction(comm_entries))
        if validate_spec(spec):
            continue
        try:
            reachable_exprs(spec, [Name(n) for n in names],
                            ExplorationConfig(max_states=closure_cap))
        except ResourceLimitError:
            continue
        return spec
    raise AssertionError("generator failed to produce a small guarded spec")


def gen_pair(rng: random.Random, spec: RecursiveSpec, closure_cap: int = 50):
    """Two expressions to compare; roughly half the draws are equivalent
    by construction (p against a stuttered copy)."""
    parts = (spec.actions, spec.variables, spec.domain.values)
    names = spec.process_names
    for _ in range(40):
        p = gen_expr(rng, parts, rng.randint(1, 3), False, names)
        roll = rng.random()
        if roll < 0.25:
            q = Choice(p, p)
        elif roll < 0.4:
            q = rng.choice((Parallel(p, Deadlock()), Choice(p, Deadlock())))
        else:
            q = gen_expr(rng, parts, rng.randint(1, 3), False, names)
        try:
            closure = reachable_exprs(spec, [p, q],
                                      ExplorationConfig(max_states=closure_cap))
        except ResourceLimitError:
            continue
        if len(closure) <= closure_cap:
            return p, q
    raise AssertionError("generator failed to produce a comparable pair")


# ---------------------------------------------------------------------------
# Parallel-sequential corpus (translation criteria)


def _gen_seq(rng: random.Random, parts, depth: int, names):
    """Sequential grammar with the chi-injectivity discipline."""
    actions, variables, values = parts
    roll = rng.random()
    if depth <= 0 or roll < 0.15:
        return Deadlock()
    if roll < 0.60:
        if names and rng.random() < 0.3:
            body = Name(rng.choice(names))
        else:
            body = _gen_seq(rng, parts, depth - 1, names)
        return Prefix(_label(rng, parts), body)
    if roll < 0.80:
        return Choice(_gen_seq(rng, parts, depth - 1, names),
                      _gen_seq(rng, parts, depth - 1, names))
    # condition body must start with a prefix or a choice of prefixes
    guarded_body = Prefix(_label(rng, parts),
                          _gen_seq(rng, parts, depth - 1, names))
    if rng.random() < 0.3:
        guarded_body = Choice(
            guarded_body,
            Prefix(_label(rng, parts), _gen_seq(rng, parts, depth - 1, names)))
    return Cond(rng.choice(variables), rng.choice(values), guarded_body)


def gen_parseq_spec(rng: random.Random, state_cap: int = 60,
                    n_vars: int = 1):
    """A parallel-sequential spec plus an (optionally encapsulated) root
    and an initial valuation; the reachable LTS stays under the cap."""
    for _ in range(80):
        n_actions = rng.randint(2, 3)
        actions = _ACTIONS[:n_actions]
        variables = _VARS[:n_vars]
        values = _VALUES[:rng.randint(2, 3)]
        comm_entries = ()
        if n_actions == 3 and rng.random() < 0.35:
            comm_entries = ((frozenset(("a", "b")), "c"),)
        names = _NAMES[:rng.randint(0, 2)]
        parts = (actions, variables, values)
        equations = tuple(
            (name, Prefix(_label(rng, parts), _gen_seq(rng, parts, 2, names)))
            for name in names)
        spec = RecursiveSpec(
            domain=DomainDef(values), variables=variables, actions=actions,
            equations=equations, comm=CommFunction(comm_entries))
        if validate_spec(spec):
            continue
        components = [
            Name(rng.choice(names)) if names and rng.random() < 0.35
            else _gen_seq(rng, parts, rng.randint(1, 3), names)
            for _ in range(rng.randint(1, 3))]
        root = components[0]
        for comp in components[1:]:
            root = Parallel(root, comp)
        if rng.random() < 0.3:
            blocked = frozenset(rng.sample(actions, rng.randint(1, len(actions))))
            root = Encap(blocked, root)
        valuation = rng.choice(enumerate_valuations(spec))
        try:
            lts, _ = explore(spec, [GvState(root, valuation)],
                             ExplorationConfig(max_states=state_cap))
        except ResourceLimitError:
            continue
        if len(lts.transitions) == 0 and rng.random() < 0.8:
            continue  # keep mostly live systems
        return spec, root, valuation
    raise AssertionError("generator failed to produce a parallel-sequential spec")
