"""Strong, state-based and stateless bisimilarity, plus synthesis of
distinguishing formulas from the refinement fixpoint.

All three equivalences run on signature-based partition refinement where
round k of the history equals bisimilarity up to depth k (seeded by the
initial partition). Stateless bisimilarity is strong bisimilarity on the
expression-level system whose labels are (valuation, label) pairs: the
matching clause of its definition quantifies over every valuation and
fixes the target valuation, which that label encodes.
"""
from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Sequence

from .errors import ContractViolationError
from .hml import Check, Diamond, HmlFormula, Not, conjunction, set_all
from .sos import DEFAULT_CONFIG, ExplorationConfig, GvState, Lts, explore, step
from .syntax import (
    ProcessExpr, RecursiveSpec, Valuation, enumerate_valuations,
)


# ---------------------------------------------------------------------------
# Partition refinement


def refinement_history(n_states: int,
                       adjacency: Sequence[Sequence[tuple]],
                       initial_blocks: Sequence[int]) -> list[list[int]]:
    """Rounds of signature refinement until stable.

    ``history[k][s]`` is the block of state ``s`` after k full sweeps;
    states share a block at round k iff no formula of modal depth <= k
    (over the seeded atoms) tells them apart.
    """
    history = [list(initial_blocks)]
    current = history[0]
    while True:
        ids: dict = {}
        nxt = []
        for s in range(n_states):
            signature = frozenset(
                (label, current[t]) for label, t in adjacency[s])
            key = (current[s], signature)
            if key not in ids:
                ids[key] = len(ids)
            nxt.append(ids[key])
        if len(ids) == len(set(current)):
            break
        history.append(nxt)
        current = nxt
    return history


def _rank(history, s: int, t: int) -> int | None:
    for k, blocks in enumerate(history):
        if blocks[s] != blocks[t]:
            return k
    return None


def _in_relation(history, s: int, t: int, level: int) -> bool:
    blocks = history[min(level, len(history) - 1)]
    return blocks[s] == blocks[t]


def _blocks_of(ids: Sequence[int]) -> tuple[frozenset[int], ...]:
    out: dict[int, set[int]] = {}
    for state, block in enumerate(ids):
        out.setdefault(block, set()).add(state)
    return tuple(frozenset(out[b]) for b in sorted(out))


# ---------------------------------------------------------------------------
# Strong bisimilarity


@dataclass
class StrongResult:
    equivalent: bool
    left: int
    right: int
    rounds: int
    blocks: tuple[frozenset[int], ...]
    history: list[list[int]]

    @property
    def relation_size(self) -> int:
        return sum(len(b) * (len(b) + 1) // 2 for b in self.blocks)


def strong_bisim(lts: Lts, s: int, t: int) -> StrongResult:
    """Coarsest strong bisimulation on a finite LTS, via refinement."""
    adjacency = [lts.successors(i) for i in range(len(lts.states))]
    history = refinement_history(len(lts.states), adjacency, [0] * len(lts.states))
    final = history[-1]
    return StrongResult(
        equivalent=final[s] == final[t],
        left=s, right=t,
        rounds=len(history) - 1,
        blocks=_blocks_of(final),
        history=history,
    )


# ---------------------------------------------------------------------------
# State-based bisimilarity


@dataclass
class StateBasedResult:
    equivalent: bool
    lts: Lts
    left: int
    right: int
    rounds: int
    blocks: tuple[frozenset[int], ...]
    history: list[list[int]]

    @property
    def relation_size(self) -> int:
        return sum(len(b) * (len(b) + 1) // 2 for b in self.blocks)

    def related_pairs(self) -> frozenset:
        pairs = set()
        for block in self.blocks:
            for a, b in combinations(sorted(block), 2):
                pairs.add((self.lts.states[a], self.lts.states[b]))
        return frozenset(pairs)


def _valuation_seeded_history(lts: Lts) -> list[list[int]]:
    seen: dict[Valuation, int] = {}
    initial = []
    for state in lts.states:
        v = state.valuation
        if v not in seen:
            seen[v] = len(seen)
        initial.append(seen[v])
    adjacency = [lts.successors(i) for i in range(len(lts.states))]
    return refinement_history(len(lts.states), adjacency, initial)


def state_based_bisim(spec: RecursiveSpec, s: GvState, t: GvState,
                      cfg: ExplorationConfig = DEFAULT_CONFIG) -> StateBasedResult:
    """Greatest fixpoint of Definition 5 on the joint reachable LTS; the
    initial partition splits states by their full valuation."""
    lts, (si, ti) = explore(spec, [s, t], cfg)
    history = _valuation_seeded_history(lts)
    final = history[-1]
    return StateBasedResult(
        equivalent=final[si] == final[ti],
        lts=lts, left=si, right=ti,
        rounds=len(history) - 1,
        blocks=_blocks_of(final),
        history=history,
    )


# ---------------------------------------------------------------------------
# Stateless bisimilarity


@dataclass
class StatelessResult:
    equivalent: bool
    exprs: tuple[ProcessExpr, ...]
    valuations: tuple[Valuation, ...]
    left: int
    right: int
    rounds: int
    blocks: tuple[frozenset[int], ...]
    history: list[list[int]]

    @property
    def relation_size(self) -> int:
        return sum(len(b) * (len(b) + 1) // 2 for b in self.blocks)

    def related_pairs(self) -> frozenset:
        pairs = set()
        for block in self.blocks:
            members = sorted(block)
            for a in members:
                pairs.add(frozenset({self.exprs[a]}))
            for a, b in combinations(members, 2):
                pairs.add(frozenset({self.exprs[a], self.exprs[b]}))
        return frozenset(pairs)


def _stateless_structure(spec: RecursiveSpec, roots: Sequence[ProcessExpr],
                         cfg: ExplorationConfig):
    from .sos import reachable_exprs

    exprs = reachable_exprs(spec, roots, cfg)
    index = {e: i for i, e in enumerate(exprs)}
    valuations = enumerate_valuations(spec, cfg.max_valuations)
    adjacency = []
    for expr in exprs:
        row = []
        for valuation in valuations:
            for label, target in step(spec, GvState(expr, valuation)):
                row.append(((valuation, label), index[target.expr]))
        adjacency.append(row)
    return exprs, index, valuations, adjacency


def stateless_bisim(spec: RecursiveSpec, p: ProcessExpr, q: ProcessExpr,
                    cfg: ExplorationConfig = DEFAULT_CONFIG) -> StatelessResult:
    """Greatest fixpoint of Definition 3, by valuation enumeration."""
    exprs, index, valuations, adjacency = _stateless_structure(spec, [p, q], cfg)
    history = refinement_history(len(exprs), adjacency, [0] * len(exprs))
    final = history[-1]
    return StatelessResult(
        equivalent=final[index[p]] == final[index[q]],
        exprs=exprs, valuations=valuations,
        left=index[p], right=index[q],
        rounds=len(history) - 1,
        blocks=_blocks_of(final),
        history=history,
    )


# ---------------------------------------------------------------------------
# Distinguishing formulas


def _first_difference(a: Valuation, b: Valuation) -> str:
    for (var, left), (_, right) in zip(a.entries, b.entries):
        if left != right:
            return var
    raise ValueError("valuations do not differ")


def distinguishing_formula_stateless(
        spec: RecursiveSpec, p: ProcessExpr, q: ProcessExpr,
        cfg: ExplorationConfig = DEFAULT_CONFIG,
        at: Valuation | None = None) -> tuple[HmlFormula, Valuation]:
    """A formula/valuation pair with ``<p,V> |= phi`` and ``<q,V> |/= phi``.

    Mirrors the refutation construction behind the stateless
    correspondence theorem: an unmatched move yields a diamond over a
    conjunction of refutations, each either a check on a differing target
    valuation or a set-all-wrapped recursive formula. When ``at`` pins the
    evaluation valuation, the result is wrapped so the split holds there.
    """
    exprs, index, valuations, adjacency = _stateless_structure(spec, [p, q], cfg)
    history = refinement_history(len(exprs), adjacency, [0] * len(exprs))
    if _rank(history, index[p], index[q]) is None:
        raise ContractViolationError(
            "distinguishing formula requested for stateless-bisimilar expressions")

    memo: dict = {}

    def one_sided(a: ProcessExpr, b: ProcessExpr, k: int):
        """A failing move of `a` that `b` cannot match into round k-1."""
        for valuation in valuations:
            b_moves = step(spec, GvState(b, valuation))
            for label, target in step(spec, GvState(a, valuation)):
                partners = [(l, u) for l, u in b_moves if l == label]
                if any(u.valuation == target.valuation
                       and _in_relation(history, index[target.expr],
                                        index[u.expr], k - 1)
                       for _, u in partners):
                    continue
                refutes = []
                for _, u in partners:
                    if u.valuation != target.valuation:
                        var = _first_difference(target.valuation, u.valuation)
                        refutes.append(Check(var, target.valuation.value_of(var)))
                    else:
                        phi_i, v_i = distinguish(target.expr, u.expr)
                        refutes.append(set_all(v_i, phi_i))
                body = conjunction(list(dict.fromkeys(refutes)))
                return Diamond(frozenset({label}), body), valuation
        return None

    def distinguish(a: ProcessExpr, b: ProcessExpr) -> tuple[HmlFormula, Valuation]:
        key = (a, b)
        if key in memo:
            return memo[key]
        k = _rank(history, index[a], index[b])
        assert k is not None and k >= 1
        found = one_sided(a, b, k)
        if found is None:
            # a rank-k split guarantees a failing move on one of the sides
            flipped = one_sided(b, a, k)
            assert flipped is not None
            found = (Not(flipped[0]), flipped[1])
        memo[key] = found
        return found

    formula, witness = distinguish(p, q)
    if at is not None and at != witness:
        return set_all(witness, formula), at
    return formula, witness


def distinguishing_formula_state_based(
        spec: RecursiveSpec, s: GvState, t: GvState,
        cfg: ExplorationConfig = DEFAULT_CONFIG) -> HmlFormula:
    """A check-only formula holding at `s` and failing at `t`.

    Root pairs with differing valuations get a bare check; otherwise an
    unmatched move yields a diamond over recursive refutations.
    """
    lts, (si, ti) = explore(spec, [s, t], cfg)
    history = _valuation_seeded_history(lts)
    if _rank(history, si, ti) is None:
        raise ContractViolationError(
            "distinguishing formula requested for state-based-bisimilar states")

    memo: dict = {}

    def one_sided(a: int, b: int, k: int):
        b_moves = lts.successors(b)
        for label, target in lts.successors(a):
            partners = [u for l, u in b_moves if l == label]
            if any(_in_relation(history, target, u, k - 1) for u in partners):
                continue
            refutes = [distinguish(target, u) for u in partners]
            return Diamond(frozenset({label}),
                           conjunction(list(dict.fromkeys(refutes))))
        return None

    def distinguish(a: int, b: int) -> HmlFormula:
        key = (a, b)
        if key in memo:
            return memo[key]
        va = lts.states[a].valuation
        vb = lts.states[b].valuation
        if va != vb:
            var = _first_difference(va, vb)
            found: HmlFormula = Check(var, va.value_of(var))
        else:
            k = _rank(history, a, b)
            assert k is not None and k >= 1
            found = one_sided(a, b, k)
            if found is None:
                flipped = one_sided(b, a, k)
                assert flipped is not None
                found = Not(flipped)
        memo[key] = found
        return found

    return distinguish(si, ti)
