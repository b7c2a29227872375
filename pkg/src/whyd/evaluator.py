"""Bottom-up evaluation of positive Datalog to the minimal model.

The production path is semi-naive (per-predicate delta sets, joins in
textual body order).  ``naive_fixpoint`` is an intentionally separate
reference implementation used by agreement tests and the brute-force
oracles; keep the two code paths independent.

Termination is guaranteed: the active domain is finite and rules are
positive, so the model can only grow and is bounded by the set of all
ground atoms over known predicates and constants.
"""

from __future__ import annotations

from typing import Iterable, Mapping

from .errors import NotAnAnswerError, UnknownPredicateError
from .model import (
    Atom,
    Comparison,
    Constant,
    GroundAtom,
    Instance,
    Program,
    Rule,
    Variable,
)


class MinimalModel:
    """The least set of ground atoms closed under the program's rules.

    ``round_of`` maps each atom to the first iteration in which it was
    derived; input facts (and unconditional program facts) are round 0.
    """

    __slots__ = ("relations", "round_of")

    def __init__(self, relations: Mapping[str, frozenset[GroundAtom]], round_of: Mapping[GroundAtom, int]):
        self.relations = dict(relations)
        self.round_of = dict(round_of)

    def atoms(self) -> frozenset[GroundAtom]:
        out: set[GroundAtom] = set()
        for rel in self.relations.values():
            out |= rel
        return frozenset(out)

    def __contains__(self, atom: GroundAtom) -> bool:
        return atom in self.relations.get(atom.predicate, frozenset())

    def extension(self, predicate: str) -> frozenset[GroundAtom]:
        return self.relations.get(predicate, frozenset())


def _strip_labels(atoms: Iterable[GroundAtom]) -> list[GroundAtom]:
    return [a if a.label is None else GroundAtom(a.predicate, a.args) for a in atoms]


def _match(pattern: Atom, fact: GroundAtom, binding: dict[Variable, Constant]) -> dict[Variable, Constant] | None:
    """Extend ``binding`` so that pattern matches fact, or None."""
    if len(pattern.args) != len(fact.args):
        return None
    new = binding
    copied = False
    for term, value in zip(pattern.args, fact.args):
        if isinstance(term, Constant):
            if term != value:
                return None
        else:
            bound = new.get(term)
            if bound is None:
                if not copied:
                    new = dict(new)
                    copied = True
                new[term] = value
            elif bound != value:
                return None
    return new


def _comparison_ready(cmp_: Comparison, binding: dict[Variable, Constant]) -> bool:
    return all(isinstance(t, Constant) or t in binding for t in (cmp_.left, cmp_.right))


def _comparison_holds(cmp_: Comparison, binding: dict[Variable, Constant]) -> bool:
    left = cmp_.left if isinstance(cmp_.left, Constant) else binding[cmp_.left]
    right = cmp_.right if isinstance(cmp_.right, Constant) else binding[cmp_.right]
    return cmp_.holds(left, right)


def _instantiate(head: Atom, binding: dict[Variable, Constant]) -> GroundAtom:
    return GroundAtom(head.predicate, tuple(t if isinstance(t, Constant) else binding[t] for t in head.args))


def _join_rule(
    rule: Rule,
    relations: Mapping[str, set[GroundAtom]],
    delta_position: int | None,
    delta: Mapping[str, set[GroundAtom]] | None,
) -> set[GroundAtom]:
    """All head instantiations of ``rule``; when ``delta_position`` is
    given, that body atom ranges over the delta relation instead of the
    full one.  Comparisons are checked as soon as both sides are bound
    (safety guarantees they are bound by the end of the body)."""
    atoms: list[tuple[int, Atom]] = [(i, b) for i, b in enumerate(rule.body) if isinstance(b, Atom)]
    comparisons: list[tuple[int, Comparison]] = [(i, b) for i, b in enumerate(rule.body) if isinstance(b, Comparison)]
    derived: set[GroundAtom] = set()

    def descend(pos: int, binding: dict[Variable, Constant], pending: list[tuple[int, Comparison]]) -> None:
        still_pending = []
        for idx, cmp_ in pending:
            if _comparison_ready(cmp_, binding):
                if not _comparison_holds(cmp_, binding):
                    return
            else:
                still_pending.append((idx, cmp_))
        if pos == len(atoms):
            if still_pending:
                return  # unreachable for safe rules
            derived.add(_instantiate(rule.head, binding))
            return
        body_index, pattern = atoms[pos]
        if delta_position is not None and body_index == delta_position:
            source = delta.get(pattern.predicate, set()) if delta else set()
        else:
            source = relations.get(pattern.predicate, set())
        for fact in source:
            extended = _match(pattern, fact, binding)
            if extended is not None:
                descend(pos + 1, extended, still_pending)

    descend(0, {}, comparisons)
    return derived


def evaluate_fixpoint(program: Program, instance: Instance | Iterable[GroundAtom]) -> MinimalModel:
    """Least fixpoint of ``program`` over the given facts (semi-naive).

    Facts may mention intensional predicates; they simply seed the model,
    which is what the abduction-to-causality constructions rely on.
    """
    base = instance.atoms if isinstance(instance, Instance) else frozenset(instance)
    relations: dict[str, set[GroundAtom]] = {}
    round_of: dict[GroundAtom, int] = {}
    for atom in _strip_labels(base):
        relations.setdefault(atom.predicate, set()).add(atom)
        round_of[atom] = 0
    for rule in program.rules:
        if rule.is_fact():
            fact = _instantiate(rule.head, {})
            if fact not in round_of:
                relations.setdefault(fact.predicate, set()).add(fact)
                round_of[fact] = 0

    proper_rules = [r for r in program.rules if not r.is_fact()]
    delta: dict[str, set[GroundAtom]] = {p: set(rel) for p, rel in relations.items()}
    iteration = 0
    while delta:
        iteration += 1
        produced: set[GroundAtom] = set()
        for rule in proper_rules:
            for body_index, item in enumerate(rule.body):
                if not isinstance(item, Atom) or item.predicate not in delta:
                    continue
                produced |= _join_rule(rule, relations, body_index, delta)
        fresh = {a for a in produced if a not in round_of}
        delta = {}
        for atom in fresh:
            relations.setdefault(atom.predicate, set()).add(atom)
            round_of[atom] = iteration
            delta.setdefault(atom.predicate, set()).add(atom)

    frozen = {p: frozenset(rel) for p, rel in relations.items()}
    return MinimalModel(frozen, round_of)


def naive_fixpoint(program: Program, facts: Iterable[GroundAtom]) -> frozenset[GroundAtom]:
    """Reference evaluation: apply every rule to the full model until
    nothing new appears.  Kept deliberately independent of the
    semi-naive path."""
    model: set[GroundAtom] = set(_strip_labels(facts))
    for rule in program.rules:
        if rule.is_fact():
            model.add(_instantiate(rule.head, {}))
    by_pred: dict[str, set[GroundAtom]] = {}
    for atom in model:
        by_pred.setdefault(atom.predicate, set()).add(atom)

    changed = True
    while changed:
        changed = False
        for rule in program.rules:
            if rule.is_fact():
                continue
            for derived in _all_matches(rule, by_pred):
                if derived not in model:
                    model.add(derived)
                    by_pred.setdefault(derived.predicate, set()).add(derived)
                    changed = True
    return frozenset(model)


def _all_matches(rule: Rule, by_pred: Mapping[str, set[GroundAtom]]) -> list[GroundAtom]:
    # atoms first, comparisons once everything is bound (rule safety
    # guarantees their variables occur in positive atoms)
    atoms = [b for b in rule.body if isinstance(b, Atom)]
    comparisons = [b for b in rule.body if isinstance(b, Comparison)]
    results: list[GroundAtom] = []

    def walk(index: int, binding: dict[Variable, Constant]) -> None:
        if index == len(atoms):
            if all(_comparison_holds(c, binding) for c in comparisons):
                results.append(_instantiate(rule.head, binding))
            return
        for fact in by_pred.get(atoms[index].predicate, ()):
            extended = _match(atoms[index], fact, binding)
            if extended is not None:
                walk(index + 1, extended)

    walk(0, {})
    return results


def _all_matches_with_bodies(
    rule: Rule, relations: Mapping[str, list[GroundAtom]]
) -> list[tuple[GroundAtom, tuple[GroundAtom, ...]]]:
    """Every firing of ``rule`` against the given relations, as
    (head instance, matched body facts); used for derivation tracing."""
    atoms = [b for b in rule.body if isinstance(b, Atom)]
    comparisons = [b for b in rule.body if isinstance(b, Comparison)]
    results: list[tuple[GroundAtom, tuple[GroundAtom, ...]]] = []

    def walk(pos: int, binding: dict[Variable, Constant], used: tuple[GroundAtom, ...]) -> None:
        if pos == len(atoms):
            if all(_comparison_holds(c, binding) for c in comparisons):
                results.append((_instantiate(rule.head, binding), used))
            return
        for fact in relations.get(atoms[pos].predicate, ()):  # full relation, not delta
            extended = _match(atoms[pos], fact, binding)
            if extended is not None:
                walk(pos + 1, extended, used + (fact,))

    walk(0, {}, ())
    return results


def holds(program: Program, instance: Instance | Iterable[GroundAtom], atom: GroundAtom) -> bool:
    """True iff ``atom`` belongs to the minimal model."""
    known = program.arity_of(atom.predicate)
    base = instance.atoms if isinstance(instance, Instance) else frozenset(instance)
    if known is None and all(a.predicate != atom.predicate for a in base):
        raise UnknownPredicateError(f"predicate {atom.predicate} unknown to the program and instance")
    model = evaluate_fixpoint(program, base)
    return GroundAtom(atom.predicate, atom.args) in model


def answers(program: Program, instance: Instance | Iterable[GroundAtom]) -> frozenset[GroundAtom]:
    """Extension of the answer predicate in the minimal model; for a
    Boolean program this is a singleton or empty."""
    model = evaluate_fixpoint(program, instance)
    return model.extension(program.answer_predicate)


def answer_atom(program: Program, *symbols: str) -> GroundAtom:
    return GroundAtom(program.answer_predicate, tuple(Constant(s) for s in symbols))


_FRESH_GOAL = "goal"


def fresh_predicate(base: str, taken: Iterable[str]) -> str:
    taken = set(taken)
    if base not in taken:
        return base
    i = 1
    while f"{base}_{i}" in taken:
        i += 1
    return f"{base}_{i}"


def specialize_to_answer(program: Program, answer: GroundAtom) -> tuple[Program, GroundAtom]:
    """Turn (program, ground answer atom) into an equivalent Boolean query.

    Adds ``goal :- ans(c1, ..., cn)`` with a fresh nullary goal predicate;
    for an already-Boolean program queried on its own answer atom the
    program is returned unchanged.
    """
    if answer.predicate != program.answer_predicate:
        raise NotAnAnswerError(f"{answer} is not over the answer predicate {program.answer_predicate}")
    if program.is_boolean() and answer.arity == 0:
        return program, answer
    taken = {r.head.predicate for r in program.rules}
    taken.update(a.predicate for r in program.rules for a in r.body_atoms())
    goal = fresh_predicate(_FRESH_GOAL, taken)
    goal_rule = Rule(Atom(goal, ()), (answer.to_atom(),))
    boolean = Program(program.rules + (goal_rule,), goal)
    return boolean, GroundAtom(goal, ())
