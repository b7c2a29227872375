"""Integrity constraints and causality in their presence.

Constraints are tgds, egds (FDs/keys expand to these) and denial
constraints.  Satisfaction is first-order evaluation over the finite
instance: a tgd's existential head variables must be witnessed by facts
that are already there.  No chase, no invented values; every
intervention in this package is a deletion.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import combinations
from typing import Iterable, Iterator, Mapping, Sequence, Union

from .errors import (
    InstanceViolatesSigmaError,
    NotConjunctiveError,
    NotEndogenousError,
    SchemaMismatchError,
    WhydError,
)
from .model import Atom, Constant, GroundAtom, Instance, Program, Term, Variable


@dataclass(frozen=True)
class Constraint:
    """Tagged union of tgd / egd / denial constraint."""

    kind: str  # "tgd" | "egd" | "denial"
    body: tuple[Atom, ...]
    head_atoms: tuple[Atom, ...] = ()
    equality: tuple[Term, Term] | None = None

    @staticmethod
    def tgd(body: Sequence[Atom], head_atoms: Sequence[Atom]) -> "Constraint":
        if not body or not head_atoms:
            raise WhydError("a tgd needs a nonempty body and head")
        return Constraint("tgd", tuple(body), tuple(head_atoms))

    @staticmethod
    def egd(body: Sequence[Atom], left: Term, right: Term) -> "Constraint":
        if not body:
            raise WhydError("an egd needs a nonempty body")
        body_vars = {v for a in body for v in a.variables()}
        for term in (left, right):
            if isinstance(term, Variable) and term not in body_vars:
                raise WhydError(f"egd head variable {term} does not occur in the body")
        return Constraint("egd", tuple(body), equality=(left, right))

    @staticmethod
    def denial(body: Sequence[Atom]) -> "Constraint":
        if not body:
            raise WhydError("a denial constraint needs a nonempty body")
        return Constraint("denial", tuple(body))

    @staticmethod
    def functional_dependency(
        predicate: str, determinants: Sequence[int], dependents: Sequence[int], arity: int
    ) -> tuple["Constraint", ...]:
        """``determinants -> dependents`` on 1-based positions, as egds."""
        if max((*determinants, *dependents)) > arity:
            raise SchemaMismatchError(f"dependency position exceeds arity {arity} of {predicate}")
        left = Atom(predicate, tuple(Variable(f"X{i}") for i in range(1, arity + 1)))
        right_args = [
            Variable(f"X{i}") if i in determinants else Variable(f"Y{i}") for i in range(1, arity + 1)
        ]
        right = Atom(predicate, tuple(right_args))
        out = []
        for pos in dependents:
            out.append(Constraint.egd((left, right), Variable(f"X{pos}"), Variable(f"Y{pos}")))
        return tuple(out)

    def is_deletion_closed(self) -> bool:
        """Egds and denials can never be broken by deleting tuples."""
        return self.kind in ("egd", "denial")

    def existential_variables(self) -> frozenset[Variable]:
        if self.kind != "tgd":
            return frozenset()
        body_vars = {v for a in self.body for v in a.variables()}
        return frozenset(v for a in self.head_atoms for v in a.variables() if v not in body_vars)

    def __str__(self) -> str:
        body = ", ".join(str(a) for a in self.body)
        if self.kind == "denial":
            return f"{body} => false."
        if self.kind == "egd":
            left, right = self.equality  # type: ignore[misc]
            return f"{body} => {left} = {right}."
        head = ", ".join(str(a) for a in self.head_atoms)
        return f"{body} => {head}."


@dataclass(frozen=True)
class FunctionalDependency:
    """``determinants -> dependents`` on 1-based positions of a predicate;
    expands to egds once the arity is known."""

    predicate: str
    determinants: tuple[int, ...]
    dependents: tuple[int, ...]

    def to_egds(self, arity: int) -> tuple[Constraint, ...]:
        return Constraint.functional_dependency(self.predicate, self.determinants, self.dependents, arity)


@dataclass(frozen=True)
class KeyConstraint:
    """Key positions (1-based) of a predicate; expands to one egd per
    non-key position once the arity is known."""

    predicate: str
    positions: tuple[int, ...]

    def to_egds(self, arity: int) -> tuple[Constraint, ...]:
        if max(self.positions) > arity:
            raise SchemaMismatchError(f"key position {max(self.positions)} exceeds arity {arity} of {self.predicate}")
        dependents = tuple(i for i in range(1, arity + 1) if i not in self.positions)
        if not dependents:
            return ()
        return Constraint.functional_dependency(self.predicate, self.positions, dependents, arity)


@dataclass(frozen=True)
class ConstraintSet:
    """Parsed constraints plus key/FD declarations (keys are kept around
    for key-preservation checks; semantically both are egd sugar)."""

    constraints: tuple[Constraint, ...] = ()
    keys: tuple[KeyConstraint, ...] = ()
    fds: tuple[FunctionalDependency, ...] = ()

    def expanded(self, arities: Mapping[str, int]) -> tuple[Constraint, ...]:
        out = list(self.constraints)
        for sugar in (*self.keys, *self.fds):
            arity = arities.get(sugar.predicate)
            if arity is not None:
                out.extend(sugar.to_egds(arity))
        return tuple(out)

    def __iter__(self) -> Iterator[Constraint]:
        return iter(self.constraints)

    def __len__(self) -> int:
        return len(self.constraints)


Sigma = Union[ConstraintSet, Iterable[Constraint]]


def _normalize(sigma: Sigma, instance: Instance) -> tuple[Constraint, ...]:
    if isinstance(sigma, ConstraintSet):
        arities: dict[str, int] = {}
        for atom in instance.atoms:
            arities.setdefault(atom.predicate, atom.arity)
        return sigma.expanded(arities)
    return tuple(sigma)


@dataclass(frozen=True)
class Violation:
    constraint: Constraint
    witness: tuple[GroundAtom, ...]

    def __str__(self) -> str:
        facts = ", ".join(str(a) for a in sorted(self.witness, key=GroundAtom.sort_key))
        return f"{self.constraint} violated by {{{facts}}}"


@dataclass(frozen=True)
class SatisfactionReport:
    ok: bool
    violations: tuple[Violation, ...] = ()

    def __bool__(self) -> bool:
        return self.ok


def _check_arities(constraints: Sequence[Constraint], instance: Instance) -> None:
    arities: dict[str, int] = {}
    for atom in instance.atoms:
        arities.setdefault(atom.predicate, atom.arity)
    for c in constraints:
        for atom in (*c.body, *c.head_atoms):
            known = arities.setdefault(atom.predicate, atom.arity)
            if known != atom.arity:
                raise SchemaMismatchError(
                    f"{atom.predicate} used with arity {atom.arity} in {c} but {known} elsewhere"
                )


def _index(atoms: Iterable[GroundAtom]) -> dict[str, list[GroundAtom]]:
    index: dict[str, list[GroundAtom]] = {}
    for atom in atoms:
        index.setdefault(atom.predicate, []).append(atom)
    return index


def _extend(pattern: Atom, fact: GroundAtom, binding: dict[Variable, Constant]) -> dict[Variable, Constant] | None:
    if len(pattern.args) != len(fact.args):
        return None
    new = None
    for term, value in zip(pattern.args, fact.args):
        if isinstance(term, Constant):
            if term != value:
                return None
        else:
            current = binding.get(term) if new is None else new.get(term)
            if current is None:
                if new is None:
                    new = dict(binding)
                new[term] = value
            elif current != value:
                return None
    return binding if new is None else new


def _homomorphisms(
    atoms: Sequence[Atom],
    index: Mapping[str, list[GroundAtom]],
    binding: dict[Variable, Constant] | None = None,
) -> Iterator[tuple[dict[Variable, Constant], tuple[GroundAtom, ...]]]:
    """All ways of matching the conjunction into the indexed facts."""
    binding = binding or {}

    def walk(pos: int, bound: dict[Variable, Constant], used: tuple[GroundAtom, ...]):
        if pos == len(atoms):
            yield bound, used
            return
        for fact in index.get(atoms[pos].predicate, ()):  # deterministic enough: checked, not emitted
            extended = _extend(atoms[pos], fact, bound)
            if extended is not None:
                yield from walk(pos + 1, extended, used + (fact,))

    yield from walk(0, binding, ())


def _term_value(term: Term, binding: Mapping[Variable, Constant]) -> Constant:
    return term if isinstance(term, Constant) else binding[term]


def _constraint_violations(constraint: Constraint, index: Mapping[str, list[GroundAtom]]) -> list[Violation]:
    found: list[Violation] = []
    for binding, witness in _homomorphisms(constraint.body, index):
        if constraint.kind == "denial":
            found.append(Violation(constraint, witness))
        elif constraint.kind == "egd":
            left, right = constraint.equality  # type: ignore[misc]
            if _term_value(left, binding) != _term_value(right, binding):
                found.append(Violation(constraint, witness))
        else:
            witnessed = False
            for _ in _homomorphisms(constraint.head_atoms, index, dict(binding)):
                witnessed = True
                break
            if not witnessed:
                found.append(Violation(constraint, witness))
    return found


def satisfies(instance: Instance, sigma: Sigma) -> SatisfactionReport:
    """Evaluate every constraint over the finite instance; tgd
    existentials range over existing facts only."""
    constraints = _normalize(sigma, instance)
    _check_arities(constraints, instance)
    index = _index(instance.atoms)
    violations: list[Violation] = []
    for constraint in constraints:
        violations.extend(_constraint_violations(constraint, index))
    violations.sort(key=lambda v: (str(v.constraint), tuple(a.sort_key() for a in v.witness)))
    return SatisfactionReport(not violations, tuple(violations))


# ---------------------------------------------------------------------------
# Causes under integrity constraints


@dataclass(frozen=True)
class ConstrainedCauseReport:
    cause: GroundAtom
    minimal_contingency_sets: tuple[frozenset[GroundAtom], ...]
    responsibility_under_ics: Fraction

    @property
    def responsibility(self) -> Fraction:
        return self.responsibility_under_ics


def _canonical_family(family: Iterable[frozenset[GroundAtom]]) -> tuple[frozenset[GroundAtom], ...]:
    return tuple(
        sorted(set(family), key=lambda s: (len(s), tuple(sorted(a.sort_key() for a in s))))
    )


class _SigmaAnalysis:
    """Shared search state for one (instance, query, answer, sigma)."""

    def __init__(self, instance: Instance, program: Program, answer: GroundAtom, constraints: tuple[Constraint, ...]):
        from .causality import CauseAnalysis  # local import to avoid a cycle

        self.instance = instance
        self.constraints = constraints
        check = satisfies(instance, constraints)
        if not check:
            raise InstanceViolatesSigmaError(str(check.violations[0]))
        self.plain = CauseAnalysis.for_query(instance, program, answer)
        self._sat_memo: dict[frozenset[GroundAtom], bool] = {}
        self.deletion_closed = all(c.is_deletion_closed() for c in constraints)
        self._reports: tuple[ConstrainedCauseReport, ...] | None = None

    def _satisfied_without(self, removed: frozenset[GroundAtom]) -> bool:
        cached = self._sat_memo.get(removed)
        if cached is None:
            cached = bool(satisfies(self.instance.without(removed), self.constraints))
            self._sat_memo[removed] = cached
        return cached

    def _family_for(self, tau: GroundAtom) -> tuple[frozenset[GroundAtom], ...]:
        solutions = self.plain.solutions
        hit_targets = [delta for delta in solutions if tau not in delta]
        universe = sorted(
            (a for a in self.instance.endogenous if a != tau), key=GroundAtom.sort_key
        )
        found: list[frozenset[GroundAtom]] = []
        for size in range(0, len(universe) + 1):
            for combo in combinations(universe, size):
                gamma = frozenset(combo)
                if any(prev <= gamma for prev in found):
                    continue
                if any(not (delta & gamma) for delta in hit_targets):
                    continue  # (c) fails: some diagnosis survives tau's removal
                if not any(not (delta & gamma) for delta in solutions):
                    continue  # (a) fails: answer already gone without tau
                if not self._satisfied_without(gamma):
                    continue  # (b)
                if not self._satisfied_without(gamma | {tau}):
                    continue  # (d)
                found.append(gamma)
        return _canonical_family(found)

    @property
    def reports(self) -> tuple[ConstrainedCauseReport, ...]:
        if self._reports is None:
            if self.deletion_closed:
                # deletions cannot break Sigma: causes and responsibilities
                # coincide with the unconstrained ones
                reports = tuple(
                    ConstrainedCauseReport(r.cause, r.minimal_contingency_sets, r.responsibility)
                    for r in self.plain.reports()
                )
            else:
                out = []
                for tau in sorted(self.plain.causes(), key=GroundAtom.sort_key):
                    family = self._family_for(tau)
                    if family:
                        rho = Fraction(1, 1 + min(len(g) for g in family))
                        out.append(ConstrainedCauseReport(tau, family, rho))
                reports = tuple(out)
            self._reports = reports
        return self._reports


@lru_cache(maxsize=None)
def _sigma_analysis(
    instance: Instance, program: Program, answer: GroundAtom, constraints: tuple[Constraint, ...]
) -> _SigmaAnalysis:
    return _SigmaAnalysis(instance, program, answer, constraints)


def causes_under_ics(
    instance: Instance, program: Program, answer: GroundAtom, sigma: Sigma
) -> tuple[ConstrainedCauseReport, ...]:
    """Actual causes whose contingency sets keep the constraints satisfied
    both before and after the cause itself is removed."""
    analysis = _sigma_analysis(instance, program, answer, _normalize(sigma, instance))
    return analysis.reports


def responsibility_under_ics(
    instance: Instance, program: Program, answer: GroundAtom, tau: GroundAtom, sigma: Sigma
) -> Fraction:
    if tau not in instance.endogenous:
        raise NotEndogenousError(f"{tau} is not an endogenous tuple")
    analysis = _sigma_analysis(instance, program, answer, _normalize(sigma, instance))
    for report in analysis.reports:
        if report.cause == tau:
            return report.responsibility_under_ics
    return Fraction(0)


def maximal_admissible_subinstances(
    instance: Instance, program: Program, answer: GroundAtom, sigma: Sigma
) -> tuple[Instance, ...]:
    """Maximal subinstances that drop the answer, filtered to those that
    still satisfy the constraints (the abductive route to causes under
    constraints)."""
    from .viewupdate import minimal_source_solutions

    constraints = _normalize(sigma, instance)
    check = satisfies(instance, constraints)
    if not check:
        raise InstanceViolatesSigmaError(str(check.violations[0]))
    admissible = []
    for solution in minimal_source_solutions(instance, program, answer):
        remaining = instance.without(solution.removed)
        if satisfies(remaining, constraints):
            admissible.append(remaining)
    admissible.sort(key=lambda inst: tuple(sorted(a.sort_key() for a in inst.atoms)))
    return tuple(admissible)


def is_key_preserving(program: Program, keys: Iterable[KeyConstraint]) -> bool:
    """Syntactic check: every key position of every body atom is filled by
    a constant or a variable that also appears in the head."""
    if not program.is_single_rule_cq():
        raise NotConjunctiveError("key preservation is defined for single-rule conjunctive queries")
    rule = program.rules[0]
    head_vars = rule.head.variables()
    by_predicate: dict[str, list[KeyConstraint]] = {}
    for key in keys:
        by_predicate.setdefault(key.predicate, []).append(key)
    for atom in rule.body_atoms():
        for key in by_predicate.get(atom.predicate, ()):
            if max(key.positions) > atom.arity:
                raise SchemaMismatchError(
                    f"key position {max(key.positions)} exceeds arity {atom.arity} of {atom.predicate}"
                )
            for position in key.positions:
                term = atom.args[position - 1]
                if isinstance(term, Variable) and term not in head_vars:
                    return False
    return True
