"""Actual causes, contingency sets and responsibility for monotone
queries given as Datalog programs.

Engine strategy: solve the causal abduction problem once (its diagnoses
are the minimal endogenous support sets of the answer), then read
everything off the diagnosis family:

  * the causes are the relevant hypotheses (union of the diagnoses);
  * a contingency set for a cause t must hit every diagnosis avoiding t
    while leaving some diagnosis through t intact, so the subset-minimal
    ones are minimal hitting sets of the t-free diagnoses computed away
    from one t-containing diagnosis at a time.

The brute-force subset enumeration lives in the test suite as an
independent oracle; keep it out of this module.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Mapping

from .abduction import AbductionProblem, Diagnosis, solve_diagnoses
from .errors import (
    NotACauseError,
    NotAnAnswerError,
    NotEndogenousError,
    ObservationNotEntailableError,
)
from .evaluator import holds as model_holds
from .evaluator import specialize_to_answer
from .hitting import minimal_hitting_sets
from .model import GroundAtom, Instance, Program


@dataclass(frozen=True)
class CauseReport:
    """A cause with its family of subset-minimal contingency sets and its
    exact responsibility 1/(1 + size of the smallest set)."""

    cause: GroundAtom
    minimal_contingency_sets: tuple[frozenset[GroundAtom], ...]
    responsibility: Fraction

    def is_counterfactual(self) -> bool:
        return self.responsibility == 1


def _canonical_family(family: Iterable[frozenset[GroundAtom]]) -> tuple[frozenset[GroundAtom], ...]:
    return tuple(sorted(set(family), key=lambda s: (len(s), tuple(sorted(a.sort_key() for a in s)))))


class CauseAnalysis:
    """Diagnosis-backed analysis for one (instance, program, answer)."""

    def __init__(self, instance: Instance, program: Program, answer: GroundAtom):
        self.instance = instance
        self.program = program
        self.answer = answer
        boolean, goal = specialize_to_answer(program, answer)
        try:
            self.problem = AbductionProblem(boolean, instance.exogenous, instance.endogenous, (goal,))
        except ObservationNotEntailableError:
            raise NotAnAnswerError(f"{answer} is not an answer on this instance") from None

    @staticmethod
    @lru_cache(maxsize=None)
    def for_query(instance: Instance, program: Program, answer: GroundAtom) -> "CauseAnalysis":
        return CauseAnalysis(instance, program, answer)

    @property
    def solutions(self) -> tuple[Diagnosis, ...]:
        return solve_diagnoses(self.problem)

    def causes(self) -> frozenset[GroundAtom]:
        out: set[GroundAtom] = set()
        for delta in self.solutions:
            out |= delta
        return frozenset(out)

    def contingency_family(self, tau: GroundAtom) -> tuple[frozenset[GroundAtom], ...]:
        solutions = self.solutions
        through = [delta for delta in solutions if tau in delta]
        if not through:
            raise NotACauseError(f"{tau} is not an actual cause for {self.answer}")
        avoiding = [delta for delta in solutions if tau not in delta]
        pool = frozenset().union(*avoiding) if avoiding else frozenset()
        family: set[frozenset[GroundAtom]] = set()
        for anchor in through:
            family.update(minimal_hitting_sets(avoiding, pool - anchor))
        return _canonical_family(family)

    def responsibility(self, tau: GroundAtom) -> Fraction:
        if tau not in self.instance.endogenous:
            raise NotEndogenousError(f"{tau} is not an endogenous tuple")
        if tau not in self.causes():
            return Fraction(0)
        family = self.contingency_family(tau)
        return Fraction(1, 1 + min(len(g) for g in family))

    def reports(self) -> tuple[CauseReport, ...]:
        out = []
        for tau in sorted(self.causes(), key=GroundAtom.sort_key):
            family = self.contingency_family(tau)
            out.append(CauseReport(tau, family, Fraction(1, 1 + min(len(g) for g in family))))
        return tuple(out)


def _require_answer(instance: Instance, program: Program, answer: GroundAtom) -> None:
    if answer.predicate != program.answer_predicate or not model_holds(program, instance, answer):
        raise NotAnAnswerError(f"{answer} is not an answer on this instance")


def is_counterfactual_cause(
    instance: Instance, program: Program, answer: GroundAtom, tau: GroundAtom
) -> bool:
    """True iff removing the tuple alone drops the answer.  Checked by a
    direct evaluation, independently of the diagnosis machinery."""
    if tau not in instance.endogenous:
        raise NotEndogenousError(f"{tau} is not an endogenous tuple")
    _require_answer(instance, program, answer)
    return not model_holds(program, instance.without({tau}), answer)


def causes(instance: Instance, program: Program, answer: GroundAtom) -> frozenset[GroundAtom]:
    """All actual causes for the answer."""
    return CauseAnalysis.for_query(instance, program, answer).causes()


def minimal_contingency_sets(
    instance: Instance, program: Program, answer: GroundAtom, tau: GroundAtom
) -> tuple[frozenset[GroundAtom], ...]:
    """The family of subset-minimal contingency sets for a cause."""
    return CauseAnalysis.for_query(instance, program, answer).contingency_family(tau)


def responsibility(instance: Instance, program: Program, answer: GroundAtom, tau: GroundAtom) -> Fraction:
    """Exact responsibility: 1/(1 + size of smallest contingency set) for
    causes, 0 for endogenous non-causes."""
    return CauseAnalysis.for_query(instance, program, answer).responsibility(tau)


def most_responsible_causes(instance: Instance, program: Program, answer: GroundAtom) -> frozenset[GroundAtom]:
    """Causes attaining the maximal positive responsibility; empty iff
    there are no causes."""
    analysis = CauseAnalysis.for_query(instance, program, answer)
    best: Fraction = Fraction(0)
    winners: list[GroundAtom] = []
    for report in analysis.reports():
        if report.responsibility > best:
            best = report.responsibility
            winners = [report.cause]
        elif report.responsibility == best and best > 0:
            winners.append(report.cause)
    return frozenset(winners)


def cause_reports(instance: Instance, program: Program, answer: GroundAtom) -> tuple[CauseReport, ...]:
    return CauseAnalysis.for_query(instance, program, answer).reports()


def answer_support_families(
    program: Program,
    fixed: frozenset[GroundAtom],
    deletable: frozenset[GroundAtom],
    answer_atoms: Iterable[GroundAtom],
) -> Mapping[GroundAtom, tuple[Diagnosis, ...]]:
    """For each answer atom, the family of minimal deletable support sets:
    minimal subsets of ``deletable`` that entail the answer together with
    the fixed facts.  This is the workhorse behind the view-update and
    view-conditioned searches."""
    families: dict[GroundAtom, tuple[Diagnosis, ...]] = {}
    for answer in answer_atoms:
        boolean, goal = specialize_to_answer(program, answer)
        problem = AbductionProblem(boolean, fixed, deletable, (goal,))
        families[answer] = solve_diagnoses(problem)
    return families
