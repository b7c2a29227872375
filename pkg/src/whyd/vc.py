"""View-conditioned causality: causes whose interventions preserve every
other answer of the query exactly.

A contingency set here must (i) keep the target answer before the cause
is removed, (ii) lose it afterwards, and (iii) leave the rest of the
view untouched afterwards.  Candidates are checked against per-answer
support families, level by level, keeping subset-minimal survivors.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import combinations
from typing import Iterable

from .causality import answer_support_families
from .constraints import Constraint
from .errors import NotAnAnswerError, NotConjunctiveError, NotEndogenousError
from .evaluator import answers as evaluate_answers
from .evaluator import fresh_predicate
from .model import Atom, GroundAtom, Instance, Program

VcContingencyFamily = tuple[frozenset[GroundAtom], ...]


@dataclass(frozen=True)
class VcCauseReport:
    cause: GroundAtom
    minimal_contingency_sets: VcContingencyFamily
    vc_responsibility: Fraction

    def is_vcc_cause(self) -> bool:
        """A view-conditioned counterfactual cause has the empty set among
        its contingency sets."""
        return frozenset() in self.minimal_contingency_sets


def _canonical_family(family: Iterable[frozenset[GroundAtom]]) -> VcContingencyFamily:
    return tuple(sorted(set(family), key=lambda s: (len(s), tuple(sorted(a.sort_key() for a in s)))))


class _VcAnalysis:
    def __init__(
        self,
        instance: Instance,
        program: Program,
        answer: GroundAtom,
        protected: frozenset[GroundAtom] | None,
    ):
        self.instance = instance
        view = evaluate_answers(program, instance)
        if answer not in view:
            raise NotAnAnswerError(f"{answer} is not an answer on this instance")
        if protected is not None and not protected <= view:
            stray = sorted(protected - view, key=GroundAtom.sort_key)[0]
            raise NotAnAnswerError(f"protected atom {stray} is not an answer on this instance")
        self.protected = (view - {answer}) if protected is None else protected
        relevant_answers = sorted({answer} | self.protected, key=GroundAtom.sort_key)
        families = answer_support_families(
            program, instance.exogenous, instance.endogenous, relevant_answers
        )
        self.target_family = families[answer]
        self.protected_families = [families[a] for a in sorted(self.protected, key=GroundAtom.sort_key)]

    def _valid(self, tau: GroundAtom, gamma: frozenset[GroundAtom]) -> bool:
        removed = gamma | {tau}
        if not any(not (delta & gamma) for delta in self.target_family):
            return False  # (i): the answer must survive the contingency alone
        if any(not (delta & removed) for delta in self.target_family):
            return False  # (ii): removing the cause as well must lose it
        for family in self.protected_families:
            if all(delta & removed for delta in family):
                return False  # (iii): a protected answer would be lost
        return True

    def contingency_family(self, tau: GroundAtom) -> VcContingencyFamily:
        pool = frozenset().union(*self.target_family) if self.target_family else frozenset()
        universe = sorted(pool - {tau}, key=GroundAtom.sort_key)
        found: list[frozenset[GroundAtom]] = []
        for size in range(0, len(universe) + 1):
            for combo in combinations(universe, size):
                gamma = frozenset(combo)
                if any(prev <= gamma for prev in found):
                    continue
                if self._valid(tau, gamma):
                    found.append(gamma)
        return _canonical_family(found)

    def reports(self) -> tuple[VcCauseReport, ...]:
        candidates = sorted(
            frozenset().union(*self.target_family) if self.target_family else frozenset(),
            key=GroundAtom.sort_key,
        )
        out = []
        for tau in candidates:
            family = self.contingency_family(tau)
            if family:
                rho = Fraction(1, 1 + min(len(g) for g in family))
                out.append(VcCauseReport(tau, family, rho))
        return tuple(out)


@lru_cache(maxsize=None)
def _analysis(
    instance: Instance,
    program: Program,
    answer: GroundAtom,
    protected: frozenset[GroundAtom] | None,
) -> _VcAnalysis:
    return _VcAnalysis(instance, program, answer, protected)


def vc_causes(
    instance: Instance,
    program: Program,
    answer: GroundAtom,
    protected: frozenset[GroundAtom] | None = None,
) -> tuple[VcCauseReport, ...]:
    """All view-conditioned causes with their minimal contingency families
    and responsibilities.  ``protected`` defaults to every other answer;
    passing a smaller set relaxes the condition accordingly."""
    return _analysis(instance, program, answer, protected).reports()


def vc_cause_exists(instance: Instance, program: Program, answer: GroundAtom) -> bool:
    """Equivalent to the view-side-effect-free deletion problem having a
    solution over the endogenous tuples."""
    return bool(vc_causes(instance, program, answer))


def vc_responsibility(
    instance: Instance, program: Program, answer: GroundAtom, tau: GroundAtom
) -> Fraction:
    if tau not in instance.endogenous:
        raise NotEndogenousError(f"{tau} is not an endogenous tuple")
    for report in vc_causes(instance, program, answer):
        if report.cause == tau:
            return report.vc_responsibility
    return Fraction(0)


def encode_vc_as_tgd(
    instance: Instance, program: Program, answer: GroundAtom
) -> tuple[Instance, Constraint]:
    """The reduction of view-conditioned to constrained causality for a
    conjunctive query: materialize the protected view tuples as exogenous
    facts of a fresh predicate and require, via a tgd, that each of them
    stays derivable."""
    if not program.is_single_rule_cq():
        raise NotConjunctiveError("the tgd encoding needs a single-rule conjunctive query")
    view = evaluate_answers(program, instance)
    if answer not in view:
        raise NotAnAnswerError(f"{answer} is not an answer on this instance")
    rule = program.rules[0]
    taken = {rule.head.predicate} | {a.predicate for a in rule.body_atoms()}
    taken.update(a.predicate for a in instance.atoms)
    view_predicate = fresh_predicate("view", taken)
    view_facts = [GroundAtom(view_predicate, a.args) for a in view if a != answer]
    extended = Instance(instance.endogenous, instance.exogenous | frozenset(view_facts))
    tgd = Constraint.tgd(
        body=(Atom(view_predicate, rule.head.args),),
        head_atoms=tuple(rule.body_atoms()),
    )
    return extended, tgd
