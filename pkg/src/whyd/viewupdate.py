"""Delete-propagation over views defined by monotone Datalog queries.

By default every tuple is deletable, matching the classical view-update
reading; ``endogenous_only=True`` restricts deletions to the endogenous
partition.  Minimal and minimum source-side-effect solutions come
straight from the causality machinery (a solution is a cause together
with one of its subset-minimal contingency sets).  View-side-effect-free
solutions need the exact residual view, so candidates are filtered
against per-answer support families.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Literal

from .causality import CauseAnalysis, answer_support_families
from .errors import NotAnAnswerError, NotSubinstanceError, WhydError
from .evaluator import answers as evaluate_answers
from .model import GroundAtom, Instance, Program

SolutionKind = Literal["minimal_source", "minimum_source", "view_safe"]


@dataclass(frozen=True)
class DeletionSolution:
    removed: frozenset[GroundAtom]
    kind: SolutionKind
    residual_view: frozenset[GroundAtom]


def _working_instance(instance: Instance, endogenous_only: bool) -> Instance:
    return instance if endogenous_only else instance.all_endogenous()


def _canonical_solutions(solutions: set[frozenset[GroundAtom]]) -> list[frozenset[GroundAtom]]:
    return sorted(solutions, key=lambda s: (len(s), tuple(sorted(a.sort_key() for a in s))))


def minimal_source_solutions(
    instance: Instance,
    program: Program,
    answer: GroundAtom,
    *,
    endogenous_only: bool = False,
) -> tuple[DeletionSolution, ...]:
    """All subset-minimal deletion sets that drop the answer: exactly the
    {cause} + contingency-set combinations."""
    working = _working_instance(instance, endogenous_only)
    analysis = CauseAnalysis.for_query(working, program, answer)
    removals: set[frozenset[GroundAtom]] = set()
    for tau in analysis.causes():
        for gamma in analysis.contingency_family(tau):
            removals.add(gamma | {tau})
    out = []
    for removed in _canonical_solutions(removals):
        residual = evaluate_answers(program, instance.without(removed))
        out.append(DeletionSolution(removed, "minimal_source", residual))
    return tuple(out)


def minimum_source_solutions(
    instance: Instance,
    program: Program,
    answer: GroundAtom,
    *,
    endogenous_only: bool = False,
) -> tuple[DeletionSolution, ...]:
    """The minimum-cardinality members of the minimal family; their size is
    1 over the best responsibility among the causes."""
    minimal = minimal_source_solutions(instance, program, answer, endogenous_only=endogenous_only)
    if not minimal:
        return ()
    best = min(len(s.removed) for s in minimal)
    return tuple(
        DeletionSolution(s.removed, "minimum_source", s.residual_view)
        for s in minimal
        if len(s.removed) == best
    )


def check_source_solution(
    instance: Instance,
    subinstance: Instance,
    program: Program,
    answer: GroundAtom,
    mode: Literal["s", "c"],
) -> bool:
    """Membership test for the two source-side-effect decision problems:
    mode "s" asks whether the kept subinstance is subset-maximal among
    those dropping the answer, mode "c" whether it has maximum size."""
    if not subinstance.is_subinstance_of(instance):
        raise NotSubinstanceError("the candidate is not a subinstance")
    if mode not in ("s", "c"):
        raise WhydError(f"unknown mode {mode!r}")
    full_view = evaluate_answers(program, instance)
    if answer not in full_view:
        raise NotAnAnswerError(f"{answer} is not an answer on this instance")
    if answer in evaluate_answers(program, subinstance):
        return False
    removed = instance.atoms - subinstance.atoms
    if mode == "s":
        # maximality: putting any single deleted tuple back must restore
        # the answer (monotonicity lifts this to all supersets)
        for atom in removed:
            restored = subinstance.atoms | {atom}
            if answer not in evaluate_answers(program, restored):
                return False
        return True
    minimum = minimum_source_solutions(instance, program, answer)
    return bool(minimum) and len(removed) == len(minimum[0].removed)


def vsef_solutions(
    instance: Instance,
    program: Program,
    answer: GroundAtom,
    *,
    endogenous_only: bool = False,
) -> tuple[DeletionSolution, ...]:
    """All subset-minimal deletion sets that remove exactly the given
    answer from the view; empty iff the side-effect-free problem has no
    solution."""
    working = _working_instance(instance, endogenous_only)
    view = evaluate_answers(program, instance)
    if answer not in view:
        raise NotAnAnswerError(f"{answer} is not an answer on this instance")
    protected = view - {answer}
    fixed = working.exogenous
    deletable = working.endogenous
    families = answer_support_families(program, fixed, deletable, sorted(view, key=GroundAtom.sort_key))
    target_family = families[answer]
    protected_families = [families[a] for a in protected]

    # a minimal solution only removes tuples that support the target answer
    universe = sorted(frozenset().union(*target_family) if target_family else (), key=GroundAtom.sort_key)
    found: list[frozenset[GroundAtom]] = []
    for size in range(1, len(universe) + 1):
        for combo in combinations(universe, size):
            removed = frozenset(combo)
            if any(prev <= removed for prev in found):
                continue
            if any(not (delta & removed) for delta in target_family):
                continue  # the target answer would survive
            if any(
                all(delta & removed for delta in family) for family in protected_families
            ):
                continue  # some protected answer would be lost
            found.append(removed)
    out = []
    for removed in _canonical_solutions(set(found)):
        residual = evaluate_answers(program, instance.without(removed))
        out.append(DeletionSolution(removed, "view_safe", residual))
    return tuple(out)
