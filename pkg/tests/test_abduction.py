from fractions import Fraction

import pytest

from whyd.abduction import (
    AbductionProblem,
    from_abduction_to_causality,
    necessary_hypotheses,
    necessary_hypothesis_sets,
    necessity_degree,
    relevant_hypotheses,
    solve_diagnoses,
    to_causal_abduction,
)
from whyd.causality import causes, responsibility
from whyd.errors import (
    NotBooleanError,
    NotEntailedError,
    ObservationNotEntailableError,
    UnknownHypothesisError,
)
from whyd.model import GroundAtom, Instance, Program, ground
from whyd.parsing import parse_program

import corpus
import oracle
from conftest import atom, load_document, load_instance, load_program


def _family(diagnoses):
    return {frozenset(str(a) for a in d) for d in diagnoses}


def _circuit_problem():
    program = load_program("circuit.dl")
    document = load_document("circuit.facts")
    return AbductionProblem(
        program, document.instance.exogenous, document.instance.endogenous, document.observations
    )


def test_circuit_has_single_diagnosis():
    problem = _circuit_problem()
    assert _family(solve_diagnoses(problem)) == {frozenset({"faulty(or)"})}


def test_rs_diagnoses_and_relevance():
    program, instance = load_program("rs.dl"), load_instance("rs.facts")
    problem = to_causal_abduction(instance, program)
    assert problem.extensional == frozenset()
    assert problem.hypotheses == instance.atoms
    assert _family(solve_diagnoses(problem)) == {
        frozenset({"s(a1)", "r(a2, a1)"}),
        frozenset({"s(a3)", "r(a3, a3)"}),
    }
    assert {str(a) for a in relevant_hypotheses(problem)} == {
        "s(a1)",
        "r(a2, a1)",
        "s(a3)",
        "r(a3, a3)",
    }
    assert necessary_hypotheses(problem) == frozenset()


def test_rs_nes_necessity():
    program, instance = load_program("rs.dl"), load_instance("rs_nes.facts")
    problem = to_causal_abduction(instance, program)
    assert {str(a) for a in necessary_hypotheses(problem)} == {"s(a3)"}
    assert _family(necessary_hypothesis_sets(problem)) == {
        frozenset({"s(a3)"}),
        frozenset({"r(a1, a3)", "r(a2, a3)"}),
    }
    assert necessity_degree(problem, ground("s", "a3")) == 1
    assert necessity_degree(problem, ground("r", "a2", "a3")) == Fraction(1, 2)
    assert necessity_degree(problem, ground("r", "a1", "a3")) == Fraction(1, 2)


def test_singleton_necessity_correspondence():
    program, instance = load_program("rs.dl"), load_instance("rs_nes.facts")
    problem = to_causal_abduction(instance, program)
    family = necessary_hypothesis_sets(problem)
    for h in problem.hypotheses:
        assert (h in necessary_hypotheses(problem)) == (frozenset({h}) in family)


def test_entailed_without_hypotheses_gives_empty_diagnosis():
    program = parse_program("ans :- p(X).")
    problem = AbductionProblem(program, frozenset({ground("p", "a")}), frozenset({ground("p", "b")}), (ground("ans"),))
    assert solve_diagnoses(problem) == (frozenset(),)
    assert relevant_hypotheses(problem) == frozenset()
    assert necessary_hypotheses(problem) == frozenset()
    assert necessary_hypothesis_sets(problem) == ()
    assert necessity_degree(problem, ground("p", "b")) == 0


def test_unentailable_observation_rejected():
    program = parse_program("ans :- p(X).")
    with pytest.raises(ObservationNotEntailableError):
        AbductionProblem(program, frozenset(), frozenset({ground("q", "a")}), (ground("ans"),))


def test_empty_observation_rejected():
    program = parse_program("ans :- p(X).")
    with pytest.raises(ObservationNotEntailableError):
        AbductionProblem(program, frozenset(), frozenset(), ())


def test_unknown_hypothesis_rejected():
    problem = _circuit_problem()
    with pytest.raises(UnknownHypothesisError):
        necessity_degree(problem, ground("faulty", "nand"))


def test_to_causal_abduction_requires_boolean_query():
    program, instance = load_program("aj.dl"), load_instance("aj.facts")
    with pytest.raises(NotBooleanError):
        to_causal_abduction(instance, program)


def test_to_causal_abduction_requires_entailment():
    program = load_program("rs.dl")
    with pytest.raises(NotEntailedError):
        to_causal_abduction(Instance([ground("s", "a1")]), program)


def test_to_causal_abduction_with_empty_endogenous_part():
    program = load_program("rs.dl")
    instance = Instance([], [ground("r", "a2", "a1"), ground("s", "a1")])
    problem = to_causal_abduction(instance, program)
    assert solve_diagnoses(problem) == (frozenset(),)
    assert relevant_hypotheses(problem) == frozenset()


def test_booleanized_aj_relevance_is_the_cause_set():
    from whyd.evaluator import specialize_to_answer

    program, instance = load_program("aj.dl"), load_instance("aj.facts")
    answer = atom("ans(john, xml)")
    boolean, _ = specialize_to_answer(program, answer)
    problem = to_causal_abduction(instance, boolean)
    assert relevant_hypotheses(problem) == causes(instance, program, answer)


def test_from_abduction_circuit_image():
    problem = _circuit_problem()
    instance, program = from_abduction_to_causality(problem)
    answer = GroundAtom(program.answer_predicate, ())
    assert program.is_boolean()
    assert causes(instance, program, answer) == frozenset({ground("faulty", "or")})
    assert responsibility(instance, program, answer, ground("faulty", "or")) == 1


def test_from_abduction_round_trip_on_rs():
    program, instance = load_program("rs.dl"), load_instance("rs.facts")
    problem = to_causal_abduction(instance, program)
    image_instance, image_program = from_abduction_to_causality(problem)
    answer = GroundAtom(image_program.answer_predicate, ())
    assert causes(image_instance, image_program, answer) == relevant_hypotheses(problem)


def test_from_abduction_folds_conjunctive_observation():
    program = parse_program("ans :- p(X).")  # placeholder head; rules reused below
    base = Program(program.rules, "ans")
    problem = AbductionProblem(
        base,
        frozenset(),
        frozenset({ground("p", "a"), ground("p", "b")}),
        (ground("p", "a"), ground("p", "b")),
    )
    instance, image = from_abduction_to_causality(problem)
    goal_rules = [r for r in image.rules if r.head.predicate == image.answer_predicate]
    assert len(goal_rules) == 1
    assert [str(a) for a in goal_rules[0].body] == ["p(a)", "p(b)"]
    assert instance.endogenous == problem.hypotheses


def test_diagnoses_match_oracle_on_random_problems():
    for seed in range(60):
        case = corpus.generate_case(seed, max_endogenous=6)
        from whyd.evaluator import specialize_to_answer

        boolean, goal = specialize_to_answer(case.program, case.answer)
        problem = AbductionProblem(boolean, case.instance.exogenous, case.instance.endogenous, (goal,))
        engine = set(solve_diagnoses(problem))
        brute = set(
            oracle.diagnoses(boolean, case.instance.exogenous, case.instance.endogenous, [goal])
        )
        assert engine == brute, case


def test_necessary_sets_match_oracle_on_random_problems():
    for seed in range(40):
        case = corpus.generate_case(seed, max_endogenous=6)
        from whyd.evaluator import specialize_to_answer

        boolean, goal = specialize_to_answer(case.program, case.answer)
        problem = AbductionProblem(boolean, case.instance.exogenous, case.instance.endogenous, (goal,))
        engine = set(necessary_hypothesis_sets(problem))
        brute = set(
            oracle.necessary_sets(boolean, case.instance.exogenous, case.instance.endogenous, [goal])
        )
        assert engine == brute, case
        for h in sorted(problem.hypotheses, key=GroundAtom.sort_key):
            assert necessity_degree(problem, h) == oracle.necessity_degree(
                boolean, case.instance.exogenous, case.instance.endogenous, [goal], h
            ), case


def test_diagnosis_minimality_membership_proof():
    program, instance = load_program("rs.dl"), load_instance("rs.facts")
    problem = to_causal_abduction(instance, program)
    from whyd.evaluator import holds

    for delta in solve_diagnoses(problem):
        for element in delta:
            weakened = instance.exogenous | (delta - {element})
            assert not holds(problem.program, weakened, ground("ans"))
