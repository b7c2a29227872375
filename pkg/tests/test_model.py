import pytest

from whyd.errors import (
    ArityMismatchError,
    HeadExtensionalError,
    UnsafeRuleError,
    WhydError,
)
from whyd.model import (
    Atom,
    Constant,
    GroundAtom,
    Instance,
    Program,
    Rule,
    Variable,
    active_domain,
    check_instance_against,
    ground,
    validate_program,
)

from conftest import load_instance, load_program


def test_constants_are_unique_names():
    assert Constant("a") == Constant("a")
    assert Constant("a") != Constant("b")
    assert Constant("a") != Variable("a")


def test_empty_symbol_rejected():
    with pytest.raises(WhydError):
        Constant("")
    with pytest.raises(WhydError):
        Variable("")


def test_ground_atom_identity_ignores_label():
    plain = ground("e", "a", "b")
    labelled = ground("e", "a", "b", label="t1")
    assert plain == labelled
    assert hash(plain) == hash(labelled)
    assert labelled.label == "t1"


def test_ground_atom_rejects_variables():
    with pytest.raises(WhydError):
        GroundAtom("p", (Variable("X"),))


def test_transitive_closure_program_is_valid():
    validate_program(load_program("graph.dl"))


def test_every_fixture_program_is_valid():
    for name in ("aj.dl", "graph.dl", "rs.dl", "access.dl", "circuit.dl", "dept_q.dl", "dept_q1.dl", "dept_qprime.dl", "repair.dl"):
        validate_program(load_program(name))


def test_empty_program_with_nullary_answer_is_valid():
    program = Program((), "ans")
    validate_program(program)
    assert program.is_boolean()


def test_unbound_head_variable_is_unsafe():
    rule = Rule(Atom("ans", (Variable("X"),)), (Atom("e", (Variable("Y"), Variable("Z"))),))
    with pytest.raises(UnsafeRuleError) as err:
        validate_program(Program((rule,), "ans"))
    assert err.value.variable == Variable("X")


def test_unbound_builtin_variable_is_unsafe():
    from whyd.model import Comparison

    rule = Rule(
        Atom("ans", (Variable("X"),)),
        (Atom("e", (Variable("X"),)), Comparison("!=", Variable("X"), Variable("Y"))),
    )
    with pytest.raises(UnsafeRuleError):
        validate_program(Program((rule,), "ans"))


def test_nonground_fact_rule_is_unsafe():
    rule = Rule(Atom("p", (Variable("X"),)), ())
    with pytest.raises(UnsafeRuleError):
        validate_program(Program((rule,), "p"))


def test_arity_mismatch_is_detected_at_construction():
    rules = (
        Rule(Atom("ans", ()), (Atom("p", (Variable("X"),)),)),
        Rule(Atom("q", (Variable("X"), Variable("Y"))), (Atom("p", (Variable("X"), Variable("Y"))),)),
    )
    with pytest.raises(ArityMismatchError):
        Program(rules, "ans")


def test_intensional_split_counts_answer_predicate():
    program = load_program("graph.dl")
    assert program.intensional_predicates() == {"ans", "p"}
    assert program.extensional_predicates() == {"e"}


def test_active_domain_of_graph():
    domain = active_domain(load_instance("graph.facts"))
    assert domain == {Constant(s) for s in "abcde"}


def test_active_domain_empty_instance():
    assert active_domain(Instance()) == frozenset()


def test_active_domain_of_rs():
    domain = active_domain(load_instance("rs.facts"))
    assert domain == {Constant(s) for s in ("a1", "a2", "a3", "a4")}


def test_active_domain_monotone_under_union():
    small = load_instance("rs_nes.facts")
    grown = small.with_endogenous([ground("r", "zz", "ww")])
    assert active_domain(small) <= active_domain(grown)


def test_partitions_disjoint_and_reconstruct():
    instance = load_instance("circuit.facts")
    assert not (instance.endogenous & instance.exogenous)
    assert instance.endogenous | instance.exogenous == instance.atoms


def test_overlapping_partitions_rejected():
    with pytest.raises(WhydError):
        Instance([ground("p", "a")], [ground("p", "a")])


def test_labels_resolve_tuples():
    instance = load_instance("graph.facts")
    assert instance.by_label("t2") == ground("e", "b", "e")
    with pytest.raises(WhydError):
        instance.by_label("t99")


def test_duplicate_label_for_distinct_tuples_rejected():
    with pytest.raises(WhydError):
        Instance([ground("p", "a", label="t1"), ground("p", "b", label="t1")])


def test_all_endogenous_erases_partition():
    instance = load_instance("circuit.facts")
    flattened = instance.all_endogenous()
    assert flattened.atoms == instance.atoms
    assert not flattened.exogenous


def test_strict_instance_check_rejects_intensional_facts():
    program = load_program("graph.dl")
    instance = Instance([ground("p", "a", "b")])
    check_instance_against(program, instance)  # lenient mode: facts may seed the model
    with pytest.raises(HeadExtensionalError):
        check_instance_against(program, instance, strict=True)


def test_instance_check_flags_arity_clashes():
    program = load_program("graph.dl")
    with pytest.raises(ArityMismatchError):
        check_instance_against(program, Instance([ground("e", "a")]))
