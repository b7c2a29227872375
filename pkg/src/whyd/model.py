"""Terms, atoms, rules, programs and partitioned instances.

All values are immutable after construction and safe to share across
threads.  Tuple identity is the ground atom itself; labels (t1, t2, ...)
are metadata for fixtures and reports and never take part in equality.
"""

from __future__ import annotations

import re
import sys
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Union

from .errors import ArityMismatchError, HeadExtensionalError, UnsafeRuleError, WhydError

_BARE_SYMBOL = re.compile(r"[a-z][A-Za-z0-9_]*$|[0-9][0-9]*$")


@dataclass(frozen=True)
class Constant:
    """A domain element under the unique-names reading: distinct symbols
    denote distinct elements."""

    symbol: str

    def __post_init__(self):
        if not self.symbol:
            raise WhydError("empty constant symbol")
        object.__setattr__(self, "symbol", sys.intern(self.symbol))

    def __str__(self) -> str:
        if _BARE_SYMBOL.match(self.symbol):
            return self.symbol
        return "'" + self.symbol.replace("\\", "\\\\").replace("'", "\\'") + "'"

    def __repr__(self) -> str:
        return f"Constant({self.symbol!r})"


@dataclass(frozen=True)
class Variable:
    name: str

    def __post_init__(self):
        if not self.name:
            raise WhydError("empty variable name")
        object.__setattr__(self, "name", sys.intern(self.name))

    def __str__(self) -> str:
        return self.name

    def __repr__(self) -> str:
        return f"Variable({self.name!r})"


Term = Union[Constant, Variable]


@dataclass(frozen=True)
class Atom:
    """A predicate applied to terms; ground iff every term is a constant."""

    predicate: str
    args: tuple[Term, ...]

    def __post_init__(self):
        object.__setattr__(self, "predicate", sys.intern(self.predicate))

    @property
    def arity(self) -> int:
        return len(self.args)

    def is_ground(self) -> bool:
        return all(isinstance(t, Constant) for t in self.args)

    def variables(self) -> set[Variable]:
        return {t for t in self.args if isinstance(t, Variable)}

    def __str__(self) -> str:
        if not self.args:
            return self.predicate
        return f"{self.predicate}({', '.join(str(t) for t in self.args)})"


@dataclass(frozen=True)
class GroundAtom:
    """An all-constant atom, i.e. a database tuple."""

    predicate: str
    args: tuple[Constant, ...]
    label: str | None = field(default=None, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "predicate", sys.intern(self.predicate))
        if not all(isinstance(t, Constant) for t in self.args):
            raise WhydError(f"non-constant argument in ground atom {self.predicate}")
        object.__setattr__(self, "_hash", hash((self.predicate, self.args)))

    def __hash__(self) -> int:
        return self._hash  # type: ignore[attr-defined]

    @property
    def arity(self) -> int:
        return len(self.args)

    def sort_key(self) -> tuple:
        return (self.predicate, tuple(c.symbol for c in self.args))

    def to_atom(self) -> Atom:
        return Atom(self.predicate, self.args)

    def with_label(self, label: str | None) -> "GroundAtom":
        return GroundAtom(self.predicate, self.args, label)

    def __str__(self) -> str:
        if not self.args:
            return self.predicate
        return f"{self.predicate}({', '.join(str(c) for c in self.args)})"


def ground(predicate: str, *symbols: str, label: str | None = None) -> GroundAtom:
    """Shorthand constructor: ``ground("e", "a", "b")`` is e(a, b)."""
    return GroundAtom(predicate, tuple(Constant(s) for s in symbols), label)


@dataclass(frozen=True)
class Comparison:
    """Built-in equality or disequality between two terms."""

    op: str  # "=" or "!="
    left: Term
    right: Term

    def __post_init__(self):
        if self.op not in ("=", "!="):
            raise WhydError(f"unsupported built-in {self.op!r}")

    def variables(self) -> set[Variable]:
        return {t for t in (self.left, self.right) if isinstance(t, Variable)}

    def holds(self, left: Constant, right: Constant) -> bool:
        return (left == right) if self.op == "=" else (left != right)

    def __str__(self) -> str:
        return f"{self.left} {self.op} {self.right}"


BodyItem = Union[Atom, Comparison]


@dataclass(frozen=True)
class Rule:
    head: Atom
    body: tuple[BodyItem, ...] = ()

    def body_atoms(self) -> Iterator[Atom]:
        return (b for b in self.body if isinstance(b, Atom))

    def comparisons(self) -> Iterator[Comparison]:
        return (b for b in self.body if isinstance(b, Comparison))

    def is_fact(self) -> bool:
        return not self.body

    def __str__(self) -> str:
        if not self.body:
            return f"{self.head}."
        return f"{self.head} :- {', '.join(str(b) for b in self.body)}."


class Program:
    """A positive Datalog program with a designated answer predicate.

    Predicates occurring in rule heads are intensional; the answer
    predicate counts as intensional even when no rule defines it (the
    empty program is a legal Boolean query that is never true).
    """

    __slots__ = ("rules", "answer_predicate", "_arities")

    def __init__(self, rules: Iterable[Rule], answer_predicate: str):
        self.rules: tuple[Rule, ...] = tuple(rules)
        self.answer_predicate = sys.intern(answer_predicate)
        self._arities: dict[str, int] = {}
        for rule in self.rules:
            for atom in (rule.head, *rule.body_atoms()):
                self._register(atom)

    def _register(self, atom: Atom) -> None:
        known = self._arities.setdefault(atom.predicate, atom.arity)
        if known != atom.arity:
            raise ArityMismatchError(atom, known)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, Program)
            and frozenset(self.rules) == frozenset(other.rules)
            and self.answer_predicate == other.answer_predicate
        )

    def __hash__(self) -> int:
        return hash((frozenset(self.rules), self.answer_predicate))

    def __repr__(self) -> str:
        return f"Program({len(self.rules)} rules, answer={self.answer_predicate})"

    def intensional_predicates(self) -> frozenset[str]:
        return frozenset(r.head.predicate for r in self.rules) | {self.answer_predicate}

    def extensional_predicates(self) -> frozenset[str]:
        mentioned = {a.predicate for r in self.rules for a in r.body_atoms()}
        return frozenset(mentioned - self.intensional_predicates())

    def arity_of(self, predicate: str) -> int | None:
        return self._arities.get(predicate)

    def is_boolean(self) -> bool:
        arity = self._arities.get(self.answer_predicate, 0)
        return arity == 0

    def is_single_rule_cq(self) -> bool:
        """True when the program is one nonrecursive rule defining the
        answer predicate over extensional atoms with no built-ins."""
        if len(self.rules) != 1:
            return False
        rule = self.rules[0]
        if rule.head.predicate != self.answer_predicate or rule.is_fact():
            return False
        if any(True for _ in rule.comparisons()):
            return False
        return all(a.predicate != self.answer_predicate for a in rule.body_atoms())


def validate_program(program: Program) -> None:
    """Check rule safety and the intensional/extensional split.

    Raises UnsafeRuleError, HeadExtensionalError, or ArityMismatchError;
    returns None when the program is well formed.
    """
    for rule in program.rules:
        bound = {v for atom in rule.body_atoms() for v in atom.variables()}
        for v in sorted(rule.head.variables(), key=lambda v: v.name):
            if v not in bound:
                raise UnsafeRuleError(rule, v)
        for cmp_ in rule.comparisons():
            for v in sorted(cmp_.variables(), key=lambda v: v.name):
                if v not in bound:
                    raise UnsafeRuleError(rule, v)
        if rule.is_fact() and not rule.head.is_ground():
            v = sorted(rule.head.variables(), key=lambda v: v.name)[0]
            raise UnsafeRuleError(rule, v)
    # Arity consistency is enforced incrementally by Program._register;
    # here we only have to reject head uses of the answer predicate with
    # a different arity than its body occurrences, which _register did.


class Instance:
    """A finite set of tuples split into endogenous and exogenous parts."""

    __slots__ = ("endogenous", "exogenous", "_atoms", "_labels")

    def __init__(
        self,
        endogenous: Iterable[GroundAtom] = (),
        exogenous: Iterable[GroundAtom] = (),
    ):
        self.endogenous: frozenset[GroundAtom] = frozenset(endogenous)
        self.exogenous: frozenset[GroundAtom] = frozenset(exogenous)
        overlap = self.endogenous & self.exogenous
        if overlap:
            atom = sorted(overlap, key=GroundAtom.sort_key)[0]
            raise WhydError(f"tuple {atom} is both endogenous and exogenous")
        self._atoms = self.endogenous | self.exogenous
        self._labels: dict[str, GroundAtom] = {}
        for atom in self._atoms:
            if atom.label is not None:
                if atom.label in self._labels and self._labels[atom.label] != atom:
                    raise WhydError(f"label {atom.label} used for two distinct tuples")
                self._labels[atom.label] = atom

    @property
    def atoms(self) -> frozenset[GroundAtom]:
        return self._atoms

    def __contains__(self, atom: GroundAtom) -> bool:
        return atom in self._atoms

    def __len__(self) -> int:
        return len(self._atoms)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, Instance)
            and self.endogenous == other.endogenous
            and self.exogenous == other.exogenous
        )

    def __hash__(self) -> int:
        return hash((self.endogenous, self.exogenous))

    def __repr__(self) -> str:
        return f"Instance({len(self.endogenous)} endogenous, {len(self.exogenous)} exogenous)"

    def by_label(self, label: str) -> GroundAtom:
        try:
            return self._labels[label]
        except KeyError:
            raise WhydError(f"no tuple labelled {label}") from None

    def without(self, removed: Iterable[GroundAtom]) -> "Instance":
        removed = frozenset(removed)
        return Instance(self.endogenous - removed, self.exogenous - removed)

    def with_endogenous(self, added: Iterable[GroundAtom]) -> "Instance":
        return Instance(self.endogenous | frozenset(added), self.exogenous)

    def all_endogenous(self) -> "Instance":
        """The same tuples with the partition erased (everything deletable)."""
        if not self.exogenous:
            return self
        return Instance(self._atoms, ())

    def is_subinstance_of(self, other: "Instance") -> bool:
        return self._atoms <= other.atoms


def active_domain(instance: Instance) -> frozenset[Constant]:
    """Exactly the constants occurring in the instance's tuples."""
    return frozenset(c for atom in instance.atoms for c in atom.args)


def check_instance_against(program: Program, instance: Instance, *, strict: bool = False) -> None:
    """Arity check of instance tuples against the program's predicates.

    Facts over intensional predicates are normally allowed (they seed the
    model, which the abduction-to-causality constructions rely on);
    ``strict=True`` rejects them.
    """
    intensional = program.intensional_predicates() if strict else frozenset()
    for atom in sorted(instance.atoms, key=GroundAtom.sort_key):
        known = program.arity_of(atom.predicate)
        if known is not None and known != atom.arity:
            raise ArityMismatchError(atom, known)
        if atom.predicate in intensional:
            raise HeadExtensionalError(atom.predicate, "stored facts must use extensional predicates")
