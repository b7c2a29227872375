from __future__ import annotations

from pathlib import Path

from whyd.parsing import (
    parse_constraints,
    parse_ground_atom,
    parse_instance_document,
    parse_program,
)

FIXTURES = Path(__file__).parent / "fixtures"
GOLDEN = Path(__file__).parent / "golden"


def fixture_path(name: str) -> Path:
    return FIXTURES / name


def fixture_text(name: str) -> str:
    return fixture_path(name).read_text()


def load_program(name: str):
    return parse_program(fixture_text(name), name)


def load_document(name: str):
    return parse_instance_document(fixture_text(name), name)


def load_instance(name: str):
    return load_document(name).instance


def load_constraints(name: str):
    return parse_constraints(fixture_text(name), name)


def atom(text: str):
    return parse_ground_atom(text)
