"""
문제 로딩, 검증, 정규화 테스트
"""
import json
from fractions import Fraction

import pytest

from app.core.exceptions import (
    DiscountOutOfRange,
    DuplicateAction,
    MissingPayoff,
    NonPositivePrincipalPayoff,
    ParseError,
    PriorOutOfRange,
    TargetActionMissing,
    TooFewActions,
)
from app.core.scalar import simplest_between, to_decimal, to_scalar
from app.solver import dump_problem, load_problem, normalize, parse_problem, prepare, validate

from tests.conftest import fixture_path


def _document(**overrides):
    data = json.loads(fixture_path("example1").read_text(encoding="utf-8"))
    data.update(overrides)
    return data


def test_load_example1(example1):
    assert example1.actions == ["a0", "a1", "a_star"]
    assert example1.prior == Fraction(1, 3)
    assert example1.discount == Fraction(1, 2)
    assert example1.agent_payoff["a_star"] == (Fraction(1, 2), Fraction(1, 2))


def test_malformed_rational_is_parse_error():
    with pytest.raises(ParseError):
        parse_problem(_document(discount="3/0"))


def test_missing_field_is_parse_error():
    data = _document()
    del data["prior"]
    with pytest.raises(ParseError):
        parse_problem(data)


def test_missing_file_is_parse_error(tmp_path):
    with pytest.raises(ParseError):
        load_problem(tmp_path / "nope.json")


def test_decimal_strings_are_exact():
    assert to_scalar("0.25") == Fraction(1, 4)
    assert to_scalar(0.1) == Fraction(1, 10)
    assert to_scalar(" 7/21 ") == Fraction(1, 3)


@pytest.mark.parametrize(
    "overrides, error",
    [
        ({"principal_payoff": ["0", "1"]}, NonPositivePrincipalPayoff),
        ({"discount": "1"}, DiscountOutOfRange),
        ({"prior": "0"}, PriorOutOfRange),
        ({"actions": ["a0", "a0", "a_star"]}, DuplicateAction),
        ({"target_action": "zzz"}, TargetActionMissing),
        ({"actions": ["a_star"], "agent_payoff": {"a_star": ["1", "1"]}}, TooFewActions),
        ({"agent_payoff": {"a0": ["1", "0"], "a_star": ["1/2", "1/2"]}}, MissingPayoff),
    ],
)
def test_validation_errors(overrides, error):
    with pytest.raises(error):
        validate(parse_problem(_document(**overrides)))


def test_trivial_instance_is_tagged():
    problem = validate(parse_problem(_document(agent_payoff={
        "a0": ["1", "0"], "a1": ["0", "2"], "a_star": ["1", "2"],
    })))
    assert problem.trivial


def test_normalize_relabels_states(example1):
    swapped = parse_problem(_document(
        agent_payoff={"a0": ["0", "1"], "a1": ["2", "0"], "a_star": ["1/2", "1/2"]},
        prior="2/3",
    ))
    normalized = prepare(swapped)
    assert normalized.relabeled
    assert normalized.prior == Fraction(1, 3)
    assert normalized.agent_payoff == example1.agent_payoff


def test_normalize_is_identity_when_ordered(example1):
    assert normalize(example1) == example1
    assert not prepare(example1).relabeled


def test_dump_round_trip(example1):
    assert parse_problem(json.loads(dump_problem(example1))) == example1


def test_simplest_between():
    assert simplest_between(Fraction(3, 10), Fraction(2, 5)) == Fraction(1, 3)
    assert simplest_between(Fraction(1, 2), Fraction(1, 2)) == Fraction(1, 2)
    assert simplest_between(Fraction(1, 7), Fraction(1, 6)) == Fraction(1, 6)


def test_to_decimal_rounding():
    assert to_decimal(Fraction(1285, 1536), 6) == "0.836589"
    assert to_decimal(Fraction(1, 8), 2) == "0.12"


@pytest.mark.parametrize("overrides", [
    {},
    {"agent_payoff": {"a0": ["0", "1"], "a1": ["2", "0"], "a_star": ["1/2", "1/2"]}, "prior": "2/3"},
    {"principal_payoff": ["3", "1"]},
    {"principal_payoff": ["1", "5"], "prior": "1/5"},
])
def test_normalize_is_idempotent(overrides):
    problem = validate(parse_problem(_document(**overrides)))
    once = normalize(problem)
    assert normalize(once) == once
