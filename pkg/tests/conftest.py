"""
공용 픽스처와 무작위 인스턴스 생성기
"""
import random
from fractions import Fraction
from pathlib import Path
from typing import List, Optional

import pytest

from app.core.exceptions import InvalidProblemError
from app.models.problem import Problem
from app.solver import PersuasionSolver, load_problem, prepare

FIXTURES = Path(__file__).parent / "fixtures"

DISCOUNTS = [Fraction(1, 4), Fraction(1, 3), Fraction(1, 2), Fraction(2, 3), Fraction(3, 4)]


def fixture_path(name: str) -> Path:
    return FIXTURES / f"{name}.json"


@pytest.fixture(scope="session")
def example1() -> Problem:
    return load_problem(fixture_path("example1"))


@pytest.fixture(scope="session")
def example2() -> Problem:
    return load_problem(fixture_path("example2"))


@pytest.fixture(scope="session")
def symmetric() -> Problem:
    return load_problem(fixture_path("symmetric"))


@pytest.fixture(scope="session")
def solver1(example1) -> PersuasionSolver:
    return PersuasionSolver(example1)


@pytest.fixture(scope="session")
def solver2(example2) -> PersuasionSolver:
    return PersuasionSolver(example2)


# ============================================================
# 무작위 인스턴스
# ============================================================

def _fraction(rng: random.Random, lo: int = 1, hi: int = 9) -> Fraction:
    return Fraction(rng.randint(lo, hi), rng.randint(1, 4))


def make_instance(seed: int) -> Optional[Problem]:
    """
    세 행동 무작위 인스턴스 (정규화 완료, p₀ 는 Q¹ 의 중점)

    a0 는 ω₀ 에서, a1 은 ω₁ 에서 정적 최적이고 a*는 양쪽 모두에서 손해를 본다.
    τ_q 가 정의되지 않으면 None.
    """
    rng = random.Random(seed)
    A, B = _fraction(rng, 2), _fraction(rng, 2)
    u0 = A * Fraction(rng.randint(1, 9), 10)
    u1 = B * Fraction(rng.randint(1, 9), 10)
    raw = Problem(
        actions=["a0", "a1", "a_star"],
        target_action="a_star",
        agent_payoff={"a0": (A, Fraction(0)), "a1": (Fraction(0), B), "a_star": (u0, u1)},
        principal_payoff=(_fraction(rng), _fraction(rng)),
        discount=rng.choice(DISCOUNTS),
        prior=Fraction(1, 2),
    )
    try:
        problem = prepare(raw)
    except InvalidProblemError:
        return None
    solver = PersuasionSolver(problem, normalized=True)
    if not solver.solvable:
        return None
    lo, hi = solver.ladder.q1
    prior = (lo + hi) / 2
    if not 0 < prior < 1:
        return None
    return problem.model_copy(update={"prior": prior})


def random_instances(count: int, start: int = 0, max_tries: int = 2000) -> List[Problem]:
    """τ_q 가 정의되는 인스턴스 count 개 (시드 순서대로)"""
    found: List[Problem] = []
    seed = start
    while len(found) < count and seed < start + max_tries:
        problem = make_instance(seed)
        if problem is not None:
            found.append(problem)
        seed += 1
    assert len(found) == count, f"무작위 인스턴스 {count}개를 만들지 못했습니다"
    return found
